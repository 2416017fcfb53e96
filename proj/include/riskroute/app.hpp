#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "riskroute/domain.hpp"
#include "riskroute/mcsim.hpp"
#include "riskroute/service.hpp"
#include "riskroute/solver.hpp"
#include "riskroute/sweep.hpp"

namespace riskroute::app {

/// Everything one run needs. Loaded from a `key = value` file whose relative
/// paths resolve against the file's directory.
struct RunConfig {
  std::filesystem::path roads;
  std::filesystem::path arcs;
  std::filesystem::path traffic;
  std::filesystem::path brackets;
  std::filesystem::path instance;

  FuelPolicy fuel;
  double deductible_rate = 0.01;
  Money open_bracket_cap = 1'000'000.0;
  std::uint64_t iterations = mcsim::kDefaultIterations;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::vector<double> alpha_grid = sweep::default_alpha_grid();
  sweep::Engine engine = sweep::Engine::exact;
  bool allow_idle_vehicles = false;
  int heuristic_restarts = 8;
  bool record_timing = false;

  std::filesystem::path out = "out";
  std::string bind = "127.0.0.1:8080";

  /// Throws DataError naming the first missing path or bad setting.
  void validate() const;
  sweep::SweepOptions sweep_options() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Instance with logistics costs, accident probabilities and risk costs set.
struct PreparedData {
  Instance instance;
  double p_general = 0.0;
  mcsim::LossBracketTable table;
};

PreparedData prepare(const RunConfig& config);

/// Writes probabilities.csv and risk_costs.csv to config.out.
PreparedData cmd_risk(const RunConfig& config);

/// Writes solution_<alpha>.json to config.out.
solver::Solution cmd_solve(const RunConfig& config, double alpha);

/// Writes sweep.csv, routes_<alpha>.txt and plotdata.json to config.out.
sweep::SweepResult cmd_sweep(const RunConfig& config, sweep::SolutionCache* cache = nullptr);

struct ServiceState {
  nlohmann::json plot_data;
  bool recomputed = false;  // artifacts were missing or stale
};

/// Loads config.out/plotdata.json if its fingerprint matches the current
/// inputs; otherwise reruns the sweep (warning on `log`) and rewrites it.
ServiceState load_service_state(const RunConfig& config, std::ostream& log);

/// Serves the API until interrupted.
int cmd_serve(const RunConfig& config, std::ostream& log);

}  // namespace riskroute::app
