#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "riskroute/domain.hpp"
#include "riskroute/solver.hpp"

namespace riskroute::sweep {

enum class Engine { exact, heuristic };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view text);

/// 0.00, 0.05, ..., 1.00.
std::vector<double> default_alpha_grid();

/// Either `start:stop:step` or a comma-separated list. Values must be
/// distinct and inside [0,1]; the result is sorted.
std::vector<double> parse_alpha_grid(std::string_view text);

struct SweepPoint {
  double alpha = 0.0;
  Money logistics_total = 0.0;
  Money risk_total = 0.0;
  Money objective = 0.0;
  double wall_ms = 0.0;
  solver::Solution solution;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // sorted by alpha
  std::vector<double> grid;
  Engine engine = Engine::exact;
  std::string fingerprint;  // content hash of instance, costs, grid and engine
  bool complete = true;     // false when a solver error cut the sweep short
  std::string error;

  /// Digest of every solution in the sweep (timings excluded).
  std::string digest() const;
};

struct SweepOptions {
  solver::SolverOptions solver;
  solver::HeuristicParams heuristic;
};

/// Hash over the instance data the solvers see: nodes, demands, fleet, and
/// the logistics and risk cost of every arc between instance nodes.
std::string instance_fingerprint(const Instance& instance);
std::string sweep_fingerprint(const Instance& instance, std::span<const double> grid, Engine engine);

/// Solutions keyed by (fingerprint, alpha, engine); thread-safe.
class SolutionCache {
 public:
  using Solve = std::function<solver::Solution()>;

  solver::Solution get_or_solve(const std::string& fingerprint, double alpha, Engine engine,
                                const Solve& solve);
  std::optional<solver::Solution> find(const std::string& fingerprint, double alpha,
                                       Engine engine) const;
  void put(const std::string& fingerprint, double alpha, Engine engine, solver::Solution solution);

  std::size_t size() const;
  std::size_t solve_count() const;

 private:
  using Key = std::tuple<std::string, double, Engine>;
  mutable std::mutex mutex_;
  std::map<Key, solver::Solution> entries_;
  std::size_t solves_ = 0;
};

solver::Solution solve(const Instance& instance, double alpha, Engine engine,
                       const SweepOptions& options = {});

SweepResult alpha_sweep(const Instance& instance, std::span<const double> grid, Engine engine,
                        const SweepOptions& options = {}, SolutionCache* cache = nullptr);

/// Adjacent grid interval whose canonical route sets differ.
struct Transition {
  double alpha_from = 0.0;
  double alpha_to = 0.0;
};

std::vector<Transition> transition_points(const SweepResult& result);

// ---------------------------------------------------------------------------
// Reports.

struct ReportOptions {
  // Wall times vary between runs; leaving them out keeps artifacts
  // byte-identical for identical inputs.
  bool record_timing = false;
};

/// Extra provenance recorded alongside the sweep.
struct RunMeta {
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  double p_general = 0.0;
};

/// `alpha` rendered for file names and report rows.
std::string format_alpha(double alpha);

/// JSON with fixed field order: meta, instance, arcs, sweep points (with
/// per-leg costs), transitions. Consumed by the service and dashboard.
nlohmann::ordered_json plot_data(const SweepResult& result, const Instance& instance,
                                 const RunMeta& meta, const ReportOptions& options = {});

nlohmann::ordered_json solution_json(const solver::Solution& solution, const Instance& instance,
                                     bool with_timing);
solver::Solution solution_from_json(const nlohmann::json& doc);

/// Restores the sweep stored in a plot-data document.
SweepResult sweep_from_plot_data(const nlohmann::json& doc);

/// Writes sweep.csv, routes_<alpha>.txt per point and plotdata.json.
void export_report(const SweepResult& result, const Instance& instance,
                   const std::filesystem::path& directory, const RunMeta& meta,
                   const ReportOptions& options = {});

std::string routes_text(const solver::Solution& solution, const Instance& instance);

}  // namespace riskroute::sweep
