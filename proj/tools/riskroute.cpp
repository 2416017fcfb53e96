// riskroute: risk-aware capacitated vehicle routing from the command line.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "riskroute/app.hpp"
#include "riskroute/error.hpp"

namespace {

using riskroute::app::RunConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iterations;
  std::optional<std::string> engine;
  std::optional<std::string> out;
};

RunConfig resolve_config(const Overrides& o) {
  std::string path = o.config;
  if (path.empty()) {
    if (const char* env = std::getenv("RISKROUTE_CONFIG")) path = env;
  }
  if (path.empty()) throw riskroute::DataError("no config given: pass --config or set RISKROUTE_CONFIG");
  RunConfig config = riskroute::app::load_run_config(path);
  if (o.seed) config.seed = *o.seed;
  if (o.iterations) config.iterations = *o.iterations;
  if (o.engine) config.engine = riskroute::sweep::parse_engine(*o.engine);
  if (o.out) config.out = *o.out;
  return config;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run configuration file (falls back to $RISKROUTE_CONFIG)");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed")->check(CLI::PositiveNumber);
  cmd->add_option("--iterations", o.iterations, "Monte Carlo iterations per arc")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--engine", o.engine, "solver engine")
      ->check(CLI::IsMember({"exact", "heuristic"}));
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware capacitated vehicle routing"};
  app.require_subcommand(1);

  Overrides risk_o, solve_o, sweep_o, serve_o;
  double alpha = 0.0;
  auto* risk = app.add_subcommand("risk", "accident probabilities and Monte Carlo risk costs per arc");
  add_common(risk, risk_o);
  auto* solve = app.add_subcommand("solve", "solve for one alpha");
  add_common(solve, solve_o);
  solve->add_option("--alpha", alpha, "weight of risk cost in [0,1]")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  auto* sweep = app.add_subcommand("sweep", "solve over the alpha grid and export reports");
  add_common(sweep, sweep_o);
  auto* serve = app.add_subcommand("serve", "serve precomputed results over HTTP");
  add_common(serve, serve_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (risk->parsed()) {
      const RunConfig config = resolve_config(risk_o);
      const auto data = riskroute::app::cmd_risk(config);
      std::cout << fmt::format("p_general {:.8f}\nwrote {} and {}\n", data.p_general,
                               (config.out / "probabilities.csv").string(),
                               (config.out / "risk_costs.csv").string());
    } else if (solve->parsed()) {
      const RunConfig config = resolve_config(solve_o);
      const auto solution = riskroute::app::cmd_solve(config, alpha);
      std::cout << fmt::format("alpha {} objective {:.2f} (logistics {:.2f}, risk {:.2f})\n", alpha,
                               solution.objective, solution.logistics_total, solution.risk_total);
      for (const auto& r : solution.routes) {
        std::cout << "  vehicle " << r.vehicle_id << ":";
        for (const auto& s : r.stops) std::cout << ' ' << s;
        std::cout << '\n';
      }
    } else if (sweep->parsed()) {
      const RunConfig config = resolve_config(sweep_o);
      const auto result = riskroute::app::cmd_sweep(config);
      for (const auto& p : result.points) {
        std::cout << fmt::format("alpha {:.2f}  logistics {:9.2f}  risk {:9.2f}  z {:9.2f}\n",
                                 p.alpha, p.logistics_total, p.risk_total, p.objective);
      }
      std::cout << "wrote reports to " << config.out.string() << '\n';
    } else if (serve->parsed()) {
      const RunConfig config = resolve_config(serve_o);
      return riskroute::app::cmd_serve(config, std::cerr);
    }
  } catch (const riskroute::Error& e) {
    std::cerr << "riskroute: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "riskroute: unexpected error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
