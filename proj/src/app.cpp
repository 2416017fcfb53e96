#include "riskroute/app.hpp"

#include <csignal>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "riskroute/error.hpp"
#include "riskroute/kvfile.hpp"
#include "riskroute/riskprob.hpp"
#include "riskroute/util.hpp"

namespace riskroute::app {

namespace fs = std::filesystem;

namespace {

bool parse_flag(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw DataError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  out.close();
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

void ensure_directory(const fs::path& dir) {
  if (dir.empty()) throw Error("output directory path is empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

sweep::RunMeta run_meta(const RunConfig& config, const PreparedData& data) {
  return {config.seed, config.iterations, data.p_general};
}

}  // namespace

void RunConfig::validate() const {
  const std::pair<const char*, const fs::path*> files[] = {
      {"roads", &roads}, {"arcs", &arcs}, {"traffic", &traffic},
      {"brackets", &brackets}, {"instance", &instance}};
  for (const auto& [key, path] : files) {
    if (path->empty()) throw DataError(fmt::format("config: '{}' path is not set", key));
    if (!fs::exists(*path)) {
      throw DataError(fmt::format("config: {} file '{}' does not exist", key, path->string()));
    }
  }
  if (iterations == 0) throw DataError("config: iterations must be positive");
  if (seed == 0) throw DataError("config: seed must be positive");
  if (!(fuel.km_per_liter > 0.0)) throw DataError("config: consumption must be positive");
  if (fuel.fuel_price < 0.0) throw DataError("config: fuel_price must be non-negative");
}

sweep::SweepOptions RunConfig::sweep_options() const {
  sweep::SweepOptions options;
  options.solver.allow_idle_vehicles = allow_idle_vehicles;
  options.heuristic.restarts = heuristic_restarts;
  options.heuristic.seed = seed;
  return options;
}

RunConfig load_run_config(const fs::path& path) {
  const auto kv = KeyValueFile::load(path);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& key) {
    const fs::path p = kv.require(key);
    return p.is_absolute() ? p : (base / p).lexically_normal();
  };
  const std::string where = path.string();

  RunConfig config;
  config.roads = resolve("roads");
  config.arcs = resolve("arcs");
  config.traffic = resolve("traffic");
  config.brackets = resolve("brackets");
  config.instance = resolve("instance");
  config.fuel.fuel_price = kv.number("fuel_price");
  config.fuel.km_per_liter = kv.number("consumption");
  config.deductible_rate = kv.number_or("deductible_rate", config.deductible_rate);
  config.open_bracket_cap = kv.number_or("open_bracket_cap", config.open_bracket_cap);
  if (auto v = kv.get("iterations")) config.iterations = parse_count(*v, where + ": iterations");
  if (auto v = kv.get("seed")) config.seed = parse_count(*v, where + ": seed");
  if (auto v = kv.get("threads")) {
    config.threads = static_cast<unsigned>(parse_count(*v, where + ": threads"));
  }
  if (auto v = kv.get("alpha_grid")) config.alpha_grid = sweep::parse_alpha_grid(*v);
  if (auto v = kv.get("engine")) config.engine = sweep::parse_engine(*v);
  if (auto v = kv.get("allow_idle_vehicles")) {
    config.allow_idle_vehicles = parse_flag(*v, "allow_idle_vehicles");
  }
  if (auto v = kv.get("heuristic_restarts")) {
    config.heuristic_restarts = static_cast<int>(parse_count(*v, where + ": heuristic_restarts"));
  }
  if (auto v = kv.get("record_timing")) config.record_timing = parse_flag(*v, "record_timing");
  if (kv.contains("out")) config.out = resolve("out");
  if (auto v = kv.get("bind")) config.bind = *v;
  return config;
}

PreparedData prepare(const RunConfig& config) {
  config.validate();
  Network network = load_network(config.roads, config.arcs);
  apply_logistics_costs(network, config.fuel);
  const TrafficStats stats = load_traffic_stats(config.traffic);

  PreparedData data;
  // One general probability scales every arc.
  data.p_general = riskprob::annotate_probabilities(network, stats);
  data.table = mcsim::load_loss_brackets(config.brackets, config.deductible_rate,
                                         config.open_bracket_cap);
  mcsim::annotate_risk_costs(network, data.table,
                             {config.iterations, config.seed, config.threads});
  data.instance = load_instance(config.instance, std::move(network));
  return data;
}

PreparedData cmd_risk(const RunConfig& config) {
  PreparedData data = prepare(config);
  ensure_directory(config.out);
  std::ostringstream probabilities;
  riskprob::write_probability_report(probabilities, data.instance.network);
  write_text(config.out / "probabilities.csv", probabilities.str());
  std::ostringstream risk;
  mcsim::write_risk_report(risk, data.instance.network,
                           {config.iterations, config.seed, config.threads});
  write_text(config.out / "risk_costs.csv", risk.str());
  return data;
}

solver::Solution cmd_solve(const RunConfig& config, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DataError(fmt::format("alpha must lie in [0,1], got {}", exact(alpha)));
  }
  const PreparedData data = prepare(config);
  auto solution = sweep::solve(data.instance, alpha, config.engine, config.sweep_options());
  ensure_directory(config.out);
  write_text(config.out / fmt::format("solution_{}.json", sweep::format_alpha(alpha)),
             sweep::solution_json(solution, data.instance, true).dump(2) + "\n");
  return solution;
}

sweep::SweepResult cmd_sweep(const RunConfig& config, sweep::SolutionCache* cache) {
  const PreparedData data = prepare(config);
  auto result = sweep::alpha_sweep(data.instance, config.alpha_grid, config.engine,
                                   config.sweep_options(), cache);
  sweep::export_report(result, data.instance, config.out, run_meta(config, data),
                       {config.record_timing});
  if (!result.complete) throw Error(fmt::format("sweep incomplete: {}", result.error));
  return result;
}

ServiceState load_service_state(const RunConfig& config, std::ostream& log) {
  const PreparedData data = prepare(config);
  const std::string expected = sweep::sweep_fingerprint(data.instance, config.alpha_grid, config.engine);
  const fs::path artifact = config.out / "plotdata.json";

  ServiceState state;
  if (fs::exists(artifact)) {
    std::ifstream in(artifact);
    try {
      state.plot_data = nlohmann::json::parse(in);
      const auto stored = state.plot_data.at("meta").at("fingerprint").get<std::string>();
      if (stored == expected && state.plot_data.at("meta").value("complete", false)) return state;
      log << fmt::format("warning: {} was built from different inputs ({} != {}); recomputing\n",
                         artifact.string(), stored, expected);
    } catch (const nlohmann::json::exception& e) {
      log << fmt::format("warning: cannot read {} ({}); recomputing\n", artifact.string(), e.what());
    }
  } else {
    log << fmt::format("warning: {} not found; computing the sweep\n", artifact.string());
  }

  auto result = sweep::alpha_sweep(data.instance, config.alpha_grid, config.engine,
                                   config.sweep_options());
  if (!result.complete) throw Error(fmt::format("sweep incomplete: {}", result.error));
  const sweep::ReportOptions options{config.record_timing};
  sweep::export_report(result, data.instance, config.out, run_meta(config, data), options);
  state.plot_data = sweep::plot_data(result, data.instance, run_meta(config, data), options);
  state.recomputed = true;
  return state;
}

namespace {

service::HttpServer* active_server = nullptr;

extern "C" void handle_interrupt(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int cmd_serve(const RunConfig& config, std::ostream& log) {
  const auto colon = config.bind.rfind(':');
  if (colon == std::string::npos) throw DataError(fmt::format("bind '{}' is not host:port", config.bind));
  const std::string host = config.bind.substr(0, colon);
  const auto port = static_cast<int>(parse_count(config.bind.substr(colon + 1), "bind port"));

  const ServiceState state = load_service_state(config, log);
  const service::Service service(state.plot_data);
  service::HttpServer server(service);
  const int bound = server.bind(host, port);
  log << fmt::format("serving {} on http://{}:{}\n", service.fingerprint(), host, bound);
  log.flush();
  active_server = &server;
  std::signal(SIGINT, handle_interrupt);
  std::signal(SIGTERM, handle_interrupt);
  server.listen();
  active_server = nullptr;
  return 0;
}

}  // namespace riskroute::app
