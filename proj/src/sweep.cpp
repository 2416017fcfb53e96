#include "riskroute/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "riskroute/error.hpp"
#include "riskroute/util.hpp"

namespace riskroute::sweep {

using nlohmann::ordered_json;

std::string_view to_string(Engine engine) {
  return engine == Engine::exact ? "exact" : "heuristic";
}

Engine parse_engine(std::string_view text) {
  if (text == "exact") return Engine::exact;
  if (text == "heuristic") return Engine::heuristic;
  throw DataError(fmt::format("unknown engine '{}' (expected exact or heuristic)", text));
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

namespace {

double snap(double value) { return std::round(value * 1e9) / 1e9; }

void check_grid(std::vector<double>& grid) {
  if (grid.empty()) throw DataError("alpha grid is empty");
  for (double a : grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw DataError(fmt::format("alpha {} outside [0,1]", exact(a)));
  }
  std::sort(grid.begin(), grid.end());
  if (std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw DataError("alpha grid values must be distinct");
  }
}

}  // namespace

std::vector<double> parse_alpha_grid(std::string_view text) {
  std::vector<double> grid;
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    const double start = parse_number(colon[0], "alpha grid start");
    const double stop = parse_number(colon[1], "alpha grid stop");
    const double step = parse_number(colon[2], "alpha grid step");
    if (!(step > 0.0)) throw DataError("alpha grid step must be positive");
    for (int i = 0;; ++i) {
      const double a = snap(start + i * step);
      if (a > stop + 1e-12) break;
      grid.push_back(a);
    }
  } else if (colon.size() == 1) {
    for (const auto& item : split(text, ',')) grid.push_back(parse_number(item, "alpha grid"));
  } else {
    throw DataError(fmt::format("cannot read alpha grid '{}'", text));
  }
  check_grid(grid);
  return grid;
}

std::string SweepResult::digest() const {
  std::uint64_t h = fnv1a64(fingerprint);
  for (const auto& p : points) {
    h = fnv1a64(fmt::format("{}|{}|{}|{}|{};", exact(p.alpha), exact(p.logistics_total),
                            exact(p.risk_total), exact(p.objective),
                            solver::canonical_routes(p.solution)),
                h);
  }
  return hex64(h);
}

std::string instance_fingerprint(const Instance& instance) {
  std::string text = fmt::format("instance {} depot {} K {} q {}\n", instance.name, instance.depot,
                                 instance.vehicle_count, exact(instance.capacity));
  for (const auto& n : instance.nodes) text += fmt::format("node {} {}\n", n.id, exact(n.demand));
  for (const auto& a : instance.nodes) {
    for (const auto& b : instance.nodes) {
      if (a.id == b.id) continue;
      const Arc& arc = instance.arc(a.id, b.id);
      text += fmt::format("arc {} {} {} {}\n", a.id, b.id, exact(arc.logistics_cost),
                          arc.risk_cost ? exact(*arc.risk_cost) : "unset");
    }
  }
  return hex64(fnv1a64(text));
}

std::string sweep_fingerprint(const Instance& instance, std::span<const double> grid, Engine engine) {
  std::string text = instance_fingerprint(instance);
  text += fmt::format(" engine {} grid", to_string(engine));
  for (double a : grid) text += " " + exact(a);
  return hex64(fnv1a64(text));
}

solver::Solution SolutionCache::get_or_solve(const std::string& fingerprint, double alpha,
                                             Engine engine, const Solve& solve) {
  if (auto hit = find(fingerprint, alpha, engine)) return *hit;
  solver::Solution solution = solve();
  std::lock_guard lock(mutex_);
  ++solves_;
  entries_.insert_or_assign(Key{fingerprint, alpha, engine}, solution);
  return solution;
}

std::optional<solver::Solution> SolutionCache::find(const std::string& fingerprint, double alpha,
                                                    Engine engine) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(Key{fingerprint, alpha, engine});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SolutionCache::put(const std::string& fingerprint, double alpha, Engine engine,
                        solver::Solution solution) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(Key{fingerprint, alpha, engine}, std::move(solution));
}

std::size_t SolutionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t SolutionCache::solve_count() const {
  std::lock_guard lock(mutex_);
  return solves_;
}

solver::Solution solve(const Instance& instance, double alpha, Engine engine,
                       const SweepOptions& options) {
  if (engine == Engine::exact) return solver::solve_exact(instance, alpha, options.solver);
  auto params = options.heuristic;
  params.options = options.solver;
  return solver::solve_heuristic(instance, alpha, params);
}

SweepResult alpha_sweep(const Instance& instance, std::span<const double> grid, Engine engine,
                        const SweepOptions& options, SolutionCache* cache) {
  SweepResult result;
  result.grid.assign(grid.begin(), grid.end());
  check_grid(result.grid);
  result.engine = engine;
  std::string instance_key = instance_fingerprint(instance);
  if (options.solver.allow_idle_vehicles) instance_key += "+idle";
  result.fingerprint = sweep_fingerprint(instance, result.grid, engine);

  for (double alpha : result.grid) {
    try {
      auto run = [&] { return solve(instance, alpha, engine, options); };
      solver::Solution solution =
          cache ? cache->get_or_solve(instance_key, alpha, engine, run) : run();
      SweepPoint point;
      point.alpha = alpha;
      point.logistics_total = solution.logistics_total;
      point.risk_total = solution.risk_total;
      point.objective = solution.objective;
      point.wall_ms = solution.wall_ms;
      point.solution = std::move(solution);
      result.points.push_back(std::move(point));
    } catch (const Error& e) {
      result.complete = false;
      result.error = fmt::format("alpha {}: {}", format_alpha(alpha), e.what());
      break;
    }
  }
  return result;
}

std::vector<Transition> transition_points(const SweepResult& result) {
  std::vector<Transition> out;
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const auto& a = result.points[i - 1];
    const auto& b = result.points[i];
    if (solver::canonical_routes(a.solution) != solver::canonical_routes(b.solution)) {
      out.push_back({a.alpha, b.alpha});
    }
  }
  return out;
}

std::string format_alpha(double alpha) {
  for (int decimals : {2, 4, 6}) {
    std::string text = fixed(alpha, decimals);
    if (std::abs(parse_number(text, "alpha") - alpha) < 1e-12) return text;
  }
  return exact(alpha);
}

namespace {

ordered_json optional_number(const std::optional<double>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

}  // namespace

ordered_json solution_json(const solver::Solution& solution, const Instance& instance,
                           bool with_timing) {
  ordered_json doc;
  doc["alpha"] = solution.alpha;
  doc["engine"] = solution.engine;
  doc["objective"] = solution.objective;
  doc["logistics_total"] = solution.logistics_total;
  doc["risk_total"] = solution.risk_total;
  if (with_timing) doc["wall_ms"] = solution.wall_ms;
  ordered_json routes = ordered_json::array();
  for (const auto& r : solution.routes) {
    ordered_json route;
    route["vehicle_id"] = r.vehicle_id;
    route["stops"] = r.stops;
    route["load"] = r.load;
    route["logistics_cost"] = r.logistics_cost;
    route["risk_cost"] = r.risk_cost;
    ordered_json legs = ordered_json::array();
    NodeId at = instance.depot;
    std::vector<NodeId> path = r.stops;
    path.push_back(instance.depot);
    for (const auto& next : path) {
      const Arc& arc = instance.arc(at, next);
      ordered_json leg;
      leg["from"] = at;
      leg["to"] = next;
      leg["logistics_cost"] = arc.logistics_cost;
      leg["risk_cost"] = optional_number(arc.risk_cost);
      legs.push_back(std::move(leg));
      at = next;
    }
    route["legs"] = std::move(legs);
    routes.push_back(std::move(route));
  }
  doc["routes"] = std::move(routes);
  return doc;
}

solver::Solution solution_from_json(const nlohmann::json& doc) {
  solver::Solution s;
  try {
    s.alpha = doc.at("alpha").get<double>();
    s.engine = doc.at("engine").get<std::string>();
    s.objective = doc.at("objective").get<double>();
    s.logistics_total = doc.at("logistics_total").get<double>();
    s.risk_total = doc.at("risk_total").get<double>();
    s.wall_ms = doc.value("wall_ms", 0.0);
    for (const auto& r : doc.at("routes")) {
      solver::Route route;
      route.vehicle_id = r.at("vehicle_id").get<int>();
      route.stops = r.at("stops").get<std::vector<NodeId>>();
      route.load = r.at("load").get<double>();
      route.logistics_cost = r.at("logistics_cost").get<double>();
      route.risk_cost = r.at("risk_cost").get<double>();
      s.routes.push_back(std::move(route));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed solution document: {}", e.what()));
  }
  return s;
}

ordered_json plot_data(const SweepResult& result, const Instance& instance, const RunMeta& meta,
                       const ReportOptions& options) {
  ordered_json doc;
  ordered_json m;
  m["fingerprint"] = result.fingerprint;
  m["instance_fingerprint"] = instance_fingerprint(instance);
  m["engine"] = std::string(to_string(result.engine));
  m["seed"] = meta.seed;
  m["iterations"] = meta.iterations;
  m["p_general"] = meta.p_general;
  m["grid"] = result.grid;
  m["complete"] = result.complete;
  m["error"] = result.error;
  doc["meta"] = std::move(m);

  ordered_json inst;
  inst["name"] = instance.name;
  inst["depot"] = instance.depot;
  inst["vehicle_count"] = instance.vehicle_count;
  inst["capacity"] = instance.capacity;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : instance.nodes) {
    ordered_json node;
    node["id"] = n.id;
    node["name"] = n.name;
    node["demand"] = n.demand;
    if (n.coordinates) {
      node["lat"] = n.coordinates->lat;
      node["lon"] = n.coordinates->lon;
    } else {
      node["lat"] = nullptr;
      node["lon"] = nullptr;
    }
    nodes.push_back(std::move(node));
  }
  inst["nodes"] = std::move(nodes);
  doc["instance"] = std::move(inst);

  ordered_json arcs = ordered_json::array();
  for (const auto& a : instance.nodes) {
    for (const auto& b : instance.nodes) {
      if (a.id == b.id) continue;
      const Arc& arc = instance.arc(a.id, b.id);
      ordered_json item;
      item["from"] = arc.from;
      item["to"] = arc.to;
      item["length_km"] = arc.total_length_km;
      item["logistics_cost"] = arc.logistics_cost;
      item["exposure"] = optional_number(arc.exposure);
      item["paccident"] = optional_number(arc.accident_probability);
      item["risk_cost"] = optional_number(arc.risk_cost);
      item["risk_std_error"] = optional_number(arc.risk_std_error);
      arcs.push_back(std::move(item));
    }
  }
  doc["arcs"] = std::move(arcs);

  ordered_json points = ordered_json::array();
  for (const auto& p : result.points) {
    ordered_json item;
    item["alpha"] = p.alpha;
    item["logistics_total"] = p.logistics_total;
    item["risk_total"] = p.risk_total;
    item["objective"] = p.objective;
    if (options.record_timing) item["wall_ms"] = p.wall_ms;
    item["solution"] = solution_json(p.solution, instance, options.record_timing);
    points.push_back(std::move(item));
  }
  doc["sweep"] = std::move(points);

  ordered_json transitions = ordered_json::array();
  for (const auto& t : transition_points(result)) {
    transitions.push_back(ordered_json{{"alpha_from", t.alpha_from}, {"alpha_to", t.alpha_to}});
  }
  doc["transitions"] = std::move(transitions);
  return doc;
}

SweepResult sweep_from_plot_data(const nlohmann::json& doc) {
  SweepResult result;
  try {
    const auto& meta = doc.at("meta");
    result.fingerprint = meta.at("fingerprint").get<std::string>();
    result.engine = parse_engine(meta.at("engine").get<std::string>());
    result.grid = meta.at("grid").get<std::vector<double>>();
    result.complete = meta.value("complete", true);
    result.error = meta.value("error", std::string());
    for (const auto& item : doc.at("sweep")) {
      SweepPoint p;
      p.alpha = item.at("alpha").get<double>();
      p.logistics_total = item.at("logistics_total").get<double>();
      p.risk_total = item.at("risk_total").get<double>();
      p.objective = item.at("objective").get<double>();
      p.wall_ms = item.value("wall_ms", 0.0);
      p.solution = solution_from_json(item.at("solution"));
      result.points.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed plot data: {}", e.what()));
  }
  return result;
}

std::string routes_text(const solver::Solution& solution, const Instance& instance) {
  std::string out = fmt::format("alpha {}\nengine {}\n", format_alpha(solution.alpha), solution.engine);
  for (const auto& r : solution.routes) {
    std::string path = instance.depot;
    for (const auto& s : r.stops) path += " -> " + s;
    path += " -> " + instance.depot;
    out += fmt::format("vehicle {}: {} | load {} | logistics {} | risk {}\n", r.vehicle_id, path,
                       fixed(r.load, 2), fixed(r.logistics_cost, 2), fixed(r.risk_cost, 2));
  }
  out += fmt::format("logistics_total {}\nrisk_total {}\nobjective {}\n",
                     fixed(solution.logistics_total, 2), fixed(solution.risk_total, 2),
                     fixed(solution.objective, 2));
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  out.close();
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

void export_report(const SweepResult& result, const Instance& instance,
                   const std::filesystem::path& directory, const RunMeta& meta,
                   const ReportOptions& options) {
  if (directory.empty()) throw Error("report directory path is empty");
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(fmt::format("cannot create '{}': {}", directory.string(), ec.message()));

  std::string csv = "alpha,logistics,risk,objective,wall_ms\n";
  for (const auto& p : result.points) {
    csv += fmt::format("{},{},{},{},{}\n", format_alpha(p.alpha), fixed(p.logistics_total, 4),
                       fixed(p.risk_total, 4), fixed(p.objective, 4),
                       options.record_timing ? fixed(p.wall_ms, 3) : "");
  }
  write_file(directory / "sweep.csv", csv);
  for (const auto& p : result.points) {
    write_file(directory / fmt::format("routes_{}.txt", format_alpha(p.alpha)),
               routes_text(p.solution, instance));
  }
  write_file(directory / "plotdata.json", plot_data(result, instance, meta, options).dump(2) + "\n");
}

}  // namespace riskroute::sweep
