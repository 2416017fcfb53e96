#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "cost_model.hpp"
#include "riskroute/error.hpp"
#include "riskroute/solver.hpp"
#include "riskroute/util.hpp"

namespace riskroute::solver {

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(fmt::format("no validation check named '{}'", name));
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& c : checks) {
    out += fmt::format("{:<18} {}{}\n", c.name, c.passed ? "pass" : "FAIL",
                       c.detail.empty() ? "" : "  " + c.detail);
  }
  return out;
}

std::vector<std::vector<std::size_t>> detect_subtours(const EdgeSelection& selection,
                                                      std::size_t customer_count) {
  const std::size_t arrival = customer_count + 1;
  std::vector<std::vector<std::size_t>> found;
  for (std::size_t k = 0; k < selection.size(); ++k) {
    std::vector<int> in(arrival + 1, 0);
    std::vector<int> out(arrival + 1, 0);
    std::map<std::size_t, std::size_t> next;
    for (const auto& [from, to] : selection[k]) {
      if (from > arrival || to > arrival) {
        throw DataError(fmt::format("vehicle {}: vertex out of range in edge {}->{}", k + 1, from, to));
      }
      if (from == to || to == 0 || from == arrival) {
        throw DataError(fmt::format("vehicle {}: edge {}->{} is not in the edge set", k + 1, from, to));
      }
      ++out[from];
      ++in[to];
      next[from] = to;
    }
    for (std::size_t v = 1; v <= customer_count; ++v) {
      if (in[v] != out[v] || in[v] > 1) {
        throw DataError(fmt::format("vehicle {}: vertex {} has in-degree {} and out-degree {}",
                                    k + 1, v, in[v], out[v]));
      }
    }
    if (out[0] > 1 || in[arrival] > 1 || out[0] != in[arrival]) {
      throw DataError(fmt::format("vehicle {}: depot degrees are inconsistent", k + 1));
    }

    std::vector<bool> seen(arrival + 1, false);
    for (std::size_t at = 0; next.count(at) && !seen[at];) {
      seen[at] = true;
      at = next[at];
    }
    for (std::size_t v = 1; v <= customer_count; ++v) {
      if (seen[v] || out[v] == 0) continue;
      std::vector<std::size_t> cycle;
      for (std::size_t at = v; !seen[at]; at = next[at]) {
        seen[at] = true;
        cycle.push_back(at);
      }
      std::sort(cycle.begin(), cycle.end());
      found.push_back(std::move(cycle));
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::vector<std::vector<std::size_t>> detect_subtours(const EdgeSelection& selection,
                                                      const Instance& instance) {
  return detect_subtours(selection, instance.customers().size());
}

namespace {

std::map<NodeId, std::size_t> customer_vertices(const Instance& instance) {
  std::map<NodeId, std::size_t> vertex;
  std::size_t next = 1;
  for (const Node* c : instance.customers()) vertex[c->id] = next++;
  return vertex;
}

}  // namespace

EdgeSelection edge_selection(const Instance& instance, const Solution& solution) {
  const auto vertex = customer_vertices(instance);
  const std::size_t arrival = vertex.size() + 1;
  EdgeSelection selection;
  for (const auto& route : solution.routes) {
    std::vector<DirectedEdge> edges;
    std::size_t at = 0;
    for (const auto& id : route.stops) {
      const auto it = vertex.find(id);
      if (it == vertex.end()) throw DataError(fmt::format("'{}' is not a customer", id));
      edges.emplace_back(at, it->second);
      at = it->second;
    }
    if (!route.stops.empty()) edges.emplace_back(at, arrival);
    selection.push_back(std::move(edges));
  }
  return selection;
}

ValidationReport validate_solution(const Instance& instance, const Solution& solution,
                                   const SolverOptions& options) {
  const auto vertex = customer_vertices(instance);
  ValidationReport report;
  auto fail = [](CheckResult& c, const std::string& why) {
    if (c.passed) {
      c.passed = false;
      c.detail = why;
    } else {
      c.detail += "; " + why;
    }
  };

  // Each customer served exactly once.
  CheckResult coverage{kCheckCoverage, true, {}};
  std::map<NodeId, int> visits;
  for (const auto& route : solution.routes) {
    for (const auto& id : route.stops) ++visits[id];
  }
  for (const auto& [id, v] : vertex) {
    const int count = visits.count(id) ? visits[id] : 0;
    if (count != 1) fail(coverage, fmt::format("customer '{}' served {} times", id, count));
  }
  for (const auto& [id, count] : visits) {
    if (!vertex.count(id) && id != instance.depot) fail(coverage, fmt::format("unknown node '{}'", id));
  }

  CheckResult capacity{kCheckCapacity, true, {}};
  for (const auto& route : solution.routes) {
    double load = 0.0;
    for (const auto& id : route.stops) {
      if (const Node* node = instance.find_node(id)) load += node->demand;
    }
    if (load > instance.capacity + 1e-9) {
      fail(capacity, fmt::format("vehicle {} carries {} > capacity {}", route.vehicle_id,
                                 exact(load), exact(instance.capacity)));
    }
    if (std::abs(load - route.load) > 1e-9) {
      fail(capacity, fmt::format("vehicle {} reports load {} but stops sum to {}", route.vehicle_id,
                                 exact(route.load), exact(load)));
    }
  }

  // Every vehicle leaves the depot once and serves someone.
  CheckResult departure{kCheckDepotDeparture, true, {}};
  const auto fleet = static_cast<std::size_t>(instance.vehicle_count);
  const std::size_t used = solution.routes.size();
  if (options.allow_idle_vehicles ? used > fleet : used != fleet) {
    fail(departure, fmt::format("{} routes for {} vehicles", used, fleet));
  }
  std::set<int> vehicle_ids;
  for (const auto& route : solution.routes) {
    if (route.stops.empty()) fail(departure, fmt::format("vehicle {} serves no customer", route.vehicle_id));
    if (!vehicle_ids.insert(route.vehicle_id).second) {
      fail(departure, fmt::format("vehicle {} dispatched twice", route.vehicle_id));
    }
  }

  CheckResult flow{kCheckFlowConservation, true, {}};
  for (const auto& route : solution.routes) {
    std::set<NodeId> seen;
    for (const auto& id : route.stops) {
      if (!seen.insert(id).second) {
        fail(flow, fmt::format("vehicle {} enters '{}' more than once", route.vehicle_id, id));
      }
    }
  }

  // The depot is only re-entered at the end of a route.
  CheckResult arrival{kCheckDepotArrival, true, {}};
  for (const auto& route : solution.routes) {
    if (std::find(route.stops.begin(), route.stops.end(), instance.depot) != route.stops.end()) {
      fail(arrival, fmt::format("vehicle {} returns to the depot mid-route", route.vehicle_id));
    }
  }

  CheckResult subtours{kCheckSubtours, true, {}};
  try {
    const auto cycles = detect_subtours(edge_selection(instance, solution), vertex.size());
    for (const auto& cycle : cycles) {
      fail(subtours, fmt::format("cycle over {} customers detached from the depot", cycle.size()));
    }
  } catch (const DataError& e) {
    fail(subtours, fmt::format("edge selection not checkable: {}", e.what()));
  }

  CheckResult objective{kCheckObjective, true, {}};
  Money logistics = 0.0;
  Money risk = 0.0;
  for (const auto& route : solution.routes) {
    Money c = 0.0;
    Money r = 0.0;
    NodeId at = instance.depot;
    bool priced = true;
    auto leg = [&](const NodeId& from, const NodeId& to) {
      const Arc* arc = instance.network.find_arc(from, to);
      if (!arc || !arc->risk_cost) {
        priced = false;
        return;
      }
      c += arc->logistics_cost;
      r += *arc->risk_cost;
    };
    for (const auto& id : route.stops) {
      if (id != at) leg(at, id);
      at = id;
    }
    if (!route.stops.empty() && at != instance.depot) leg(at, instance.depot);
    if (!priced) {
      fail(objective, fmt::format("vehicle {} uses an unpriced arc", route.vehicle_id));
      continue;
    }
    if (detail::compare_with_tolerance(c, route.logistics_cost) != 0 ||
        detail::compare_with_tolerance(r, route.risk_cost) != 0) {
      fail(objective, fmt::format("vehicle {} costs recompute to c={} r={}", route.vehicle_id,
                                  exact(c), exact(r)));
    }
    logistics += c;
    risk += r;
  }
  const double alpha = solution.alpha;
  const Money z = (1.0 - alpha) * logistics + alpha * risk;
  if (detail::compare_with_tolerance(logistics, solution.logistics_total) != 0 ||
      detail::compare_with_tolerance(risk, solution.risk_total) != 0) {
    fail(objective, fmt::format("totals recompute to c={} r={}", exact(logistics), exact(risk)));
  }
  if (std::abs(z - solution.objective) > 1e-9) {
    fail(objective, fmt::format("objective recomputes to {} but {} is stored", exact(z),
                                exact(solution.objective)));
  }

  report.checks = {coverage, capacity, departure, flow, arrival, subtours, objective};
  return report;
}

}  // namespace riskroute::solver
