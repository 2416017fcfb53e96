#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "riskroute/domain.hpp"

namespace riskroute::solver {

/// One vehicle's tour; the depot is implicit at both ends.
struct Route {
  int vehicle_id = 0;
  std::vector<NodeId> stops;
  double load = 0.0;
  Money logistics_cost = 0.0;
  Money risk_cost = 0.0;
};

struct Solution {
  std::vector<Route> routes;
  double alpha = 0.0;
  Money logistics_total = 0.0;
  Money risk_total = 0.0;
  Money objective = 0.0;  // (1 - alpha) * logistics_total + alpha * risk_total
  std::string engine;
  double wall_ms = 0.0;
};

struct SolverOptions {
  // Permit fewer than vehicle_count routes. By default every vehicle leaves
  // and returns to the depot, so exactly vehicle_count non-empty routes.
  bool allow_idle_vehicles = false;
};

/// Largest customer count the exact engine accepts.
inline constexpr std::size_t kExactCustomerLimit = 16;

/// (1 - alpha) * c + alpha * r. Throws if the arc has no risk cost.
Money weighted_arc_cost(const Arc& arc, double alpha);

/// Globally optimal solution for the alpha-weighted objective.
///
/// Two-layer dynamic program: the best depot-to-depot path for every
/// capacity-feasible customer subset (subset/last-stop recurrence), then a
/// partition of the customers into exactly K such subsets. Equal objectives
/// are broken by smaller risk, then smaller logistics cost, then the
/// lexicographically smallest sorted route list.
Solution solve_exact(const Instance& instance, double alpha, const SolverOptions& options = {});

struct HeuristicParams {
  SolverOptions options;
  int restarts = 8;
  std::uint64_t seed = 1;
  bool local_search = true;
};

/// Savings construction followed by 2-opt, relocate and swap moves.
/// Deterministic given the params.
Solution solve_heuristic(const Instance& instance, double alpha, const HeuristicParams& params = {});

// ---------------------------------------------------------------------------
// Verification.

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const;
  const CheckResult& check(const std::string& name) const;
  std::string summary() const;
};

/// Check names, in report order.
inline constexpr const char* kCheckCoverage = "coverage";
inline constexpr const char* kCheckCapacity = "capacity";
inline constexpr const char* kCheckDepotDeparture = "depot_departure";
inline constexpr const char* kCheckFlowConservation = "flow_conservation";
inline constexpr const char* kCheckDepotArrival = "depot_arrival";
inline constexpr const char* kCheckSubtours = "subtour_free";
inline constexpr const char* kCheckObjective = "objective";

ValidationReport validate_solution(const Instance& instance, const Solution& solution,
                                   const SolverOptions& options = {});

/// Directed edge in the split-depot graph: 0 is the depot exit, 1..n the
/// customers in instance order, n + 1 the depot arrival.
using DirectedEdge = std::pair<std::size_t, std::size_t>;
using EdgeSelection = std::vector<std::vector<DirectedEdge>>;  // per vehicle

/// Cycles among customers that never touch the depot, one vertex set each
/// (sorted). Throws DataError if a vehicle's selection is not degree-consistent.
std::vector<std::vector<std::size_t>> detect_subtours(const EdgeSelection& selection,
                                                      std::size_t customer_count);
std::vector<std::vector<std::size_t>> detect_subtours(const EdgeSelection& selection,
                                                      const Instance& instance);

/// The split-depot edges a solution uses. Unknown stop ids throw DataError.
EdgeSelection edge_selection(const Instance& instance, const Solution& solution);

/// Order-independent text form of the route set, used to compare plans.
std::string canonical_routes(const Solution& solution);

}  // namespace riskroute::solver
