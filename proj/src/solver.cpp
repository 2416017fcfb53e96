#include "riskroute/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "cost_model.hpp"
#include "riskroute/error.hpp"
#include "riskroute/util.hpp"

namespace riskroute::solver {

namespace detail {

int compare_with_tolerance(double a, double b) {
  const double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  if (a < b - tol) return -1;
  if (a > b + tol) return 1;
  return 0;
}

CostModel::CostModel(const Instance& instance, double alpha)
    : capacity_(instance.capacity), vehicles_(instance.vehicle_count), alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DataError(fmt::format("alpha must lie in [0,1], got {}", exact(alpha)));
  }
  ids_.push_back(instance.depot);
  demands_.push_back(0.0);
  for (const Node* c : instance.customers()) {
    ids_.push_back(c->id);
    demands_.push_back(c->demand);
  }
  const std::size_t size = ids_.size();
  matrix_.resize(size * size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (i == j) continue;
      const Arc& a = instance.arc(ids_[i], ids_[j]);
      if (!a.risk_cost) throw DataError(fmt::format("arc {}: risk cost not set", a.key()));
      matrix_[i * size + j] = Cost{a.logistics_cost, *a.risk_cost};
    }
  }
}

Cost CostModel::route_cost(const std::vector<std::size_t>& stops) const {
  Cost total;
  std::size_t at = 0;
  for (std::size_t v : stops) {
    total += arc(at, v);
    at = v;
  }
  if (!stops.empty()) total += arc(at, 0);
  return total;
}

double CostModel::route_load(const std::vector<std::size_t>& stops) const {
  double load = 0.0;
  for (std::size_t v : stops) load += demands_[v];
  return load;
}

int CostModel::compare(const Cost& a, const Cost& b) const {
  if (int c = compare_with_tolerance(weighted(a), weighted(b))) return c;
  if (int c = compare_with_tolerance(a.risk, b.risk)) return c;
  return compare_with_tolerance(a.logistics, b.logistics);
}

Solution CostModel::make_solution(std::vector<std::vector<std::size_t>> routes,
                                  std::string engine) const {
  for (auto& stops : routes) {
    std::vector<std::size_t> reversed(stops.rbegin(), stops.rend());
    const int cmp = compare(route_cost(reversed), route_cost(stops));
    if (cmp < 0 || (cmp == 0 && reversed < stops)) stops = std::move(reversed);
  }
  std::sort(routes.begin(), routes.end());

  Solution solution;
  solution.alpha = alpha_;
  solution.engine = std::move(engine);
  int vehicle = 0;
  for (const auto& stops : routes) {
    Route route;
    route.vehicle_id = ++vehicle;
    for (std::size_t v : stops) route.stops.push_back(ids_[v]);
    route.load = route_load(stops);
    const Cost cost = route_cost(stops);
    route.logistics_cost = cost.logistics;
    route.risk_cost = cost.risk;
    solution.logistics_total += cost.logistics;
    solution.risk_total += cost.risk;
    solution.routes.push_back(std::move(route));
  }
  solution.objective = (1.0 - alpha_) * solution.logistics_total + alpha_ * solution.risk_total;
  return solution;
}

void CostModel::check_feasible(bool allow_idle_vehicles) const {
  const std::size_t n = customer_count();
  if (n == 0) throw InfeasibleError("instance has no customers");
  double total = 0.0;
  for (std::size_t v = 1; v <= n; ++v) {
    if (demands_[v] > capacity_) {
      throw InfeasibleError(fmt::format("demand {} of customer '{}' exceeds vehicle capacity {}",
                                        exact(demands_[v]), ids_[v], exact(capacity_)));
    }
    total += demands_[v];
  }
  if (total > vehicles_ * capacity_) {
    throw InfeasibleError(fmt::format("total demand {} exceeds fleet capacity {} x {}",
                                      exact(total), vehicles_, exact(capacity_)));
  }
  if (!allow_idle_vehicles && n < static_cast<std::size_t>(vehicles_)) {
    throw InfeasibleError(fmt::format(
        "{} customers cannot occupy {} vehicles; enable allow_idle_vehicles", n, vehicles_));
  }
}

}  // namespace detail

using detail::Cost;
using detail::CostModel;

Money weighted_arc_cost(const Arc& arc, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DataError(fmt::format("alpha must lie in [0,1], got {}", exact(alpha)));
  }
  if (!arc.risk_cost) throw DataError(fmt::format("arc {}: risk cost not set", arc.key()));
  return (1.0 - alpha) * arc.logistics_cost + alpha * *arc.risk_cost;
}

namespace {

using Mask = std::uint32_t;

struct PathState {
  Cost cost;
  std::int8_t prev = -1;  // previous customer (0-based), -1 when leaving the depot
  bool set = false;
};

struct RouteState {
  Cost cost;
  std::int8_t last = -1;
  bool set = false;
};

struct BlockState {
  Cost cost;
  Mask block = 0;  // route covering the lowest customer of the mask
  bool set = false;
};

class ExactEngine {
 public:
  ExactEngine(const CostModel& model) : model_(model), n_(model.customer_count()) {}

  std::vector<std::vector<std::size_t>> solve(bool allow_idle_vehicles) {
    const Mask full = n_ == 32 ? ~Mask{0} : (Mask{1} << n_) - 1;
    build_routes();
    const int max_k = static_cast<int>(std::min<std::size_t>(model_.vehicle_count(), n_));
    build_partitions(max_k);

    int best_k = -1;
    const int min_k = allow_idle_vehicles ? 1 : model_.vehicle_count();
    for (int k = min_k; k <= max_k; ++k) {
      const auto& cand = partitions_[k][full];
      if (!cand.set) continue;
      if (best_k < 0) {
        best_k = k;
        continue;
      }
      const auto& best = partitions_[best_k][full];
      const int cmp = model_.compare(cand.cost, best.cost);
      if (cmp < 0 || (cmp == 0 && sorted_routes(k, full) < sorted_routes(best_k, full))) best_k = k;
    }
    if (best_k < 0) {
      throw InfeasibleError(fmt::format(
          "no split of the customers into {} capacity-feasible routes exists",
          model_.vehicle_count()));
    }
    return sorted_routes(best_k, full);
  }

 private:
  PathState& path(Mask mask, std::size_t last) { return paths_[mask * n_ + last]; }

  std::vector<std::size_t> path_sequence(Mask mask, std::size_t last) {
    std::vector<std::size_t> seq;
    std::int64_t at = static_cast<std::int64_t>(last);
    while (at >= 0) {
      seq.push_back(static_cast<std::size_t>(at) + 1);
      const auto prev = path(mask, static_cast<std::size_t>(at)).prev;
      mask &= ~(Mask{1} << at);
      at = prev;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  void build_routes() {
    const std::size_t count = std::size_t{1} << n_;
    paths_.assign(count * n_, {});
    routes_.assign(count, {});
    loads_.assign(count, 0.0);
    for (Mask mask = 1; mask < count; ++mask) {
      const auto low = static_cast<std::size_t>(std::countr_zero(mask));
      loads_[mask] = loads_[mask & (mask - 1)] + model_.demand(low + 1);
      if (loads_[mask] > model_.capacity()) continue;

      for (std::size_t last = 0; last < n_; ++last) {
        if (!(mask >> last & 1)) continue;
        PathState& state = path(mask, last);
        const Mask prev_mask = mask & ~(Mask{1} << last);
        if (prev_mask == 0) {
          state = {model_.arc(0, last + 1), -1, true};
          continue;
        }
        for (std::size_t p = 0; p < n_; ++p) {
          if (!(prev_mask >> p & 1)) continue;
          const PathState& before = path(prev_mask, p);
          if (!before.set) continue;
          const Cost cand = before.cost + model_.arc(p + 1, last + 1);
          if (!state.set) {
            state = {cand, static_cast<std::int8_t>(p), true};
            continue;
          }
          const int cmp = model_.compare(cand, state.cost);
          if (cmp < 0 || (cmp == 0 && path_sequence(prev_mask, p) <
                                          path_sequence(prev_mask, static_cast<std::size_t>(state.prev)))) {
            state = {cand, static_cast<std::int8_t>(p), true};
          }
        }
      }

      RouteState& route = routes_[mask];
      for (std::size_t last = 0; last < n_; ++last) {
        if (!(mask >> last & 1)) continue;
        const PathState& state = path(mask, last);
        if (!state.set) continue;
        const Cost cand = state.cost + model_.arc(last + 1, 0);
        if (!route.set) {
          route = {cand, static_cast<std::int8_t>(last), true};
          continue;
        }
        const int cmp = model_.compare(cand, route.cost);
        if (cmp < 0 || (cmp == 0 && path_sequence(mask, last) <
                                        path_sequence(mask, static_cast<std::size_t>(route.last)))) {
          route = {cand, static_cast<std::int8_t>(last), true};
        }
      }
    }
  }

  std::vector<std::size_t> route_sequence(Mask mask) {
    return path_sequence(mask, static_cast<std::size_t>(routes_[mask].last));
  }

  std::vector<std::vector<std::size_t>> sorted_routes(int k, Mask mask) {
    std::vector<std::vector<std::size_t>> out;
    while (k > 0 && mask != 0) {
      const Mask block = partitions_[k][mask].block;
      out.push_back(route_sequence(block));
      mask &= ~block;
      --k;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Candidate = route(block) + partition(k - 1, rest), compared as sorted route lists.
  std::vector<std::vector<std::size_t>> candidate_routes(int k, Mask block, Mask rest) {
    auto out = k > 1 ? sorted_routes(k - 1, rest) : std::vector<std::vector<std::size_t>>{};
    out.push_back(route_sequence(block));
    std::sort(out.begin(), out.end());
    return out;
  }

  void build_partitions(int max_k) {
    const std::size_t count = std::size_t{1} << n_;
    partitions_.assign(static_cast<std::size_t>(max_k) + 1, std::vector<BlockState>());
    auto& first = partitions_[1];
    first.assign(count, {});
    for (Mask mask = 1; mask < count; ++mask) {
      if (routes_[mask].set) first[mask] = {routes_[mask].cost, mask, true};
    }
    for (int k = 2; k <= max_k; ++k) {
      auto& layer = partitions_[k];
      layer.assign(count, {});
      const auto& below = partitions_[k - 1];
      for (Mask mask = 1; mask < count; ++mask) {
        if (std::popcount(mask) < k) continue;
        const Mask low = mask & (~mask + 1);
        const Mask others = mask ^ low;
        BlockState& state = layer[mask];
        // Every block holds the lowest customer of the mask, so each
        // partition is enumerated once.
        for (Mask sub = others;; sub = (sub - 1) & others) {
          const Mask block = sub | low;
          const Mask rest = mask ^ block;
          if (rest != 0 && routes_[block].set && below[rest].set) {
            const Cost cand = routes_[block].cost + below[rest].cost;
            bool take = !state.set;
            if (!take) {
              const int cmp = model_.compare(cand, state.cost);
              take = cmp < 0 || (cmp == 0 && candidate_routes(k, block, rest) <
                                                 candidate_routes(k, state.block, mask ^ state.block));
            }
            if (take) state = {cand, block, true};
          }
          if (sub == 0) break;
        }
      }
    }
  }

  const CostModel& model_;
  std::size_t n_;
  std::vector<PathState> paths_;
  std::vector<RouteState> routes_;
  std::vector<double> loads_;
  std::vector<std::vector<BlockState>> partitions_;
};

}  // namespace

Solution solve_exact(const Instance& instance, double alpha, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const CostModel model(instance, alpha);
  if (model.customer_count() > kExactCustomerLimit) {
    throw LimitError(fmt::format("exact engine handles at most {} customers, instance has {}",
                                 kExactCustomerLimit, model.customer_count()));
  }
  model.check_feasible(options.allow_idle_vehicles);
  ExactEngine engine(model);
  auto solution = model.make_solution(engine.solve(options.allow_idle_vehicles), "exact");
  solution.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return solution;
}

std::string canonical_routes(const Solution& solution) {
  std::vector<std::string> parts;
  for (const auto& r : solution.routes) {
    std::string text;
    for (std::size_t i = 0; i < r.stops.size(); ++i) {
      if (i) text += ',';
      text += r.stops[i];
    }
    parts.push_back(std::move(text));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " | ";
    out += parts[i];
  }
  return out;
}

}  // namespace riskroute::solver
