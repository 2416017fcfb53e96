#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <tuple>

#include <fmt/format.h>

#include "cost_model.hpp"
#include "riskroute/error.hpp"
#include "riskroute/rng.hpp"
#include "riskroute/solver.hpp"

namespace riskroute::solver {

namespace {

using detail::Cost;
using detail::CostModel;
using Routes = std::vector<std::vector<std::size_t>>;

bool is_symmetric(const CostModel& model) {
  const std::size_t size = model.customer_count() + 1;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) {
      const Cost& a = model.arc(i, j);
      const Cost& b = model.arc(j, i);
      if (a.logistics != b.logistics || a.risk != b.risk) return false;
    }
  }
  return true;
}

struct Saving {
  double value;
  std::size_t from;
  std::size_t to;
};

// Clarke-Wright savings, merging until the fleet size is reached.
Routes savings_construction(const CostModel& model, bool allow_idle, double noise,
                            Xoshiro256& rng) {
  const std::size_t n = model.customer_count();
  const auto vehicles = static_cast<std::size_t>(model.vehicle_count());
  const bool symmetric = is_symmetric(model);

  std::vector<std::deque<std::size_t>> routes(n + 1);
  std::vector<std::size_t> owner(n + 1);
  std::vector<double> load(n + 1, 0.0);
  for (std::size_t v = 1; v <= n; ++v) {
    routes[v] = {v};
    owner[v] = v;
    load[v] = model.demand(v);
  }
  std::size_t count = n;

  std::vector<Saving> savings;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (i == j || (symmetric && j < i)) continue;
      double s = model.weighted(i, 0) + model.weighted(0, j) - model.weighted(i, j);
      if (noise > 0.0) s *= 1.0 + noise * (rng.uniform() - 0.5);
      savings.push_back({s, i, j});
    }
  }
  std::stable_sort(savings.begin(), savings.end(),
                   [](const Saving& a, const Saving& b) { return a.value > b.value; });

  for (const auto& s : savings) {
    const bool needed = count > vehicles;
    if (!needed && !(allow_idle && s.value > 0.0)) {
      if (!allow_idle) break;
      continue;
    }
    std::size_t a = owner[s.from];
    std::size_t b = owner[s.to];
    if (a == b || load[a] + load[b] > model.capacity()) continue;
    auto& ra = routes[a];
    auto& rb = routes[b];
    if (ra.back() != s.from) {
      if (!symmetric || ra.front() != s.from) continue;
      std::reverse(ra.begin(), ra.end());
    }
    if (rb.front() != s.to) {
      if (!symmetric || rb.back() != s.to) continue;
      std::reverse(rb.begin(), rb.end());
    }
    for (std::size_t v : rb) {
      ra.push_back(v);
      owner[v] = a;
    }
    rb.clear();
    load[a] += load[b];
    load[b] = 0.0;
    --count;
  }

  if (count > vehicles) {
    throw InfeasibleError(fmt::format(
        "savings construction could not merge below {} routes for {} vehicles; "
        "the nearest feasible fleet size is {}",
        count, vehicles, count));
  }
  Routes out;
  for (const auto& r : routes) {
    if (!r.empty()) out.emplace_back(r.begin(), r.end());
  }
  return out;
}

// First-fit decreasing, then first-fit over shuffled orders; the fallback
// when greedy merging strands demand across too many routes.
Routes packing_construction(const CostModel& model, Xoshiro256& rng) {
  const std::size_t n = model.customer_count();
  const std::size_t vehicles = std::min(static_cast<std::size_t>(model.vehicle_count()), n);
  std::vector<std::size_t> order(n);
  for (std::size_t v = 1; v <= n; ++v) order[v - 1] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.demand(a) > model.demand(b); });

  constexpr int kShuffles = 500;
  for (int attempt = 0; attempt <= kShuffles; ++attempt) {
    if (attempt > 0) std::shuffle(order.begin(), order.end(), rng);
    Routes routes(vehicles);
    std::vector<double> load(vehicles, 0.0);
    bool fits = true;
    for (std::size_t v : order) {
      std::size_t slot = 0;
      while (slot < vehicles && load[slot] + model.demand(v) > model.capacity()) ++slot;
      if (slot == vehicles) {
        fits = false;
        break;
      }
      routes[slot].push_back(v);
      load[slot] += model.demand(v);
    }
    if (!fits) continue;
    // Give every idle vehicle a customer taken from the longest route.
    for (auto& r : routes) {
      if (!r.empty()) continue;
      auto donor = std::max_element(routes.begin(), routes.end(),
                                    [](const auto& a, const auto& b) { return a.size() < b.size(); });
      r.push_back(donor->back());
      donor->pop_back();
    }
    return routes;
  }
  throw InfeasibleError(fmt::format(
      "neither savings merging nor first-fit packing fits the demand into {} vehicles",
      model.vehicle_count()));
}

bool improves(const CostModel& model, const Cost& candidate, const Cost& current) {
  return model.compare(candidate, current) < 0;
}

bool two_opt(const CostModel& model, std::vector<std::size_t>& route) {
  bool changed = false;
  Cost current = model.route_cost(route);
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    for (std::size_t j = i + 1; j < route.size(); ++j) {
      std::reverse(route.begin() + i, route.begin() + j + 1);
      const Cost cand = model.route_cost(route);
      if (improves(model, cand, current)) {
        current = cand;
        changed = true;
      } else {
        std::reverse(route.begin() + i, route.begin() + j + 1);
      }
    }
  }
  return changed;
}

bool relocate(const CostModel& model, Routes& routes, bool allow_idle) {
  for (std::size_t a = 0; a < routes.size(); ++a) {
    for (std::size_t p = 0; p < routes[a].size(); ++p) {
      if (routes[a].size() == 1 && !allow_idle) continue;
      const std::size_t v = routes[a][p];
      for (std::size_t b = 0; b < routes.size(); ++b) {
        if (b != a && model.route_load(routes[b]) + model.demand(v) > model.capacity()) continue;
        const Cost before =
            model.route_cost(routes[a]) + (b == a ? Cost{} : model.route_cost(routes[b]));
        auto from = routes[a];
        from.erase(from.begin() + p);
        const std::size_t slots = (b == a ? from.size() : routes[b].size()) + 1;
        for (std::size_t q = 0; q < slots; ++q) {
          auto to = b == a ? from : routes[b];
          to.insert(to.begin() + q, v);
          const Cost after = b == a ? model.route_cost(to) : model.route_cost(from) + model.route_cost(to);
          if (improves(model, after, before)) {
            if (b == a) {
              routes[a] = std::move(to);
            } else {
              routes[a] = std::move(from);
              routes[b] = std::move(to);
            }
            if (routes[a].empty()) routes.erase(routes.begin() + a);
            return true;
          }
        }
      }
    }
  }
  return false;
}

bool swap_between(const CostModel& model, Routes& routes) {
  for (std::size_t a = 0; a < routes.size(); ++a) {
    for (std::size_t b = a + 1; b < routes.size(); ++b) {
      const Cost before = model.route_cost(routes[a]) + model.route_cost(routes[b]);
      const double load_a = model.route_load(routes[a]);
      const double load_b = model.route_load(routes[b]);
      for (std::size_t p = 0; p < routes[a].size(); ++p) {
        for (std::size_t q = 0; q < routes[b].size(); ++q) {
          const double da = model.demand(routes[a][p]);
          const double db = model.demand(routes[b][q]);
          if (load_a - da + db > model.capacity() || load_b - db + da > model.capacity()) continue;
          std::swap(routes[a][p], routes[b][q]);
          const Cost after = model.route_cost(routes[a]) + model.route_cost(routes[b]);
          if (improves(model, after, before)) return true;
          std::swap(routes[a][p], routes[b][q]);
        }
      }
    }
  }
  return false;
}

void local_search(const CostModel& model, Routes& routes, bool allow_idle) {
  // Each accepted move strictly lowers the objective, so this terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& r : routes) changed = two_opt(model, r) || changed;
    if (relocate(model, routes, allow_idle)) changed = true;
    if (swap_between(model, routes)) changed = true;
  }
}

Cost total_cost(const CostModel& model, const Routes& routes) {
  Cost total;
  for (const auto& r : routes) total += model.route_cost(r);
  return total;
}

}  // namespace

Solution solve_heuristic(const Instance& instance, double alpha, const HeuristicParams& params) {
  const auto start = std::chrono::steady_clock::now();
  const CostModel model(instance, alpha);
  const bool allow_idle = params.options.allow_idle_vehicles;
  model.check_feasible(allow_idle);

  Routes best;
  Cost best_cost;
  const int attempts = std::max(1, params.restarts);
  bool stranded = false;
  for (int attempt = 0; attempt < attempts + 1; ++attempt) {
    Routes routes;
    if (attempt < attempts) {
      std::uint64_t stream = params.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt + 1));
      Xoshiro256 rng(splitmix64(stream));
      try {
        routes = savings_construction(model, allow_idle, attempt == 0 ? 0.0 : 0.3, rng);
      } catch (const InfeasibleError&) {
        stranded = true;
        continue;
      }
    } else if (stranded && best.empty()) {
      std::uint64_t stream = params.seed;
      Xoshiro256 rng(splitmix64(stream));
      routes = packing_construction(model, rng);
    } else {
      break;
    }
    if (params.local_search) local_search(model, routes, allow_idle);
    for (auto& r : routes) {
      std::vector<std::size_t> reversed(r.rbegin(), r.rend());
      if (model.compare(model.route_cost(reversed), model.route_cost(r)) == 0 && reversed < r) {
        r = std::move(reversed);
      }
    }
    std::sort(routes.begin(), routes.end());
    const Cost cost = total_cost(model, routes);
    const int cmp = best.empty() ? -1 : model.compare(cost, best_cost);
    if (cmp < 0 || (cmp == 0 && routes < best)) {
      best = std::move(routes);
      best_cost = cost;
    }
  }
  auto solution = model.make_solution(std::move(best), "heuristic");
  solution.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return solution;
}

}  // namespace riskroute::solver
