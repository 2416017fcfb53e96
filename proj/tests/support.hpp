#pragma once

#include <algorithm>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "riskroute/app.hpp"
#include "riskroute/domain.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return RISKROUTE_SOURCE_DIR; }
inline std::filesystem::path sample_dir() { return source_dir() / "data" / "sample"; }

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("riskroute-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Sample config with a reduced iteration count unless asked otherwise.
inline riskroute::app::RunConfig sample_config(const std::filesystem::path& out,
                                               std::uint64_t iterations = 20'000) {
  auto config = riskroute::app::load_run_config(sample_dir() / "riskroute.conf");
  config.out = out;
  config.iterations = iterations;
  return config;
}

struct Matrix {
  std::vector<std::vector<double>> c;  // logistics, vertex 0 = depot
  std::vector<std::vector<double>> r;  // risk
};

struct RandomCase {
  riskroute::Instance instance;
  Matrix costs;
  std::vector<double> demand;  // index 0 = depot
};

inline std::string vertex_id(std::size_t v) { return v == 0 ? "depot" : "c" + std::to_string(v); }

// Instance over n customers with independent random costs on every ordered pair.
inline RandomCase random_case(std::mt19937_64& gen, std::size_t n, int vehicles, bool symmetric) {
  std::uniform_real_distribution<double> cost(1.0, 100.0);
  std::uniform_int_distribution<int> dem(1, 5);
  RandomCase rc;
  rc.costs.c.assign(n + 1, std::vector<double>(n + 1, 0.0));
  rc.costs.r.assign(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (i == j || (symmetric && j < i)) continue;
      rc.costs.c[i][j] = cost(gen);
      rc.costs.r[i][j] = cost(gen);
      if (symmetric) {
        rc.costs.c[j][i] = rc.costs.c[i][j];
        rc.costs.r[j][i] = rc.costs.r[i][j];
      }
    }
  }
  rc.demand.assign(n + 1, 0.0);
  double total = 0.0;
  double largest = 0.0;
  for (std::size_t v = 1; v <= n; ++v) {
    rc.demand[v] = dem(gen);
    total += rc.demand[v];
    largest = std::max(largest, rc.demand[v]);
  }
  // Capacity between tight and loose, always feasible for the fleet.
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  const double floor = std::max(largest, std::ceil(total / vehicles));
  const double capacity = std::ceil(floor + slack(gen) * (total - floor));

  std::vector<riskroute::Road> roads{{"R1", riskroute::RoadCategory::central_line, 100.0}};
  std::vector<riskroute::Arc> arcs;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (i == j) continue;
      riskroute::Arc arc;
      arc.from = vertex_id(i);
      arc.to = vertex_id(j);
      arc.segments = {{"R1", riskroute::RoadCategory::central_line, 100.0, 1.0}};
      arc.total_length_km = 1.0;
      arc.logistics_cost = rc.costs.c[i][j];
      arc.risk_cost = rc.costs.r[i][j];
      arcs.push_back(std::move(arc));
    }
  }
  auto& inst = rc.instance;
  inst.name = "random";
  inst.depot = "depot";
  inst.vehicle_count = vehicles;
  inst.capacity = capacity;
  for (std::size_t v = 0; v <= n; ++v) inst.nodes.push_back({vertex_id(v), vertex_id(v), {}, rc.demand[v]});
  inst.network = riskroute::Network(std::move(roads), std::move(arcs));
  return rc;
}

// Every permutation cut into exactly `vehicles` non-empty pieces.
inline double brute_force_objective(const RandomCase& rc, int vehicles, double alpha) {
  const std::size_t n = rc.demand.size() - 1;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  const double capacity = rc.instance.capacity;
  auto weight = [&](std::size_t i, std::size_t j) {
    return (1.0 - alpha) * rc.costs.c[i][j] + alpha * rc.costs.r[i][j];
  };
  double best = std::numeric_limits<double>::infinity();
  do {
    // cuts[k] = start index of piece k; choose vehicles-1 cut positions in 1..n-1.
    std::vector<bool> mask(n - 1, false);
    std::fill(mask.begin(), mask.begin() + (vehicles - 1), true);
    std::sort(mask.begin(), mask.end());
    do {
      double z = 0.0;
      double load = 0.0;
      std::size_t at = 0;
      bool ok = true;
      for (std::size_t p = 0; p < n && ok; ++p) {
        z += weight(at, perm[p]);
        load += rc.demand[perm[p]];
        at = perm[p];
        const bool cut = p + 1 == n || mask[p];
        if (cut) {
          z += weight(at, 0);
          ok = load <= capacity;
          load = 0.0;
          at = 0;
        }
      }
      if (ok) best = std::min(best, z);
    } while (std::next_permutation(mask.begin(), mask.end()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace testing
