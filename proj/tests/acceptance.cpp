// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "riskroute/app.hpp"
#include "riskroute/mcsim.hpp"
#include "riskroute/riskprob.hpp"
#include "riskroute/solver.hpp"
#include "riskroute/sweep.hpp"
#include "riskroute/util.hpp"
#include "support.hpp"

using namespace riskroute;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& criterion) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = criterion();
  } catch (const std::exception& e) {
    out = {false, fmt::format("threw: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!out.pass) ++failures;
  fmt::print("{}  {:<28} {} ({:.2f} s)\n", out.pass ? "PASS" : "FAIL", name, out.detail, secs);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::size_t& files) {
  files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    ++files;
    const auto other = b / entry.path().filename();
    if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) return false;
  }
  std::size_t count_b = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(b)) ++count_b;
  return count_b == files;
}

Outcome mean_death_rate_check() {
  const double mean = riskprob::mean_death_rate(road_type_table());
  const std::vector<Road> roads{{"X", RoadCategory::single_two_way, 1.0}};
  const double it = riskprob::road_indexes(roads).at("X").type_index;
  const bool pass = mean == 14.6 && std::abs(it - 22.3 / 14.6) <= 1e-12;
  return {pass, fmt::format("mean={} it(single_two_way)={:.12f}", exact(mean), it)};
}

Outcome index_identities() {
  std::mt19937_64 gen(20210301);
  std::uniform_real_distribution<double> flow(1.0, 20'000.0);
  std::uniform_int_distribution<int> cat(0, 4);
  std::uniform_int_distribution<int> size(1, 40);
  double worst = 0.0;
  const int cases = 200;
  for (int trial = 0; trial < cases; ++trial) {
    std::vector<Road> roads;
    const int count = size(gen);
    double total = 0.0;
    for (int i = 0; i < count; ++i) {
      roads.push_back({"R" + std::to_string(i), static_cast<RoadCategory>(cat(gen)), flow(gen)});
      total += roads.back().heavy_vehicle_flow;
    }
    const double mean = total / count;
    const auto idx = riskprob::road_indexes(roads);
    double sum = 0.0;
    for (const auto& road : roads) {
      const double iv = idx.at(road.road_id).flow_index;
      worst = std::max(worst, std::abs(iv - road.heavy_vehicle_flow / mean));
      sum += iv;
    }
    worst = std::max(worst, std::abs(sum / count - 1.0));
  }
  return {worst <= 1e-12, fmt::format("{} road sets, max deviation {:.3e}", cases, worst)};
}

Outcome distribution_anchor() {
  const auto d = mcsim::build_cost_distribution(0.009029, mcsim::default_loss_brackets());
  const double c = d.outcomes.front().cumulative;
  return {d.outcomes.front().cost == 0.0 && std::abs(c - 0.990971) <= 1e-9,
          fmt::format("no-accident cumulative {:.9f}", c)};
}

Outcome monte_carlo_convergence() {
  const auto table = mcsim::default_loss_brackets();
  const double conditional = table.conditional_mean();
  const std::vector<double> probabilities{0.0005, 0.001, 0.002,  0.003, 0.005,
                                          0.0075, 0.009029, 0.015, 0.02, 0.05};
  int runs = 0;
  int within_one = 0;
  int within_four = 0;
  double worst = 0.0;
  for (double p : probabilities) {
    const auto d = mcsim::build_cost_distribution(p, table);
    const double closed = p * conditional;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto est = mcsim::estimate_risk_cost(d, mcsim::kDefaultIterations, seed * 7919);
      const double z = std::abs(est.mean - closed) / est.std_error;
      worst = std::max(worst, z);
      ++runs;
      within_one += z <= 1.0;
      within_four += z <= 4.0;
    }
  }
  const double share = static_cast<double>(within_one) / runs;
  const bool pass = std::abs(conditional - 4279.80) < 1e-9 && within_four == runs && share >= 0.60;
  return {pass, fmt::format("conditional mean {:.2f}; {} runs at 1e6: {}/{} within 4se, {:.0f}% within 1se, "
                            "worst {:.2f}se",
                            conditional, runs, within_four, runs, 100.0 * share, worst)};
}

Outcome exact_oracle() {
  std::mt19937_64 gen(4242);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_int_distribution<int> fleet(1, 3);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  const int cases = 150;
  double worst = 0.0;
  for (int trial = 0; trial < cases; ++trial) {
    const int n = size(gen);
    const int k = std::min(n, fleet(gen));
    const auto rc = testing::random_case(gen, static_cast<std::size_t>(n), k, trial % 2 == 1);
    const double alpha = weight(gen);
    const double oracle = testing::brute_force_objective(rc, k, alpha);
    worst = std::max(worst, std::abs(solver::solve_exact(rc.instance, alpha).objective - oracle));
  }
  return {worst <= 1e-9, fmt::format("{} instances (n<=7, K<=3), max |diff| {:.3e}", cases, worst)};
}

Outcome scalarization(const app::RunConfig& config) {
  const auto data = app::prepare(config);
  const auto start = Clock::now();
  const auto result = sweep::alpha_sweep(data.instance, config.alpha_grid, sweep::Engine::exact,
                                         config.sweep_options());
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!result.complete || result.points.size() != 21) {
    return {false, fmt::format("sweep incomplete: {}", result.error)};
  }
  const auto& pts = result.points;
  bool logistics = true;
  bool risk = true;
  bool concave = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    logistics = logistics && pts[i].logistics_total >= pts[i - 1].logistics_total - 1e-9;
    risk = risk && pts[i].risk_total <= pts[i - 1].risk_total + 1e-9;
  }
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    concave = concave && pts[i].objective >= 0.5 * (pts[i - 1].objective + pts[i + 1].objective) - 1e-9;
  }
  const bool pass = logistics && risk && concave && secs < 5.0;
  return {pass, fmt::format("{} customers, K={}: logistics {}, risk {}, z* {}; sweep {:.3f} s "
                            "(logistics {:.2f}->{:.2f}, risk {:.2f}->{:.2f})",
                            data.instance.customers().size(), data.instance.vehicle_count,
                            logistics ? "non-decreasing" : "NOT monotone",
                            risk ? "non-increasing" : "NOT monotone", concave ? "concave" : "NOT concave",
                            secs, pts.front().logistics_total, pts.back().logistics_total,
                            pts.front().risk_total, pts.back().risk_total)};
}

Outcome qualitative_orderings(const app::RunConfig& config) {
  const auto data = app::prepare(config);
  const auto& inst = data.instance;
  // Same road type (central line), heavy flow 6943 vs 535.
  const Arc& busy = inst.arc("piracicaba", "santa_barbara");
  const Arc& quiet = inst.arc("limeira", "mogi_mirim");
  // Similar flow (560 vs 535), single lane two way vs central line.
  const Arc& deadly = inst.arc("mogi_mirim", "araras");

  const bool flow = *busy.accident_probability > *quiet.accident_probability &&
                    *busy.risk_cost > *quiet.risk_cost;
  const bool type = *deadly.accident_probability > *quiet.accident_probability &&
                    *deadly.risk_cost > *quiet.risk_cost;
  return {flow && type,
          fmt::format("flow: P {:.5f}% > {:.5f}%, r {:.2f} > {:.2f}; type: P {:.5f}% > {:.5f}%, "
                      "r {:.2f} > {:.2f}",
                      100 * *busy.accident_probability, 100 * *quiet.accident_probability,
                      *busy.risk_cost, *quiet.risk_cost, 100 * *deadly.accident_probability,
                      100 * *quiet.accident_probability, *deadly.risk_cost, *quiet.risk_cost)};
}

Outcome determinism(const app::RunConfig& base) {
  const auto a = testing::scratch("accept-a");
  const auto b = testing::scratch("accept-b");
  auto first = base;
  first.out = a;
  auto second = base;
  second.out = b;
  app::cmd_risk(first);
  app::cmd_sweep(first);
  app::cmd_risk(second);
  app::cmd_sweep(second);
  std::size_t files = 0;
  const bool same = same_tree(a, b, files);
  return {same && files >= 25, fmt::format("{} artifacts compared byte for byte", files)};
}

}  // namespace

int main() {
  const auto config = testing::sample_config(testing::scratch("accept"), mcsim::kDefaultIterations);

  run("mean death rate", mean_death_rate_check);
  run("index identities", index_identities);
  run("distribution anchor", distribution_anchor);
  run("monte carlo convergence", monte_carlo_convergence);
  run("exact solver oracle", exact_oracle);
  run("scalarization properties", [&] { return scalarization(config); });
  run("qualitative orderings", [&] { return qualitative_orderings(config); });
  run("determinism", [&] { return determinism(config); });

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
