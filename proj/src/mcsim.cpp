#include "riskroute/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "riskroute/error.hpp"
#include "riskroute/rng.hpp"
#include "riskroute/util.hpp"

namespace riskroute::mcsim {

void LossBracketTable::validate() const {
  if (brackets.empty()) throw DataError("loss bracket table is empty");
  if (!(deductible_rate > 0.0 && deductible_rate <= 1.0)) {
    throw DataError(fmt::format("deductible rate must lie in (0,1], got {}", exact(deductible_rate)));
  }
  double sum = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    const auto& b = brackets[i];
    if (b.occurrence < 0.0) throw DataError(fmt::format("bracket {}: negative occurrence", i + 1));
    sum += b.occurrence;
    if (!b.upper_bound) {
      if (i + 1 != brackets.size()) {
        throw DataError("only the last loss bracket may be open-ended");
      }
      if (!(open_bracket_cap > 0.0) || open_bracket_cap < previous) {
        throw DataError(fmt::format("open bracket cap {} is below the last finite bound {}",
                                    exact(open_bracket_cap), exact(previous)));
      }
      continue;
    }
    if (!(*b.upper_bound > previous)) {
      throw DataError(fmt::format("bracket {}: upper bounds must be positive and increasing", i + 1));
    }
    previous = *b.upper_bound;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError(fmt::format("bracket occurrences sum to {}, expected 1", exact(sum)));
  }
}

std::vector<Money> LossBracketTable::bracket_costs() const {
  std::vector<Money> costs;
  costs.reserve(brackets.size());
  for (const auto& b : brackets) {
    costs.push_back(deductible_rate * b.upper_bound.value_or(open_bracket_cap));
  }
  return costs;
}

Money LossBracketTable::conditional_mean() const {
  validate();
  const auto costs = bracket_costs();
  Money mean = 0.0;
  for (std::size_t i = 0; i < brackets.size(); ++i) mean += brackets[i].occurrence * costs[i];
  return mean;
}

LossBracketTable default_loss_brackets() {
  LossBracketTable table;
  table.brackets = {
      {200'000.0, 0.3791},
      {300'000.0, 0.2417},
      {500'000.0, 0.1991},
      {1'000'000.0, 0.1611},
      {std::nullopt, 0.0190},
  };
  return table;
}

LossBracketTable parse_loss_brackets(std::istream& in, const std::string& source,
                                     double deductible_rate, Money open_bracket_cap) {
  LossBracketTable table;
  table.deductible_rate = deductible_rate;
  table.open_bracket_cap = open_bracket_cap;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "upper_bound,occurrence") {
    throw DataError(fmt::format("{}:1: expected header 'upper_bound,occurrence'", source));
  }
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    const std::string where = fmt::format("{}:{}", source, row);
    if (fields.size() != 2) throw DataError(fmt::format("{}: expected 2 fields", where));
    LossBracket bracket;
    if (trim(fields[0]) != "open") bracket.upper_bound = parse_number(fields[0], where + ": upper_bound");
    bracket.occurrence = parse_number(fields[1], where + ": occurrence");
    table.brackets.push_back(bracket);
  }
  try {
    table.validate();
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  }
  return table;
}

LossBracketTable load_loss_brackets(const std::filesystem::path& path, double deductible_rate,
                                    Money open_bracket_cap) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return parse_loss_brackets(in, path.string(), deductible_rate, open_bracket_cap);
}

CostDistribution build_cost_distribution(double p_accident, const LossBracketTable& table) {
  if (!(p_accident >= 0.0 && p_accident <= 1.0)) {
    throw DataError(fmt::format("accident probability {} outside [0,1]", exact(p_accident)));
  }
  table.validate();
  CostDistribution dist;
  dist.accident_probability = p_accident;
  dist.outcomes.push_back({0.0, 1.0 - p_accident, 1.0 - p_accident});

  const auto costs = table.bracket_costs();
  double occurrence_so_far = 0.0;
  for (std::size_t i = 0; i < table.brackets.size(); ++i) {
    occurrence_so_far += table.brackets[i].occurrence;
    const double mass = p_accident * table.brackets[i].occurrence;
    if (!(mass > 0.0)) continue;
    const double cumulative = (1.0 - p_accident) + p_accident * occurrence_so_far;
    if (!(cumulative > dist.outcomes.back().cumulative)) {
      // Rounding swallowed a tiny mass; fold it into the previous region.
      dist.outcomes.back().mass += mass;
      continue;
    }
    dist.outcomes.push_back({costs[i], mass, cumulative});
  }
  dist.outcomes.back().cumulative = 1.0;
  return dist;
}

Money sample_trip_cost(const CostDistribution& dist, double u) {
  const auto it = std::upper_bound(
      dist.outcomes.begin(), dist.outcomes.end(), u,
      [](double value, const Outcome& o) { return value < o.cumulative; });
  return it == dist.outcomes.end() ? dist.outcomes.back().cost : it->cost;
}

RiskEstimate estimate_risk_cost(const CostDistribution& dist, std::uint64_t iterations,
                                std::uint64_t seed) {
  if (iterations == 0) throw DataError("Monte Carlo needs at least one iteration");
  Xoshiro256 rng(seed);
  // Welford running mean/variance.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    const double x = sample_trip_cost(dist, rng.uniform());
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  RiskEstimate est;
  est.mean = mean;
  est.iterations = iterations;
  est.seed = seed;
  if (iterations > 1) {
    const double variance = m2 / static_cast<double>(iterations - 1);
    est.std_error = std::sqrt(variance / static_cast<double>(iterations));
  }
  return est;
}

Money expected_risk_cost(const CostDistribution& dist) {
  Money total = 0.0;
  for (const auto& o : dist.outcomes) total += o.mass * o.cost;
  return total;
}

std::uint64_t substream_seed(std::uint64_t global_seed, std::string_view arc_key) {
  std::uint64_t state = global_seed ^ fnv1a64(arc_key);
  return splitmix64(state);
}

void annotate_risk_costs(Network& network, const LossBracketTable& table,
                         const SimulationSettings& settings) {
  table.validate();
  auto& arcs = network.arcs();
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (arcs[i].mirrored) continue;
    if (!arcs[i].accident_probability) {
      throw DataError(fmt::format("arc {}: accident probability not computed", arcs[i].key()));
    }
    work.push_back(i);
  }

  unsigned threads = settings.threads ? settings.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(work.size())));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t k = next++; k < work.size(); k = next++) {
        Arc& arc = arcs[work[k]];
        const auto dist = build_cost_distribution(*arc.accident_probability, table);
        const auto est = estimate_risk_cost(dist, settings.iterations,
                                            substream_seed(settings.seed, arc.key()));
        arc.risk_cost = est.mean;
        arc.risk_std_error = est.std_error;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = work.size();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  network.sync_mirrors();
}

void write_risk_report(std::ostream& out, const Network& network,
                       const SimulationSettings& settings) {
  out << "from,to,paccident,risk_cost_mean,std_error,iterations,seed\n";
  for (const auto& arc : network.arcs()) {
    if (arc.mirrored) continue;
    out << arc.from << ',' << arc.to << ',' << fixed(arc.accident_probability.value_or(0.0), 8)
        << ',' << fixed(arc.risk_cost.value_or(0.0), 4) << ','
        << fixed(arc.risk_std_error.value_or(0.0), 4) << ',' << settings.iterations << ','
        << substream_seed(settings.seed, arc.key()) << '\n';
  }
}

}  // namespace riskroute::mcsim
