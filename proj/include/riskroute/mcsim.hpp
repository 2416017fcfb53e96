#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "riskroute/domain.hpp"

namespace riskroute::mcsim {

struct LossBracket {
  std::optional<Money> upper_bound;  // nullopt for the open top range
  double occurrence = 0.0;           // fraction of accidents in this range
};

/// Insurance loss ranges and the carrier's share of a loss.
///
/// A bracket's accident cost is deductible_rate times its upper bound. The
/// open top range has no upper bound and is valued at open_bracket_cap.
struct LossBracketTable {
  std::vector<LossBracket> brackets;
  double deductible_rate = 0.01;
  Money open_bracket_cap = 1'000'000.0;

  void validate() const;
  std::vector<Money> bracket_costs() const;
  /// Expected carrier cost given that an accident happened.
  Money conditional_mean() const;
};

/// The five insurer loss ranges (0.01-200k, 200k-300k, 300k-500k,
/// 500k-1M, 1M or more) with the default 1% deductible policy.
LossBracketTable default_loss_brackets();

/// CSV `upper_bound,occurrence`; the word `open` marks the unbounded range.
LossBracketTable parse_loss_brackets(std::istream& in, const std::string& source,
                                     double deductible_rate, Money open_bracket_cap);
LossBracketTable load_loss_brackets(const std::filesystem::path& path, double deductible_rate,
                                    Money open_bracket_cap);

struct Outcome {
  Money cost = 0.0;
  double mass = 0.0;        // probability of this outcome on one trip
  double cumulative = 0.0;  // upper edge of the half-open region [prev, cumulative)
};

/// Trip-cost distribution: no accident with probability 1 - p, otherwise one
/// of the bracket costs. Zero-mass brackets are dropped so cumulatives are
/// strictly increasing; the last cumulative is exactly 1.
struct CostDistribution {
  std::vector<Outcome> outcomes;
  double accident_probability = 0.0;
};

CostDistribution build_cost_distribution(double p_accident, const LossBracketTable& table);

/// Inverse CDF: cost of the first outcome whose cumulative exceeds u.
Money sample_trip_cost(const CostDistribution& dist, double u);

struct RiskEstimate {
  Money mean = 0.0;
  Money std_error = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultIterations = 1'000'000;

RiskEstimate estimate_risk_cost(const CostDistribution& dist, std::uint64_t iterations,
                                std::uint64_t seed);

/// Closed-form expectation of the trip cost.
Money expected_risk_cost(const CostDistribution& dist);

/// Per-arc stream seed derived from the global seed and the arc key, so the
/// estimate does not depend on evaluation order or thread count.
std::uint64_t substream_seed(std::uint64_t global_seed, std::string_view arc_key);

struct SimulationSettings {
  std::uint64_t iterations = kDefaultIterations;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Estimates risk_cost for every listed arc (mirrors share their source's
/// estimate). Arcs need accident_probability set.
void annotate_risk_costs(Network& network, const LossBracketTable& table,
                         const SimulationSettings& settings);

/// `from,to,paccident,risk_cost_mean,std_error,iterations,seed`.
void write_risk_report(std::ostream& out, const Network& network,
                       const SimulationSettings& settings);

}  // namespace riskroute::mcsim
