#include "riskroute/riskprob.hpp"

#include <fmt/format.h>

#include "riskroute/error.hpp"
#include "riskroute/util.hpp"

namespace riskroute::riskprob {

double general_probability(const TrafficStats& stats) {
  if (stats.sp_total_count == 0.0) throw DataError("zero total state volume");
  stats.validate();
  if (stats.accident_count == 0.0) return 0.0;
  const double heavy_share = stats.sp_heavy_count / stats.sp_total_count;
  const double heavy_vehicles = heavy_share * stats.federal_daily_volume;
  if (!(heavy_vehicles > 0.0)) {
    throw DataError("accidents reported but the estimated heavy-vehicle volume is zero");
  }
  if (stats.accident_count > heavy_vehicles) {
    throw DataError(fmt::format("accident count {} exceeds estimated heavy vehicles {}",
                                exact(stats.accident_count), exact(heavy_vehicles)));
  }
  return stats.accident_count / heavy_vehicles;
}

double mean_death_rate(std::span<const RoadType> types) {
  if (types.empty()) throw DataError("empty road type table");
  double sum = 0.0;
  for (const auto& t : types) {
    if (!(t.death_rate > 0.0)) throw DataError("death rates must be positive");
    sum += t.death_rate;
  }
  return sum / static_cast<double>(types.size());
}

IndexMap road_indexes(std::span<const Road> roads, std::span<const RoadType> types) {
  if (roads.empty()) throw DataError("empty road set");
  if (types.size() != kRoadCategoryCount) {
    throw DataError(fmt::format("road type table must list {} categories, got {}",
                                kRoadCategoryCount, types.size()));
  }
  double flow_sum = 0.0;
  for (const auto& r : roads) flow_sum += r.heavy_vehicle_flow;
  const double mean_flow = flow_sum / static_cast<double>(roads.size());
  if (!(mean_flow > 0.0)) throw DataError("mean heavy-vehicle flow is zero");
  const double mean_rate = mean_death_rate(types);

  IndexMap out;
  for (const auto& r : roads) {
    double rate = 0.0;
    for (const auto& t : types) {
      if (t.category == r.road_type) rate = t.death_rate;
    }
    out[r.road_id] = RoadIndexes{r.road_id, r.heavy_vehicle_flow / mean_flow, rate / mean_rate,
                                 mean_flow, mean_rate};
  }
  return out;
}

double arc_exposure(const Arc& arc, const IndexMap& indexes) {
  if (!(arc.total_length_km > 0.0)) {
    throw DataError(fmt::format("arc {}: non-positive length", arc.key()));
  }
  double weighted = 0.0;
  for (const auto& s : arc.segments) {
    const auto it = indexes.find(s.road_id);
    if (it == indexes.end()) {
      throw DataError(fmt::format("arc {}: no indexes for road '{}'", arc.key(), s.road_id));
    }
    weighted += it->second.flow_index * it->second.type_index * s.length_km;
  }
  return weighted / arc.total_length_km;
}

double arc_accident_probability(double p_general, double exposure) {
  if (p_general < 0.0 || p_general > 1.0) throw DataError("general probability outside [0,1]");
  if (exposure < 0.0) throw DataError("negative exposure");
  const double p = p_general * exposure;
  if (p > 1.0) throw DataError("exposure drives probability above certainty");
  return p;
}

double annotate_probabilities(Network& network, const TrafficStats& stats) {
  const double p_general = general_probability(stats);
  const auto indexes = road_indexes(network.roads());
  for (auto& arc : network.arcs()) {
    const double e = arc_exposure(arc, indexes);
    double p = 0.0;
    try {
      p = arc_accident_probability(p_general, e);
    } catch (const DataError& err) {
      throw DataError(fmt::format("arc {}: {}", arc.key(), err.what()));
    }
    arc.exposure = e;
    arc.accident_probability = p;
  }
  return p_general;
}

void write_probability_report(std::ostream& out, const Network& network) {
  out << "from,to,exposure,paccident_pct\n";
  for (const auto& arc : network.arcs()) {
    if (arc.mirrored) continue;
    out << arc.from << ',' << arc.to << ',' << fixed(arc.exposure.value_or(0.0), 6) << ','
        << fixed(100.0 * arc.accident_probability.value_or(0.0), 6) << '\n';
  }
}

}  // namespace riskroute::riskprob
