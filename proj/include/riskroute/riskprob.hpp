#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>

#include "riskroute/domain.hpp"

namespace riskroute::riskprob {

/// Accidents per heavy vehicle on the national network, as a fraction.
///
/// The state heavy-vehicle share HV_sp / V_sp is assumed to hold for the
/// federal daily volume V, so HV = V * HV_sp / V_sp and the result is
/// accident_count / HV.
double general_probability(const TrafficStats& stats);

/// Flow and road-type indexes of one road relative to the problem averages.
struct RoadIndexes {
  std::string road_id;
  double flow_index = 0.0;       // flow / mean_flow
  double type_index = 0.0;       // death_rate / mean_death_rate
  double mean_flow = 0.0;        // over the problem's road set
  double mean_death_rate = 0.0;  // over all road categories in the type table
};

using IndexMap = std::map<std::string, RoadIndexes, std::less<>>;

/// Mean death rate over every category of the table, whether or not the
/// problem uses it.
double mean_death_rate(std::span<const RoadType> types);

IndexMap road_indexes(std::span<const Road> roads,
                      std::span<const RoadType> types = road_type_table());

/// Length-weighted mean of flow_index * type_index along the arc.
double arc_exposure(const Arc& arc, const IndexMap& indexes);

/// p_general * exposure. A product above 1 is reported, never clamped.
double arc_accident_probability(double p_general, double exposure);

/// Fills exposure and accident_probability on every arc of the network.
/// Returns the general probability used.
double annotate_probabilities(Network& network, const TrafficStats& stats);

/// `from,to,exposure,paccident_pct` for every listed (non-mirrored) arc.
void write_probability_report(std::ostream& out, const Network& network);

}  // namespace riskroute::riskprob
