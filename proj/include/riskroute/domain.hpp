#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace riskroute {

/// Currency amount. Arithmetic keeps full double precision; reports render
/// two decimal places.
using Money = double;

/// Stable textual node identifier, e.g. "limeira".
using NodeId = std::string;

// ---------------------------------------------------------------------------
// Road types and per-type death rates.

enum class RoadCategory {
  central_safety_lane,
  central_barrier,
  central_line,
  single_one_way,
  single_two_way,
};

struct RoadType {
  RoadCategory category;
  double death_rate;  // deaths per 100 accidents
};

inline constexpr std::size_t kRoadCategoryCount = 5;

/// Death rates per 100 accidents for the five national road categories.
const std::array<RoadType, kRoadCategoryCount>& road_type_table();

double death_rate(RoadCategory category);
std::string_view to_string(RoadCategory category);
std::optional<RoadCategory> parse_road_category(std::string_view text);

// ---------------------------------------------------------------------------
// Network: roads and the arcs built from them.

struct Road {
  std::string road_id;
  RoadCategory road_type = RoadCategory::central_line;
  double heavy_vehicle_flow = 0.0;  // vehicles/day
};

/// One road traversed by an arc, with the distance driven on it.
struct RoadSegment {
  std::string road_id;
  RoadCategory road_type = RoadCategory::central_line;
  double heavy_vehicle_flow = 0.0;
  double length_km = 0.0;
};

struct Arc {
  NodeId from;
  NodeId to;
  std::vector<RoadSegment> segments;
  double total_length_km = 0.0;
  Money tolls = 0.0;

  // True when this arc was produced by mirroring the opposite direction.
  bool mirrored = false;

  Money logistics_cost = 0.0;
  std::optional<double> exposure;
  std::optional<double> accident_probability;
  std::optional<Money> risk_cost;
  std::optional<Money> risk_std_error;

  /// Checks the segment/length invariants. Throws DataError.
  void validate() const;

  std::string key() const { return from + ">" + to; }
};

class Network {
 public:
  Network() = default;
  Network(std::vector<Road> roads, std::vector<Arc> arcs);

  const std::vector<Road>& roads() const { return roads_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::vector<Arc>& arcs() { return arcs_; }

  const Road* find_road(std::string_view road_id) const;
  /// Directed lookup; a pair listed once in the file is served in both directions.
  const Arc* find_arc(std::string_view from, std::string_view to) const;

  /// Re-copies derived fields from each listed arc onto its mirror.
  void sync_mirrors();

 private:
  void index();

  std::vector<Road> roads_;
  std::vector<Arc> arcs_;
  std::map<std::string, std::size_t, std::less<>> road_index_;
  std::map<std::pair<std::string, std::string>, std::size_t> arc_index_;
};

Network parse_network(std::istream& roads_csv, std::istream& arcs_csv,
                      const std::string& roads_source = "roads.csv",
                      const std::string& arcs_source = "arcs.csv");
Network load_network(const std::filesystem::path& roads_file,
                     const std::filesystem::path& arcs_file);

/// Canonical serializations; mirrored arcs are not written.
void write_roads_csv(std::ostream& out, const Network& network);
void write_arcs_csv(std::ostream& out, const Network& network);

// ---------------------------------------------------------------------------
// Logistics cost.

struct FuelPolicy {
  Money fuel_price = 0.0;       // per liter
  double km_per_liter = 1.0;
};

/// length * fuel_price / km_per_liter + tolls.
Money compute_logistics_cost(double length_km, Money fuel_price,
                             double km_per_liter, Money tolls);
Money compute_logistics_cost(const Arc& arc, const FuelPolicy& fuel);

void apply_logistics_costs(Network& network, const FuelPolicy& fuel);

// ---------------------------------------------------------------------------
// Traffic statistics feeding the general accident probability.

struct TrafficStats {
  double federal_daily_volume = 0.0;
  double sp_heavy_count = 0.0;
  double sp_total_count = 0.0;
  double accident_count = 0.0;

  void validate() const;
};

TrafficStats parse_traffic_stats(std::istream& in, const std::string& source);
TrafficStats load_traffic_stats(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Routing instance.

struct Coordinates {
  double lat = 0.0;
  double lon = 0.0;
};

struct Node {
  NodeId id;
  std::string name;
  std::optional<Coordinates> coordinates;
  double demand = 0.0;
};

class Instance {
 public:
  std::string name;
  std::vector<Node> nodes;  // depot included
  NodeId depot;
  int vehicle_count = 0;
  double capacity = 0.0;
  Network network;

  /// Checks demands, fleet feasibility and arc coverage. Throws DataError.
  void validate() const;

  const Node& depot_node() const;
  /// Customer nodes in file order (depot excluded).
  std::vector<const Node*> customers() const;
  const Node* find_node(std::string_view id) const;
  double total_demand() const;
  const Arc& arc(std::string_view from, std::string_view to) const;
};

Instance parse_instance(std::istream& in, const std::string& source, Network network);
Instance load_instance(const std::filesystem::path& path, Network network);

}  // namespace riskroute
