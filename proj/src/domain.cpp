#include "riskroute/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include "json.hpp"

#include "riskroute/error.hpp"
#include "riskroute/kvfile.hpp"
#include "riskroute/util.hpp"

namespace riskroute {

namespace {

constexpr std::array<std::string_view, kRoadCategoryCount> kCategoryNames = {
    "central_safety_lane", "central_barrier", "central_line", "single_one_way",
    "single_two_way"};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

// Reads the header line and checks it against the expected schema.
void expect_header(std::istream& in, const std::string& source, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(fmt::format("{}: empty file", source));
  // Tolerate a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (trim(line) != header) {
    throw DataError(fmt::format("{}:1: expected header '{}', got '{}'", source, header,
                                trim(line)));
  }
}

std::vector<std::string> fields_of(const std::string& line, std::size_t expected,
                                   const std::string& source, int row) {
  auto fields = split(line, ',');
  if (fields.size() != expected) {
    throw DataError(fmt::format("{}:{}: expected {} fields, got {}", source, row, expected,
                                fields.size()));
  }
  for (auto& f : fields) f = trim(f);
  return fields;
}

}  // namespace

const std::array<RoadType, kRoadCategoryCount>& road_type_table() {
  static const std::array<RoadType, kRoadCategoryCount> table = {{
      {RoadCategory::central_safety_lane, 12.3},
      {RoadCategory::central_barrier, 8.5},
      {RoadCategory::central_line, 18.0},
      {RoadCategory::single_one_way, 11.9},
      {RoadCategory::single_two_way, 22.3},
  }};
  return table;
}

double death_rate(RoadCategory category) {
  return road_type_table()[static_cast<std::size_t>(category)].death_rate;
}

std::string_view to_string(RoadCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<RoadCategory> parse_road_category(std::string_view text) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == text) return static_cast<RoadCategory>(i);
  }
  return std::nullopt;
}

void Arc::validate() const {
  if (from == to) throw DataError(fmt::format("arc {}: origin equals destination", key()));
  if (segments.empty()) throw DataError(fmt::format("arc {}: no segments", key()));
  double sum = 0.0;
  for (const auto& s : segments) {
    if (!(s.length_km > 0.0)) {
      throw DataError(fmt::format("arc {}: non-positive length on road '{}'", key(), s.road_id));
    }
    if (s.heavy_vehicle_flow < 0.0) {
      throw DataError(fmt::format("arc {}: negative flow on road '{}'", key(), s.road_id));
    }
    sum += s.length_km;
  }
  if (std::abs(sum - total_length_km) > 1e-6 * std::max(total_length_km, 1e-12)) {
    throw DataError(fmt::format("arc {}: segment lengths sum to {} but total length is {}",
                                key(), exact(sum), exact(total_length_km)));
  }
  if (tolls < 0.0) throw DataError(fmt::format("arc {}: negative tolls", key()));
  if (logistics_cost < 0.0) throw DataError(fmt::format("arc {}: negative logistics cost", key()));
  if (accident_probability && (*accident_probability < 0.0 || *accident_probability > 1.0)) {
    throw DataError(fmt::format("arc {}: accident probability outside [0,1]", key()));
  }
  if (risk_cost && *risk_cost < 0.0) throw DataError(fmt::format("arc {}: negative risk cost", key()));
}

Network::Network(std::vector<Road> roads, std::vector<Arc> arcs)
    : roads_(std::move(roads)), arcs_(std::move(arcs)) {
  index();
}

void Network::index() {
  road_index_.clear();
  arc_index_.clear();
  for (std::size_t i = 0; i < roads_.size(); ++i) road_index_.emplace(roads_[i].road_id, i);
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    arc_index_.emplace(std::make_pair(arcs_[i].from, arcs_[i].to), i);
  }
  // Materialize the reverse direction of every pair listed only once.
  const std::size_t listed = arcs_.size();
  for (std::size_t i = 0; i < listed; ++i) {
    if (arcs_[i].mirrored) continue;
    auto reverse_key = std::make_pair(arcs_[i].to, arcs_[i].from);
    if (arc_index_.count(reverse_key)) continue;
    Arc mirror = arcs_[i];
    std::swap(mirror.from, mirror.to);
    std::reverse(mirror.segments.begin(), mirror.segments.end());
    mirror.mirrored = true;
    arc_index_.emplace(std::move(reverse_key), arcs_.size());
    arcs_.push_back(std::move(mirror));
  }
}

const Road* Network::find_road(std::string_view road_id) const {
  const auto it = road_index_.find(road_id);
  return it == road_index_.end() ? nullptr : &roads_[it->second];
}

const Arc* Network::find_arc(std::string_view from, std::string_view to) const {
  const auto it = arc_index_.find(std::make_pair(std::string(from), std::string(to)));
  return it == arc_index_.end() ? nullptr : &arcs_[it->second];
}

void Network::sync_mirrors() {
  for (auto& arc : arcs_) {
    if (!arc.mirrored) continue;
    const auto it = arc_index_.find(std::make_pair(arc.to, arc.from));
    const Arc& source = arcs_[it->second];
    arc.logistics_cost = source.logistics_cost;
    arc.exposure = source.exposure;
    arc.accident_probability = source.accident_probability;
    arc.risk_cost = source.risk_cost;
    arc.risk_std_error = source.risk_std_error;
  }
}

Network parse_network(std::istream& roads_csv, std::istream& arcs_csv,
                      const std::string& roads_source, const std::string& arcs_source) {
  std::vector<Road> roads;
  std::set<std::string, std::less<>> road_ids;
  expect_header(roads_csv, roads_source, "road_id,road_type,heavy_vehicle_flow");
  std::string line;
  int row = 1;
  while (std::getline(roads_csv, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = fields_of(line, 3, roads_source, row);
    const std::string where = fmt::format("{}:{}", roads_source, row);
    if (f[0].empty()) throw DataError(fmt::format("{}: empty road id", where));
    auto category = parse_road_category(f[1]);
    if (!category) throw DataError(fmt::format("{}: unknown road type '{}'", where, f[1]));
    const double flow = parse_number(f[2], where + ": heavy_vehicle_flow");
    if (flow < 0.0) throw DataError(fmt::format("{}: negative heavy_vehicle_flow", where));
    if (!road_ids.insert(f[0]).second) {
      throw DataError(fmt::format("{}: duplicate road id '{}'", where, f[0]));
    }
    roads.push_back({f[0], *category, flow});
  }

  std::map<std::string, const Road*, std::less<>> by_id;
  for (const auto& r : roads) by_id.emplace(r.road_id, &r);

  std::vector<Arc> arcs;
  std::set<std::pair<std::string, std::string>> closed;
  expect_header(arcs_csv, arcs_source, "from,to,segment_road_id,segment_length_km,tolls_money");
  row = 1;
  while (std::getline(arcs_csv, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = fields_of(line, 5, arcs_source, row);
    const std::string where = fmt::format("{}:{}", arcs_source, row);
    if (f[0].empty() || f[1].empty()) throw DataError(fmt::format("{}: empty node id", where));
    if (f[0] == f[1]) throw DataError(fmt::format("{}: arc from '{}' to itself", where, f[0]));
    const auto road = by_id.find(f[2]);
    if (road == by_id.end()) {
      throw DataError(fmt::format("{}: unknown road id '{}'", where, f[2]));
    }
    const double length = parse_number(f[3], where + ": segment_length_km");
    if (!(length > 0.0)) {
      throw DataError(fmt::format("{}: non-positive segment length {}", where, f[3]));
    }

    const bool continues = !arcs.empty() && arcs.back().from == f[0] && arcs.back().to == f[1];
    if (continues) {
      if (!f[4].empty()) {
        throw DataError(fmt::format("{}: tolls belong on the first segment row of an arc", where));
      }
    } else {
      if (!arcs.empty()) closed.emplace(arcs.back().from, arcs.back().to);
      if (closed.count({f[0], f[1]})) {
        throw DataError(fmt::format("{}: arc {}>{} listed twice", where, f[0], f[1]));
      }
      Arc arc;
      arc.from = f[0];
      arc.to = f[1];
      arc.tolls = f[4].empty() ? 0.0 : parse_number(f[4], where + ": tolls_money");
      if (arc.tolls < 0.0) throw DataError(fmt::format("{}: negative tolls", where));
      arcs.push_back(std::move(arc));
    }
    Arc& arc = arcs.back();
    arc.segments.push_back({road->second->road_id, road->second->road_type,
                            road->second->heavy_vehicle_flow, length});
    arc.total_length_km += length;
  }
  for (const auto& arc : arcs) arc.validate();
  return Network(std::move(roads), std::move(arcs));
}

Network load_network(const std::filesystem::path& roads_file,
                     const std::filesystem::path& arcs_file) {
  auto roads = open_input(roads_file);
  auto arcs = open_input(arcs_file);
  return parse_network(roads, arcs, roads_file.string(), arcs_file.string());
}

void write_roads_csv(std::ostream& out, const Network& network) {
  out << "road_id,road_type,heavy_vehicle_flow\n";
  for (const auto& r : network.roads()) {
    out << r.road_id << ',' << to_string(r.road_type) << ',' << exact(r.heavy_vehicle_flow)
        << '\n';
  }
}

void write_arcs_csv(std::ostream& out, const Network& network) {
  out << "from,to,segment_road_id,segment_length_km,tolls_money\n";
  for (const auto& arc : network.arcs()) {
    if (arc.mirrored) continue;
    for (std::size_t i = 0; i < arc.segments.size(); ++i) {
      out << arc.from << ',' << arc.to << ',' << arc.segments[i].road_id << ','
          << exact(arc.segments[i].length_km) << ',';
      if (i == 0) out << exact(arc.tolls);
      out << '\n';
    }
  }
}

Money compute_logistics_cost(double length_km, Money fuel_price, double km_per_liter,
                             Money tolls) {
  if (!(km_per_liter > 0.0)) {
    throw DataError(fmt::format("fuel consumption must be positive, got {}", exact(km_per_liter)));
  }
  if (fuel_price < 0.0) throw DataError("fuel price must be non-negative");
  if (tolls < 0.0) throw DataError("tolls must be non-negative");
  return length_km * fuel_price / km_per_liter + tolls;
}

Money compute_logistics_cost(const Arc& arc, const FuelPolicy& fuel) {
  return compute_logistics_cost(arc.total_length_km, fuel.fuel_price, fuel.km_per_liter,
                                arc.tolls);
}

void apply_logistics_costs(Network& network, const FuelPolicy& fuel) {
  for (auto& arc : network.arcs()) arc.logistics_cost = compute_logistics_cost(arc, fuel);
}

void TrafficStats::validate() const {
  if (federal_daily_volume < 0.0 || sp_heavy_count < 0.0 || sp_total_count < 0.0 ||
      accident_count < 0.0) {
    throw DataError("traffic statistics must be non-negative");
  }
  if (sp_total_count == 0.0) throw DataError("zero total state volume");
  if (sp_heavy_count > sp_total_count) {
    throw DataError("heavy-vehicle count exceeds total state volume");
  }
}

TrafficStats parse_traffic_stats(std::istream& in, const std::string& source) {
  const auto kv = KeyValueFile::parse(in, source);
  TrafficStats stats;
  stats.federal_daily_volume = kv.number("federal_daily_volume");
  stats.sp_heavy_count = kv.number("sp_heavy_count");
  stats.sp_total_count = kv.number("sp_total_count");
  stats.accident_count = kv.number("accident_count");
  stats.validate();
  return stats;
}

TrafficStats load_traffic_stats(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_traffic_stats(in, path.string());
}

void Instance::validate() const {
  if (vehicle_count < 1) throw DataError(fmt::format("{}: vehicle_count must be >= 1", name));
  if (!(capacity > 0.0)) throw DataError(fmt::format("{}: capacity must be positive", name));
  std::set<std::string, std::less<>> seen;
  bool has_depot = false;
  for (const auto& node : nodes) {
    if (!seen.insert(node.id).second) {
      throw DataError(fmt::format("{}: duplicate node id '{}'", name, node.id));
    }
    if (node.id == depot) {
      has_depot = true;
      if (node.demand != 0.0) throw DataError(fmt::format("{}: depot demand must be 0", name));
    } else if (!(node.demand > 0.0)) {
      throw DataError(fmt::format("{}: customer '{}' must have positive demand", name, node.id));
    }
  }
  if (!has_depot) throw DataError(fmt::format("{}: depot '{}' is not a node", name, depot));
  if (nodes.size() < 2) throw DataError(fmt::format("{}: no customers", name));
  const double fleet = vehicle_count * capacity;
  if (total_demand() > fleet) {
    throw DataError(fmt::format("{}: total demand {} exceeds fleet capacity {}", name,
                                exact(total_demand()), exact(fleet)));
  }
  for (const auto& a : nodes) {
    for (const auto& b : nodes) {
      if (a.id == b.id) continue;
      if (!network.find_arc(a.id, b.id)) {
        throw DataError(fmt::format("{}: no arc from '{}' to '{}'", name, a.id, b.id));
      }
    }
  }
}

const Node& Instance::depot_node() const {
  const Node* node = find_node(depot);
  if (!node) throw DataError(fmt::format("{}: depot '{}' is not a node", name, depot));
  return *node;
}

std::vector<const Node*> Instance::customers() const {
  std::vector<const Node*> out;
  for (const auto& n : nodes) {
    if (n.id != depot) out.push_back(&n);
  }
  return out;
}

const Node* Instance::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

double Instance::total_demand() const {
  double total = 0.0;
  for (const auto& n : nodes) total += n.demand;
  return total;
}

const Arc& Instance::arc(std::string_view from, std::string_view to) const {
  const Arc* a = network.find_arc(from, to);
  if (!a) throw DataError(fmt::format("{}: no arc from '{}' to '{}'", name, from, to));
  return *a;
}

Instance parse_instance(std::istream& in, const std::string& source, Network network) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  }
  Instance instance;
  try {
    instance.name = doc.value("name", std::filesystem::path(source).stem().string());
    instance.depot = doc.at("depot").get<std::string>();
    instance.vehicle_count = doc.at("vehicle_count").get<int>();
    instance.capacity = doc.at("capacity").get<double>();
    for (const auto& item : doc.at("nodes")) {
      Node node;
      node.id = item.at("id").get<std::string>();
      node.name = item.value("name", node.id);
      node.demand = item.value("demand", 0.0);
      if (item.contains("lat") && item.contains("lon")) {
        node.coordinates = Coordinates{item.at("lat").get<double>(), item.at("lon").get<double>()};
      }
      instance.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  }
  instance.network = std::move(network);
  instance.validate();
  return instance;
}

Instance load_instance(const std::filesystem::path& path, Network network) {
  auto in = open_input(path);
  return parse_instance(in, path.string(), std::move(network));
}

}  // namespace riskroute
