#include <set>
#include <sstream>

#include "doctest.h"
#include "riskroute/domain.hpp"
#include "riskroute/error.hpp"
#include "riskroute/kvfile.hpp"
#include "riskroute/util.hpp"
#include "support.hpp"

using namespace riskroute;

namespace {

const char* kFiveRoads =
    "road_id,road_type,heavy_vehicle_flow\n"
    "A,central_line,100\n"
    "B,single_two_way,200\n"
    "C,central_barrier,300\n"
    "D,single_one_way,400\n"
    "E,central_safety_lane,500\n";

Network parse(const std::string& roads, const std::string& arcs) {
  std::istringstream r(roads);
  std::istringstream a(arcs);
  return parse_network(r, a);
}

}  // namespace

TEST_CASE("one arc with two segments round-trips") {
  const auto net = parse(kFiveRoads,
                         "from,to,segment_road_id,segment_length_km,tolls_money\n"
                         "x,y,A,10,4.5\n"
                         "x,y,B,5.5,\n");
  CHECK(net.roads().size() == 5);
  const Arc* arc = net.find_arc("x", "y");
  REQUIRE(arc);
  CHECK(arc->segments.size() == 2);
  CHECK(arc->total_length_km == doctest::Approx(15.5));
  CHECK(arc->tolls == 4.5);
  CHECK(arc->segments[1].road_type == RoadCategory::single_two_way);
  CHECK(arc->segments[1].heavy_vehicle_flow == 200.0);

  // The reverse direction is mirrored with segments reversed.
  const Arc* back = net.find_arc("y", "x");
  REQUIRE(back);
  CHECK(back->mirrored);
  CHECK(back->segments.front().road_id == "B");

  std::ostringstream roads_out;
  std::ostringstream arcs_out;
  write_roads_csv(roads_out, net);
  write_arcs_csv(arcs_out, net);
  const auto again = parse(roads_out.str(), arcs_out.str());
  std::ostringstream arcs_again;
  write_arcs_csv(arcs_again, again);
  CHECK(arcs_again.str() == arcs_out.str());
}

TEST_CASE("unknown road id is reported with its row") {
  try {
    parse(kFiveRoads,
          "from,to,segment_road_id,segment_length_km,tolls_money\n"
          "x,y,A,10,0\n"
          "x,z,SP999,3,0\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("SP999") != std::string::npos);
    CHECK(what.find("arcs.csv:3") != std::string::npos);
  }
}

TEST_CASE("malformed network input is rejected") {
  const std::string header = "from,to,segment_road_id,segment_length_km,tolls_money\n";
  CHECK_THROWS_AS(parse(kFiveRoads, header + "x,y,A,0,0\n"), DataError);
  CHECK_THROWS_AS(parse(kFiveRoads, header + "x,y,A,-2,0\n"), DataError);
  CHECK_THROWS_AS(parse(kFiveRoads, header + "x,x,A,2,0\n"), DataError);
  CHECK_THROWS_AS(parse(kFiveRoads, header + "x,y,A,2,0\nx,z,A,1,0\nx,y,B,1,0\n"), DataError);
  CHECK_THROWS_AS(parse(kFiveRoads, header + "x,y,A,2,1\nx,y,B,1,3\n"), DataError);
  CHECK_THROWS_AS(parse(kFiveRoads, "from,to,road\nx,y,A\n"), DataError);
  CHECK_THROWS_AS(parse("road_id,road_type,heavy_vehicle_flow\nA,dirt_track,5\n", header), DataError);
  CHECK_THROWS_AS(parse("road_id,road_type,heavy_vehicle_flow\nA,central_line,5\nA,central_line,6\n",
                        header),
                  DataError);
}

TEST_CASE("bundled sample has twelve distinct roads") {
  const auto net = load_network(testing::sample_dir() / "roads.csv", testing::sample_dir() / "arcs.csv");
  std::set<std::string> ids;
  for (const auto& road : net.roads()) ids.insert(road.road_id);
  CHECK(ids.size() == 12);
  CHECK(net.roads().size() == 12);
  for (const auto& arc : net.arcs()) CHECK_NOTHROW(arc.validate());
}

TEST_CASE("logistics cost") {
  CHECK(compute_logistics_cost(0.0, 6.0, 2.5, 0.0) == 0.0);
  CHECK(compute_logistics_cost(100.0, 6.0, 2.5, 30.0) == doctest::Approx(270.0).epsilon(1e-12));
  CHECK(compute_logistics_cost(0.0, 6.0, 2.5, 12.5) == 12.5);
  CHECK_THROWS_AS(compute_logistics_cost(10.0, 6.0, 0.0, 0.0), DataError);

  SUBCASE("linear in length and additive in tolls") {
    for (double length : {1.0, 17.3, 250.0}) {
      const double base = compute_logistics_cost(length, 4.1, 3.2, 0.0);
      CHECK(compute_logistics_cost(2.0 * length, 4.1, 3.2, 0.0) == doctest::Approx(2.0 * base));
      CHECK(compute_logistics_cost(length, 4.1, 3.2, 7.25) == doctest::Approx(base + 7.25));
    }
  }
}

TEST_CASE("traffic statistics") {
  std::istringstream ok("federal_daily_volume = 1000000\nsp_heavy_count = 200000\n"
                        "sp_total_count = 1000000\naccident_count = 1000\n");
  const auto stats = parse_traffic_stats(ok, "t");
  CHECK(stats.accident_count == 1000.0);

  std::istringstream zero("federal_daily_volume = 1\nsp_heavy_count = 1\n"
                          "sp_total_count = 0\naccident_count = 1\n");
  CHECK_THROWS_WITH_AS(parse_traffic_stats(zero, "t"), doctest::Contains("zero total state volume"),
                       DataError);
  CHECK_THROWS_AS(load_traffic_stats("/nonexistent/traffic.txt"), DataError);
}

TEST_CASE("sample instance") {
  auto net = load_network(testing::sample_dir() / "roads.csv", testing::sample_dir() / "arcs.csv");
  const auto inst = load_instance(testing::sample_dir() / "instance.json", std::move(net));
  CHECK(inst.customers().size() == 9);
  CHECK(inst.vehicle_count == 3);
  CHECK(inst.total_demand() == 33.0);
  CHECK(inst.depot_node().demand == 0.0);
  CHECK(inst.arc("piracicaba", "limeira").from == "piracicaba");
  CHECK_THROWS_AS(inst.arc("limeira", "nowhere"), DataError);
}

TEST_CASE("instance validation") {
  std::mt19937_64 gen(3);
  auto rc = testing::random_case(gen, 4, 2, true);
  CHECK_NOTHROW(rc.instance.validate());

  auto over = rc.instance;
  over.capacity = 1.0;
  CHECK_THROWS_AS(over.validate(), DataError);

  auto depot_demand = rc.instance;
  depot_demand.nodes[0].demand = 1.0;
  CHECK_THROWS_AS(depot_demand.validate(), DataError);
}

TEST_CASE("key-value files") {
  std::istringstream text("# c\na = 1\nb = \"x y\"  \n");
  const auto kv = KeyValueFile::parse(text, "kv");
  CHECK(kv.number("a") == 1.0);
  CHECK(kv.require("b") == "x y");
  CHECK(kv.number_or("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(kv.require("missing"), DataError);
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(KeyValueFile::parse(dup, "kv"), DataError);
}

TEST_CASE("number formatting") {
  CHECK(fixed(-0.0001, 2) == "0.00");
  CHECK(fixed(788.7, 2) == "788.70");
  CHECK(exact(0.1) == "0.1");
  CHECK(parse_number(" 2.5 ", "x") == 2.5);
  CHECK_THROWS_AS(parse_number("2.5km", "x"), DataError);
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}
