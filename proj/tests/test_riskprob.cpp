#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "riskroute/error.hpp"
#include "riskroute/riskprob.hpp"
#include "support.hpp"

using namespace riskroute;
using namespace riskroute::riskprob;

namespace {

Arc arc_over(std::vector<RoadSegment> segments) {
  Arc arc;
  arc.from = "a";
  arc.to = "b";
  for (const auto& s : segments) arc.total_length_km += s.length_km;
  arc.segments = std::move(segments);
  return arc;
}

}  // namespace

TEST_CASE("general probability") {
  CHECK(general_probability({1'000'000, 200'000, 1'000'000, 0}) == 0.0);
  CHECK(general_probability({1'000'000, 200'000, 1'000'000, 1'000}) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(general_probability({1'000'000, 200'000, 0, 1'000}),
                       doctest::Contains("zero total state volume"), DataError);
}

TEST_CASE("type index over the death-rate table") {
  // Table values in declaration order sum to 73.0.
  const double mean = mean_death_rate(road_type_table());
  CHECK(mean == 14.6);
  CHECK(death_rate(RoadCategory::single_two_way) == 22.3);

  const std::vector<Road> roads{{"X", RoadCategory::single_two_way, 10.0}};
  const auto idx = road_indexes(roads);
  CHECK(std::abs(idx.at("X").type_index - 22.3 / 14.6) < 1e-12);
  CHECK(idx.at("X").type_index == doctest::Approx(1.52740).epsilon(1e-5));
}

TEST_CASE("flow index") {
  const std::vector<Road> roads{{"A", RoadCategory::central_line, 100.0},
                                {"B", RoadCategory::central_line, 200.0},
                                {"C", RoadCategory::central_line, 300.0}};
  const auto idx = road_indexes(roads);
  CHECK(idx.at("B").flow_index == 1.0);
  CHECK(idx.at("A").flow_index == doctest::Approx(0.5));
  CHECK(idx.at("A").mean_flow == 200.0);

  const std::vector<Road> none;
  CHECK_THROWS_AS(road_indexes(none), DataError);
  const std::vector<Road> still{{"A", RoadCategory::central_line, 0.0}};
  CHECK_THROWS_AS(road_indexes(still), DataError);
}

TEST_CASE("indexes average to one on random road sets") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> flow(1.0, 10'000.0);
  std::uniform_int_distribution<int> cat(0, 4);
  std::uniform_int_distribution<int> size(1, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Road> roads;
    const int count = size(gen);
    for (int i = 0; i < count; ++i) {
      roads.push_back({"R" + std::to_string(i), static_cast<RoadCategory>(cat(gen)), flow(gen)});
    }
    const auto idx = road_indexes(roads);
    double sum = 0.0;
    for (const auto& road : roads) {
      const auto& ri = idx.at(road.road_id);
      CHECK(std::abs(ri.flow_index - road.heavy_vehicle_flow / ri.mean_flow) < 1e-12);
      sum += ri.flow_index;
    }
    CHECK(std::abs(sum / count - 1.0) < 1e-12);
  }
  double type_sum = 0.0;
  for (const auto& t : road_type_table()) type_sum += t.death_rate / mean_death_rate(road_type_table());
  CHECK(std::abs(type_sum / 5.0 - 1.0) < 1e-12);
}

TEST_CASE("arc exposure") {
  IndexMap idx;
  idx["P"] = {"P", 1.0, 1.0, 1.0, 14.6};
  idx["Q"] = {"Q", 2.0, 1.0, 1.0, 14.6};
  idx["S"] = {"S", 0.8, 1.5, 1.0, 14.6};

  CHECK(arc_exposure(arc_over({{"S", RoadCategory::central_line, 0, 7.0}}), idx) == doctest::Approx(1.2));
  CHECK(arc_exposure(arc_over({{"P", RoadCategory::central_line, 0, 5.0},
                               {"Q", RoadCategory::central_line, 0, 5.0}}),
                     idx) == doctest::Approx(1.5));
  CHECK(arc_exposure(arc_over({{"P", RoadCategory::central_line, 0, 3.0},
                               {"P", RoadCategory::central_line, 0, 9.0}}),
                     idx) == doctest::Approx(1.0));
  CHECK_THROWS_AS(arc_exposure(arc_over({{"Z", RoadCategory::central_line, 0, 1.0}}), idx), DataError);
}

TEST_CASE("arc accident probability") {
  CHECK(arc_accident_probability(0.005, 0.0) == 0.0);
  CHECK(arc_accident_probability(0.005, 1.2) == doctest::Approx(0.006).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(arc_accident_probability(0.5, 3.0), doctest::Contains("above certainty"), Error);
}

TEST_CASE("probability is monotone in flow and death rate") {
  const std::vector<Road> roads{{"hi", RoadCategory::central_line, 6943.0},
                                {"lo", RoadCategory::central_line, 535.0},
                                {"two_way", RoadCategory::single_two_way, 560.0},
                                {"barrier", RoadCategory::central_barrier, 560.0}};
  const auto idx = road_indexes(roads);
  auto p = [&](const std::string& id) {
    const auto& road = roads[id == "hi" ? 0 : id == "lo" ? 1 : id == "two_way" ? 2 : 3];
    const Arc arc = arc_over({{road.road_id, road.road_type, road.heavy_vehicle_flow, 10.0}});
    return arc_accident_probability(0.005, arc_exposure(arc, idx));
  };
  CHECK(p("hi") > p("lo"));
  CHECK(p("two_way") > p("barrier"));
}

TEST_CASE("annotating the sample network") {
  auto config = testing::sample_config(testing::scratch("riskprob"));
  auto net = load_network(config.roads, config.arcs);
  const double pg = annotate_probabilities(net, load_traffic_stats(config.traffic));
  CHECK(pg == doctest::Approx(0.005).epsilon(1e-12));
  for (const auto& arc : net.arcs()) {
    REQUIRE(arc.exposure);
    REQUIRE(arc.accident_probability);
    CHECK(*arc.accident_probability == doctest::Approx(pg * *arc.exposure).epsilon(1e-12));
  }
  std::ostringstream report;
  write_probability_report(report, net);
  const auto text = report.str();
  CHECK(text.rfind("from,to,exposure,paccident_pct\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 46);
}
