#include <random>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "riskroute/error.hpp"
#include "riskroute/service.hpp"
#include "riskroute/sweep.hpp"
#include "support.hpp"

using namespace riskroute;
using riskroute::service::Service;

namespace {

struct Fixture {
  testing::RandomCase rc;
  sweep::SweepResult result;
  nlohmann::json plot;

  Fixture() {
    std::mt19937_64 gen(51);
    rc = testing::random_case(gen, 6, 2, true);
    result = sweep::alpha_sweep(rc.instance, sweep::default_alpha_grid(), sweep::Engine::exact);
    plot = nlohmann::json::parse(sweep::plot_data(result, rc.instance, {9, 500, 0.005}).dump());
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "endpoints serve the precomputed sweep") {
  const Service svc(plot);
  CHECK(svc.fingerprint() == result.fingerprint);
  CHECK(svc.grid().size() == 21);

  const auto meta = nlohmann::json::parse(svc.get("/meta").body);
  CHECK(meta.at("fingerprint") == result.fingerprint);
  CHECK(meta.at("seed") == 9);
  CHECK(meta.at("grid").size() == 21);

  const auto inst = nlohmann::json::parse(svc.get("/instance").body);
  CHECK(inst.at("vehicle_count") == 2);
  CHECK(inst.at("capacity") == rc.instance.capacity);
  CHECK(inst.at("nodes").size() == 7);

  const auto arcs = nlohmann::json::parse(svc.get("/arcs").body);
  CHECK(arcs.at("arcs").size() == 42);

  const auto sw = nlohmann::json::parse(svc.get("/sweep").body);
  CHECK(sw.at("points").size() == 21);
  CHECK(sw.at("transitions").size() == sweep::transition_points(result).size());
  CHECK_FALSE(sw.at("points")[0].contains("solution"));
}

TEST_CASE_FIXTURE(Fixture, "solution lookup snaps to the grid") {
  const Service svc(plot);
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& point = result.points[i];
    const auto res = svc.get("/solution", {{"alpha", sweep::format_alpha(point.alpha)}});
    REQUIRE(res.status == 200);
    const auto body = nlohmann::json::parse(res.body);
    CHECK(body.at("objective").get<double>() == doctest::Approx(point.objective).epsilon(1e-12));
    CHECK(body.at("routes").size() == point.solution.routes.size());
    // Repeated requests return identical bodies.
    CHECK(svc.get("/solution", {{"alpha", sweep::format_alpha(point.alpha)}}).body == res.body);
  }
  CHECK(svc.nearest_point(0.12) == 2);
  CHECK(svc.nearest_point(0.125) == 2);  // lower alpha wins a tie
  CHECK(svc.nearest_point(0.13) == 3);

  CHECK(svc.get("/solution").status == 400);
  CHECK(svc.get("/solution", {{"alpha", "abc"}}).status == 400);
  CHECK(svc.get("/solution", {{"alpha", "1.5"}}).status == 400);
  CHECK(svc.get("/nothing").status == 404);
}

TEST_CASE("malformed plot data is rejected") {
  CHECK_THROWS_AS(Service(nlohmann::json::object()), DataError);
}

TEST_CASE_FIXTURE(Fixture, "http server") {
  const Service svc(plot);
  service::HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/solution?alpha=0.35");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == svc.get("/solution", {{"alpha", "0.35"}}).body);
  CHECK(res->get_header_value("Content-Type").find("application/json") != std::string::npos);

  auto sw = client.Get("/sweep");
  REQUIRE(sw);
  CHECK(sw->body == svc.get("/sweep").body);

  auto missing = client.Get("/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  worker.join();
}
