#include "riskroute/service.hpp"

#include <cmath>

#include <fmt/format.h>

#include "httplib.h"
#include "riskroute/error.hpp"
#include "riskroute/util.hpp"

namespace riskroute::service {

using nlohmann::ordered_json;

namespace {

std::string error_body(const std::string& message) {
  return ordered_json{{"error", message}}.dump();
}

}  // namespace

Service::Service(const nlohmann::json& plot_data) {
  try {
    const auto& meta = plot_data.at("meta");
    fingerprint_ = meta.at("fingerprint").get<std::string>();
    meta_ = ordered_json(meta).dump();

    ordered_json instance{{"fingerprint", fingerprint_}};
    for (const auto& [key, value] : plot_data.at("instance").items()) instance[key] = value;
    instance_ = instance.dump();

    arcs_ = ordered_json{{"fingerprint", fingerprint_}, {"arcs", plot_data.at("arcs")}}.dump();

    ordered_json points = ordered_json::array();
    for (const auto& item : plot_data.at("sweep")) {
      ordered_json p;
      for (const auto& [key, value] : item.items()) {
        if (key != "solution") p[key] = value;
      }
      points.push_back(std::move(p));
      alphas_.push_back(item.at("alpha").get<double>());

      ordered_json solution{{"fingerprint", fingerprint_}};
      for (const auto& [key, value] : item.at("solution").items()) solution[key] = value;
      solutions_.push_back(solution.dump());
    }
    sweep_ = ordered_json{{"fingerprint", fingerprint_},
                          {"grid", meta.at("grid")},
                          {"points", std::move(points)},
                          {"transitions", plot_data.at("transitions")}}
                 .dump();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed plot data: {}", e.what()));
  }
}

std::size_t Service::nearest_point(double alpha) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < alphas_.size(); ++i) {
    if (std::abs(alphas_[i] - alpha) < std::abs(alphas_[best] - alpha)) best = i;
  }
  return best;
}

Response Service::get(std::string_view path,
                      const std::map<std::string, std::string>& query) const {
  if (path == "/meta") return {200, meta_};
  if (path == "/instance") return {200, instance_};
  if (path == "/arcs") return {200, arcs_};
  if (path == "/sweep") return {200, sweep_};
  if (path == "/solution") {
    const auto it = query.find("alpha");
    if (it == query.end()) return {400, error_body("missing query parameter 'alpha'")};
    double alpha = 0.0;
    try {
      alpha = parse_number(it->second, "alpha");
    } catch (const DataError& e) {
      return {400, error_body(e.what())};
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) return {400, error_body("alpha must lie in [0,1]")};
    if (solutions_.empty()) return {404, error_body("sweep has no points")};
    return {200, solutions_[nearest_point(alpha)]};
  }
  return {404, error_body(fmt::format("no endpoint '{}'", path))};
}

struct HttpServer::Impl {
  explicit Impl(const Service& s) : service(s) {}
  const Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->server.Get(R"(/.*)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                      std::map<std::string, std::string> query;
                      for (const auto& [key, value] : req.params) query.emplace(key, value);
                      const Response out = impl_->service.get(req.path, query);
                      res.status = out.status;
                      res.set_content(out.body, "application/json; charset=utf-8");
                    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host.c_str())
                              : (impl_->server.bind_to_port(host.c_str(), port) ? port : -1);
  if (bound < 0) throw Error(fmt::format("cannot bind {}:{}", host, port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace riskroute::service
