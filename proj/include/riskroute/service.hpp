#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace riskroute::service {

struct Response {
  int status = 200;
  std::string body;
};

/// Read-only view over one plot-data snapshot. Every body is rendered once
/// at construction, so repeated requests return identical bytes.
class Service {
 public:
  explicit Service(const nlohmann::json& plot_data);

  Response get(std::string_view path, const std::map<std::string, std::string>& query = {}) const;

  const std::string& fingerprint() const { return fingerprint_; }
  const std::vector<double>& grid() const { return alphas_; }

  /// Index of the grid point closest to alpha (lower alpha wins ties).
  std::size_t nearest_point(double alpha) const;

 private:
  std::string fingerprint_;
  std::string meta_;
  std::string instance_;
  std::string arcs_;
  std::string sweep_;
  std::vector<double> alphas_;
  std::vector<std::string> solutions_;
};

/// Blocking HTTP front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one). Throws on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace riskroute::service
