#pragma once

// Dense cost matrices shared by the solver engines and the validator.

#include <string>
#include <vector>

#include "riskroute/domain.hpp"
#include "riskroute/solver.hpp"

namespace riskroute::solver::detail {

struct Cost {
  Money logistics = 0.0;
  Money risk = 0.0;

  Cost& operator+=(const Cost& other) {
    logistics += other.logistics;
    risk += other.risk;
    return *this;
  }
  friend Cost operator+(Cost a, const Cost& b) { return a += b; }
};

/// Vertex 0 is the depot; 1..n are the customers in instance order.
class CostModel {
 public:
  CostModel(const Instance& instance, double alpha);

  std::size_t customer_count() const { return ids_.size() - 1; }
  const NodeId& id(std::size_t vertex) const { return ids_[vertex]; }
  double demand(std::size_t vertex) const { return demands_[vertex]; }
  double capacity() const { return capacity_; }
  int vehicle_count() const { return vehicles_; }
  double alpha() const { return alpha_; }

  const Cost& arc(std::size_t from, std::size_t to) const { return matrix_[from * ids_.size() + to]; }
  double weighted(const Cost& cost) const {
    return (1.0 - alpha_) * cost.logistics + alpha_ * cost.risk;
  }
  double weighted(std::size_t from, std::size_t to) const { return weighted(arc(from, to)); }

  /// Depot -> stops -> depot.
  Cost route_cost(const std::vector<std::size_t>& stops) const;
  double route_load(const std::vector<std::size_t>& stops) const;

  /// Three-way comparison on (objective, risk, logistics) with a relative
  /// tolerance of 1e-9 per component.
  int compare(const Cost& a, const Cost& b) const;

  /// Builds a canonical solution: each route in its cheaper direction (ties
  /// broken toward the smaller first stop), routes sorted, vehicles numbered.
  Solution make_solution(std::vector<std::vector<std::size_t>> routes, std::string engine) const;

  /// Checks the instance against the fleet before solving.
  void check_feasible(bool allow_idle_vehicles) const;

 private:
  std::vector<NodeId> ids_;
  std::vector<double> demands_;
  std::vector<Cost> matrix_;
  double capacity_ = 0.0;
  int vehicles_ = 0;
  double alpha_ = 0.0;
};

int compare_with_tolerance(double a, double b);

}  // namespace riskroute::solver::detail
