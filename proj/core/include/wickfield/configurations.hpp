#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/geometry.hpp"

namespace wickfield {

/// Finite point measure sum_j s_j delta_{x_j}. Charges are optional; an
/// uncharged configuration has unit mass at every point.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<Point> points);
  Configuration(std::vector<Point> points, std::vector<double> charges);

  static Configuration single(const Point& x) { return Configuration({x}); }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool has_charges() const { return !charges_.empty(); }
  std::span<const Point> points() const { return points_; }
  std::span<const double> charges() const { return charges_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  double charge(std::size_t i) const { return charges_.empty() ? 1.0 : charges_[i]; }
  double total_charge() const;

  void add(const Point& x, double charge = 1.0);
  /// Removes point i by swapping with the last one.
  void remove(std::size_t i);
  void reserve(std::size_t n) { points_.reserve(n); }

  /// Superposition of point measures.
  Configuration operator+(const Configuration& other) const;

  bool operator==(const Configuration&) const = default;

 private:
  std::vector<Point> points_;
  std::vector<double> charges_;
};

/// Non-negative continuous test function with compact support.
class TestFunction {
 public:
  using Rule = std::function<double(const Point&)>;

  /// h == 0.
  static TestFunction zero(int ambient_dim);
  /// amplitude * prod_k (1 - u_k^2)^2 with u_k = (x_k - c_k) / w_k, |u_k| < 1.
  static TestFunction bump(const Point& center, const Point& half_widths, double amplitude);
  /// Arbitrary rule; values outside `support` are forced to zero.
  static TestFunction custom(Rule rule, std::vector<Interval> support);

  double operator()(const Point& x) const;
  std::span<const Interval> support() const { return support_; }
  /// Returns a copy scaled by t >= 0.
  TestFunction scaled(double t) const;
  /// Support breakpoints per axis, for quadrature rules that must respect kinks.
  std::vector<double> breakpoints(int axis) const;

 private:
  enum class Kind { Zero, Bump, Custom };
  Kind kind_ = Kind::Zero;
  Point center_;
  Point half_widths_;
  double amplitude_ = 0.0;
  Rule rule_;
  std::vector<Interval> support_;
};

/// sum_j s_j h(x_j)
double pair(const Configuration& eta, const TestFunction& h);

/// eta <= gamma as measures: at every location eta's mass is at most gamma's.
/// Locations are compared with exact floating point equality.
bool leq(const Configuration& eta, const Configuration& gamma);

/// Poisson process with intensity * Lebesgue (or surface) measure on the window.
Configuration sample_poisson(const Window& window, double intensity, std::mt19937_64& rng);

/// Number of points (with multiplicity) inside a box region.
std::size_t count_in(const Configuration& eta, const Window& region);

/// Canonical (lexicographically sorted) copy, used for equality up to ordering.
Configuration canonical(const Configuration& eta);

nlohmann::json to_json(const Configuration& eta);
Configuration configuration_from_json(const nlohmann::json& j);

}  // namespace wickfield
