#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/configurations.hpp"
#include "wickfield/kernels.hpp"

namespace wickfield {

/// phi^c(z) = sum_j s_j G^c(z, x_j)
Complex field_complex(const Configuration& eta, const Kernel& k, const ComplexPoint& z);
/// phi(x) = sum_j s_j G(x, x_j) at a real point.
double field(const Configuration& eta, const Kernel& k, const Point& x);

/// prod_j [conj?] phi^c(z_j)
struct MomentQuery {
  std::vector<ComplexPoint> points;
  std::vector<bool> conj;

  void validate(const Kernel& k) const;
  nlohmann::json to_json() const;
};

/// Value of one query on one configuration. Factors are multiplied in the
/// canonical order of (point, conj) pairs, so permuting the query is exact.
Complex moment_sample(const Configuration& eta, const Kernel& k, const MomentQuery& q);

struct CorrelationEstimate {
  Complex value;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::size_t n_samples = 0;
  int batches = 0;
  nlohmann::json metadata;

  double stderr_abs() const { return std::hypot(stderr_re, stderr_im); }
  nlohmann::json to_json() const;
};

/// Batch-means estimate from per-sample values.
CorrelationEstimate estimate_from_values(std::span<const Complex> values, int batches = 32);
CorrelationEstimate estimate_from_values(std::span<const double> values, int batches = 32);

CorrelationEstimate estimate_moment(std::span<const Configuration> samples, const Kernel& k, const MomentQuery& q,
                                    int batches = 32);
/// All queries over the same sample stream.
std::vector<CorrelationEstimate> estimate_moments(std::span<const Configuration> samples, const Kernel& k,
                                                  std::span<const MomentQuery> qs, int batches = 32);
/// Paired estimate of E[A] - E[B] from per-sample differences.
CorrelationEstimate estimate_moment_difference(std::span<const Configuration> samples, const Kernel& k,
                                               const MomentQuery& a, const MomentQuery& b, int batches = 32);
/// E exp(-<eta, h>)
CorrelationEstimate estimate_laplace(std::span<const Configuration> samples, const TestFunction& h, int batches = 32);

/// Product of complex intervals, one per ambient coordinate.
struct ComplexBox {
  std::vector<Interval> re;
  std::vector<Interval> im;
  /// Corner and edge grid: `per_side` values per real coordinate.
  std::vector<ComplexPoint> grid(int per_side = 5) const;
};

struct MomentBoundReport {
  double mean = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double g_integral = 0.0;
  double g_sup = 0.0;
  int n = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Sample mean of sup_{z in grid(K)} |phi^c(z)|^n against
/// n! exp(rho R int g_K d lambda) with g_K(x) = sup_{z in grid(K)} |G^c(z, x)|
/// and R = |g_K|_inf exp(|g_K|_inf). `integration` must contain the support
/// of g_K up to negligible tails.
MomentBoundReport moment_bound_check(std::span<const Configuration> samples, const Kernel& k, const ComplexBox& box,
                                     int n, double rho, const Window& integration, int batches = 32);

}  // namespace wickfield
