#pragma once

#include <complex>
#include <span>
#include <vector>

namespace wickfield {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule1D gauss_legendre(int n);
/// n-point Gauss-Legendre rule mapped to [a, b].
Rule1D gauss_legendre(int n, double a, double b);
/// Equal-width panels on [a, b], each with its own Gauss-Legendre rule.
Rule1D composite_gauss_legendre(double a, double b, int panels, int nodes_per_panel);
/// Panels delimited by sorted, distinct breakpoints.
Rule1D composite_gauss_legendre(std::span<const double> breakpoints, int nodes_per_panel);

/// Neumaier compensated summation.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    comp_ += compensation(sum_, x, t);
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }
  void merge(const CompensatedSum& o) {
    add(o.sum_);
    add(o.comp_);
  }

 private:
  static double compensation(double s, double x, double t) {
    return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  }
  static std::complex<double> compensation(std::complex<double> s, std::complex<double> x, std::complex<double> t) {
    return {compensation(s.real(), x.real(), t.real()), compensation(s.imag(), x.imag(), t.imag())};
  }

  T sum_{};
  T comp_{};
};

}  // namespace wickfield
