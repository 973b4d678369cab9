#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "wickfield/quadrature.hpp"

using namespace wickfield;

TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2n-1") {
  for (int n : {4, 12, 32}) {
    const Rule1D r = gauss_legendre(n, 0.0, 1.0);
    for (int k = 0; k < 2 * n; k += 3) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule against adaptive Gauss-Kronrod") {
  auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
  const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -4.0, 5.0, 15, 1e-14);
  const Rule1D r = composite_gauss_legendre(-4.0, 5.0, 18, 12);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  CHECK(s == doctest::Approx(ref).epsilon(1e-12));

  const std::vector<double> bp{-1.0, 0.0, 0.25, 2.0};
  const Rule1D q = composite_gauss_legendre(bp, 8);
  CHECK(q.size() == 24);
  double w = 0.0;
  for (double x : q.weights) w += x;
  CHECK(w == doctest::Approx(3.0));
}

TEST_CASE("compensated summation recovers cancelled terms") {
  CompensatedSum<double> s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
  CompensatedSum<std::complex<double>> c;
  c.add({1e16, -1e16});
  c.add({1.0, 2.0});
  c.add({-1e16, 1e16});
  CHECK(c.value() == std::complex<double>(1.0, 2.0));
}
