#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "wickfield/analysis.hpp"
#include "wickfield/oracle.hpp"

using namespace wickfield;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);
const Window kUnit = Window::box({{0.0, 1.0}});

SeriesSpec unit_spec(double intensity = 1.0) {
  SeriesSpec s;
  s.window = kUnit;
  s.intensity = intensity;
  s.nmax = intensity > 1.0 ? 18 : 14;
  return s;
}

// int_0^1 exp(-(x - y)^2) dy
double gauss_mass_unit(double x) { return 0.5 * kSqrtPi * (std::erf(1.0 - x) + std::erf(x)); }

}  // namespace

TEST_CASE("beta = 0 reduces to Poisson closed forms") {
  const PotentialSpec p(Profile::widom_rowlinson(), 0.0, Kernel::gaussian(1), kUnit);
  const SeriesSpec spec = unit_spec(1.7);
  const OracleValue n = expect(spec, p, count_functional(1));
  CHECK(std::abs(n.value.real() - 1.7) <= n.error() + 1e-12);
  CHECK(n.error() < 1e-7);

  const TestFunction h = TestFunction::bump(Point{0.5}, Point{0.4}, 1.0);
  const OracleValue l = expect(spec, p, laplace_functional(h));
  const QuadratureValue lp = poisson_laplace(h, 1.7, kUnit);
  CHECK(std::abs(l.value - lp.value) <= l.error() + lp.quad_bound + 1e-12);

  const std::vector<ComplexPoint> x{ComplexPoint{Complex(0.3)}};
  const bool c[] = {false};
  const OracleValue s1 = moment_exact(spec, p, x, c);
  CHECK(std::abs(s1.value.real() - 1.7 * gauss_mass_unit(0.3)) <= s1.error() + 1e-12);
}

TEST_CASE("normalization and stability in nmax") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), kUnit);
  SeriesSpec spec = unit_spec();
  const OracleValue one = expect(spec, p, constant_functional());
  CHECK(std::abs(one.value - Complex(1.0)) <= one.error() + 1e-12);
  const OracleValue a = expect(spec, p, count_functional(1));
  spec.nmax = 18;
  const OracleValue b = expect(spec, p, count_functional(1));
  CHECK(std::abs(a.value - b.value) <= a.error() + b.error());
  CHECK(a.error() < 1e-6);
}

TEST_CASE("the series refuses when the tail bound is too large") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), Window::box({{0.0, 4.0}}));
  SeriesSpec spec;
  spec.window = Window::box({{0.0, 4.0}});
  spec.intensity = 2.0;
  spec.nmax = 4;
  const int need = required_nmax(8.0, Growth{1.0, 1}, spec.tail_tol);
  CHECK(need > 4);
  CHECK(series_tail(8.0, Growth{1.0, 1}, need) <= spec.tail_tol);
  CHECK(series_tail(8.0, Growth{1.0, 1}, need - 1) > spec.tail_tol);
  try {
    expect(spec, p, count_functional(1));
    FAIL("expected a refusal");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(std::to_string(need)) != std::string::npos);
  }
}

TEST_CASE("linear profile: exact Poisson thinning") {
  const PotentialSpec p(Profile::linear(), 1.0, Kernel::gaussian(1), kUnit);
  const SeriesSpec spec = unit_spec(2.0);
  const OracleValue n = expect(spec, p, count_functional(1));
  // U = N * sqrt(pi) up to the grid error per particle
  const double expect_n = 2.0 * std::exp(-kSqrtPi);
  CHECK(std::abs(n.value.real() - expect_n) <= n.error() + 4.0 * p.grid_tolerance() + 1e-10);
}

TEST_CASE("low orders against nested adaptive quadrature") {
  const Window w = Window::box({{0.0, 0.1}});
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), w);
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto f = [&](std::vector<Point> pts) { return std::exp(-p.potential(Configuration(std::move(pts)))); };
  const double z1 = GK::integrate([&](double a) { return f({Point{a}}); }, 0.0, 0.1, 0, 0.0);
  const double z2 = GK::integrate(
      [&](double a) { return GK::integrate([&](double b) { return f({Point{a}, Point{b}}); }, 0.0, 0.1, 0, 0.0); }, 0.0,
      0.1, 0, 0.0);
  const double z3 = GK::integrate(
      [&](double a) {
        return GK::integrate(
            [&](double b) {
              return GK::integrate([&](double c) { return f({Point{a}, Point{b}, Point{c}}); }, 0.0, 0.1, 0, 0.0);
            },
            0.0, 0.1, 0, 0.0);
      },
      0.0, 0.1, 0, 0.0);
  const double z = 1.0 + z1 + z2 / 2.0 + z3 / 6.0;
  const double en = (z1 + z2 + z3 / 2.0) / z;
  // neglected orders n >= 4 with f <= 1: sum n m^n / n! with m = 0.1
  const double trunc = 4.0 * std::pow(0.1, 4) / 24.0 * 1.1 + std::pow(0.1, 4) / 24.0 * 1.1;
  SeriesSpec spec;
  spec.window = w;
  spec.intensity = 1.0;
  spec.nmax = 12;
  const OracleValue o = expect(spec, p, count_functional(1));
  CHECK(std::abs(o.value.real() - en) <= o.error() + trunc);
  CHECK(o.value.real() < 0.1);
  CHECK(o.value.real() > 0.1 * std::exp(-p.potential(Configuration::single(Point{0.05}))) * 0.9);
}

TEST_CASE("Campbell moments of the Poisson field") {
  const Kernel g = Kernel::gaussian(1);
  const ComplexPoint z1{Complex(0.2, 0.5)};
  const ComplexPoint z2{Complex(-0.4, 0.3)};
  const std::vector<ComplexPoint> pts{z1, z2};
  const bool cj[] = {true, false};
  const double s = 1.3;
  const QuadratureValue q = poisson_moment(g, s, pts, cj);
  // int conj G(z1, x) G(z2, x) dx = sqrt(pi/2) exp(-(conj z1 - z2)^2 / 2)
  const Complex d = std::conj(z1[0]) - z2[0];
  const Complex expect = s * std::sqrt(std::numbers::pi / 2.0) * std::exp(-d * d / 2.0) + s * kSqrtPi * s * kSqrtPi;
  CHECK(std::abs(q.value - expect) <= q.quad_bound + 1e-12 * std::abs(expect));
  CHECK(q.quad_bound < 1e-8);

  const std::vector<ComplexPoint> one{ComplexPoint{Complex(0.3)}};
  const bool f[] = {false};
  const QuadratureValue r = poisson_moment(g, 2.0, one, f, kUnit);
  CHECK(std::abs(r.value.real() - 2.0 * gauss_mass_unit(0.3)) <= r.quad_bound + 1e-13);

  // third moment: partitions {123}, {1}{23} x3, {1}{2}{3}
  const std::vector<ComplexPoint> three(3, ComplexPoint{Complex(0.0)});
  const bool nf[] = {false, false, false};
  const double i1 = kSqrtPi;
  const double i2 = std::sqrt(std::numbers::pi / 2.0);
  const double i3 = std::sqrt(std::numbers::pi / 3.0);
  const QuadratureValue t = poisson_moment(g, 1.0, three, nf);
  CHECK(t.value.real() == doctest::Approx(i3 + 3.0 * i2 * i1 + i1 * i1 * i1).epsilon(1e-10));
}

TEST_CASE("Laplace inequalities") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), kUnit);
  const TestFunction h = TestFunction::bump(Point{0.5}, Point{0.4}, 1.0);
  const double ih = integrate(h);
  CHECK(ih == doctest::Approx(0.8 * 8.0 / 15.0).epsilon(1e-12));
  const std::vector<double> ts{0.5, 1.0, 2.0};
  std::vector<SeriesFunctional> fs;
  for (double t : ts) fs.push_back(laplace_functional(h.scaled(t)));
  const auto ls = expect_many(unit_spec(), gibbs_model(p), fs);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(1.0 - ls[i].value.real() <= ts[i] * p.rho() * ih + ls[i].error());
  const OracleValue low = expect(unit_spec(0.5), p, laplace_functional(h));
  const OracleValue high = expect(unit_spec(1.0), p, laplace_functional(h));
  CHECK(high.value.real() < low.value.real() - low.error() - high.error());
}

TEST_CASE("two-species projection") {
  const Kernel g = Kernel::gaussian(1);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    Configuration a;
    Configuration b;
    for (int i = 0; i < 3; ++i) a.add(kUnit.sample_uniform(rng), 0.5 + i);
    for (int i = 0; i < 2; ++i) b.add(kUnit.sample_uniform(rng), 1.0 + i);
    const double closed = pair_energy_closed(g, a, b);
    CHECK(pair_energy_quadrature(g, a, b) == doctest::Approx(closed).epsilon(1e-8));
  }
  const std::vector<Profile::Charge> q{{0.5, 0.5}, {1.5, 0.5}};
  SeriesSpec spec;
  spec.window = Window::box({{0.0, 0.6}});
  spec.intensity = 1.0;
  spec.nmax = 12;
  const ProjectionReport r =
      two_species_projection_check(spec, g, q, 1.0, TestFunction::bump(Point{0.3}, Point{0.25}, 1.0));
  CHECK(r.pass());
  for (const auto& c : r.checks) CHECK(std::abs(c.coupled.value - c.projected.value) <= 1e-8);
}
