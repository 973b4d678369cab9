#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wickfield/analysis.hpp"

using namespace wickfield;

namespace {

std::vector<Configuration> poisson_samples(const Window& w, double intensity, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Configuration> s;
  for (int i = 0; i < n; ++i) s.push_back(sample_poisson(w, intensity, rng));
  return s;
}

CorrelationEstimate fake(double value, double se) {
  CorrelationEstimate e;
  e.value = value;
  e.stderr_re = se;
  e.n_samples = 1000;
  e.batches = 32;
  return e;
}

}  // namespace

TEST_CASE("agreement test") {
  CHECK(agreement_test("a", fake(1.0, 0.1), 1.25, 0.0).pass);
  CHECK_FALSE(agreement_test("a", fake(1.0, 0.1), 1.4, 0.0).pass);
  CHECK(agreement_test("a", fake(1.0, 0.1), 1.4, 0.2).pass);
  CHECK_FALSE(agreement_test("a", fake(std::nan(""), 0.1), 1.0, 0.0).pass);
}

TEST_CASE("covariance and dominance tests") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<double> a(3200), b(3200), c(3200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n(rng);
    b[i] = a[i] + 0.5 * n(rng);
    c[i] = -a[i];
  }
  CHECK(fkg_test("pos", a, b).pass);
  CHECK_FALSE(fkg_test("neg", a, c).pass);

  std::vector<double> ones(3200);
  for (auto& x : ones) x = 1.0 + 0.1 * n(rng);
  CHECK(dominance_test("inc", ones, 2.0, true).pass);
  CHECK_FALSE(dominance_test("inc", ones, 0.5, true).pass);
  CHECK(dominance_test("dec", ones, 0.5, false).pass);
  CHECK_FALSE(dominance_test("dec", ones, 2.0, false).pass);
}

TEST_CASE("integrate a bump") {
  CHECK(integrate(TestFunction::bump(Point{0.0}, Point{0.5}, 3.0)) == doctest::Approx(3.0 * 16.0 / 15.0 * 0.5));
  CHECK(integrate(TestFunction::bump(Point{0.0, 1.0}, Point{0.5, 2.0}, 1.0)) ==
        doctest::Approx(16.0 / 15.0 * 0.5 * 16.0 / 15.0 * 2.0));
}

TEST_CASE("finite-volume bias bound shrinks with the window") {
  const Kernel g = Kernel::gaussian(2);
  const ComplexPoint z1{Complex(0.0, 0.3), Complex(0.1)};
  const ComplexPoint z2{Complex(0.2), Complex(-0.2)};
  double prev = std::numeric_limits<double>::infinity();
  for (double L : {5.0, 6.0, 8.0, 10.0}) {
    const double b = finite_volume_bias(g, 2.0, Window::box({{-L, L}, {-L, L}}), z1, z2);
    CHECK(b >= 0.0);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev < 1e-6);
  const Space s = Space::sphere(2, 1.0);
  CHECK(finite_volume_bias(Kernel::sphere_exp(s), 2.0, Window::whole_sphere(s), ComplexPoint(3), ComplexPoint(3)) ==
        0.0);
}

TEST_CASE("Euclidean invariance on Poisson samples") {
  const Kernel g = Kernel::gaussian(2);
  const Window w = Window::box({{-7.0, 7.0}, {-7.0, 7.0}});
  const auto s = poisson_samples(w, 1.0, 3200, 3);
  const GroupElement rot = GroupElement::rotation(2, 0, 1, 0.7).compose(GroupElement::translation(Point{0.3, -0.2}));
  const TestReport r = euclidean_invariance_test(s, g, w, 1.0, Point{0.2, 0.0}, Point{-0.3, 0.4}, rot);
  CHECK(r.pass);
  CHECK_THROWS_AS(euclidean_invariance_test(s, g, w, 1.0, Point{5.0, 0.0}, Point{0.0, 0.0}, rot), ValidationError);
  CHECK_THROWS_AS(
      euclidean_invariance_test(s, g, w, 1.0, Point{0.0, 0.0}, Point{0.1, 0.0}, GroupElement::translation(Point{4.0, 0.0})),
      ValidationError);
}

TEST_CASE("boost invariance of the free field") {
  const Kernel g = Kernel::gaussian(2);
  const TestReport r = lorentz_invariance_exact(g, 1.5, Point{0.2, 0.0}, Point{-0.1, 0.3}, 0.3);
  CHECK(r.pass);
  CHECK(r.margin <= 1e-6);

  const Window w = Window::box({{-7.0, 7.0}, {-7.0, 7.0}});
  const auto s = poisson_samples(w, 1.0, 3200, 5);
  const TestReport mc = lorentz_invariance_test(s, g, w, 1.0, Point{0.2, 0.0}, Point{-0.1, 0.3}, 0.2);
  CHECK(mc.pass);
  CHECK(mc.details.contains("resolution"));
}

TEST_CASE("mixed moment is not boost invariant but relocates exactly") {
  const Kernel g = Kernel::gaussian(2);
  const Point y1{0.4, 0.0};
  const Point y2{-0.3, 0.2};
  const TestReport r = mixed_noninvariance_exact(g, 1.0, y1, y2, 0.5);
  CHECK(r.pass);
  CHECK(mixed_null_control(g, 1.0, Point{0.0, 0.0}, Point{0.0, 0.3}, 0.5).pass);

  const Window w = Window::box({{-7.0, 7.0}, {-7.0, 7.0}});
  const auto s = poisson_samples(w, 1.0, 25600, 8);
  const TestReport mc = mixed_noninvariance_test(s, g, y1, y2, 0.5);
  INFO(mc.to_json().dump());
  CHECK(mc.pass);
}

TEST_CASE("holomorphy and reality") {
  const Kernel g = Kernel::gaussian(2);
  std::mt19937_64 rng(4);
  const Configuration eta = sample_poisson(Window::box({{-2.0, 2.0}, {-2.0, 2.0}}), 2.0, rng);
  const ComplexPoint z{Complex(0.2, 0.5), Complex(-0.1, -0.3)};
  CHECK(holomorphy_test(eta, g, z, 0, 0.3).pass);
  CHECK(holomorphy_test(eta, g, z, 1, 0.3).pass);
  const Kernel b = Kernel::mollified_bessel(1, 0.5, 1.0);
  const Configuration e1({Point{0.1}, Point{-0.7}});
  CHECK(holomorphy_test(e1, b, ComplexPoint{Complex(0.3, 0.6)}, 0, 0.2).pass);

  CorrelationEstimate e = fake(1.0, 0.1);
  e.value = Complex(1.0, 0.05);
  e.stderr_im = 0.02;
  CHECK(reality_test("s2", e, 2, 1e-8).pass);
  e.value = Complex(1.0, 0.5);
  CHECK_FALSE(reality_test("s2", e, 2, 1e-8).pass);
}

TEST_CASE("window growth study") {
  std::vector<WindowObservation> obs(3);
  for (int i = 0; i < 3; ++i) {
    obs[i].size = 4.0 * (1 << i);
    obs[i].laplace = fake(0.5 + 0.01 / (i + 1), 0.001);
    obs[i].density = fake(0.3, 0.01);
    obs[i].s2 = fake(1.0 + 0.1 / (1 << i), 0.001);
  }
  CHECK(window_growth_study(obs).pass);
  obs[2].laplace = fake(0.7, 0.001);
  CHECK_FALSE(window_growth_study(obs).pass);
  CHECK_THROWS_AS(window_growth_study(std::span(obs).first(2)), ValidationError);
  std::swap(obs[0], obs[2]);
  CHECK_THROWS_AS(window_growth_study(obs), ValidationError);
}

TEST_CASE("Poisson null suite on exact Poisson samples") {
  const Kernel g = Kernel::gaussian(1);
  const Window w = Window::box({{0.0, 2.0}});
  const auto s = poisson_samples(w, 1.5, 6400, 11);
  const auto rs =
      poisson_null_suite(s, g, w, 1.5, TestFunction::bump(Point{1.0}, Point{0.5}, 1.0), Point{0.7}, Point{1.2});
  CHECK(rs.size() == 5);
  int fails = 0;
  for (const auto& r : rs) fails += r.pass ? 0 : 1;
  CHECK(fails == 0);
}
