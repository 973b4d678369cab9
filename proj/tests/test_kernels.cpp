#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "wickfield/kernels.hpp"

using namespace wickfield;

namespace {

// d = 1: G_{1/2}(x) = K0(m|x|)/pi convolved with the centered Gaussian of variance eps.
double bessel_1d_oracle(double x, double eps, double m) {
  auto g = [&](double y) { return std::exp(-(x - y) * (x - y) / (2.0 * eps)) / std::sqrt(2.0 * std::numbers::pi * eps); };
  auto f = [&](double y) { return std::cyl_bessel_k(0.0, m * std::abs(y)) / std::numbers::pi * g(y); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double span = std::abs(x) + 12.0 * std::sqrt(eps) + 40.0 / m;
  return ts.integrate(f, -span, 0.0, 1e-13) + ts.integrate(f, 0.0, span, 1e-13);
}

// d = 2: G_{1/2}(y) = exp(-m|y|)/(2 pi |y|); the angular integral of the mollifier is a Bessel I0.
double bessel_2d_oracle(double r, double eps, double m) {
  auto f = [&](double rho) {
    const double z = r * rho / eps;
    return std::exp(-m * rho) / (2.0 * std::numbers::pi) * std::exp(-(r * r + rho * rho) / (2.0 * eps)) *
           std::cyl_bessel_i(0.0, z) / eps;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, 0.0, r + 40.0 * std::sqrt(eps) + 30.0 / m, 1e-13);
}

Complex mean_value(const Kernel& k, const ComplexPoint& z, const Point& x, int axis, double r) {
  Complex s = 0.0;
  const int n = 64;
  for (int j = 0; j < n; ++j) {
    ComplexPoint w = z;
    w[axis] += std::polar(r, 2.0 * std::numbers::pi * j / n);
    s += k.eval_complex(w, x);
  }
  return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("Gaussian closed forms") {
  const Kernel g1 = Kernel::gaussian(1);
  CHECK(g1.eval(Point{0.3}, Point{0.3}) == 1.0);
  const Complex v = g1.eval_complex(ComplexPoint{Complex(0.0, 1.0)}, Point{0.0});
  CHECK(std::abs(v - std::exp(1.0)) < 1e-15);
  CHECK(g1.l1_constant() == doctest::Approx(std::sqrt(std::numbers::pi)));
  CHECK(Kernel::gaussian(2).l1_constant() == doctest::Approx(std::numbers::pi));
  CHECK(g1.decay_radius(std::exp(-16.0)) == doctest::Approx(4.0));
  CHECK(g1.decay_radius(1.0) == 0.0);
  CHECK(g1.self_convolve(Point{0.2}, Point{0.2}) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)));
  const double closed = g1.self_convolve(Point{0.0}, Point{1.0});
  CHECK(std::abs(g1.self_convolve_quadrature(Point{0.0}, Point{1.0}) - closed) < 1e-8 * closed);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const Point a{u(rng)};
    const Point b{u(rng)};
    CHECK(std::abs(g1.self_convolve(a, b) - g1.self_convolve(b, a)) < 1e-10);
  }
}

TEST_CASE("L1 constant against adaptive quadrature") {
  auto f = [](double x) { return std::exp(-x * x); };
  const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -10.0, 10.0, 10, 1e-14);
  CHECK(Kernel::gaussian(1).l1_constant() == doctest::Approx(ref).epsilon(1e-12));
  CHECK(Kernel::mollified_bessel(1, 0.5, 2.0).l1_constant() == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("sphere kernel") {
  const Space s = Space::sphere(2, 1.0);
  const Kernel k = Kernel::sphere_exp(s);
  const Point n{0.0, 0.0, 1.0};
  CHECK(k.eval(n, n) == doctest::Approx(std::exp(1.0)));
  // int_{S^2} e^{x.y} dy = 4 pi sinh(1)
  CHECK(k.l1_constant() == doctest::Approx(4.0 * std::numbers::pi * std::sinh(1.0)).epsilon(1e-8));
  CHECK(k.decay_radius(1e-8) == doctest::Approx(2.0));
}

TEST_CASE("mollified Bessel d=1 against the real-space convolution") {
  const double eps = 0.5;
  const double m = 1.0;
  const Kernel k = Kernel::mollified_bessel(1, eps, m);
  for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 3.5, 6.0}) {
    const double ref = bessel_1d_oracle(x, eps, m);
    const Complex v = k.eval_complex(ComplexPoint{Complex(x)}, Point{0.0});
    CHECK(std::abs(v.real() - ref) < 1e-6 * ref);
    CHECK(std::abs(v.imag()) <= k.quad_tol());
    CHECK(std::abs(k.eval(Point{x}, Point{0.0}) - ref) < 1e-6 * ref);
  }
  const double r = k.decay_radius(1e-6);
  CHECK(std::abs(k.eval_complex(ComplexPoint{Complex(r)}, Point{0.0})) <= 1e-6);
}

TEST_CASE("mollified Bessel d=2 against the real-space convolution") {
  const double eps = 0.3;
  const double m = 1.0;
  const Kernel k = Kernel::mollified_bessel(2, eps, m);
  for (double r : {0.0, 0.3, 1.0, 2.5}) {
    const double ref = bessel_2d_oracle(r, eps, m);
    const Complex v = k.eval_complex(ComplexPoint{Complex(r), Complex(0.0)}, Point{0.0, 0.0});
    CHECK(std::abs(v.real() - ref) < 1e-6 * ref + k.quad_tol());
    CHECK(std::abs(k.eval(Point{0.0, r}, Point{0.0, 0.0}) - ref) < 1e-6 * ref + k.quad_tol());
  }
}

TEST_CASE("holomorphy by the mean-value property") {
  const Kernel g = Kernel::gaussian(2);
  const Kernel b = Kernel::mollified_bessel(1, 0.5, 1.0);
  const Point x2{0.1, -0.4};
  const ComplexPoint z2{Complex(0.5, 0.7), Complex(-0.2, -1.1)};
  for (int axis = 0; axis < 2; ++axis) {
    const Complex c = g.eval_complex(z2, x2);
    CHECK(std::abs(mean_value(g, z2, x2, axis, 0.2) - c) < 1e-12 * std::abs(c));
  }
  const ComplexPoint z1{Complex(0.8, 1.3)};
  const Complex c = b.eval_complex(z1, Point{0.0});
  CHECK(std::abs(mean_value(b, z1, Point{0.0}, 0, 0.2) - c) < 10.0 * b.quad_tol());
}

TEST_CASE("invariance under isometries") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Kernel g = Kernel::gaussian(2);
  for (int t = 0; t < 20; ++t) {
    const GroupElement iso = GroupElement::random_isometry(2, 3.0, true, rng);
    const ComplexPoint z{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))};
    const Point x{u(rng), u(rng)};
    const ComplexPoint gx = iso.apply(complexify(x));
    const Complex a = g.eval_complex(z, x);
    const Complex b = g.eval_complex(iso.apply(z), real_part(gx));
    CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
  }
  const Space s = Space::sphere(2, 1.0);
  const Kernel k = Kernel::sphere_exp(s);
  const Window w = Window::whole_sphere(s);
  for (int t = 0; t < 10; ++t) {
    const GroupElement rot = GroupElement::random_isometry(3, 0.0, false, rng);
    const Point a = w.sample_uniform(rng);
    const Point b = w.sample_uniform(rng);
    CHECK(k.eval(rot.apply_real(a), rot.apply_real(b)) == doctest::Approx(k.eval(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("budget is enforced") {
  const Kernel b = Kernel::mollified_bessel(1, 0.5, 1.0, 1e-8, 2.0);
  CHECK(b.im_budget() <= 2.0);
  CHECK_NOTHROW(b.eval_complex(ComplexPoint{Complex(0.0, 0.9 * b.im_budget())}, Point{0.0}));
  CHECK_THROWS_AS(b.eval_complex(ComplexPoint{Complex(0.0, b.im_budget() + 0.5)}, Point{0.0}), BudgetError);
  CHECK_THROWS_AS(Kernel::mollified_bessel(1, -1.0, 1.0), ValidationError);
  CHECK(std::isinf(Kernel::gaussian(1).im_budget()));
}

TEST_CASE("sup_abs bounds the complex kernel") {
  const Kernel g = Kernel::gaussian(1);
  const ComplexPoint z{Complex(0.3, 1.2)};
  const double s = g.sup_abs(z);
  CHECK(s == doctest::Approx(std::exp(1.44)));
  for (double x = -3.0; x <= 3.0; x += 0.25) CHECK(std::abs(g.eval_complex(z, Point{x})) <= s * (1.0 + 1e-14));
}
