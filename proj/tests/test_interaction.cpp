#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "wickfield/interaction.hpp"

using namespace wickfield;

namespace {

const Window kUnit = Window::box({{0.0, 1.0}});

Configuration random_configuration(const Window& w, int n, std::mt19937_64& rng) {
  Configuration eta;
  for (int i = 0; i < n; ++i) eta.add(w.sample_uniform(rng));
  return eta;
}

}  // namespace

TEST_CASE("profiles") {
  const Profile wr = Profile::widom_rowlinson();
  const Profile lin = Profile::linear();
  CHECK(wr(0.0) == 0.0);
  CHECK(wr(2.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(lin(1.7) == 1.7);
  CHECK(wr.linear_bound() == 1.0);
  CHECK(lin.linear_bound() == 1.0);

  const std::vector<Profile::Charge> q{{0.5, 1.0 / 3}, {1.0, 1.0 / 3}, {2.0, 1.0 / 3}};
  const Profile cm = Profile::charge_mix(q, 2.0);
  double expect = 0.0;
  for (const auto& c : q) expect += c.w * (1.0 - std::exp(-c.s * 2.0 * 0.4));
  CHECK(cm(0.4) == doctest::Approx(expect / 2.0));
  CHECK(cm.linear_bound() == doctest::Approx(3.5 / 3.0));
  const Profile cm0 = Profile::charge_mix(q, 0.0);
  CHECK(cm0(0.4) == doctest::Approx(0.4 * 3.5 / 3.0));

  for (const Profile& p : {wr, lin, cm}) {
    for (double phi : {0.0, 0.3, 4.0}) {
      for (double d : {1e-9, 0.2, 3.0}) {
        // the direct difference carries rounding of order eps * |v|
        const double direct = p(phi + d) - p(phi);
        CHECK(std::abs(p.increment(phi, d) - direct) <= 1e-9 * std::abs(direct) + 4e-16 * std::max(1.0, p(phi + d)));
        // concavity: increments shrink as phi grows
        CHECK(p.increment(phi + 1.0, d) <= p.increment(phi, d) + 1e-15);
      }
    }
  }
  // no cancellation at tiny increments
  CHECK(wr.increment(30.0, 1e-3) == doctest::Approx(std::exp(-30.0) * (1.0 - std::exp(-1e-3))).epsilon(1e-12));
}

TEST_CASE("stability constants") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), kUnit);
  CHECK(p.B() == doctest::Approx(std::sqrt(std::numbers::pi)));
  CHECK(p.rho() == doctest::Approx(std::exp(std::sqrt(std::numbers::pi))));
  CHECK(p.xi() == p.rho());
  const double r = Kernel::gaussian(1).decay_radius(1e-8);
  CHECK(p.field_window().bounds()[0].lo <= -r + 1e-12);
  CHECK(p.field_window().bounds()[0].hi >= 1.0 + r - 1e-12);
  CHECK(p.grid().spacing() == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("single point energy against adaptive quadrature") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), kUnit);
  for (double x : {0.0, 0.37, 1.0}) {
    // U(delta_x) = int (1 - exp(-exp(-(x - y)^2))) dy
    auto f = [&](double y) { return -std::expm1(-std::exp(-(x - y) * (x - y))); };
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, x - 12.0, x + 12.0, 10, 1e-14);
    const double u = p.potential(Configuration::single(Point{x}));
    CHECK(std::abs(u - ref) <= p.grid_tolerance() + 1e-8);
  }
}

TEST_CASE("linear profile gives N times the kernel mass") {
  const PotentialSpec p(Profile::linear(), 1.0, Kernel::gaussian(1), kUnit);
  std::mt19937_64 rng(2);
  for (int n : {0, 1, 5, 12}) {
    const Configuration eta = random_configuration(kUnit, n, rng);
    CHECK(p.potential(eta) == doctest::Approx(n * std::sqrt(std::numbers::pi)).epsilon(1e-7).scale(1e-12));
  }
}

TEST_CASE("energy differences agree with full recomputation") {
  const Window w2 = Window::box({{0.0, 2.0}, {0.0, 2.0}});
  std::mt19937_64 rng(4);
  const std::vector<Profile::Charge> q{{0.5, 0.5}, {2.0, 0.5}};
  for (const PotentialSpec& p : {PotentialSpec(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), kUnit),
                                 PotentialSpec(Profile::charge_mix(q, 0.7), 0.7, Kernel::gaussian(2), w2)}) {
    for (int t = 0; t < 10; ++t) {
      const Configuration eta = random_configuration(p.sampling_window(), t, rng);
      const Point x = p.sampling_window().sample_uniform(rng);
      Configuration plus = eta;
      plus.add(x);
      const double direct = p.potential(plus) - p.potential(eta);
      CHECK(p.energy_diff(x, eta) == doctest::Approx(direct).epsilon(1e-10).scale(1e-12));
      const std::vector<double> phi = p.field_on_grid(eta);
      CHECK(p.energy_diff_cached(p.stencil(x), phi) == doctest::Approx(direct).epsilon(1e-10).scale(1e-12));
      CHECK(p.papangelou(x, eta) <= p.rho() * (1.0 + 1e-12));
      CHECK(p.papangelou(x, eta) > 0.0);
    }
  }
}

TEST_CASE("conditions hold for every profile") {
  std::mt19937_64 rng(8);
  const std::vector<Profile::Charge> q{{0.5, 1.0 / 3}, {1.0, 1.0 / 3}, {2.0, 1.0 / 3}};
  const Window w = Window::box({{0.0, 2.0}});
  for (const Profile& prof : {Profile::widom_rowlinson(), Profile::linear(), Profile::charge_mix(q, 1.0)}) {
    const PotentialSpec p(prof, 1.0, Kernel::gaussian(1), w);
    const ConditionsReport r = verify_conditions(p, 200, rng);
    CHECK(r.pass());
    CHECK(r.conditions.size() >= 3);
    for (const auto& c : r.conditions) CHECK(c.checks > 0);
  }
}

TEST_CASE("sphere potential") {
  const Space s = Space::sphere(2, 1.0);
  const PotentialSpec p(Profile::linear(), 1.0, Kernel::sphere_exp(s), Window::whole_sphere(s));
  CHECK(p.grid().total_weight() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-10));
  const double u = p.potential(Configuration::single(Point{0.0, 0.0, 1.0}));
  CHECK(u == doctest::Approx(4.0 * std::numbers::pi * std::sinh(1.0)).epsilon(1e-6));
}
