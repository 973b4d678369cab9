#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wickfield/analysis.hpp"
#include "wickfield/geometry.hpp"

using namespace wickfield;

namespace {

double minkowski_interval(const Point& y) {
  double s = y[0] * y[0];
  for (int a = 1; a < y.size(); ++a) s -= y[a] * y[a];
  return s;
}

double euclid(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("window basics") {
  const Window w = Window::box({{0.0, 2.0}, {-1.0, 3.0}});
  CHECK(w.volume() == doctest::Approx(8.0));
  CHECK(w.contains(Point{1.0, 0.0}));
  CHECK_FALSE(w.contains(Point{2.5, 0.0}));
  CHECK(w.distance_to_boundary(Point{1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(w.center() == Point{1.0, 1.0});
  const Window p = w.padded(0.5);
  CHECK(p.bounds()[0].lo == doctest::Approx(-0.5));
  CHECK(p.bounds()[1].hi == doctest::Approx(3.5));
  CHECK(w.inset(0.25).volume() == doctest::Approx(1.5 * 3.5));
  CHECK_THROWS_AS(Window::box({{1.0, 0.0}}), ValidationError);
}

TEST_CASE("sphere windows sample on the sphere") {
  const Space s = Space::sphere(2, 1.5);
  const Window w = Window::whole_sphere(s);
  CHECK(w.volume() == doctest::Approx(4.0 * M_PI * 1.5 * 1.5));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) CHECK(s.on_space(w.sample_uniform(rng)));
}

TEST_CASE("random isometries preserve distances and invert") {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 3; ++d) {
    for (int t = 0; t < 20; ++t) {
      const GroupElement g = GroupElement::random_isometry(d, 2.0, true, rng);
      CHECK(g.is_real());
      CHECK(g.matrix().orthogonality_defect() < 1e-13);
      Point a(d), b(d);
      std::normal_distribution<double> n;
      for (int i = 0; i < d; ++i) {
        a[i] = n(rng);
        b[i] = n(rng);
      }
      CHECK(euclid(g.apply_real(a), g.apply_real(b)) == doctest::Approx(euclid(a, b)).epsilon(1e-12));
      const Point back = g.inverse().apply_real(g.apply_real(a));
      CHECK(euclid(back, a) < 1e-12);
    }
  }
}

TEST_CASE("boost as complex rotation agrees with the real boost on the Wick slice") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int d = 2; d <= 3; ++d) {
    for (double chi : {-0.7, 0.0, 0.3, 1.1}) {
      const GroupElement m = boost_as_complex_rotation(chi, d);
      CHECK(m.matrix().orthogonality_defect() < 1e-13);
      for (int t = 0; t < 10; ++t) {
        Point y(d);
        for (int i = 0; i < d; ++i) y[i] = u(rng);
        const Point by = minkowski_boost(chi, y);
        CHECK(minkowski_interval(by) == doctest::Approx(minkowski_interval(y)).epsilon(1e-12).scale(1.0));
        // direct formula in the (0, 1) plane
        CHECK(by[0] == doctest::Approx(std::cosh(chi) * y[0] + std::sinh(chi) * y[1]));
        CHECK(by[1] == doctest::Approx(std::sinh(chi) * y[0] + std::cosh(chi) * y[1]));
        CHECK(max_abs_diff(m.apply(wick_embed(y)), wick_embed(by)) < 1e-12);
      }
    }
  }
}

TEST_CASE("time reflection and the relocation map") {
  const Point y{0.4, -0.3};
  CHECK(minkowski_time_reflection(y) == Point{-0.4, -0.3});
  CHECK(max_abs_diff(conj(wick_embed(y)), wick_embed(minkowski_time_reflection(y))) == 0.0);
  for (double chi : {0.2, 0.5, -1.0}) {
    const Point r = relocate_first_argument(chi, y);
    const Point two = minkowski_boost(2.0 * chi, y);
    CHECK(euclid(r, two) < 1e-12);
  }
  CHECK(euclid(relocate_first_argument(0.7, Point{0.0, 0.0}), Point{0.0, 0.0}) == 0.0);
}

TEST_CASE("de Sitter embedding lies on the complex circle") {
  for (double t : {-1.0, 0.0, 0.5}) {
    const ComplexPoint z = wick_embed_de_sitter(t, 2.0);
    CHECK(std::abs(bilinear_dot(z, z) - Complex(4.0)) < 1e-12);
  }
  CHECK_THROWS_AS(wick_embed_de_sitter(0.0, 1.0, 2), ValidationError);
}

TEST_CASE("composition is associative with the action") {
  std::mt19937_64 rng(9);
  const GroupElement g = GroupElement::random_isometry(2, 1.0, false, rng);
  const GroupElement h = boost_as_complex_rotation(0.4, 2);
  const ComplexPoint z{Complex(0.3, -0.2), Complex(1.0, 0.5)};
  CHECK(max_abs_diff(g.compose(h).apply(z), g.apply(h.apply(z))) < 1e-13);
}
