#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wickfield/fields.hpp"
#include "wickfield/stats.hpp"

using namespace wickfield;

namespace {

std::vector<Configuration> poisson_samples(const Window& w, double intensity, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Configuration> s;
  for (int i = 0; i < n; ++i) s.push_back(sample_poisson(w, intensity, rng));
  return s;
}

}  // namespace

TEST_CASE("field at real points") {
  const Kernel g = Kernel::gaussian(2);
  const Configuration eta({Point{0.0, 0.0}, Point{1.0, 0.5}}, {1.0, 2.0});
  const Point x{0.3, 0.2};
  const double expect = std::exp(-(0.09 + 0.04)) + 2.0 * std::exp(-(0.49 + 0.09));
  CHECK(field(eta, g, x) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(field_complex(eta, g, complexify(x)) == Complex(field(eta, g, x)));
  CHECK(field(Configuration{}, g, x) == 0.0);
}

TEST_CASE("moment samples are exactly permutation symmetric") {
  const Kernel g = Kernel::gaussian(2);
  std::mt19937_64 rng(1);
  const Window w = Window::box({{-2.0, 2.0}, {-2.0, 2.0}});
  const Configuration eta = sample_poisson(w, 3.0, rng);
  MomentQuery q;
  q.points = {ComplexPoint{Complex(0.1, 0.3), Complex(0.2)}, ComplexPoint{Complex(-0.5, -0.2), Complex(0.4)},
              ComplexPoint{Complex(0.0, 0.7), Complex(-1.0)}};
  q.conj = {true, false, false};
  const Complex base = moment_sample(eta, g, q);
  std::vector<int> perm{0, 1, 2};
  while (std::next_permutation(perm.begin(), perm.end())) {
    MomentQuery r;
    for (int i : perm) {
      r.points.push_back(q.points[i]);
      r.conj.push_back(q.conj[i]);
    }
    CHECK(moment_sample(eta, g, r) == base);
  }
  Complex direct = 1.0;
  for (std::size_t j = 0; j < q.points.size(); ++j) {
    const Complex v = field_complex(eta, g, q.points[j]);
    direct *= q.conj[j] ? std::conj(v) : v;
  }
  CHECK(std::abs(direct - base) <= 1e-13 * std::abs(base));
}

TEST_CASE("queries are validated against the kernel budget") {
  const Kernel b = Kernel::mollified_bessel(1, 0.5, 1.0);
  MomentQuery q;
  q.points = {ComplexPoint{Complex(0.0, b.im_budget() * 0.5)}};
  q.conj = {false};
  CHECK_NOTHROW(q.validate(b));
  q.points[0] = ComplexPoint{Complex(0.0, b.im_budget() + 1.0)};
  CHECK_THROWS_AS(q.validate(b), BudgetError);
  q.conj = {};
  CHECK_THROWS_AS(q.validate(b), ValidationError);
}

TEST_CASE("estimators") {
  const std::vector<double> flat(64, 2.5);
  const CorrelationEstimate e = estimate_from_values(flat);
  CHECK(e.value == Complex(2.5));
  CHECK(e.stderr_abs() == 0.0);
  CHECK(e.n_samples == 64);

  const Kernel g = Kernel::gaussian(1);
  const Window w = Window::box({{-3.0, 3.0}});
  const auto s = poisson_samples(w, 1.0, 2000, 4);
  MomentQuery a;
  a.points = {ComplexPoint{Complex(0.0, 0.2)}};
  a.conj = {false};
  MomentQuery b;
  b.points = {ComplexPoint{Complex(0.5)}, ComplexPoint{Complex(-0.5)}};
  b.conj = {false, false};
  const std::vector<MomentQuery> qs{a, b};
  const auto both = estimate_moments(s, g, qs);
  const auto ea = estimate_moment(s, g, a);
  const auto eb = estimate_moment(s, g, b);
  CHECK(both[0].value == ea.value);
  CHECK(both[1].value == eb.value);
  CHECK(both[1].stderr_re == eb.stderr_re);
  const auto d = estimate_moment_difference(s, g, a, b);
  CHECK(std::abs(d.value - (ea.value - eb.value)) < 1e-12);

  const TestFunction h = TestFunction::bump(Point{0.0}, Point{1.0}, 0.5);
  const auto l = estimate_laplace(s, h);
  // Poisson: exp(int (e^{-h} - 1)) lies in [exp(-int h), 1]
  CHECK(l.value.real() <= 1.0);
  CHECK(l.value.real() >= std::exp(-0.5 * 16.0 / 15.0) - 3.0 * l.stderr_re);
  const std::vector<Configuration> empty(64);
  CHECK(estimate_laplace(empty, h).value == Complex(1.0));
}

TEST_CASE("complex box grid keeps the boundary") {
  ComplexBox box{{{-1.0, 1.0}}, {{0.0, 0.5}}};
  const auto g = box.grid(5);
  CHECK(g.size() == 16);
  for (const auto& z : g) {
    const bool edge_re = z[0].real() == -1.0 || z[0].real() == 1.0;
    const bool edge_im = z[0].imag() == 0.0 || z[0].imag() == 0.5;
    CHECK((edge_re || edge_im));
  }
}

TEST_CASE("moment bound holds for Poisson samples") {
  const Kernel g = Kernel::gaussian(1);
  const Window w = Window::box({{-4.0, 4.0}});
  const auto s = poisson_samples(w, 1.0, 4000, 9);
  ComplexBox box{{{-0.5, 0.5}}, {{-0.3, 0.3}}};
  for (int n : {1, 2, 3}) {
    const MomentBoundReport r = moment_bound_check(s, g, box, n, 1.0, w.padded(5.0));
    CHECK(r.pass);
    CHECK(r.mean <= r.bound);
    // grid sup of |G^c| is sampled on the midpoint nodes
    CHECK(r.g_sup == doctest::Approx(std::exp(0.09)).epsilon(1e-2));
  }
}
