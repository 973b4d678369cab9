#include "wickfield/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wickfield/interaction.hpp"
#include "wickfield/quadrature.hpp"
#include "wickfield/stats.hpp"

namespace wickfield {

Complex field_complex(const Configuration& eta, const Kernel& k, const ComplexPoint& z) {
  CompensatedSum<Complex> s;
  for (std::size_t j = 0; j < eta.size(); ++j) s.add(eta.charge(j) * k.eval_complex(z, eta.point(j)));
  return s.value();
}

double field(const Configuration& eta, const Kernel& k, const Point& x) {
  CompensatedSum<double> s;
  for (std::size_t j = 0; j < eta.size(); ++j) s.add(eta.charge(j) * k.eval(x, eta.point(j)));
  return s.value();
}

void MomentQuery::validate(const Kernel& k) const {
  if (points.size() != conj.size()) throw ValidationError("moment query: points and conj flags differ in length");
  for (const auto& z : points) {
    if (z.size() != k.ambient_dim()) throw ValidationError("moment query: point dimension does not match the kernel");
    for (int a = 0; a < z.size(); ++a) {
      if (std::abs(z[a].imag()) > k.im_budget()) {
        throw BudgetError("moment query: |Im z| = " + std::to_string(std::abs(z[a].imag())) +
                          " exceeds the kernel budget " + std::to_string(k.im_budget()));
      }
    }
  }
}

nlohmann::json MomentQuery::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& z : points) {
    nlohmann::json p = nlohmann::json::array();
    for (const auto& c : z) p.push_back({{"re", c.real()}, {"im", c.imag()}});
    pts.push_back(p);
  }
  return {{"points", pts}, {"conj", conj}};
}

Complex moment_sample(const Configuration& eta, const Kernel& k, const MomentQuery& q) {
  const std::size_t n = q.points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (q.points[a] == q.points[b]) return q.conj[a] < q.conj[b];
    return lex_less(q.points[a], q.points[b]);
  });
  Complex p = 1.0;
  for (std::size_t j : order) {
    const Complex v = field_complex(eta, k, q.points[j]);
    p *= q.conj[j] ? std::conj(v) : v;
  }
  return p;
}

nlohmann::json CorrelationEstimate::to_json() const {
  nlohmann::json j{{"value", {{"re", value.real()}, {"im", value.imag()}}},
                   {"stderr_re", stderr_re},
                   {"stderr_im", stderr_im},
                   {"n_samples", n_samples},
                   {"batches", batches}};
  if (!metadata.is_null()) j["metadata"] = metadata;
  return j;
}

CorrelationEstimate estimate_from_values(std::span<const Complex> values, int batches) {
  const ComplexBatchMeans bm = batch_means(values, batches);
  CorrelationEstimate e;
  e.value = bm.mean;
  e.stderr_re = bm.stderr_re;
  e.stderr_im = bm.stderr_im;
  e.n_samples = bm.n;
  e.batches = bm.batches;
  return e;
}

CorrelationEstimate estimate_from_values(std::span<const double> values, int batches) {
  const BatchMeans bm = batch_means(values, batches);
  CorrelationEstimate e;
  e.value = bm.mean;
  e.stderr_re = bm.std_error;
  e.n_samples = bm.n;
  e.batches = bm.batches;
  return e;
}

CorrelationEstimate estimate_moment(std::span<const Configuration> samples, const Kernel& k, const MomentQuery& q,
                                    int batches) {
  return estimate_moments(samples, k, std::span<const MomentQuery>(&q, 1), batches).front();
}

std::vector<CorrelationEstimate> estimate_moments(std::span<const Configuration> samples, const Kernel& k,
                                                  std::span<const MomentQuery> qs, int batches) {
  for (const auto& q : qs) q.validate(k);
  std::vector<std::vector<Complex>> values(qs.size(), std::vector<Complex>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < qs.size(); ++j) values[j][i] = moment_sample(samples[i], k, qs[j]);
  }
  std::vector<CorrelationEstimate> out;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    CorrelationEstimate e = estimate_from_values(values[j], batches);
    e.metadata = qs[j].to_json();
    out.push_back(std::move(e));
  }
  return out;
}

CorrelationEstimate estimate_moment_difference(std::span<const Configuration> samples, const Kernel& k,
                                               const MomentQuery& a, const MomentQuery& b, int batches) {
  a.validate(k);
  b.validate(k);
  std::vector<Complex> d(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) d[i] = moment_sample(samples[i], k, a) - moment_sample(samples[i], k, b);
  CorrelationEstimate e = estimate_from_values(d, batches);
  e.metadata = {{"minuend", a.to_json()}, {"subtrahend", b.to_json()}};
  return e;
}

CorrelationEstimate estimate_laplace(std::span<const Configuration> samples, const TestFunction& h, int batches) {
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = std::exp(-pair(samples[i], h));
  return estimate_from_values(v, batches);
}

std::vector<ComplexPoint> ComplexBox::grid(int per_side) const {
  if (re.size() != im.size() || re.empty()) throw ValidationError("complex box: need matching re/im intervals");
  if (per_side < 2) throw ValidationError("complex box: per_side must be at least 2");
  const int dims = static_cast<int>(re.size());
  const int reals = 2 * dims;
  std::vector<ComplexPoint> out;
  std::vector<int> idx(reals, 0);
  auto at = [&](const Interval& iv, int i) { return iv.lo + (iv.hi - iv.lo) * i / (per_side - 1); };
  while (true) {
    // keep points on the boundary of the box (at least one coordinate extreme)
    bool boundary = false;
    for (int i : idx) boundary = boundary || i == 0 || i == per_side - 1;
    if (boundary) {
      ComplexPoint z(dims);
      for (int a = 0; a < dims; ++a) z[a] = Complex(at(re[a], idx[2 * a]), at(im[a], idx[2 * a + 1]));
      out.push_back(z);
    }
    int r = reals - 1;
    while (r >= 0 && ++idx[r] == per_side) idx[r--] = 0;
    if (r < 0) break;
  }
  return out;
}

nlohmann::json MomentBoundReport::to_json() const {
  return {{"mean", mean},         {"std_error", std_error}, {"bound", bound}, {"g_integral", g_integral},
          {"g_sup", g_sup},       {"n", n},                 {"pass", pass}};
}

MomentBoundReport moment_bound_check(std::span<const Configuration> samples, const Kernel& k, const ComplexBox& box,
                                     int n, double rho, const Window& integration, int batches) {
  if (n < 0) throw ValidationError("moment_bound_check: n must be non-negative");
  const auto zs = box.grid();
  for (const auto& z : zs) MomentQuery{{z}, {false}}.validate(k);
  const QuadratureGrid g = integration.is_box() ? QuadratureGrid::midpoint(integration, 0.05)
                                                : QuadratureGrid::sphere(integration.space(), 0.05);
  MomentBoundReport rep;
  rep.n = n;
  CompensatedSum<double> gi;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double gk = 0.0;
    for (const auto& z : zs) gk = std::max(gk, std::abs(k.eval_complex(z, g.node(i))));
    gi.add(g.weights()[i] * gk);
    rep.g_sup = std::max(rep.g_sup, gk);
  }
  rep.g_integral = gi.value();
  const double r = rep.g_sup * std::exp(rep.g_sup);
  rep.bound = std::tgamma(n + 1.0) * std::exp(rho * r * rep.g_integral);

  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double m = 0.0;
    for (const auto& z : zs) m = std::max(m, std::abs(field_complex(samples[i], k, z)));
    v[i] = std::pow(m, n);
  }
  const BatchMeans bm = batch_means(v, batches);
  rep.mean = bm.mean;
  rep.std_error = bm.std_error;
  rep.pass = std::isfinite(rep.mean) && rep.mean <= rep.bound + 3.0 * rep.std_error;
  return rep;
}

}  // namespace wickfield
