#include "wickfield/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "wickfield/quadrature.hpp"
#include "wickfield/stats.hpp"

namespace wickfield {
namespace {

double combined(std::initializer_list<double> se) {
  double s = 0.0;
  for (double x : se) s += x * x;
  return std::sqrt(s);
}

double tensor_integrate(const Window& box, const std::function<double(const Point&)>& f, double panel, int npp,
                        std::span<const std::vector<double>> extra_breaks = {}) {
  const int d = box.dim();
  std::vector<Rule1D> axes;
  for (int a = 0; a < d; ++a) {
    const Interval iv = box.bounds()[a];
    const int panels = std::max(1, static_cast<int>(std::ceil(iv.length() / panel)));
    std::vector<double> bp;
    for (int i = 0; i <= panels; ++i) bp.push_back(iv.lo + iv.length() * i / panels);
    if (a < static_cast<int>(extra_breaks.size())) {
      for (double b : extra_breaks[a]) {
        if (b > iv.lo && b < iv.hi) bp.push_back(b);
      }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    axes.push_back(composite_gauss_legendre(bp, npp));
  }
  CompensatedSum<double> s;
  std::array<std::size_t, kMaxAmbientDim> idx{};
  while (true) {
    Point p(d);
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      p[a] = axes[a].nodes[idx[a]];
      w *= axes[a].weights[idx[a]];
    }
    s.add(w * f(p));
    int a = d - 1;
    while (a >= 0 && ++idx[a] == axes[a].size()) idx[a--] = 0;
    if (a < 0) break;
  }
  return s.value();
}

void require_bulk(const Window& window, const Point& x, double need, const std::string& what) {
  const double dist = window.distance_to_boundary(x);
  if (dist < need) {
    throw ValidationError(what + ": bulk condition violated (distance to boundary " + std::to_string(dist) +
                          " < " + std::to_string(need) + ")");
  }
}

double poisson_capped_mean(double lambda, int cap) {
  double m = 0.0;
  double below = 0.0;
  for (int k = 0; k < cap; ++k) {
    const double pmf = std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
    m += k * pmf;
    below += pmf;
  }
  return m + cap * std::max(0.0, 1.0 - below);
}

nlohmann::json point_json(const Point& p) { return std::vector<double>(p.begin(), p.end()); }

QuadratureValue free_mixed(const Kernel& k, double intensity, const Point& y1, const Point& y2) {
  const std::array<ComplexPoint, 2> z{wick_embed(y1), wick_embed(y2)};
  const std::array<bool, 2> conj{true, false};
  return poisson_moment(k, intensity, z, conj);
}

}  // namespace

nlohmann::json TestReport::to_json() const {
  return {{"name", name},       {"pass", pass},       {"margin", margin}, {"tolerance", tolerance},
          {"samples", samples}, {"quad_order", quad_order}, {"seed", seed}, {"details", details}};
}

nlohmann::json to_json(std::span<const TestReport> reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) j.push_back(r.to_json());
  return j;
}

bool all_pass(std::span<const TestReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.pass; });
}

double integrate(const TestFunction& h) {
  const auto sup = h.support();
  if (sup.empty()) return 0.0;
  std::vector<std::vector<double>> breaks;
  for (std::size_t a = 0; a < sup.size(); ++a) breaks.push_back(h.breakpoints(static_cast<int>(a)));
  return tensor_integrate(Window::box({sup.begin(), sup.end()}), [&](const Point& x) { return h(x); }, 1.0, 24,
                          breaks);
}

std::vector<double> region_counts(std::span<const Configuration> samples, const Window& region) {
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = static_cast<double>(count_in(samples[i], region));
  return v;
}

std::vector<double> field_values(std::span<const Configuration> samples, const Kernel& k, const Point& x) {
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = field(samples[i], k, x);
  return v;
}

std::vector<double> pairings(std::span<const Configuration> samples, const TestFunction& h) {
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = pair(samples[i], h);
  return v;
}

TestReport agreement_test(const std::string& name, const CorrelationEstimate& estimate, Complex exact,
                          double exact_error) {
  TestReport r;
  r.name = name;
  r.margin = std::abs(estimate.value - exact);
  r.tolerance = 3.0 * estimate.stderr_abs() + exact_error;
  r.pass = std::isfinite(r.margin) && r.margin <= r.tolerance;
  r.samples = estimate.n_samples;
  r.details = {{"estimate", estimate.to_json()},
               {"exact", {{"re", exact.real()}, {"im", exact.imag()}}},
               {"exact_error", exact_error},
               {"z", estimate.stderr_abs() > 0.0 ? r.margin / estimate.stderr_abs() : 0.0}};
  return r;
}

TestReport fkg_test(const std::string& name, std::span<const double> f1, std::span<const double> f2, int batches) {
  const CovarianceEstimate c = covariance(f1, f2, batches);
  TestReport r;
  r.name = name;
  r.margin = c.value;
  r.tolerance = 3.0 * c.std_error;
  r.pass = std::isfinite(c.value) && c.value >= -r.tolerance;
  r.samples = f1.size();
  r.details = {{"covariance", c.value}, {"std_error", c.std_error}};
  return r;
}

TestReport fkg_exact(const SeriesSpec& spec, const PotentialSpec& p, const Window& a, const Window& b) {
  const int d = p.sampling_window().dim();
  const std::vector<SeriesFunctional> fs{count_functional(d, a), count_functional(d, b), count_product_functional(a, b)};
  const auto v = expect_many(spec, gibbs_model(p), fs);
  const double ea = v[0].value.real();
  const double eb = v[1].value.real();
  const double cov = v[2].value.real() - ea * eb;
  const double err = v[2].error() + std::abs(eb) * v[0].error() + std::abs(ea) * v[1].error() + v[0].error() * v[1].error();
  TestReport r;
  r.name = "fkg_exact";
  r.margin = cov;
  r.tolerance = err;
  r.pass = cov > err && err <= 1e-6;
  r.quad_order = spec.quad_nodes;
  r.details = {{"E_A", v[0].to_json()}, {"E_B", v[1].to_json()}, {"E_AB", v[2].to_json()}, {"covariance", cov},
               {"error", err}};
  return r;
}

TestReport dominance_test(const std::string& name, std::span<const double> values, double poisson_mean,
                          bool increasing, int batches) {
  const BatchMeans bm = batch_means(values, batches);
  TestReport r;
  r.name = name;
  r.margin = increasing ? bm.mean - poisson_mean : poisson_mean - bm.mean;
  r.tolerance = 3.0 * bm.std_error;
  r.pass = std::isfinite(bm.mean) && r.margin <= r.tolerance;
  r.samples = values.size();
  r.details = {{"mean", bm.mean}, {"std_error", bm.std_error}, {"poisson_mean", poisson_mean},
               {"increasing", increasing}};
  return r;
}

std::vector<TestReport> dominance_panel(std::span<const Configuration> samples, double rho, double intensity,
                                        std::span<const Window> regions, int cap, const TestFunction& h,
                                        int batches) {
  if (cap < 1) throw ValidationError("dominance_panel: cap must be at least 1");
  std::vector<TestReport> out;
  const double dom = rho * intensity;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    auto counts = region_counts(samples, regions[i]);
    for (double& c : counts) c = std::min(c, static_cast<double>(cap));
    out.push_back(dominance_test("dominance_count_" + std::to_string(i), counts,
                                 poisson_capped_mean(dom * regions[i].volume(), cap), true, batches));
  }
  const auto lin = pairings(samples, h);
  out.push_back(dominance_test("dominance_pairing", lin, dom * integrate(h), true, batches));
  std::vector<double> lap(lin.size());
  for (std::size_t i = 0; i < lin.size(); ++i) lap[i] = std::exp(-lin[i]);
  const auto sup = h.support();
  const QuadratureValue pl = poisson_laplace(h, dom, Window::box({sup.begin(), sup.end()}));
  TestReport r = dominance_test("dominance_laplace", lap, pl.value.real(), false, batches);
  r.tolerance += pl.quad_bound;
  r.pass = std::isfinite(r.margin) && r.margin <= r.tolerance;
  out.push_back(std::move(r));
  return out;
}

TestReport dominance_exact(const SeriesSpec& spec, const PotentialSpec& p) {
  const OracleValue v = expect(spec, p, count_functional(p.sampling_window().dim()));
  const double bound = p.rho() * spec.intensity * spec.window.volume();
  TestReport r;
  r.name = "dominance_exact";
  r.margin = v.value.real() + v.error() - bound;
  r.tolerance = 0.0;
  r.pass = r.margin <= 0.0;
  r.quad_order = spec.quad_nodes;
  r.details = {{"oracle", v.to_json()}, {"bound", bound}};
  return r;
}

TestReport laplace_monotonicity_test(const CorrelationEstimate& at_t1, const CorrelationEstimate& at_t2) {
  TestReport r;
  r.name = "laplace_monotonicity";
  r.margin = at_t2.value.real() - at_t1.value.real();
  r.tolerance = 3.0 * combined({at_t1.stderr_re, at_t2.stderr_re});
  r.pass = std::isfinite(r.margin) && r.margin <= r.tolerance;
  r.samples = at_t1.n_samples + at_t2.n_samples;
  r.details = {{"t1", at_t1.to_json()}, {"t2", at_t2.to_json()}};
  return r;
}

TestReport laplace_monotonicity_exact(const SeriesSpec& spec, const PotentialSpec& p, const TestFunction& h,
                                      double t1, double t2, double digits_tol) {
  if (!(t1 < t2)) throw ValidationError("laplace_monotonicity_exact: need t1 < t2");
  SeriesSpec s1 = spec;
  s1.intensity = t1;
  SeriesSpec s2 = spec;
  s2.intensity = t2;
  const SeriesFunctional f = laplace_functional(h);
  const OracleValue l1 = expect(s1, p, f);
  const OracleValue l2 = expect(s2, p, f);
  TestReport r;
  r.name = "laplace_monotonicity_exact";
  r.margin = l1.value.real() - l2.value.real();
  r.tolerance = l1.error() + l2.error();
  r.pass = r.margin > r.tolerance && l1.error() <= digits_tol && l2.error() <= digits_tol;
  r.quad_order = spec.quad_nodes;
  r.details = {{"t1", t1}, {"t2", t2}, {"L_t1", l1.to_json()}, {"L_t2", l2.to_json()}};
  return r;
}

double finite_volume_bias(const Kernel& k, double rho, const Window& window, const ComplexPoint& z1,
                          const ComplexPoint& z2) {
  if (!window.is_box()) return 0.0;
  const double r = k.decay_radius(1e-8);
  double im = 0.0;
  for (const auto* z : {&z1, &z2}) {
    for (const auto& c : *z) im = std::max(im, std::abs(c.imag()));
  }
  const Window all = window.padded(k.decay_radius(1e-17) + im);
  auto g1 = [&](const Point& x) { return std::abs(k.eval_complex(z1, x)); };
  auto g2 = [&](const Point& x) { return std::abs(k.eval_complex(z2, x)); };
  auto g12 = [&](const Point& x) { return g1(x) * g2(x); };
  const double i1 = tensor_integrate(all, g1, 0.5, 8);
  const double i2 = tensor_integrate(all, g2, 0.5, 8);
  const double i12 = tensor_integrate(all, g12, 0.5, 8);
  double in1 = 0.0;
  double in2 = 0.0;
  double in12 = 0.0;
  bool has_inner = true;
  for (const auto& iv : window.bounds()) has_inner = has_inner && iv.length() > 2.0 * r;
  if (has_inner) {
    const Window inner = window.inset(r);
    in1 = tensor_integrate(inner, g1, 0.5, 8);
    in2 = tensor_integrate(inner, g2, 0.5, 8);
    in12 = tensor_integrate(inner, g12, 0.5, 8);
  }
  const double s1 = std::max(0.0, i1 - in1);
  const double s2 = std::max(0.0, i2 - in2);
  const double s12 = std::max(0.0, i12 - in12);
  return rho * s12 + rho * rho * (s1 * i2 + i1 * s2);
}

TestReport euclidean_invariance_test(std::span<const Configuration> samples, const Kernel& k, const Window& window,
                                     double rho, const Point& x1, const Point& x2, const GroupElement& g,
                                     int batches) {
  if (!g.is_real()) throw ValidationError("euclidean_invariance_test: group element must be real");
  const Point gx1 = g.apply_real(x1);
  const Point gx2 = g.apply_real(x2);
  if (window.is_box()) {
    const double r = k.decay_radius(1e-8);
    const double d1 = distance(x1, gx1);
    const double d2 = distance(x2, gx2);
    require_bulk(window, x1, r + d1, "euclidean_invariance_test");
    require_bulk(window, gx1, r + d1, "euclidean_invariance_test");
    require_bulk(window, x2, r + d2, "euclidean_invariance_test");
    require_bulk(window, gx2, r + d2, "euclidean_invariance_test");
  }
  const MomentQuery a{{complexify(x1), complexify(x2)}, {false, false}};
  const MomentQuery b{{complexify(gx1), complexify(gx2)}, {false, false}};
  const CorrelationEstimate diff = estimate_moment_difference(samples, k, a, b, batches);
  const CorrelationEstimate s2 = estimate_moment(samples, k, a, batches);
  const double bias = finite_volume_bias(k, rho, window, a.points[0], a.points[1]) +
                      finite_volume_bias(k, rho, window, b.points[0], b.points[1]);
  TestReport r;
  r.name = "euclidean_invariance";
  r.margin = std::abs(diff.value);
  r.tolerance = 3.0 * diff.stderr_abs() + bias;
  r.pass = std::isfinite(r.margin) && r.margin <= r.tolerance;
  r.samples = samples.size();
  r.details = {{"difference", diff.to_json()}, {"s2", s2.to_json()},           {"bias_bound", bias},
               {"x1", point_json(x1)},         {"x2", point_json(x2)},         {"gx1", point_json(gx1)},
               {"gx2", point_json(gx2)}};
  return r;
}

TestReport lorentz_invariance_test(std::span<const Configuration> samples, const Kernel& k, const Window& window,
                                   double rho, const Point& y1, const Point& y2, double chi, int batches) {
  const int d = static_cast<int>(y1.size());
  const GroupElement m = boost_as_complex_rotation(chi, d);
  const ComplexPoint z1 = wick_embed(y1);
  const ComplexPoint z2 = wick_embed(y2);
  const ComplexPoint b1 = m.apply(z1);
  const ComplexPoint b2 = m.apply(z2);
  const double consistency =
      std::max(max_abs_diff(b1, wick_embed(minkowski_boost(chi, y1))), max_abs_diff(b2, wick_embed(minkowski_boost(chi, y2))));
  if (consistency > 1e-12) throw NumericalError("lorentz_invariance_test: boost and complex rotation disagree");
  const MomentQuery a{{z1, z2}, {false, false}};
  const MomentQuery b{{b1, b2}, {false, false}};
  a.validate(k);
  b.validate(k);
  if (window.is_box()) {
    const double r = k.decay_radius(1e-8);
    for (const auto& [z, bz] : {std::pair{z1, b1}, std::pair{z2, b2}}) {
      const Point rz = real_part(z);
      const Point rb = real_part(bz);
      const double disp = distance(rz, rb);
      require_bulk(window, rz, r + disp, "lorentz_invariance_test");
      require_bulk(window, rb, r + disp, "lorentz_invariance_test");
    }
  }
  const CorrelationEstimate diff = estimate_moment_difference(samples, k, a, b, batches);
  const CorrelationEstimate tau = estimate_moment(samples, k, a, batches);
  const double bias = finite_volume_bias(k, rho, window, z1, z2) + finite_volume_bias(k, rho, window, b1, b2);
  TestReport r;
  r.name = "lorentz_invariance";
  r.margin = std::abs(diff.value);
  r.tolerance = 3.0 * diff.stderr_abs() + bias;
  r.pass = std::isfinite(r.margin) && r.margin <= r.tolerance;
  r.samples = samples.size();
  r.details = {{"difference", diff.to_json()},
               {"tau2", tau.to_json()},
               {"bias_bound", bias},
               {"resolution", r.tolerance / std::abs(tau.value)},
               {"chi", chi},
               {"y1", point_json(y1)},
               {"y2", point_json(y2)}};
  return r;
}

TestReport lorentz_invariance_exact(const Kernel& k, double intensity, const Point& y1, const Point& y2, double chi,
                                    double tolerance) {
  const std::array<bool, 2> conj{false, false};
  const std::array<ComplexPoint, 2> z{wick_embed(y1), wick_embed(y2)};
  const std::array<ComplexPoint, 2> bz{wick_embed(minkowski_boost(chi, y1)), wick_embed(minkowski_boost(chi, y2))};
  const QuadratureValue q = poisson_moment(k, intensity, z, conj);
  const QuadratureValue qb = poisson_moment(k, intensity, bz, conj);
  TestReport r;
  r.name = "lorentz_invariance_exact";
  r.margin = std::abs(q.value - qb.value);
  r.tolerance = tolerance;
  r.pass = std::isfinite(r.margin) && r.margin < tolerance;
  r.details = {{"tau2", q.to_json()}, {"tau2_boosted", qb.to_json()}, {"chi", chi}};
  return r;
}

Point relocate_first_argument(double chi, const Point& y) {
  return minkowski_time_reflection(minkowski_boost(-chi, minkowski_time_reflection(minkowski_boost(chi, y))));
}

TestReport mixed_noninvariance_exact(const Kernel& k, double intensity, const Point& y1, const Point& y2, double chi,
                                     double identity_tol) {
  const QuadratureValue q = free_mixed(k, intensity, y1, y2);
  const QuadratureValue qb = free_mixed(k, intensity, minkowski_boost(chi, y1), minkowski_boost(chi, y2));
  const QuadratureValue qr = free_mixed(k, intensity, relocate_first_argument(chi, y1), y2);
  const double diff = std::abs(qb.value - q.value);
  const double bound = q.quad_bound + qb.quad_bound;
  const double identity = std::abs(qb.value - qr.value);
  TestReport r;
  r.name = "mixed_noninvariance_exact";
  r.margin = diff;
  r.tolerance = 5.0 * bound;
  r.pass = diff > r.tolerance && identity <= identity_tol;
  r.details = {{"Q", q.to_json()},
               {"Q_boosted", qb.to_json()},
               {"Q_relocated", qr.to_json()},
               {"identity_residual", identity},
               {"identity_tol", identity_tol},
               {"chi", chi}};
  return r;
}

TestReport mixed_null_control(const Kernel& k, double intensity, const Point& y1, const Point& y2, double chi) {
  const QuadratureValue q = free_mixed(k, intensity, y1, y2);
  const QuadratureValue qb = free_mixed(k, intensity, minkowski_boost(chi, y1), minkowski_boost(chi, y2));
  TestReport r;
  r.name = "mixed_null_control";
  r.margin = std::abs(qb.value - q.value);
  r.tolerance = q.quad_bound + qb.quad_bound;
  r.pass = r.margin <= r.tolerance;
  r.details = {{"Q", q.to_json()}, {"Q_boosted", qb.to_json()}, {"chi", chi}};
  return r;
}

TestReport mixed_noninvariance_test(std::span<const Configuration> samples, const Kernel& k, const Point& y1,
                                    const Point& y2, double chi, int batches) {
  const MomentQuery q{{wick_embed(y1), wick_embed(y2)}, {true, false}};
  const MomentQuery qb{{wick_embed(minkowski_boost(chi, y1)), wick_embed(minkowski_boost(chi, y2))}, {true, false}};
  const MomentQuery qr{{wick_embed(relocate_first_argument(chi, y1)), wick_embed(y2)}, {true, false}};
  const CorrelationEstimate diff = estimate_moment_difference(samples, k, qb, q, batches);
  const CorrelationEstimate ident = estimate_moment_difference(samples, k, qb, qr, batches);
  TestReport r;
  r.name = "mixed_noninvariance";
  r.margin = std::abs(diff.value);
  r.tolerance = 5.0 * diff.stderr_abs();
  r.pass = r.margin > r.tolerance && std::abs(ident.value) <= 3.0 * ident.stderr_abs();
  r.samples = samples.size();
  r.details = {{"difference", diff.to_json()}, {"identity", ident.to_json()}, {"chi", chi}};
  return r;
}

nlohmann::json WindowObservation::to_json() const {
  return {{"size", size}, {"density", density.to_json()}, {"laplace", laplace.to_json()}, {"s2", s2.to_json()}};
}

WindowObservation observe_window(std::span<const Configuration> samples, const Kernel& k, const Window& window,
                                 const TestFunction& h, const Point& x1, const Point& x2, int batches) {
  if (!window.is_box()) throw ValidationError("observe_window: box windows only");
  WindowObservation o;
  const Point c = window.center();
  std::vector<Interval> unit;
  double size = 0.0;
  for (int a = 0; a < window.dim(); ++a) {
    unit.push_back({c[a] - 0.5, c[a] + 0.5});
    size = std::max(size, window.bounds()[a].length());
  }
  o.size = size;
  const auto counts = region_counts(samples, Window::box(unit));
  o.density = estimate_from_values(counts, batches);
  o.laplace = estimate_laplace(samples, h, batches);
  o.s2 = estimate_moment(samples, k, MomentQuery{{complexify(x1), complexify(x2)}, {false, false}}, batches);
  return o;
}

TestReport window_growth_study(std::span<const WindowObservation> obs) {
  if (obs.size() < 3) throw ValidationError("window_growth_study: need at least three window sizes");
  for (std::size_t i = 1; i < obs.size(); ++i) {
    if (!(obs[i].size > obs[i - 1].size)) throw ValidationError("window_growth_study: sizes must increase");
  }
  TestReport r;
  r.name = "window_growth";
  double worst = -std::numeric_limits<double>::infinity();
  nlohmann::json flags = nlohmann::json::array();
  for (std::size_t i = 1; i < obs.size(); ++i) {
    const double up = obs[i].laplace.value.real() - obs[i - 1].laplace.value.real();
    const double tol = 3.0 * combined({obs[i].laplace.stderr_re, obs[i - 1].laplace.stderr_re});
    worst = std::max(worst, up - tol);
    if (up > tol) flags.push_back({{"kind", "laplace_increase"}, {"at", obs[i].size}, {"excess", up - tol}});
  }
  using Getter = std::function<const CorrelationEstimate&(const WindowObservation&)>;
  const std::array<std::pair<const char*, Getter>, 3> panel{
      std::pair<const char*, Getter>{"density", [](const WindowObservation& o) -> const CorrelationEstimate& { return o.density; }},
      std::pair<const char*, Getter>{"laplace", [](const WindowObservation& o) -> const CorrelationEstimate& { return o.laplace; }},
      std::pair<const char*, Getter>{"s2", [](const WindowObservation& o) -> const CorrelationEstimate& { return o.s2; }}};
  for (const auto& [label, get] : panel) {
    for (std::size_t i = 2; i < obs.size(); ++i) {
      const auto& a = get(obs[i - 2]);
      const auto& b = get(obs[i - 1]);
      const auto& c = get(obs[i]);
      const double later = std::abs(c.value - b.value);
      const double earlier = std::abs(b.value - a.value);
      const double tol = 3.0 * combined({a.stderr_abs(), b.stderr_abs(), c.stderr_abs()});
      worst = std::max(worst, later - earlier - tol);
      if (later > earlier + tol) {
        flags.push_back({{"kind", "difference_growth"}, {"observable", label}, {"at", obs[i].size},
                         {"excess", later - earlier - tol}});
      }
    }
  }
  r.margin = worst;
  r.tolerance = 0.0;
  r.pass = flags.empty();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& o : obs) {
    rows.push_back(o.to_json());
    r.samples += o.laplace.n_samples;
  }
  r.details = {{"observations", rows}, {"flags", flags}};
  return r;
}

TestReport reality_test(const std::string& name, const CorrelationEstimate& e, int n, double tau_q) {
  TestReport r;
  r.name = name;
  r.margin = std::abs(e.value.imag());
  r.tolerance = 3.0 * e.stderr_im + n * tau_q;
  r.pass = std::isfinite(r.margin) && r.margin <= r.tolerance;
  r.samples = e.n_samples;
  r.details = {{"estimate", e.to_json()}};
  return r;
}

TestReport holomorphy_test(const Configuration& eta, const Kernel& k, const ComplexPoint& z, int axis, double r,
                           int nodes) {
  if (axis < 0 || axis >= z.size()) throw ValidationError("holomorphy_test: axis out of range");
  CompensatedSum<Complex> s;
  for (int j = 0; j < nodes; ++j) {
    ComplexPoint w = z;
    w[axis] += std::polar(r, 2.0 * std::numbers::pi * j / nodes);
    s.add(field_complex(eta, k, w));
  }
  const Complex mean = s.value() / static_cast<double>(nodes);
  const Complex center = field_complex(eta, k, z);
  double mass = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) mass += std::abs(eta.charge(j));
  TestReport t;
  t.name = "holomorphy";
  t.margin = std::abs(mean - center);
  t.tolerance = 10.0 * k.quad_tol() * std::max(1.0, mass) + 1e-12 * std::max(1.0, std::abs(center));
  t.pass = std::isfinite(t.margin) && t.margin <= t.tolerance;
  t.quad_order = nodes;
  t.details = {{"center", {{"re", center.real()}, {"im", center.imag()}}}, {"radius", r}, {"axis", axis}};
  return t;
}

std::vector<TestReport> poisson_null_suite(std::span<const Configuration> samples, const Kernel& k,
                                           const Window& window, double intensity, const TestFunction& h,
                                           const Point& x1, const Point& x2, int batches) {
  if (!window.is_box()) throw ValidationError("poisson_null_suite: box windows only");
  const double mass = intensity * window.volume();
  std::vector<double> n(samples.size());
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    n[i] = static_cast<double>(samples[i].size());
    sq[i] = (n[i] - mass) * (n[i] - mass);
  }
  std::vector<TestReport> out;
  out.push_back(agreement_test("null_count_mean", estimate_from_values(n, batches), mass, 0.0));
  out.push_back(agreement_test("null_count_variance", estimate_from_values(sq, batches), mass, 0.0));
  const QuadratureValue lap = poisson_laplace(h, intensity, window);
  out.push_back(agreement_test("null_laplace", estimate_laplace(samples, h, batches), lap.value, lap.quad_bound));
  const std::array<ComplexPoint, 2> z{complexify(x1), complexify(x2)};
  const std::array<bool, 2> conj{false, false};
  const QuadratureValue s1 = poisson_moment(k, intensity, std::span(z).first(1), std::span(conj).first(1), window);
  out.push_back(agreement_test("null_campbell_first",
                               estimate_moment(samples, k, MomentQuery{{z[0]}, {false}}, batches), s1.value,
                               s1.quad_bound));
  const QuadratureValue s2 = poisson_moment(k, intensity, z, conj, window);
  out.push_back(agreement_test("null_campbell_second",
                               estimate_moment(samples, k, MomentQuery{{z[0], z[1]}, {false, false}}, batches),
                               s2.value, s2.quad_bound));
  return out;
}

}  // namespace wickfield
