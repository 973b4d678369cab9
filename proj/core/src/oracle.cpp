#include "wickfield/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "wickfield/quadrature.hpp"

namespace wickfield {

namespace {

constexpr double kRoundingUlps = 100.0 * std::numeric_limits<double>::epsilon();

struct PointRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

PointRule point_rule(const Window& w, int q, const std::vector<std::vector<double>>& extra) {
  const int d = w.dim();
  std::vector<Rule1D> axes;
  for (int k = 0; k < d; ++k) {
    const Interval iv = w.bounds()[k];
    std::vector<double> bp{iv.lo, iv.hi};
    if (k < static_cast<int>(extra.size())) {
      for (double b : extra[k]) {
        if (b > iv.lo && b < iv.hi) bp.push_back(b);
      }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    const int panels = static_cast<int>(bp.size()) - 1;
    const int npp = std::max(1, (q + panels - 1) / panels);
    axes.push_back(composite_gauss_legendre(bp, npp));
  }
  PointRule r;
  std::array<std::size_t, kMaxAmbientDim> idx{};
  while (true) {
    Point p(d);
    double wt = 1.0;
    for (int k = 0; k < d; ++k) {
      p[k] = axes[k].nodes[idx[k]];
      wt *= axes[k].weights[idx[k]];
    }
    r.nodes.push_back(p);
    r.weights.push_back(wt);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == axes[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return r;
}

double multiset_count(double q, int n) {
  double c = 1.0;
  for (int i = 1; i <= n; ++i) c *= (q + i - 1.0) / i;
  return c;
}

// Sums of one truncated series evaluated with one family of per-point rules.
struct SeriesSums {
  CompensatedSum<double> z;
  double z_abs = 0.0;
  std::vector<CompensatedSum<Complex>> a;
  std::vector<double> a_abs;
  long multisets = 0;
};

class Enumerator {
 public:
  Enumerator(const SeriesModel& model, std::span<const SeriesFunctional> fs, const PointRule& rule, double intensity,
             int n, SeriesSums& out)
      : model_(model), fs_(fs), n_(n), out_(out) {
    const std::size_t q = rule.nodes.size();
    offsets_.push_back(0);
    for (const auto& f : fs_) offsets_.push_back(offsets_.back() + f.features);
    nf_ = offsets_.back();
    cols_.assign(q * model.state_size, 0.0);
    feats_.assign(q * nf_, Complex(0.0));
    w_.resize(q);
    for (std::size_t i = 0; i < q; ++i) {
      model.column(rule.nodes[i], std::span<double>(&cols_[i * model.state_size], model.state_size));
      for (std::size_t j = 0; j < fs_.size(); ++j) {
        fs_[j].feature(rule.nodes[i], std::span<Complex>(&feats_[i * nf_ + offsets_[j]], fs_[j].features));
      }
      w_[i] = rule.weights[i] * intensity;
    }
    states_.assign((n + 1) * model.state_size, 0.0);
    sums_.assign((n + 1) * nf_, Complex(0.0));
  }

  void run() { descend(0, 0, 1.0, 0); }

 private:
  void descend(int depth, std::size_t start, double wt, int run_length) {
    if (depth == n_) {
      leaf(wt);
      return;
    }
    const std::size_t s = model_.state_size;
    const std::size_t q = w_.size();
    const double* st = &states_[depth * s];
    double* next = &states_[(depth + 1) * s];
    const Complex* su = &sums_[depth * nf_];
    Complex* nsu = &sums_[(depth + 1) * nf_];
    for (std::size_t i = start; i < q; ++i) {
      const int mult = (depth > 0 && i == start) ? run_length + 1 : 1;
      const double* col = &cols_[i * s];
      for (std::size_t k = 0; k < s; ++k) next[k] = st[k] + col[k];
      const Complex* fe = &feats_[i * nf_];
      for (std::size_t k = 0; k < nf_; ++k) nsu[k] = su[k] + fe[k];
      descend(depth + 1, i, wt * w_[i] / mult, mult);
    }
  }

  void leaf(double wt) {
    ++out_.multisets;
    const double f = model_.weight(std::span<const double>(&states_[n_ * model_.state_size], model_.state_size),
                                   static_cast<std::size_t>(n_));
    const double g = wt * f;
    out_.z.add(g);
    out_.z_abs += std::abs(g);
    const Complex* su = &sums_[n_ * nf_];
    for (std::size_t j = 0; j < fs_.size(); ++j) {
      const Complex v =
          fs_[j].value(std::span<const Complex>(su + offsets_[j], fs_[j].features), static_cast<std::size_t>(n_));
      out_.a[j].add(g * v);
      out_.a_abs[j] += std::abs(g * v);
    }
  }

  const SeriesModel& model_;
  std::span<const SeriesFunctional> fs_;
  int n_;
  SeriesSums& out_;
  std::vector<std::size_t> offsets_;
  std::size_t nf_ = 0;
  std::vector<double> cols_;
  std::vector<Complex> feats_;
  std::vector<double> w_;
  std::vector<double> states_;
  std::vector<Complex> sums_;
};

std::vector<std::vector<double>> merged_breakpoints(std::span<const SeriesFunctional> fs, int d) {
  std::vector<std::vector<double>> bp(d);
  for (const auto& f : fs) {
    for (int k = 0; k < d && k < static_cast<int>(f.breakpoints.size()); ++k) {
      bp[k].insert(bp[k].end(), f.breakpoints[k].begin(), f.breakpoints[k].end());
    }
  }
  return bp;
}

SeriesSums run_series(const SeriesSpec& spec, const SeriesModel& model, std::span<const SeriesFunctional> fs,
                      bool coarse) {
  SeriesSums sums;
  sums.a.resize(fs.size());
  sums.a_abs.assign(fs.size(), 0.0);
  const int d = spec.window.dim();
  const auto bp = merged_breakpoints(fs, d);
  for (int n = 0; n <= spec.nmax; ++n) {
    SeriesSums term;
    term.a.resize(fs.size());
    term.a_abs.assign(fs.size(), 0.0);
    int q = nodes_for_order(spec, n, d);
    if (coarse) q = std::max(1, q - std::max(1, q / 4));
    const PointRule rule = point_rule(spec.window, n == 0 ? 1 : q, bp);
    Enumerator(model, fs, rule, spec.intensity, n, term).run();
    sums.z.add(term.z.value());
    sums.z_abs += term.z_abs;
    for (std::size_t j = 0; j < fs.size(); ++j) {
      sums.a[j].add(term.a[j].value());
      sums.a_abs[j] += term.a_abs[j];
    }
    sums.multisets += term.multisets;
  }
  return sums;
}

double partial_poisson_moment(double m, int degree, int nmax) {
  double s = 0.0;
  double term = 1.0;  // m^n / n!
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) term *= m / n;
    s += std::pow(static_cast<double>(n), degree) * term;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

SeriesFunctional constant_functional() {
  SeriesFunctional f;
  f.name = "one";
  f.features = 0;
  f.feature = [](const Point&, std::span<Complex>) {};
  f.value = [](std::span<const Complex>, std::size_t) { return Complex(1.0); };
  return f;
}

SeriesFunctional count_functional(int dim, std::optional<Window> region) {
  SeriesFunctional f;
  f.name = "count";
  f.features = 1;
  if (region) {
    if (region->dim() != dim) throw ValidationError("count functional: region dimension mismatch");
    f.feature = [r = *region](const Point& x, std::span<Complex> out) { out[0] = r.contains(x) ? 1.0 : 0.0; };
    f.breakpoints.resize(dim);
    for (int k = 0; k < dim; ++k) f.breakpoints[k] = {region->bounds()[k].lo, region->bounds()[k].hi};
  } else {
    f.feature = [](const Point&, std::span<Complex> out) { out[0] = 1.0; };
  }
  f.value = [](std::span<const Complex> s, std::size_t) { return s[0]; };
  f.growth = {1.0, 1};
  return f;
}

SeriesFunctional count_product_functional(const Window& a, const Window& b) {
  SeriesFunctional f;
  f.name = "count_product";
  f.features = 2;
  f.feature = [a, b](const Point& x, std::span<Complex> out) {
    out[0] = a.contains(x) ? 1.0 : 0.0;
    out[1] = b.contains(x) ? 1.0 : 0.0;
  };
  f.value = [](std::span<const Complex> s, std::size_t) { return s[0] * s[1]; };
  f.growth = {1.0, 2};
  f.breakpoints.resize(a.dim());
  for (int k = 0; k < a.dim(); ++k) {
    f.breakpoints[k] = {a.bounds()[k].lo, a.bounds()[k].hi, b.bounds()[k].lo, b.bounds()[k].hi};
  }
  return f;
}

SeriesFunctional laplace_functional(const TestFunction& h) {
  SeriesFunctional f;
  f.name = "laplace";
  f.features = 1;
  f.feature = [h](const Point& x, std::span<Complex> out) { out[0] = h(x); };
  f.value = [](std::span<const Complex> s, std::size_t) { return Complex(std::exp(-s[0].real())); };
  f.growth = {1.0, 0};
  const int d = static_cast<int>(h.support().size());
  f.breakpoints.resize(d);
  for (int k = 0; k < d; ++k) f.breakpoints[k] = h.breakpoints(k);
  return f;
}

SeriesFunctional moment_functional(const Kernel& k, std::span<const ComplexPoint> points,
                                   std::span<const bool> conj_flags) {
  if (points.size() != conj_flags.size()) throw ValidationError("moment functional: points and conj flags differ in length");
  SeriesFunctional f;
  f.name = "moment";
  f.features = static_cast<int>(points.size());
  std::vector<ComplexPoint> z(points.begin(), points.end());
  std::vector<bool> c(conj_flags.begin(), conj_flags.end());
  double kappa = 1.0;
  for (const auto& p : z) kappa *= k.sup_abs(p);
  f.feature = [k, z, c](const Point& x, std::span<Complex> out) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      const Complex g = k.eval_complex(z[j], x);
      out[j] = c[j] ? std::conj(g) : g;
    }
  };
  f.value = [](std::span<const Complex> s, std::size_t) {
    Complex p = 1.0;
    for (const auto& v : s) p *= v;
    return p;
  };
  f.growth = {kappa, static_cast<int>(points.size())};
  return f;
}

SeriesModel gibbs_model(const PotentialSpec& p) {
  SeriesModel m;
  m.name = "gibbs";
  m.state_size = p.grid().size();
  m.column = [p](const Point& x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const Stencil st = p.stencil(x);
    for (std::size_t i = 0; i < st.index.size(); ++i) out[st.index[i]] += st.value[i];
  };
  m.weight = [p](std::span<const double> phi, std::size_t n) {
    if (n == 0 || p.beta() == 0.0) return 1.0;
    return std::exp(-p.beta() * p.potential_from_field(phi));
  };
  // every profile is non-negative on non-negative fields, so U >= 0 and f <= 1
  m.xi = 1.0;
  return m;
}

SeriesModel two_species_model(const Kernel& k, const Window& second_window, std::span<const Profile::Charge> charges,
                              double beta, int inner_nodes) {
  if (k.kind() != Kernel::Kind::Gaussian) throw ValidationError("two-species model: needs a Gaussian kernel");
  if (charges.empty()) throw ValidationError("two-species model: empty charge distribution");
  const QuadratureGrid inner = QuadratureGrid::gauss_legendre(second_window, inner_nodes);
  std::vector<Point> nodes(inner.nodes().begin(), inner.nodes().end());
  std::vector<double> weights(inner.weights().begin(), inner.weights().end());
  std::vector<Profile::Charge> ch(charges.begin(), charges.end());
  double mass = 0.0;
  for (const auto& c : ch) mass += c.w;
  const double total = mass * second_window.volume();
  // e^{-R} sum_{j > J} R^j / j! below 1e-16
  int jmax = 0;
  double tail = 1.0;
  while (true) {
    tail = series_tail(total, Growth{std::exp(-total), 0}, jmax);
    if (tail <= 1e-16) break;
    ++jmax;
  }
  SeriesModel m;
  m.name = "two_species";
  m.state_size = nodes.size();
  m.column = [k, nodes](const Point& y, std::span<double> out) {
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = k.self_convolve(y, nodes[i]);
  };
  m.weight = [weights, ch, beta, total, jmax](std::span<const double> phi, std::size_t) {
    double inner_sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      double s = 0.0;
      for (const auto& c : ch) s += c.w * std::exp(-beta * c.s * phi[i]);
      inner_sum += weights[i] * s;
    }
    double term = std::exp(-total);
    double sum = term;
    for (int j = 1; j <= jmax; ++j) {
      term *= inner_sum / j;
      sum += term;
    }
    return sum;
  };
  m.xi = 1.0;
  m.weight_error = tail;
  return m;
}

// ---------------------------------------------------------------------------

void SeriesSpec::validate() const {
  if (!window.is_box()) throw ValidationError("oracle: window must be a box");
  if (!(intensity > 0.0)) throw ValidationError("oracle.intensity: must be positive");
  if (nmax < 0) throw ValidationError("oracle.nmax: must be non-negative");
  if (quad_nodes < 1) throw ValidationError("oracle.quad_nodes: must be positive");
  if (multiset_budget < 1) throw ValidationError("oracle.multiset_budget: must be positive");
  if (!(tail_tol > 0.0)) throw ValidationError("oracle.tail_tol: must be positive");
}

nlohmann::json SeriesSpec::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& iv : window.bounds()) w.push_back({iv.lo, iv.hi});
  return {{"window", w},          {"intensity", intensity},         {"nmax", nmax},
          {"quad_nodes", quad_nodes}, {"multiset_budget", multiset_budget}, {"tail_tol", tail_tol}};
}

nlohmann::json OracleValue::to_json() const {
  return {{"value", {{"re", value.real()}, {"im", value.imag()}}},
          {"tail_bound", tail_bound},
          {"quad_bound", quad_bound},
          {"rounding_bound", rounding_bound},
          {"nmax", nmax},
          {"multisets", multisets}};
}

double series_tail(double m, Growth g, int nmax) {
  if (m == 0.0) return 0.0;
  // term_n = n^k m^n / n!, summed from nmax + 1 until negligible
  double log_term = 0.0;
  for (int n = 1; n <= nmax + 1; ++n) log_term += std::log(m) - std::log(static_cast<double>(n));
  double s = 0.0;
  for (int n = nmax + 1;; ++n) {
    if (n > nmax + 1) log_term += std::log(m) - std::log(static_cast<double>(n));
    const double t = std::exp(log_term + g.degree * std::log(static_cast<double>(n)));
    s += t;
    if (n > 2.0 * m + g.degree + 10 && t < 1e-18 * s) break;
    if (n > nmax + 100000) break;
  }
  return g.kappa * s;
}

int required_nmax(double m, Growth g, double tol) {
  int n = 0;
  while (series_tail(m, g, n) > tol) ++n;
  return n;
}

int nodes_for_order(const SeriesSpec& spec, int n, int dim) {
  if (n == 0) return 1;
  int q = spec.quad_nodes;
  while (q > 2 && multiset_count(std::pow(static_cast<double>(q), dim), n) > static_cast<double>(spec.multiset_budget)) {
    --q;
  }
  return q;
}

std::vector<OracleValue> expect_many(const SeriesSpec& spec, const SeriesModel& model,
                                     std::span<const SeriesFunctional> fs) {
  spec.validate();
  const double m = spec.intensity * spec.window.volume() * model.xi;
  for (const auto& f : fs) {
    const double tail = series_tail(m, f.growth, spec.nmax);
    if (tail > spec.tail_tol) {
      throw ValidationError("oracle: tail bound " + std::to_string(tail) + " for '" + f.name + "' exceeds tail_tol " +
                            std::to_string(spec.tail_tol) + "; nmax " +
                            std::to_string(required_nmax(m, f.growth, spec.tail_tol)) + " required");
    }
  }
  const SeriesSums fine = run_series(spec, model, fs, false);
  const SeriesSums coarse = run_series(spec, model, fs, true);
  const double zf = fine.z.value();
  const double zc = coarse.z.value();
  const double tail_z = series_tail(m, Growth{1.0, 0}, spec.nmax);
  const double mass = spec.intensity * spec.window.volume();
  std::vector<OracleValue> out;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    OracleValue v;
    v.nmax = spec.nmax;
    v.multisets = fine.multisets;
    v.value = fine.a[j].value() / zf;
    const Complex vc = coarse.a[j].value() / zc;
    const double abs_e = std::abs(v.value);
    const double tail_f = series_tail(m, fs[j].growth, spec.nmax);
    // inner truncation of the weight perturbs every term by at most weight_error
    const double werr_a = model.weight_error * fs[j].growth.kappa * partial_poisson_moment(mass, fs[j].growth.degree, spec.nmax);
    const double werr_z = model.weight_error * partial_poisson_moment(mass, 0, spec.nmax);
    v.tail_bound = (tail_f + abs_e * tail_z + werr_a + abs_e * werr_z) / zf;
    v.quad_bound = std::abs(v.value - vc);
    v.rounding_bound = kRoundingUlps * (fine.a_abs[j] + abs_e * fine.z_abs) / zf;
    out.push_back(v);
  }
  return out;
}

OracleValue expect(const SeriesSpec& spec, const SeriesModel& model, const SeriesFunctional& f) {
  return expect_many(spec, model, std::span<const SeriesFunctional>(&f, 1)).front();
}

OracleValue expect(const SeriesSpec& spec, const PotentialSpec& p, const SeriesFunctional& f) {
  return expect(spec, gibbs_model(p), f);
}

OracleValue moment_exact(const SeriesSpec& spec, const PotentialSpec& p, std::span<const ComplexPoint> points,
                         std::span<const bool> conj_flags) {
  if (points.empty()) {
    OracleValue v;
    v.value = 1.0;
    v.nmax = spec.nmax;
    return v;
  }
  return expect(spec, p, moment_functional(p.kernel(), points, conj_flags));
}

// ---------------------------------------------------------------------------

nlohmann::json QuadratureValue::to_json() const {
  return {{"value", {{"re", value.real()}, {"im", value.imag()}}}, {"quad_bound", quad_bound}};
}

namespace {

struct NodeSet {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

NodeSet box_nodes(const Window& box, double panel_width, int npp) {
  std::vector<Rule1D> axes;
  for (const auto& iv : box.bounds()) {
    const int panels = std::max(1, static_cast<int>(std::ceil(iv.length() / panel_width)));
    axes.push_back(composite_gauss_legendre(iv.lo, iv.hi, panels, npp));
  }
  NodeSet s;
  const int d = box.dim();
  std::array<std::size_t, kMaxAmbientDim> idx{};
  while (true) {
    Point p(d);
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      p[k] = axes[k].nodes[idx[k]];
      w *= axes[k].weights[idx[k]];
    }
    s.nodes.push_back(p);
    s.weights.push_back(w);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == axes[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return s;
}

Complex partition_sum(unsigned mask, const std::vector<Complex>& block, std::vector<Complex>& memo,
                      std::vector<bool>& known) {
  if (mask == 0) return 1.0;
  if (known[mask]) return memo[mask];
  const unsigned low = mask & (~mask + 1u);
  const unsigned rest = mask ^ low;
  Complex total = 0.0;
  // blocks containing the lowest element: low | sub for every sub of rest
  for (unsigned sub = rest;; sub = (sub - 1) & rest) {
    total += block[low | sub] * partition_sum(rest ^ sub, block, memo, known);
    if (sub == 0) break;
  }
  known[mask] = true;
  memo[mask] = total;
  return total;
}

Complex campbell(const Kernel& k, double intensity, std::span<const ComplexPoint> z, std::span<const bool> conj,
                 const NodeSet& ns) {
  const std::size_t n = z.size();
  const unsigned full = (1u << n) - 1u;
  std::vector<CompensatedSum<Complex>> block(full + 1);
  std::vector<Complex> g(n);
  std::vector<Complex> prod(full + 1);
  for (std::size_t i = 0; i < ns.nodes.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = k.eval_complex(z[j], ns.nodes[i]);
      g[j] = conj[j] ? std::conj(v) : v;
    }
    prod[0] = 1.0;
    for (unsigned mask = 1; mask <= full; ++mask) {
      const unsigned low = mask & (~mask + 1u);
      const int j = std::countr_zero(low);
      prod[mask] = prod[mask ^ low] * g[j];
      block[mask].add(ns.weights[i] * intensity * prod[mask]);
    }
  }
  std::vector<Complex> b(full + 1);
  for (unsigned mask = 1; mask <= full; ++mask) b[mask] = block[mask].value();
  std::vector<Complex> memo(full + 1);
  std::vector<bool> known(full + 1, false);
  return partition_sum(full, b, memo, known);
}

}  // namespace

QuadratureValue poisson_moment(const Kernel& k, double intensity, std::span<const ComplexPoint> points,
                               std::span<const bool> conj_flags, std::optional<Window> region) {
  if (points.size() != conj_flags.size()) throw ValidationError("poisson_moment: points and conj flags differ in length");
  if (points.size() > 16) throw ValidationError("poisson_moment: at most 16 points");
  if (points.empty()) return {Complex(1.0), 0.0};
  for (const auto& z : points) {
    if (z.size() != k.ambient_dim()) throw ValidationError("poisson_moment: dimension mismatch");
  }
  NodeSet fine;
  NodeSet coarse;
  if (k.space().is_sphere()) {
    const QuadratureGrid gf = QuadratureGrid::sphere(k.space(), 0.05);
    const QuadratureGrid gc = QuadratureGrid::sphere(k.space(), 0.075);
    fine = {{gf.nodes().begin(), gf.nodes().end()}, {gf.weights().begin(), gf.weights().end()}};
    coarse = {{gc.nodes().begin(), gc.nodes().end()}, {gc.weights().begin(), gc.weights().end()}};
  } else {
    std::optional<Window> box = region;
    if (!box) {
      double bound = 1.0;
      for (const auto& z : points) bound *= std::max(1.0, k.sup_abs(z));
      const double r = k.decay_radius(1e-17 / bound);
      std::vector<Interval> iv;
      for (int a = 0; a < k.space().dim; ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& z : points) {
          lo = std::min(lo, z[a].real());
          hi = std::max(hi, z[a].real());
        }
        iv.push_back({lo - r, hi + r});
      }
      box = Window::box(iv);
    }
    fine = box_nodes(*box, 0.5, 16);
    coarse = box_nodes(*box, 0.5, 12);
  }
  QuadratureValue v;
  v.value = campbell(k, intensity, points, conj_flags, fine);
  v.quad_bound = std::abs(v.value - campbell(k, intensity, points, conj_flags, coarse)) +
                 kRoundingUlps * std::abs(v.value);
  return v;
}

QuadratureValue poisson_laplace(const TestFunction& h, double intensity, const Window& box) {
  auto integral = [&](int npp) {
    const int d = box.dim();
    std::vector<Rule1D> axes;
    for (int a = 0; a < d; ++a) {
      std::vector<double> bp{box.bounds()[a].lo, box.bounds()[a].hi};
      for (double b : h.breakpoints(a)) {
        if (b > bp[0] && b < bp[1]) bp.push_back(b);
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
      s.add(w * std::expm1(-h(p)));
      int a = d - 1;
      while (a >= 0 && ++idx[a] == axes[a].size()) idx[a--] = 0;
      if (a < 0) break;
    }
    return s.value() * intensity;
  };
  const double fine = integral(24);
  const double coarse = integral(16);
  QuadratureValue v;
  v.value = std::exp(fine);
  v.quad_bound = std::abs(std::exp(fine) - std::exp(coarse)) + kRoundingUlps;
  return v;
}

// ---------------------------------------------------------------------------

bool ProjectionReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ProjectionCheck& c) { return c.pass; });
}

nlohmann::json ProjectionReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"functional", c.functional},
                   {"coupled", c.coupled.to_json()},
                   {"projected", c.projected.to_json()},
                   {"difference", std::abs(c.coupled.value - c.projected.value)},
                   {"allowed", c.coupled.error() + c.projected.error()},
                   {"pass", c.pass}});
  }
  return {{"pass", pass()}, {"checks", arr}};
}

ProjectionReport two_species_projection_check(const SeriesSpec& spec, const Kernel& k,
                                              std::span<const Profile::Charge> charges, double beta,
                                              const TestFunction& h) {
  spec.validate();
  const auto g1 = k.self_convolved();
  if (!g1) throw ValidationError("projection check: needs a kernel with closed-form self-convolution");
  const SeriesModel coupled = two_species_model(k, spec.window, charges, beta, 24);
  std::vector<Profile::Charge> ch(charges.begin(), charges.end());
  const PotentialSpec projected(Profile::charge_mix(ch, beta), beta, *g1, spec.window,
                                QuadratureGrid::gauss_legendre(spec.window, 20));
  const Point center = spec.window.center();
  const ComplexPoint zc = complexify(center);
  const bool no_conj[] = {false};
  const std::vector<SeriesFunctional> fs{count_functional(spec.window.dim()), laplace_functional(h),
                                         moment_functional(k, std::span<const ComplexPoint>(&zc, 1), no_conj)};
  const auto a = expect_many(spec, coupled, fs);
  const auto b = expect_many(spec, gibbs_model(projected), fs);
  ProjectionReport rep;
  const char* names[] = {"count", "laplace", "field_at_center"};
  for (std::size_t j = 0; j < fs.size(); ++j) {
    ProjectionCheck c{names[j], a[j], b[j], false};
    c.pass = std::abs(a[j].value - b[j].value) <= a[j].error() + b[j].error();
    rep.checks.push_back(c);
  }
  return rep;
}

double pair_energy_quadrature(const Kernel& k, const Configuration& eta, const Configuration& gamma) {
  if (k.space().is_sphere()) throw ValidationError("pair energy: Euclidean kernels only");
  if (eta.empty() || gamma.empty()) return 0.0;
  const int d = k.space().dim;
  const double r = k.decay_radius(1e-18);
  std::vector<Interval> iv(d, Interval{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const Configuration* c : {&eta, &gamma}) {
    for (const auto& x : c->points()) {
      for (int a = 0; a < d; ++a) {
        iv[a].lo = std::min(iv[a].lo, x[a] - r);
        iv[a].hi = std::max(iv[a].hi, x[a] + r);
      }
    }
  }
  const NodeSet ns = box_nodes(Window::box(iv), 0.5, 16);
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < ns.nodes.size(); ++i) {
    double fe = 0.0;
    double fg = 0.0;
    for (std::size_t j = 0; j < eta.size(); ++j) fe += eta.charge(j) * k.eval(ns.nodes[i], eta.point(j));
    for (std::size_t j = 0; j < gamma.size(); ++j) fg += gamma.charge(j) * k.eval(ns.nodes[i], gamma.point(j));
    s.add(ns.weights[i] * fe * fg);
  }
  return s.value();
}

double pair_energy_closed(const Kernel& k, const Configuration& eta, const Configuration& gamma) {
  CompensatedSum<double> s;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    for (std::size_t l = 0; l < gamma.size(); ++l) {
      s.add(eta.charge(j) * gamma.charge(l) * k.self_convolve(eta.point(j), gamma.point(l)));
    }
  }
  return s.value();
}

}  // namespace wickfield
