#include "wickfield/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wickfield/quadrature.hpp"

namespace wickfield {

namespace {

constexpr double kPi = std::numbers::pi;

void fill_tensor(std::vector<std::vector<double>>& axis_nodes, const std::vector<std::vector<double>>& axis_weights,
                 std::vector<Point>& nodes, std::vector<double>& weights, std::vector<std::size_t>& strides) {
  const int d = static_cast<int>(axis_nodes.size());
  strides.assign(d, 1);
  std::size_t total = 1;
  for (int k = d - 1; k >= 0; --k) {
    strides[k] = total;
    total *= axis_nodes[k].size();
  }
  nodes.resize(total);
  weights.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    Point p(d);
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const std::size_t j = (i / strides[k]) % axis_nodes[k].size();
      p[k] = axis_nodes[k][j];
      w *= axis_weights[k][j];
    }
    nodes[i] = p;
    weights[i] = w;
  }
}

}  // namespace

QuadratureGrid QuadratureGrid::midpoint(const Window& box, double h) {
  if (!box.is_box()) throw ValidationError("midpoint grid: needs a box window");
  if (!(h > 0.0)) throw ValidationError("midpoint grid: spacing must be positive");
  QuadratureGrid g;
  std::vector<std::vector<double>> ws;
  double spacing = 0.0;
  for (const auto& iv : box.bounds()) {
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(iv.length() / h - 1e-9)));
    const double step = iv.length() / static_cast<double>(n);
    spacing = std::max(spacing, step);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = iv.lo + (static_cast<double>(i) + 0.5) * step;
    g.axis_nodes_.push_back(std::move(x));
    ws.emplace_back(n, step);
  }
  g.spacing_ = spacing;
  fill_tensor(g.axis_nodes_, ws, g.nodes_, g.weights_, g.strides_);
  return g;
}

QuadratureGrid QuadratureGrid::gauss_legendre(const Window& box, int n) {
  if (!box.is_box()) throw ValidationError("Gauss-Legendre grid: needs a box window");
  if (n < 1) throw ValidationError("Gauss-Legendre grid: need at least one node");
  QuadratureGrid g;
  std::vector<std::vector<double>> ws;
  for (const auto& iv : box.bounds()) {
    const Rule1D r = wickfield::gauss_legendre(n, iv.lo, iv.hi);
    g.axis_nodes_.push_back(r.nodes);
    ws.push_back(r.weights);
    g.spacing_ = std::max(g.spacing_, iv.length() / n);
  }
  fill_tensor(g.axis_nodes_, ws, g.nodes_, g.weights_, g.strides_);
  return g;
}

QuadratureGrid QuadratureGrid::sphere(const Space& sphere, double h) {
  if (!sphere.is_sphere()) throw ValidationError("sphere grid: needs a sphere space");
  if (!(h > 0.0)) throw ValidationError("sphere grid: spacing must be positive");
  const double r = sphere.radius;
  QuadratureGrid g;
  if (sphere.dim == 1) {
    const int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * r / h)));
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * (i + 0.5) / n;
      g.nodes_.push_back(Point{r * std::cos(t), r * std::sin(t)});
      g.weights_.push_back(2.0 * kPi * r / n);
    }
    g.spacing_ = 2.0 * kPi * r / n;
  } else if (sphere.dim == 2) {
    const int nt = std::max(4, static_cast<int>(std::ceil(kPi * r / h)));
    const int np = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * r / h)));
    const Rule1D rule = wickfield::gauss_legendre(nt);
    for (int i = 0; i < nt; ++i) {
      const double c = rule.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < np; ++j) {
        const double ph = 2.0 * kPi * (j + 0.5) / np;
        g.nodes_.push_back(Point{r * s * std::cos(ph), r * s * std::sin(ph), r * c});
        g.weights_.push_back(r * r * rule.weights[i] * 2.0 * kPi / np);
      }
    }
    g.spacing_ = std::max(kPi * r / nt, 2.0 * kPi * r / np);
  } else {
    throw ValidationError("sphere grid: supported for d = 1, 2");
  }
  return g;
}

double QuadratureGrid::total_weight() const {
  CompensatedSum<double> s;
  for (double w : weights_) s.add(w);
  return s.value();
}

// ---------------------------------------------------------------------------

Profile Profile::widom_rowlinson() {
  Profile p;
  p.kind_ = Kind::WidomRowlinson;
  return p;
}

Profile Profile::linear() { return Profile{}; }

Profile Profile::charge_mix(std::vector<Charge> charges, double beta) {
  if (charges.empty()) throw ValidationError("charge_mix: charge distribution is empty");
  for (const auto& c : charges) {
    if (!(c.s > 0.0) || !std::isfinite(c.s)) throw ValidationError("charge_mix: charges must be positive and finite");
    if (!(c.w > 0.0) || !std::isfinite(c.w)) throw ValidationError("charge_mix: weights must be positive and finite");
  }
  if (!(beta >= 0.0)) throw ValidationError("charge_mix: beta must be non-negative");
  Profile p;
  p.kind_ = Kind::ChargeMix;
  p.charges_ = std::move(charges);
  p.beta_ = beta;
  return p;
}

double Profile::operator()(double phi) const {
  switch (kind_) {
    case Kind::WidomRowlinson:
      return -std::expm1(-phi);
    case Kind::Linear:
      return phi;
    case Kind::ChargeMix: {
      double s = 0.0;
      if (beta_ == 0.0) {
        for (const auto& c : charges_) s += c.w * c.s * phi;
        return s;
      }
      for (const auto& c : charges_) s += c.w * -std::expm1(-c.s * beta_ * phi);
      return s / beta_;
    }
  }
  return 0.0;
}

double Profile::increment(double phi, double dphi) const {
  switch (kind_) {
    case Kind::WidomRowlinson:
      return std::exp(-phi) * -std::expm1(-dphi);
    case Kind::Linear:
      return dphi;
    case Kind::ChargeMix: {
      double s = 0.0;
      if (beta_ == 0.0) {
        for (const auto& c : charges_) s += c.w * c.s * dphi;
        return s;
      }
      for (const auto& c : charges_) s += c.w * std::exp(-c.s * beta_ * phi) * -std::expm1(-c.s * beta_ * dphi);
      return s / beta_;
    }
  }
  return 0.0;
}

double Profile::linear_bound() const {
  if (kind_ != Kind::ChargeMix) return 1.0;
  double b = 0.0;
  for (const auto& c : charges_) b += c.w * c.s;
  return b;
}

nlohmann::json Profile::describe() const {
  switch (kind_) {
    case Kind::WidomRowlinson:
      return {{"potential", "widom_rowlinson"}};
    case Kind::Linear:
      return {{"potential", "linear"}};
    case Kind::ChargeMix: {
      nlohmann::json c = nlohmann::json::array();
      for (const auto& q : charges_) c.push_back({q.s, q.w});
      return {{"potential", "charge_mix"}, {"charges", c}};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------

PotentialSpec::PotentialSpec(Profile profile, double beta, Kernel kernel, Window sampling_window)
    : PotentialSpec(std::move(profile), beta, std::move(kernel), std::move(sampling_window), Options{}) {}

PotentialSpec::PotentialSpec(Profile profile, double beta, Kernel kernel, Window sampling_window, Options options) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("potential: beta must be finite and non-negative");
  if (!(sampling_window.space() == kernel.space())) {
    throw ValidationError("potential: window and kernel live on different spaces");
  }
  if (!(options.padding_tol > 0.0)) throw ValidationError("potential: padding_tol must be positive");
  const int d = sampling_window.dim();
  const double h = options.grid_h > 0.0 ? options.grid_h : (d == 1 ? 0.05 : 0.1);
  if (sampling_window.is_box()) {
    const double r = kernel.decay_radius(options.padding_tol);
    Window field = sampling_window.padded(r);
    QuadratureGrid grid = QuadratureGrid::midpoint(field, h);
    s_ = std::make_shared<State>(State{std::move(profile), beta, std::move(kernel), std::move(sampling_window),
                                       std::move(field), std::move(grid), r, false, 0.0});
  } else {
    QuadratureGrid grid = QuadratureGrid::sphere(sampling_window.space(), h);
    Window field = sampling_window;
    s_ = std::make_shared<State>(State{std::move(profile), beta, std::move(kernel), std::move(sampling_window),
                                       std::move(field), std::move(grid), 0.0, false, 0.0});
  }
  finish();
}

PotentialSpec::PotentialSpec(Profile profile, double beta, Kernel kernel, Window sampling_window, QuadratureGrid grid) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("potential: beta must be finite and non-negative");
  Window field = sampling_window;
  s_ = std::make_shared<State>(State{std::move(profile), beta, std::move(kernel), std::move(sampling_window),
                                     std::move(field), std::move(grid), 0.0, true, 0.0});
}

void PotentialSpec::finish() {
  // Per-particle error of int G(., c) on this grid, against a half-spacing
  // grid and against the exact kernel mass.
  const Window& sw = s_->sampling;
  Point c = sw.center();
  if (!sw.is_box()) {
    c = Point(sw.space().ambient_dim());
    c[0] = sw.space().radius;
  }
  const Stencil st = stencil(c);
  double coarse = 0.0;
  for (std::size_t i = 0; i < st.index.size(); ++i) coarse += s_->grid.weights()[st.index[i]] * st.value[i];
  QuadratureGrid fine = sw.is_box() ? QuadratureGrid::midpoint(s_->field, s_->grid.spacing() / 2.0)
                                    : QuadratureGrid::sphere(sw.space(), s_->grid.spacing() / 2.0);
  CompensatedSum<double> f;
  for (std::size_t i = 0; i < fine.size(); ++i) f.add(fine.weights()[i] * s_->kernel.eval(fine.node(i), c));
  s_->grid_tol = std::abs(coarse - f.value()) + std::abs(s_->kernel.l1_constant() - f.value());
}

Stencil PotentialSpec::stencil(const Point& x) const {
  Stencil st;
  const auto& g = s_->grid;
  const auto& k = s_->kernel;
  if (s_->explicit_grid || !g.is_tensor()) {
    st.index.resize(g.size());
    st.value.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      st.index[i] = i;
      st.value[i] = k.eval(g.node(i), x);
    }
    return st;
  }
  const int d = g.tensor_dim();
  std::array<std::size_t, kMaxAmbientDim> lo{};
  std::array<std::size_t, kMaxAmbientDim> hi{};
  std::array<std::vector<double>, kMaxAmbientDim> factor;
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) {
    const auto nodes = g.axis_nodes(a);
    lo[a] = static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), x[a] - s_->cutoff) - nodes.begin());
    hi[a] = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), x[a] + s_->cutoff) - nodes.begin());
    if (hi[a] <= lo[a]) return st;
    count *= hi[a] - lo[a];
    if (k.separable()) {
      for (std::size_t j = lo[a]; j < hi[a]; ++j) factor[a].push_back(k.axis_factor(nodes[j] - x[a]));
    }
  }
  st.index.reserve(count);
  st.value.reserve(count);
  std::array<std::size_t, kMaxAmbientDim> j = lo;
  const double amp = k.separable() ? k.amplitude() : 0.0;
  while (true) {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) idx += j[a] * g.stride(a);
    double v;
    if (k.separable()) {
      v = amp;
      for (int a = 0; a < d; ++a) v *= factor[a][j[a] - lo[a]];
    } else {
      v = k.eval(g.node(idx), x);
    }
    st.index.push_back(idx);
    st.value.push_back(v);
    int a = d - 1;
    while (a >= 0 && ++j[a] == hi[a]) {
      j[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
  return st;
}

std::vector<double> PotentialSpec::field_on_grid(const Configuration& eta) const {
  std::vector<double> phi(s_->grid.size(), 0.0);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    const Stencil st = stencil(eta.point(j));
    const double s = eta.charge(j);
    for (std::size_t i = 0; i < st.index.size(); ++i) phi[st.index[i]] += s * st.value[i];
  }
  return phi;
}

double PotentialSpec::potential_from_field(std::span<const double> phi) const {
  if (phi.size() != s_->grid.size()) throw ValidationError("potential: field size does not match the grid");
  const auto w = s_->grid.weights();
  CompensatedSum<double> u;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i] != 0.0) u.add(w[i] * s_->profile(phi[i]));
  }
  return u.value();
}

double PotentialSpec::potential(const Configuration& eta) const {
  if (eta.empty()) return 0.0;
  return potential_from_field(field_on_grid(eta));
}

double PotentialSpec::energy_diff_cached(const Stencil& sx, std::span<const double> phi) const {
  const auto w = s_->grid.weights();
  CompensatedSum<double> u;
  if (s_->profile.kind() == Profile::Kind::Linear) {
    for (std::size_t i = 0; i < sx.index.size(); ++i) u.add(w[sx.index[i]] * sx.value[i]);
    return u.value();
  }
  for (std::size_t i = 0; i < sx.index.size(); ++i) {
    const std::size_t n = sx.index[i];
    u.add(w[n] * s_->profile.increment(phi[n], sx.value[i]));
  }
  return u.value();
}

double PotentialSpec::energy_diff(const Point& x, const Configuration& eta) const {
  const Stencil sx = stencil(x);
  if (eta.empty() || s_->profile.kind() == Profile::Kind::Linear) {
    const std::vector<double> zero(s_->grid.size(), 0.0);
    return energy_diff_cached(sx, zero);
  }
  return energy_diff_cached(sx, field_on_grid(eta));
}

double PotentialSpec::papangelou(const Point& x, const Configuration& eta) const {
  if (s_->beta == 0.0) return 1.0;
  return std::exp(-s_->beta * energy_diff(x, eta));
}

nlohmann::json PotentialSpec::describe() const {
  nlohmann::json j = s_->profile.describe();
  j["beta"] = s_->beta;
  j["kernel"] = s_->kernel.describe();
  j["grid_nodes"] = s_->grid.size();
  j["grid_spacing"] = s_->grid.spacing();
  j["cutoff_radius"] = s_->cutoff;
  j["grid_tolerance"] = s_->grid_tol;
  j["b"] = b();
  j["C"] = C();
  j["B"] = B();
  j["xi"] = xi();
  j["rho"] = rho();
  return j;
}

// ---------------------------------------------------------------------------

bool ConditionsReport::pass() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionReport& c) { return c.violations == 0; });
}

nlohmann::json ConditionsReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : conditions) {
    arr.push_back({{"condition", c.condition},
                   {"checks", c.checks},
                   {"violations", c.violations},
                   {"worst_margin", c.worst_margin}});
  }
  return {{"pass", pass()}, {"tolerance", tolerance}, {"conditions", arr}};
}

ConditionsReport verify_conditions(const PotentialSpec& p, int trials, std::mt19937_64& rng, double tolerance) {
  if (trials < 1) throw ValidationError("verify_conditions: trials must be at least 1");
  ConditionsReport rep;
  rep.tolerance = tolerance;
  ConditionReport stab{"stability", 0, 0, -std::numeric_limits<double>::infinity()};
  ConditionReport bound{"papangelou_bound", 0, 0, -std::numeric_limits<double>::infinity()};
  ConditionReport ferro{"ferromagnetic", 0, 0, -std::numeric_limits<double>::infinity()};
  const Window& w = p.sampling_window();
  std::uniform_int_distribution<int> base_count(0, 12);
  std::uniform_int_distribution<int> extra_count(1, 6);
  auto record = [&](ConditionReport& c, double margin) {
    ++c.checks;
    c.worst_margin = std::max(c.worst_margin, margin);
    if (margin > tolerance) ++c.violations;
  };
  for (int t = 0; t < trials; ++t) {
    Configuration eta;
    const int n = base_count(rng);
    for (int i = 0; i < n; ++i) eta.add(w.sample_uniform(rng));
    Configuration gamma = eta;
    const int m = extra_count(rng);
    for (int i = 0; i < m; ++i) gamma.add(w.sample_uniform(rng));
    const Point x = w.sample_uniform(rng);

    const auto phi_eta = p.field_on_grid(eta);
    const auto phi_gamma = p.field_on_grid(gamma);
    const double u = p.potential_from_field(phi_eta);
    record(stab, std::abs(u) - p.B() * static_cast<double>(n));

    const Stencil sx = p.stencil(x);
    const double pe = std::exp(-p.beta() * p.energy_diff_cached(sx, phi_eta));
    const double pg = std::exp(-p.beta() * p.energy_diff_cached(sx, phi_gamma));
    record(bound, pe - p.rho());
    record(ferro, pe - pg);
  }
  rep.conditions = {stab, bound, ferro};
  return rep;
}

}  // namespace wickfield
