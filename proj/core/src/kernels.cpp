#include "wickfield/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "wickfield/quadrature.hpp"

namespace wickfield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCachedLevels = 4;
// Panel width times |Re w| kept below this so the 16-point rule on each
// panel resolves the oscillation (Bernstein ellipse rho = 4).
constexpr double kPhasePerPanel = 12.0;

double bessel_profile(double p2, double eps, double m) { return std::exp(-0.5 * eps * p2) / std::sqrt(p2 + m * m); }

// int_a^inf exp(b p - eps p^2 / 2) dp
double gaussian_growth_tail(double a, double b, double eps) {
  return std::exp(b * b / (2.0 * eps)) * std::sqrt(kPi / (2.0 * eps)) * std::erfc((a - b / eps) * std::sqrt(eps / 2.0));
}

}  // namespace

struct Kernel::Impl {
  Kind kind = Kind::Gaussian;
  Space space;
  double amplitude = 1.0;
  double rate = 1.0;
  double eps = 0.0;
  double mass = 0.0;
  FourierQuadrature quad;

  struct Level {
    double panel_width = 0.0;
    double extent = 0.0;
    std::vector<double> p;
    std::vector<double> w;  // d = 1: w_j f(p_j) / pi;  d = 2: row-major w_j w_k f / pi^2
  };
  mutable std::array<std::once_flag, kCachedLevels> level_once;
  mutable std::array<Level, kCachedLevels> levels;

  mutable std::once_flag table_once;
  mutable std::vector<double> table;
  mutable double table_step = 0.0;
  mutable double table_rmax = 0.0;

  Level build_level(double panel_width) const {
    Level lv;
    const int panels = std::max(1, static_cast<int>(std::ceil(quad.cutoff / panel_width)));
    lv.panel_width = quad.cutoff / panels;
    lv.extent = kPhasePerPanel / lv.panel_width - 1.0;
    const Rule1D r = composite_gauss_legendre(0.0, quad.cutoff, panels, quad.nodes_per_panel);
    lv.p = r.nodes;
    const std::size_t n = r.size();
    if (space.dim == 1) {
      lv.w.resize(n);
      for (std::size_t j = 0; j < n; ++j) lv.w[j] = r.weights[j] * bessel_profile(r.nodes[j] * r.nodes[j], eps, mass) / kPi;
    } else {
      lv.w.resize(n * n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          lv.w[j * n + k] = r.weights[j] * r.weights[k] *
                            bessel_profile(r.nodes[j] * r.nodes[j] + r.nodes[k] * r.nodes[k], eps, mass) / (kPi * kPi);
    }
    return lv;
  }

  const Level& level(int l) const {
    std::call_once(level_once[l], [&] { levels[l] = build_level(quad.base_panel_width / std::ldexp(1.0, l)); });
    return levels[l];
  }

  Complex bessel_at(const ComplexPoint& w) const {
    double re_extent = 0.0;
    for (int k = 0; k < w.size(); ++k) {
      const double im = std::abs(w[k].imag());
      if (im > quad.im_budget) {
        throw BudgetError("mollified Bessel kernel: |Im z_" + std::to_string(k) + "| = " + std::to_string(im) +
                          " exceeds the certified budget " + std::to_string(quad.im_budget));
      }
      re_extent = std::max(re_extent, std::abs(w[k].real()));
    }
    Level adhoc;
    const Level* lv = nullptr;
    for (int l = 0; l < kCachedLevels; ++l) {
      const double width = quad.base_panel_width / std::ldexp(1.0, l);
      if (kPhasePerPanel / width - 1.0 >= re_extent) {
        lv = &level(l);
        break;
      }
    }
    if (lv == nullptr) {
      adhoc = build_level(kPhasePerPanel / (re_extent + 1.0));
      lv = &adhoc;
    }
    const std::size_t n = lv->p.size();
    if (space.dim == 1) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += lv->w[j] * std::cos(lv->p[j] * w[0]);
      return s;
    }
    std::vector<Complex> c1(n);
    for (std::size_t k = 0; k < n; ++k) c1[k] = std::cos(lv->p[k] * w[1]);
    Complex s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      Complex inner = 0.0;
      const double* row = &lv->w[j * n];
      for (std::size_t k = 0; k < n; ++k) inner += row[k] * c1[k];
      s += std::cos(lv->p[j] * w[0]) * inner;
    }
    return s;
  }

  double bessel_radial(double r) const { return bessel_at(complexify(axis_point(r))).real(); }

  Point axis_point(double r) const {
    Point p(space.dim);
    p[0] = r;
    return p;
  }

  double bessel_decay_radius(double tol) const {
    const double floor = 1e3 * quad.tolerance;
    const double thr = std::max(tol, floor);
    if (bessel_radial(0.0) <= tol) return 0.0;
    double r = 0.0;
    const double step = 0.5;
    while (bessel_radial(r + step) > thr) r += step;
    double lo = r;
    double hi = r + step;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bessel_radial(mid) > thr ? lo : hi) = mid;
    }
    if (tol >= floor) return hi;
    // beyond the resolvable range the tail decays at least like exp(-m r)
    return hi + std::log(thr / tol) / mass;
  }

  void build_table() const {
    table_rmax = bessel_decay_radius(1e-14);
    table_step = std::min(1.0 / 256.0, std::sqrt(eps) / 64.0);
    const std::size_t n = static_cast<std::size_t>(std::ceil(table_rmax / table_step)) + 3;
    table.resize(n);
    if (space.dim == 1) {
      // real-axis cutoff: tail (1/pi) int_P^inf e^{-eps p^2/2}/m dp below tol/100
      double cutoff = 1.0;
      while (gaussian_growth_tail(cutoff, 0.0, eps) / (kPi * mass) > quad.tolerance / 100.0) cutoff += 0.25;
      const double width = std::min(quad.base_panel_width, kPhasePerPanel / (n * table_step + 1.0));
      const int panels = std::max(1, static_cast<int>(std::ceil(cutoff / width)));
      const Rule1D rule = composite_gauss_legendre(0.0, cutoff, panels, quad.nodes_per_panel);
      std::vector<double> wf(rule.size());
      for (std::size_t j = 0; j < rule.size(); ++j)
        wf[j] = rule.weights[j] * bessel_profile(rule.nodes[j] * rule.nodes[j], eps, mass) / kPi;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = i * table_step;
        double s = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) s += wf[j] * std::cos(rule.nodes[j] * r);
        table[i] = s;
      }
    } else {
      // radial Hankel form: (1/2pi) int_0^inf J0(p r) p f(p) dp
      double cutoff = 1.0;
      while (gaussian_growth_tail(cutoff, 0.0, eps) / (2.0 * kPi) > quad.tolerance / 100.0) cutoff += 0.25;
      const double width = std::min(quad.base_panel_width, kPhasePerPanel / (n * table_step + 1.0));
      const int panels = std::max(1, static_cast<int>(std::ceil(cutoff / width)));
      const Rule1D rule = composite_gauss_legendre(0.0, cutoff, panels, quad.nodes_per_panel);
      std::vector<double> wf(rule.size());
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const double p = rule.nodes[j];
        wf[j] = rule.weights[j] * p * bessel_profile(p * p, eps, mass) / (2.0 * kPi);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double r = i * table_step;
        double s = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) s += wf[j] * std::cyl_bessel_j(0.0, rule.nodes[j] * r);
        table[i] = s;
      }
    }
  }

  double bessel_real(double r) const {
    std::call_once(table_once, [&] { build_table(); });
    if (r >= table_rmax) return bessel_radial(r);
    const double u = r / table_step;
    const auto i = static_cast<long>(std::floor(u));
    const double t = u - i;
    auto at = [&](long k) { return table[static_cast<std::size_t>(std::abs(k))]; };  // even extension
    const double f0 = at(i - 1), f1 = at(i), f2 = at(i + 1), f3 = at(i + 2);
    // cubic Lagrange through i-1, i, i+1, i+2
    return f0 * (-t * (t - 1.0) * (t - 2.0) / 6.0) + f1 * ((t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0) +
           f2 * (-(t + 1.0) * t * (t - 2.0) / 2.0) + f3 * ((t + 1.0) * t * (t - 1.0) / 6.0);
  }
};

Kernel Kernel::gaussian(int d, double amplitude, double rate) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Gaussian;
  impl->space = Space::euclidean(d);
  if (!(amplitude > 0.0) || !(rate > 0.0)) throw ValidationError("gaussian kernel: amplitude and rate must be positive");
  impl->amplitude = amplitude;
  impl->rate = rate;
  return Kernel(std::move(impl));
}

Kernel Kernel::sphere_exp(const Space& sphere) {
  if (!sphere.is_sphere()) throw ValidationError("sphere_exp kernel: needs a sphere space");
  sphere.validate();
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::SphereExp;
  impl->space = sphere;
  return Kernel(std::move(impl));
}

Kernel Kernel::mollified_bessel(int d, double epsilon, double mass, double quad_tol, double im_budget) {
  if (d < 1 || d > 2) throw ValidationError("mollified Bessel kernel: supported for d = 1, 2");
  if (!(epsilon > 0.0)) throw ValidationError("mollified Bessel kernel: epsilon must be positive");
  if (!(mass > 0.0)) throw ValidationError("mollified Bessel kernel: mass must be positive");
  if (!(quad_tol > 0.0)) throw ValidationError("mollified Bessel kernel: quad_tol must be positive");
  if (!(im_budget >= 0.0)) throw ValidationError("mollified Bessel kernel: im_budget must be non-negative");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::MollifiedBessel;
  impl->space = Space::euclidean(d);
  impl->eps = epsilon;
  impl->mass = mass;
  auto& q = impl->quad;
  q.tolerance = quad_tol;
  q.im_budget = im_budget;
  q.base_panel_width = std::min(1.0, 0.9 * mass);

  // Rounding in the Fourier sum is relative to sum |terms| = G(i b, ..., i b).
  // Shrink the strip until that floor fits under the tolerance.
  auto magnitude = [&](double b) { return std::pow(gaussian_growth_tail(0.0, b, epsilon) / kPi, d) / mass; };
  const double floor_factor = 4.0 * std::numeric_limits<double>::epsilon();
  if (magnitude(0.0) * floor_factor > quad_tol) {
    throw ValidationError("mollified Bessel kernel: quad_tol below double precision floor " +
                          std::to_string(magnitude(0.0) * floor_factor));
  }
  if (magnitude(im_budget) * floor_factor > quad_tol) {
    double lo = 0.0;
    double hi = im_budget;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (magnitude(mid) * floor_factor > quad_tol ? hi : lo) = mid;
    }
    im_budget = lo;
    q.im_budget = lo;
  }
  const double full = gaussian_growth_tail(0.0, im_budget, epsilon);
  auto tail = [&](double cutoff) {
    return d * gaussian_growth_tail(cutoff, im_budget, epsilon) * std::pow(full, d - 1) / (mass * std::pow(kPi, d));
  };
  double lo = im_budget / epsilon;
  double hi = lo + 1.0;
  while (tail(hi) > quad_tol / 4.0) hi += hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > quad_tol / 4.0 ? lo : hi) = mid;
  }
  q.cutoff = hi;
  q.tail_bound = tail(hi);
  return Kernel(std::move(impl));
}

Kernel::Kind Kernel::kind() const { return impl_->kind; }
const Space& Kernel::space() const { return impl_->space; }

Complex Kernel::eval_complex(const ComplexPoint& z, const Point& x) const {
  const int n = ambient_dim();
  if (z.size() != n || x.size() != n) throw ValidationError("kernel: dimension mismatch");
  switch (impl_->kind) {
    case Kind::Gaussian: {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) {
        const Complex u = z[k] - x[k];
        s += u * u;
      }
      return impl_->amplitude * std::exp(-impl_->rate * s);
    }
    case Kind::SphereExp: {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += z[k] * x[k];
      return std::exp(s);
    }
    case Kind::MollifiedBessel: {
      ComplexPoint w(n);
      for (int k = 0; k < n; ++k) w[k] = z[k] - x[k];
      return impl_->bessel_at(w);
    }
  }
  return 0.0;
}

double Kernel::eval(const Point& x, const Point& y) const {
  const int n = ambient_dim();
  if (x.size() != n || y.size() != n) throw ValidationError("kernel: dimension mismatch");
  switch (impl_->kind) {
    case Kind::Gaussian: {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
      return impl_->amplitude * std::exp(-impl_->rate * s);
    }
    case Kind::SphereExp:
      return std::exp(dot(x, y));
    case Kind::MollifiedBessel:
      return impl_->bessel_real(distance(x, y));
  }
  return 0.0;
}

double Kernel::l1_constant() const {
  switch (impl_->kind) {
    case Kind::Gaussian:
      return impl_->amplitude * std::pow(kPi / impl_->rate, impl_->space.dim / 2.0);
    case Kind::SphereExp: {
      // rotation invariance: |S^{d-1}| R^d int_0^pi e^{R^2 cos t} sin^{d-1} t dt
      const int d = impl_->space.dim;
      const double r = impl_->space.radius;
      const double area = 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
      const Rule1D rule = composite_gauss_legendre(0.0, kPi, 64, 16);
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i)
        s += rule.weights[i] * std::exp(r * r * std::cos(rule.nodes[i])) * std::pow(std::sin(rule.nodes[i]), d - 1);
      return area * std::pow(r, d) * s;
    }
    case Kind::MollifiedBessel:
      return 1.0 / impl_->mass;
  }
  return 0.0;
}

double Kernel::decay_radius(double tol) const {
  if (!(tol > 0.0)) throw ValidationError("decay_radius: tol must be positive");
  switch (impl_->kind) {
    case Kind::Gaussian:
      if (tol >= impl_->amplitude) return 0.0;
      return std::sqrt(std::log(impl_->amplitude / tol) / impl_->rate);
    case Kind::SphereExp:
      return 2.0 * impl_->space.radius;
    case Kind::MollifiedBessel:
      return impl_->bessel_decay_radius(tol);
  }
  return 0.0;
}

double Kernel::sup_abs(const ComplexPoint& z) const {
  switch (impl_->kind) {
    case Kind::Gaussian: {
      double s = 0.0;
      for (int k = 0; k < z.size(); ++k) s += z[k].imag() * z[k].imag();
      return impl_->amplitude * std::exp(impl_->rate * s);
    }
    case Kind::SphereExp: {
      double s = 0.0;
      for (int k = 0; k < z.size(); ++k) s += z[k].real() * z[k].real();
      return std::exp(std::sqrt(s) * impl_->space.radius);
    }
    case Kind::MollifiedBessel: {
      ComplexPoint w(z.size());
      for (int k = 0; k < z.size(); ++k) w[k] = Complex(0.0, z[k].imag());
      return std::abs(impl_->bessel_at(w)) + impl_->quad.tolerance;
    }
  }
  return 0.0;
}

double Kernel::self_convolve(const Point& x, const Point& y) const {
  if (impl_->space.is_sphere()) throw ValidationError("self_convolve: Euclidean space required");
  if (impl_->kind == Kind::Gaussian) {
    const double r2 = distance(x, y) * distance(x, y);
    const double a = impl_->amplitude;
    return a * a * std::pow(kPi / (2.0 * impl_->rate), impl_->space.dim / 2.0) * std::exp(-impl_->rate * r2 / 2.0);
  }
  return self_convolve_quadrature(x, y);
}

double Kernel::self_convolve_quadrature(const Point& x, const Point& y) const {
  if (impl_->space.is_sphere()) throw ValidationError("self_convolve: Euclidean space required");
  const int d = impl_->space.dim;
  if (x.size() != d || y.size() != d) throw ValidationError("self_convolve: dimension mismatch");
  const double r = decay_radius(1e-17 * std::max(1.0, l1_constant()));
  std::vector<Rule1D> rules;
  for (int k = 0; k < d; ++k) {
    const double a = std::min(x[k], y[k]) - r;
    const double b = std::max(x[k], y[k]) + r;
    rules.push_back(composite_gauss_legendre(a, b, std::max(1, static_cast<int>(std::ceil((b - a) / 0.5))), 16));
  }
  CompensatedSum<double> sum;
  Point z(d);
  std::array<std::size_t, kMaxAmbientDim> idx{};
  while (true) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      z[k] = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    sum.add(w * eval(x, z) * eval(z, y));
    int k = 0;
    while (k < d && ++idx[k] == rules[k].size()) idx[k++] = 0;
    if (k == d) break;
  }
  return sum.value();
}

std::optional<Kernel> Kernel::self_convolved() const {
  if (impl_->kind != Kind::Gaussian) return std::nullopt;
  const double a = impl_->amplitude;
  const double amp = a * a * std::pow(kPi / (2.0 * impl_->rate), impl_->space.dim / 2.0);
  return gaussian(impl_->space.dim, amp, impl_->rate / 2.0);
}

double Kernel::axis_factor(double dx) const {
  if (impl_->kind != Kind::Gaussian) throw ValidationError("axis_factor: kernel is not separable");
  return std::exp(-impl_->rate * dx * dx);
}

double Kernel::amplitude() const { return impl_->amplitude; }
double Kernel::rate() const { return impl_->rate; }
double Kernel::epsilon() const { return impl_->eps; }
double Kernel::mass() const { return impl_->mass; }

double Kernel::quad_tol() const { return impl_->kind == Kind::MollifiedBessel ? impl_->quad.tolerance : 0.0; }

double Kernel::im_budget() const {
  return impl_->kind == Kind::MollifiedBessel ? impl_->quad.im_budget : std::numeric_limits<double>::infinity();
}

const FourierQuadrature& Kernel::quadrature() const {
  if (impl_->kind != Kind::MollifiedBessel) throw ValidationError("quadrature: kernel has a closed form");
  return impl_->quad;
}

nlohmann::json Kernel::describe() const {
  nlohmann::json j;
  switch (impl_->kind) {
    case Kind::Gaussian:
      j = {{"kernel", "gaussian"}, {"dim", impl_->space.dim}, {"amplitude", impl_->amplitude}, {"rate", impl_->rate}};
      break;
    case Kind::SphereExp:
      j = {{"kernel", "sphere_exp"}, {"dim", impl_->space.dim}, {"radius", impl_->space.radius}};
      break;
    case Kind::MollifiedBessel:
      j = {{"kernel", "mollified_bessel"},
           {"dim", impl_->space.dim},
           {"epsilon", impl_->eps},
           {"mass", impl_->mass},
           {"quad_tol", impl_->quad.tolerance},
           {"im_budget", impl_->quad.im_budget},
           {"cutoff", impl_->quad.cutoff}};
      break;
  }
  return j;
}

}  // namespace wickfield
