#pragma once

#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "wickfield/geometry.hpp"

namespace wickfield {

/// Tensor Fourier quadrature for the damped momentum integral of the
/// mollified Bessel kernel. Truncation at |p_k| <= cutoff is certified
/// against `tolerance` for every argument with |Im w_k| <= im_budget;
/// panel widths shrink with |Re w| so the discretization error stays far
/// below the truncation error. When rounding of the Fourier sum on the
/// requested strip would exceed the tolerance, the strip is narrowed and
/// `im_budget` holds the certified value.
struct FourierQuadrature {
  double tolerance = 1e-8;
  double im_budget = 3.0;
  double cutoff = 0.0;
  double tail_bound = 0.0;
  int nodes_per_panel = 16;
  double base_panel_width = 1.0;
};

/// Euclidean-invariant kernel G(x, y) >= 0 together with its holomorphic
/// extension G^c(z, x) in the first argument.
///
///  - Gaussian:        amplitude * exp(-rate (z - x).(z - x)) on R^d
///  - SphereExp:       exp(z.x) on the sphere of radius R
///  - MollifiedBessel: (2 pi)^-d int e^{i p.(z - x)} e^{-eps |p|^2 / 2} (|p|^2 + m^2)^{-1/2} dp
///
/// Copies share immutable state and are cheap.
class Kernel {
 public:
  enum class Kind { Gaussian, SphereExp, MollifiedBessel };

  static Kernel gaussian(int d, double amplitude = 1.0, double rate = 1.0);
  static Kernel sphere_exp(const Space& sphere);
  static Kernel mollified_bessel(int d, double epsilon, double mass, double quad_tol = 1e-8, double im_budget = 3.0);

  Kind kind() const;
  const Space& space() const;
  int ambient_dim() const { return space().ambient_dim(); }

  /// G^c(z, x). Throws BudgetError when a MollifiedBessel argument leaves
  /// the certified strip.
  Complex eval_complex(const ComplexPoint& z, const Point& x) const;
  /// G(x, y) for real arguments. MollifiedBessel uses a radial table built
  /// on first use, accurate to the quadrature tolerance.
  double eval(const Point& x, const Point& y) const;

  /// sup_x ||G(., x)||_1
  double l1_constant() const;
  /// r such that G(x, y) <= tol whenever |x - y| >= r.
  double decay_radius(double tol) const;
  /// Upper bound of |G^c(z, x)| over all real x.
  double sup_abs(const ComplexPoint& z) const;

  /// G_1(x, y) = int G(x, z) G(z, y) dz (closed form for Gaussian).
  double self_convolve(const Point& x, const Point& y) const;
  double self_convolve_quadrature(const Point& x, const Point& y) const;
  /// G_1 as a kernel in its own right, when it has a closed form.
  std::optional<Kernel> self_convolved() const;

  /// Gaussian kernels factor over axes: G = amplitude * prod_k axis_factor(x_k - y_k).
  bool separable() const { return kind() == Kind::Gaussian; }
  double axis_factor(double dx) const;
  double amplitude() const;
  double rate() const;

  double epsilon() const;
  double mass() const;
  /// Quadrature tolerance; zero for closed-form kernels.
  double quad_tol() const;
  /// Imaginary-part budget per axis; infinite for closed-form kernels.
  double im_budget() const;
  const FourierQuadrature& quadrature() const;

  nlohmann::json describe() const;

  struct Impl;

 private:
  explicit Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace wickfield
