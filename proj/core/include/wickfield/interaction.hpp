#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/configurations.hpp"
#include "wickfield/kernels.hpp"

namespace wickfield {

/// Integration nodes and weights over a window. Box grids are tensor
/// products (axis 0 slowest) so that kernel stencils are index boxes.
class QuadratureGrid {
 public:
  /// Midpoint rule with spacing close to h on every axis of a box.
  static QuadratureGrid midpoint(const Window& box, double h);
  /// Tensor Gauss-Legendre rule with n nodes per axis on a box.
  static QuadratureGrid gauss_legendre(const Window& box, int n);
  /// Circle: equispaced midpoints. 2-sphere: Gauss-Legendre in cos(theta)
  /// times equispaced azimuth. Node spacing close to h.
  static QuadratureGrid sphere(const Space& sphere, double h);

  std::size_t size() const { return weights_.size(); }
  const Point& node(std::size_t i) const { return nodes_[i]; }
  std::span<const Point> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double spacing() const { return spacing_; }
  double total_weight() const;

  bool is_tensor() const { return !axis_nodes_.empty(); }
  int tensor_dim() const { return static_cast<int>(axis_nodes_.size()); }
  std::span<const double> axis_nodes(int k) const { return axis_nodes_[k]; }
  std::size_t stride(int k) const { return strides_[k]; }

 private:
  std::vector<Point> nodes_;
  std::vector<double> weights_;
  double spacing_ = 0.0;
  std::vector<std::vector<double>> axis_nodes_;
  std::vector<std::size_t> strides_;
};

/// Concave profile v with v(0) = 0.
class Profile {
 public:
  enum class Kind { WidomRowlinson, Linear, ChargeMix };
  struct Charge {
    double s;
    double w;
  };

  static Profile widom_rowlinson();
  static Profile linear();
  /// v(phi) = omega(beta phi) / beta with omega(h) = sum_i w_i (1 - exp(-s_i h));
  /// at beta = 0 the limit sum_i w_i s_i phi is used.
  static Profile charge_mix(std::vector<Charge> charges, double beta);

  Kind kind() const { return kind_; }
  std::span<const Charge> charges() const { return charges_; }
  double operator()(double phi) const;
  /// b with |v(phi)| <= b |phi|.
  double linear_bound() const;
  /// v(phi + dphi) - v(phi), evaluated without cancellation.
  double increment(double phi, double dphi) const;
  nlohmann::json describe() const;

 private:
  Kind kind_ = Kind::Linear;
  std::vector<Charge> charges_;
  double beta_ = 1.0;
};

/// Index box of grid nodes within the kernel cutoff of a point, with the
/// kernel values G(node, x) in grid order.
struct Stencil {
  std::vector<std::size_t> index;
  std::vector<double> value;
};

/// U(eta) = int v(G * eta) d lambda discretized on a grid covering the
/// sampling window padded by the kernel decay radius.
class PotentialSpec {
 public:
  struct Options {
    double grid_h = 0.0;         // 0: 0.05 in d = 1, 0.1 otherwise
    double padding_tol = 1e-8;   // pad and stencil cutoff: G <= padding_tol beyond
  };

  PotentialSpec(Profile profile, double beta, Kernel kernel, Window sampling_window);
  PotentialSpec(Profile profile, double beta, Kernel kernel, Window sampling_window, Options options);
  /// Explicit integration grid; stencils cover every node.
  PotentialSpec(Profile profile, double beta, Kernel kernel, Window sampling_window, QuadratureGrid grid);

  const Profile& profile() const { return s_->profile; }
  double beta() const { return s_->beta; }
  const Kernel& kernel() const { return s_->kernel; }
  const Window& sampling_window() const { return s_->sampling; }
  const Window& field_window() const { return s_->field; }
  const QuadratureGrid& grid() const { return s_->grid; }
  double cutoff_radius() const { return s_->cutoff; }

  double b() const { return s_->profile.linear_bound(); }
  double C() const { return s_->kernel.l1_constant(); }
  double B() const { return b() * C(); }
  /// Stability constant: f(eta) <= xi^#eta.
  double xi() const { return std::exp(beta() * B()); }
  /// Uniform bound on the Papangelou intensity.
  double rho() const { return std::exp(beta() * B()); }
  /// Estimated per-particle error of the grid integral (discretization
  /// against a half-spacing grid plus the kernel mass outside the stencil).
  /// Zero for explicit grids.
  double grid_tolerance() const { return s_->grid_tol; }

  Stencil stencil(const Point& x) const;
  /// Phi = G * eta on every grid node, built from stencils.
  std::vector<double> field_on_grid(const Configuration& eta) const;
  double potential(const Configuration& eta) const;
  double potential_from_field(std::span<const double> phi) const;
  /// U(eta + delta_x) - U(eta).
  double energy_diff(const Point& x, const Configuration& eta) const;
  /// Same, given Phi = G * eta on the grid and the stencil of x.
  double energy_diff_cached(const Stencil& sx, std::span<const double> phi) const;
  /// exp(-beta energy_diff)
  double papangelou(const Point& x, const Configuration& eta) const;

  nlohmann::json describe() const;

 private:
  struct State {
    Profile profile;
    double beta = 0.0;
    Kernel kernel;
    Window sampling;
    Window field;
    QuadratureGrid grid;
    double cutoff = 0.0;
    bool explicit_grid = false;
    double grid_tol = 0.0;
  };
  void finish();
  std::shared_ptr<State> s_;
};

struct ConditionReport {
  std::string condition;
  long checks = 0;
  long violations = 0;
  double worst_margin = 0.0;  // largest (lhs - rhs); <= tolerance means pass
};

struct ConditionsReport {
  std::vector<ConditionReport> conditions;
  double tolerance = 0.0;
  bool pass() const;
  nlohmann::json to_json() const;
};

/// Random configurations and nested pairs checked against stability,
/// the Papangelou upper bound and ferromagneticity.
ConditionsReport verify_conditions(const PotentialSpec& p, int trials, std::mt19937_64& rng, double tolerance = 1e-6);

}  // namespace wickfield
