#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/configurations.hpp"
#include "wickfield/interaction.hpp"
#include "wickfield/kernels.hpp"

namespace wickfield {

/// |F(eta)| <= kappa * (#eta)^degree
struct Growth {
  double kappa = 1.0;
  int degree = 0;
};

/// Functional of the form F(eta) = g(sum_j a(x_j), #eta) with a vector of
/// complex per-point features a. This covers counts, pairings and products
/// of complex field values, and lets the series accumulate sums along the
/// enumeration instead of re-evaluating F at every configuration.
struct SeriesFunctional {
  std::string name;
  int features = 0;
  std::function<void(const Point&, std::span<Complex>)> feature;
  std::function<Complex(std::span<const Complex>, std::size_t)> value;
  Growth growth;
  /// Extra quadrature breakpoints per axis (kinks of the features).
  std::vector<std::vector<double>> breakpoints;
};

SeriesFunctional constant_functional();
/// Number of points in `region` (the whole window when empty).
SeriesFunctional count_functional(int dim, std::optional<Window> region = std::nullopt);
/// N_A * N_B
SeriesFunctional count_product_functional(const Window& a, const Window& b);
/// exp(-<eta, h>)
SeriesFunctional laplace_functional(const TestFunction& h);
/// prod_j [conj?] phi^c(z_j) with phi^c = G^c * eta.
SeriesFunctional moment_functional(const Kernel& k, std::span<const ComplexPoint> points, std::span<const bool> conj_flags);

/// Unnormalized density f(eta) of the Gibbs measure with respect to the
/// Poisson reference, presented as an additive state plus a weight.
struct SeriesModel {
  std::string name;
  std::size_t state_size = 0;
  std::function<void(const Point&, std::span<double>)> column;
  std::function<double(std::span<const double>, std::size_t)> weight;
  /// f(eta) <= xi^#eta
  double xi = 1.0;
  /// Absolute error of `weight` for any configuration (inner truncations).
  double weight_error = 0.0;
};

/// f = exp(-beta U) with U on the potential's grid. Uses xi = 1 when
/// U >= 0 (every supported profile is non-negative), else exp(beta B).
SeriesModel gibbs_model(const PotentialSpec& p);

/// Coupled two-species model integrated over the second species: the
/// first species sees exp{-beta sum_j sum_k s_k G_1(y_j, x_k)} and the
/// marked second species (intensity measure lambda on `second_window`
/// times the charge distribution) is summed as a truncated exponential
/// series. Gaussian kernels only (closed-form G_1).
SeriesModel two_species_model(const Kernel& k, const Window& second_window, std::span<const Profile::Charge> charges,
                              double beta, int inner_nodes = 24);

struct SeriesSpec {
  Window window;
  double intensity = 1.0;
  int nmax = 12;
  /// Gauss-Legendre nodes per axis per point for n <= 4.
  int quad_nodes = 32;
  /// Cap on the multisets enumerated per order; sets the node count for n > 4.
  long multiset_budget = 100000;
  double tail_tol = 1e-8;

  void validate() const;
  nlohmann::json to_json() const;
};

struct OracleValue {
  Complex value;
  double tail_bound = 0.0;
  double quad_bound = 0.0;
  double rounding_bound = 0.0;
  int nmax = 0;
  long multisets = 0;

  double error() const { return tail_bound + quad_bound + rounding_bound; }
  nlohmann::json to_json() const;
};

/// kappa sum_{n > nmax} n^degree m^n / n!
double series_tail(double m, Growth g, int nmax);
/// Smallest nmax whose tail is at most tol.
int required_nmax(double m, Growth g, double tol);
/// Per-point Gauss-Legendre node count per axis used at order n.
int nodes_for_order(const SeriesSpec& spec, int n, int dim);

/// E[F] under f d mu_sigma / Z by the truncated Poisson series. Throws
/// ValidationError naming the required nmax when the tail bound exceeds
/// spec.tail_tol.
std::vector<OracleValue> expect_many(const SeriesSpec& spec, const SeriesModel& model,
                                     std::span<const SeriesFunctional> fs);
OracleValue expect(const SeriesSpec& spec, const SeriesModel& model, const SeriesFunctional& f);
OracleValue expect(const SeriesSpec& spec, const PotentialSpec& p, const SeriesFunctional& f);

OracleValue moment_exact(const SeriesSpec& spec, const PotentialSpec& p, std::span<const ComplexPoint> points,
                         std::span<const bool> conj_flags);

/// Moments of the Poisson process by the Campbell/partition formula:
/// E prod_j [conj?] phi^c(z_j) = sum over set partitions of prod over blocks
/// of int prod_{j in block} [conj?] G^c(z_j, x) intensity dx.
struct QuadratureValue {
  Complex value;
  double quad_bound = 0.0;
  nlohmann::json to_json() const;
};
/// `region` empty means the whole space (a box wide enough for the
/// kernel tails to fall below 1e-17 relative).
QuadratureValue poisson_moment(const Kernel& k, double intensity, std::span<const ComplexPoint> points,
                               std::span<const bool> conj_flags, std::optional<Window> region = std::nullopt);

/// Laplace transform of Poisson(intensity) on a box: exp(int (e^{-h} - 1) intensity dx).
QuadratureValue poisson_laplace(const TestFunction& h, double intensity, const Window& box);

struct ProjectionCheck {
  std::string functional;
  OracleValue coupled;
  OracleValue projected;
  bool pass = false;
};

struct ProjectionReport {
  std::vector<ProjectionCheck> checks;
  bool pass() const;
  nlohmann::json to_json() const;
};

/// Coupled two-species marginal against the single-species charge-mix
/// model with kernel G_1 on the same window, for N, exp(-<eta, h>) and
/// phi(x0) at the window center.
ProjectionReport two_species_projection_check(const SeriesSpec& spec, const Kernel& k,
                                              std::span<const Profile::Charge> charges, double beta,
                                              const TestFunction& h);

/// int (G * eta)(G * gamma) d lambda by tensor Gauss-Legendre quadrature.
double pair_energy_quadrature(const Kernel& k, const Configuration& eta, const Configuration& gamma);
/// sum_j sum_k s_j s_k G_1(y_j, x_k)
double pair_energy_closed(const Kernel& k, const Configuration& eta, const Configuration& gamma);

}  // namespace wickfield
