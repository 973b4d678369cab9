#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/configurations.hpp"
#include "wickfield/fields.hpp"
#include "wickfield/interaction.hpp"
#include "wickfield/kernels.hpp"
#include "wickfield/oracle.hpp"

namespace wickfield {

/// Outcome of one verification. `margin` is the observed statistic and
/// `tolerance` the threshold it was compared with; the comparison itself
/// is documented per test.
struct TestReport {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  int quad_order = 0;
  std::uint64_t seed = 0;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

nlohmann::json to_json(std::span<const TestReport> reports);
bool all_pass(std::span<const TestReport> reports);

/// int h d lambda over the support of h.
double integrate(const TestFunction& h);

std::vector<double> region_counts(std::span<const Configuration> samples, const Window& region);
std::vector<double> field_values(std::span<const Configuration> samples, const Kernel& k, const Point& x);
std::vector<double> pairings(std::span<const Configuration> samples, const TestFunction& h);

/// |estimate - exact| <= 3 stderr + exact_error
TestReport agreement_test(const std::string& name, const CorrelationEstimate& estimate, Complex exact,
                          double exact_error);

/// Cov(F1, F2) >= -3 stderr. margin = Cov, tolerance = 3 stderr.
TestReport fkg_test(const std::string& name, std::span<const double> f1, std::span<const double> f2,
                    int batches = 32);
/// Series covariance of N_A and N_B; passes when it exceeds its error bound.
TestReport fkg_exact(const SeriesSpec& spec, const PotentialSpec& p, const Window& a, const Window& b);

/// For an increasing F: mean <= poisson_mean + 3 stderr. For a decreasing
/// F (increasing = false): mean >= poisson_mean - 3 stderr.
TestReport dominance_test(const std::string& name, std::span<const double> values, double poisson_mean,
                          bool increasing = true, int batches = 32);
/// Panel against Poisson(rho * intensity): N_A capped at `cap` for every
/// region, <eta, h> and exp(-<eta, h>).
std::vector<TestReport> dominance_panel(std::span<const Configuration> samples, double rho, double intensity,
                                        std::span<const Window> regions, int cap, const TestFunction& h,
                                        int batches = 32);
/// Series E[N] <= rho sigma(Lambda) within the series error.
TestReport dominance_exact(const SeriesSpec& spec, const PotentialSpec& p);

/// L(t2) <= L(t1) + 3 combined stderr for estimates at t1 < t2.
TestReport laplace_monotonicity_test(const CorrelationEstimate& at_t1, const CorrelationEstimate& at_t2);
/// Series values at intensities t1 < t2: L(t2) < L(t1) strictly, with the
/// gap above the combined error and each error at most `digits_tol`.
TestReport laplace_monotonicity_exact(const SeriesSpec& spec, const PotentialSpec& p, const TestFunction& h,
                                      double t1, double t2, double digits_tol = 1e-6);

/// rho int_shell |G1 G2| + rho^2 (I1_shell I2 + I1 I2_shell) where I_j are
/// integrals of |G^c(z_j, .)| and the shell is the complement of the window
/// inset by the kernel decay radius at 1e-8. Zero on spheres.
double finite_volume_bias(const Kernel& k, double rho, const Window& window, const ComplexPoint& z1,
                          const ComplexPoint& z2);

/// Paired S2(x1, x2) - S2(g x1, g x2). Refuses (ValidationError) when a
/// point or its image violates the bulk condition.
TestReport euclidean_invariance_test(std::span<const Configuration> samples, const Kernel& k, const Window& window,
                                     double rho, const Point& x1, const Point& x2, const GroupElement& g,
                                     int batches = 32);

/// Paired tau2(y1, y2) - tau2(L y1, L y2) for a boost of rapidity chi on
/// Wick-embedded Minkowski points. Passes when |diff| <= 3 stderr + 2 bias.
/// details.resolution = (3 stderr + 2 bias) / |tau2|.
TestReport lorentz_invariance_test(std::span<const Configuration> samples, const Kernel& k, const Window& window,
                                   double rho, const Point& y1, const Point& y2, double chi, int batches = 32);
/// Free field: both sides by full-space Campbell quadrature.
TestReport lorentz_invariance_exact(const Kernel& k, double intensity, const Point& y1, const Point& y2, double chi,
                                    double tolerance = 1e-6);

/// theta L_{-chi} theta L_chi y (= L_{2 chi} y)
Point relocate_first_argument(double chi, const Point& y);

/// Free field mixed moment Q(y1, y2) = E conj(phi^c(w(y1))) phi^c(w(y2)).
/// Passes when |Q(L y1, L y2) - Q(y1, y2)| > 5 quad_bound and
/// |Q(L y1, L y2) - Q(relocated y1, y2)| <= identity_tol.
TestReport mixed_noninvariance_exact(const Kernel& k, double intensity, const Point& y1, const Point& y2, double chi,
                                     double identity_tol = 1e-8);
/// Null control: passes when the boost difference is within its quadrature bound.
TestReport mixed_null_control(const Kernel& k, double intensity, const Point& y1, const Point& y2, double chi);
/// Monte Carlo counterpart: boost difference beyond 5 stderr, relocation
/// identity within 3 stderr.
TestReport mixed_noninvariance_test(std::span<const Configuration> samples, const Kernel& k, const Point& y1,
                                    const Point& y2, double chi, int batches = 32);

struct WindowObservation {
  double size = 0.0;
  CorrelationEstimate density;
  CorrelationEstimate laplace;
  CorrelationEstimate s2;
  nlohmann::json to_json() const;
};

/// Bulk panel at the window center: density in the unit box around it,
/// L(h) and S2(x1, x2).
WindowObservation observe_window(std::span<const Configuration> samples, const Kernel& k, const Window& window,
                                 const TestFunction& h, const Point& x1, const Point& x2, int batches = 32);
/// Needs at least three sizes in increasing order. Fails when L(h)
/// increases beyond 3 stderr or successive differences grow beyond 3 stderr.
TestReport window_growth_study(std::span<const WindowObservation> obs);

/// |Im S| <= 3 stderr_im + n tau_q for a moment at real points.
TestReport reality_test(const std::string& name, const CorrelationEstimate& e, int n, double tau_q);

/// Mean-value property of phi^c over a circle of radius r in coordinate
/// `axis` around z, by the periodic trapezoid rule.
TestReport holomorphy_test(const Configuration& eta, const Kernel& k, const ComplexPoint& z, int axis, double r,
                           int nodes = 64);

/// Free-field checks with closed forms on a chain at beta = 0: count mean,
/// count variance, L(h), S1(x1) and S2(x1, x2).
std::vector<TestReport> poisson_null_suite(std::span<const Configuration> samples, const Kernel& k,
                                           const Window& window, double intensity, const TestFunction& h,
                                           const Point& x1, const Point& x2, int batches = 32);

}  // namespace wickfield
