#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickfield/configurations.hpp"
#include "wickfield/interaction.hpp"

namespace wickfield {

struct SamplerConfig {
  /// sigma = intensity * lambda restricted to the potential's sampling window.
  double intensity = 1.0;
  long burnin = 1000;
  long thin = 10;
  /// Full recomputation of the cached field every this many accepted moves.
  long drift_check = 10000;
  double drift_limit = 1e-6;
  int chains = 1;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

struct Diagnostics {
  long steps = 0;
  long birth_proposals = 0;
  long birth_accepts = 0;
  long death_proposals = 0;
  long death_accepts = 0;
  long drift_checks = 0;
  double max_drift = 0.0;
  /// Integrated autocorrelation time of the window count (batch means).
  double iat_count = 1.0;
  double ess = 0.0;
  std::size_t samples = 0;

  double birth_rate() const { return birth_proposals ? static_cast<double>(birth_accepts) / birth_proposals : 0.0; }
  double death_rate() const { return death_proposals ? static_cast<double>(death_accepts) / death_proposals : 0.0; }
  void merge(const Diagnostics& o);
  nlohmann::json to_json() const;
};

/// min(1, p sigma(Lambda) / (n + 1)) for adding x to a configuration of n points.
double birth_acceptance(double papangelou, std::size_t n, double sigma_total);
/// min(1, n / (sigma(Lambda) p)) for removing x from a configuration of n
/// points, where p = papangelou(x, eta - delta_x).
double death_acceptance(double papangelou, std::size_t n, double sigma_total);

/// Configuration with the cached grid field Phi = G * eta, the cached energy
/// U(eta) and the stencil of every point.
class ChainState {
 public:
  ChainState(const PotentialSpec& p, std::uint64_t seed);

  const Configuration& configuration() const { return eta_; }
  const std::vector<double>& field() const { return phi_; }
  double energy() const { return energy_; }
  std::mt19937_64& rng() { return rng_; }

  /// One birth-or-death proposal. Returns true on acceptance.
  bool step(const SamplerConfig& cfg, Diagnostics& diag);
  /// Recomputes Phi and U; returns the largest discrepancy with the cache.
  double resync();

 private:
  const PotentialSpec* p_;
  Configuration eta_;
  std::vector<Stencil> stencils_;
  std::vector<double> phi_;
  double energy_ = 0.0;
  long accepted_since_check_ = 0;
  std::mt19937_64 rng_;
};

using SampleSink = std::function<void(const Configuration&)>;

/// One chain from the empty configuration: burn-in, then n_samples thinned
/// states passed to `sink` in order.
Diagnostics run_chain(const PotentialSpec& p, const SamplerConfig& cfg, std::uint64_t chain, long n_samples,
                      const SampleSink& sink);

/// cfg.chains independent chains with seeds derived from cfg.seed. Samples
/// are delivered chain by chain in chain order whatever the worker count;
/// workers buffer the samples of later chains until their turn.
Diagnostics run(const PotentialSpec& p, const SamplerConfig& cfg, long n_samples, const SampleSink& sink,
                int workers = 1);

/// Convenience: collect every sample.
std::vector<Configuration> sample(const PotentialSpec& p, const SamplerConfig& cfg, long n_samples,
                                  Diagnostics* diag = nullptr, int workers = 1);

}  // namespace wickfield
