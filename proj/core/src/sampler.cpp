#include "wickfield/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "wickfield/quadrature.hpp"
#include "wickfield/stats.hpp"

namespace wickfield {

void SamplerConfig::validate() const {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw ValidationError("sampler.intensity: must be positive");
  if (burnin < 0) throw ValidationError("sampler.burnin: must be non-negative");
  if (thin < 1) throw ValidationError("sampler.thin: must be at least 1");
  if (drift_check < 1) throw ValidationError("sampler.drift_check: must be at least 1");
  if (!(drift_limit > 0.0)) throw ValidationError("sampler.drift_limit: must be positive");
  if (chains < 1) throw ValidationError("sampler.chains: must be at least 1");
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"intensity", intensity}, {"burnin", burnin},         {"thin", thin},
          {"drift_check", drift_check}, {"drift_limit", drift_limit}, {"chains", chains},
          {"seed", seed}};
}

void Diagnostics::merge(const Diagnostics& o) {
  steps += o.steps;
  birth_proposals += o.birth_proposals;
  birth_accepts += o.birth_accepts;
  death_proposals += o.death_proposals;
  death_accepts += o.death_accepts;
  drift_checks += o.drift_checks;
  max_drift = std::max(max_drift, o.max_drift);
  samples += o.samples;
}

nlohmann::json Diagnostics::to_json() const {
  return {{"steps", steps},
          {"birth_acceptance", birth_rate()},
          {"death_acceptance", death_rate()},
          {"birth_proposals", birth_proposals},
          {"death_proposals", death_proposals},
          {"drift_checks", drift_checks},
          {"max_drift", max_drift},
          {"iat_count", iat_count},
          {"ess", ess},
          {"samples", samples}};
}

double birth_acceptance(double papangelou, std::size_t n, double sigma_total) {
  return std::min(1.0, papangelou * sigma_total / static_cast<double>(n + 1));
}

double death_acceptance(double papangelou, std::size_t n, double sigma_total) {
  if (n == 0) return 0.0;
  return std::min(1.0, static_cast<double>(n) / (sigma_total * papangelou));
}

ChainState::ChainState(const PotentialSpec& p, std::uint64_t seed)
    : p_(&p), phi_(p.grid().size(), 0.0), rng_(seed) {}

bool ChainState::step(const SamplerConfig& cfg, Diagnostics& diag) {
  const PotentialSpec& p = *p_;
  const double sigma_total = cfg.intensity * p.sampling_window().volume();
  const double beta = p.beta();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ++diag.steps;
  bool accepted = false;
  if (unit(rng_) < 0.5) {
    ++diag.birth_proposals;
    const Point x = p.sampling_window().sample_uniform(rng_);
    Stencil sx = p.stencil(x);
    const double de = p.energy_diff_cached(sx, phi_);
    const double a = birth_acceptance(beta == 0.0 ? 1.0 : std::exp(-beta * de), eta_.size(), sigma_total);
    if (unit(rng_) < a) {
      for (std::size_t i = 0; i < sx.index.size(); ++i) phi_[sx.index[i]] += sx.value[i];
      energy_ += de;
      eta_.add(x);
      stencils_.push_back(std::move(sx));
      ++diag.birth_accepts;
      accepted = true;
    }
  } else {
    ++diag.death_proposals;
    const std::size_t n = eta_.size();
    if (n == 0) return false;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t i = pick(rng_);
    const Stencil& sx = stencils_[i];
    // energy of re-adding x to eta - delta_x, from the field without x
    std::vector<double> base(sx.index.size());
    for (std::size_t k = 0; k < sx.index.size(); ++k) base[k] = phi_[sx.index[k]] - sx.value[k];
    const auto w = p.grid().weights();
    CompensatedSum<double> acc;
    if (p.profile().kind() == Profile::Kind::Linear) {
      for (std::size_t k = 0; k < sx.index.size(); ++k) acc.add(w[sx.index[k]] * sx.value[k]);
    } else {
      for (std::size_t k = 0; k < sx.index.size(); ++k) acc.add(w[sx.index[k]] * p.profile().increment(base[k], sx.value[k]));
    }
    const double de = acc.value();
    const double a = death_acceptance(beta == 0.0 ? 1.0 : std::exp(-beta * de), n, sigma_total);
    if (unit(rng_) < a) {
      for (std::size_t k = 0; k < sx.index.size(); ++k) phi_[sx.index[k]] = base[k];
      energy_ -= de;
      eta_.remove(i);
      stencils_[i] = std::move(stencils_.back());
      stencils_.pop_back();
      ++diag.death_accepts;
      accepted = true;
    }
  }
  if (accepted && ++accepted_since_check_ >= cfg.drift_check) {
    accepted_since_check_ = 0;
    const double drift = resync();
    ++diag.drift_checks;
    diag.max_drift = std::max(diag.max_drift, drift);
    if (!(drift <= cfg.drift_limit)) {
      throw NumericalError("sampler: cached field drifted by " + std::to_string(drift) + " (limit " +
                           std::to_string(cfg.drift_limit) + ")");
    }
  }
  return accepted;
}

double ChainState::resync() {
  std::vector<double> fresh = p_->field_on_grid(eta_);
  double drift = 0.0;
  for (std::size_t i = 0; i < fresh.size(); ++i) drift = std::max(drift, std::abs(fresh[i] - phi_[i]));
  const double u = p_->potential_from_field(fresh);
  drift = std::max(drift, std::abs(u - energy_));
  phi_ = std::move(fresh);
  energy_ = u;
  return drift;
}

Diagnostics run_chain(const PotentialSpec& p, const SamplerConfig& cfg, std::uint64_t chain, long n_samples,
                      const SampleSink& sink) {
  cfg.validate();
  if (n_samples < 1) throw ValidationError("sampler: n_samples must be at least 1");
  ChainState state(p, chain_seed(cfg.seed, chain));
  Diagnostics diag;
  for (long s = 0; s < cfg.burnin; ++s) state.step(cfg, diag);
  std::vector<double> counts;
  counts.reserve(static_cast<std::size_t>(n_samples));
  for (long k = 0; k < n_samples; ++k) {
    for (long s = 0; s < cfg.thin; ++s) state.step(cfg, diag);
    counts.push_back(static_cast<double>(state.configuration().size()));
    sink(state.configuration());
  }
  const double drift = state.resync();
  ++diag.drift_checks;
  diag.max_drift = std::max(diag.max_drift, drift);
  if (!(drift <= cfg.drift_limit)) throw NumericalError("sampler: cached field drifted by " + std::to_string(drift));
  diag.samples = counts.size();
  if (counts.size() >= 64) diag.iat_count = integrated_autocorrelation_time(counts);
  diag.ess = static_cast<double>(counts.size()) / diag.iat_count;
  return diag;
}

Diagnostics run(const PotentialSpec& p, const SamplerConfig& cfg, long n_samples, const SampleSink& sink,
                int workers) {
  cfg.validate();
  if (n_samples < cfg.chains) throw ValidationError("sampler: fewer samples than chains");
  const int chains = cfg.chains;
  std::vector<long> per_chain(chains, n_samples / chains);
  for (long r = 0; r < n_samples % chains; ++r) ++per_chain[r];

  std::vector<double> counts;
  counts.reserve(static_cast<std::size_t>(n_samples));
  auto deliver = [&](const Configuration& eta) {
    counts.push_back(static_cast<double>(eta.size()));
    sink(eta);
  };

  std::vector<Diagnostics> diags(chains);
  workers = std::max(1, std::min(workers, chains));
  if (workers == 1) {
    for (int c = 0; c < chains; ++c) diags[c] = run_chain(p, cfg, c, per_chain[c], deliver);
  } else {
    std::vector<std::vector<Configuration>> buffers(chains);
    std::vector<std::exception_ptr> errors(chains);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int c = next++; c < chains; c = next++) {
          try {
            diags[c] = run_chain(p, cfg, c, per_chain[c], [&](const Configuration& eta) { buffers[c].push_back(eta); });
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (int c = 0; c < chains; ++c) {
      if (errors[c]) std::rethrow_exception(errors[c]);
      for (const auto& eta : buffers[c]) deliver(eta);
    }
  }
  Diagnostics total;
  for (const auto& d : diags) total.merge(d);
  if (counts.size() >= 64) total.iat_count = integrated_autocorrelation_time(counts);
  total.ess = static_cast<double>(counts.size()) / total.iat_count;
  return total;
}

std::vector<Configuration> sample(const PotentialSpec& p, const SamplerConfig& cfg, long n_samples,
                                  Diagnostics* diag, int workers) {
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  const Diagnostics d = run(p, cfg, n_samples, [&](const Configuration& eta) { out.push_back(eta); }, workers);
  if (diag) *diag = d;
  return out;
}

}  // namespace wickfield
