#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>

#include "wickfield/sampler.hpp"
#include "wickfield/stats.hpp"

using namespace wickfield;

namespace {

std::vector<double> counts(const std::vector<Configuration>& s) {
  std::vector<double> c;
  c.reserve(s.size());
  for (const auto& eta : s) c.push_back(static_cast<double>(eta.size()));
  return c;
}

}  // namespace

TEST_CASE("acceptance probabilities satisfy detailed balance") {
  for (double p : {0.05, 0.7, 1.0, 3.0}) {
    for (std::size_t n : {0u, 1u, 4u, 30u}) {
      for (double sigma : {0.5, 2.0, 10.0}) {
        const double a = birth_acceptance(p, n, sigma);
        const double b = death_acceptance(p, n + 1, sigma);
        CHECK(a <= 1.0);
        CHECK(b <= 1.0);
        CHECK(a / b == doctest::Approx(p * sigma / (n + 1)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("a single step keeps the cache consistent") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), Window::box({{0.0, 1.0}}));
  SamplerConfig cfg;
  cfg.intensity = 3.0;
  ChainState s(p, 5);
  Diagnostics d;
  for (int i = 0; i < 200; ++i) {
    s.step(cfg, d);
    CHECK(std::abs(s.energy() - p.potential(s.configuration())) <= 1e-10 * std::max(1.0, s.energy()));
  }
  CHECK(d.steps == 200);
  CHECK(d.birth_proposals + d.death_proposals == 200);
  CHECK(s.resync() < 1e-10);
}

TEST_CASE("beta = 0 gives the Poisson count law") {
  const double intensity = 2.0;
  const PotentialSpec p(Profile::widom_rowlinson(), 0.0, Kernel::gaussian(1), Window::box({{0.0, 1.0}}));
  SamplerConfig cfg;
  cfg.intensity = intensity;
  cfg.burnin = 200;
  cfg.thin = 40;
  cfg.chains = 4;
  cfg.seed = 77;
  Diagnostics d;
  const auto s = sample(p, cfg, 20000, &d);
  const auto c = counts(s);
  const BatchMeans bm = batch_means(c);
  CHECK(std::abs(bm.mean - intensity) < 4.0 * bm.std_error);
  CHECK(d.iat_count < 2.0);

  const int bins = 7;
  std::vector<double> obs(bins, 0.0);
  for (double x : c) obs[std::min<int>(bins - 1, static_cast<int>(x))] += 1.0;
  double stat = 0.0;
  double tail = 1.0;
  for (int k = 0; k < bins; ++k) {
    double pk = std::exp(-intensity) * std::pow(intensity, k) / std::tgamma(k + 1.0);
    if (k == bins - 1) pk = tail;
    tail -= pk;
    const double e = pk * c.size();
    stat += (obs[k] - e) * (obs[k] - e) / e;
  }
  // thinned states are close to independent; allow the measured autocorrelation
  const double crit = boost::math::quantile(boost::math::chi_squared(bins - 1), 0.999);
  CHECK(stat <= crit * std::max(1.0, d.iat_count));
}

TEST_CASE("linear profile thins the Poisson process") {
  const double intensity = 3.0;
  const Window w = Window::box({{0.0, 2.0}});
  const PotentialSpec p(Profile::linear(), 1.0, Kernel::gaussian(1), w);
  SamplerConfig cfg;
  cfg.intensity = intensity;
  cfg.thin = 20;
  cfg.chains = 2;
  cfg.seed = 3;
  Diagnostics d;
  const auto s = sample(p, cfg, 20000, &d);
  const BatchMeans bm = batch_means(counts(s));
  const double expect = intensity * 2.0 * std::exp(-std::sqrt(std::numbers::pi));
  CHECK(std::abs(bm.mean - expect) < 4.0 * bm.std_error);
  CHECK(d.max_drift < cfg.drift_limit);
  CHECK(d.samples == 20000);
}

TEST_CASE("output is independent of the worker count") {
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(2),
                        Window::box({{0.0, 1.5}, {0.0, 1.5}}));
  SamplerConfig cfg;
  cfg.intensity = 1.5;
  cfg.burnin = 100;
  cfg.thin = 3;
  cfg.chains = 3;
  cfg.seed = 12;
  const auto a = sample(p, cfg, 300, nullptr, 1);
  const auto b = sample(p, cfg, 300, nullptr, 3);
  REQUIRE(a.size() == 300);
  CHECK(a == b);
  cfg.seed = 13;
  CHECK(sample(p, cfg, 300, nullptr, 2) != a);
}

TEST_CASE("configuration is validated") {
  SamplerConfig cfg;
  cfg.intensity = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.intensity = 1.0;
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
