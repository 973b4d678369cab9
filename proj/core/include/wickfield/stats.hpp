#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace wickfield {

/// SplitMix64 finalizer; used to derive independent per-chain seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain);

struct BatchMeans {
  double mean = 0.0;
  double std_error = 0.0;
  int batches = 0;
  std::size_t n = 0;
};

/// Non-overlapping batch means. Sample i goes to batch floor(i * B / n).
BatchMeans batch_means(std::span<const double> x, int batches = 32);

struct ComplexBatchMeans {
  std::complex<double> mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  int batches = 0;
  std::size_t n = 0;
};

ComplexBatchMeans batch_means(std::span<const std::complex<double>> x, int batches = 32);

/// Integrated autocorrelation time from batch means: B var(batch mean) / var(x).
/// Returns 1 for series with zero variance.
double integrated_autocorrelation_time(std::span<const double> x, int batches = 32);

/// Sample mean and unbiased variance.
double mean(std::span<const double> x);
double variance(std::span<const double> x);

/// Sample covariance with a batch-means standard error of the covariance.
struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
CovarianceEstimate covariance(std::span<const double> a, std::span<const double> b, int batches = 32);

}  // namespace wickfield
