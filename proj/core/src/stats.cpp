#include "wickfield/stats.hpp"

#include <algorithm>
#include <cmath>

#include "wickfield/errors.hpp"
#include "wickfield/quadrature.hpp"

namespace wickfield {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain) {
  return splitmix64(splitmix64(master) ^ splitmix64(chain + 0x632be59bd9b4e019ULL));
}

namespace {

template <class T>
std::vector<T> batch_averages(std::span<const T> x, int batches) {
  if (batches < 2) throw ValidationError("batch means: need at least two batches");
  if (x.size() < static_cast<std::size_t>(batches)) {
    throw ValidationError("batch means: " + std::to_string(x.size()) + " samples is fewer than " +
                          std::to_string(batches) + " batches");
  }
  std::vector<CompensatedSum<T>> sums(batches);
  std::vector<std::size_t> counts(batches, 0);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i * static_cast<std::size_t>(batches) / n;
    sums[b].add(x[i]);
    ++counts[b];
  }
  std::vector<T> avg(batches);
  for (int b = 0; b < batches; ++b) avg[b] = sums[b].value() / static_cast<double>(counts[b]);
  return avg;
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  CompensatedSum<double> s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  CompensatedSum<double> s;
  for (double v : x) s.add((v - m) * (v - m));
  return s.value() / static_cast<double>(x.size() - 1);
}

BatchMeans batch_means(std::span<const double> x, int batches) {
  const auto avg = batch_averages(x, batches);
  BatchMeans r;
  r.batches = batches;
  r.n = x.size();
  r.mean = mean(x);
  r.std_error = std::sqrt(variance(avg) / batches);
  return r;
}

ComplexBatchMeans batch_means(std::span<const std::complex<double>> x, int batches) {
  const auto avg = batch_averages(x, batches);
  std::vector<double> re(batches);
  std::vector<double> im(batches);
  for (int b = 0; b < batches; ++b) {
    re[b] = avg[b].real();
    im[b] = avg[b].imag();
  }
  CompensatedSum<std::complex<double>> s;
  for (const auto& v : x) s.add(v);
  ComplexBatchMeans r;
  r.batches = batches;
  r.n = x.size();
  r.mean = s.value() / static_cast<double>(x.size());
  r.stderr_re = std::sqrt(variance(re) / batches);
  r.stderr_im = std::sqrt(variance(im) / batches);
  return r;
}

double integrated_autocorrelation_time(std::span<const double> x, int batches) {
  const double v = variance(x);
  if (!(v > 0.0)) return 1.0;
  const auto avg = batch_averages(x, batches);
  const double batch_len = static_cast<double>(x.size()) / batches;
  return std::max(1e-12, batch_len * variance(avg) / v);
}

CovarianceEstimate covariance(std::span<const double> a, std::span<const double> b, int batches) {
  if (a.size() != b.size()) throw ValidationError("covariance: series lengths differ");
  const double ma = mean(a);
  const double mb = mean(b);
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = (a[i] - ma) * (b[i] - mb);
  const BatchMeans bm = batch_means(p, batches);
  const double n = static_cast<double>(a.size());
  return {bm.mean * n / (n - 1.0), bm.std_error * n / (n - 1.0)};
}

}  // namespace wickfield
