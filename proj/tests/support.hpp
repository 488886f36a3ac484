#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "tsou/rng.hpp"

namespace testing {

// Mean with a 100-batch standard error.
struct Estimate {
  double value;
  double se;
};

inline Estimate batch_estimate(const std::vector<double>& x,
                               const std::function<double(const double*, std::size_t)>& stat,
                               int batches = 100) {
  const std::size_t size = x.size() / batches;
  double sum = 0.0, sum_sq = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double v = stat(x.data() + b * size, size);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / batches;
  const double var = (sum_sq - batches * mean * mean) / (batches - 1);
  return {stat(x.data(), size * batches), std::sqrt(std::max(var, 0.0) / batches)};
}

inline double mean_of(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s / n;
}

inline double var_of(const double* x, std::size_t n) {
  const double m = mean_of(x, n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (x[i] - m) * (x[i] - m);
  return s / n;
}

inline Estimate mean_estimate(const std::vector<double>& x) { return batch_estimate(x, mean_of); }
inline Estimate var_estimate(const std::vector<double>& x) { return batch_estimate(x, var_of); }

inline bool within_sigmas(const Estimate& e, double truth, double sigmas = 4.0) {
  return std::abs(e.value - truth) <= sigmas * e.se;
}

inline std::vector<double> draws(int n, const std::function<double(tsou::RngStream&)>& f,
                                 std::uint64_t seed, std::uint64_t stream_id = 0) {
  tsou::RngStream s(seed, stream_id);
  std::vector<double> out(n);
  for (auto& v : out) v = f(s);
  return out;
}

// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

// Asymptotic critical values of the two-sample KS statistic.
inline double ks_two_sample_critical(std::size_t n, std::size_t m, double level) {
  const double c = level == 0.01 ? 1.628 : 1.358;
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

// Pearson chi-square statistic for samples on [lo, hi] split in equal bins,
// with bin probabilities from `bin_mass`.
struct ChiSquare {
  double statistic;
  double critical;  // 95% quantile
};

inline ChiSquare chi_square(const std::vector<double>& x, double lo, double hi, int bins,
                            const std::function<double(double, double)>& bin_mass) {
  std::vector<double> counts(bins, 0.0);
  for (const double v : x) {
    int k = static_cast<int>((v - lo) / (hi - lo) * bins);
    k = std::clamp(k, 0, bins - 1);
    counts[k] += 1.0;
  }
  double stat = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double e = x.size() * bin_mass(lo + (hi - lo) * k / bins, lo + (hi - lo) * (k + 1) / bins);
    stat += (counts[k] - e) * (counts[k] - e) / e;
  }
  boost::math::chi_squared dist(bins - 1);
  return {stat, boost::math::quantile(dist, 0.95)};
}

}  // namespace testing
