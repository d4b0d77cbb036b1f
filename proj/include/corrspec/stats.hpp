#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corrspec/common.hpp"

namespace corrspec {

/// Uniform-bin histogram over [lo, hi]. Values outside the range are
/// counted in `dropped`, not binned.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
  std::int64_t dropped = 0;

  int bins() const { return static_cast<int>(counts.size()); }
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double center(int i) const { return lo + (i + 0.5) * bin_width(); }

  /// Empirical probability density at bin i (counts normalized so the
  /// histogram integrates to 1 over [lo, hi]).
  double density(int i) const {
    if (total == 0) return 0.0;
    return static_cast<double>(counts[i]) / (static_cast<double>(total) * bin_width());
  }
};

inline Histogram make_histogram(const std::vector<double>& values, int bins,
                                double lo, double hi) {
  if (bins < 1) fail(Errc::bad_argument, "histogram needs at least one bin");
  if (!(hi > lo)) fail(Errc::bad_argument, "histogram range is empty");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    if (v < lo || v > hi || !std::isfinite(v)) {
      ++h.dropped;
      continue;
    }
    int idx = static_cast<int>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;  // right edge is inclusive
    ++h.counts[static_cast<std::size_t>(idx)];
    ++h.total;
  }
  return h;
}

/// Range taken from the data; a degenerate (single-valued) range is widened
/// to +-0.5 around the value so everything lands in one occupied bin.
inline Histogram make_histogram(const std::vector<double>& values, int bins) {
  if (values.empty()) fail(Errc::bad_argument, "histogram of an empty sample");
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return make_histogram(values, bins, lo, hi);
}

/// Standard normal CDF.
inline double normal_cdf(double x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F| against an
/// arbitrary reference CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) fail(Errc::bad_argument, "KS distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

inline double ks_statistic_gaussian(const std::vector<double>& samples) {
  return ks_statistic(samples, [](double x) { return normal_cdf(x); });
}

/// Pearson correlation of two equal-length series; 0 when either series is
/// degenerate.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(Errc::bad_argument, "pearson: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

/// Adjusted Rand index between two labelings of the same item set.
/// 1 iff the partitions are identical up to relabeling; ~0 for independent
/// partitions; can be negative for worse-than-chance agreement.
template <typename LabelA, typename LabelB>
double adjusted_rand_index(const std::vector<LabelA>& a, const std::vector<LabelB>& b) {
  if (a.size() != b.size()) fail(Errc::bad_argument, "ARI: length mismatch");
  const std::size_t n = a.size();
  if (n == 0) fail(Errc::bad_argument, "ARI of an empty partition");

  std::map<LabelA, int> ia;
  std::map<LabelB, int> ib;
  std::vector<int> xa(n), xb(n);
  for (std::size_t i = 0; i < n; ++i) {
    xa[i] = static_cast<int>(ia.emplace(a[i], static_cast<int>(ia.size())).first->second);
    xb[i] = static_cast<int>(ib.emplace(b[i], static_cast<int>(ib.size())).first->second);
  }
  const std::size_t ka = ia.size(), kb = ib.size();
  std::vector<std::int64_t> ra(ka, 0), rb(kb, 0);
  std::map<std::pair<int, int>, std::int64_t> cells;
  for (std::size_t i = 0; i < n; ++i) {
    ++ra[static_cast<std::size_t>(xa[i])];
    ++rb[static_cast<std::size_t>(xb[i])];
    ++cells[{xa[i], xb[i]}];
  }
  auto choose2 = [](std::int64_t m) {
    return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  };
  double sum_cells = 0.0;
  for (const auto& [key, count] : cells) sum_cells += choose2(count);
  double sum_a = 0.0, sum_b = 0.0;
  for (auto m : ra) sum_a += choose2(m);
  for (auto m : rb) sum_b += choose2(m);
  const double pairs = choose2(static_cast<std::int64_t>(n));
  if (pairs == 0.0) return 1.0;  // single item: partitions trivially agree
  const double expected = sum_a * sum_b / pairs;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    // Both partitions are all-singletons or all-one-cluster.
    return sum_cells == max_index ? 1.0 : 0.0;
  }
  return (sum_cells - expected) / denom;
}

/// FNV-1a 64-bit hash; used for content fingerprints in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<std::uint64_t>(p[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace corrspec
