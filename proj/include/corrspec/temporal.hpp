#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/correlation.hpp"
#include "corrspec/returns.hpp"
#include "corrspec/spectral.hpp"
#include "corrspec/stats.hpp"

namespace corrspec {

/// Rolling/lagged window geometry over the return axis.
struct WindowSpec {
  int length_T = 0;
  int shift = 0;  // lag tau for overlaps, step dt for rolling windows

  void validate(Eigen::Index panel_len, Errc overflow_error) const {
    if (length_T < 2) fail(Errc::bad_argument, "window length must be >= 2");
    if (shift < 0) fail(Errc::bad_argument, "window shift must be >= 0");
    if (static_cast<Eigen::Index>(length_T) > panel_len) {
      fail(overflow_error, "window of " + std::to_string(length_T) +
                               " days does not fit in a panel of " + std::to_string(panel_len));
    }
  }
};

/// O(t, tau) = D_A D_B^T between the top-k eigenvectors of two lagged
/// windows; the identity matrix when the eigenvectors are perfectly stable.
/// Signed values are stored; Fig.-style grayscale displays use the
/// magnitudes.
struct OverlapMatrix {
  Matrix values;  // k x k, row/col order: descending eigenvalue
  std::pair<std::string, std::string> window_a;
  std::pair<std::string, std::string> window_b;
  int tau = 0;

  Matrix magnitudes() const { return values.cwiseAbs(); }
};

/// Largest-eigenvalue composition tracked across overlapping windows.
struct MarketModeTrack {
  std::vector<std::string> symbols;
  std::vector<std::string> window_dates;  // label: last return date of each window
  Matrix contributions;                   // N x M, column m = u_0 of window m
  std::vector<std::string> consistency_rank;  // by mean |u_0,i|, ties lexicographic
  Vector lambda0;       // per-window largest eigenvalue
  Vector mean_offdiag;  // per-window mean off-diagonal correlation
  int window_length = 0;
  int step = 0;

  Eigen::Index n_windows() const { return contributions.cols(); }
};

namespace detail {

/// Window slice with window-local renormalization: each window's returns
/// are re-centered and re-scaled within the window so its correlation
/// matrix has an exactly unit diagonal.
inline ReturnPanel window_slice(const ReturnPanel& panel, int start, int length) {
  ReturnPanel slice;
  slice.symbols = panel.symbols;
  slice.sectors = panel.sectors;
  slice.dates.assign(panel.dates.begin() + start, panel.dates.begin() + start + length);
  slice.returns = panel.returns.middleCols(start, length);
  slice.normalized = false;
  return normalize(slice);
}

inline double mean_offdiagonal(const Matrix& c) {
  const Eigen::Index n = c.rows();
  if (n < 2) return 0.0;
  const double total = c.sum() - c.diagonal().sum();
  return total / static_cast<double>(n * (n - 1));
}

}  // namespace detail

/// Correlates window A = [t, t+T) with window B = [t+tau, t+tau+T):
/// each window is renormalized, decomposed, and the top-k unit
/// eigenvectors (descending eigenvalue, sign-fixed) form the rows of D.
inline OverlapMatrix overlap_matrix(const ReturnPanel& panel, int t, int T, int tau, int k = 10) {
  WindowSpec spec{T, tau};
  spec.validate(panel.n_obs(), Errc::window_out_of_bounds);
  if (t < 0 || static_cast<Eigen::Index>(t) + T + tau > panel.n_obs()) {
    fail(Errc::window_out_of_bounds,
         "windows [" + std::to_string(t) + ", " + std::to_string(t + T) + ") and [" +
             std::to_string(t + tau) + ", " + std::to_string(t + tau + T) +
             ") do not fit in a panel of " + std::to_string(panel.n_obs()) + " observations");
  }
  if (k < 1 || static_cast<Eigen::Index>(k) > panel.n_stocks()) {
    fail(Errc::bad_argument, "overlap rank k must lie in [1, N]");
  }

  const ReturnPanel slice_a = detail::window_slice(panel, t, T);
  const ReturnPanel slice_b = detail::window_slice(panel, t + tau, T);
  const SpectralDecomposition dec_a = eigendecompose(correlation_matrix(slice_a));
  const SpectralDecomposition dec_b = eigendecompose(correlation_matrix(slice_b));

  OverlapMatrix overlap;
  overlap.tau = tau;
  overlap.window_a = {slice_a.dates.front(), slice_a.dates.back()};
  overlap.window_b = {slice_b.dates.front(), slice_b.dates.back()};
  const Matrix d_a = dec_a.eigenvectors.topRows(k);
  const Matrix d_b = dec_b.eigenvectors.topRows(k);
  overlap.values.noalias() = d_a * d_b.transpose();
  return overlap;
}

/// Divides the panel into M = floor((T_panel - T) / dt) + 1 overlapping
/// windows and records the market mode of each.
inline MarketModeTrack rolling_market_mode(const ReturnPanel& panel, int T = 125, int dt = 21) {
  if (dt < 1) fail(Errc::bad_argument, "window step must be >= 1");
  WindowSpec spec{T, dt};
  spec.validate(panel.n_obs(), Errc::panel_too_short);

  const Eigen::Index n = panel.n_stocks();
  const int m_windows = static_cast<int>((panel.n_obs() - T) / dt) + 1;

  MarketModeTrack track;
  track.symbols = panel.symbols;
  track.window_length = T;
  track.step = dt;
  track.contributions.resize(n, m_windows);
  track.lambda0.resize(m_windows);
  track.mean_offdiag.resize(m_windows);

  for (int m = 0; m < m_windows; ++m) {
    const int start = m * dt;
    const ReturnPanel slice = detail::window_slice(panel, start, T);
    const CorrelationMatrix c = correlation_matrix(slice);
    const SpectralDecomposition dec = eigendecompose(c);
    track.window_dates.push_back(slice.dates.back());
    track.contributions.col(m) = dec.eigenvectors.row(0).transpose();
    track.lambda0(m) = dec.eigenvalues(0);
    track.mean_offdiag(m) = detail::mean_offdiagonal(c.values);
  }

  std::vector<std::pair<double, std::string>> ranked;
  for (Eigen::Index i = 0; i < n; ++i) {
    ranked.emplace_back(track.contributions.row(i).cwiseAbs().mean(),
                        panel.symbols[static_cast<std::size_t>(i)]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto& [weight, symbol] : ranked) track.consistency_rank.push_back(symbol);
  return track;
}

struct Lambda0Point {
  std::string window;
  double lambda0 = 0.0;
  double mean_corr = 0.0;
};

struct Lambda0Series {
  std::vector<Lambda0Point> points;
  double pearson_lambda_vs_mean = 0.0;  // 0 when either series is degenerate
};

/// The largest eigenvalue of a rolling correlation matrix tracks the
/// average correlation coefficient; this pairs the two series and reports
/// their Pearson correlation.
inline Lambda0Series lambda0_series(const MarketModeTrack& track) {
  Lambda0Series series;
  std::vector<double> lambda, mean_corr;
  for (Eigen::Index m = 0; m < track.n_windows(); ++m) {
    series.points.push_back(
        {track.window_dates[static_cast<std::size_t>(m)], track.lambda0(m), track.mean_offdiag(m)});
    lambda.push_back(track.lambda0(m));
    mean_corr.push_back(track.mean_offdiag(m));
  }
  if (lambda.size() >= 2) {
    series.pearson_lambda_vs_mean = pearson(lambda, mean_corr);
  }
  return series;
}

}  // namespace corrspec
