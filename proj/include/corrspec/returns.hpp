#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/market_data.hpp"

namespace corrspec {

/// Panel of log returns, one row per stock. When `normalized` is set each
/// row has zero time-mean and unit population standard deviation; the
/// means and sigmas that were divided out are kept for reporting.
struct ReturnPanel {
  std::vector<std::string> symbols;
  std::vector<std::string> sectors;
  std::vector<std::string> dates;  // label of the later day of each return
  Matrix returns;                  // N x T_eff
  bool normalized = false;
  Vector per_stock_mean;   // set by normalize()
  Vector per_stock_sigma;  // set by normalize(), all > 0

  Eigen::Index n_stocks() const { return returns.rows(); }
  Eigen::Index n_obs() const { return returns.cols(); }

  std::map<std::string, std::string> sector_map() const {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < symbols.size(); ++i) m[symbols[i]] = sectors[i];
    return m;
  }
};

/// R_i(t) = ln P_i(t + lag) - ln P_i(t). A forward-filled day repeats the
/// preceding price, so it contributes a zero return at lag 1.
inline ReturnPanel log_returns(const PricePanel& panel, int lag = 1) {
  if (lag < 1) fail(Errc::bad_argument, "return lag must be >= 1");
  const Eigen::Index n = panel.n_stocks();
  const Eigen::Index t_days = panel.n_days();
  if (lag >= t_days) {
    fail(Errc::lag_too_large, "lag " + std::to_string(lag) + " does not fit in a panel of " +
                                  std::to_string(t_days) + " days");
  }
  ReturnPanel out;
  out.symbols = panel.symbols;
  out.sectors = panel.sectors;
  out.dates.assign(panel.dates.begin() + lag, panel.dates.end());
  const Eigen::Index t_eff = t_days - lag;
  out.returns.resize(n, t_eff);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < t_eff; ++t) {
      out.returns(i, t) = std::log(panel.prices(i, t + lag)) - std::log(panel.prices(i, t));
    }
  }
  return out;
}

/// r_i = (R_i - <R_i>) / sigma_i rowwise, with population (1/T) variance so
/// that the correlation matrix keeps an exactly unit diagonal.
inline ReturnPanel normalize(const ReturnPanel& raw) {
  const Eigen::Index n = raw.n_stocks();
  const Eigen::Index t = raw.n_obs();
  if (n == 0 || t < 2) fail(Errc::bad_argument, "normalize needs N >= 1 and T >= 2");

  ReturnPanel out = raw;
  out.per_stock_mean.resize(n);
  out.per_stock_sigma.resize(n);
  std::vector<std::string> flat;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = raw.returns.row(i).mean();
    // Two passes: deviations of a constant row are exactly zero, so a flat
    // series yields sigma == 0 rather than rounding noise.
    const auto dev = raw.returns.row(i).array() - mean;
    const double sigma = std::sqrt(dev.square().sum() / static_cast<double>(t));
    out.per_stock_mean(i) = mean;
    out.per_stock_sigma(i) = sigma;
    if (sigma > 0.0 && std::isfinite(sigma)) {
      out.returns.row(i) = dev / sigma;
    } else {
      flat.push_back(raw.symbols[static_cast<std::size_t>(i)]);
    }
  }
  if (!flat.empty()) {
    std::string msg = "zero-volatility stocks:";
    for (const auto& s : flat) msg += " " + s;
    fail(Errc::zero_volatility, msg + " (drop them and retry)");
  }
  out.normalized = true;
  return out;
}

/// Removes the named stocks; the usual recovery after a zero-volatility
/// error.
inline ReturnPanel drop_symbols(const ReturnPanel& panel, const std::vector<std::string>& drop) {
  const std::set<std::string> gone(drop.begin(), drop.end());
  ReturnPanel out;
  out.dates = panel.dates;
  out.normalized = panel.normalized;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < panel.n_stocks(); ++i) {
    if (!gone.count(panel.symbols[static_cast<std::size_t>(i)])) keep.push_back(i);
  }
  out.returns.resize(static_cast<Eigen::Index>(keep.size()), panel.n_obs());
  if (panel.per_stock_mean.size() == panel.n_stocks()) {
    out.per_stock_mean.resize(static_cast<Eigen::Index>(keep.size()));
    out.per_stock_sigma.resize(static_cast<Eigen::Index>(keep.size()));
  }
  for (std::size_t row = 0; row < keep.size(); ++row) {
    const Eigen::Index i = keep[row];
    out.symbols.push_back(panel.symbols[static_cast<std::size_t>(i)]);
    out.sectors.push_back(panel.sectors[static_cast<std::size_t>(i)]);
    out.returns.row(static_cast<Eigen::Index>(row)) = panel.returns.row(i);
    if (out.per_stock_mean.size() > 0) {
      out.per_stock_mean(static_cast<Eigen::Index>(row)) = panel.per_stock_mean(i);
      out.per_stock_sigma(static_cast<Eigen::Index>(row)) = panel.per_stock_sigma(i);
    }
  }
  return out;
}

}  // namespace corrspec
