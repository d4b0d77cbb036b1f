#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/market_data.hpp"
#include "corrspec/returns.hpp"
#include "corrspec/rng.hpp"

namespace corrspec {

/// One correlated group of stocks: `members` stocks sharing a group factor
/// with common loading.
struct SectorSpec {
  int members = 0;
  double loading = 0.0;
};

/// Market + sector factor model
///   r_i(t) = beta_i f(t) + gamma_{s(i)} g_{s(i)}(t) + sigma eps_i(t)
/// with independent unit gaussians f, g_s, eps. Stocks are assigned to
/// sectors in declaration order; any remainder is sector-free.
struct FactorModelSpec {
  int n_stocks = 0;
  int n_days = 0;  // return observations generated (a price panel built from
                   // them gains one extra day)
  std::vector<double> market_beta{0.0};  // size 1 (scalar) or n_stocks
  std::vector<SectorSpec> sectors;
  double idiosyncratic_sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Closed-form population eigenvalues for the equal-loading case, used as
/// an oracle sketch by validation code. lambda0 is exact for a pure
/// single-factor market and ignores the (small) market-sector coupling
/// otherwise; sector entries treat each block in isolation.
struct ExpectedSpectrum {
  double lambda0 = 0.0;
  std::vector<double> sector_lambdas;
};

struct SyntheticMarket {
  ReturnPanel returns;      // normalized, ready for correlation_matrix
  ReturnPanel raw_returns;  // pre-normalization, drives price reconstruction
  std::vector<std::string> truth;  // per-stock sector label; "NONE" when sector-free
  ExpectedSpectrum expected;
};

namespace detail {

inline std::string padded_label(const char* prefix, int value, int width) {
  std::string digits = std::to_string(value);
  std::string out(prefix);
  for (int i = static_cast<int>(digits.size()); i < width; ++i) out += '0';
  return out + digits;
}

inline void validate_spec(const FactorModelSpec& spec) {
  if (spec.n_stocks < 1) fail(Errc::invalid_spec, "n_stocks must be >= 1");
  if (spec.n_days < 2) fail(Errc::invalid_spec, "n_days must be >= 2");
  if (!(spec.idiosyncratic_sigma > 0.0) || !std::isfinite(spec.idiosyncratic_sigma)) {
    fail(Errc::invalid_spec, "idiosyncratic sigma must be positive and finite");
  }
  if (spec.market_beta.empty() ||
      (spec.market_beta.size() != 1 &&
       spec.market_beta.size() != static_cast<std::size_t>(spec.n_stocks))) {
    fail(Errc::invalid_spec, "market_beta must be a scalar or one entry per stock");
  }
  for (double b : spec.market_beta) {
    if (!std::isfinite(b)) fail(Errc::invalid_spec, "non-finite market loading");
  }
  int total = 0;
  for (const auto& s : spec.sectors) {
    if (s.members < 1) fail(Errc::invalid_spec, "sector with fewer than 1 member");
    if (!std::isfinite(s.loading)) fail(Errc::invalid_spec, "non-finite sector loading");
    total += s.members;
  }
  if (total > spec.n_stocks) {
    fail(Errc::invalid_spec, "sector members (" + std::to_string(total) +
                                 ") exceed n_stocks (" + std::to_string(spec.n_stocks) + ")");
  }
}

}  // namespace detail

inline double beta_for_stock(const FactorModelSpec& spec, int i) {
  return spec.market_beta.size() == 1 ? spec.market_beta[0]
                                      : spec.market_beta[static_cast<std::size_t>(i)];
}

inline int sector_of_stock(const FactorModelSpec& spec, int i) {
  int offset = 0;
  for (std::size_t s = 0; s < spec.sectors.size(); ++s) {
    offset += spec.sectors[s].members;
    if (i < offset) return static_cast<int>(s);
  }
  return -1;  // sector-free
}

/// Analytic population correlation matrix of the model (exact, any spec);
/// the convergence oracle for sampled panels.
inline Matrix population_correlation(const FactorModelSpec& spec) {
  detail::validate_spec(spec);
  const int n = spec.n_stocks;
  const double s2 = spec.idiosyncratic_sigma * spec.idiosyncratic_sigma;
  std::vector<double> variance(static_cast<std::size_t>(n));
  std::vector<int> sector(static_cast<std::size_t>(n));
  std::vector<double> gamma(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double beta = beta_for_stock(spec, i);
    sector[static_cast<std::size_t>(i)] = sector_of_stock(spec, i);
    if (sector[static_cast<std::size_t>(i)] >= 0) {
      gamma[static_cast<std::size_t>(i)] =
          spec.sectors[static_cast<std::size_t>(sector[static_cast<std::size_t>(i)])].loading;
    }
    variance[static_cast<std::size_t>(i)] =
        beta * beta + gamma[static_cast<std::size_t>(i)] * gamma[static_cast<std::size_t>(i)] + s2;
  }
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double cov = beta_for_stock(spec, i) * beta_for_stock(spec, j);
      if (sector[static_cast<std::size_t>(i)] >= 0 &&
          sector[static_cast<std::size_t>(i)] == sector[static_cast<std::size_t>(j)]) {
        cov += gamma[static_cast<std::size_t>(i)] * gamma[static_cast<std::size_t>(j)];
      }
      const double corr = cov / std::sqrt(variance[static_cast<std::size_t>(i)] *
                                          variance[static_cast<std::size_t>(j)]);
      c(i, j) = corr;
      c(j, i) = corr;
    }
  }
  return c;
}

/// Draws a panel from the factor model. Draw order (market factor, sector
/// factors, then idiosyncratic noise row by row) is fixed: the same seed
/// reproduces the same panel bit for bit.
inline SyntheticMarket generate(const FactorModelSpec& spec) {
  detail::validate_spec(spec);
  const int n = spec.n_stocks;
  const int t_len = spec.n_days;
  Rng rng(spec.seed);

  std::vector<double> market(static_cast<std::size_t>(t_len));
  for (double& x : market) x = rng.gaussian();
  std::vector<std::vector<double>> group(spec.sectors.size(),
                                         std::vector<double>(static_cast<std::size_t>(t_len)));
  for (auto& g : group)
    for (double& x : g) x = rng.gaussian();

  SyntheticMarket market_out;
  ReturnPanel& raw = market_out.raw_returns;
  raw.returns.resize(n, t_len);
  for (int i = 0; i < n; ++i) {
    const double beta = beta_for_stock(spec, i);
    const int s = sector_of_stock(spec, i);
    const double gamma = s >= 0 ? spec.sectors[static_cast<std::size_t>(s)].loading : 0.0;
    for (int t = 0; t < t_len; ++t) {
      double r = beta * market[static_cast<std::size_t>(t)] +
                 spec.idiosyncratic_sigma * rng.gaussian();
      if (s >= 0) r += gamma * group[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
      raw.returns(i, t) = r;
    }
  }

  const int sym_width = std::max<int>(3, static_cast<int>(std::to_string(n).size()));
  for (int i = 0; i < n; ++i) {
    raw.symbols.push_back(detail::padded_label("S", i + 1, sym_width));
    const int s = sector_of_stock(spec, i);
    market_out.truth.push_back(s >= 0 ? "SEC" + std::to_string(s + 1) : "NONE");
  }
  raw.sectors = market_out.truth;
  for (int t = 0; t < t_len; ++t) raw.dates.push_back(detail::padded_label("D", t + 1, 6));

  market_out.returns = normalize(raw);

  // Equal-loading eigenvalue sketch.
  const double s2 = spec.idiosyncratic_sigma * spec.idiosyncratic_sigma;
  double rank_one = 0.0;
  double mean_bulk = 0.0;
  for (int i = 0; i < n; ++i) {
    const double beta = beta_for_stock(spec, i);
    const int s = sector_of_stock(spec, i);
    const double gamma = s >= 0 ? spec.sectors[static_cast<std::size_t>(s)].loading : 0.0;
    const double v = beta * beta + gamma * gamma + s2;
    rank_one += beta * beta / v;
    mean_bulk += s2 / v;
  }
  market_out.expected.lambda0 = mean_bulk / n + rank_one;
  for (const auto& s : spec.sectors) {
    // A lone block: bulk level plus m * gamma^2 / v.
    double v_needed = s2 + s.loading * s.loading;
    // Use the block's own beta only when beta is scalar; per-stock
    // overrides make the closed form inapplicable and the market term is
    // simply omitted from the block sketch.
    if (spec.market_beta.size() == 1) v_needed += spec.market_beta[0] * spec.market_beta[0];
    market_out.expected.sector_lambdas.push_back(
        (s2 + s.members * s.loading * s.loading) / v_needed);
  }
  return market_out;
}

/// Rebuilds a price panel by compounding raw log returns:
/// P(t+1) = P(t) * exp(R(t)); the inverse of log_returns at lag 1.
/// `base_date` labels the initial price row (defaults to the empty string,
/// which sorts before any real label).
inline PricePanel price_panel_from_returns(const ReturnPanel& panel, double initial_price,
                                           const std::string& base_date = "") {
  if (!(initial_price > 0.0) || !std::isfinite(initial_price)) {
    fail(Errc::bad_argument, "initial price must be positive and finite");
  }
  if (!panel.returns.allFinite()) {
    fail(Errc::bad_argument, "price reconstruction needs finite returns");
  }
  PricePanel prices;
  prices.symbols = panel.symbols;
  prices.sectors = panel.sectors;
  prices.dates.reserve(panel.dates.size() + 1);
  prices.dates.push_back(base_date);
  prices.dates.insert(prices.dates.end(), panel.dates.begin(), panel.dates.end());
  const Eigen::Index n = panel.n_stocks();
  const Eigen::Index t_eff = panel.n_obs();
  prices.prices.resize(n, t_eff + 1);
  prices.fill_mask = BoolArray::Constant(n, t_eff + 1, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    prices.prices(i, 0) = initial_price;
    for (Eigen::Index t = 0; t < t_eff; ++t) {
      prices.prices(i, t + 1) = prices.prices(i, t) * std::exp(panel.returns(i, t));
    }
  }
  return prices;
}

}  // namespace corrspec
