#include <catch2/catch.hpp>

#include <cmath>
#include <cstring>

#include "corrspec/synth.hpp"
#include "corrspec/temporal.hpp"
#include "support/helpers.hpp"

using namespace corrspec;

namespace {

ReturnPanel stationary_market(int n, int t, double beta, std::uint64_t seed) {
  FactorModelSpec spec;
  spec.n_stocks = n;
  spec.n_days = t;  // generate() counts return observations
  spec.market_beta = {beta};
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = seed;
  return generate(spec).returns;
}

}  // namespace

TEST_CASE("overlap with zero lag is the identity", "[temporal]") {
  ReturnPanel panel = stationary_market(40, 400, 0.5, 9);
  OverlapMatrix o = overlap_matrix(panel, 10, 300, 0, 8);
  const Matrix abs_o = o.magnitudes();
  CHECK((abs_o.diagonal().array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK((abs_o - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(o.window_a == o.window_b);
  CHECK(o.tau == 0);
}

TEST_CASE("windows must fit inside the panel", "[temporal]") {
  ReturnPanel panel = stationary_market(10, 200, 0.5, 1);
  CHECK_THROWS_MATCHES(overlap_matrix(panel, 0, 150, 100, 5), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::window_out_of_bounds;
                       }));
  CHECK_THROWS_MATCHES(overlap_matrix(panel, 150, 100, 0, 5), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::window_out_of_bounds;
                       }));
  CHECK_THROWS_MATCHES(overlap_matrix(panel, 0, 100, 0, 11), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::bad_argument; }));
}

TEST_CASE("the market row stays stable while bulk rows decay", "[temporal]") {
  ReturnPanel panel = stationary_market(60, 425, 0.65, 33);
  OverlapMatrix o = overlap_matrix(panel, 0, 300, 125, 10);
  const Matrix abs_o = o.magnitudes();
  CHECK(abs_o(0, 0) >= 0.95);
  double bulk = 0.0;
  for (int j = 1; j < 10; ++j) bulk += abs_o(j, j);
  CHECK(bulk / 9.0 < 0.5);
  CHECK(abs_o.maxCoeff() <= 1.0 + 1e-9);
  // Row norms obey Cauchy-Schwarz on unit vectors.
  for (int j = 0; j < 10; ++j) CHECK(o.values.row(j).norm() <= 1.0 + 1e-9);
}

TEST_CASE("a panel of exactly one window length yields a single window", "[temporal]") {
  ReturnPanel panel = stationary_market(12, 125, 0.4, 2);
  MarketModeTrack track = rolling_market_mode(panel, 125, 21);
  CHECK(track.n_windows() == 1);
  CHECK(track.window_dates.size() == 1);
  CHECK(track.window_dates[0] == panel.dates.back());
}

TEST_CASE("window count follows floor((T_panel - T)/dt) + 1", "[temporal]") {
  ReturnPanel panel = stationary_market(12, 300, 0.4, 3);
  MarketModeTrack track = rolling_market_mode(panel, 125, 21);
  CHECK(track.n_windows() == (300 - 125) / 21 + 1);
  CHECK_THROWS_MATCHES(rolling_market_mode(panel, 301, 21), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::panel_too_short; }));
}

TEST_CASE("each tracked column is a unit, sign-fixed eigenvector", "[temporal]") {
  ReturnPanel panel = stationary_market(20, 250, 0.6, 8);
  MarketModeTrack track = rolling_market_mode(panel, 125, 50);
  for (Eigen::Index m = 0; m < track.n_windows(); ++m) {
    CHECK(track.contributions.col(m).norm() == Approx(1.0).epsilon(1e-9));
    CHECK(track.contributions.col(m).sum() >= 0.0);
  }
}

TEST_CASE("a dominant stock leads the consistency ranking", "[temporal]") {
  int wins = 0;
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    FactorModelSpec spec;
    spec.n_stocks = 30;
    spec.n_days = 500;
    std::vector<double> beta(30, 0.3);
    beta[7] = 0.9;  // three times everyone else
    spec.market_beta = beta;
    spec.idiosyncratic_sigma = 1.0;
    spec.seed = seed;
    MarketModeTrack track = rolling_market_mode(generate(spec).returns, 125, 21);
    if (track.consistency_rank.front() == "S008") ++wins;
  }
  CHECK(wins >= 4);
}

TEST_CASE("lambda0 tracks the mean correlation through time-varying coupling", "[temporal]") {
  // Market strength ramps up through the panel; each rolling window sees a
  // different regime.
  const int n = 50, t = 800;
  Rng rng(4321);
  std::vector<std::vector<double>> rows(n, std::vector<double>(t));
  for (int time = 0; time < t; ++time) {
    const double beta = 0.2 + 0.6 * time / (t - 1.0);
    const double f = rng.gaussian();
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(time)] =
        beta * f + rng.gaussian();
  }
  MarketModeTrack track = rolling_market_mode(helpers::panel_from_rows(rows), 125, 21);
  Lambda0Series series = lambda0_series(track);
  REQUIRE(series.points.size() == static_cast<std::size_t>(track.n_windows()));
  CHECK(series.pearson_lambda_vs_mean >= 0.95);
}

TEST_CASE("a constant-coupling market keeps both series flat", "[temporal]") {
  ReturnPanel panel = stationary_market(40, 700, 0.5, 66);
  Lambda0Series series = lambda0_series(rolling_market_mode(panel, 125, 21));
  double lo = 1e300, hi = -1e300;
  for (const auto& p : series.points) {
    lo = std::min(lo, p.lambda0);
    hi = std::max(hi, p.lambda0);
  }
  CHECK((hi - lo) / hi < 0.35);  // sampling noise only, no trend
}

TEST_CASE("a two-window panel emits two points", "[temporal]") {
  ReturnPanel panel = stationary_market(15, 146, 0.4, 5);
  Lambda0Series series = lambda0_series(rolling_market_mode(panel, 125, 21));
  CHECK(series.points.size() == 2);
}

TEST_CASE("recomputing one window reproduces its correlation bit for bit", "[temporal]") {
  ReturnPanel panel = stationary_market(25, 400, 0.5, 12);
  MarketModeTrack track = rolling_market_mode(panel, 125, 50);
  // Window 2 starts at 100.
  ReturnPanel slice;
  slice.symbols = panel.symbols;
  slice.sectors = panel.sectors;
  slice.dates.assign(panel.dates.begin() + 100, panel.dates.begin() + 225);
  slice.returns = panel.returns.middleCols(100, 125);
  SpectralDecomposition dec = eigendecompose(correlation_matrix(normalize(slice)));
  CHECK(dec.eigenvalues(0) == track.lambda0(2));
  for (Eigen::Index i = 0; i < 25; ++i) {
    CHECK(dec.eigenvectors(0, i) == track.contributions(i, 2));
  }
}

TEST_CASE("uniformly rescaling all prices leaves the consistency ranking unchanged",
          "[temporal]") {
  FactorModelSpec spec;
  spec.n_stocks = 18;
  spec.n_days = 301;
  std::vector<double> beta(18);
  for (int i = 0; i < 18; ++i) beta[static_cast<std::size_t>(i)] = 0.2 + 0.05 * i;
  spec.market_beta = beta;
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = 44;
  SyntheticMarket market = generate(spec);
  PricePanel prices = price_panel_from_returns(market.raw_returns, 100.0);
  PricePanel scaled = prices;
  scaled.prices *= 37.5;

  MarketModeTrack a = rolling_market_mode(normalize(log_returns(prices)), 125, 42);
  MarketModeTrack b = rolling_market_mode(normalize(log_returns(scaled)), 125, 42);
  CHECK(a.consistency_rank == b.consistency_rank);
}
