#include <catch2/catch.hpp>

#include <cmath>

#include "corrspec/correlation.hpp"
#include "corrspec/spectral.hpp"
#include "corrspec/synth.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace corrspec;

TEST_CASE("the 2x2 correlation matrix has its analytic spectrum", "[spectral]") {
  const double c = 0.3;
  Matrix m(2, 2);
  m << 1.0, c, c, 1.0;
  SpectralDecomposition dec = eigendecompose(m);
  CHECK(dec.eigenvalues(0) == Approx(1.0 + c).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) == Approx(1.0 - c).epsilon(1e-12));
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  // Sign convention: (1,1)/sqrt(2) for the top mode; the zero-sum second
  // mode falls back to a positive leading component, giving (1,-1)/sqrt(2).
  CHECK(dec.eigenvectors(0, 0) == Approx(inv_root2).epsilon(1e-12));
  CHECK(dec.eigenvectors(0, 1) == Approx(inv_root2).epsilon(1e-12));
  CHECK(dec.eigenvectors(1, 0) == Approx(inv_root2).epsilon(1e-12));
  CHECK(dec.eigenvectors(1, 1) == Approx(-inv_root2).epsilon(1e-12));
}

TEST_CASE("the identity matrix has a flat spectrum", "[spectral]") {
  SpectralDecomposition dec = eigendecompose(Matrix::Identity(8, 8));
  for (Eigen::Index j = 0; j < 8; ++j) {
    CHECK(dec.eigenvalues(j) == 1.0);
    const double i = ipr(dec.eigenvectors.row(j).transpose());
    CHECK(i >= 1.0 / 8 - 1e-12);
    CHECK(i <= 1.0 + 1e-12);
  }
}

TEST_CASE("random 3x3 eigenvalues match the characteristic-polynomial bisection oracle",
          "[spectral]") {
  Rng rng(314);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix a = helpers::random_symmetric(3, rng);
    SpectralDecomposition dec = eigendecompose(a);
    std::vector<double> reference = oracles::eigenvalues_by_bisection(a);
    for (int k = 0; k < 3; ++k) {
      CHECK(dec.eigenvalues(2 - k) == Approx(reference[static_cast<std::size_t>(k)]).margin(1e-9));
    }
  }
}

TEST_CASE("eigenpairs satisfy residual, orthonormality, reconstruction and trace bounds",
          "[spectral]") {
  FactorModelSpec spec;
  spec.n_stocks = 35;
  spec.n_days = 500;
  spec.market_beta = {0.5};
  spec.sectors = {{10, 0.6}};
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = 17;
  CorrelationMatrix c = correlation_matrix(generate(spec).returns, CorrSource::synthetic);
  SpectralDecomposition dec = eigendecompose(c);
  const Eigen::Index n = dec.size();

  Matrix recon = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector u = dec.eigenvectors.row(j).transpose();
    CHECK((c.values * u - dec.eigenvalues(j) * u).cwiseAbs().maxCoeff() < 1e-9);
    recon += dec.eigenvalues(j) * (u * u.transpose());
    CHECK(dec.eigenvectors.row(j).sum() >= 0.0);
  }
  Matrix gram = dec.eigenvectors * dec.eigenvectors.transpose();
  CHECK((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((recon - c.values).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(dec.eigenvalues.sum() - c.values.trace()) < 1e-8 * n);
  // Descending order.
  for (Eigen::Index j = 1; j < n; ++j) CHECK(dec.eigenvalues(j - 1) >= dec.eigenvalues(j));
}

TEST_CASE("decomposition is bit-stable across reruns", "[spectral]") {
  Rng rng(2718);
  Matrix a = helpers::random_symmetric(20, rng);
  SpectralDecomposition first = eigendecompose(a);
  SpectralDecomposition second = eigendecompose(a);
  CHECK((first.eigenvalues.array() == second.eigenvalues.array()).all());
  CHECK((first.eigenvectors.array() == second.eigenvectors.array()).all());
}

TEST_CASE("asymmetric input is rejected", "[spectral]") {
  Matrix a(2, 2);
  a << 1.0, 0.2, 0.1, 1.0;
  CHECK_THROWS_MATCHES(eigendecompose(a), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::not_symmetric; }));
}

TEST_CASE("ipr endpoints: uniform, single-component, two-component", "[spectral]") {
  const int n = 25;
  Vector uniform = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  CHECK(ipr(uniform) == Approx(1.0 / n).epsilon(1e-12));

  Vector single = Vector::Zero(n);
  single(3) = 1.0;
  CHECK(ipr(single) == 1.0);

  Vector pair = Vector::Zero(n);
  pair(0) = pair(1) = 1.0 / std::sqrt(2.0);
  CHECK(ipr(pair) == Approx(0.5).epsilon(1e-12));

  Vector unnormalized = Vector::Constant(n, 1.0);
  CHECK_THROWS_MATCHES(ipr(unnormalized), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::not_unit_norm; }));
}

TEST_CASE("bulk IPRs of a surrogate cluster near 3/N", "[spectral]") {
  FactorModelSpec spec;
  spec.n_stocks = 101;
  spec.n_days = 1301;
  spec.market_beta = {0.0};
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = 55;
  CorrelationMatrix c = surrogate_correlation(generate(spec).returns, 7);
  SpectralDecomposition dec = eigendecompose(c);
  auto profile = ipr_profile(dec);
  REQUIRE(profile.size() == 101);
  // Ascending eigenvalue order for plotting.
  for (std::size_t i = 1; i < profile.size(); ++i)
    CHECK(profile[i - 1].first <= profile[i].first);
  std::vector<double> iprs;
  for (const auto& [lambda, i] : profile) iprs.push_back(i);
  std::sort(iprs.begin(), iprs.end());
  const double median = iprs[iprs.size() / 2];
  const double expected = 3.0 / 101.0;
  CHECK(median > 0.7 * expected);
  CHECK(median < 1.3 * expected);
}

TEST_CASE("a planted single-factor matrix has the analytic top eigenpair", "[spectral]") {
  const int n = 50;
  const double rho = 0.35;
  Matrix c = Matrix::Constant(n, n, rho);
  for (int i = 0; i < n; ++i) c(i, i) = 1.0;
  SpectralDecomposition dec = eigendecompose(c);
  CHECK(dec.eigenvalues(0) == Approx(1.0 + (n - 1) * rho).margin(1e-9));
  const double uniform = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) CHECK(dec.eigenvectors(0, i) == Approx(uniform).margin(1e-9));
  CHECK(ipr(dec.eigenvectors.row(0).transpose()) == Approx(1.0 / n).margin(1e-9));
  for (Eigen::Index j = 1; j < n; ++j) CHECK(dec.eigenvalues(j) == Approx(1.0 - rho).margin(1e-9));
}

TEST_CASE("porter-thomas accepts gaussian components and rejects flat ones", "[spectral]") {
  Rng rng(808);
  std::vector<double> gaussian(10000);
  for (double& g : gaussian) g = rng.gaussian();
  PorterThomasResult ok = porter_thomas_test(gaussian);
  CHECK(ok.ks_statistic < 0.02);
  CHECK(ok.histogram.bins() == 25);
  CHECK(ok.histogram.lo == -4.0);
  CHECK(ok.histogram.hi == 4.0);

  PorterThomasResult flat = porter_thomas_test(std::vector<double>(100, 1.0));
  CHECK(flat.ks_statistic > 0.4);
}

TEST_CASE("bulk eigenvectors of a surrogate pass porter-thomas", "[spectral]") {
  FactorModelSpec spec;
  spec.n_stocks = 120;
  spec.n_days = 1400;
  spec.market_beta = {0.6};
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = 4;
  CorrelationMatrix c = surrogate_correlation(generate(spec).returns, 12);
  SpectralDecomposition dec = eigendecompose(c);
  RmtLaw law = mp_bounds(c.q);
  SpectrumReport report = classify_spectrum(dec, law);
  REQUIRE(report.bulk.size() > 50);
  const double bound = 3.0 / std::sqrt(static_cast<double>(dec.size()));
  int within = 0;
  for (int j : report.bulk) {
    if (porter_thomas_test(display_components(dec, j)).ks_statistic < bound) ++within;
  }
  // A handful of edge vectors may exceed the bound; most must pass.
  CHECK(within >= static_cast<int>(0.9 * report.bulk.size()));
}

TEST_CASE("spectrum classification partitions strictly against the law", "[spectral]") {
  SpectralDecomposition identity = eigendecompose(Matrix::Identity(10, 10));
  SpectrumReport all_bulk = classify_spectrum(identity, mp_bounds(4.0));
  CHECK(all_bulk.bulk.size() == 10);
  CHECK(all_bulk.deviating_above.empty());
  CHECK(all_bulk.deviating_below.empty());
  CHECK(all_bulk.market_index == 0);

  // Planted market in the regime far above the bulk edge.
  const int n = 201;
  const double rho = 0.225;  // lambda_0 = 1 + 200 * 0.225 = 46
  Matrix c = Matrix::Constant(n, n, rho);
  for (int i = 0; i < n; ++i) c(i, i) = 1.0;
  SpectralDecomposition dec = eigendecompose(c);
  SpectrumReport report = classify_spectrum(dec, mp_bounds(12.97));
  REQUIRE_FALSE(report.deviating_above.empty());
  CHECK(report.deviating_above.front() == 0);
  CHECK(dec.eigenvalues(0) == Approx(46.0).margin(1e-8));

  // Exhaustive and disjoint.
  CHECK(report.bulk.size() + report.deviating_above.size() + report.deviating_below.size() ==
        static_cast<std::size_t>(n));
}

TEST_CASE("a surrogate spectrum leaks at most a couple of eigenvalues above", "[spectral]") {
  FactorModelSpec spec;
  spec.n_stocks = 201;
  spec.n_days = 2608;
  spec.market_beta = {0.0};
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = 99;
  CorrelationMatrix c = surrogate_correlation(generate(spec).returns, 1);
  SpectrumReport report = classify_spectrum(eigendecompose(c), mp_bounds(c.q));
  CHECK(report.deviating_above.size() <= 2);
}

TEST_CASE("sector composition concentrates where the weight is", "[spectral]") {
  SpectralDecomposition dec;
  dec.symbols = {"T1", "T2", "T3", "E1", "E2"};
  dec.eigenvalues = Vector::Zero(5);
  dec.eigenvectors = Matrix::Zero(5, 5);
  const double w = 1.0 / std::sqrt(3.0);
  dec.eigenvectors(0, 0) = w;
  dec.eigenvectors(0, 1) = w;
  dec.eigenvectors(0, 2) = w;
  std::map<std::string, std::string> sectors{
      {"T1", "Technology"}, {"T2", "Technology"}, {"T3", "Technology"},
      {"E1", "Energy"}, {"E2", "Energy"}};
  SectorComposition comp = sector_composition(dec, 0, sectors, 2);
  REQUIRE_FALSE(comp.by_sector.empty());
  CHECK(comp.by_sector.front().sector == "Technology");
  CHECK(comp.by_sector.front().share == Approx(1.0));
  CHECK(comp.by_sector.front().energy_share == Approx(1.0));
  REQUIRE(comp.top.size() == 2);
  CHECK(comp.top[0].first == "T1");  // equal weights tie-break lexicographically
  CHECK(comp.top[1].first == "T2");

  double total = 0.0;
  for (const auto& s : comp.by_sector) total += s.weight;
  CHECK(total == Approx(comp.total_abs));

  CHECK_THROWS_MATCHES(sector_composition(dec, 9, sectors), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::index_out_of_range; }));
}

TEST_CASE("a uniform eigenvector splits across sectors by head count", "[spectral]") {
  const int n = 10;
  SpectralDecomposition dec;
  dec.eigenvalues = Vector::Zero(n);
  dec.eigenvectors = Matrix::Zero(n, n);
  std::map<std::string, std::string> sectors;
  for (int i = 0; i < n; ++i) {
    dec.symbols.push_back("S" + std::to_string(i));
    dec.eigenvectors(0, i) = 1.0 / std::sqrt(static_cast<double>(n));
    sectors[dec.symbols.back()] = i < 4 ? "A" : "B";  // sizes 4 and 6
  }
  SectorComposition comp = sector_composition(dec, 0, sectors);
  REQUIRE(comp.by_sector.size() == 2);
  CHECK(comp.by_sector[0].sector == "B");
  CHECK(comp.by_sector[0].share == Approx(0.6));
  CHECK(comp.by_sector[1].share == Approx(0.4));
}

TEST_CASE("planted two-sector eigenvectors concentrate in their sectors", "[spectral]") {
  FactorModelSpec spec;
  spec.n_stocks = 60;
  spec.n_days = 2000;
  spec.sectors = {{14, 0.3}, {20, 0.3}};
  spec.idiosyncratic_sigma = 0.1;
  std::vector<double> beta(60, 0.0);
  for (int i = 34; i < 60; ++i) beta[i] = 0.25;  // a diversified block carries the market
  spec.market_beta = beta;
  spec.seed = 502;
  SyntheticMarket market = generate(spec);
  SpectralDecomposition dec =
      eigendecompose(correlation_matrix(market.returns, CorrSource::synthetic));
  auto sectors = market.returns.sector_map();
  std::vector<std::string> owners;
  for (int j = 1; j <= 2; ++j) {
    SectorComposition comp = sector_composition(dec, j, sectors);
    CHECK(comp.by_sector.front().share >= 0.80);
    owners.push_back(comp.by_sector.front().sector);
  }
  std::sort(owners.begin(), owners.end());
  CHECK(owners == std::vector<std::string>{"SEC1", "SEC2"});
}

TEST_CASE("a near-duplicate pair localizes the smallest eigenvector", "[spectral]") {
  // Two stocks sharing almost all of their variance: their difference mode
  // carries the smallest eigenvalue and lives on just those two stocks.
  Rng rng(606);
  const int n = 20, t = 1500;
  std::vector<std::vector<double>> rows(n, std::vector<double>(t));
  for (int time = 0; time < t; ++time) {
    const double common = rng.gaussian();
    for (int i = 0; i < n; ++i) {
      double v = 0.3 * common + rng.gaussian();
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(time)] = v;
    }
    // Stock 1 shadows stock 0.
    rows[1][static_cast<std::size_t>(time)] =
        rows[0][static_cast<std::size_t>(time)] + 0.1 * rng.gaussian();
  }
  CorrelationMatrix c = correlation_matrix(normalize(helpers::panel_from_rows(rows)));
  SpectralDecomposition dec = eigendecompose(c);
  const Eigen::Index last = dec.size() - 1;
  const double pair_mass =
      dec.eigenvectors(last, 0) * dec.eigenvectors(last, 0) +
      dec.eigenvectors(last, 1) * dec.eigenvectors(last, 1);
  CHECK(pair_mass > 0.95);
  CHECK(ipr(dec.eigenvectors.row(last).transpose()) > 0.4);
}

TEST_CASE("display components carry the sum-of-squares = N convention", "[spectral]") {
  SpectralDecomposition dec = eigendecompose(Matrix::Identity(9, 9));
  auto comps = display_components(dec, 0);
  double sum2 = 0.0;
  for (double v : comps) sum2 += v * v;
  CHECK(sum2 == Approx(9.0).epsilon(1e-12));
}
