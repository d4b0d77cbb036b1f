#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/correlation.hpp"
#include "corrspec/jacobi.hpp"
#include "corrspec/stats.hpp"

namespace corrspec {

/// Full spectrum of a symmetric matrix, eigenvalues sorted descending
/// (index 0 is the market mode for a correlation matrix). Row j of
/// `eigenvectors` is the unit-norm eigenvector u_j with the sign fixed so
/// that sum_i u_ji >= 0; an exactly zero sum falls back to making the
/// largest-magnitude component positive.
///
/// Eigenvectors are unit norm internally. The sum(u^2) = N display
/// convention is a reporting scale: see display_components().
struct SpectralDecomposition {
  std::vector<std::string> symbols;  // empty when built from a bare matrix
  Vector eigenvalues;
  Matrix eigenvectors;  // row j = u_j
  int sweeps = 0;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Bulk / deviating partition of a spectrum against an RMT law. The
/// comparison is strict: an eigenvalue exactly on a bound counts as bulk.
struct SpectrumReport {
  RmtLaw law;
  std::vector<int> bulk;
  std::vector<int> deviating_above;
  std::vector<int> deviating_below;
  int market_index = 0;
};

inline SpectralDecomposition eigendecompose(const Matrix& c,
                                            std::vector<std::string> symbols = {}) {
  const Eigen::Index n = c.rows();
  if (n == 0 || c.cols() != n) fail(Errc::bad_argument, "eigendecompose needs a square matrix");
  double asym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      asym = std::max(asym, std::abs(c(i, j) - c(j, i)));
  if (asym > 1e-10) {
    fail(Errc::not_symmetric,
         "matrix is not symmetric: max |C - C^T| = " + format_double(asym));
  }
  if (!symbols.empty() && static_cast<Eigen::Index>(symbols.size()) != n) {
    fail(Errc::bad_argument, "symbol list does not match matrix size");
  }

  JacobiSpectrum raw = jacobi_eigensolve(c);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return raw.values(a) > raw.values(b);
  });

  SpectralDecomposition dec;
  dec.symbols = std::move(symbols);
  dec.sweeps = raw.sweeps;
  dec.eigenvalues.resize(n);
  dec.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    dec.eigenvalues(j) = raw.values(order[static_cast<std::size_t>(j)]);
    Vector u = raw.vectors.col(order[static_cast<std::size_t>(j)]);
    const double sum = u.sum();
    if (sum < 0.0) {
      u = -u;
    } else if (sum == 0.0) {
      Eigen::Index arg = 0;
      u.cwiseAbs().maxCoeff(&arg);
      if (u(arg) < 0.0) u = -u;
    }
    dec.eigenvectors.row(j) = u.transpose();
  }
  return dec;
}

inline SpectralDecomposition eigendecompose(const CorrelationMatrix& c) {
  return eigendecompose(c.values, c.symbols);
}

/// Inverse participation ratio I = sum_i u_i^4 of a unit-norm vector;
/// 1/N for a uniform vector, 1 for a single-component one.
inline double ipr(const Eigen::Ref<const Vector>& u) {
  const double norm2 = u.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-9) {
    fail(Errc::not_unit_norm,
         "ipr needs a unit-norm vector, got ||u||^2 = " + format_double(norm2));
  }
  return u.array().square().square().sum();
}

/// (eigenvalue, IPR) pairs in ascending eigenvalue order, ready to plot.
inline std::vector<std::pair<double, double>> ipr_profile(const SpectralDecomposition& dec) {
  std::vector<std::pair<double, double>> profile;
  const Eigen::Index n = dec.size();
  profile.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    profile.emplace_back(dec.eigenvalues(j), ipr(dec.eigenvectors.row(j).transpose()));
  }
  return profile;
}

/// Eigenvector components rescaled to the sum(u^2) = N display convention
/// used for Porter-Thomas comparisons and figures.
inline std::vector<double> display_components(const SpectralDecomposition& dec, int j) {
  if (j < 0 || j >= dec.size()) {
    fail(Errc::index_out_of_range, "eigenvector index " + std::to_string(j) + " out of range");
  }
  const double scale = std::sqrt(static_cast<double>(dec.size()));
  std::vector<double> out(static_cast<std::size_t>(dec.size()));
  for (Eigen::Index i = 0; i < dec.size(); ++i)
    out[static_cast<std::size_t>(i)] = scale * dec.eigenvectors(j, i);
  return out;
}

struct PorterThomasResult {
  double ks_statistic = 0.0;
  Histogram histogram;  // default 25 bins over [-4, 4]
};

/// Compares eigenvector components (scaled so sum(u^2) = N) against the
/// Porter-Thomas law, i.e. the standard gaussian. Bulk eigenvectors of a
/// random correlation matrix pass; structured modes do not.
inline PorterThomasResult porter_thomas_test(const std::vector<double>& components,
                                             int bins = 25) {
  if (components.empty()) fail(Errc::bad_argument, "porter_thomas_test of an empty vector");
  PorterThomasResult result;
  result.ks_statistic = ks_statistic_gaussian(components);
  result.histogram = make_histogram(components, bins, -4.0, 4.0);
  return result;
}

inline SpectrumReport classify_spectrum(const SpectralDecomposition& dec, const RmtLaw& law) {
  SpectrumReport report;
  report.law = law;
  for (Eigen::Index j = 0; j < dec.size(); ++j) {
    const double lambda = dec.eigenvalues(j);
    if (lambda > law.lambda_max) {
      report.deviating_above.push_back(static_cast<int>(j));
    } else if (lambda < law.lambda_min) {
      report.deviating_below.push_back(static_cast<int>(j));
    } else {
      report.bulk.push_back(static_cast<int>(j));
    }
  }
  return report;
}

struct SectorWeight {
  std::string sector;
  double weight = 0.0;        // sum over members of |u_ji|
  double share = 0.0;         // weight / total
  double energy_share = 0.0;  // sum over members of u_ji^2 (vector has unit norm)
};

struct SectorComposition {
  int index = 0;
  double eigenvalue = 0.0;
  double total_abs = 0.0;                           // sum_i |u_ji|
  std::vector<SectorWeight> by_sector;              // weight descending, ties by name
  std::vector<std::pair<std::string, double>> top;  // (symbol, |u_ji|) descending
};

/// Per-sector breakdown of sum |u_ji| for eigenvector j plus the top-k
/// contributing symbols. Symbols absent from the sector map fall into
/// "Miscellaneous".
inline SectorComposition sector_composition(const SpectralDecomposition& dec, int j,
                                            const std::map<std::string, std::string>& sectors,
                                            int top_k = 10) {
  if (j < 0 || j >= dec.size()) {
    fail(Errc::index_out_of_range, "eigenvector index " + std::to_string(j) + " out of range");
  }
  if (dec.symbols.empty()) {
    fail(Errc::bad_argument, "decomposition carries no symbols; sector breakdown undefined");
  }
  SectorComposition comp;
  comp.index = j;
  comp.eigenvalue = dec.eigenvalues(j);

  std::map<std::string, std::pair<double, double>> weights;  // sector -> (sum |u|, sum u^2)
  std::vector<std::pair<std::string, double>> contributions;
  double total_energy = 0.0;
  for (Eigen::Index i = 0; i < dec.size(); ++i) {
    const std::string& symbol = dec.symbols[static_cast<std::size_t>(i)];
    const double w = std::abs(dec.eigenvectors(j, i));
    auto it = sectors.find(symbol);
    auto& cell = weights[it == sectors.end() ? "Miscellaneous" : it->second];
    cell.first += w;
    cell.second += w * w;
    comp.total_abs += w;
    total_energy += w * w;
    contributions.emplace_back(symbol, w);
  }
  for (const auto& [sector, cell] : weights) {
    comp.by_sector.push_back({sector, cell.first,
                              comp.total_abs > 0.0 ? cell.first / comp.total_abs : 0.0,
                              total_energy > 0.0 ? cell.second / total_energy : 0.0});
  }
  std::sort(comp.by_sector.begin(), comp.by_sector.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.sector < b.sector;
  });
  std::sort(contributions.begin(), contributions.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (top_k < 0) top_k = 0;
  if (contributions.size() > static_cast<std::size_t>(top_k)) {
    contributions.resize(static_cast<std::size_t>(top_k));
  }
  comp.top = std::move(contributions);
  return comp;
}

}  // namespace corrspec
