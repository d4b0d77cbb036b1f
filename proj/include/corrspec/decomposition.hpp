#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/spectral.hpp"
#include "corrspec/stats.hpp"

namespace corrspec {

/// Spectral split of a correlation matrix into market, sector (group) and
/// random parts:
///
///   C_market = lambda_0 u_0 u_0^T
///   C_sector = sum_{j=1..n_s} lambda_j u_j u_j^T
///   C_random = sum_{j=n_s+1..N-1} lambda_j u_j u_j^T
///
/// The eigenvalue weights appear in all three sums so the parts add back
/// to C exactly (spectral theorem); C_market has rank one.
struct CorrelationComponents {
  std::vector<std::string> symbols;
  Matrix market;
  Matrix sector;
  Matrix random;
  int n_s = 0;
};

inline CorrelationComponents decompose(const SpectralDecomposition& dec, int n_s) {
  const Eigen::Index n = dec.size();
  if (n < 3) fail(Errc::bad_argument, "decompose needs at least a 3x3 spectrum");
  if (n_s < 1 || n_s > static_cast<int>(n) - 2) {
    fail(Errc::ns_out_of_range, "n_s must lie in [1, N-2] = [1, " + std::to_string(n - 2) +
                                    "], got " + std::to_string(n_s));
  }

  CorrelationComponents parts;
  parts.symbols = dec.symbols;
  parts.n_s = n_s;

  // Explicit outer product: scaling one factor (as an expression rewrite
  // would) breaks exact symmetry in the last ulp.
  const Vector u0 = dec.eigenvectors.row(0).transpose();
  parts.market.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double value = dec.eigenvalues(0) * (u0(i) * u0(j));
      parts.market(i, j) = value;
      parts.market(j, i) = value;
    }
  }

  auto weighted_sum = [&](Eigen::Index first, Eigen::Index last) {  // inclusive range
    const Eigen::Index count = last - first + 1;
    const Matrix block = dec.eigenvectors.middleRows(first, count);
    const Vector lambdas = dec.eigenvalues.segment(first, count);
    Matrix sum;
    sum.noalias() = block.transpose() * lambdas.asDiagonal() * block;
    // gemm may differ across the diagonal in the last ulp; keep the parts
    // exactly symmetric.
    sum = ((sum + sum.transpose()) * 0.5).eval();
    return sum;
  };
  parts.sector = weighted_sum(1, n_s);
  parts.random = weighted_sum(n_s + 1, n - 1);
  return parts;
}

/// Data-driven guess for the number of intermediate (sector) eigenvalues:
/// everything above the RMT bulk except the market mode. Advisory; the
/// caller confirms or overrides, since near-bulk modes are ambiguous.
struct NsSuggestion {
  int suggested = 1;
  int rationale = 0;  // count of eigenvalues above lambda_max, minus the market
  bool confident = false;
  std::string note;
};

inline NsSuggestion suggest_ns(const SpectralDecomposition& dec, const RmtLaw& law) {
  const SpectrumReport report = classify_spectrum(dec, law);
  NsSuggestion s;
  const int above = static_cast<int>(report.deviating_above.size());
  s.rationale = std::max(0, above - 1);
  s.suggested = std::max(1, s.rationale);
  s.confident = s.rationale >= 1;
  if (!s.confident) {
    s.note = "no eigenvalues above the bulk besides (at most) the market mode; "
             "the sector component may be noise";
  }
  return s;
}

/// Histogram of the off-diagonal (upper triangle) elements of one
/// component, 100 bins over the observed range by default.
inline Histogram element_distribution(const Matrix& component, int bins = 100) {
  const Eigen::Index n = component.rows();
  if (n < 2 || component.cols() != n) {
    fail(Errc::bad_argument, "element_distribution needs a square matrix of size >= 2");
  }
  std::vector<double> elements;
  elements.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) elements.push_back(component(i, j));
  return make_histogram(elements, bins);
}

}  // namespace corrspec
