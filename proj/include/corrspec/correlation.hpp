#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/returns.hpp"
#include "corrspec/rng.hpp"
#include "corrspec/stats.hpp"

namespace corrspec {

enum class CorrSource { empirical, surrogate, synthetic, component };

inline const char* corr_source_name(CorrSource s) {
  switch (s) {
    case CorrSource::empirical: return "empirical";
    case CorrSource::surrogate: return "surrogate";
    case CorrSource::synthetic: return "synthetic";
    case CorrSource::component: return "component";
  }
  return "unknown";
}

/// Equal-time cross-correlation matrix C_ij = <r_i r_j> with its
/// provenance. Q = T/N is recorded at construction so downstream
/// random-matrix comparisons never recompute it from mismatched shapes.
struct CorrelationMatrix {
  std::vector<std::string> symbols;
  Matrix values;  // N x N, symmetric, unit diagonal
  double q = 0.0;
  std::pair<std::string, std::string> window;  // first/last return date
  CorrSource source = CorrSource::empirical;

  Eigen::Index size() const { return values.rows(); }
};

/// Support of the Marchenko-Pastur / Wishart eigenvalue law for aspect
/// ratio Q = T/N >= 1: lambda = (1 -+ 1/sqrt(Q))^2.
struct RmtLaw {
  double q = 1.0;
  double lambda_min = 0.0;
  double lambda_max = 4.0;
};

inline RmtLaw mp_bounds(double q) {
  if (!(q >= 1.0)) {
    fail(Errc::invalid_q, "RMT law needs Q = T/N >= 1, got " + format_double(q));
  }
  const double root = 1.0 / std::sqrt(q);
  return RmtLaw{q, (1.0 - root) * (1.0 - root), (1.0 + root) * (1.0 + root)};
}

/// Wishart eigenvalue density
///   P(lambda) = (Q / 2 pi) sqrt((lambda_max - lambda)(lambda - lambda_min)) / lambda,
/// zero outside the support. Integrates to 1 over [lambda_min, lambda_max].
inline double mp_density(const RmtLaw& law, double lambda) {
  if (!(law.q >= 1.0)) fail(Errc::invalid_q, "RMT law with Q < 1");
  if (lambda <= 0.0 || lambda <= law.lambda_min || lambda >= law.lambda_max) return 0.0;
  constexpr double kPi = 3.14159265358979323846;
  return law.q / (2.0 * kPi) *
         std::sqrt((law.lambda_max - lambda) * (lambda - law.lambda_min)) / lambda;
}

inline CorrelationMatrix correlation_matrix(const ReturnPanel& r,
                                            CorrSource source = CorrSource::empirical) {
  if (!r.normalized) {
    fail(Errc::not_normalized, "correlation_matrix needs a normalized return panel");
  }
  const Eigen::Index n = r.n_stocks();
  const Eigen::Index t = r.n_obs();
  if (t < 2) fail(Errc::bad_argument, "correlation needs T >= 2 observations");

  CorrelationMatrix c;
  c.symbols = r.symbols;
  c.q = static_cast<double>(t) / static_cast<double>(n);
  if (!r.dates.empty()) c.window = {r.dates.front(), r.dates.back()};
  c.source = source;
  c.values.noalias() = (r.returns * r.returns.transpose()) / static_cast<double>(t);
  // Exact symmetry and unit diagonal; the product can differ in the last
  // ulp across the diagonal.
  for (Eigen::Index i = 0; i < n; ++i) {
    c.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = 0.5 * (c.values(i, j) + c.values(j, i));
      c.values(i, j) = v;
      c.values(j, i) = v;
    }
  }
  return c;
}

/// Destroys cross-correlations while preserving each marginal exactly:
/// every row's time order is independently permuted with a seeded
/// generator, then the correlation is recomputed.
inline CorrelationMatrix surrogate_correlation(const ReturnPanel& r, std::uint64_t seed) {
  if (!r.normalized) {
    fail(Errc::not_normalized, "surrogate_correlation needs a normalized return panel");
  }
  ReturnPanel shuffled = r;
  Rng rng(seed);
  std::vector<double> row(static_cast<std::size_t>(r.n_obs()));
  for (Eigen::Index i = 0; i < r.n_stocks(); ++i) {
    for (Eigen::Index t = 0; t < r.n_obs(); ++t)
      row[static_cast<std::size_t>(t)] = r.returns(i, t);
    rng.shuffle(row);
    for (Eigen::Index t = 0; t < r.n_obs(); ++t)
      shuffled.returns(i, t) = row[static_cast<std::size_t>(t)];
  }
  return correlation_matrix(shuffled, CorrSource::surrogate);
}

/// Histogram of eigenvalues for figure reproduction: 50 uniform bins over
/// [0, lambda_max * 1.2] by default.
inline Histogram eigenvalue_histogram(const std::vector<double>& eigenvalues,
                                      const RmtLaw& law, int bins = 50) {
  return make_histogram(eigenvalues, bins, 0.0, law.lambda_max * 1.2);
}

/// Sampled density curve of the law over [lo, hi] for plotting next to the
/// histogram.
inline std::vector<std::pair<double, double>> mp_curve(const RmtLaw& law, int points = 200,
                                                       double lo = 0.0, double hi = -1.0) {
  if (hi <= lo) hi = law.lambda_max * 1.2;
  if (points < 2) fail(Errc::bad_argument, "mp_curve needs at least 2 points");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    curve.emplace_back(x, mp_density(law, x));
  }
  return curve;
}

}  // namespace corrspec
