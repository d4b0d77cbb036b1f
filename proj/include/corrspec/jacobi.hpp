#pragma once

#include <cmath>
#include <string>

#include "corrspec/common.hpp"
#include "corrspec/csv.hpp"

namespace corrspec {

/// Raw output of the Jacobi sweep: eigenvalues in the order the diagonal
/// settled (unsorted), eigenvectors as the matching columns of `vectors`.
struct JacobiSpectrum {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};

namespace detail {

inline double offdiagonal_norm(const Matrix& a) {
  const Eigen::Index n = a.rows();
  double sum = 0.0;
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) sum += a(p, q) * a(p, q);
  return std::sqrt(2.0 * sum);
}

}  // namespace detail

/// Dense symmetric eigensolver: cyclic Jacobi rotations.
///
/// Sweeps rotate away every off-diagonal pair (p, q) in row order until the
/// off-diagonal Frobenius norm falls below rel_tol * ||A||_F, with a hard
/// cap of max_sweeps. The rotation order is fixed, so repeated runs on the
/// same matrix are bit-stable. Quadratic convergence makes ~6-10 sweeps
/// typical at N ~ 200.
inline JacobiSpectrum jacobi_eigensolve(Matrix a, int max_sweeps = 100,
                                        double rel_tol = 1e-12) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) fail(Errc::bad_argument, "jacobi_eigensolve needs a square matrix");

  JacobiSpectrum out;
  out.vectors = Matrix::Identity(n, n);
  if (n == 1) {
    out.values = a.diagonal();
    return out;
  }

  const double frob = a.norm();
  const double target = rel_tol * frob;

  for (int sweep = 1; sweep <= max_sweeps + 1; ++sweep) {
    double off_abs_sum = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off_abs_sum += std::abs(a(p, q));
    if (off_abs_sum == 0.0 || detail::offdiagonal_norm(a) <= target) {
      out.values = a.diagonal();
      out.sweeps = sweep - 1;
      return out;
    }
    if (sweep > max_sweeps) break;  // cap reached with the matrix still rough
    // Skip tiny elements during the first sweeps; rotating them early only
    // stirs the matrix.
    const double thresh =
        sweep < 4 ? 0.2 * off_abs_sum / (static_cast<double>(n) * static_cast<double>(n)) : 0.0;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= thresh) continue;

        const double h = a(q, q) - a(p, p);
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double delta = t * apq;

        a(p, p) -= delta;
        a(q, q) += delta;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = akp - s * (akq + akp * tau);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - akq * tau);
          a(q, k) = a(k, q);
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = out.vectors(k, p);
          const double vkq = out.vectors(k, q);
          out.vectors(k, p) = vkp - s * (vkq + vkp * tau);
          out.vectors(k, q) = vkq + s * (vkp - vkq * tau);
        }
      }
    }
  }

  const double off = detail::offdiagonal_norm(a);
  fail(Errc::no_convergence,
       "Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) +
           " sweeps (N = " + std::to_string(n) + ", off-diagonal norm " + format_double(off) +
           ", target " + format_double(target) + ", ||A||_F " + format_double(frob) + ")");
}

}  // namespace corrspec
