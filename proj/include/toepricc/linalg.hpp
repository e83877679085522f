#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "toepricc/errors.hpp"
#include "toepricc/matrix.hpp"

namespace toepricc {

/// Relative pivot threshold shared by the direct solvers and the rank
/// decisions: a pivot (or singular value) below tol * max row sum of the
/// input counts as zero.
inline constexpr double kPivotRelTol = 1e-13;

struct LuFactors {
  CMatrix lu;                      // unit lower / upper factors packed
  std::vector<std::size_t> pivots; // row swapped with k at step k
  double pivot_floor = 0.0;
  int sign = 1;                    // permutation parity
};

inline LuFactors lu_factor(const CMatrix& m, double pivot_rel_tol = kPivotRelTol) {
  if (m.rows() != m.cols())
    throw InvalidMatrix("lu_factor requires a square matrix");
  const std::size_t n = m.rows();
  LuFactors f{m, std::vector<std::size_t>(n), pivot_rel_tol * m.inf_norm(), 1};
  CMatrix& a = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(a(i, k));
      if (cand > best) {
        best = cand;
        p = i;
      }
    }
    if (best <= f.pivot_floor)
      throw SingularMatrix("pivot " + std::to_string(k) +
                           " below threshold in LU factorization");
    f.pivots[k] = p;
    if (p != k) {
      f.sign = -f.sign;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
    }
    const Complex inv_piv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex lik = a(i, k) * inv_piv;
      a(i, k) = lik;
      if (lik == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  return f;
}

inline CMatrix lu_solve(const LuFactors& f, const CMatrix& rhs) {
  const std::size_t n = f.lu.rows();
  if (rhs.rows() != n)
    throw InvalidMatrix("right-hand side rows disagree with factored matrix");
  CMatrix x = rhs;
  const std::size_t w = x.cols();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = f.pivots[k];
    if (p != k)
      for (std::size_t j = 0; j < w; ++j) std::swap(x(k, j), x(p, j));
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex lik = f.lu(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) x(i, j) -= lik * x(k, j);
    }
  for (std::size_t ki = n; ki-- > 0;) {
    const Complex inv_piv = 1.0 / f.lu(ki, ki);
    for (std::size_t j = 0; j < w; ++j) x(ki, j) *= inv_piv;
    for (std::size_t i = 0; i < ki; ++i) {
      const Complex u = f.lu(i, ki);
      if (u == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) x(i, j) -= u * x(ki, j);
    }
  }
  return x;
}

inline CMatrix solve(const CMatrix& m, const CMatrix& rhs,
                     double pivot_rel_tol = kPivotRelTol) {
  return lu_solve(lu_factor(m, pivot_rel_tol), rhs);
}

inline CMatrix inverse(const CMatrix& m, double pivot_rel_tol = kPivotRelTol) {
  return solve(m, CMatrix::identity(m.rows()), pivot_rel_tol);
}

inline Complex determinant(const CMatrix& m) {
  if (m.rows() != m.cols())
    throw InvalidMatrix("determinant requires a square matrix");
  LuFactors f;
  try {
    f = lu_factor(m);
  } catch (const SingularMatrix&) {
    return 0.0;
  }
  Complex det = static_cast<double>(f.sign);
  for (std::size_t k = 0; k < m.rows(); ++k) det *= f.lu(k, k);
  return det;
}

inline CMatrix matrix_power(const CMatrix& m, std::size_t k) {
  if (m.rows() != m.cols())
    throw InvalidMatrix("matrix_power requires a square matrix");
  CMatrix acc = CMatrix::identity(m.rows());
  CMatrix base = m;
  while (k) {
    if (k & 1u) acc = acc * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return acc;
}

namespace detail {

/// Complex Givens rotation with real cosine: [c s; -conj(s) c] maps
/// (a, b) to (r, 0).
inline void givens(Complex a, Complex b, double& c, Complex& s, Complex& r) {
  const double absa = std::abs(a);
  const double absb = std::abs(b);
  if (absb == 0.0) {
    c = 1.0;
    s = 0.0;
    r = a;
    return;
  }
  if (absa == 0.0) {
    c = 0.0;
    s = std::conj(b) / absb;
    r = absb;
    return;
  }
  const double scale = absa + absb;
  const double nrm =
      scale * std::sqrt(std::norm(a / scale) + std::norm(b / scale));
  const Complex phase = a / absa;
  c = absa / nrm;
  s = phase * std::conj(b) / nrm;
  r = phase * nrm;
}

inline void hessenberg_inplace(CMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<Complex> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double colnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) colnorm2 += std::norm(h(i, k));
    const double sigma = std::sqrt(colnorm2);
    if (sigma == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex alpha =
        (x0 == 0.0) ? Complex(-sigma, 0.0) : -(x0 / std::abs(x0)) * sigma;
    double vnorm2 = 0.0;
    v[k + 1] = x0 - alpha;
    vnorm2 += std::norm(v[k + 1]);
    for (std::size_t i = k + 2; i < n; ++i) {
      v[i] = h(i, k);
      vnorm2 += std::norm(v[i]);
    }
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;
    // Left application: rows k+1..n-1, columns k..n-1.
    for (std::size_t j = k; j < n; ++j) {
      Complex dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
      dot *= beta;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * dot;
    }
    // Right application: all rows, columns k+1..n-1.
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
      dot *= beta;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(v[j]);
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

inline std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c,
                                          Complex d) {
  const Complex tr = a + d;
  const Complex det = a * d - b * c;
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  const Complex big =
      (std::abs(tr + disc) >= std::abs(tr - disc)) ? (tr + disc) * 0.5
                                                   : (tr - disc) * 0.5;
  if (big == 0.0) return {0.0, 0.0};
  return {big, det / big};
}

}  // namespace detail

/// All eigenvalues of a square complex matrix. Householder reduction to
/// Hessenberg form, then single-shift QR with Wilkinson shifts and
/// occasional exceptional shifts; only eigenvalues are accumulated.
/// Throws NonConvergence once the step budget (default 100*n^2) is spent.
inline std::vector<Complex> eigenvalues(const CMatrix& m,
                                        std::size_t max_qr_steps = 0) {
  if (m.rows() != m.cols())
    throw InvalidMatrix("eigenvalues requires a square matrix");
  const std::size_t n = m.rows();
  std::vector<Complex> eig;
  if (n == 0) return eig;
  eig.reserve(n);
  if (n == 1) {
    eig.push_back(m(0, 0));
    return eig;
  }
  CMatrix h = m;
  detail::hessenberg_inplace(h);
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = h.inf_norm();
  const std::size_t cap =
      max_qr_steps ? max_qr_steps : std::max<std::size_t>(200, 100 * n * n);
  std::size_t steps = 0;
  std::size_t since_deflation = 0;
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  std::vector<double> cs(n);
  std::vector<Complex> sn(n);
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(h(0, 0));
      break;
    }
    std::ptrdiff_t lo = 0;
    for (std::ptrdiff_t k = hi; k >= 1; --k) {
      double thresh = eps * (std::abs(h(k - 1, k - 1)) + std::abs(h(k, k)));
      if (thresh == 0.0) thresh = eps * hnorm;
      if (std::abs(h(k, k - 1)) <= thresh) {
        h(k, k - 1) = 0.0;
        lo = k;
        break;
      }
    }
    if (lo == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      since_deflation = 0;
      continue;
    }
    if (lo == hi - 1) {
      auto [l1, l2] = detail::eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi),
                                     h(hi, hi - 1), h(hi, hi));
      eig.push_back(l1);
      eig.push_back(l2);
      hi -= 2;
      since_deflation = 0;
      continue;
    }
    Complex mu;
    ++since_deflation;
    if (since_deflation % 16 == 0) {
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    } else {
      auto [l1, l2] = detail::eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi),
                                     h(hi, hi - 1), h(hi, hi));
      mu = (std::abs(l1 - h(hi, hi)) <= std::abs(l2 - h(hi, hi))) ? l1 : l2;
    }
    for (std::ptrdiff_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    for (std::ptrdiff_t j = lo; j < hi; ++j) {
      double c;
      Complex s, r;
      detail::givens(h(j, j), h(j + 1, j), c, s, r);
      cs[j - lo] = c;
      sn[j - lo] = s;
      h(j, j) = r;
      h(j + 1, j) = 0.0;
      for (std::ptrdiff_t col = j + 1; col <= hi; ++col) {
        const Complex t1 = h(j, col);
        const Complex t2 = h(j + 1, col);
        h(j, col) = c * t1 + s * t2;
        h(j + 1, col) = -std::conj(s) * t1 + c * t2;
      }
    }
    for (std::ptrdiff_t j = lo; j < hi; ++j) {
      const double c = cs[j - lo];
      const Complex s = sn[j - lo];
      const std::ptrdiff_t rmax = std::min(j + 1, hi);
      for (std::ptrdiff_t row = lo; row <= rmax; ++row) {
        const Complex t1 = h(row, j);
        const Complex t2 = h(row, j + 1);
        h(row, j) = c * t1 + std::conj(s) * t2;
        h(row, j + 1) = -s * t1 + c * t2;
      }
    }
    for (std::ptrdiff_t i = lo; i <= hi; ++i) h(i, i) += mu;
    if (++steps > cap)
      throw NonConvergence("QR eigenvalue iteration exceeded " +
                           std::to_string(cap) + " steps");
  }
  return eig;
}

inline double spectral_radius(const CMatrix& m, std::size_t max_qr_steps = 0) {
  double rho = 0.0;
  for (const Complex& l : eigenvalues(m, max_qr_steps))
    rho = std::max(rho, std::abs(l));
  return rho;
}

/// Singular values in descending order, by one-sided Jacobi (Hestenes)
/// iteration on the columns. Gives high relative accuracy for the small
/// singular values used in rank and zero-scan decisions.
inline std::vector<double> singular_values(const CMatrix& m_in,
                                           std::size_t max_sweeps = 60) {
  if (m_in.empty()) return {};
  CMatrix m = (m_in.rows() >= m_in.cols()) ? m_in : m_in.adjoint();
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();
  const double tol = 1e-15;
  // Columns that collapse to round-off of the matrix scale are frozen:
  // their Gram products sit above the relative threshold forever (both
  // sides shrink together), so the purely relative test would keep the
  // sweep rotating on noise and never converge.
  double dead2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rows; ++k) acc += std::norm(m(k, j));
    dead2 = std::max(dead2, acc);
  }
  dead2 *= 1e-30;
  bool converged = (n == 1);
  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double a = 0.0, b = 0.0;
        Complex g = 0.0;
        for (std::size_t k = 0; k < rows; ++k) {
          a += std::norm(m(k, i));
          b += std::norm(m(k, j));
          g += std::conj(m(k, i)) * m(k, j);
        }
        if (a <= dead2 || b <= dead2) continue;
        const double absg = std::abs(g);
        if (absg <= tol * std::sqrt(a * b)) continue;
        rotated = true;
        const Complex p = g / absg;
        const double zeta = (b - a) / (2.0 * absg);
        const double sgn = (zeta >= 0.0) ? 1.0 : -1.0;
        const double t =
            sgn / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Complex pc = std::conj(p);
        for (std::size_t k = 0; k < rows; ++k) {
          const Complex x = m(k, i);
          const Complex y = m(k, j);
          m(k, i) = c * x - s * pc * y;
          m(k, j) = s * x + c * pc * y;
        }
      }
    if (!rotated) converged = true;
  }
  if (!converged)
    throw NonConvergence("Jacobi SVD sweeps exhausted without convergence");
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rows; ++k) acc += std::norm(m(k, j));
    sigma[j] = std::sqrt(acc);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

inline double smallest_singular_value(const CMatrix& m) {
  if (m.empty()) return 0.0;
  return singular_values(m).back();
}

inline std::size_t numeric_rank(const CMatrix& m,
                                double rel_tol = kPivotRelTol) {
  if (m.empty()) return 0;
  const double floor = rel_tol * m.inf_norm();
  std::size_t rank = 0;
  for (double s : singular_values(m))
    if (s > floor) ++rank;
  return rank;
}

}  // namespace toepricc
