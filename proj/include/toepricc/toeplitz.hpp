#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "toepricc/factorization.hpp"
#include "toepricc/linalg.hpp"
#include "toepricc/matrix.hpp"
#include "toepricc/realization.hpp"
#include "toepricc/riccati.hpp"
#include "toepricc/section.hpp"

namespace toepricc {

/// The leading N x N block corner of the inverse operator, assembled from
/// the Laurent coefficients of the inverse factors:
///
///   theta_x[0] = D^{-1},     theta_x[j] = -D^{-1} C_dot A_closed^{j-1} B D^{-1}
///   psi_x[0]   = delta^{-1}, psi_x[j]   = -delta^{-1} gamma alpha_closed^{j-1} beta_dot delta^{-1}
///
///   block(i, j) = sum_{k=0}^{min(i,j)} theta_x[i-k] psi_x[j-k].
struct InverseBlocks {
  std::size_t n_blocks = 0;
  std::size_t block_size = 0;
  std::vector<CMatrix> theta_x, psi_x;
  CMatrix data;

  CMatrix block(std::size_t i, std::size_t j) const {
    return data.block(i * block_size, j * block_size, block_size, block_size);
  }
};

inline InverseBlocks inverse_blocks(const FactorPair& f, std::size_t n) {
  InverseBlocks ib;
  const std::size_t m = f.D.rows();
  ib.n_blocks = n;
  ib.block_size = m;
  ib.data = CMatrix(n * m, n * m);
  if (n == 0) return ib;
  ib.theta_x.reserve(n);
  ib.psi_x.reserve(n);
  // theta_x[j] is the coefficient of z^j in Theta^{-1}, psi_x[j] the
  // coefficient of z^{-j} in Psi^{-1}; both sequences decay geometrically
  // at the closed-loop spectral radii.
  const CMatrix d_inv = f.theta_inv.R0;
  const CMatrix delta_inv = f.psi_inv.R0;
  ib.theta_x.push_back(d_inv);
  ib.psi_x.push_back(delta_inv);
  const CMatrix bd = f.theta.B * d_inv;
  const CMatrix bdelta = f.beta_dot * delta_inv;
  CMatrix left_t = d_inv * f.C_dot;      // D^{-1} C_dot A_closed^{j-1}
  CMatrix left_p = delta_inv * f.psi.gamma;  // delta^{-1} gamma alpha_closed^{j-1}
  for (std::size_t j = 1; j < n; ++j) {
    ib.theta_x.push_back(Complex(-1.0) * (left_t * bd));
    ib.psi_x.push_back(Complex(-1.0) * (left_p * bdelta));
    if (j + 1 < n) {
      left_t = left_t * f.theta_inv.A;
      left_p = left_p * f.psi_inv.alpha;
    }
  }
  // All cross products first, then the diagonal sums.
  std::vector<CMatrix> prod(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      prod[a * n + b] = ib.theta_x[a] * ib.psi_x[b];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      CMatrix acc(m, m);
      for (std::size_t k = 0; k <= std::min(i, j); ++k)
        acc += prod[(i - k) * n + (j - k)];
      ib.data.set_block(i * m, j * m, acc);
    }
  return ib;
}

/// Upper triangular section of the operator with symbol Psi: delta on the
/// diagonal, gamma alpha^(k-1) beta_dot on the k-th superdiagonal, zero
/// below. Coincides with the plain Toeplitz section of Psi.
inline ToeplitzSection psi_section(const FactorPair& f, std::size_t n) {
  return build_section(f.psi, n);
}

/// Lower triangular in the same way; the product with psi_section is the
/// identity exactly, block algebra telescopes at finite N.
inline ToeplitzSection psi_inverse_section(const FactorPair& f,
                                           std::size_t n) {
  return build_section(f.psi_inv, n);
}

/// Contracts the inverse corner back to the solution:
/// [beta, alpha beta, ...] x data x col(C, C A, ...). The corner is exact
/// (no truncation enters below the window), so this partial sum of the
/// bilinear series converges to the stabilizing Q as n grows.
inline CMatrix q_from_inverse(const Realization& r, const FactorPair& f,
                              std::size_t n) {
  if (r.t == 0 || r.s == 0) return CMatrix(r.t, r.s);
  const InverseBlocks ib = inverse_blocks(f, n);
  const CMatrix ctrl = controllability_blocks(r.alpha, r.beta, n);
  const CMatrix obs = observability_blocks(r.C, r.A, n);
  return ctrl * (ib.data * obs);
}

}  // namespace toepricc
