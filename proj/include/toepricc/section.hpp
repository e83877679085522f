#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "toepricc/matrix.hpp"
#include "toepricc/realization.hpp"

namespace toepricc {

/// N x N block Toeplitz compression of the operator with symbol W: block
/// (i, j) is the Laurent coefficient of z^(i-j).
struct ToeplitzSection {
  std::size_t n_blocks = 0;
  std::size_t block_size = 0;
  CMatrix data;

  CMatrix block(std::size_t i, std::size_t j) const {
    return data.block(i * block_size, j * block_size, block_size, block_size);
  }
};

inline ToeplitzSection build_section(const Realization& r, std::size_t n) {
  ToeplitzSection sec;
  sec.n_blocks = n;
  sec.block_size = r.m;
  sec.data = CMatrix(n * r.m, n * r.m);
  if (n == 0) return sec;
  // Coefficients by running products: one pass up the analytic side, one
  // down the co-analytic side.
  std::vector<CMatrix> coeff(2 * n - 1);  // index n-1+k holds coefficient k
  coeff[n - 1] = r.R0;
  if (r.s > 0) {
    CMatrix left = r.C;
    for (std::size_t k = 1; k < n; ++k) {
      coeff[n - 1 + k] = left * r.B;
      if (k + 1 < n) left = left * r.A;
    }
  } else {
    for (std::size_t k = 1; k < n; ++k) coeff[n - 1 + k] = CMatrix(r.m, r.m);
  }
  if (r.t > 0) {
    CMatrix left = r.gamma;
    for (std::size_t k = 1; k < n; ++k) {
      coeff[n - 1 - k] = left * r.beta;
      if (k + 1 < n) left = left * r.alpha;
    }
  } else {
    for (std::size_t k = 1; k < n; ++k) coeff[n - 1 - k] = CMatrix(r.m, r.m);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sec.data.set_block(i * r.m, j * r.m, coeff[(n - 1 + i) - j]);
  return sec;
}

/// Relative departure of the scaled-symbol section from the diagonal
/// similarity diag(I, rI, ..., r^(N-1) I) applied to the plain section.
/// Zero in exact arithmetic for every admissible r; r = 1 compares the
/// section with itself.
inline double scaling_similarity_check(const Realization& r, std::size_t n,
                                       double factor) {
  const ToeplitzSection plain = build_section(r, n);
  const ToeplitzSection scaled =
      (factor == 1.0) ? plain : build_section(scale(r, factor), n);
  CMatrix conjugated = plain.data;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::pow(factor, static_cast<double>(i) -
                                            static_cast<double>(j));
      for (std::size_t a = 0; a < r.m; ++a)
        for (std::size_t b = 0; b < r.m; ++b)
          conjugated(i * r.m + a, j * r.m + b) *= w;
    }
  const double denom = plain.data.frobenius_norm();
  const double num = (scaled.data - conjugated).frobenius_norm();
  return denom > 0.0 ? num / denom : num;
}

}  // namespace toepricc
