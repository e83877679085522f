#pragma once

// Shared test utilities: deterministic random instances whose stabilizing
// Riccati solution is known by construction, plus independent numerical
// oracles (contour quadrature for Laurent coefficients, a Stein solve for
// Q) that do not go through the code paths under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "toepricc/toepricc.hpp"

namespace toepricc_test {

using namespace toepricc;

inline CMatrix random_matrix(std::mt19937_64& rng, std::size_t rows,
                             std::size_t cols, double scale = 1.0) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out(i, j) = scale * Complex(uni(rng), uni(rng));
  return out;
}

/// Upper triangular with prescribed diagonal magnitude range and small
/// strictly-upper noise; the eigenvalues are exactly the diagonal.
inline CMatrix random_triangular(std::mt19937_64& rng, std::size_t n,
                                 double diag_lo, double diag_hi,
                                 double upper_scale = 0.05) {
  std::uniform_real_distribution<double> mag(diag_lo, diag_hi);
  std::uniform_real_distribution<double> arg(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = mag(rng);
    const double th = arg(rng);
    out(i, i) = r * Complex(std::cos(th), std::sin(th));
    for (std::size_t j = i + 1; j < n; ++j)
      out(i, j) = upper_scale * Complex(uni(rng), uni(rng));
  }
  return out;
}

/// Solves Q = a Q b + rhs entrywise via the Kronecker system; unique when
/// no product of eigenvalues of a and b equals 1.
inline CMatrix solve_stein(const CMatrix& a, const CMatrix& b,
                           const CMatrix& rhs) {
  const std::size_t p = rhs.rows();
  const std::size_t q = rhs.cols();
  if (p == 0 || q == 0) return CMatrix(p, q);
  CMatrix sys(p * q, p * q);
  CMatrix vec(p * q, 1);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t row = i * q + j;
      vec(row, 0) = rhs(i, j);
      sys(row, row) += 1.0;
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < q; ++l)
          sys(row, k * q + l) -= a(i, k) * b(l, j);
    }
  const CMatrix x = solve(sys, vec);
  CMatrix out(p, q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) out(i, j) = x(i * q + j, 0);
  return out;
}

/// A realization together with the data it was reverse-engineered from;
/// Q, the closed-loop matrices and one valid factorization are known
/// independently of the solver under test.
struct Instance {
  Realization R;
  CMatrix Q;
  CMatrix A_closed, alpha_closed;
  // Factor data with the pivot split delta * D (neither factor normalized):
  // Theta = D + z C_dot (I - zA)^{-1} B, Psi = delta + gamma (zI - alpha)^{-1} beta_dot.
  CMatrix D, delta, C_dot, beta_dot;
};

struct InstanceSpec {
  std::size_t m = 2, s = 2, t = 2;
  bool circle_pole = false;  // force an eigenvalue of alpha onto the circle
  double rho_cap = 0.78;     // bound on the closed-loop spectral radii
};

inline Instance make_instance(std::mt19937_64& rng, const InstanceSpec& spec) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::size_t m = spec.m, s = spec.s, t = spec.t;
    CMatrix D = CMatrix::identity(m) + random_matrix(rng, m, m, 0.2);
    CMatrix delta = CMatrix::identity(m) + random_matrix(rng, m, m, 0.2);
    if (smallest_singular_value(D) < 0.3 ||
        smallest_singular_value(delta) < 0.3)
      continue;
    const CMatrix A = random_triangular(rng, s, 0.25, 0.62);
    CMatrix B = random_matrix(rng, s, m, 0.6);
    CMatrix C_dot = random_matrix(rng, m, s, 0.6);
    CMatrix gamma = random_matrix(rng, m, t, 0.6);
    CMatrix beta_dot = random_matrix(rng, t, m, 0.6);

    // Shrink the plus coupling until the closed loop A - B D^{-1} C_dot is
    // comfortably stable.
    CMatrix A_closed;
    bool ok = false;
    for (int k = 0; k < 40; ++k) {
      A_closed = A - B * solve(D, C_dot);
      if (spectral_radius(A_closed) <= spec.rho_cap) {
        ok = true;
        break;
      }
      C_dot *= Complex(0.5);
    }
    if (!ok) continue;

    CMatrix alpha, alpha_closed;
    if (!spec.circle_pole) {
      alpha = random_triangular(rng, t, 0.2, 0.6);
      ok = false;
      for (int k = 0; k < 40; ++k) {
        alpha_closed = alpha - beta_dot * solve(delta, gamma);
        if (spectral_radius(alpha_closed) <= spec.rho_cap) {
          ok = true;
          break;
        }
        beta_dot *= Complex(0.5);
      }
      if (!ok) continue;
    } else {
      // Choose the closed loop first and scale the coupling until the open
      // loop alpha = alpha_closed + c * beta_dot delta^{-1} gamma has an
      // eigenvalue exactly on the circle.
      if (t == 0) throw std::logic_error("circle pole needs t > 0");
      alpha_closed = random_triangular(rng, t, 0.2, 0.55);
      const CMatrix w = beta_dot * solve(delta, gamma);
      auto rho_at = [&](double c) {
        return spectral_radius(alpha_closed + Complex(c) * w);
      };
      double hi = 1.0;
      bool found = false;
      for (int k = 0; k < 60; ++k) {
        if (rho_at(hi) > 1.0) {
          found = true;
          break;
        }
        hi *= 2.0;
      }
      if (!found) continue;
      double lo = 0.0;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (rho_at(mid) > 1.0 ? hi : lo) = mid;
      }
      beta_dot *= Complex(lo);
      alpha = alpha_closed + Complex(lo) * w;
      if (spectral_radius(alpha) > 1.0 + 1e-12) continue;
    }

    const CMatrix q = solve_stein(alpha, A, beta_dot * C_dot);
    Instance inst;
    inst.R = Realization(delta * D + gamma * (q * B),
                         delta * C_dot + gamma * (q * A), A, B, gamma, alpha,
                         beta_dot * D + alpha * (q * B));
    inst.Q = q;
    inst.A_closed = A_closed;
    inst.alpha_closed = alpha_closed;
    inst.D = D;
    inst.delta = delta;
    inst.C_dot = C_dot;
    inst.beta_dot = beta_dot;
    try {
      validate_stability(inst.R);
    } catch (const InvalidRealization&) {
      continue;
    }
    if (!check_minimality(inst.R).pass) continue;
    return inst;
  }
  throw std::runtime_error("instance generation exhausted its attempts");
}

inline Instance make_instance(std::uint64_t seed, const InstanceSpec& spec) {
  std::mt19937_64 rng(seed);
  return make_instance(rng, spec);
}

/// The canonical scalar example used across the suites:
/// W(z) = (z^2 + 1.5 z - 1)/(z - 1) = (z - 1/2)(z + 2)/(z - 1),
/// realized with R0 = 5/2, C = B = gamma = alpha = 1, A = 0, beta = 3/2.
/// Its stabilizing solution is Q = 1/2 with closed loops -1/2 and 1/2.
inline Realization worked_scalar() {
  return Realization(CMatrix::from_rows({{2.5}}), CMatrix::from_rows({{1.0}}),
                     CMatrix::from_rows({{0.0}}), CMatrix::from_rows({{1.0}}),
                     CMatrix::from_rows({{1.0}}), CMatrix::from_rows({{1.0}}),
                     CMatrix::from_rows({{1.5}}));
}

/// W(z) = 1/(z - 1): circle pole, zero operator pivot, not invertible.
inline Realization circle_pole_inverse() {
  return Realization::circle_part(
      CMatrix::from_rows({{0.0}}), CMatrix::from_rows({{1.0}}),
      CMatrix::from_rows({{1.0}}), CMatrix::from_rows({{1.0}}));
}

/// W(z) = z^2/(z - 1): invertible symbol whose operator is not invertible
/// (the Riccati iteration hits a singular pivot).
inline Realization defective_quadratic() {
  return Realization(CMatrix::from_rows({{1.0}}), CMatrix::from_rows({{1.0}}),
                     CMatrix::from_rows({{0.0}}), CMatrix::from_rows({{1.0}}),
                     CMatrix::from_rows({{1.0}}), CMatrix::from_rows({{1.0}}),
                     CMatrix::from_rows({{1.0}}));
}

/// Laurent coefficient by trapezoid quadrature on a contour strictly
/// between the unit circle and the reciprocal plus poles; independent of
/// the closed-form coefficient formulas.
inline CMatrix laurent_quadrature(const Realization& r, long n,
                                  std::size_t points = 2048) {
  const double ra = rho_plus(r);
  const double radius = (ra > 0.0) ? std::min(0.5 * (1.0 + 1.0 / ra), 3.0)
                                   : 1.25;
  CMatrix acc(r.m, r.m);
  for (std::size_t k = 0; k < points; ++k) {
    const double th =
        2.0 * std::numbers::pi * static_cast<double>(k) / points;
    const Complex z = radius * Complex(std::cos(th), std::sin(th));
    acc += evaluate(r, z) * std::pow(z, static_cast<double>(-n));
  }
  return acc * Complex(1.0 / static_cast<double>(points));
}

inline double diff_norm(const CMatrix& a, const CMatrix& b) {
  return (a - b).frobenius_norm();
}

}  // namespace toepricc_test
