#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "toepricc/errors.hpp"
#include "toepricc/linalg.hpp"
#include "toepricc/matrix.hpp"
#include "toepricc/parallel.hpp"
#include "toepricc/realization.hpp"
#include "toepricc/section.hpp"

namespace toepricc {

/// One application of the Riccati substitution map
///
///   F(Q) = alpha Q A + (beta - alpha Q B) (R0 - gamma Q B)^{-1} (C - gamma Q A).
///
/// Throws PivotSingular when the pivot R0 - gamma Q B is singular.
inline CMatrix riccati_map(const Realization& r, const CMatrix& q,
                           double pivot_rel_tol = kPivotRelTol) {
  if (q.rows() != r.t || q.cols() != r.s)
    throw InvalidMatrix("riccati_map: Q must be t x s");
  const CMatrix qa = q * r.A;
  const CMatrix qb = q * r.B;
  const CMatrix pivot = r.R0 - r.gamma * qb;
  CMatrix pivot_applied;
  try {
    pivot_applied = solve(pivot, r.C - r.gamma * qa, pivot_rel_tol);
  } catch (const SingularMatrix&) {
    throw PivotSingular("Riccati pivot R0 - gamma Q B is singular");
  }
  return r.alpha * qa + (r.beta - r.alpha * qb) * pivot_applied;
}

enum class RiccatiStatus { converged, pivot_breakdown, max_iterations };

struct RiccatiSolution {
  RiccatiStatus status = RiccatiStatus::max_iterations;
  CMatrix Q;            // last iterate; the fixed point when converged
  CMatrix A_closed;     // A - B (R0 - gamma Q B)^{-1} (C - gamma Q A)
  CMatrix alpha_closed; // alpha - (beta - alpha Q B) (R0 - gamma Q B)^{-1} gamma
  bool pivot_ok = false;
  double rho_A_closed = std::numeric_limits<double>::quiet_NaN();
  double rho_alpha_closed = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  /// converged with invertible pivot and both closed-loop spectra strictly
  /// inside the unit circle; exactly the condition under which the block
  /// Toeplitz operator is invertible.
  bool stabilizing = false;
};

namespace detail {

inline void finish_solution(const Realization& r, RiccatiSolution& sol,
                            double pivot_rel_tol) {
  try {
    const CMatrix qa = sol.Q * r.A;
    const CMatrix qb = sol.Q * r.B;
    const CMatrix pivot = r.R0 - r.gamma * qb;
    const LuFactors f = lu_factor(pivot, pivot_rel_tol);
    sol.pivot_ok = true;
    sol.A_closed = r.A - r.B * lu_solve(f, r.C - r.gamma * qa);
    sol.alpha_closed = r.alpha - (r.beta - r.alpha * qb) * lu_solve(f, r.gamma);
    sol.rho_A_closed = spectral_radius(sol.A_closed);
    sol.rho_alpha_closed = spectral_radius(sol.alpha_closed);
    sol.residual = (riccati_map(r, sol.Q, pivot_rel_tol) - sol.Q).frobenius_norm();
  } catch (const SingularMatrix&) {
    sol.pivot_ok = false;
  } catch (const PivotSingular&) {
    sol.pivot_ok = false;
  }
  sol.stabilizing = sol.status == RiccatiStatus::converged && sol.pivot_ok &&
                    sol.rho_A_closed < 1.0 && sol.rho_alpha_closed < 1.0;
}

}  // namespace detail

/// Fixed-point iteration Q <- F(Q) from a caller-chosen starting point.
/// Stops when the step is below tol * (1 + |Q|_F). A singular pivot along
/// the way is reported as pivot_breakdown rather than thrown: for symbols
/// without a canonical factorization that is the expected outcome.
inline RiccatiSolution solve_fixed_point_from(const Realization& r, CMatrix q0,
                                              double tol = 1e-12,
                                              std::size_t max_iter = 10000,
                                              double pivot_rel_tol = kPivotRelTol) {
  RiccatiSolution sol;
  sol.Q = std::move(q0);
  if (r.t == 0 || r.s == 0) {
    // Q is empty; only the pivot condition carries information.
    sol.status = RiccatiStatus::converged;
    sol.iterations = 0;
    detail::finish_solution(r, sol, pivot_rel_tol);
    return sol;
  }
  for (std::size_t it = 1; it <= max_iter; ++it) {
    CMatrix next;
    try {
      next = riccati_map(r, sol.Q, pivot_rel_tol);
    } catch (const PivotSingular&) {
      sol.status = RiccatiStatus::pivot_breakdown;
      sol.iterations = it;
      sol.pivot_ok = false;
      return sol;
    }
    const double step = (next - sol.Q).frobenius_norm();
    const double scale = 1.0 + sol.Q.frobenius_norm();
    sol.Q = std::move(next);
    sol.iterations = it;
    if (step <= tol * scale) {
      sol.status = RiccatiStatus::converged;
      detail::finish_solution(r, sol, pivot_rel_tol);
      return sol;
    }
  }
  sol.status = RiccatiStatus::max_iterations;
  detail::finish_solution(r, sol, pivot_rel_tol);
  sol.stabilizing = false;
  return sol;
}

/// Stabilizing solution hunt from Q = 0. When the operator is invertible
/// the iterates are exactly the finite-section compressions, so this
/// starting point is the canonical one.
inline RiccatiSolution solve_fixed_point(const Realization& r,
                                         double tol = 1e-12,
                                         std::size_t max_iter = 10000,
                                         double pivot_rel_tol = kPivotRelTol) {
  return solve_fixed_point_from(r, CMatrix(r.t, r.s), tol, max_iter,
                                pivot_rel_tol);
}

/// Compression beta-controllability x T_N^{-1} x A-observability of the
/// inverted finite section: converges to the stabilizing Q as N grows.
/// The section of the r-scaled symbol gives the same value for every
/// admissible r; r = 1 uses the plain section.
inline CMatrix solve_finite_section(const Realization& r, std::size_t n,
                                    double factor = 1.0,
                                    double pivot_rel_tol = kPivotRelTol) {
  if (r.t == 0 || r.s == 0) return CMatrix(r.t, r.s);
  const Realization used = (factor == 1.0) ? r : scale(r, factor);
  const ToeplitzSection sec = build_section(used, n);
  const CMatrix ctrl = controllability_blocks(used.alpha, used.beta, n);
  const CMatrix obs = observability_blocks(used.C, used.A, n);
  CMatrix inv_obs;
  try {
    inv_obs = solve(sec.data, obs, pivot_rel_tol);
  } catch (const SingularMatrix&) {
    throw SectionSingular("finite Toeplitz section of order " +
                          std::to_string(n) + " is singular");
  }
  return ctrl * inv_obs;
}

/// Restarts the fixed-point iteration from random starting points with
/// |Q0|_F <= 1 and checks that every stabilizing outcome lands on the
/// reference solution. Deterministic for a fixed seed.
inline bool verify_uniqueness(const Realization& r, const RiccatiSolution& ref,
                              std::size_t trials,
                              std::uint64_t seed = 0x5eedu,
                              double tol = 1e-12,
                              std::size_t max_iter = 10000) {
  if (!ref.stabilizing) return false;
  std::vector<char> agree(trials, 1);
  parallel_for(trials, [&](std::size_t k) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (k + 1));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    CMatrix q0(r.t, r.s);
    for (std::size_t i = 0; i < r.t; ++i)
      for (std::size_t j = 0; j < r.s; ++j)
        q0(i, j) = Complex(uni(rng), uni(rng));
    const double nrm = q0.frobenius_norm();
    if (nrm > 1.0) q0 *= Complex(1.0 / nrm);
    const RiccatiSolution sol =
        solve_fixed_point_from(r, q0, tol, max_iter);
    if (!sol.stabilizing) return;  // a run that fails to stabilize is vacuous
    const double err = (sol.Q - ref.Q).frobenius_norm();
    agree[k] = err <= 1e-6 * (1.0 + ref.Q.frobenius_norm()) ? 1 : 0;
  });
  for (char a : agree)
    if (!a) return false;
  return true;
}

}  // namespace toepricc
