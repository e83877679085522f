#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "toepricc/errors.hpp"
#include "toepricc/linalg.hpp"
#include "toepricc/matrix.hpp"
#include "toepricc/parallel.hpp"
#include "toepricc/realization.hpp"
#include "toepricc/riccati.hpp"

namespace toepricc {

/// How the invertible pivot R0 - gamma Q B = delta D is split between the
/// two factors. identity_delta puts the whole pivot into the plus factor.
enum class Split { identity_delta, identity_D };

/// Pseudo-canonical factorization W = Psi Theta built from a stabilizing
/// Riccati solution:
///
///   Theta(z) = D + z C_dot (I - z A)^{-1} B        (plus factor)
///   Psi(z)   = delta + gamma (z I - alpha)^{-1} beta_dot
///
/// with C_dot = delta^{-1}(C - gamma Q A) and beta_dot = (beta - alpha Q B) D^{-1}.
/// The explicit inverses come along for free:
///
///   Theta^{-1}(z) = D^{-1} - z D^{-1} C_dot (I - z A_closed)^{-1} B D^{-1}
///   Psi^{-1}(z)   = delta^{-1} - delta^{-1} gamma (z I - alpha_closed)^{-1} beta_dot delta^{-1}
///
/// All four are stored as plain realizations so the symbol operations
/// (evaluate, laurent_coefficient, build_section) apply to them directly.
struct FactorPair {
  Split split = Split::identity_delta;
  CMatrix D, delta;        // pivot split, delta * D = R0 - gamma Q B
  CMatrix C_dot, beta_dot; // adjusted output / input maps
  Realization theta, psi, theta_inv, psi_inv;
};

inline FactorPair build_factors(const Realization& r,
                                const RiccatiSolution& sol,
                                Split split = Split::identity_delta,
                                double pivot_rel_tol = kPivotRelTol) {
  if (!sol.stabilizing)
    throw NotStabilizing(
        "factorization requires a stabilizing Riccati solution");
  FactorPair f;
  f.split = split;
  const CMatrix pivot = r.R0 - r.gamma * (sol.Q * r.B);
  const CMatrix c_adj = r.C - r.gamma * (sol.Q * r.A);
  const CMatrix b_adj = r.beta - r.alpha * (sol.Q * r.B);
  if (split == Split::identity_delta) {
    f.delta = CMatrix::identity(r.m);
    f.D = pivot;
  } else {
    f.delta = pivot;
    f.D = CMatrix::identity(r.m);
  }
  const CMatrix d_inv = inverse(f.D, pivot_rel_tol);
  const CMatrix delta_inv = inverse(f.delta, pivot_rel_tol);
  f.C_dot = delta_inv * c_adj;
  f.beta_dot = b_adj * d_inv;
  f.theta = Realization::plus_part(f.D, f.C_dot, r.A, r.B);
  f.psi = Realization::circle_part(f.delta, r.gamma, r.alpha, f.beta_dot);
  f.theta_inv = Realization::plus_part(d_inv, Complex(-1.0) * (d_inv * f.C_dot),
                                       sol.A_closed, r.B * d_inv);
  f.psi_inv = Realization::circle_part(
      delta_inv, Complex(-1.0) * (delta_inv * r.gamma), sol.alpha_closed,
      f.beta_dot * delta_inv);
  return f;
}

namespace detail {

/// Pole positions of the four factor symbols: eigenvalues of the circle
/// state matrices, reciprocal eigenvalues of the plus state matrices.
inline std::vector<Complex> factor_poles(const FactorPair& f,
                                         const Realization& r) {
  std::vector<Complex> poles;
  auto add_circle = [&](const CMatrix& a) {
    for (const Complex& l : eigenvalues(a)) poles.push_back(l);
  };
  auto add_plus = [&](const CMatrix& a) {
    const double tiny = 1e-13 * (1.0 + a.inf_norm());
    for (const Complex& l : eigenvalues(a))
      if (std::abs(l) > tiny) poles.push_back(1.0 / l);
  };
  add_circle(r.alpha);
  add_circle(f.psi_inv.alpha);
  add_plus(r.A);
  add_plus(f.theta_inv.A);
  return poles;
}

template <typename PointResidual>
double max_grid_residual(const std::vector<Complex>& poles,
                         std::size_t grid_size, PointResidual&& at_point) {
  const std::vector<double> radii = {0.9, 1.0, 1.1, 1.5};
  const std::size_t total = radii.size() * grid_size;
  const double skip_radius = 1e-5;
  std::vector<double> res(total, -1.0);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(grid_size);
  parallel_for(total, [&](std::size_t idx) {
    const double radius = radii[idx / grid_size];
    const double theta = step * static_cast<double>(idx % grid_size);
    const Complex z = radius * Complex(std::cos(theta), std::sin(theta));
    for (const Complex& p : poles)
      if (std::abs(z - p) <= skip_radius) return;
    try {
      res[idx] = at_point(z);
    } catch (const PoleAtEvaluationPoint&) {
    }
  });
  double worst = 0.0;
  for (double v : res) worst = std::max(worst, v);
  return worst;
}

}  // namespace detail

/// Max over four circles around the unit circle of
/// |Psi(z) Theta(z) - W(z)|_F / (1 + |W(z)|_F), skipping points that sit on
/// a pole. Round-off sized for a correct factorization.
inline double verify_product(const Realization& r, const FactorPair& f,
                             std::size_t grid_size = 256) {
  return detail::max_grid_residual(
      detail::factor_poles(f, r), grid_size, [&](Complex z) {
        const CMatrix w = evaluate(r, z);
        const CMatrix prod = evaluate(f.psi, z) * evaluate(f.theta, z);
        return (prod - w).frobenius_norm() / (1.0 + w.frobenius_norm());
      });
}

/// Max over the same circles of |Theta Theta^{-1} - I| and |Psi Psi^{-1} - I|.
inline double verify_inverse_factors(const Realization& r, const FactorPair& f,
                                     std::size_t grid_size = 256) {
  const CMatrix id = CMatrix::identity(f.D.rows());
  return detail::max_grid_residual(
      detail::factor_poles(f, r), grid_size, [&](Complex z) {
        const double a =
            (evaluate(f.theta, z) * evaluate(f.theta_inv, z) - id)
                .frobenius_norm();
        const double b =
            (evaluate(f.psi, z) * evaluate(f.psi_inv, z) - id)
                .frobenius_norm();
        return std::max(a, b);
      });
}

struct FactorMinimality {
  MinimalityReport theta, psi, theta_inv, psi_inv;
  bool pass = false;
};

inline FactorMinimality check_minimality_of_factors(const FactorPair& f) {
  FactorMinimality out;
  out.theta = check_minimality(f.theta);
  out.psi = check_minimality(f.psi);
  out.theta_inv = check_minimality(f.theta_inv);
  out.psi_inv = check_minimality(f.psi_inv);
  out.pass = out.theta.pass && out.psi.pass && out.theta_inv.pass &&
             out.psi_inv.pass;
  return out;
}

}  // namespace toepricc
