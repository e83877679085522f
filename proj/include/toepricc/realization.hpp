#pragma once

#include <cstddef>
#include <string>

#include "toepricc/errors.hpp"
#include "toepricc/linalg.hpp"
#include "toepricc/matrix.hpp"

namespace toepricc {

/// State-space realization of an m x m rational matrix symbol
///
///   W(z) = R0 + z C (I - z A)^{-1} B + gamma (z I - alpha)^{-1} beta,
///
/// with A of order s carrying the poles outside the closed unit disc (as
/// 1/eigenvalue) and alpha of order t carrying the poles in the closed
/// disc, unit-circle poles included. Either part may be absent (s = 0 or
/// t = 0). The constructor enforces dimensional consistency only;
/// stability of A and semi-stability of alpha are checked by
/// validate_stability so that callers can keep construction cheap.
struct Realization {
  std::size_t m = 0, s = 0, t = 0;
  CMatrix R0, C, A, B, gamma, alpha, beta;

  Realization() = default;

  Realization(CMatrix R0_, CMatrix C_, CMatrix A_, CMatrix B_, CMatrix gamma_,
              CMatrix alpha_, CMatrix beta_)
      : m(R0_.rows()),
        s(A_.rows()),
        t(alpha_.rows()),
        R0(std::move(R0_)),
        C(std::move(C_)),
        A(std::move(A_)),
        B(std::move(B_)),
        gamma(std::move(gamma_)),
        alpha(std::move(alpha_)),
        beta(std::move(beta_)) {
    check_dims();
  }

  static Realization constant(CMatrix R0) {
    const std::size_t m = R0.rows();
    return Realization(std::move(R0), CMatrix(m, 0), CMatrix(0, 0),
                       CMatrix(0, m), CMatrix(m, 0), CMatrix(0, 0),
                       CMatrix(0, m));
  }

  /// Symbol with only the analytic part (t = 0), e.g. a plus factor.
  static Realization plus_part(CMatrix R0, CMatrix C, CMatrix A, CMatrix B) {
    const std::size_t m = R0.rows();
    return Realization(std::move(R0), std::move(C), std::move(A),
                       std::move(B), CMatrix(m, 0), CMatrix(0, 0),
                       CMatrix(0, m));
  }

  /// Symbol with only the co-analytic part (s = 0), e.g. a minus factor.
  static Realization circle_part(CMatrix R0, CMatrix gamma, CMatrix alpha,
                                 CMatrix beta) {
    const std::size_t m = R0.rows();
    return Realization(std::move(R0), CMatrix(m, 0), CMatrix(0, 0),
                       CMatrix(0, m), std::move(gamma), std::move(alpha),
                       std::move(beta));
  }

 private:
  void check_dims() const {
    auto expect = [](const CMatrix& v, std::size_t r, std::size_t c,
                     const char* name) {
      if (v.rows() != r || v.cols() != c)
        throw InvalidRealization(std::string(name) + ": expected " +
                                 std::to_string(r) + "x" + std::to_string(c) +
                                 ", got " + std::to_string(v.rows()) + "x" +
                                 std::to_string(v.cols()));
    };
    expect(R0, m, m, "R0");
    expect(C, m, s, "C");
    expect(A, s, s, "A");
    expect(B, s, m, "B");
    expect(gamma, m, t, "gamma");
    expect(alpha, t, t, "alpha");
    expect(beta, t, m, "beta");
  }
};

inline double rho_plus(const Realization& r) { return spectral_radius(r.A); }
inline double rho_circle(const Realization& r) {
  return spectral_radius(r.alpha);
}

/// Requires rho(A) < 1 and rho(alpha) <= 1 (up to tol_circle slack for
/// eigenvalues of alpha sitting numerically on the circle).
inline void validate_stability(const Realization& r,
                               double tol_circle = 1e-9) {
  const double ra = rho_plus(r);
  if (!(ra < 1.0))
    throw InvalidRealization("A must be stable: spectral radius " +
                             std::to_string(ra));
  const double rc = rho_circle(r);
  if (!(rc <= 1.0 + tol_circle))
    throw InvalidRealization("alpha must be semi-stable: spectral radius " +
                             std::to_string(rc));
}

/// Pointwise value W(z). Throws PoleAtEvaluationPoint when z I - alpha or
/// I - z A is singular to working precision.
inline CMatrix evaluate(const Realization& r, Complex z) {
  CMatrix w = r.R0;
  try {
    if (r.s > 0) {
      CMatrix resolvent = CMatrix::identity(r.s) - z * r.A;
      w += z * (r.C * solve(resolvent, r.B));
    }
    if (r.t > 0) {
      CMatrix resolvent = z * CMatrix::identity(r.t) - r.alpha;
      w += r.gamma * solve(resolvent, r.beta);
    }
  } catch (const SingularMatrix&) {
    throw PoleAtEvaluationPoint("symbol evaluated at a pole: z = (" +
                                std::to_string(z.real()) + ", " +
                                std::to_string(z.imag()) + ")");
  }
  return w;
}

/// Coefficient of z^n in the Laurent expansion of W on the annulus between
/// the circle poles and the reciprocal plus poles:
///   n > 0:  C A^(n-1) B,   n = 0:  R0,   n = -k < 0:  gamma alpha^(k-1) beta.
inline CMatrix laurent_coefficient(const Realization& r, long n) {
  if (n == 0) return r.R0;
  if (n > 0) {
    if (r.s == 0) return CMatrix(r.m, r.m);
    return r.C * matrix_power(r.A, static_cast<std::size_t>(n - 1)) * r.B;
  }
  if (r.t == 0) return CMatrix(r.m, r.m);
  return r.gamma * matrix_power(r.alpha, static_cast<std::size_t>(-n - 1)) *
         r.beta;
}

/// Substitutes z -> rz: the coefficient of z^n picks up a factor r^n. Needs
/// 1 < r < 1/rho(A) so that the scaled plus part stays stable; the circle
/// poles of the scaled symbol move strictly inside the disc.
inline Realization scale(const Realization& r, double factor) {
  if (!(factor > 1.0))
    throw InvalidScaling("scaling radius must exceed 1, got " +
                         std::to_string(factor));
  const double ra = rho_plus(r);
  if (ra > 0.0 && !(factor * ra < 1.0))
    throw InvalidScaling("scaling radius " + std::to_string(factor) +
                         " reaches the plus poles (rho(A) = " +
                         std::to_string(ra) + ")");
  return Realization(r.R0, factor * r.C, factor * r.A, r.B, r.gamma,
                     (1.0 / factor) * r.alpha, (1.0 / factor) * r.beta);
}

/// [B, A B, ..., A^(N-1) B] laid out as one wide matrix.
inline CMatrix controllability_blocks(const CMatrix& a, const CMatrix& b,
                                      std::size_t n_blocks) {
  const std::size_t rows = a.rows();
  const std::size_t w = b.cols();
  CMatrix out(rows, n_blocks * w);
  CMatrix cur = b;
  for (std::size_t k = 0; k < n_blocks; ++k) {
    out.set_block(0, k * w, cur);
    if (k + 1 < n_blocks) cur = a * cur;
  }
  return out;
}

/// col(C; C A; ...; C A^(N-1)) laid out as one tall matrix.
inline CMatrix observability_blocks(const CMatrix& c, const CMatrix& a,
                                    std::size_t n_blocks) {
  const std::size_t h = c.rows();
  const std::size_t cols = a.cols();
  CMatrix out(n_blocks * h, cols);
  CMatrix cur = c;
  for (std::size_t k = 0; k < n_blocks; ++k) {
    out.set_block(k * h, 0, cur);
    if (k + 1 < n_blocks) cur = cur * a;
  }
  return out;
}

/// Kalman rank tests for both state pairs. The realization theory behind
/// the Riccati characterization assumes both parts are minimal.
struct MinimalityReport {
  std::size_t ctrl_plus = 0, obs_plus = 0;
  std::size_t ctrl_circle = 0, obs_circle = 0;
  bool ctrl_plus_ok = false, obs_plus_ok = false;
  bool ctrl_circle_ok = false, obs_circle_ok = false;
  bool pass = false;
};

inline MinimalityReport check_minimality(const Realization& r,
                                         double rel_tol = kPivotRelTol) {
  MinimalityReport rep;
  rep.ctrl_plus = numeric_rank(controllability_blocks(r.A, r.B, r.s), rel_tol);
  rep.obs_plus = numeric_rank(observability_blocks(r.C, r.A, r.s), rel_tol);
  rep.ctrl_circle =
      numeric_rank(controllability_blocks(r.alpha, r.beta, r.t), rel_tol);
  rep.obs_circle =
      numeric_rank(observability_blocks(r.gamma, r.alpha, r.t), rel_tol);
  rep.ctrl_plus_ok = rep.ctrl_plus == r.s;
  rep.obs_plus_ok = rep.obs_plus == r.s;
  rep.ctrl_circle_ok = rep.ctrl_circle == r.t;
  rep.obs_circle_ok = rep.obs_circle == r.t;
  rep.pass = rep.ctrl_plus_ok && rep.obs_plus_ok && rep.ctrl_circle_ok &&
             rep.obs_circle_ok;
  return rep;
}

}  // namespace toepricc
