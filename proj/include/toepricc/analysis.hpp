#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "toepricc/diagnostics.hpp"
#include "toepricc/errors.hpp"
#include "toepricc/factorization.hpp"
#include "toepricc/json_io.hpp"
#include "toepricc/realization.hpp"
#include "toepricc/riccati.hpp"
#include "toepricc/section.hpp"
#include "toepricc/toeplitz.hpp"

namespace toepricc {

enum class Verdict { invertible, not_invertible, undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::invertible: return "invertible";
    case Verdict::not_invertible: return "not_invertible";
    default: return "undecided";
  }
}

/// Process exit code contract: 0 invertible, 3 not invertible, 4 undecided
/// (1 and 2 are reserved for input errors and circle zeros).
inline int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::invertible: return 0;
    case Verdict::not_invertible: return 3;
    default: return 4;
  }
}

struct AnalyzeOptions {
  double tol = 1e-12;            // Riccati fixed-point stop
  std::size_t max_iter = 10000;
  std::size_t n_max = 64;        // largest finite section in the study
  std::size_t grid = 1024;       // diagnostic scan resolution
  std::size_t verify_grid = 256; // factorization residual grids
  Split split = Split::identity_delta;
  double tol_zero = 1e-8;
  double tol_circle = 1e-9;
  double residual_tol = 1e-9;    // gate on the factorization residuals
  double window_tol = 1e-6;      // gate on the inverse corner agreement
};

struct InverseCheckRow {
  std::size_t n = 0;
  double max_block_error = std::numeric_limits<double>::quiet_NaN();
  bool section_singular = false;
  double corner_delta = std::numeric_limits<double>::quiet_NaN();
};

struct StageTimings {
  double diagnose_ms = 0.0;
  double riccati_ms = 0.0;
  double factorization_ms = 0.0;
  double inverse_check_ms = 0.0;
  double total_ms = 0.0;
};

struct AnalysisReport {
  AnalyzeOptions options;
  std::size_t m = 0, s = 0, t = 0;
  double rho_A = 0.0, rho_alpha = 0.0;
  MinimalityReport input_minimality;
  SymbolDiagnostics diagnostics;
  RiccatiSolution riccati;
  bool have_factorization = false;
  FactorPair factors;
  double product_residual = std::numeric_limits<double>::quiet_NaN();
  double inverse_residual = std::numeric_limits<double>::quiet_NaN();
  double recomposition_error = std::numeric_limits<double>::quiet_NaN();
  FactorMinimality factor_minimality;
  std::size_t window = 0;
  std::vector<InverseCheckRow> inverse_check;
  bool inverse_converged = false;
  std::string section_signal = "skipped";
  Verdict verdict = Verdict::undecided;
  StageTimings timings;
};

namespace detail {

inline std::vector<std::size_t> study_sizes(std::size_t n_max) {
  std::vector<std::size_t> out;
  for (std::size_t n = 8; n < n_max; n *= 2) out.push_back(n);
  out.push_back(std::max<std::size_t>(n_max, 1));
  return out;
}

inline double ms_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

/// Top-left window of the numerically inverted section: solve against the
/// leading block columns of the identity.
inline CMatrix inverted_corner(const ToeplitzSection& sec, std::size_t window) {
  const std::size_t dim = sec.data.rows();
  const std::size_t w = window * sec.block_size;
  CMatrix rhs(dim, w);
  for (std::size_t k = 0; k < w; ++k) rhs(k, k) = 1.0;
  const CMatrix x = solve(sec.data, rhs);
  return x.block(0, 0, w, w);
}

}  // namespace detail

/// Full decision pipeline. Throws InputError when the realization fails
/// validation and ZeroOnCircle when the scan finds a numerical zero of the
/// symbol on the unit circle (the operator is then not Fredholm and the
/// Riccati machinery does not apply).
inline AnalysisReport analyze(const Realization& r,
                              const AnalyzeOptions& options = {}) {
  const auto t_total = std::chrono::steady_clock::now();
  AnalysisReport rep;
  rep.options = options;
  rep.m = r.m;
  rep.s = r.s;
  rep.t = r.t;
  try {
    validate_stability(r, options.tol_circle);
  } catch (const InvalidRealization& e) {
    throw InputError(e.what());
  }
  rep.rho_A = rho_plus(r);
  rep.rho_alpha = rho_circle(r);
  rep.input_minimality = check_minimality(r);
  if (!rep.input_minimality.pass)
    throw InputError(
        "realization is not minimal (Kalman ranks: plus " +
        std::to_string(rep.input_minimality.ctrl_plus) + "/" +
        std::to_string(rep.input_minimality.obs_plus) + " of " +
        std::to_string(r.s) + ", circle " +
        std::to_string(rep.input_minimality.ctrl_circle) + "/" +
        std::to_string(rep.input_minimality.obs_circle) + " of " +
        std::to_string(r.t) + ")");

  auto t0 = std::chrono::steady_clock::now();
  rep.diagnostics =
      diagnose(r, options.grid, options.tol_zero, options.tol_circle);
  rep.timings.diagnose_ms = detail::ms_since(t0);
  if (rep.diagnostics.zero_scan_min < options.tol_zero)
    throw ZeroOnCircle(
        "smallest singular value " +
        std::to_string(rep.diagnostics.zero_scan_min) + " near z = (" +
        std::to_string(rep.diagnostics.zero_scan_argmin.real()) + ", " +
        std::to_string(rep.diagnostics.zero_scan_argmin.imag()) +
        "): the symbol vanishes on the unit circle, the operator is not "
        "Fredholm");

  t0 = std::chrono::steady_clock::now();
  rep.riccati = solve_fixed_point(r, options.tol, options.max_iter);
  rep.timings.riccati_ms = detail::ms_since(t0);

  const std::vector<std::size_t> sizes = detail::study_sizes(options.n_max);
  rep.window = std::min<std::size_t>(8, sizes.front());

  if (rep.riccati.stabilizing) {
    t0 = std::chrono::steady_clock::now();
    rep.factors = build_factors(r, rep.riccati, options.split);
    rep.have_factorization = true;
    rep.product_residual = verify_product(r, rep.factors, options.verify_grid);
    rep.inverse_residual =
        verify_inverse_factors(r, rep.factors, options.verify_grid);
    rep.recomposition_error =
        (rep.factors.delta * rep.factors.D -
         (r.R0 - r.gamma * (rep.riccati.Q * r.B)))
            .frobenius_norm();
    rep.factor_minimality = check_minimality_of_factors(rep.factors);
    rep.timings.factorization_ms = detail::ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const InverseBlocks corner = inverse_blocks(rep.factors, rep.window);
    for (std::size_t n : sizes) {
      InverseCheckRow row;
      row.n = n;
      try {
        const CMatrix numeric =
            detail::inverted_corner(build_section(r, n), rep.window);
        double worst = 0.0;
        for (std::size_t i = 0; i < rep.window; ++i)
          for (std::size_t j = 0; j < rep.window; ++j)
            worst = std::max(
                worst, (numeric.block(i * r.m, j * r.m, r.m, r.m) -
                        corner.block(i, j))
                           .frobenius_norm());
        row.max_block_error = worst;
      } catch (const SingularMatrix&) {
        row.section_singular = true;
      }
      rep.inverse_check.push_back(row);
    }
    rep.timings.inverse_check_ms = detail::ms_since(t0);
    const InverseCheckRow& last = rep.inverse_check.back();
    rep.inverse_converged =
        !last.section_singular && last.max_block_error < options.window_tol;
    rep.section_signal = rep.inverse_converged ? "converged" : "inconclusive";

    const bool residuals_ok = rep.product_residual < options.residual_tol &&
                              rep.inverse_residual < options.residual_tol;
    rep.verdict = (residuals_ok && rep.inverse_converged)
                      ? Verdict::invertible
                      : Verdict::undecided;
  } else {
    // No stabilizing solution. That alone does not separate "not
    // invertible" from "iteration trouble", so probe the finite sections
    // for corroboration: singular sections or a non-settling inverse
    // corner push the verdict to not_invertible, anything else stays
    // undecided.
    t0 = std::chrono::steady_clock::now();
    bool any_singular = false;
    CMatrix prev_corner;
    std::vector<double> deltas;
    for (std::size_t n : sizes) {
      InverseCheckRow row;
      row.n = n;
      try {
        const ToeplitzSection sec = build_section(r, n);
        CMatrix rhs(sec.data.rows(), r.m);
        for (std::size_t k = 0; k < r.m; ++k) rhs(k, k) = 1.0;
        const CMatrix corner00 =
            solve(sec.data, rhs).block(0, 0, r.m, r.m);
        if (!prev_corner.empty()) {
          row.corner_delta = (corner00 - prev_corner).frobenius_norm();
          deltas.push_back(row.corner_delta);
        }
        prev_corner = corner00;
      } catch (const SingularMatrix&) {
        row.section_singular = true;
        any_singular = true;
        prev_corner = CMatrix();
      }
      rep.inverse_check.push_back(row);
    }
    rep.timings.inverse_check_ms = detail::ms_since(t0);
    bool diverging = false;
    if (deltas.size() >= 2)
      diverging = deltas.back() > 0.5 * deltas.front() &&
                  deltas.back() > options.tol;
    if (any_singular)
      rep.section_signal = "singular_sections";
    else if (diverging)
      rep.section_signal = "diverging_corner";
    else
      rep.section_signal = "inconclusive";
    rep.verdict = (any_singular || diverging) ? Verdict::not_invertible
                                              : Verdict::undecided;
  }
  rep.timings.total_ms = detail::ms_since(t_total);
  return rep;
}

namespace detail {

inline json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline json complex_to_json(Complex z) {
  return json::array({z.real(), z.imag()});
}

inline json minimality_to_json(const MinimalityReport& m) {
  json v;
  v["ctrl_plus"] = m.ctrl_plus;
  v["obs_plus"] = m.obs_plus;
  v["ctrl_circle"] = m.ctrl_circle;
  v["obs_circle"] = m.obs_circle;
  v["pass"] = m.pass;
  return v;
}

}  // namespace detail

inline json report_to_json(const AnalysisReport& rep) {
  json v;
  {
    json e;
    e["m"] = rep.m;
    e["s"] = rep.s;
    e["t"] = rep.t;
    e["rho_A"] = rep.rho_A;
    e["rho_alpha"] = rep.rho_alpha;
    e["minimality"] = detail::minimality_to_json(rep.input_minimality);
    v["input_echo"] = std::move(e);
  }
  {
    json d;
    d["r0_estimate"] = rep.diagnostics.r0_estimate;
    d["scan_offset"] = rep.diagnostics.scan_offset;
    d["grid_size"] = rep.diagnostics.grid_size;
    d["zero_scan_min"] = rep.diagnostics.zero_scan_min;
    d["zero_scan_argmin"] =
        detail::complex_to_json(rep.diagnostics.zero_scan_argmin);
    json pp = json::array();
    for (const Complex& p : rep.diagnostics.plus_poles)
      pp.push_back(detail::complex_to_json(p));
    d["plus_poles"] = std::move(pp);
    json cp = json::array();
    for (const CirclePole& p : rep.diagnostics.circle_poles) {
      json q;
      q["value"] = detail::complex_to_json(p.value);
      q["on_unit_circle"] = p.on_unit_circle;
      cp.push_back(std::move(q));
    }
    d["circle_poles"] = std::move(cp);
    v["diagnostics"] = std::move(d);
  }
  {
    json rc;
    switch (rep.riccati.status) {
      case RiccatiStatus::converged: rc["status"] = "converged"; break;
      case RiccatiStatus::pivot_breakdown:
        rc["status"] = "pivot_breakdown";
        break;
      default: rc["status"] = "max_iterations"; break;
    }
    rc["stabilizing"] = rep.riccati.stabilizing;
    rc["pivot_ok"] = rep.riccati.pivot_ok;
    rc["iterations"] = rep.riccati.iterations;
    rc["residual"] = detail::num_or_null(rep.riccati.residual);
    rc["rho_A_closed"] = detail::num_or_null(rep.riccati.rho_A_closed);
    rc["rho_alpha_closed"] =
        detail::num_or_null(rep.riccati.rho_alpha_closed);
    rc["Q"] = matrix_to_json(rep.riccati.Q);
    v["riccati"] = std::move(rc);
  }
  if (rep.have_factorization) {
    json f;
    f["split"] = rep.factors.split == Split::identity_delta
                     ? "identity_delta"
                     : "identity_D";
    f["product_residual"] = detail::num_or_null(rep.product_residual);
    f["inverse_residual"] = detail::num_or_null(rep.inverse_residual);
    f["recomposition_error"] = detail::num_or_null(rep.recomposition_error);
    json fm;
    fm["theta"] = rep.factor_minimality.theta.pass;
    fm["psi"] = rep.factor_minimality.psi.pass;
    fm["theta_inv"] = rep.factor_minimality.theta_inv.pass;
    fm["psi_inv"] = rep.factor_minimality.psi_inv.pass;
    f["minimality"] = std::move(fm);
    v["factorization"] = std::move(f);
  } else {
    v["factorization"] = nullptr;
  }
  {
    json ic;
    ic["window"] = rep.window;
    json rows = json::array();
    for (const InverseCheckRow& row : rep.inverse_check) {
      json jr;
      jr["N"] = row.n;
      jr["max_block_error"] = detail::num_or_null(row.max_block_error);
      jr["section_singular"] = row.section_singular;
      jr["corner_delta"] = detail::num_or_null(row.corner_delta);
      rows.push_back(std::move(jr));
    }
    ic["rows"] = std::move(rows);
    ic["signal"] = rep.section_signal;
    ic["converged"] = rep.inverse_converged;
    v["inverse_check"] = std::move(ic);
  }
  v["verdict"] = verdict_name(rep.verdict);
  {
    json tm;
    tm["diagnose_ms"] = rep.timings.diagnose_ms;
    tm["riccati_ms"] = rep.timings.riccati_ms;
    tm["factorization_ms"] = rep.timings.factorization_ms;
    tm["inverse_check_ms"] = rep.timings.inverse_check_ms;
    tm["total_ms"] = rep.timings.total_ms;
    v["timings"] = std::move(tm);
  }
  return v;
}

inline std::string report_to_text(const AnalysisReport& rep) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("symbol: m=" + std::to_string(rep.m) + " s=" + std::to_string(rep.s) +
       " t=" + std::to_string(rep.t) +
       "  rho(A)=" + std::to_string(rep.rho_A) +
       "  rho(alpha)=" + std::to_string(rep.rho_alpha));
  line("zero scan: min sigma " + std::to_string(rep.diagnostics.zero_scan_min) +
       ", r0 estimate " + std::to_string(rep.diagnostics.r0_estimate));
  std::string status;
  switch (rep.riccati.status) {
    case RiccatiStatus::converged: status = "converged"; break;
    case RiccatiStatus::pivot_breakdown: status = "pivot breakdown"; break;
    default: status = "iteration budget exhausted"; break;
  }
  line("riccati: " + status + " after " +
       std::to_string(rep.riccati.iterations) + " iterations, " +
       (rep.riccati.stabilizing ? "stabilizing" : "not stabilizing"));
  if (rep.have_factorization) {
    line("factorization: product residual " +
         std::to_string(rep.product_residual) + ", inverse residual " +
         std::to_string(rep.inverse_residual));
  }
  line("inverse check: " + rep.section_signal);
  line("verdict: " + std::string(verdict_name(rep.verdict)));
  return out;
}

}  // namespace toepricc
