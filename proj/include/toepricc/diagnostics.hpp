#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "toepricc/linalg.hpp"
#include "toepricc/matrix.hpp"
#include "toepricc/parallel.hpp"
#include "toepricc/realization.hpp"

namespace toepricc {

struct CirclePole {
  Complex value;
  bool on_unit_circle = false;
};

struct SymbolDiagnostics {
  std::vector<Complex> plus_poles;      // reciprocals of eigenvalues of A
  std::vector<CirclePole> circle_poles; // eigenvalues of alpha
  double zero_scan_min = 0.0;
  Complex zero_scan_argmin;
  double r0_estimate = 2.0;
  double scan_offset = 0.0;             // the three scan radii are 1 -+ this
  std::size_t grid_size = 0;
};

/// Pole locations and a smallest-singular-value scan of W over three
/// circles hugging the unit circle. The scan is a screen, not a proof: a
/// zero of det W between grid points can go unnoticed. r0_estimate is a
/// radius below which W has no poles other than the unit-circle ones,
/// capped at 2.
inline SymbolDiagnostics diagnose(const Realization& r,
                                  std::size_t grid_size = 1024,
                                  double tol_zero = 1e-8,
                                  double tol_circle = 1e-9) {
  (void)tol_zero;  // the decision against this threshold is the caller's
  SymbolDiagnostics d;
  d.grid_size = grid_size;

  const double tiny = 1e-13 * (1.0 + r.A.inf_norm());
  double max_outer = 0.0;  // largest |eig A|, poles at the reciprocals
  for (const Complex& l : eigenvalues(r.A)) {
    if (std::abs(l) > tiny) d.plus_poles.push_back(1.0 / l);
    max_outer = std::max(max_outer, std::abs(l));
  }
  double max_inner = 0.0;  // largest strictly interior circle-part pole
  for (const Complex& l : eigenvalues(r.alpha)) {
    CirclePole p;
    p.value = l;
    p.on_unit_circle = std::abs(std::abs(l) - 1.0) <= tol_circle;
    if (!p.on_unit_circle && std::abs(l) < 1.0)
      max_inner = std::max(max_inner, std::abs(l));
    d.circle_poles.push_back(p);
  }

  double r0 = 2.0;
  if (max_outer > 0.0) r0 = std::min(r0, 1.0 / max_outer);
  if (max_inner > 0.0) r0 = std::min(r0, 1.0 / max_inner);
  d.r0_estimate = r0;
  d.scan_offset = std::min(0.5 * (r0 - 1.0), 0.05);

  const double radii[3] = {1.0 - d.scan_offset, 1.0, 1.0 + d.scan_offset};
  const std::size_t total = 3 * grid_size;
  std::vector<double> sigma(total, -1.0);  // -1 marks skipped points
  std::vector<Complex> points(total);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(grid_size);
  parallel_for(total, [&](std::size_t idx) {
    const double radius = radii[idx / grid_size];
    const double theta = step * static_cast<double>(idx % grid_size);
    const Complex z = radius * Complex(std::cos(theta), std::sin(theta));
    points[idx] = z;
    for (const CirclePole& p : d.circle_poles)
      if (std::abs(z - p.value) <= tol_circle) return;
    try {
      sigma[idx] = smallest_singular_value(evaluate(r, z));
    } catch (const PoleAtEvaluationPoint&) {
    }
  });
  double best = std::numeric_limits<double>::infinity();
  Complex argmin;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (sigma[idx] < 0.0) continue;
    if (sigma[idx] < best) {
      best = sigma[idx];
      argmin = points[idx];
    }
  }
  d.zero_scan_min = std::isfinite(best) ? best : 0.0;
  d.zero_scan_argmin = argmin;
  return d;
}

/// Default scaling radius for section experiments: a quarter of the way
/// from the unit circle to the nearest obstruction, never beyond 1.1.
inline double pipeline_radius(const SymbolDiagnostics& d) {
  return std::min(1.0 + 0.25 * (d.r0_estimate - 1.0), 1.1);
}

}  // namespace toepricc
