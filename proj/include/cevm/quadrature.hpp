#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cevm/errors.hpp"

namespace cevm {

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK constants).
inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  double kronrod;
  double err;
};

inline GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_mid = f(mid);
  double kron = kKronrodWeights[7] * f_mid;
  double gauss = kGaussWeights[3] * f_mid;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kGkNodes[j];
    const double fv = f(mid - dx) + f(mid + dx);
    kron += kKronrodWeights[j] * fv;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * fv;
  }
  kron *= half;
  gauss *= half;
  return {kron, std::fabs(kron - gauss)};
}

}  // namespace detail

// Adaptive bisection built on the embedded GK 7-15 pair.  `breakpoints` are
// interior abscissae where the integrand may be non-smooth; the interval is
// pre-split there so each panel sees a smooth piece.  Throws numeric_error
// (carrying the achieved bound) if the tolerance cannot be met within
// max_levels of refinement.
inline QuadratureResult integrate(const std::function<double(double)>& f, double a,
                                  double b, std::vector<double> breakpoints = {},
                                  double abs_tol = 1e-10, int max_levels = 60) {
  QuadratureResult out;
  if (!(b > a)) return out;

  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());

  struct Panel {
    double lo, hi;
    int level;
  };
  std::vector<Panel> stack;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = std::max(breakpoints[i], a);
    const double hi = std::min(breakpoints[i + 1], b);
    if (hi > lo) stack.push_back({lo, hi, 0});
  }
  const double panel_tol = abs_tol / static_cast<double>(std::max<std::size_t>(1, stack.size()));

  int evals = 0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    auto est = detail::gk15(f, p.lo, p.hi);
    evals += 15;
    // Per-panel budget scaled by width keeps the total near abs_tol without
    // forcing uniform refinement.
    const double budget = std::max(panel_tol * (p.hi - p.lo) / (b - a), 1e-300);
    if (est.err <= budget || est.err <= 1e-16 * std::fabs(est.kronrod)) {
      out.value += est.kronrod;
      out.error_bound += est.err;
      continue;
    }
    if (p.level >= max_levels) {
      out.value += est.kronrod;
      out.error_bound += est.err;
      if (out.error_bound > abs_tol * 10.0)
        throw numeric_error("integrate: tolerance not reached after max refinement",
                            out.error_bound);
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    if (!(mid > p.lo && mid < p.hi)) {  // interval narrower than one ulp
      out.value += est.kronrod;
      out.error_bound += est.err;
      continue;
    }
    stack.push_back({p.lo, mid, p.level + 1});
    stack.push_back({mid, p.hi, p.level + 1});
  }
  out.evaluations = evals;
  return out;
}

}  // namespace cevm
