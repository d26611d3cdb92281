#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cevm/errors.hpp"

namespace cevm {

using RealFn = std::function<double(double)>;

// Below this the two psi branches are indistinguishable in double precision;
// expm1 keeps the rho != 0 branch stable down to here.
inline constexpr double kRhoZeroEps = 1e-9;

// ERV limit function: psi(x) = k (x^rho - 1)/rho for rho != 0, k log x at 0.
inline double psi(double x, double rho, double k) {
  if (!(x > 0.0)) throw domain_error("psi: x must be > 0, got " + std::to_string(x));
  const double lx = std::log(x);
  if (std::fabs(rho) < kRhoZeroEps) return k * lx;
  return k * std::expm1(rho * lx) / rho;
}

// Residual of the identity psi(1/x) = -x^{-rho} psi(x).
inline double psi_inverse_identity_check(double x, double rho, double k) {
  return psi(1.0 / x, rho, k) + std::pow(x, -rho) * psi(x, rho, k);
}

// Residual of the cocycle psi(u y) = u^rho psi(y) + psi(u).
inline double psi_cocycle_check(double u, double y, double rho, double k) {
  return psi(u * y, rho, k) - (std::pow(u, rho) * psi(y, rho, k) + psi(u, rho, k));
}

// Standardization limit: phi(x) = c x^rho + psi(x; rho, k).  phi(1) = c.
inline double phi_std(double x, double c, double rho, double k) {
  if (!(x > 0.0)) throw domain_error("phi_std: x must be > 0");
  return c * std::pow(x, rho) + psi(x, rho, k);
}

// A scale/center function pair with its ERV parameters.
struct ErvPair {
  RealFn scale;   // a > 0 on (0,inf)
  RealFn center;  // f
  double rho = 0.0;
  double k = 0.0;
};

enum class MonotoneDirection { nondecreasing, nonincreasing };

// A standardization function f together with its phi-limit data.
struct StdFunction {
  RealFn f;
  MonotoneDirection direction = MonotoneDirection::nondecreasing;
  double c = 0.0;  // phi(1)
  double rho = 0.0;
  double k = 0.0;

  double phi(double x) const { return phi_std(x, c, rho, k); }

  // phi has two points of change unless it is constant, i.e. unless
  // k = 0 and (rho = 0 or c = 0).
  bool degenerate() const {
    if (k != 0.0) return false;
    return rho == 0.0 || c == 0.0;
  }
};

struct ErvFitReport {
  double rho_hat = 0.0;
  double k_hat = 0.0;
  double rho_residual = 0.0;  // RMS of log(a(tx)/a(t)) - rho log x
  double k_residual = 0.0;    // RMS of (f(tx)-f(t))/a(t) - psi(x)
  int points_used = 0;
};

namespace detail {

inline void check_finite(double v, const char* what, double t) {
  if (!std::isfinite(v))
    throw evaluation_error(std::string(what) + " non-finite at t=" + std::to_string(t));
}

}  // namespace detail

// Estimates (rho, k) of an ERV pair from function samples.  ERV is a limit
// statement, so only the 8 largest t of t_grid enter the regressions.
// rho from the slope of log(a(tx)/a(t)) on log x; k from a one-parameter
// least-squares fit of (f(tx)-f(t))/a(t) to the psi template.
inline ErvFitReport estimate_erv_params(const RealFn& a, const RealFn& f,
                                        std::vector<double> t_grid,
                                        const std::vector<double>& x_grid) {
  if (t_grid.empty() || x_grid.empty())
    throw domain_error("estimate_erv_params: empty grid");
  double x_min = *std::min_element(x_grid.begin(), x_grid.end());
  double x_max = *std::max_element(x_grid.begin(), x_grid.end());
  if (!(x_min > 0.0)) throw domain_error("estimate_erv_params: x_grid must be positive");
  if (x_max == x_min)
    throw domain_error("estimate_erv_params: degenerate x_grid (all points equal)");

  std::sort(t_grid.begin(), t_grid.end());
  const std::size_t keep = std::min<std::size_t>(8, t_grid.size());
  std::vector<double> ts(t_grid.end() - keep, t_grid.end());

  // rho: least squares through the origin of log-ratio on log x.
  double sxx = 0.0, sxy = 0.0;
  for (double t : ts) {
    const double at = a(t);
    detail::check_finite(at, "a", t);
    for (double x : x_grid) {
      if (x == 1.0) continue;
      const double atx = a(t * x);
      detail::check_finite(atx, "a", t * x);
      if (!(at > 0.0) || !(atx > 0.0))
        throw evaluation_error("estimate_erv_params: scale function not positive");
      const double lx = std::log(x);
      const double ratio = std::log(atx / at);
      sxx += lx * lx;
      sxy += lx * ratio;
    }
  }
  double rho_hat = sxy / sxx;

  auto fit_k = [&](double rho, double* residual) {
    double num = 0.0, den = 0.0;
    std::vector<double> obs, tpl;
    for (double t : ts) {
      const double at = a(t), ft = f(t);
      detail::check_finite(ft, "f", t);
      for (double x : x_grid) {
        if (x == 1.0) continue;
        const double ftx = f(t * x);
        detail::check_finite(ftx, "f", t * x);
        const double d = (ftx - ft) / at;
        const double basis = psi(x, rho, 1.0);
        obs.push_back(d);
        tpl.push_back(basis);
        num += d * basis;
        den += basis * basis;
      }
    }
    double k = den > 0.0 ? num / den : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double r = obs[i] - k * tpl[i];
      ss += r * r;
    }
    *residual = std::sqrt(ss / static_cast<double>(obs.size()));
    return k;
  };

  // Branch decision at rho ~ 0: take whichever template explains f better.
  if (std::fabs(rho_hat) < 1e-3) {
    double res_rho = 0.0, res_zero = 0.0;
    fit_k(rho_hat, &res_rho);
    fit_k(0.0, &res_zero);
    if (res_zero <= res_rho) rho_hat = 0.0;
  }

  ErvFitReport report;
  report.rho_hat = rho_hat;
  report.k_hat = fit_k(rho_hat, &report.k_residual);
  if (std::fabs(report.k_hat) < 1e-3) report.k_hat = 0.0;

  double ss = 0.0;
  int n = 0;
  for (double t : ts)
    for (double x : x_grid) {
      if (x == 1.0) continue;
      const double r = std::log(a(t * x) / a(t)) - rho_hat * std::log(x);
      ss += r * r;
      ++n;
    }
  report.rho_residual = std::sqrt(ss / std::max(1, n));
  report.points_used = n;
  return report;
}

// Local-uniform ERV evaluation with a moving argument x_t -> x.
// Returns (observed, expected) = ((f(t x_t)-f(t))/a(t), psi(x)).
inline std::pair<double, double> local_uniform_erv_limit(const RealFn& a, const RealFn& f,
                                                         double t, double x_t,
                                                         double x_limit, double rho,
                                                         double k) {
  if (!(t > 0.0) || !(x_t > 0.0))
    throw domain_error("local_uniform_erv_limit: t and x_t must be > 0");
  const double at = a(t);
  const double num = f(t * x_t) - f(t);
  detail::check_finite(at, "a", t);
  detail::check_finite(num, "f difference", t);
  return {num / at, psi(x_limit, rho, k)};
}

}  // namespace cevm
