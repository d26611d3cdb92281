#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cevm/distributions.hpp"
#include "cevm/domain.hpp"
#include "cevm/erv.hpp"
#include "cevm/errors.hpp"
#include "cevm/quadrature.hpp"

namespace cevm {

namespace detail {

// Integrand argument m(u) = u^rho x + psi(u; rho, k), monotone in u.
struct MuArgMap {
  double x, rho, k;

  double operator()(double u) const {
    if (std::fabs(rho) < kRhoZeroEps) {
      if (k == 0.0) return x;
      return x + k * std::log(u);
    }
    const double s = x + k / rho;
    return s * std::pow(u, rho) - k / rho;
  }

  // +1 rising, -1 falling, 0 constant.
  int direction() const {
    if (std::fabs(rho) < kRhoZeroEps) return k > 0.0 ? 1 : (k < 0.0 ? -1 : 0);
    const double s = x + k / rho;
    if (s == 0.0) return 0;
    return (s > 0.0) == (rho > 0.0) ? 1 : -1;
  }

  // Solves m(u) = v; NaN when no positive solution exists.
  double invert(double v) const {
    if (std::fabs(rho) < kRhoZeroEps) {
      if (k == 0.0) return std::nan("");
      return std::exp((v - x) / k);
    }
    const double s = x + k / rho;
    if (s == 0.0) return std::nan("");
    const double ratio = (v + k / rho) / s;
    if (!(ratio > 0.0)) return std::nan("");
    return std::pow(ratio, 1.0 / rho);
  }

  double limit_at_zero() const {
    if (std::fabs(rho) < kRhoZeroEps)
      return k == 0.0 ? x : (k > 0.0 ? -kInf : kInf);
    const double s = x + k / rho;
    if (rho > 0.0) return -k / rho;
    if (s == 0.0) return -k / rho;
    return s > 0.0 ? kInf : -kInf;
  }
};

// Lebesgue measure of {u in (0, upper] : m(u) >= level}.
inline double superlevel_length(const MuArgMap& m, double upper, double level) {
  const int dir = m.direction();
  if (dir == 0) return m(1.0) >= level ? upper : 0.0;
  const double lo_lim = m.limit_at_zero();
  const double hi_val = m(upper);
  if (dir > 0) {
    if (level <= lo_lim) return upper;
    if (level > hi_val) return 0.0;
    double u = m.invert(level);
    if (std::isnan(u)) return 0.0;
    return std::max(0.0, upper - std::min(u, upper));
  }
  if (level <= hi_val) return upper;
  if (level > lo_lim) return 0.0;
  double u = m.invert(level);
  if (std::isnan(u)) return 0.0;
  return std::min(u, upper);
}

// CDF of the continuous component (total CDF minus atoms at or below v).
inline double continuous_cdf(const DistSpec& g, double v) {
  double c = g.cdf(v);
  for (const auto& a : g.atoms())
    if (a.location <= v) c -= a.mass;
  return std::max(0.0, c);
}

}  // namespace detail

// Core integral  mu = int_0^upper G(u^rho x + psi(u)) du.
// Atom contributions are summed exactly over the superlevel intervals of the
// monotone argument map; the continuous component goes through adaptive
// quadrature with panels split at the preimages of G's knots.
inline double mu_integral(const DistSpec& g, double rho, double k, double x,
                          double upper, double abs_tol = 1e-10) {
  if (!(upper > 0.0)) return 0.0;
  if (x == kInf) return upper * g.total_mass();
  if (x == -kInf) return 0.0;
  if (std::fabs(rho) < kRhoZeroEps && k == 0.0) return g.cdf(x) * upper;

  const detail::MuArgMap m{x, rho, k};

  double value = 0.0;
  for (const auto& a : g.atoms())
    value += a.mass * detail::superlevel_length(m, upper, a.location);
  if (g.purely_discrete()) return value;

  const double u_floor = 1e-300;
  std::vector<double> splits;
  for (double knot : g.knots()) {
    const double u = m.invert(knot);
    if (!std::isnan(u) && u > u_floor && u < upper) splits.push_back(u);
  }
  auto integrand = [&](double u) { return detail::continuous_cdf(g, m(u)); };
  value += integrate(integrand, u_floor, upper, std::move(splits), abs_tol).value;
  return value;
}

// mu([-inf,x] x (y,inf]) under the general normalization (Theorem-4.2 form).
inline double mu_general(const DistSpec& g, double rho, double k, double x, double y,
                         double abs_tol = 1e-10) {
  if (!(y > 0.0)) throw domain_error("mu_general: y must be > 0 (the cone is open at 0)");
  return mu_integral(g, rho, k, x, 1.0 / y, abs_tol);
}

// mu([-inf,x] x (y,inf]) when Y has extreme value index gamma (general case).
inline double mu_gamma(const DistSpec& g, double rho, double k, double gamma, double x,
                       double y, double abs_tol = 1e-10) {
  if (!gamma_interval(gamma).contains(y))
    throw domain_error("mu_gamma: y outside E_gamma");
  return mu_integral(g, rho, k, x, gev_tail(y, gamma), abs_tol);
}

// Standard case: G on [0,inf), normalization x -> tx, i.e. (rho,k) = (1,0).
// Uses the partial-expectation identity when G carries one:
//   mu = (1/y) P[xi <= x/y] - (1/x) E[xi 1{xi <= x/y}].
inline double mu_standard(const DistSpec& g, double x, double y,
                          double abs_tol = 1e-10) {
  if (!(y > 0.0)) throw domain_error("mu_standard: y must be > 0");
  if (x < 0.0) return 0.0;
  if (x == 0.0) return g.mass_at(0.0) / y;
  if (g.has_partial_mean() && x != kInf) {
    const double z = x / y;
    return g.cdf(z) / y - g.partial_mean(z) / x;
  }
  return mu_integral(g, 1.0, 0.0, x, 1.0 / y, abs_tol);
}

// H(x) = mu([0,x] x (1,inf]) = (1/x) int_0^x G(u) du.
inline double h_distribution(const DistSpec& g, double x) {
  if (x < 0.0) throw domain_error("h_distribution: x must be >= 0");
  return mu_standard(g, x, 1.0);
}

namespace detail {

// Case-split evaluation for rho != 0:
//  mu = (1/(|rho| |s|^{1/rho})) * int over v of v^{(1-rho)/rho} G(sgn(s) v - k/rho) dv
// with domain (0, V] for rho > 0 and [V, inf) for rho < 0, V = |s| y^{-rho}.
// Antiderivative of the weight: rho v^{1/rho}.
inline double mu_cases_power(const DistSpec& g, double rho, double k, double x,
                             double y, double abs_tol) {
  const double s = x + k / rho;
  const double sigma = s > 0.0 ? 1.0 : -1.0;
  const double V = std::fabs(s) * std::pow(y, -rho);
  const double pref = 1.0 / (std::fabs(rho) * std::pow(std::fabs(s), 1.0 / rho));
  const double expo = (1.0 - rho) / rho;

  auto weight_int = [rho](double lo, double hi) {
    // int_lo^hi v^{(1-rho)/rho} dv = rho (hi^{1/rho} - lo^{1/rho})
    const double a = lo <= 0.0 ? 0.0 : std::pow(lo, 1.0 / rho);
    const double b = hi == kInf ? (rho < 0.0 ? 0.0 : kInf) : std::pow(hi, 1.0 / rho);
    return rho * (b - a);
  };

  const double dom_lo = rho > 0.0 ? 0.0 : V;
  const double dom_hi = rho > 0.0 ? V : kInf;

  double total = 0.0;

  // atoms: {v : sigma v - k/rho >= loc} intersected with the domain
  for (const auto& a : g.atoms()) {
    const double c = a.location + k / rho;
    double lo = dom_lo, hi = dom_hi;
    if (sigma > 0.0) {
      lo = std::max(lo, c);
    } else {
      if (c >= 0.0) continue;  // needs v <= -c < 0: empty
      hi = std::min(hi, -c);
    }
    if (hi > lo) total += a.mass * weight_int(lo, hi);
  }

  if (!g.purely_discrete()) {
    auto arg = [sigma, k, rho](double v) { return sigma * v - k / rho; };
    auto gm = [&](double v) { return continuous_cdf(g, arg(v)); };

    // v-window where the continuous CDF actually varies
    double span_lo = g.support_lower(), span_hi = g.support_upper();
    if (span_hi == kInf) {
      // push until the survival of the continuous part is negligible
      double probe = std::max(1.0, std::fabs(span_lo));
      while (g.survival(probe) > 1e-15 && probe < 1e150) probe *= 2.0;
      span_hi = probe;
    }
    if (span_lo == -kInf) {
      double probe = -std::max(1.0, std::fabs(span_hi));
      while (g.cdf(probe) - (g.cdf(probe) - continuous_cdf(g, probe)) > 1e-15 &&
             probe > -1e150)
        probe *= 2.0;
      span_lo = probe;
    }
    double w_lo, w_hi;  // preimage of [span_lo, span_hi] under arg()
    if (sigma > 0.0) {
      w_lo = span_lo + k / rho;
      w_hi = span_hi + k / rho;
    } else {
      w_lo = -(span_hi + k / rho);
      w_hi = -(span_lo + k / rho);
    }
    const double q_lo = std::max(dom_lo, std::max(w_lo, 0.0));
    const double q_hi = std::min(dom_hi, w_hi);

    // constant stretches outside the window, exact via the antiderivative
    auto const_val = [&](double v_probe) { return gm(v_probe); };
    if (q_lo > dom_lo) {
      const double c = const_val(0.5 * (dom_lo + q_lo));
      if (c > 0.0) total += c * weight_int(dom_lo, q_lo);
    }
    if (dom_hi > std::max(q_hi, dom_lo)) {
      const double lo = std::max(q_hi, dom_lo);
      const double c = const_val(lo == kInf ? 1e151 : (dom_hi == kInf ? lo * 2.0 : 0.5 * (lo + dom_hi)));
      if (c > 0.0) total += c * weight_int(lo, dom_hi);
    }

    if (q_hi > q_lo) {
      std::vector<double> splits;
      for (double knot : g.knots()) {
        if (!std::isfinite(knot)) continue;
        const double v = sigma > 0.0 ? knot + k / rho : -(knot + k / rho);
        if (v > q_lo && v < q_hi) splits.push_back(v);
      }
      double lo = q_lo;
      double stub = 0.0;
      if (lo == 0.0 && expo < 0.0) {
        // integrable singularity at v = 0: take a closed-form stub and start
        // the quadrature just above it, with geometric refinement splits
        const double eps = std::max(q_hi * 1e-24, 1e-290);
        stub = gm(eps) * weight_int(0.0, eps);
        lo = eps;
        for (double v = eps * 4.0; v < q_hi; v *= 4.0) splits.push_back(v);
      }
      auto f = [&](double v) { return std::pow(v, expo) * gm(v); };
      total += stub + integrate(f, lo, q_hi, std::move(splits), abs_tol).value;
    }
  }
  return pref * total;
}

// Case rho = 0, k != 0:
//  mu = (1/(|k| e^{x/k})) int_{-inf}^{x sgn(k) - |k| log y} e^{u/|k|} G(sgn(k) u) du
inline double mu_cases_exponential(const DistSpec& g, double k, double x, double y,
                                   double abs_tol) {
  const double ak = std::fabs(k);
  const double sigma = k > 0.0 ? 1.0 : -1.0;
  const double W = x * sigma - ak * std::log(y);
  const double pref = std::exp(-x / k) / ak;

  auto weight_int = [ak](double lo, double hi) {
    // int e^{u/|k|} du = |k| e^{u/|k|}
    const double a = lo == -kInf ? 0.0 : std::exp(lo / ak);
    return ak * (std::exp(hi / ak) - a);
  };

  double total = 0.0;
  for (const auto& a : g.atoms()) {
    // {u <= W : sigma u >= loc}
    double lo = -kInf, hi = W;
    if (sigma > 0.0)
      lo = a.location;
    else
      hi = std::min(hi, -a.location);
    if (hi > lo) total += a.mass * weight_int(lo, hi);
  }

  if (!g.purely_discrete()) {
    auto gm = [&](double u) { return continuous_cdf(g, sigma * u); };
    // below L the exponential weight is dead (e^{-70} ~ 4e-31)
    double L = W - 70.0 * ak;
    double lo_support = sigma > 0.0 ? g.support_lower() : -g.support_upper();
    if (std::isfinite(lo_support)) L = std::max(L, lo_support);
    if (L < W - 70.0 * ak) L = W - 70.0 * ak;
    // tail below L where gm is effectively constant
    const double c_tail = gm(L);
    if (c_tail > 0.0) total += c_tail * weight_int(-kInf, L);
    if (W > L) {
      std::vector<double> splits;
      for (double knot : g.knots()) {
        if (!std::isfinite(knot)) continue;
        const double u = sigma * knot;
        if (u > L && u < W) splits.push_back(u);
      }
      auto f = [&](double u) { return std::exp(u / ak) * (gm(u) - c_tail); };
      total += c_tail * weight_int(L, W) +
               integrate(f, L, W, std::move(splits), abs_tol).value;
    }
  }
  return pref * total;
}

}  // namespace detail

// Case-split closed-ish forms; an independent algebraic route that must agree
// with mu_general.  At the singular point x = -k/rho the measure reads
// G(-k/rho)/y.
inline double mu_general_cases(const DistSpec& g, double rho, double k, double x,
                               double y, double abs_tol = 1e-10) {
  if (!(y > 0.0)) throw domain_error("mu_general_cases: y must be > 0");
  if (x == kInf) return g.total_mass() / y;
  if (x == -kInf) return 0.0;
  if (std::fabs(rho) < kRhoZeroEps) {
    if (k == 0.0) return g.cdf(x) / y;
    return detail::mu_cases_exponential(g, k, x, y, abs_tol);
  }
  if (x + k / rho == 0.0) return g.cdf(-k / rho) / y;
  return detail::mu_cases_power(g, rho, k, x, y, abs_tol);
}

// ---------------------------------------------------------------------------

enum class MuRegime { standard, general, general_gamma };

// Parameters (G, rho, k, gamma) with an evaluator for mu([-inf,x] x (y,inf]).
// The standard regime is the general one with (rho,k) = (1,0) and G on [0,inf).
struct LimitMeasure {
  DistSpec g;
  double rho = 1.0;
  double k = 0.0;
  double gamma = 1.0;
  MuRegime regime = MuRegime::standard;

  static LimitMeasure standard_case(DistSpec g_) {
    return {std::move(g_), 1.0, 0.0, 1.0, MuRegime::standard};
  }
  static LimitMeasure general_case(DistSpec g_, double rho_, double k_) {
    return {std::move(g_), rho_, k_, 1.0, MuRegime::general};
  }
  static LimitMeasure general_gamma_case(DistSpec g_, double rho_, double k_, double gamma_) {
    return {std::move(g_), rho_, k_, gamma_, MuRegime::general_gamma};
  }

  double value(double x, double y) const {
    switch (regime) {
      case MuRegime::standard: return mu_standard(g, x, y);
      case MuRegime::general: return mu_general(g, rho, k, x, y);
      case MuRegime::general_gamma: return mu_gamma(g, rho, k, gamma, x, y);
    }
    return 0.0;
  }

  // mu([-inf,inf] x (y,inf]): 1/y in the standard/general regimes.
  double slab_total(double y) const {
    if (regime == MuRegime::general_gamma) return gev_tail(y, gamma);
    if (!(y > 0.0)) throw domain_error("slab_total: y must be > 0");
    return 1.0 / y;
  }

  double h(double x) const {
    if (regime == MuRegime::general_gamma) return value(x, 0.0);
    return value(x, 1.0);
  }
};

// ---------------------------------------------------------------------------
// Closed forms for the worked examples; quadrature-free oracles.

inline double closed_form_mu(const std::string& name,
                             const std::vector<double>& params, double x, double y) {
  if (!(y > 0.0) && name != "uniform-exp")
    throw domain_error("closed_form_mu: y must be > 0");
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw domain_error("closed_form_mu: " + name + " expects " + std::to_string(n) +
                         " parameter(s)");
  };
  if (name == "exp") {
    need(1);
    const double lam = params[0];
    if (x <= 0.0) return 0.0;
    return 1.0 / y - 1.0 / (lam * x) + std::exp(-lam * x / y) / (lam * x);
  }
  if (name == "pareto") {
    need(1);
    const double alpha = params[0];
    if (!(x > y)) return 0.0;  // no mass on {0 <= x <= y}
    if (alpha == 1.0) return 1.0 / y - 1.0 / x - std::log(x) / x + std::log(y) / x;
    if (alpha > 1.0)
      return 1.0 / y - (alpha / (alpha - 1.0)) / x +
             std::pow(y, alpha - 1.0) / (std::pow(x, alpha) * (alpha - 1.0));
    return 1.0 / y + (alpha / (1.0 - alpha)) / x -
           1.0 / (std::pow(x, alpha) * std::pow(y, 1.0 - alpha) * (1.0 - alpha));
  }
  if (name == "point_mass") {
    need(1);
    const double c = params[0];
    if (c == 0.0) return x >= 0.0 ? 1.0 / y : 0.0;
    return x > c * y ? 1.0 / y - c / x : 0.0;
  }
  if (name == "discrete") {
    double v = 0.0;
    for (std::size_t j = 0; j < params.size(); ++j) {
      const double kk = static_cast<double>(j);
      if (kk <= x / y) v += params[j] * (1.0 / y - kk / x);
    }
    return v;
  }
  if (name == "max-independent") {
    need(0);
    return x > y ? 1.0 / y - 1.0 / x : 0.0;
  }
  if (name == "mixture-square") {
    need(1);
    const double p = params[0];
    return x >= y ? p * (1.0 / y - 1.0 / x) : 0.0;
  }
  if (name == "mixture-square-wide") {
    // (t^2, t) normalization of the same model
    need(1);
    const double p = params[0];
    double v = p / y;
    if (x >= y * y) v += (1.0 - p) * (1.0 / y - 1.0 / std::sqrt(x));
    return v;
  }
  if (name == "integer-perturbed") {
    need(1);
    const double p = params[0];
    double v = 0.0;
    if (x >= y) v += p * (1.0 / y - 1.0 / x);
    if (x >= 2.0 * y) v += (1.0 - p) * (1.0 / y - 2.0 / x);
    return v;
  }
  if (name == "uniform-exp") {
    // G uniform on [0,1], rho=1, k=0, gamma=0; x > 0, y real
    need(0);
    if (x <= 0.0) return 0.0;
    if (std::log(x) <= y) return x * std::exp(-2.0 * y) / 2.0;
    return std::exp(-y) - 1.0 / (2.0 * x);
  }
  throw lookup_error(
      "closed_form_mu: unknown example '" + name +
      "'; known: exp, pareto, point_mass, discrete, max-independent, "
      "mixture-square, mixture-square-wide, integer-perturbed, uniform-exp");
}

// ---------------------------------------------------------------------------

struct ConeMasses {
  double y_axis_mass = 0.0;       // mu({0} x (y,inf]) = G({0})/y
  double right_slab_mass = 0.0;   // mu((x,inf] x (0,inf]) = E[xi]/x, may be +inf
  double larger_cone_value = 0.0; // (1/x)(1 + int_0^{x/y} G)
  std::optional<double> x_axis_mass;  // (1 - E[xi])/x, defined when E[xi] <= 1
};

inline ConeMasses axis_and_cone_masses(const DistSpec& g, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw domain_error("axis_and_cone_masses: need x, y > 0");
  ConeMasses out;
  out.y_axis_mass = g.mass_at(0.0) / y;
  double mean = g.has_mean() ? g.mean() : kInf;
  out.right_slab_mass = mean == kInf ? kInf : mean / x;
  // int_0^{x/y} G(u) du = x * mu_standard(G, x, y)
  out.larger_cone_value = (1.0 + x * mu_standard(g, x, y)) / x;
  if (mean <= 1.0) out.x_axis_mass = (1.0 - mean) / x;
  return out;
}

// ---------------------------------------------------------------------------

enum class CevmVerdict { cevm, degenerate, defective };

struct NondegeneracyReport {
  bool nondegenerate_in_x = false;
  std::vector<std::pair<double, double>> mass_at_plus_infinity;  // (y, mass)
  CevmVerdict verdict = CevmVerdict::degenerate;
};

inline const char* to_string(CevmVerdict v) {
  switch (v) {
    case CevmVerdict::cevm: return "cevm";
    case CevmVerdict::degenerate: return "degenerate";
    case CevmVerdict::defective: return "defective";
  }
  return "?";
}

// Conditional non-degeneracy of a mu evaluator on a grid: non-constant in x,
// and no mass on the line through x = +infinity.  slab_total(y) supplies the
// full-slab mass (1/y or gev_tail), so mass at infinity is slab - mu(x_max).
inline NondegeneracyReport nondegeneracy_check(
    const std::function<double(double, double)>& mu,
    const std::function<double(double)>& slab_total,
    const std::vector<double>& x_grid, const std::vector<double>& y_grid,
    double x_max, double tol = 1e-3) {
  NondegeneracyReport rep;
  bool varies = false;
  bool defect = false;
  for (double y : y_grid) {
    const double full = mu(x_max, y);
    const double slab = slab_total(y);
    const double inf_mass = std::max(0.0, slab - full);
    rep.mass_at_plus_infinity.emplace_back(y, inf_mass);
    if (inf_mass > tol * std::max(1.0, slab)) defect = true;
    if (full <= 0.0) continue;
    double lo = kInf, hi = -kInf;
    for (double x : x_grid) {
      const double v = mu(x, y) / full;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > tol) varies = true;
  }
  rep.nondegenerate_in_x = varies;
  if (defect)
    rep.verdict = CevmVerdict::defective;
  else
    rep.verdict = varies ? CevmVerdict::cevm : CevmVerdict::degenerate;
  return rep;
}

// ---------------------------------------------------------------------------

struct MomentRestriction {
  double master_integral = 0.0;  // int_0^inf P[xi > phi(x)] dx
  double case_moment = 0.0;      // the per-class moment form
  double bound = 1.0;
  bool satisfied = false;
  bool divergent = false;
};

// Moment restriction on a candidate limit G when the kernel is normalized by
// X's own attraction pair with index lambda:
//   lambda > 0:  E xi^{1/lambda} 1{xi>0}      <= lambda^{-1/lambda}
//   lambda = 0:  E e^xi                        <= 1
//   lambda < 0:  E (-1/xi)^{1/|lambda|} 1{xi<0} <= |lambda|^{1/|lambda|}
// The master integral recomputes the same moment as int_0^inf P[xi > phi(x)] dx
// through the tail-probability route; the two must agree where finite.
inline MomentRestriction moment_restriction_check(const DistSpec& g, double lambda,
                                                  double tol = 1e-9) {
  MomentRestriction out;

  auto tail_integral = [&](const std::function<double(double)>& prob_exceeds) {
    // int_0^inf prob(x) dx with doubling panels; flags divergence
    double total = 0.0;
    double lo = 0.0;
    for (double hi = 1.0; hi <= 1e60; hi *= 2.0) {
      auto seg = integrate(prob_exceeds, lo, hi, {}, 1e-12);
      total += seg.value;
      if (total > 1e12) return std::make_pair(kInf, true);
      if (seg.value < 1e-14 && prob_exceeds(hi) < 1e-14)
        return std::make_pair(total, false);
      lo = hi;
    }
    return std::make_pair(kInf, true);
  };

  if (lambda == 0.0) {
    // E e^xi, by quadrature over the quantile representation
    auto prob = [&](double x) { return g.survival(std::log(x)); };
    auto [v, div] = tail_integral(prob);
    out.master_integral = v;
    out.divergent = div;
    if (g.support_upper() == kInf) {
      // tail weight e^u against survival; divergence when survival decays
      // no faster than e^{-u}
      out.case_moment = v;  // identical object: E e^xi = int_0^inf P[xi > log x] dx
    } else {
      out.case_moment = v;
    }
    out.bound = 1.0;
  } else if (lambda > 0.0) {
    auto prob = [&](double x) { return g.survival(std::pow(x, lambda)); };
    auto [v, div] = tail_integral(prob);
    out.master_integral = v;  // = E xi_+^{1/lambda}
    out.divergent = div;
    // same moment through the distribution route
    const double inv = 1.0 / lambda;
    auto mom = [&](double x) {
      // P[xi_+^{1/lambda} > x] = P[xi > x^lambda]
      return g.survival(std::pow(x, lambda));
    };
    (void)mom;
    // direct expectation by quantile quadrature for the dual path
    auto direct = integrate(
        [&](double p) {
          const double q = g.quantile(std::min(1.0, std::max(p, 1e-15)));
          return q > 0.0 ? std::pow(q, inv) : 0.0;
        },
        0.0, g.total_mass(), {}, 1e-10);
    out.case_moment = div ? kInf : direct.value;
    out.bound = std::pow(lambda, -1.0 / lambda);
  } else {
    const double al = std::fabs(lambda);
    auto prob = [&](double x) {
      // P[(-1/xi)^{1/|l|} 1{xi<0} > x] = P[-x^{-|l|} < xi < 0]
      const double lower = -std::pow(x, -al);
      double p = g.cdf(-std::numeric_limits<double>::min()) - g.cdf(lower);
      // remove the atom exactly at `lower` (strict inequality)
      p += g.mass_at(lower);
      return std::max(0.0, p);
    };
    auto [v, div] = tail_integral(prob);
    out.master_integral = v;
    out.divergent = div;
    auto direct = integrate(
        [&](double p) {
          const double q = g.quantile(std::min(1.0, std::max(p, 1e-15)));
          return q < 0.0 ? std::pow(-1.0 / q, 1.0 / al) : 0.0;
        },
        0.0, g.total_mass(), {}, 1e-10);
    out.case_moment = div ? kInf : direct.value;
    out.bound = std::pow(al, 1.0 / al);
  }
  out.satisfied = !out.divergent && out.master_integral <= out.bound + tol + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------

// Prop-4.5 consistency: the standardized measure evaluated through the
// pushforward G_f equals mu at the phi-image.
//   lhs = mu_standard(G_f, x, y)   with G_f([0,x]) = G(A_phi(x))
//   rhs = mu_general(G, rho, k, phi(x), y)          (f non-decreasing)
//         1/y - mu_general(G, rho, k, phi(x)-, y)   (f non-increasing)
struct StandardizationPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline StandardizationPair standardization_consistency(const DistSpec& g, double rho,
                                                       double k, const StdFunction& f,
                                                       double x, double y) {
  if (std::fabs(rho) < kRhoZeroEps && k == 0.0)
    throw precondition_error(
        "standardization_consistency: (rho,k) = (0,0); standardization is possible "
        "iff (rho,k) != (0,0)");
  if (f.degenerate())
    throw domain_error("standardization_consistency: phi lacks two points of change");

  const bool rising = f.direction == MonotoneDirection::nondecreasing;
  auto gf_cdf = [g, f, rising](double u) {
    if (u <= 0.0) return 0.0;
    const double val = f.phi(u);
    return rising ? g.cdf(val) : g.survival(val) + g.mass_at(val);
  };
  // knots of G_f: preimages of G's knots under the monotone phi, by bisection
  std::vector<double> knots;
  for (double knot : g.knots()) {
    if (!std::isfinite(knot)) continue;
    double lo = 1e-12, hi = 1e12;
    auto val = [&](double u) { return rising ? f.phi(u) : -f.phi(u); };
    const double target = rising ? knot : -knot;
    if (val(lo) >= target || val(hi) <= target) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, lo); ++it) {
      const double mid = std::sqrt(lo * hi);
      (val(mid) < target ? lo : hi) = mid;
    }
    knots.push_back(0.5 * (lo + hi));
  }
  DistSpec gf = DistSpec::from_cdf(gf_cdf, 0.0, kInf, std::move(knots), "pushforward");

  StandardizationPair out;
  out.lhs = mu_standard(gf, x, y);
  const double phix = f.phi(x);
  if (rising) {
    out.rhs = mu_general(g, rho, k, phix, y);
  } else {
    // complement on the slab, read with the left limit at phi(x).  The set
    // {u : m(u) = phi(x)} has positive measure only when the argument map is
    // constant (phi(x) = -k/rho); there an atom of G at that point must be
    // excluded from the strictly-below mass.
    double below = mu_general(g, rho, k, phix, y);
    if (std::fabs(rho) >= kRhoZeroEps && phix + k / rho == 0.0)
      below -= g.mass_at(phix) / y;
    out.rhs = 1.0 / y - below;
  }
  return out;
}

}  // namespace cevm
