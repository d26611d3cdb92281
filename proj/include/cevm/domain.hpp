#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "cevm/distributions.hpp"
#include "cevm/erv.hpp"
#include "cevm/errors.hpp"

namespace cevm {

// E_gamma = {y : 1 + gamma y > 0}.
struct GammaInterval {
  double lower = -kInf;
  double upper = kInf;
  bool contains(double y) const { return y > lower && y < upper; }
};

inline GammaInterval gamma_interval(double gamma) {
  if (gamma > 0.0) return {-1.0 / gamma, kInf};
  if (gamma < 0.0) return {-kInf, 1.0 / std::fabs(gamma)};
  return {-kInf, kInf};
}

// GEV tail (1 + gamma y)^{-1/gamma}, read as e^{-y} when gamma = 0.
// log1p keeps the general branch stable through the gamma -> 0 switch.
inline double gev_tail(double y, double gamma) {
  const auto iv = gamma_interval(gamma);
  if (!iv.contains(y)) {
    if (y == iv.upper && gamma < 0.0) return 0.0;  // closed on the right
    throw domain_error("gev_tail: y=" + std::to_string(y) + " outside E_gamma=(" +
                       std::to_string(iv.lower) + ", " + std::to_string(iv.upper) + ")");
  }
  if (std::fabs(gamma) < kRhoZeroEps) return std::exp(-y);
  return std::exp(-std::log1p(gamma * y) / gamma);
}

// Domain-of-attraction data for Y: index, scale/center pair, support interval.
struct GammaDomain {
  double gamma = 0.0;
  RealFn scale;   // a(t) > 0
  RealFn center;  // b(t)
  GammaInterval interval;

  ErvPair erv_pair() const { return {scale, center, gamma, 1.0}; }
};

// Canonical center b(t) = F^{<-}(1 - 1/t).
inline double b_from_quantile(const DistSpec& f, double t) {
  if (!(t > 1.0)) throw domain_error("b_from_quantile: need t > 1");
  return f.quantile_tail(1.0 / t);
}

struct DomainCheckRow {
  double y = 0.0;
  double sup_deviation = 0.0;  // over the largest t values
  double limit = 0.0;          // gev_tail(y, gamma)
};

struct DomainCheckReport {
  std::vector<DomainCheckRow> rows;
  bool pass = false;
  double tol = 0.0;
};

// Evaluates t (1 - F(a(t) y + b(t))) along t_grid and reports the per-y sup
// deviation from gev_tail(y, gamma) over the largest t values.  Diagnostic:
// reports numbers even on fail.
inline DomainCheckReport check_domain_of_attraction(const DistSpec& f, double gamma,
                                                    const RealFn& a, const RealFn& b,
                                                    std::vector<double> t_grid,
                                                    const std::vector<double>& y_grid,
                                                    double tol) {
  if (t_grid.empty() || y_grid.empty())
    throw domain_error("check_domain_of_attraction: empty grid");
  const auto iv = gamma_interval(gamma);
  for (double y : y_grid)
    if (!iv.contains(y))
      throw domain_error("check_domain_of_attraction: y_grid point outside E_gamma");
  std::sort(t_grid.begin(), t_grid.end());
  const std::size_t keep = std::min<std::size_t>(4, t_grid.size());

  DomainCheckReport report;
  report.tol = tol;
  report.pass = true;
  for (double y : y_grid) {
    DomainCheckRow row;
    row.y = y;
    row.limit = gev_tail(y, gamma);
    for (std::size_t i = t_grid.size() - keep; i < t_grid.size(); ++i) {
      const double t = t_grid[i];
      const double tail = t * f.survival(a(t) * y + b(t));
      row.sup_deviation = std::max(row.sup_deviation, std::fabs(tail - row.limit));
    }
    if (row.sup_deviation > tol) report.pass = false;
    report.rows.push_back(row);
  }
  return report;
}

// Continuous strictly monotone center b* asymptotically equivalent to the
// canonical b: (b*(t) - b(t))/a(t) -> 0.  Built by interpolating b on a
// doubling t-grid, in the coordinates suggested by the regime:
//   gamma = 0:  value linear in log t            (b is Pi-varying)
//   gamma > 0:  log value linear in log t        (b is RV_gamma)
//   gamma < 0:  log(b(inf) - value) linear in log t
// Each segment inverts in closed form, so the functional inverse is exact.
class SmoothCenter {
 public:
  enum class Mode { log_linear, power, upper_power };

  double gamma() const { return gamma_; }

  double value(double t) const {
    if (!(t > 0.0)) throw domain_error("SmoothCenter: t must be > 0");
    const double lt = std::log(t);
    const std::size_t j = segment_by_logt(lt);
    const double raw = node_val_[j] + slope_[j] * (lt - log_t_[j]);
    switch (mode_) {
      case Mode::log_linear: return raw;
      case Mode::power: return std::exp(raw);
      case Mode::upper_power: return upper_ - std::exp(raw);
    }
    return raw;
  }

  // Exact inverse on the range of value().
  double inverse(double v) const {
    double target;
    switch (mode_) {
      case Mode::log_linear:
        target = v;
        break;
      case Mode::power:
        if (!(v > 0.0)) throw domain_error("SmoothCenter::inverse: value out of range");
        target = std::log(v);
        break;
      case Mode::upper_power:
        if (!(v < upper_)) throw domain_error("SmoothCenter::inverse: value out of range");
        target = std::log(upper_ - v);
        break;
      default:
        target = v;
    }
    // node_val_ is strictly increasing in log_linear/power modes and strictly
    // decreasing in upper_power mode (it stores log(upper - b), which falls).
    std::size_t j = segment_by_value(target);
    const double lt = log_t_[j] + (target - node_val_[j]) / slope_[j];
    return std::exp(lt);
  }

  bool in_range(double v) const {
    switch (mode_) {
      case Mode::log_linear: return std::isfinite(v);
      case Mode::power: return v > 0.0;
      case Mode::upper_power: return v < upper_;
    }
    return false;
  }

  RealFn fn() const {
    auto self = *this;
    return [self](double t) { return self.value(t); };
  }
  RealFn inverse_fn() const {
    auto self = *this;
    return [self](double v) { return self.inverse(v); };
  }

  static SmoothCenter build(const DistSpec& f, double gamma);

 private:
  std::size_t segment_by_logt(double lt) const {
    if (lt <= log_t_.front()) return 0;
    if (lt >= log_t_.back()) return log_t_.size() - 2;
    auto it = std::upper_bound(log_t_.begin(), log_t_.end(), lt);
    return static_cast<std::size_t>(it - log_t_.begin()) - 1;
  }

  std::size_t segment_by_value(double v) const {
    const bool rising = mode_ != Mode::upper_power;
    const std::size_t n = node_val_.size();
    if (rising) {
      if (v <= node_val_.front()) return 0;
      if (v >= node_val_.back()) return n - 2;
      auto it = std::upper_bound(node_val_.begin(), node_val_.end(), v);
      return static_cast<std::size_t>(it - node_val_.begin()) - 1;
    }
    if (v >= node_val_.front()) return 0;
    if (v <= node_val_.back()) return n - 2;
    auto it = std::upper_bound(node_val_.begin(), node_val_.end(), v,
                               [](double a, double b) { return a > b; });
    return static_cast<std::size_t>(it - node_val_.begin()) - 1;
  }

  Mode mode_ = Mode::log_linear;
  double gamma_ = 0.0;
  double upper_ = kInf;
  std::vector<double> log_t_;
  std::vector<double> node_val_;  // b, log b, or log(upper - b) at the nodes
  std::vector<double> slope_;     // per segment; last entry duplicates for extrapolation
};

inline SmoothCenter SmoothCenter::build(const DistSpec& f, double gamma) {
  SmoothCenter sc;
  sc.gamma_ = gamma;
  sc.mode_ = gamma > 0.0 ? Mode::power : (gamma < 0.0 ? Mode::upper_power : Mode::log_linear);
  if (gamma < 0.0) {
    sc.upper_ = f.support_upper();
    if (!std::isfinite(sc.upper_))
      throw model_error("smooth_b_star: gamma < 0 needs a finite upper endpoint");
  }

  const bool falling = sc.mode_ == Mode::upper_power;
  for (int j = 1; j <= 60; ++j) {
    const double t = std::ldexp(1.0, j);  // 2^j
    const double b = f.quantile_tail(1.0 / t);
    double v;
    switch (sc.mode_) {
      case Mode::log_linear:
        v = b;
        break;
      case Mode::power:
        if (!(b > 0.0)) continue;  // power coordinates start once b is positive
        v = std::log(b);
        break;
      case Mode::upper_power: {
        const double d = sc.upper_ - b;
        if (!(d > 0.0)) continue;
        v = std::log(d);
        break;
      }
      default:
        v = b;
    }
    if (!std::isfinite(v)) continue;
    const bool keeps_strict =
        sc.node_val_.empty() ||
        (falling ? v < sc.node_val_.back() : v > sc.node_val_.back());
    if (!keeps_strict) continue;
    sc.log_t_.push_back(std::log(t));
    sc.node_val_.push_back(v);
  }
  if (sc.node_val_.size() < 2)
    throw model_error("smooth_b_star: quantile function too flat to interpolate");
  sc.slope_.resize(sc.node_val_.size() - 1);
  for (std::size_t i = 0; i + 1 < sc.node_val_.size(); ++i)
    sc.slope_[i] = (sc.node_val_[i + 1] - sc.node_val_[i]) / (sc.log_t_[i + 1] - sc.log_t_[i]);
  return sc;
}

// Canonical scale derived from the center tabulation:
// a(t) = (b(te) - b(t)) * gamma / (e^gamma - 1), which is (b(te) - b(t)) at 0.
inline double canonical_scale_from_center(const RealFn& b, double t, double gamma) {
  const double diff = b(t * std::exp(1.0)) - b(t);
  if (std::fabs(gamma) < kRhoZeroEps) return diff;
  return diff * gamma / std::expm1(gamma);
}

// b* with exact inverse, per the regime of gamma; validates that F is in the
// claimed domain first.
inline SmoothCenter smooth_b_star(const DistSpec& f, double gamma) {
  RealFn b = [&f](double t) { return b_from_quantile(f, t); };
  RealFn a = [b, gamma](double t) { return canonical_scale_from_center(b, t, gamma); };
  std::vector<double> t_grid{1e3, 1e4, 1e5, 1e6};
  std::vector<double> y_grid;
  const auto iv = gamma_interval(gamma);
  for (double frac : {0.25, 0.5, 1.0, 2.0}) {
    double y = frac;
    if (std::isfinite(iv.upper)) y = frac / 2.0 * iv.upper * 0.9;
    y_grid.push_back(y);
  }
  auto report = check_domain_of_attraction(f, gamma, a, b, t_grid, y_grid, 0.05);
  if (!report.pass)
    throw model_error("smooth_b_star: distribution fails the domain check for gamma=" +
                      std::to_string(gamma));
  return SmoothCenter::build(f, gamma);
}

struct StandardizeResult {
  std::vector<double> values;
  std::size_t dropped = 0;
};

// Y* = b*^{<-}(Y).  Out-of-range points are dropped with a count rather than
// raising; real samples contain values below the fitting range.
inline StandardizeResult standardize_y(const std::vector<double>& sample,
                                       const SmoothCenter& b_star) {
  StandardizeResult out;
  out.values.reserve(sample.size());
  for (double y : sample) {
    if (!std::isfinite(y) || !b_star.in_range(y)) {
      ++out.dropped;
      continue;
    }
    out.values.push_back(b_star.inverse(y));
  }
  return out;
}

inline GammaDomain gamma_domain(const DistSpec& f, double gamma) {
  GammaDomain d;
  d.gamma = gamma;
  d.interval = gamma_interval(gamma);
  RealFn b = [f](double t) { return b_from_quantile(f, t); };
  d.center = b;
  d.scale = [b, gamma](double t) { return canonical_scale_from_center(b, t, gamma); };
  return d;
}

}  // namespace cevm
