#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cevm/errors.hpp"
#include "cevm/rng.hpp"

namespace cevm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

// A univariate distribution: CDF, quantile, sampler, atoms, endpoints and
// (when available in closed form) mean and partial mean E[xi 1{xi<=x}].
// Plays the roles of F_Y, G and F_X.  Immutable after construction and safe
// to share across threads; sampling takes the rng state explicitly.
class DistSpec {
 public:
  using Fn = std::function<double(double)>;

  DistSpec() = default;

  // ---- factories ---------------------------------------------------------

  static DistSpec pareto(double alpha) {
    if (!(alpha > 0.0)) throw domain_error("pareto: alpha must be > 0");
    DistSpec d;
    d.family_ = "pareto";
    d.params_ = {alpha};
    d.lower_ = 1.0;
    d.upper_ = kInf;
    d.cdf_ = [alpha](double x) { return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -alpha); };
    d.survival_ = [alpha](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -alpha); };
    d.quantile_tail_ = [alpha](double q) { return std::pow(q, -1.0 / alpha); };
    d.mean_ = alpha > 1.0 ? alpha / (alpha - 1.0) : kInf;
    if (alpha > 1.0) {
      d.partial_mean_ = [alpha](double z) {
        if (z <= 1.0) return 0.0;
        return alpha * (1.0 - std::pow(z, 1.0 - alpha)) / (alpha - 1.0);
      };
    } else if (alpha == 1.0) {
      d.partial_mean_ = [](double z) { return z <= 1.0 ? 0.0 : std::log(z); };
    } else {
      d.partial_mean_ = [alpha](double z) {
        if (z <= 1.0) return 0.0;
        return alpha * (std::pow(z, 1.0 - alpha) - 1.0) / (1.0 - alpha);
      };
    }
    d.knots_ = {1.0};
    return d;
  }

  static DistSpec exponential(double rate) {
    if (!(rate > 0.0)) throw domain_error("exponential: rate must be > 0");
    DistSpec d;
    d.family_ = "exp";
    d.params_ = {rate};
    d.lower_ = 0.0;
    d.upper_ = kInf;
    d.cdf_ = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
    d.survival_ = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
    d.quantile_tail_ = [rate](double q) { return -std::log(q) / rate; };
    d.mean_ = 1.0 / rate;
    d.partial_mean_ = [rate](double z) {
      if (z <= 0.0) return 0.0;
      if (z == kInf) return 1.0 / rate;
      return -std::expm1(-rate * z) / rate - z * std::exp(-rate * z);
    };
    d.knots_ = {0.0};
    return d;
  }

  static DistSpec uniform(double lo, double hi) {
    if (!(hi > lo)) throw domain_error("uniform: need hi > lo");
    DistSpec d;
    d.family_ = "uniform";
    d.params_ = {lo, hi};
    d.lower_ = lo;
    d.upper_ = hi;
    const double w = hi - lo;
    d.cdf_ = [lo, hi, w](double x) {
      if (x <= lo) return 0.0;
      if (x >= hi) return 1.0;
      return (x - lo) / w;
    };
    d.quantile_tail_ = [lo, hi, w](double q) { return hi - q * w; };
    d.mean_ = 0.5 * (lo + hi);
    d.partial_mean_ = [lo, hi, w](double z) {
      const double zc = std::min(std::max(z, lo), hi);
      return (zc * zc - lo * lo) / (2.0 * w);
    };
    d.knots_ = {lo, hi};
    return d;
  }

  static DistSpec point_mass(double c) {
    DistSpec d;
    d.family_ = "point_mass";
    d.params_ = {c};
    d.lower_ = d.upper_ = c;
    d.atoms_ = {{c, 1.0}};
    d.discrete_ = true;
    d.cdf_ = [c](double x) { return x >= c ? 1.0 : 0.0; };
    d.quantile_tail_ = [c](double) { return c; };
    d.sampler_ = [c](RngStream&) { return c; };
    d.mean_ = c;
    d.partial_mean_ = [c](double z) { return z >= c ? c : 0.0; };
    d.knots_ = {c};
    return d;
  }

  static DistSpec discrete(std::vector<Atom> atoms) {
    if (atoms.empty()) throw domain_error("discrete: no atoms");
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    double total = 0.0;
    for (const auto& a : atoms) {
      if (!(a.mass >= 0.0)) throw domain_error("discrete: negative mass");
      total += a.mass;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw domain_error("discrete: masses must sum to 1, got " + std::to_string(total));
    DistSpec d;
    d.family_ = "discrete";
    d.atoms_ = std::move(atoms);
    d.discrete_ = true;
    d.lower_ = d.atoms_.front().location;
    d.upper_ = d.atoms_.back().location;
    d.finish_discrete();
    return d;
  }

  static DistSpec empirical(std::vector<double> sample) {
    if (sample.empty()) throw domain_error("empirical: empty sample");
    std::sort(sample.begin(), sample.end());
    std::vector<Atom> atoms;
    const double w = 1.0 / static_cast<double>(sample.size());
    for (double v : sample) {
      if (!atoms.empty() && atoms.back().location == v)
        atoms.back().mass += w;
      else
        atoms.push_back({v, w});
    }
    DistSpec d = discrete(std::move(atoms));
    d.family_ = "empirical";
    return d;
  }

  // Piecewise-linear CDF through strictly increasing (x, p) pairs.  The last
  // p may be below 1; the shortfall is read as mass at +infinity (used to
  // represent defective kernel limits in diagnostics).
  static DistSpec tabulated_cdf(std::vector<std::pair<double, double>> pts) {
    if (pts.size() < 2) throw domain_error("tabulated_cdf: need at least 2 points");
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (!(pts[i + 1].first > pts[i].first) || pts[i + 1].second < pts[i].second)
        throw domain_error("tabulated_cdf: (x, p) must be increasing");
    }
    if (!(pts.front().second >= 0.0) || pts.back().second > 1.0 + 1e-12)
      throw domain_error("tabulated_cdf: p must lie in [0, 1]");
    DistSpec d;
    d.family_ = "tabulated_cdf";
    auto tab = std::make_shared<std::vector<std::pair<double, double>>>(std::move(pts));
    d.tabulation_ = tab;
    d.lower_ = tab->front().second > 0.0 ? -kInf : tab->front().first;
    d.upper_ = tab->back().first;
    d.total_mass_ = std::min(1.0, tab->back().second);
    if (tab->front().second > 0.0)
      d.atoms_.push_back({tab->front().first, tab->front().second});
    d.cdf_ = [tab](double x) {
      if (x < tab->front().first) return 0.0;
      if (x >= tab->back().first) return tab->back().second;
      auto it = std::upper_bound(tab->begin(), tab->end(), x,
                                 [](double v, const auto& p) { return v < p.first; });
      const auto& [x1, p1] = *it;
      const auto& [x0, p0] = *(it - 1);
      return p0 + (p1 - p0) * (x - x0) / (x1 - x0);
    };
    d.quantile_ = [tab](double p) {
      if (p <= tab->front().second) return tab->front().first;
      auto it = std::lower_bound(tab->begin(), tab->end(), p,
                                 [](const auto& q, double v) { return q.second < v; });
      if (it == tab->end()) return tab->back().first;
      if (it == tab->begin()) return tab->front().first;
      const auto& [x1, p1] = *it;
      const auto& [x0, p0] = *(it - 1);
      if (p1 == p0) return x0;
      return x0 + (x1 - x0) * (p - p0) / (p1 - p0);
    };
    for (const auto& [x, p] : *tab) d.knots_.push_back(x);
    // mean by the trapezoid identity on segments (density constant per cell)
    double m = tab->front().first * tab->front().second;
    for (std::size_t i = 0; i + 1 < tab->size(); ++i)
      m += ((*tab)[i + 1].second - (*tab)[i].second) *
           0.5 * ((*tab)[i].first + (*tab)[i + 1].first);
    if (d.total_mass_ >= 1.0 - 1e-12) d.mean_ = m;
    return d;
  }

  // Arbitrary CDF; quantile falls back to bisection, sampler to inversion.
  static DistSpec from_cdf(Fn cdf, double lower, double upper,
                           std::vector<double> knots, std::string label) {
    DistSpec d;
    d.family_ = std::move(label);
    d.cdf_ = std::move(cdf);
    d.lower_ = lower;
    d.upper_ = upper;
    d.knots_ = std::move(knots);
    return d;
  }

  // ---- evaluation --------------------------------------------------------

  double cdf(double x) const {
    if (x == kInf) return total_mass_;
    if (x == -kInf) return 0.0;
    return cdf_(x);
  }

  double survival(double x) const {
    if (survival_) {
      if (x == kInf) return 1.0 - total_mass_;
      if (x == -kInf) return 1.0;
      return survival_(x);
    }
    return 1.0 - cdf(x);
  }

  // Left-continuous inverse: quantile(p) = inf{x : F(x) >= p}, p in (0, 1].
  double quantile(double p) const {
    if (!(p > 0.0) || p > total_mass_ + 1e-12)
      throw domain_error("quantile: p outside (0, total mass]");
    p = std::min(p, total_mass_);
    if (quantile_) return quantile_(p);
    if (quantile_tail_) return quantile_tail_(1.0 - p);
    return quantile_by_bisection(p);
  }

  // F^{-1}(1 - q) evaluated without forming 1-q; exact deep in the tail.
  double quantile_tail(double q) const {
    if (!(q >= 0.0) || q > 1.0) throw domain_error("quantile_tail: q outside [0,1]");
    if (quantile_tail_) return quantile_tail_(q);
    return quantile(1.0 - q);
  }

  double sample(RngStream& rng) const {
    if (sampler_) return sampler_(rng);
    double p = rng.uniform_pos() * total_mass_;
    return quantile(p);
  }

  double mass_at(double x) const {
    for (const auto& a : atoms_)
      if (a.location == x) return a.mass;
    return 0.0;
  }

  // ---- metadata ----------------------------------------------------------

  const std::vector<Atom>& atoms() const { return atoms_; }
  double support_lower() const { return lower_; }
  double support_upper() const { return upper_; }
  bool purely_discrete() const { return discrete_; }
  double total_mass() const { return total_mass_; }
  double defect() const { return 1.0 - total_mass_; }

  bool has_mean() const { return mean_.has_value(); }
  double mean() const {
    if (!mean_) throw domain_error("mean: not available for family " + family_);
    return *mean_;
  }

  bool has_partial_mean() const { return static_cast<bool>(partial_mean_) || discrete_; }

  // E[xi 1{xi <= x}]
  double partial_mean(double x) const {
    if (partial_mean_) return partial_mean_(x);
    if (discrete_) {
      double s = 0.0;
      for (const auto& a : atoms_) {
        if (a.location > x) break;
        s += a.location * a.mass;
      }
      return s;
    }
    throw domain_error("partial_mean: not available for family " + family_);
  }

  // Abscissae where the CDF has a jump or a kink; quadrature split points.
  const std::vector<double>& knots() const { return knots_; }

  const std::string& family() const { return family_; }
  const std::vector<double>& family_params() const { return params_; }
  bool has_tabulation() const { return static_cast<bool>(tabulation_); }
  const std::vector<std::pair<double, double>>& tabulation() const { return *tabulation_; }

  DistSpec with_sampler(Fn ignored) = delete;
  DistSpec& set_sampler(std::function<double(RngStream&)> s) {
    sampler_ = std::move(s);
    return *this;
  }

 private:
  void finish_discrete() {
    auto atoms = std::make_shared<std::vector<Atom>>(atoms_);
    auto cum = std::make_shared<std::vector<double>>();
    double running = 0.0;
    for (const auto& a : *atoms) {
      running += a.mass;
      cum->push_back(running);
    }
    cdf_ = [atoms, cum](double x) {
      std::size_t lo = 0, hi = atoms->size();
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if ((*atoms)[mid].location <= x)
          lo = mid + 1;
        else
          hi = mid;
      }
      return lo == 0 ? 0.0 : (*cum)[lo - 1];
    };
    quantile_ = [atoms, cum](double p) {
      auto it = std::lower_bound(cum->begin(), cum->end(), p - 1e-15);
      std::size_t i = std::min<std::size_t>(it - cum->begin(), atoms->size() - 1);
      return (*atoms)[i].location;
    };
    double m = 0.0;
    for (const auto& a : *atoms) m += a.location * a.mass;
    mean_ = m;
    for (const auto& a : *atoms) knots_.push_back(a.location);
  }

  double quantile_by_bisection(double p) const {
    double lo = lower_, hi = upper_;
    if (lo == -kInf) {
      lo = -1.0;
      while (cdf(lo) >= p) lo *= 2.0;
    }
    if (hi == kInf) {
      hi = 1.0;
      while (cdf(hi) < p) hi *= 2.0;
    }
    // invariant: cdf(hi) >= p, cdf(lo) < p (or lo is the lower endpoint)
    while (hi - lo > 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)})) {
      double mid = 0.5 * (lo + hi);
      if (cdf(mid) >= p)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

  std::string family_ = "unspecified";
  std::vector<double> params_;
  Fn cdf_;
  Fn survival_;
  Fn quantile_;        // direct inverse when available
  Fn quantile_tail_;   // q -> F^{-1}(1-q)
  std::function<double(RngStream&)> sampler_;
  Fn partial_mean_;
  std::vector<Atom> atoms_;
  std::vector<double> knots_;
  std::optional<double> mean_;
  std::shared_ptr<std::vector<std::pair<double, double>>> tabulation_;
  double lower_ = -kInf;
  double upper_ = kInf;
  double total_mass_ = 1.0;
  bool discrete_ = false;
};

}  // namespace cevm
