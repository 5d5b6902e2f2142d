#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace hilbop {

struct Atom {
  double t = 0.0;
  double w = 0.0;
};

/// Weight c (1-t)^kappa log^delta(e/(1-t)) p(t) with an optional bounded profile p.
struct Density {
  double c = 1.0;
  double kappa = 0.0;
  double delta = 0.0;
  std::function<double(double)> profile;

  bool pure_power() const { return delta == 0.0 && !profile; }
};

enum class LogBase { e, two };

/// automatic: closed forms where available; quadrature: always integrate numerically.
enum class Route { automatic, quadrature };

struct QuadratureOptions {
  double panel_width = 0.25;  // in u = -log(1-t), grows like u/4 further out, capped at 8x
  int order = 15;
  double rel_tol = 1e-10;     // required agreement between width h and h/2
  double tail_tol = 1e-14;    // stop once a 2-unit block adds less than this fraction
  double u_cap = 1.0e5;
  int max_halvings = 3;
};

class Measure {
 public:
  Measure() = default;
  Measure(std::vector<Atom> atoms, std::optional<Density> density,
          std::optional<double> total_mass_hint = std::nullopt);

  static Measure lebesgue() { return Measure({}, Density{}); }
  /// c (1-t)^kappa log^delta(e/(1-t)) dt
  static Measure power(double kappa, double c = 1.0, double delta = 0.0) {
    return Measure({}, Density{c, kappa, delta, {}});
  }
  static Measure point(double t, double w = 1.0) { return Measure({Atom{t, w}}, std::nullopt); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<Density>& density() const { return density_; }
  std::optional<double> total_mass_hint() const { return hint_; }

  bool is_finite() const {
    if (!density_) return true;
    return density_->kappa > -1.0 || (density_->kappa == -1.0 && density_->delta < -1.0);
  }

  /// Density is c (1-t)^kappa dt with a finite Beta-type moment formula.
  bool closed_form_density() const {
    return density_ && density_->pure_power() && density_->kappa > -1.0;
  }

  /// Density expressed in u = -log(1-t), Jacobian included: d mu = density_u(u) du.
  double density_u(double u) const {
    const Density& d = *density_;
    double lv = std::log(d.c) - (d.kappa + 1.0) * u;
    if (d.delta != 0.0) lv += d.delta * std::log1p(u);
    double v = std::exp(lv);
    if (d.profile) v *= d.profile(-std::expm1(-u));
    return v;
  }

  Measure scaled(double factor) const {
    if (!(factor > 0.0)) throw parameter_error("measure_core", "scale factor must be positive");
    Measure m = *this;
    for (auto& a : m.atoms_) a.w *= factor;
    if (m.density_) m.density_->c *= factor;
    if (m.hint_) *m.hint_ *= factor;
    return m;
  }

  /// (1-t)^{-e} d mu for any real e.
  Measure reweighted(double e) const {
    Measure m;
    m.atoms_ = atoms_;
    for (auto& a : m.atoms_) a.w *= std::pow(1.0 - a.t, -e);
    m.density_ = density_;
    if (m.density_) m.density_->kappa -= e;
    return m;
  }

 private:
  std::vector<Atom> atoms_;
  std::optional<Density> density_;
  std::optional<double> hint_;
};

namespace detail {

inline double log_factor(double one_minus_t, LogBase base) {
  // log(e/(1-t)) = 1 + u, log(2/(1-t)) = log 2 + u
  const double u = -std::log(one_minus_t);
  return (base == LogBase::e ? 1.0 : std::numbers::ln2) + u;
}

inline double panel_width_at(double u, double h) { return h * std::clamp(u / 4.0, 1.0, 8.0); }

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

// Integral of g against the density over u in [u0, infinity) at fixed panel width.
template <class G>
auto density_pass(const Measure& mu, G& g, double u0, double h, const QuadratureOptions& opt) {
  using R = std::decay_t<decltype(g(0.5, 0.5))>;
  const GaussRule& rule = gauss_rule(opt.order);
  R total{};
  R block{};
  double prev_block = std::numeric_limits<double>::infinity();
  double u = u0;
  double block_start = u0;
  while (true) {
    const double w = panel_width_at(u, h);
    const double a = u, b = u + w;
    const double half = 0.5 * w, mid = 0.5 * (a + b);
    R panel{};
    for (int i = 0; i < rule.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const double omt = std::exp(-x);
      const double dens = mu.density_u(x);
      if (dens == 0.0) continue;
      panel += (rule.weights[i] * dens) * g(-std::expm1(-x), omt);
    }
    panel *= half;
    total += panel;
    block += panel;
    u = b;
    if (u - block_start >= 2.0) {
      const double bm = magnitude(block);
      const double tm = magnitude(total);
      if (!std::isfinite(tm))
        throw divergence_error("measure_core", "integrand is not finite");
      if (tm > 0.0 && bm <= opt.tail_tol * tm && bm <= prev_block) break;
      if (tm == 0.0 && u > 800.0) break;
      prev_block = bm;
      block = R{};
      block_start = u;
    }
    if (u > opt.u_cap)
      throw divergence_error("measure_core",
                             "quadrature tail did not decay before u = " + std::to_string(opt.u_cap));
  }
  return total;
}

template <class G>
auto density_integral(const Measure& mu, G& g, double u0, const QuadratureOptions& opt) {
  double h = opt.panel_width;
  auto coarse = density_pass(mu, g, u0, h, opt);
  for (int k = 0; k <= opt.max_halvings; ++k) {
    h *= 0.5;
    auto fine = density_pass(mu, g, u0, h, opt);
    const double diff = magnitude(fine - coarse);
    if (diff <= opt.rel_tol * magnitude(fine) || diff < 1e-300) return fine;
    coarse = fine;
  }
  throw convergence_error("measure_core", "node doubling did not settle to the requested tolerance");
}

}  // namespace detail

/// Integral of g(t, 1-t) over [0, 1) against mu. Both arguments are supplied so the
/// integrand can avoid cancellation near t = 1.
template <class G>
auto integrate(const Measure& mu, G&& g, const QuadratureOptions& opt = {}) {
  using R = std::decay_t<decltype(g(0.5, 0.5))>;
  R sum{};
  for (const auto& a : mu.atoms()) sum += a.w * g(a.t, 1.0 - a.t);
  if (mu.density()) sum += detail::density_integral(mu, g, 0.0, opt);
  return sum;
}

/// Integral of g over [t0, 1), with t0 = 1 - one_minus_t0.
template <class G>
auto integrate_tail(const Measure& mu, G&& g, double one_minus_t0, const QuadratureOptions& opt = {}) {
  using R = std::decay_t<decltype(g(0.5, 0.5))>;
  const double t0 = 1.0 - one_minus_t0;
  R sum{};
  for (const auto& a : mu.atoms())
    if (a.t >= t0) sum += a.w * g(a.t, 1.0 - a.t);
  if (mu.density()) sum += detail::density_integral(mu, g, -std::log(one_minus_t0), opt);
  return sum;
}

// ---------------------------------------------------------------------------------------------
// moments and tails

inline double moment(const Measure& mu, std::size_t n, Route route = Route::automatic) {
  if (!mu.is_finite()) throw divergence_error("measure_core", "moment of an infinite measure");
  const double nd = static_cast<double>(n);
  if (route == Route::automatic && (!mu.density() || mu.closed_form_density())) {
    double s = 0.0;
    for (const auto& a : mu.atoms()) s += a.w * (n == 0 ? 1.0 : std::pow(a.t, nd));
    if (mu.density()) {
      const Density& d = *mu.density();
      s += d.c * std::tgamma(d.kappa + 1.0) / gamma_delta_ratio(nd + 1.0, d.kappa + 1.0);
    }
    return s;
  }
  return integrate(mu, [nd](double, double omt) {
    return nd == 0.0 ? 1.0 : std::exp(nd * std::log1p(-omt));
  });
}

/// mu([t, 1)) with t = 1 - one_minus_t; +inf when the density is not integrable at 1.
inline double tail_at(const Measure& mu, double one_minus_t, Route route = Route::automatic) {
  if (!(one_minus_t > 0.0 && one_minus_t <= 1.0))
    throw parameter_error("measure_core", "tail needs t in [0, 1)");
  const double t = 1.0 - one_minus_t;
  double s = 0.0;
  for (const auto& a : mu.atoms())
    if (a.t >= t) s += a.w;
  if (!mu.density()) return s;
  if (!mu.is_finite()) return std::numeric_limits<double>::infinity();
  const Density& d = *mu.density();
  if (route == Route::automatic && mu.closed_form_density())
    return s + d.c * std::pow(one_minus_t, d.kappa + 1.0) / (d.kappa + 1.0);
  auto one = [](double, double) { return 1.0; };
  return s + detail::density_integral(mu, one, -std::log(one_minus_t), QuadratureOptions{});
}

inline double tail(const Measure& mu, double t, Route route = Route::automatic) {
  if (!(t >= 0.0 && t < 1.0)) throw parameter_error("measure_core", "tail needs t in [0, 1)");
  return tail_at(mu, 1.0 - t, route);
}

/// Integral of t^n log^c(base/(1-t)) d mu.
inline double weighted_log_moment(const Measure& mu, std::size_t n, double c,
                                  LogBase base = LogBase::e, Route route = Route::automatic) {
  if (c < 0.0) throw parameter_error("measure_core", "log power must be nonnegative");
  if (c == 0.0) return moment(mu, n, route);
  if (mu.density()) {
    const Density& d = *mu.density();
    const bool finite = d.kappa > -1.0 || (d.kappa == -1.0 && d.delta + c < -1.0);
    if (!finite) throw divergence_error("measure_core", "log-weighted moment diverges");
  }
  const double nd = static_cast<double>(n);
  return integrate(mu, [nd, c, base](double, double omt) {
    const double tn = nd == 0.0 ? 1.0 : std::exp(nd * std::log1p(-omt));
    return tn * std::pow(detail::log_factor(omt, base), c);
  });
}

// ---------------------------------------------------------------------------------------------
// finiteness decisions

struct IntegrabilityResult {
  Finiteness status = Finiteness::inconclusive;
  double value = 0.0;   // the integral when finite, +inf when infinite
  double growth = 1.0;  // last partial-sum ratio per depth doubling (detector runs)
  std::vector<std::pair<int, double>> partials;  // (depth J, partial integral up to t = 1-2^{-J})

  bool finite() const { return status == Finiteness::finite; }
  double value_or_growth() const { return finite() ? value : growth; }
};

struct DetectorOptions {
  int first_depth = 8;
  int max_depth = 1 << 15;
  double growth_factor = 1.5;
  int growth_runs = 4;
  double stable_tol = 1e-8;
  int stable_runs = 2;
  double panel_width = 0.25;
  int order = 10;
};

namespace detail {

// Partial integrals of g against the density on u in [0, J log 2], J = first_depth * 2^k,
// plus `offset` (atoms). Applies the doubling decision rule.
template <class G>
IntegrabilityResult depth_detector(const Measure& mu, G&& g, double offset, const DetectorOptions& o) {
  IntegrabilityResult res;
  const GaussRule& rule = gauss_rule(o.order);
  double acc = offset;
  double u = 0.0;
  int grow_run = 0, stable_run = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int J = o.first_depth; J <= o.max_depth; J *= 2) {
    const double U = J * std::numbers::ln2;
    while (u < U) {
      const double w = std::min(panel_width_at(u, o.panel_width), U - u);
      acc += gauss_panel(
          [&](double x) {
            const double dens = mu.density_u(x);
            return dens == 0.0 ? 0.0 : dens * g(-std::expm1(-x), std::exp(-x));
          },
          u, u + w, rule);
      u += w;
    }
    res.partials.emplace_back(J, acc);
    if (!std::isfinite(acc)) {
      res.status = Finiteness::infinite;
      res.value = std::numeric_limits<double>::infinity();
      res.growth = std::numeric_limits<double>::infinity();
      return res;
    }
    if (!std::isnan(prev)) {
      const double ratio = prev > 0.0 ? acc / prev : (acc > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
      res.growth = ratio;
      grow_run = ratio >= o.growth_factor ? grow_run + 1 : 0;
      stable_run = std::fabs(acc - prev) <= o.stable_tol * std::fabs(acc) ? stable_run + 1 : 0;
      if (grow_run >= o.growth_runs) {
        res.status = Finiteness::infinite;
        res.value = std::numeric_limits<double>::infinity();
        return res;
      }
      if (stable_run >= o.stable_runs) {
        res.status = Finiteness::finite;
        res.value = acc;
        return res;
      }
    }
    prev = acc;
  }
  res.status = Finiteness::inconclusive;
  res.value = acc;
  return res;
}

// Power-law decision for c (1-t)^{r-1} log^m(e/(1-t)) near t = 1.
inline bool power_log_finite(double r, double m) { return r > 0.0 || (r == 0.0 && m < -1.0); }

}  // namespace detail

/// Decides whether the integral of log^l(e/(1-t)) (1-t)^{-e} d mu is finite. Profile-free
/// densities are decided by exponent comparison; densities with a profile go through the
/// depth-doubling detector.
inline IntegrabilityResult integrability_check(const Measure& mu, double e, double l,
                                               const DetectorOptions& opt = {}) {
  double atoms = 0.0;
  for (const auto& a : mu.atoms())
    atoms += a.w * std::pow(detail::log_factor(1.0 - a.t, LogBase::e), l) * std::pow(1.0 - a.t, -e);
  if (!mu.density()) return {Finiteness::finite, atoms, 1.0, {}};

  const Measure tau = mu.reweighted(e);
  const Density& d = *tau.density();
  auto g = [l](double, double omt) { return std::pow(detail::log_factor(omt, LogBase::e), l); };

  if (!d.profile) {
    const double r = d.kappa + 1.0;
    const double m = d.delta + l;
    if (!detail::power_log_finite(r, m)) {
      IntegrabilityResult res = detail::depth_detector(tau, g, atoms, DetectorOptions{opt.first_depth, 256});
      res.status = Finiteness::infinite;
      res.value = std::numeric_limits<double>::infinity();
      return res;
    }
    if (r == 0.0) {
      // integral of c (1+u)^m du over [0, inf)
      return {Finiteness::finite, atoms + d.c / (-(m + 1.0)), 1.0, {}};
    }
    QuadratureOptions q;
    return {Finiteness::finite, atoms + detail::density_integral(tau, g, 0.0, q), 1.0, {}};
  }
  return detail::depth_detector(tau, g, atoms, opt);
}

/// Decides whether the integral of mu([t,1)) (1-t)^{-e} d mu(t) is finite.
inline IntegrabilityResult tail_integrability(const Measure& mu, double e,
                                              const DetectorOptions& opt = {}) {
  if (!mu.is_finite())
    return {Finiteness::infinite, std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), {}};
  double atoms = 0.0;
  for (const auto& a : mu.atoms()) atoms += a.w * tail_at(mu, 1.0 - a.t) * std::pow(1.0 - a.t, -e);
  if (!mu.density()) return {Finiteness::finite, atoms, 1.0, {}};

  const Measure tau = mu.reweighted(e);
  const Density& d = *mu.density();
  auto g = [&mu](double, double omt) { return tail_at(mu, omt); };
  if (!d.profile) {
    // tail ~ (1-t)^{kappa+1} log^delta, so the integrand behaves like (1-t)^{2 kappa + 1 - e} log^{2 delta}
    const double r = 2.0 * d.kappa + 2.0 - e;
    const double m = 2.0 * d.delta;
    if (!detail::power_log_finite(r, m)) {
      IntegrabilityResult res = detail::depth_detector(tau, g, atoms, DetectorOptions{opt.first_depth, 256});
      res.status = Finiteness::infinite;
      res.value = std::numeric_limits<double>::infinity();
      return res;
    }
    // integrate tail(x) / x^{kappa+1} against c x^{2 kappa + 1 - e} log^delta so neither factor over/underflows
    const double k1 = d.kappa + 1.0;
    const Measure inner = Measure::power(2.0 * d.kappa + 1.0 - e, d.c, d.delta);
    auto ratio = [&mu, &d, k1](double, double omt) {
      const double xk = std::pow(omt, k1);
      if (xk > 1e-280) return tail_at(mu, omt) / xk;
      return d.c * std::pow(detail::log_factor(omt, LogBase::e), d.delta) / k1;
    };
    QuadratureOptions q;
    if (r < 0.05) q.u_cap = 1.0e6;
    return {Finiteness::finite, atoms + detail::density_integral(inner, ratio, 0.0, q), 1.0, {}};
  }
  return detail::depth_detector(tau, g, atoms, opt);
}

// ---------------------------------------------------------------------------------------------
// Carleson classification

struct CarlesonQuery {
  double s = 1.0;
  double gamma = 0.0;
  bool vanishing = false;
};

struct CarlesonSample {
  int j = 0;
  double t = 0.0;
  double ratio = 0.0;
};

struct CarlesonReport {
  CarlesonQuery query;
  int depth = 0;      // J; samples run to J + 4
  std::vector<CarlesonSample> ratio_samples;
  double sup_estimate = 0.0;
  std::optional<double> limit_estimate;
  Verdict verdict = Verdict::inconclusive;
};

struct CarlesonOptions {
  double stability_tol = 0.02;   // sup may grow by at most this fraction from J to J + 4
  double vanishing_fraction = 0.05;
  Route route = Route::automatic;
};

/// Samples mu([t,1)) log^gamma(e/(1-t)) / (1-t)^s at t = 1 - 2^{-j}, j = 0..J+4.
inline CarlesonReport carleson_classify(const Measure& mu, const CarlesonQuery& q, int J = 24,
                                        const CarlesonOptions& opt = {}) {
  if (!(q.s > 0.0)) throw parameter_error("measure_core", "Carleson exponent must be positive");
  if (!(q.gamma >= 0.0)) throw parameter_error("measure_core", "log power must be nonnegative");
  if (J < 8 || J + 4 > 52) throw parameter_error("measure_core", "Carleson depth must lie in [8, 48]");

  CarlesonReport rep;
  rep.query = q;
  rep.depth = J;
  for (int j = 0; j <= J + 4; ++j) {
    const double x = std::ldexp(1.0, -j);
    const double tl = tail_at(mu, x, opt.route);
    double ratio = tl;
    if (std::isfinite(tl) && tl > 0.0) {
      ratio = tl * std::pow(1.0 + j * std::numbers::ln2, q.gamma) * std::exp2(j * q.s);
    }
    rep.ratio_samples.push_back({j, 1.0 - x, ratio});
  }
  auto max_to = [&](int last) {
    double m = 0.0;
    for (int j = 0; j <= last; ++j) m = std::max(m, rep.ratio_samples[j].ratio);
    return m;
  };
  const double sup_J = max_to(J);
  const double sup_ext = max_to(J + 4);
  rep.sup_estimate = sup_ext;
  rep.limit_estimate = rep.ratio_samples.back().ratio;

  auto r = [&](int j) { return rep.ratio_samples[j].ratio; };
  bool ext_increasing = true, ext_decreasing = true;
  for (int j = J + 1; j <= J + 4; ++j) {
    if (!(r(j) > r(j - 1) * (1.0 + 1e-12))) ext_increasing = false;
    if (!(r(j) < r(j - 1) * (1.0 - 1e-12))) ext_decreasing = false;
  }

  if (!std::isfinite(sup_ext)) {
    rep.verdict = Verdict::fails;
  } else if (sup_ext <= sup_J * (1.0 + opt.stability_tol)) {
    rep.verdict = Verdict::holds;
  } else if (ext_increasing) {
    rep.verdict = Verdict::fails;
  } else {
    rep.verdict = Verdict::inconclusive;
  }

  if (q.vanishing && rep.verdict == Verdict::holds) {
    const bool all_zero = r(J + 4) == 0.0 && r(J + 3) == 0.0;
    if (all_zero || (ext_decreasing && r(J + 4) < opt.vanishing_fraction * sup_ext))
      rep.verdict = Verdict::holds;
    else if (ext_decreasing)
      rep.verdict = Verdict::inconclusive;
    else
      rep.verdict = Verdict::fails;
  }
  return rep;
}

/// d tau = (1-t)^{-gamma} d mu.
inline Measure divide_weight(const Measure& mu, double gamma) {
  if (!(gamma > 0.0)) throw parameter_error("measure_core", "divide_weight needs gamma > 0");
  return mu.reweighted(gamma);
}

inline double total_mass(const Measure& mu) { return moment(mu, 0); }

inline Measure::Measure(std::vector<Atom> atoms, std::optional<Density> density,
                        std::optional<double> total_mass_hint)
    : atoms_(std::move(atoms)), density_(std::move(density)), hint_(total_mass_hint) {
  for (const auto& a : atoms_) {
    if (!(a.t >= 0.0 && a.t < 1.0)) throw parameter_error("measure_core", "atom location outside [0, 1)");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw parameter_error("measure_core", "atom weight must be positive");
  }
  if (density_) {
    const Density& d = *density_;
    if (!(d.c > 0.0) || !std::isfinite(d.c)) throw parameter_error("measure_core", "density constant must be positive");
    if (!std::isfinite(d.kappa) || !std::isfinite(d.delta))
      throw parameter_error("measure_core", "density exponents must be finite");
  }
  if (hint_) {
    if (!(*hint_ >= 0.0)) throw parameter_error("measure_core", "total mass hint must be nonnegative");
    if (is_finite()) {
      const double m = total_mass(*this);
      if (std::fabs(m - *hint_) > 1e-8 * std::max(1.0, m))
        throw parameter_error("measure_core", "total mass hint does not match the measure");
    }
  }
}

}  // namespace hilbop
