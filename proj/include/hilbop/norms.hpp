#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "quadrature.hpp"
#include "series.hpp"

namespace hilbop {

struct NormEstimate {
  double value = 0.0;
  std::string method;
  int radial_nodes = 0;
  int angular_nodes = 0;
  double refinement_delta = 0.0;  // relative change under the last refinement
  bool certified = false;
};

enum class BandVerdict { band_ok, drift, fail };

inline const char* to_string(BandVerdict v) {
  switch (v) {
    case BandVerdict::band_ok: return "band_ok";
    case BandVerdict::drift: return "drift";
    default: return "fail";
  }
}

struct EquivalenceReport {
  std::string claim_id;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  std::vector<std::pair<double, double>> sweep;  // (parameter, ratio)
  double drift = 0.0;                            // worst relative ratio change under refinement
  double band_limit = 10.0;
  BandVerdict verdict = BandVerdict::fail;

  double band() const { return ratio_max / ratio_min; }
};

inline EquivalenceReport make_equivalence_report(std::string claim, std::vector<std::pair<double, double>> sweep,
                                                 double drift, double band_limit = 10.0,
                                                 double drift_limit = 0.1) {
  EquivalenceReport r;
  r.claim_id = std::move(claim);
  r.sweep = std::move(sweep);
  r.drift = drift;
  r.band_limit = band_limit;
  r.ratio_min = std::numeric_limits<double>::infinity();
  r.ratio_max = 0.0;
  bool bad = r.sweep.empty();
  for (const auto& [param, ratio] : r.sweep) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) bad = true;
    r.ratio_min = std::min(r.ratio_min, ratio);
    r.ratio_max = std::max(r.ratio_max, ratio);
  }
  if (bad || r.ratio_max > band_limit * r.ratio_min)
    r.verdict = BandVerdict::fail;
  else if (!(std::fabs(drift) <= drift_limit))
    r.verdict = BandVerdict::drift;
  else
    r.verdict = BandVerdict::band_ok;
  return r;
}

/// CSV with header "parameter,ratio".
inline void write_csv(std::ostream& os, const EquivalenceReport& r) {
  os << "parameter,ratio\n";
  os.precision(17);
  for (const auto& [p, v] : r.sweep) os << p << ',' << v << '\n';
}

// ---------------------------------------------------------------------------------------------
// circle norms of polynomials

namespace detail {

// a_k r^k truncated at the effective degree (terms below 1e-18 of the largest are dropped).
inline std::vector<cplx> scaled_coeffs(const std::vector<cplx>& c, double r) {
  std::vector<cplx> b(c.size());
  double rk = 1.0, big = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    b[k] = c[k] * rk;
    big = std::max(big, std::abs(b[k]));
    rk *= r;
  }
  std::size_t d = b.size();
  while (d > 1 && std::abs(b[d - 1]) <= 1e-18 * big) --d;
  b.resize(d);
  return b;
}

inline double mean_pow(const std::vector<cplx>& vals, double p) {
  double s = 0.0;
  if (p == 2.0)
    for (const auto& v : vals) s += std::norm(v);
  else
    for (const auto& v : vals) s += std::pow(std::abs(v), p);
  return s / static_cast<double>(vals.size());
}

inline std::size_t circle_samples_for(std::size_t degree, int oversample) {
  return std::max<std::size_t>(16, next_pow2(static_cast<std::size_t>(oversample) * (degree + 1)));
}

// Mean of |sum c_k r^k e^{ik theta}|^p over the circle by the trapezoid rule.
inline double circle_mean_pow(const std::vector<cplx>& c, double r, double p, int oversample) {
  const auto b = scaled_coeffs(c, r);
  const std::size_t M = circle_samples_for(b.size() - 1, oversample);
  return mean_pow(circle_values(b, M), p);
}

// (argmax, max) of a unimodal f on [a, b] by golden section.
inline std::pair<double, double> golden_argmax(const std::function<double(double)>& f, double a, double b,
                                               double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (std::fabs(b - a) > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return f1 < f2 ? std::pair{x2, f2} : std::pair{x1, f1};
}

inline double golden_max(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  return golden_argmax(f, a, b, tol).second;
}

}  // namespace detail

/// H^p norm on the unit circle by oversampled trapezoid, certified by doubling.
inline NormEstimate hp_norm(const PowerSeries& f, double p, int oversample = 8) {
  if (!(p > 0.0)) throw parameter_error("norms", "H^p norm needs p > 0");
  const std::size_t deg = f.degree();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().begin() + static_cast<std::ptrdiff_t>(deg + 1));
  const std::size_t M = detail::circle_samples_for(deg, oversample);
  const double v1 = std::pow(detail::mean_pow(circle_values(c, M), p), 1.0 / p);
  const double v2 = std::pow(detail::mean_pow(circle_values(c, 2 * M), p), 1.0 / p);
  NormEstimate e;
  e.value = v2;
  e.method = "hp/trapezoid";
  e.angular_nodes = static_cast<int>(2 * M);
  e.refinement_delta = v2 > 0.0 ? std::fabs(v2 - v1) / v2 : 0.0;
  e.certified = e.refinement_delta < 1e-8;
  return e;
}

/// Sup norm on the circle: 16x oversampled samples, then a local golden-section pass.
inline NormEstimate hinf_norm(const PowerSeries& f) {
  NormEstimate e;
  e.method = "hinf";
  if (f.nonnegative()) {
    double s = 0.0;
    for (const auto& c : f.coeffs()) s += c.real();
    e.value = s;
    e.method = "hinf/nonnegative";
    e.certified = true;
    return e;
  }
  const std::size_t deg = f.degree();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().begin() + static_cast<std::ptrdiff_t>(deg + 1));
  const std::size_t M = detail::circle_samples_for(deg, 16);
  const auto vals = circle_values(c, M);
  std::size_t best = 0;
  for (std::size_t j = 1; j < M; ++j)
    if (std::abs(vals[j]) > std::abs(vals[best])) best = j;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(M);
  const double th = h * static_cast<double>(best);
  auto modulus = [&](double theta) { return std::abs(horner(c, std::polar(1.0, theta))); };
  const double refined = std::max(std::abs(vals[best]), detail::golden_max(modulus, th - h, th + h));
  e.value = refined;
  e.angular_nodes = static_cast<int>(M);
  e.refinement_delta = refined > 0.0 ? (refined - std::abs(vals[best])) / refined : 0.0;
  e.certified = true;
  return e;
}

// ---------------------------------------------------------------------------------------------
// area integrals

struct AreaBudget {
  int radial_order = 15;
  int angular_order = 15;
  int extra_depth = 10;  // radial depth beyond log2 of the degree / peak scale
  int oversample = 8;    // circle samples per degree (series flavour)
  bool refine = true;    // rerun with doubled depth and nodes, report the change
  double certify_tol = 1e-6;
};

/// Integral over [0,1) of 2 r (1-r)^gamma F(r, 1-r) dr on dyadic panels in x = 1 - r,
/// with the innermost panel [0, 2^{-J}] taking the x^gamma endpoint exactly.
template <class F>
double radial_integral(F&& F_r, double gamma, int J, const GaussRule& rule, int* nodes = nullptr) {
  double total = 0.0;
  int count = 0;
  for (int j = 0; j < J; ++j) {
    const double hi = std::ldexp(1.0, -j), lo = 0.5 * hi;
    total += gauss_panel(
        [&](double x) {
          ++count;
          return 2.0 * (1.0 - x) * std::pow(x, gamma) * F_r(1.0 - x, x);
        },
        lo, hi, rule);
  }
  const double X = std::ldexp(1.0, -J);
  const NodeSet inner = power_endpoint_nodes(X, gamma, rule);
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const double x = inner.x[i];
    total += inner.w[i] * 2.0 * (1.0 - x) * F_r(1.0 - x, x);
    ++count;
  }
  if (nodes) *nodes = count;
  return total;
}

namespace detail {

inline int depth_for_degree(std::size_t degree, int extra) {
  int d = 0;
  while ((std::size_t{1} << d) < degree + 1) ++d;
  return d + extra;
}

// Integral of |f|^p (1-|z|)^gamma dA for a polynomial, one discretization level.
inline double series_area_pass(const std::vector<cplx>& c, double p, double gamma, int J, int order,
                               int oversample, int* radial, int* angular) {
  const GaussRule& rule = gauss_rule(order);
  const double v = radial_integral(
      [&](double r, double) { return circle_mean_pow(c, r, p, oversample); }, gamma, J, rule, radial);
  if (angular) *angular = static_cast<int>(circle_samples_for(c.size() - 1, oversample));
  return v;
}

}  // namespace detail

/// Integral of |f|^p (1-|z|)^gamma dA for a truncated series.
inline NormEstimate weighted_area_integral(const PowerSeries& f, double p, double gamma,
                                           const AreaBudget& b = {}) {
  if (!(p > 0.0)) throw parameter_error("norms", "area integral needs p > 0");
  if (!(gamma > -1.0)) throw parameter_error("norms", "area weight needs gamma > -1");
  const std::size_t deg = f.degree();
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().begin() + static_cast<std::ptrdiff_t>(deg + 1));
  const int J = detail::depth_for_degree(deg, b.extra_depth);
  NormEstimate e;
  e.method = "area/polar-fft";
  e.value = detail::series_area_pass(c, p, gamma, J, b.radial_order, b.oversample, &e.radial_nodes,
                                     &e.angular_nodes);
  if (b.refine) {
    int rn = 0, an = 0;
    const double fine = detail::series_area_pass(c, p, gamma, 2 * J, refined_order(b.radial_order),
                                                 2 * b.oversample, &rn, &an);
    e.refinement_delta = fine > 0.0 ? std::fabs(fine - e.value) / fine : 0.0;
    e.value = fine;
    e.radial_nodes = rn;
    e.angular_nodes = an;
    e.certified = e.refinement_delta < b.certify_tol;
  }
  return e;
}

/// Bergman norm (integral of |f|^p dA)^{1/p}, dA = dx dy / pi.
inline NormEstimate ap_norm(const PowerSeries& f, double p, const AreaBudget& b = {}) {
  NormEstimate e = weighted_area_integral(f, p, 0.0, b);
  e.method = "ap/polar-fft";
  e.value = std::pow(e.value, 1.0 / p);
  e.refinement_delta /= p;
  return e;
}

// ---------------------------------------------------------------------------------------------
// function flavour: closed-form evaluation on the disk

/// Anything evaluable on the disk. value(z, 1-z); peak_scale() is the distance from the
/// peak at z = 1 to the nearest singularity (0 if it sits on the circle).
template <class F>
concept DiskFunction = requires(const F& f, cplx z, cplx omz) {
  { f.value(z, omz) } -> std::convertible_to<cplx>;
  { f.peak_scale() } -> std::convertible_to<double>;
  { f.real_coefficients() } -> std::convertible_to<bool>;
};

/// Closed-form disk function from a tagged series.
struct FamilyFunction {
  Family family;

  cplx value(cplx z, cplx omz) const {
    auto v = closed_form(family, z, omz);
    if (!v) throw parameter_error("norms", "family has no closed form");
    return *v;
  }
  cplx derivative(cplx, cplx omz) const { return *closed_form_derivative(family, omz); }
  double derivative_real(double r, double x) const {
    (void)r;
    return closed_form_derivative(family, cplx(x)).value().real();
  }
  double peak_scale() const {
    if (auto* k = std::get_if<LogKernel>(&family)) return 1.0 - std::fabs(k->b);
    if (auto* k = std::get_if<PowerKernel>(&family)) return 1.0 - std::fabs(k->a);
    if (std::holds_alternative<Binomial>(family)) return 0.0;
    return 1.0;
  }
  bool real_coefficients() const { return true; }
  bool nonnegative() const {
    if (auto* k = std::get_if<LogKernel>(&family)) return k->b >= 0.0;
    if (auto* k = std::get_if<PowerKernel>(&family)) return k->a >= 0.0 && k->exponent >= 0.0;
    if (auto* k = std::get_if<Binomial>(&family)) return k->c >= 0.0;
    return false;
  }
};

namespace detail {

// Angular breakpoints pi 2^{-k}, graded towards theta = 0 down to scale w.
inline std::vector<double> graded_breaks(double w) {
  w = std::max(w, 1e-15);
  int K = std::max(2, static_cast<int>(std::ceil(std::log2(4.0 * std::numbers::pi / w))) + 1);
  K = std::min(K, 55);
  std::vector<double> br;
  for (int k = 0; k <= K; ++k) br.push_back(std::numbers::pi * std::ldexp(1.0, -k));
  br.push_back(0.0);
  return br;  // decreasing
}

inline cplx one_minus_polar(double r, double x, double theta) {
  // 1 - r e^{i theta} = x + r (2 sin^2(theta/2) - i sin theta)
  const double s = std::sin(0.5 * theta);
  return cplx(x + r * 2.0 * s * s, -r * std::sin(theta));
}

// Mean over the circle of radius r of g(z, 1-z), graded near theta = 0.
template <class G>
double graded_circle_mean(G&& g, double r, double x, double w, const GaussRule& rule, bool symmetric,
                          int* nodes = nullptr) {
  const auto br = graded_breaks(std::max(w, x));
  double sum = 0.0;
  int count = 0;
  auto side = [&](double sign) {
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      sum += gauss_panel(
          [&](double th) {
            ++count;
            const double theta = sign * th;
            const cplx z = std::polar(r, theta);
            return g(z, one_minus_polar(r, x, theta));
          },
          br[k + 1], br[k], rule);
    }
  };
  side(1.0);
  if (symmetric) {
    sum *= 2.0;
  } else {
    side(-1.0);
  }
  if (nodes) *nodes = count;
  return sum / (2.0 * std::numbers::pi);
}

}  // namespace detail

/// Integral of |f|^p (1-|z|)^gamma dA for a disk function. depth > 0 fixes the radial depth,
/// otherwise it is taken from the peak scale plus the budget's extra depth.
template <DiskFunction F>
NormEstimate weighted_area_integral_fn(const F& f, double p, double gamma, const AreaBudget& b = {},
                                       int depth = 0) {
  const double ps = f.peak_scale();
  const int base = ps > 0.0 ? static_cast<int>(std::ceil(std::log2(1.0 / ps))) : 20;
  auto pass = [&](int J, int rorder, int aorder, int* rn, int* an) {
    const GaussRule& rrule = gauss_rule(rorder);
    const GaussRule& arule = gauss_rule(aorder);
    int amax = 0;
    const double v = radial_integral(
        [&](double r, double x) {
          int n = 0;
          const double m = detail::graded_circle_mean(
              [&](cplx z, cplx omz) {
                const double a = std::abs(f.value(z, omz));
                return p == 2.0 ? a * a : std::pow(a, p);
              },
              r, x, ps, arule, f.real_coefficients(), &n);
          amax = std::max(amax, n);
          return m;
        },
        gamma, J, rrule, rn);
    *an = amax;
    return v;
  };
  const int J = depth > 0 ? depth : base + b.extra_depth;
  NormEstimate e;
  e.method = "area/polar-graded";
  e.value = pass(J, b.radial_order, b.angular_order, &e.radial_nodes, &e.angular_nodes);
  if (b.refine) {
    int rn = 0, an = 0;
    const double fine = pass(J + b.extra_depth, refined_order(b.radial_order), refined_order(b.angular_order), &rn, &an);
    e.refinement_delta = fine > 0.0 ? std::fabs(fine - e.value) / fine : 0.0;
    e.value = fine;
    e.radial_nodes = rn;
    e.angular_nodes = an;
    e.certified = e.refinement_delta < b.certify_tol;
  }
  return e;
}

template <DiskFunction F>
NormEstimate ap_norm_fn(const F& f, double p, const AreaBudget& b = {}, int depth = 0) {
  NormEstimate e = weighted_area_integral_fn(f, p, 0.0, b, depth);
  e.method = "ap/polar-graded";
  e.value = std::pow(e.value, 1.0 / p);
  e.refinement_delta /= p;
  return e;
}

// ---------------------------------------------------------------------------------------------
// Bloch-type suprema

namespace detail {

// Radial grid x_k = 2^{-k/steps}, k = 0..30*steps (x_0 = 1 is the origin).
inline double grid_x(int k, int steps) { return std::exp2(-static_cast<double>(k) / steps); }

struct RadialSup {
  double value = 0.0;
  double delta = 0.0;
  int nodes = 0;
};

// sup over r in [0,1) of h(r, x) on the dyadic grid, refined by golden section in log x.
inline RadialSup radial_sup(const std::function<double(double, double)>& h) {
  RadialSup out;
  auto at_log = [&](double lx) {
    const double x = std::exp2(lx);
    return h(1.0 - x, x);
  };
  auto refine_from = [&](int steps) {
    int best = 0;
    double bv = -1.0;
    for (int k = 0; k <= 30 * steps; ++k) {
      const double v = at_log(-static_cast<double>(k) / steps);
      ++out.nodes;
      if (v > bv) {
        bv = v;
        best = k;
      }
    }
    const double lo = -static_cast<double>(std::min(best + 1, 30 * steps)) / steps;
    const double hi = -static_cast<double>(std::max(best - 1, 0)) / steps;
    return std::max(bv, golden_max(at_log, lo, hi, 1e-10));
  };
  const double coarse = refine_from(8);
  const double fine = refine_from(16);
  out.value = std::max(coarse, fine);
  out.delta = out.value > 0.0 ? std::fabs(fine - coarse) / out.value : 0.0;
  return out;
}

// sup over the disk grid of (1-r^2)^w |sum c_k z^k|.
inline RadialSup weighted_sup_series(const std::vector<cplx>& c, double w, bool nonneg) {
  if (nonneg) {
    return radial_sup([&](double r, double x) {
      double acc = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * r + c[k].real();
      return std::pow(x * (2.0 - x), w) * std::fabs(acc);
    });
  }
  // full grid: FFT samples on each circle, then alternate golden passes in theta and log x
  RadialSup out;
  double best = -1.0, best_lx = 0.0, best_th = 0.0;
  const int steps = 8;
  for (int k = 0; k <= 30 * steps; ++k) {
    const double lx = -static_cast<double>(k) / steps;
    const double x = std::exp2(lx), r = 1.0 - x;
    const auto b = scaled_coeffs(c, r);
    const std::size_t M = circle_samples_for(b.size() - 1, 8);
    const auto vals = circle_values(b, M);
    const double wt = std::pow(x * (2.0 - x), w);
    for (std::size_t j = 0; j < M; ++j) {
      const double v = wt * std::abs(vals[j]);
      if (v > best) {
        best = v;
        best_lx = lx;
        best_th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(M);
      }
    }
    out.nodes += static_cast<int>(M);
  }
  auto val = [&](double lx, double th) {
    const double x = std::exp2(lx), r = 1.0 - x;
    return std::pow(x * (2.0 - x), w) * std::abs(horner(c, std::polar(r, th)));
  };
  double dth = 4.0 * std::numbers::pi / static_cast<double>(circle_samples_for(c.size(), 8));
  double dlx = 0.25;
  double cur = best;
  for (int pass = 0; pass < 40; ++pass) {
    const double prev = cur;
    auto [th, v1] = golden_argmax([&](double t) { return val(best_lx, t); }, best_th - dth, best_th + dth, 1e-14);
    if (v1 >= cur) {
      best_th = th;
      cur = v1;
    }
    auto [lx, v2] = golden_argmax([&](double l) { return val(l, best_th); }, best_lx - dlx,
                                  std::min(0.0, best_lx + dlx), 1e-14);
    if (v2 >= cur) {
      best_lx = lx;
      cur = v2;
    }
    out.delta = (cur - prev) / cur;
    dth *= 0.5;
    dlx *= 0.5;
    if (pass > 3 && out.delta < 1e-14) break;
  }
  out.value = cur;
  return out;
}

}  // namespace detail

/// |f(0)| + sup (1-|z|^2)|f'(z)| over the grid r = 1 - 2^{-j}, j <= 30.
inline NormEstimate bloch_norm(const PowerSeries& f) {
  const PowerSeries d = f.derivative();
  const bool nonneg = f.nonnegative();
  const auto s = detail::weighted_sup_series(d.coeffs(), 1.0, nonneg);
  NormEstimate e;
  e.value = std::abs(f[0]) + s.value;
  e.method = nonneg ? "bloch/radial" : "bloch/grid";
  e.radial_nodes = s.nodes;
  e.refinement_delta = s.delta;
  e.certified = s.delta <= 1e-4;
  return e;
}

/// sup (1-|z|^2)^t |R^{s,t} f(z)|.
inline NormEstimate bloch_norm_frac(const PowerSeries& f, double s, double t) {
  if (!(t > 0.0)) throw parameter_error("norms", "bloch_norm_frac needs t > 0");
  const PowerSeries g = frac_diff(f, FracParams{s, t});
  const bool nonneg = f.nonnegative();
  const auto r = detail::weighted_sup_series(g.coeffs(), t, nonneg);
  NormEstimate e;
  e.value = r.value;
  e.method = nonneg ? "bloch_frac/radial" : "bloch_frac/grid";
  e.radial_nodes = r.nodes;
  e.refinement_delta = r.delta;
  e.certified = r.delta <= 1e-4;
  return e;
}

/// Ratio band bloch_norm_frac / bloch_norm over a family of series.
inline EquivalenceReport bloch_frac_equivalence(const std::vector<std::pair<double, PowerSeries>>& family,
                                                double s, double t, double band = 10.0) {
  std::vector<std::pair<double, double>> sweep;
  double drift = 0.0;
  for (const auto& [param, f] : family) {
    const auto a = bloch_norm_frac(f, s, t);
    const auto b = bloch_norm(f);
    sweep.emplace_back(param, a.value / b.value);
    drift = std::max({drift, a.refinement_delta, b.refinement_delta});
  }
  return make_equivalence_report("bloch_frac(s=" + std::to_string(s) + ",t=" + std::to_string(t) + ")",
                                 std::move(sweep), drift, band);
}

/// Bloch norm of a disk function with closed-form derivative and nonnegative coefficients
/// (the supremum is then attained on the positive radius).
template <class F>
NormEstimate bloch_norm_radial_fn(const F& f, double f0) {
  const auto s = detail::radial_sup([&](double r, double x) { return x * (2.0 - x) * f.derivative_real(r, x); });
  NormEstimate e;
  e.value = std::fabs(f0) + s.value;
  e.method = "bloch/radial-closed-form";
  e.radial_nodes = s.nodes;
  e.refinement_delta = s.delta;
  e.certified = s.delta <= 1e-4;
  return e;
}

// ---------------------------------------------------------------------------------------------
// dyadic equivalences

struct K1K2 {
  double k1 = 0.0;
  double k2 = 0.0;
  bool k2_stabilized = true;
  unsigned blocks = 0;
  double ratio() const { return k1 / k2; }
};

/// K1 = integral |f|^p (1-|z|)^gamma dA, K2 = sum_n 2^{-n(gamma+1)} ||Delta_n f||_p^p.
inline AreaBudget unrefined_budget() {
  AreaBudget b;
  b.refine = false;
  return b;
}

inline K1K2 k1_k2_values(const PowerSeries& f, double p, double gamma, const AreaBudget& b = unrefined_budget()) {
  if (!(p > 1.0)) throw parameter_error("norms", "k1_k2 needs p > 1");
  if (!(gamma > -1.0)) throw parameter_error("norms", "k1_k2 needs gamma > -1");
  K1K2 out;
  out.k1 = weighted_area_integral(f, p, gamma, b).value;
  const unsigned nmax = max_block_index(f);
  double last = 0.0;
  for (unsigned n = 0; n <= nmax; ++n) {
    const double hp = hp_norm(dyadic_block(f, n), p).value;
    last = std::ldexp(1.0, -static_cast<int>(n)) * std::pow(std::ldexp(1.0, -static_cast<int>(n)), gamma) *
           std::pow(hp, p);
    out.k2 += last;
  }
  out.blocks = nmax + 1;
  out.k2_stabilized = last <= 1e-3 * out.k2;
  return out;
}

/// K1/K2 band over a family generator make(param, N), drift measured from N to 2N.
inline EquivalenceReport k1_k2(const std::function<PowerSeries(double, std::size_t)>& make,
                               const std::vector<double>& params, double p, double gamma, std::size_t N,
                               double band = 10.0) {
  std::vector<std::pair<double, double>> sweep;
  double drift = 0.0;
  for (double c : params) {
    const double r1 = k1_k2_values(make(c, N), p, gamma).ratio();
    const double r2 = k1_k2_values(make(c, 2 * N + 1), p, gamma).ratio();
    sweep.emplace_back(c, r2);
    drift = std::max(drift, std::fabs(r2 / r1 - 1.0));
  }
  return make_equivalence_report("K1/K2(p=" + std::to_string(p) + ",gamma=" + std::to_string(gamma) + ")",
                                 std::move(sweep), drift, band);
}

struct PavlovicResult {
  double value = 0.0;
  std::size_t argmax = 0;  // n attaining the running maximum
  bool stabilized = true;  // false when the max sits at n = N
};

/// |c_0| + max_{1<=n<=N} (1/n) sum_{k=1}^n k c_k.
inline PavlovicResult pavlovic_bloch(const std::vector<double>& c) {
  for (double v : c)
    if (!(v >= 0.0)) throw parameter_error("norms", "pavlovic_bloch needs nonnegative coefficients");
  PavlovicResult r;
  if (c.size() < 2) {
    r.value = c.empty() ? 0.0 : c[0];
    return r;
  }
  double run = 0.0, best = -1.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    run += static_cast<double>(n) * c[n];
    const double avg = run / static_cast<double>(n);
    if (avg > best) {
      best = avg;
      r.argmax = n;
    }
  }
  r.value = std::fabs(c[0]) + best;
  r.stabilized = r.argmax < c.size() - 1;
  return r;
}

struct VnBloch {
  double sup_vn = 0.0;  // sup_n ||V_n * f||_inf over complete blocks
  unsigned argmax = 0;
  unsigned blocks = 0;
  bool truncation_flag = false;
  double bloch = 0.0;
  double ratio() const { return sup_vn / bloch; }
};

inline VnBloch vn_bloch_values(const PowerSeries& f) {
  VnBloch out;
  unsigned n = 0;
  while (n == 0 || ((std::size_t{1} << (n + 1)) - 1) <= f.truncation()) {
    const double v = hinf_norm(hadamard(vn_polynomial(n), f)).value;
    if (v > out.sup_vn) {
      out.sup_vn = v;
      out.argmax = n;
    }
    ++n;
  }
  out.blocks = n;
  out.truncation_flag = out.argmax + 1 >= n && n > 1;
  out.bloch = bloch_norm(f).value;
  return out;
}

/// sup_n ||V_n * f||_inf against the Bloch norm over a family, drift from N to 2N.
inline EquivalenceReport vn_bloch(const std::function<PowerSeries(double, std::size_t)>& make,
                                  const std::vector<double>& params, std::size_t N, double band = 10.0) {
  std::vector<std::pair<double, double>> sweep;
  double drift = 0.0;
  for (double c : params) {
    const double r1 = vn_bloch_values(make(c, N)).ratio();
    const double r2 = vn_bloch_values(make(c, 2 * N + 1)).ratio();
    sweep.emplace_back(c, r2);
    drift = std::max(drift, std::fabs(r2 / r1 - 1.0));
  }
  return make_equivalence_report("Vn-Bloch", std::move(sweep), drift, band);
}

struct A1Tests {
  double lower = 0.0;  // sum_{n>=1} |a_n| / n
  double upper = 0.0;  // sum_{n>=1} |a_n| / n^2
  bool lower_diverges = false;
  bool upper_diverges = false;
};

namespace detail {

// Growth verdict of partial sums S(2^k): diverging when the last dyadic increment is at least
// 0.9 of the previous one and not negligible.
inline bool dyadic_partial_sums_diverge(const std::vector<double>& terms) {
  std::vector<double> inc;
  double acc = 0.0;
  std::size_t next = 2;
  double s_prev = 0.0;
  for (std::size_t n = 1; n < terms.size(); ++n) {
    acc += terms[n];
    if (n + 1 == next || n + 1 == terms.size()) {
      if (n + 1 == next) {
        inc.push_back(acc - s_prev);
        s_prev = acc;
        next *= 2;
      }
    }
  }
  if (inc.size() < 3) return false;
  const double d1 = inc[inc.size() - 1], d0 = inc[inc.size() - 2];
  return d1 >= 0.9 * d0 && d1 > 1e-9 * acc;
}

}  // namespace detail

inline A1Tests a1_coefficient_tests(const PowerSeries& f) {
  A1Tests r;
  std::vector<double> t1(f.truncation() + 1), t2(f.truncation() + 1);
  for (std::size_t n = 1; n <= f.truncation(); ++n) {
    const double a = std::abs(f[n]), nd = static_cast<double>(n);
    t1[n] = a / nd;
    t2[n] = a / (nd * nd);
    r.lower += t1[n];
    r.upper += t2[n];
  }
  r.lower_diverges = detail::dyadic_partial_sums_diverge(t1);
  r.upper_diverges = detail::dyadic_partial_sums_diverge(t2);
  return r;
}

// ---------------------------------------------------------------------------------------------
// the kernel integral J(z)

enum class JRegime { bounded, log, power };

inline const char* to_string(JRegime r) {
  switch (r) {
    case JRegime::bounded: return "bounded";
    case JRegime::log: return "log";
    default: return "power";
  }
}

/// Integral over the disk of (1-|u|^2)^delta |1 - conj(z) u|^{-(2+t+delta)} dA(u), for |z| = 1 - omx.
inline double j_integral_value(double omx, double t, double delta, int order = 15) {
  if (!(delta > -1.0)) throw parameter_error("norms", "j_integral needs delta > -1");
  if (!(omx > 0.0 && omx <= 1.0)) throw parameter_error("norms", "j_integral needs |z| < 1");
  const double xz = 1.0 - omx;
  const double lambda = 0.5 * (2.0 + t + delta);
  if (xz == 0.0) return 1.0 / (delta + 1.0);
  const GaussRule& rule = gauss_rule(order);
  // angular mean of |1 - s e^{i theta}|^{-2 lambda}, with 1 - s supplied
  auto angular = [&](double s, double oms) {
    const auto br = detail::graded_breaks(oms);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k)
      sum += gauss_panel(
          [&](double th) {
            const double sn = std::sin(0.5 * th);
            return std::pow(oms * oms + 4.0 * s * sn * sn, -lambda);
          },
          br[k + 1], br[k], rule);
    return sum / std::numbers::pi;
  };
  // radial variable y = 1 - rho; s = xz (1 - y), 1 - s = omx + xz y
  auto radial_term = [&](double y) {
    const double s = xz * (1.0 - y);
    return 2.0 * (1.0 - y) * std::pow(2.0 - y, delta) * angular(s, omx + xz * y);
  };
  const int J = static_cast<int>(std::ceil(std::log2(1.0 / omx))) + 12;
  double total = 0.0;
  for (int j = 0; j < J; ++j) {
    const double hi = std::ldexp(1.0, -j), lo = 0.5 * hi;
    total += gauss_panel([&](double y) { return std::pow(y, delta) * radial_term(y); }, lo, hi, rule);
  }
  const NodeSet inner = power_endpoint_nodes(std::ldexp(1.0, -J), delta, rule);
  for (std::size_t i = 0; i < inner.size(); ++i) total += inner.w[i] * radial_term(inner.x[i]);
  return total;
}

struct JIntegral {
  double value = 0.0;
  JRegime regime = JRegime::bounded;
  double fitted_exponent = 0.0;  // exponent e with J ~ (1-|z|^2)^e in the power regime
  double growth_log2 = 0.0;      // log2 of the dyadic increment ratio
  double band = 0.0;             // max/min of J against its regime model along the sweep
  std::vector<std::pair<int, double>> profile;  // (j, J at |z| = 1 - 2^{-j})
};

/// Growth regime of J along |z| = 1 - 2^{-j}, j = 2..14, from the ratio of successive increments.
inline JIntegral j_regime(double t, double delta, int jmin = 2, int jmax = 14) {
  JIntegral out;
  for (int j = jmin; j <= jmax; ++j) out.profile.emplace_back(j, j_integral_value(std::ldexp(1.0, -j), t, delta));
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < out.profile.size(); ++i) d.push_back(out.profile[i + 1].second - out.profile[i].second);
  double acc = 0.0;
  int cnt = 0;
  for (std::size_t i = d.size() - 4; i + 1 < d.size(); ++i) {
    acc += std::log2(std::fabs(d[i + 1] / d[i]));
    ++cnt;
  }
  out.growth_log2 = acc / cnt;
  if (out.growth_log2 < -0.1)
    out.regime = JRegime::bounded;
  else if (out.growth_log2 <= 0.1)
    out.regime = JRegime::log;
  else
    out.regime = JRegime::power;
  out.fitted_exponent = -out.growth_log2;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [j, v] : out.profile) {
    const double omz2 = std::ldexp(1.0, -j) * (2.0 - std::ldexp(1.0, -j));
    double model = 1.0;
    if (out.regime == JRegime::log) model = std::log(std::exp(1.0) / omz2);
    if (out.regime == JRegime::power) model = std::pow(omz2, -t);
    lo = std::min(lo, v / model);
    hi = std::max(hi, v / model);
  }
  out.band = hi / lo;
  out.value = out.profile.back().second;
  return out;
}

inline JIntegral j_integral(cplx z, double t, double delta) {
  JIntegral out = j_regime(t, delta);
  out.value = j_integral_value(1.0 - std::abs(z), t, delta);
  return out;
}

}  // namespace hilbop
