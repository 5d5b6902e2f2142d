#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "measure.hpp"
#include "quadrature.hpp"
#include "series.hpp"
#include "special.hpp"

namespace hilbop {

enum class SpaceKind { bloch, bergman, hankel_a2 };

/// Source space an operator is applied on; decides which integrability gate applies.
struct Space {
  SpaceKind kind = SpaceKind::bloch;
  double p = 2.0;

  static Space bloch() { return {SpaceKind::bloch, 0.0}; }
  static Space bergman(double p) {
    if (!(p > 0.0)) throw parameter_error("hilbert_op", "A^p needs p > 0");
    return {SpaceKind::bergman, p};
  }
  /// A^2 with the Hankel-matrix identification
  static Space hankel_a2() { return {SpaceKind::hankel_a2, 2.0}; }

  std::string name() const {
    switch (kind) {
      case SpaceKind::bloch: return "Bloch";
      case SpaceKind::bergman: return "A^" + std::to_string(p);
      default: return "A^2/hankel";
    }
  }
};

struct GateResult {
  Space space;
  Verdict verdict = Verdict::inconclusive;
  IntegrabilityResult detail;
  bool passed() const { return verdict == Verdict::holds; }
};

/// Bloch: int log(e/(1-t)) dmu < inf. A^p: int (1-t)^{-2/p} dmu < inf.
/// A^2/hankel: int mu([t,1)) (1-t)^{-2} dmu(t) < inf.
inline GateResult gate_check(const Measure& mu, const Space& space, const DetectorOptions& opt = {}) {
  GateResult g;
  g.space = space;
  switch (space.kind) {
    case SpaceKind::bloch: g.detail = integrability_check(mu, 0.0, 1.0, opt); break;
    case SpaceKind::bergman: g.detail = integrability_check(mu, 2.0 / space.p, 0.0, opt); break;
    case SpaceKind::hankel_a2: g.detail = tail_integrability(mu, 2.0, opt); break;
  }
  g.verdict = g.detail.status == Finiteness::finite     ? Verdict::holds
              : g.detail.status == Finiteness::infinite ? Verdict::fails
                                                        : Verdict::inconclusive;
  return g;
}

// ---------------------------------------------------------------------------------------------
// quadrature nodes of a measure

struct TNode {
  double t = 0.0;
  double omt = 1.0;
  double w = 0.0;  // panel weight times density (or atom mass)
};

namespace detail {

// Fixed nodes in u = -log(1-t) for the density part; stops once a 2-unit block of
// sum w * stop(t, 1-t) is below tail_tol of the running total and decreasing.
inline std::vector<TNode> density_nodes(const Measure& mu, double h, int order,
                                        const std::function<double(double, double)>& stop,
                                        double tail_tol = 1e-15, double u_cap = 1e5) {
  std::vector<TNode> out;
  if (!mu.density()) return out;
  const GaussRule& rule = gauss_rule(order);
  double total = 0.0, block = 0.0, prev_block = std::numeric_limits<double>::infinity();
  double u = 0.0, block_start = 0.0;
  while (true) {
    const double w = panel_width_at(u, h);
    const double half = 0.5 * w, mid = u + half;
    for (int i = 0; i < rule.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const double dens = mu.density_u(x);
      if (dens == 0.0) continue;
      TNode n{-std::expm1(-x), std::exp(-x), rule.weights[i] * half * dens};
      const double c = n.w * stop(n.t, n.omt);
      total += c;
      block += c;
      out.push_back(n);
    }
    u += w;
    if (u - block_start >= 2.0) {
      if (!std::isfinite(total)) throw divergence_error("hilbert_op", "node weights are not finite");
      if (total > 0.0 && block <= tail_tol * total && block <= prev_block) break;
      if (total == 0.0 && u > 800.0) break;
      prev_block = block;
      block = 0.0;
      block_start = u;
    }
    if (u > u_cap) throw divergence_error("hilbert_op", "measure nodes did not decay before the cap");
  }
  return out;
}

inline std::vector<TNode> measure_nodes(const Measure& mu, double h, int order,
                                        const std::function<double(double, double)>& stop) {
  std::vector<TNode> out;
  for (const auto& a : mu.atoms()) out.push_back({a.t, 1.0 - a.t, a.w});
  auto d = density_nodes(mu, h, order, stop);
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

inline double moments_from_nodes(const std::vector<TNode>& nodes, std::vector<double>& m) {
  std::fill(m.begin(), m.end(), 0.0);
  for (const auto& nd : nodes) {
    double tk = nd.w;
    for (auto& v : m) {
      v += tk;
      tk *= nd.t;
      if (tk == 0.0) break;
    }
  }
  return m.empty() ? 0.0 : m[0];
}

// w^{-e}, by repeated multiplication when e is a small integer
template <class Z>
Z neg_power(Z w, double e) {
  const double r = std::round(e);
  if (r == e && r >= 1.0 && r <= 8.0) {
    Z p = w;
    for (int k = 1; k < static_cast<int>(r); ++k) p *= w;
    return Z(1.0) / p;
  }
  if (e == 0.0) return Z(1.0);
  return std::pow(w, -e);
}

}  // namespace detail

/// mu_0 .. mu_M: closed forms when available, otherwise one shared node set.
inline std::vector<double> moment_table(const Measure& mu, std::size_t M) {
  if (!mu.is_finite()) throw divergence_error("hilbert_op", "moments of an infinite measure");
  std::vector<double> m(M + 1);
  if (!mu.density() || mu.closed_form_density()) {
    for (std::size_t n = 0; n <= M; ++n) m[n] = moment(mu, n);
    return m;
  }
  auto one = [](double, double) { return 1.0; };
  double h = 0.25;
  std::vector<double> prev(M + 1);
  detail::moments_from_nodes(detail::measure_nodes(mu, h, 15, one), prev);
  for (int k = 0; k < 4; ++k) {
    h *= 0.5;
    detail::moments_from_nodes(detail::measure_nodes(mu, h, 15, one), m);
    double worst = 0.0;
    for (std::size_t n = 0; n <= M; n += std::max<std::size_t>(1, M / 64))
      worst = std::max(worst, std::fabs(m[n] - prev[n]) / std::max(std::fabs(m[n]), 1e-300));
    if (worst < 1e-10) return m;
    prev = m;
  }
  throw convergence_error("hilbert_op", "moment table did not settle under node doubling");
}

// ---------------------------------------------------------------------------------------------
// operator setup

class OperatorSpec {
 public:
  OperatorSpec(Measure mu, double alpha, std::size_t N = 4096, std::optional<Space> source = std::nullopt,
               QuadratureOptions quad = {})
      : mu_(std::move(mu)), alpha_(alpha), N_(N), quad_(quad) {
    if (!(alpha > -1.0)) throw parameter_error("hilbert_op", "alpha must exceed -1");
    if (N == 0) throw parameter_error("hilbert_op", "truncation must be positive");
    if (source) gate_ = gate_check(mu_, *source);
    if (mu_.is_finite()) moments_ = moment_table(mu_, 2 * N_);
    gamma_.resize(N_ + 1);
    for (std::size_t n = 0; n <= N_; ++n) gamma_[n] = gamma_ratio(n, alpha_);
  }

  const Measure& measure() const { return mu_; }
  double alpha() const { return alpha_; }
  std::size_t truncation() const { return N_; }
  const QuadratureOptions& quadrature() const { return quad_; }
  /// mu_0 .. mu_{2N}; empty for an infinite measure
  const std::vector<double>& moments() const { return moments_; }
  /// Gamma(n+1+alpha) / (Gamma(n+1) Gamma(alpha+1)), n = 0..N
  const std::vector<double>& gamma_factors() const { return gamma_; }
  const std::optional<GateResult>& gate() const { return gate_; }

  void require_gate() const {
    if (!gate_) return;
    if (gate_->verdict == Verdict::fails)
      throw gate_error("hilbert_op", "operator is not well defined on " + gate_->space.name());
    if (gate_->verdict == Verdict::inconclusive)
      throw gate_error("hilbert_op", "well-definedness on " + gate_->space.name() + " is inconclusive");
  }

 private:
  Measure mu_;
  double alpha_;
  std::size_t N_;
  QuadratureOptions quad_;
  std::optional<GateResult> gate_;
  std::vector<double> moments_;
  std::vector<double> gamma_;
};

/// Throws gate_error when the gate is inconclusive.
inline bool well_defined(const OperatorSpec& spec, const Space& space) {
  const GateResult g = gate_check(spec.measure(), space);
  if (g.verdict == Verdict::inconclusive)
    throw gate_error("hilbert_op", "well-definedness on " + space.name() + " is inconclusive");
  return g.passed();
}

struct HankelRow {
  std::size_t n = 0;
  std::vector<double> entries;  // mu_{n+k}, k = 0..N
  double gamma_factor = 1.0;
};

inline HankelRow hankel_row(const OperatorSpec& spec, std::size_t n) {
  if (n > spec.truncation()) throw truncation_error("hilbert_op", "row index beyond truncation");
  if (spec.moments().empty()) throw divergence_error("hilbert_op", "infinite measure has no Hankel matrix");
  HankelRow r;
  r.n = n;
  r.gamma_factor = spec.gamma_factors()[n];
  r.entries.assign(spec.moments().begin() + static_cast<std::ptrdiff_t>(n),
                   spec.moments().begin() + static_cast<std::ptrdiff_t>(n + spec.truncation() + 1));
  return r;
}

// ---------------------------------------------------------------------------------------------
// integral forms

namespace detail {

inline void check_disk_point(cplx z) {
  if (std::abs(z) > 1.0 - 1e-6) throw parameter_error("hilbert_op", "evaluation needs |z| <= 1 - 1e-6");
}

template <class V>
cplx apply_with(const OperatorSpec& spec, V&& fval, cplx z) {
  spec.require_gate();
  check_disk_point(z);
  const cplx omz = 1.0 - z;
  const double e = spec.alpha() + 1.0;
  return integrate(
      spec.measure(),
      [&](double t, double omt) -> cplx {
        const double fv = fval(t, omt);
        if (fv == 0.0) return cplx{};
        return fv * neg_power(omz + z * omt, e);
      },
      spec.quadrature());
}

}  // namespace detail

/// int f(t) (1 - t z)^{-(alpha+1)} dmu(t)
inline cplx apply_integral(const OperatorSpec& spec, const PowerSeries& f, cplx z) {
  if (!f.real_coefficients()) {
    const cplx re = detail::apply_with(spec, [&](double t, double omt) { return value_at_complex(f, t, omt).real(); }, z);
    const cplx im = detail::apply_with(spec, [&](double t, double omt) { return value_at_complex(f, t, omt).imag(); }, z);
    return re + cplx(0.0, 1.0) * im;
  }
  return detail::apply_with(spec, [&](double t, double omt) { return value_at(f, t, omt); }, z);
}

/// int |f(t)| (1 - t z)^{-(alpha+1)} dmu(t)
inline cplx apply_sublinear(const OperatorSpec& spec, const PowerSeries& f, cplx z) {
  return detail::apply_with(spec, [&](double t, double omt) { return std::abs(value_at_complex(f, t, omt)); }, z);
}

// ---------------------------------------------------------------------------------------------
// Hankel-coefficient form

enum class HankelMethod { automatic, direct, fft };

struct HankelResult {
  PowerSeries coefficients;
  bool stabilized = true;  // false when the inner sums still change at k = N
};

namespace detail {

// s_n = sum_{k=0}^{N} m_{n+k} a_k, n = 0..N
inline std::vector<cplx> hankel_correlate_direct(const std::vector<double>& m, const std::vector<cplx>& a) {
  const std::size_t N = a.size() - 1;
  std::vector<cplx> s(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    cplx acc{};
    for (std::size_t k = 0; k <= N; ++k) acc += m[n + k] * a[k];
    s[n] = acc;
  }
  return s;
}

inline std::vector<cplx> hankel_correlate_fft(const std::vector<double>& m, const std::vector<cplx>& a) {
  // with b_k = a_{N-k}, s_n = (m * b)_{n+N}
  const std::size_t N = a.size() - 1;
  const std::size_t L = next_pow2(3 * N + 2);
  std::vector<cplx> A(L), B(L);
  for (std::size_t j = 0; j <= 2 * N; ++j) A[j] = m[j];
  for (std::size_t k = 0; k <= N; ++k) B[k] = a[N - k];
  fft_inplace(A, -1);
  fft_inplace(B, -1);
  for (std::size_t j = 0; j < L; ++j) A[j] *= B[j];
  fft_inplace(A, +1);
  std::vector<cplx> s(N + 1);
  const double inv = 1.0 / static_cast<double>(L);
  for (std::size_t n = 0; n <= N; ++n) s[n] = A[n + N] * inv;
  return s;
}

}  // namespace detail

/// c_n = Gamma-ratio(n, alpha) * sum_{k<=N} mu_{n+k} a_k, n = 0..N.
inline HankelResult hankel_coefficients(const OperatorSpec& spec, const PowerSeries& f,
                                        HankelMethod method = HankelMethod::automatic) {
  spec.require_gate();
  if (spec.moments().empty()) throw divergence_error("hilbert_op", "infinite measure has no Hankel matrix");
  const std::size_t N = spec.truncation();
  std::vector<cplx> a(N + 1);
  for (std::size_t k = 0; k <= N; ++k) a[k] = f[k];
  if (method == HankelMethod::automatic) method = N >= 128 ? HankelMethod::fft : HankelMethod::direct;
  auto s = method == HankelMethod::fft ? detail::hankel_correlate_fft(spec.moments(), a)
                                       : detail::hankel_correlate_direct(spec.moments(), a);
  HankelResult r;
  // the last inner term of row 0 against the row sum
  const double last = std::abs(spec.moments()[N] * a[N]);
  r.stabilized = last <= 1e-10 * std::max(std::abs(s[0]), 1e-300);
  for (std::size_t n = 0; n <= N; ++n) s[n] *= spec.gamma_factors()[n];
  r.coefficients = PowerSeries(std::move(s));
  return r;
}

// ---------------------------------------------------------------------------------------------
// image of a function as a disk function

/// I(f)(z) = sum_i w_i (1 - t_i z)^{-(alpha+1)} on a fixed node set; usable by the norms module.
struct ImageFunction {
  double alpha = 0.0;
  std::vector<double> t, omt, w;  // w already carries f(t_i) (or |f(t_i)|)

  cplx value(cplx z, cplx omz) const {
    const double e = alpha + 1.0;
    cplx s{};
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * detail::neg_power(omz + z * omt[i], e);
    return s;
  }
  cplx derivative(cplx z, cplx omz) const {
    const double e = alpha + 2.0;
    cplx s{};
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * t[i] * detail::neg_power(omz + z * omt[i], e);
    return (alpha + 1.0) * s;
  }
  double value_real(double r, double x) const {
    const double e = alpha + 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * detail::neg_power(x + r * omt[i], e);
    return s;
  }
  double derivative_real(double r, double x) const {
    const double e = alpha + 2.0;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * t[i] * detail::neg_power(x + r * omt[i], e);
    return (alpha + 1.0) * s;
  }
  double peak_scale() const { return 0.0; }
  bool real_coefficients() const { return true; }
  std::size_t size() const { return w.size(); }
};

/// Node representation of I(f) (or of the sublinear form) accurate down to |1 - z| ~ x_min.
/// fval(t, 1-t) gives f on [0, 1).
inline ImageFunction image_function(const OperatorSpec& spec, const std::function<double(double, double)>& fval,
                                    bool sublinear = false, double x_min = 1e-12) {
  spec.require_gate();
  const double e = spec.alpha() + 1.0;
  auto f = [&](double t, double omt) {
    const double v = fval(t, omt);
    return sublinear ? std::fabs(v) : v;
  };
  auto stop = [&](double t, double omt) { return std::fabs(f(t, omt)) * std::pow(omt + x_min, -e); };
  auto build = [&](double h) {
    ImageFunction img;
    img.alpha = spec.alpha();
    for (const auto& nd : detail::measure_nodes(spec.measure(), h, 10, stop)) {
      const double v = nd.w * f(nd.t, nd.omt);
      if (v == 0.0) continue;
      img.t.push_back(nd.t);
      img.omt.push_back(nd.omt);
      img.w.push_back(v);
    }
    return img;
  };
  const std::vector<cplx> probes = {cplx(1.0 - x_min), cplx(1.0 - 1e-3), cplx(1.0 - 1e-3, 1e-3), cplx(0.9),
                                    cplx(0.0, 0.9), cplx(-0.9), cplx(0.0)};
  double h = 0.5;
  ImageFunction coarse = build(h);
  for (int k = 0; k < 4; ++k) {
    h *= 0.5;
    ImageFunction fine = build(h);
    double worst = 0.0;
    for (const cplx& z : probes) {
      const cplx a = coarse.value(z, 1.0 - z), b = fine.value(z, 1.0 - z);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
    }
    if (worst < 1e-9) return coarse;
    coarse = std::move(fine);
  }
  throw convergence_error("hilbert_op", "image node set did not settle under refinement");
}

inline ImageFunction image_function(const OperatorSpec& spec, const PowerSeries& f, bool sublinear = false,
                                    double x_min = 1e-12) {
  return image_function(spec, [&](double t, double omt) { return value_at(f, t, omt); }, sublinear, x_min);
}

// ---------------------------------------------------------------------------------------------
// duality pairing

namespace detail {

// R^{0,alpha-1} g as a series, regrown until its tail at x is negligible
inline PowerSeries pairing_kernel(const PowerSeries& g, double alpha, double x) {
  PowerSeries gg = g;
  while (true) {
    PowerSeries Rg = frac_diff(gg, FracParams{0.0, alpha - 1.0});
    const std::size_t N = Rg.truncation();
    double big = 0.0;
    for (std::size_t k = 0; k <= std::min<std::size_t>(N, 64); ++k) big = std::max(big, std::abs(Rg[k]));
    const double tail = std::abs(Rg[N]) * std::pow(x, static_cast<double>(N));
    if (tail <= 1e-15 * std::max(big, 1e-300)) return Rg;
    if (gg.is_custom() || N >= (std::size_t{1} << 22))
      throw truncation_error("hilbert_op", "pairing kernel series has not converged at the truncation");
    gg = gg.truncated(2 * N + 1);
  }
}

}  // namespace detail

/// int R^{0,alpha-1} g(r^2 t) conj(f(t)) dmu(t)
inline cplx dual_pairing(const OperatorSpec& spec, const PowerSeries& f, const PowerSeries& g, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw parameter_error("hilbert_op", "pairing needs 0 <= r < 1");
  const double r2 = r * r;
  const PowerSeries Rg = detail::pairing_kernel(g, spec.alpha(), r2);
  const auto& c = Rg.coeffs();
  return integrate(
      spec.measure(),
      [&](double t, double omt) -> cplx {
        return horner(c, cplx(r2 * t)) * std::conj(value_at_complex(f, t, omt));
      },
      spec.quadrature());
}

struct PairingLimit {
  std::vector<std::pair<int, cplx>> values;  // (j, pairing at r = 1 - 2^{-j})
  cplx limit;
  bool monotone = false;
  bool extrapolated = false;
  bool diverging = false;
  double growth = 1.0;  // |v_J| / |v_{J-1}|
};

/// Pairing along r = 1 - 2^{-j}, j = 1..jmax; Richardson step when the moduli move monotonically.
inline PairingLimit dual_pairing_limit(const OperatorSpec& spec, const PowerSeries& f, const PowerSeries& g,
                                       int jmax = 20) {
  PairingLimit out;
  for (int j = 1; j <= jmax; ++j) out.values.emplace_back(j, dual_pairing(spec, f, g, 1.0 - std::ldexp(1.0, -j)));
  const std::size_t n = out.values.size();
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = std::abs(out.values[i - 1].second), b = std::abs(out.values[i].second);
    inc = inc && b >= a;
    dec = dec && b <= a;
  }
  out.monotone = inc || dec;
  const cplx vJ = out.values[n - 1].second, vJ1 = out.values[n - 2].second;
  out.growth = std::abs(vJ1) > 0.0 ? std::abs(vJ) / std::abs(vJ1) : 1.0;
  bool grow = n >= 5;
  for (std::size_t i = n - 4; grow && i < n; ++i)
    grow = std::abs(out.values[i].second) >= 1.5 * std::abs(out.values[i - 1].second);
  out.diverging = grow;
  if (out.monotone && !out.diverging) {
    out.limit = 2.0 * vJ - vJ1;
    out.extrapolated = true;
  } else {
    out.limit = vJ;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Hilbert-Schmidt diagnostics

struct HsSum {
  double value = 0.0;
  double previous = 0.0;  // at K / 2
  double growth = 1.0;
  bool diverging = false;
};

namespace detail {

// sum_{k<=K} (k+1) sum_{n<=K} G(n)^2/(n+1) mu_{n+k}^2, grouped by m = n + k with prefix sums;
// the Gamma weights are carried in log space.
inline double hs_sum_from_moments(const std::vector<double>& mom, double alpha, std::size_t K) {
  std::vector<double> lw(K + 1);
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n <= K; ++n) {
    lw[n] = 2.0 * log_gamma_ratio(n, alpha) - std::log(static_cast<double>(n + 1));
    lmax = std::max(lmax, lw[n]);
  }
  // prefix sums W(n) = sum w_j, V(n) = sum j w_j with w scaled by e^{-lmax}
  std::vector<double> W(K + 2, 0.0), V(K + 2, 0.0);
  for (std::size_t n = 0; n <= K; ++n) {
    const double w = std::exp(lw[n] - lmax);
    W[n + 1] = W[n] + w;
    V[n + 1] = V[n] + static_cast<double>(n) * w;
  }
  double total = 0.0;
  for (std::size_t m = 0; m <= 2 * K; ++m) {
    if (mom[m] == 0.0) continue;
    // n ranges over [max(0, m-K), min(m, K)], with weight (m - n + 1) w_n
    const std::size_t lo = m > K ? m - K : 0, hi = std::min(m, K);
    const double sw = W[hi + 1] - W[lo], sv = V[hi + 1] - V[lo];
    const double inner = static_cast<double>(m + 1) * sw - sv;
    if (inner <= 0.0) continue;
    total += std::exp(std::log(inner) + lmax + 2.0 * std::log(std::fabs(mom[m])));
  }
  return total;
}

}  // namespace detail

/// Truncated sum of ||H(e_k)||^2_{A^2} over the orthonormal basis (k+1)^{1/2} z^k, k <= K,
/// with the growth factor against K / 2.
inline HsSum hs_sum(const OperatorSpec& spec, std::size_t K) {
  spec.require_gate();
  if (K < 2) throw parameter_error("hilbert_op", "hs_sum needs K >= 2");
  const std::vector<double> mom =
      2 * K <= spec.moments().size() - 1 && !spec.moments().empty() ? spec.moments() : moment_table(spec.measure(), 2 * K);
  HsSum r;
  r.value = detail::hs_sum_from_moments(mom, spec.alpha(), K);
  r.previous = detail::hs_sum_from_moments(mom, spec.alpha(), K / 2);
  r.growth = r.previous > 0.0 ? r.value / r.previous : 1.0;
  r.diverging = r.growth >= 1.5;
  return r;
}

struct HsIntegral {
  double value = 0.0;      // double integral of (1 - t s)^{-(2+2 alpha)}
  double tail_form = 0.0;  // int mu([t,1)) (1-t)^{-(2+2 alpha)} dmu(t)
  bool finite = true;
};

/// Double integral by nested quadrature (exact for atoms), with the tail form alongside.
inline HsIntegral hs_integral(const OperatorSpec& spec) {
  const Measure& mu = spec.measure();
  const double e = 2.0 + 2.0 * spec.alpha();
  HsIntegral r;
  try {
    r.value = integrate(
        mu,
        [&](double t, double omt) {
          return integrate(
              mu, [&](double, double oms) { return detail::neg_power(omt + t * oms, e); }, spec.quadrature());
        },
        spec.quadrature());
  } catch (const divergence_error&) {
    r.value = std::numeric_limits<double>::infinity();
  }
  const IntegrabilityResult tf = tail_integrability(mu, e);
  r.tail_form = tf.finite() ? tf.value : std::numeric_limits<double>::infinity();
  r.finite = std::isfinite(r.value) && tf.status != Finiteness::infinite;
  return r;
}

}  // namespace hilbop
