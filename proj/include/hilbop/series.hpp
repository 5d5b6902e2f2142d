#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "special.hpp"

namespace hilbop {

using cplx = std::complex<double>;

inline constexpr std::size_t default_truncation = std::size_t{1} << 14;

/// log(e/(1 - b z)) = 1 + sum_{k>=1} b^k z^k / k
struct LogKernel {
  double b = 0.0;
};
/// (1 - a^2)^beta (1 - a z)^{-exponent}
struct PowerKernel {
  double a = 0.0;
  double beta = 0.0;
  double exponent = 1.0;
};
/// (1 - z)^{-c}
struct Binomial {
  double c = 1.0;
};
struct Custom {};

using Family = std::variant<Custom, LogKernel, PowerKernel, Binomial>;

inline std::string describe(const Family& f) {
  struct V {
    std::string operator()(const Custom&) const { return "custom"; }
    std::string operator()(const LogKernel& k) const { return "log_kernel(" + std::to_string(k.b) + ")"; }
    std::string operator()(const PowerKernel& k) const {
      return "power_kernel(" + std::to_string(k.a) + "," + std::to_string(k.beta) + "," +
             std::to_string(k.exponent) + ")";
    }
    std::string operator()(const Binomial& k) const { return "binomial(" + std::to_string(k.c) + ")"; }
  };
  return std::visit(V{}, f);
}

class PowerSeries {
 public:
  PowerSeries() : coeffs_(2, cplx{}) {}
  explicit PowerSeries(std::vector<cplx> coeffs, Family family = Custom{})
      : coeffs_(std::move(coeffs)), family_(family) {
    if (coeffs_.empty()) throw parameter_error("series_core", "a series needs at least one coefficient");
  }

  static PowerSeries log_kernel(double b, std::size_t N = default_truncation) {
    if (!(std::fabs(b) < 1.0)) throw parameter_error("series_core", "log_kernel needs |b| < 1");
    std::vector<cplx> c(N + 1);
    c[0] = 1.0;
    double bk = 1.0;
    for (std::size_t k = 1; k <= N; ++k) {
      bk *= b;
      c[k] = bk / static_cast<double>(k);
    }
    return PowerSeries(std::move(c), LogKernel{b});
  }

  static PowerSeries power_kernel(double a, double beta, double exponent, std::size_t N = default_truncation) {
    if (!(std::fabs(a) < 1.0)) throw parameter_error("series_core", "power_kernel needs |a| < 1");
    std::vector<cplx> c(N + 1);
    double v = std::pow(1.0 - a * a, beta);
    for (std::size_t k = 0; k <= N; ++k) {
      c[k] = v;
      v *= (static_cast<double>(k) + exponent) / static_cast<double>(k + 1) * a;
    }
    return PowerSeries(std::move(c), PowerKernel{a, beta, exponent});
  }

  static PowerSeries binomial(double c, std::size_t N = default_truncation) {
    std::vector<cplx> co(N + 1);
    double v = 1.0;
    for (std::size_t k = 0; k <= N; ++k) {
      co[k] = v;
      v *= (static_cast<double>(k) + c) / static_cast<double>(k + 1);
    }
    return PowerSeries(std::move(co), Binomial{c});
  }

  static PowerSeries monomial(std::size_t k, std::size_t N, cplx coef = 1.0) {
    if (k > N) throw truncation_error("series_core", "monomial index exceeds truncation");
    std::vector<cplx> c(N + 1);
    c[k] = coef;
    return PowerSeries(std::move(c));
  }

  std::size_t truncation() const { return coeffs_.size() - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : cplx{}; }
  const Family& family() const { return family_; }
  bool is_custom() const { return std::holds_alternative<Custom>(family_); }

  /// Highest index with a nonzero coefficient (0 for the zero series).
  std::size_t degree() const {
    for (std::size_t k = coeffs_.size(); k-- > 0;)
      if (coeffs_[k] != cplx{}) return k;
    return 0;
  }

  bool nonnegative() const {
    for (const auto& c : coeffs_)
      if (c.imag() != 0.0 || c.real() < 0.0) return false;
    return true;
  }

  bool real_coefficients() const {
    for (const auto& c : coeffs_)
      if (c.imag() != 0.0) return false;
    return true;
  }

  /// Same closed form at a different truncation (custom series are cut or zero-padded).
  PowerSeries truncated(std::size_t N) const {
    if (auto* k = std::get_if<LogKernel>(&family_)) return log_kernel(k->b, N);
    if (auto* k = std::get_if<PowerKernel>(&family_)) return power_kernel(k->a, k->beta, k->exponent, N);
    if (auto* k = std::get_if<Binomial>(&family_)) return binomial(k->c, N);
    PowerSeries out = *this;
    out.coeffs_.resize(N + 1);
    return out;
  }

  /// Coefficients of f' (custom family).
  PowerSeries derivative() const {
    std::vector<cplx> d(std::max<std::size_t>(coeffs_.size() - 1, 1));
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return PowerSeries(std::move(d));
  }

  PowerSeries scaled(cplx factor) const {
    std::vector<cplx> c = coeffs_;
    for (auto& v : c) v *= factor;
    return PowerSeries(std::move(c));
  }

  friend PowerSeries operator+(const PowerSeries& f, const PowerSeries& g) {
    std::vector<cplx> c(std::max(f.coeffs_.size(), g.coeffs_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = f[k] + g[k];
    return PowerSeries(std::move(c));
  }

 private:
  std::vector<cplx> coeffs_;
  Family family_;
};

// ---------------------------------------------------------------------------------------------
// closed forms of the tagged families

/// f(z) from the family closed form; omz = 1 - z supplied separately for accuracy near z = 1.
inline std::optional<cplx> closed_form(const Family& fam, cplx z, cplx omz) {
  if (auto* k = std::get_if<LogKernel>(&fam)) return 1.0 - std::log((1.0 - k->b) + k->b * omz);
  if (auto* k = std::get_if<PowerKernel>(&fam))
    return std::pow(1.0 - k->a * k->a, k->beta) * std::pow((1.0 - k->a) + k->a * omz, -k->exponent);
  if (auto* k = std::get_if<Binomial>(&fam)) return std::pow(omz, -k->c);
  (void)z;
  return std::nullopt;
}

inline std::optional<double> closed_form_real(const Family& fam, double omt) {
  if (auto* k = std::get_if<LogKernel>(&fam)) return 1.0 - std::log((1.0 - k->b) + k->b * omt);
  if (auto* k = std::get_if<PowerKernel>(&fam))
    return std::pow(1.0 - k->a * k->a, k->beta) * std::pow((1.0 - k->a) + k->a * omt, -k->exponent);
  if (auto* k = std::get_if<Binomial>(&fam)) return std::pow(omt, -k->c);
  return std::nullopt;
}

/// f'(z) from the family closed form.
inline std::optional<cplx> closed_form_derivative(const Family& fam, cplx omz) {
  if (auto* k = std::get_if<LogKernel>(&fam)) return k->b / ((1.0 - k->b) + k->b * omz);
  if (auto* k = std::get_if<PowerKernel>(&fam))
    return std::pow(1.0 - k->a * k->a, k->beta) * k->exponent * k->a *
           std::pow((1.0 - k->a) + k->a * omz, -k->exponent - 1.0);
  if (auto* k = std::get_if<Binomial>(&fam)) return k->c * std::pow(omz, -k->c - 1.0);
  return std::nullopt;
}

// ---------------------------------------------------------------------------------------------
// evaluation

struct EvalResult {
  cplx value;
  double tail_bound = 0.0;
};

template <class Z>
Z horner(const std::vector<cplx>& c, Z z) {
  Z acc{};
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + Z(c[k]);
  return acc;
}

inline double horner_real(const std::vector<cplx>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k].real();
  return acc;
}

/// Bound on sum_{k>N} |a_k| rho^k for the untruncated series behind f.
inline double tail_bound(const PowerSeries& f, double rho) {
  const std::size_t N = f.truncation();
  const double Nd = static_cast<double>(N);
  const double inf = std::numeric_limits<double>::infinity();
  if (auto* k = std::get_if<LogKernel>(&f.family())) {
    const double q = std::fabs(k->b) * rho;
    return std::pow(q, Nd + 1.0) / ((Nd + 1.0) * (1.0 - q));
  }
  auto ratio_tail = [&](double a, double c) {
    // a_{N+1} from a_N by the hypergeometric step, then a geometric majorant.
    const double next = std::abs(f[N]) * std::fabs((Nd + c) / (Nd + 1.0) * a);
    const double q = std::fabs(a) * std::max(1.0, std::fabs(Nd + 1.0 + c) / (Nd + 2.0));
    if (q * rho >= 1.0) return next == 0.0 ? 0.0 : inf;
    return next * std::pow(rho, Nd + 1.0) / (1.0 - q * rho);
  };
  if (auto* k = std::get_if<PowerKernel>(&f.family())) return ratio_tail(k->a, k->exponent);
  if (auto* k = std::get_if<Binomial>(&f.family())) return ratio_tail(1.0, k->c);
  const double aN = std::abs(f[N]);
  if (aN == 0.0 || N == 0) return 0.0;
  const double aprev = std::abs(f[N - 1]);
  const double q = aprev > 0.0 ? aN / aprev : 1.0;
  if (q * rho >= 1.0) return inf;
  return aN * std::pow(rho, Nd) * q * rho / (1.0 - q * rho);
}

/// Horner evaluation with the truncation tail bound. Throws precision_error if tol is
/// given and the bound exceeds it.
inline EvalResult eval(const PowerSeries& f, cplx z, std::optional<double> tol = std::nullopt) {
  const double rho = std::abs(z);
  if (rho > 1.0 - 1e-6) throw parameter_error("series_core", "evaluation needs |z| <= 1 - 1e-6");
  EvalResult r{horner(f.coeffs(), z), tail_bound(f, rho)};
  if (tol && r.tail_bound > *tol)
    throw precision_error("series_core", "truncation tail bound " + std::to_string(r.tail_bound) +
                                             " exceeds tolerance");
  return r;
}

/// f(t) for real t in [0, 1): closed form for tagged families, Horner otherwise.
inline double value_at(const PowerSeries& f, double t, double omt) {
  if (auto v = closed_form_real(f.family(), omt)) return *v;
  return horner_real(f.coeffs(), t);
}

inline cplx value_at_complex(const PowerSeries& f, double t, double omt) {
  if (auto v = closed_form_real(f.family(), omt)) return *v;
  return horner(f.coeffs(), cplx(t));
}

// ---------------------------------------------------------------------------------------------
// coefficient multipliers

struct FracParams {
  double t = 0.0;
  double s = 0.0;
};

inline void check_frac_params(const FracParams& p) {
  auto negint = [](double x) { return x < 0.0 && x == std::floor(x); };
  if (negint(1.0 + p.t) || negint(1.0 + p.t + p.s))
    throw parameter_error("series_core", "fractional parameters hit an excluded integer");
}

/// Gamma(2+t) Gamma(n+2+t+s) / (Gamma(2+t+s) Gamma(n+2+t))
inline double frac_multiplier(std::size_t n, const FracParams& p) {
  if (p.s == 0.0) return 1.0;
  return gamma_delta_ratio(static_cast<double>(n) + 2.0 + p.t, p.s) / gamma_delta_ratio(2.0 + p.t, p.s);
}

inline PowerSeries frac_diff(const PowerSeries& f, const FracParams& p) {
  check_frac_params(p);
  std::vector<cplx> c = f.coeffs();
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= frac_multiplier(n, p);
  return PowerSeries(std::move(c));
}

inline PowerSeries frac_int(const PowerSeries& f, const FracParams& p) {
  check_frac_params(p);
  std::vector<cplx> c = f.coeffs();
  for (std::size_t n = 0; n < c.size(); ++n) c[n] /= frac_multiplier(n, p);
  return PowerSeries(std::move(c));
}

inline PowerSeries hadamard(const PowerSeries& f, const PowerSeries& g) {
  const std::size_t N = std::min(f.truncation(), g.truncation());
  std::vector<cplx> c(N + 1);
  for (std::size_t k = 0; k <= N; ++k) c[k] = f[k] * g[k];
  return PowerSeries(std::move(c));
}

/// Delta_0 f = a_0 + a_1 z; Delta_n f = sum_{k=2^n}^{2^{n+1}-1} a_k z^k.
inline PowerSeries dyadic_block(const PowerSeries& f, unsigned n) {
  if (n >= 60) throw truncation_error("series_core", "dyadic block index too large");
  const std::size_t hi = (std::size_t{1} << (n + 1)) - 1;
  if (hi > f.truncation())
    throw truncation_error("series_core", "dyadic block " + std::to_string(n) + " exceeds truncation " +
                                              std::to_string(f.truncation()));
  const std::size_t lo = n == 0 ? 0 : (std::size_t{1} << n);
  std::vector<cplx> c(hi + 1);
  for (std::size_t k = lo; k <= hi; ++k) c[k] = f[k];
  return PowerSeries(std::move(c));
}

/// Largest n with dyadic_block(f, n) available.
inline unsigned max_block_index(const PowerSeries& f) {
  unsigned n = 0;
  while (((std::size_t{1} << (n + 2)) - 1) <= f.truncation()) ++n;
  return n;
}

namespace detail {
inline double bump_h(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace detail

/// Smooth cutoff: 1 on s <= 1, 0 on s >= 2, C-infinity and decreasing in between.
inline double psi(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double a = detail::bump_h(2.0 - s);
  const double b = detail::bump_h(s - 1.0);
  return a / (a + b);
}

inline double phi(double s) { return psi(s / 2.0) - psi(s); }

/// V_0 = 1 + z; V_n = sum_{k=2^{n-1}}^{2^{n+1}-1} phi(k / 2^{n-1}) z^k.
inline PowerSeries vn_polynomial(unsigned n) {
  if (n == 0) return PowerSeries(std::vector<cplx>{1.0, 1.0});
  if (n >= 60) throw parameter_error("series_core", "V_n index too large");
  const std::size_t lo = std::size_t{1} << (n - 1);
  const std::size_t hi = (std::size_t{1} << (n + 1)) - 1;
  std::vector<cplx> c(hi + 1);
  const double scale = static_cast<double>(lo);
  for (std::size_t k = lo; k <= hi; ++k) c[k] = phi(static_cast<double>(k) / scale);
  return PowerSeries(std::move(c));
}

/// CSV dump: header "index,re,im", one row per coefficient.
inline void write_csv(std::ostream& os, const PowerSeries& f) {
  os << "index,re,im\n";
  os.precision(17);
  for (std::size_t k = 0; k <= f.truncation(); ++k) os << k << ',' << f[k].real() << ',' << f[k].imag() << '\n';
}

}  // namespace hilbop
