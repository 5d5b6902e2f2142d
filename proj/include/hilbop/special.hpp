#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace hilbop {

namespace detail {

// Stirling series remainder: log Gamma(z) = (z - 1/2) log z - z + log(2 pi)/2 + stirling_tail(z).
// Truncation error below 1e-17 for z >= 20.
inline double stirling_tail(double z) {
  const double w = 1.0 / (z * z);
  const double s =
      1.0 / 12.0 +
      w * (-1.0 / 360.0 +
           w * (1.0 / 1260.0 +
                w * (-1.0 / 1680.0 + w * (1.0 / 1188.0 + w * (-691.0 / 360360.0)))));
  return s / z;
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
};

// log |Gamma(x + a) / Gamma(x)| together with its sign.
inline SignedLog log_gamma_delta_signed(double x, double a) {
  if (!std::isfinite(x) || !std::isfinite(a))
    throw parameter_error("special", "non-finite Gamma argument");
  if (a == 0.0) return {};
  if (is_nonpositive_integer(x) || is_nonpositive_integer(x + a))
    throw parameter_error("special", "Gamma argument hits a nonpositive integer (x = " +
                                         std::to_string(x) + ", a = " + std::to_string(a) + ")");
  constexpr double threshold = 20.0;
  if (std::min(x, x + a) < -1.0e6)
    throw parameter_error("special", "Gamma argument too negative");

  SignedLog out;
  double lo = x;
  double hi = x + a;
  while (std::min(lo, hi) < threshold) {
    out.log_abs += std::log(std::fabs(lo)) - std::log(std::fabs(hi));
    if ((lo < 0) != (hi < 0)) out.sign = -out.sign;
    lo += 1.0;
    hi += 1.0;
  }
  // lo and hi now both exceed the threshold; hi - lo == a up to rounding of the shifts,
  // so use the shifted lo with the original increment.
  const double X = lo;
  out.log_abs += (X + a - 0.5) * std::log1p(a / X) + a * std::log(X) - a +
                 (stirling_tail(X + a) - stirling_tail(X));
  return out;
}

}  // namespace detail

/// Gamma(x + a) / Gamma(x) for real x, a. Throws parameter_error at poles.
inline double gamma_delta_ratio(double x, double a) {
  const auto r = detail::log_gamma_delta_signed(x, a);
  return r.sign * std::exp(r.log_abs);
}

/// log(Gamma(x + a) / Gamma(x)); requires the ratio to be positive.
inline double log_gamma_delta_ratio(double x, double a) {
  const auto r = detail::log_gamma_delta_signed(x, a);
  if (r.sign < 0) throw parameter_error("special", "log of a negative Gamma ratio");
  return r.log_abs;
}

/// Gamma(n + 1 + alpha) / (Gamma(n + 1) Gamma(alpha + 1)), the coefficient of z^n
/// in (1 - z)^{-(alpha + 1)}.
inline double gamma_ratio(std::size_t n, double alpha) {
  if (!(alpha > -1.0)) throw parameter_error("series_core", "gamma_ratio needs alpha > -1");
  if (alpha == 0.0) return 1.0;
  return std::exp(detail::log_gamma_delta_signed(static_cast<double>(n) + 1.0, alpha).log_abs) /
         std::tgamma(alpha + 1.0);
}

inline double log_gamma_ratio(std::size_t n, double alpha) {
  if (!(alpha > -1.0)) throw parameter_error("series_core", "gamma_ratio needs alpha > -1");
  if (alpha == 0.0) return 0.0;
  return detail::log_gamma_delta_signed(static_cast<double>(n) + 1.0, alpha).log_abs -
         std::lgamma(alpha + 1.0);
}

/// Beta function B(a, b) for positive arguments.
inline double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw parameter_error("special", "beta needs positive arguments");
  // B(a, b) = Gamma(b) / (Gamma(a + b) / Gamma(a))
  if (a >= b) return std::tgamma(b) / gamma_delta_ratio(a, b);
  return std::tgamma(a) / gamma_delta_ratio(b, a);
}

}  // namespace hilbop
