#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "hilbop/special.hpp"

using namespace hilbop;

namespace {

// Gamma(x + a) / Gamma(x) from Boost in extended precision.
long double boost_delta_ratio(long double x, long double a) {
  return 1.0L / boost::math::tgamma_delta_ratio(x, a);
}

}  // namespace

TEST(GammaRatio, ZeroAlphaIsOne) {
  for (std::size_t n : {0u, 1u, 7u, 1000u, 10000000u}) EXPECT_EQ(gamma_ratio(n, 0.0), 1.0);
}

TEST(GammaRatio, SmallIntegerCase) { EXPECT_NEAR(gamma_ratio(3, 1.0), 4.0, 1e-14); }

TEST(GammaRatio, StirlingLeadingTerm) {
  const double n = 1e4;
  const double lead = std::sqrt(n) / std::tgamma(1.5);
  EXPECT_NEAR(gamma_ratio(10000, 0.5) / lead, 1.0, 1e-3);
}

TEST(GammaRatio, MatchesBoostToTwelveDigits) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ad(-0.95, 6.0);
  const std::size_t ns[] = {0, 1, 2, 5, 17, 100, 999, 12345, 100000, 1000000, 10000000};
  for (std::size_t n : ns) {
    for (int k = 0; k < 12; ++k) {
      const double alpha = ad(rng);
      const long double oracle =
          boost_delta_ratio(static_cast<long double>(n) + 1.0L, alpha) / boost::math::tgamma(1.0L + alpha);
      const double got = gamma_ratio(n, alpha);
      EXPECT_NEAR(got / static_cast<double>(oracle), 1.0, 1e-12) << "n=" << n << " alpha=" << alpha;
    }
  }
}

TEST(GammaRatio, StirlingDeviationBound) {
  for (double alpha : {-0.7, -0.3, 0.25, 0.5, 1.0, 1.7, 3.0}) {
    for (double n : {1e2, 1e3, 1e4}) {
      const double dev =
          std::fabs(gamma_ratio(static_cast<std::size_t>(n), alpha) * std::tgamma(alpha + 1.0) /
                        std::pow(n, alpha) -
                    1.0);
      EXPECT_LE(dev, 5.0 * std::fabs(alpha * (alpha + 1.0)) / n + 1e-10) << alpha << " " << n;
    }
  }
}

TEST(GammaRatio, RejectsAlphaAtOrBelowMinusOne) {
  EXPECT_THROW(gamma_ratio(3, -1.0), parameter_error);
  EXPECT_THROW(gamma_ratio(3, -2.5), parameter_error);
}

TEST(GammaDeltaRatio, NegativeNonIntegerArguments) {
  for (double x : {-2.5, -0.3, 0.7, 3.2}) {
    for (double a : {-1.25, 0.4, 2.0, 3.7}) {
      const double oracle = std::tgamma(x + a) / std::tgamma(x);
      EXPECT_NEAR(gamma_delta_ratio(x, a) / oracle, 1.0, 1e-13) << x << " " << a;
    }
  }
}

TEST(GammaDeltaRatio, LargeArguments) {
  for (double x : {50.0, 1e3, 1e6, 3e7}) {
    for (double a : {-0.5, 0.5, 2.25, 7.0}) {
      const long double oracle = boost_delta_ratio(x, a);
      EXPECT_NEAR(gamma_delta_ratio(x, a) / static_cast<double>(oracle), 1.0, 1e-13);
    }
  }
}

TEST(GammaDeltaRatio, PolesThrow) {
  EXPECT_THROW(gamma_delta_ratio(-2.0, 0.5), parameter_error);
  EXPECT_THROW(gamma_delta_ratio(0.5, -1.5), parameter_error);
  EXPECT_THROW(gamma_delta_ratio(0.0, 1.0), parameter_error);
}

TEST(Beta, MatchesBoost) {
  for (double a : {0.3, 1.0, 2.5, 11.0, 40.0})
    for (double b : {0.5, 1.5, 3.0, 25.0})
      EXPECT_NEAR(beta_fn(a, b) / boost::math::beta(a, b), 1.0, 1e-13);
}
