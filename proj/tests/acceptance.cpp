// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <boost/math/special_functions/beta.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "hilbop/hilbop.hpp"

using namespace hilbop;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      failures += (failures.empty() ? "" : "; ") + why;
    }
  }
};

PowerSeries random_poly(std::mt19937_64& rng, std::size_t deg, bool complex_coeffs) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(deg + 1);
  for (auto& v : c) v = complex_coeffs ? cplx(nd(rng), nd(rng)) : cplx(nd(rng), 0.0);
  return PowerSeries(std::move(c));
}

cplx random_disk_point(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

PowerSeries ones_block(unsigned n) {
  const std::size_t lo = n == 0 ? 0 : (std::size_t{1} << n), hi = (std::size_t{1} << (n + 1)) - 1;
  std::vector<cplx> c(hi + 1);
  for (std::size_t k = lo; k <= hi; ++k) c[k] = 1.0;
  return PowerSeries(std::move(c));
}

Outcome moments_against_beta() {
  Outcome o;
  const auto t0 = clock_type::now();
  double worst = 0.0;
  for (double kappa : {0.0, 0.5, 1.0, 2.5}) {
    const Measure m = Measure::power(kappa);
    for (std::size_t n = 0; n <= 200; ++n) {
      const double beta = boost::math::beta(static_cast<double>(n) + 1.0, kappa + 1.0);
      worst = std::max(worst, std::fabs(moment(m, n) / beta - 1.0));
    }
  }
  const double dt = seconds_since(t0);
  o.detail << "worst rel err " << worst << ", " << dt << " s";
  o.require(worst <= 1e-10, "relative error");
  o.require(dt < 1.0, "runtime");
  return o;
}

Outcome parseval() {
  Outcome o;
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(20241015);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const PowerSeries f = random_poly(rng, 256, true);
    double s = 0.0;
    for (std::size_t n = 0; n <= f.truncation(); ++n) s += std::norm(f[n]) / static_cast<double>(n + 1);
    const double v = ap_norm(f, 2.0).value;
    worst = std::max(worst, std::fabs(v * v / s - 1.0));
  }
  const double dt = seconds_since(t0);
  o.detail << "worst rel err " << worst << ", " << dt << " s";
  o.require(worst <= 1e-8, "relative error");
  o.require(dt < 10.0, "runtime");
  return o;
}

Outcome dyadic_estimates() {
  Outcome o;
  const auto t0 = clock_type::now();
  double worst_band = 0.0, worst_drift = 0.0;
  for (double p : {1.0, 2.0, 4.0}) {
    std::vector<std::pair<double, double>> s1;
    double drift1 = 0.0;
    for (unsigned n = 3; n <= 10; ++n) {
      const PowerSeries d = ones_block(n);
      const double scale = std::pow(2.0, n * (1.0 - 1.0 / p));
      const double v8 = hp_norm(d, p, 8).value, v16 = hp_norm(d, p, 16).value;
      s1.emplace_back(n, v16 / scale);
      drift1 = std::max(drift1, std::fabs(v16 / v8 - 1.0));
    }
    const auto r1 = make_equivalence_report("block-norm", s1, drift1, 8.0);
    worst_band = std::max(worst_band, r1.band());
    worst_drift = std::max(worst_drift, drift1);
    o.require(r1.verdict == BandVerdict::band_ok, "block norms p=" + std::to_string(p));
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
      const PowerSeries g = PowerSeries::binomial(alpha + 1.0, 2047);
      std::vector<std::pair<double, double>> s2;
      double drift2 = 0.0;
      for (unsigned n = 3; n <= 10; ++n) {
        const double base = hp_norm(ones_block(n), p).value;
        const double v8 = hp_norm(dyadic_block(g, n), p, 8).value;
        const double v16 = hp_norm(dyadic_block(g, n), p, 16).value;
        s2.emplace_back(n, v16 / (std::pow(2.0, n * alpha) * base));
        drift2 = std::max(drift2, std::fabs(v16 / v8 - 1.0));
      }
      const auto r2 = make_equivalence_report("binomial-block", s2, drift2, 8.0);
      worst_band = std::max(worst_band, r2.band());
      worst_drift = std::max(worst_drift, drift2);
      o.require(r2.verdict == BandVerdict::band_ok,
                "binomial blocks p=" + std::to_string(p) + " alpha=" + std::to_string(alpha));
    }
  }
  const double dt = seconds_since(t0);
  o.detail << "worst band " << worst_band << ", worst drift " << worst_drift << ", " << dt << " s";
  o.require(dt < 60.0, "runtime");
  return o;
}

Outcome k1_k2_band() {
  Outcome o;
  const auto rep = k1_k2([](double c, std::size_t N) { return PowerSeries::binomial(c, N); },
                         {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, 2.0, 1.0, std::size_t{1} << 12, 10.0);
  o.detail << "band " << rep.band() << ", drift " << rep.drift;
  o.require(rep.band() <= 10.0, "band");
  o.require(rep.drift < 0.1, "drift");
  o.require(rep.verdict == BandVerdict::band_ok, "verdict");
  return o;
}

Outcome j_regimes() {
  Outcome o;
  int matched = 0, total = 0;
  double worst_exp = 0.0;
  for (double t : {-1.0, -0.3, 0.0, 0.4, 1.2}) {
    for (double delta : {0.0, 0.5, 2.0}) {
      ++total;
      const auto r = j_regime(t, delta);
      const JRegime expect = t < 0 ? JRegime::bounded : (t == 0 ? JRegime::log : JRegime::power);
      if (r.regime == expect) ++matched;
      if (expect == JRegime::power) worst_exp = std::max(worst_exp, std::fabs(r.fitted_exponent + t));
    }
  }
  o.detail << matched << "/" << total << " regimes, worst exponent error " << worst_exp;
  o.require(matched == total, "regime mismatch");
  o.require(worst_exp <= 0.1, "fitted exponent");
  return o;
}

Outcome representation() {
  Outcome o;
  struct Triple {
    Measure mu;
    double alpha;
    PowerSeries f;
  };
  std::mt19937_64 rng(66);
  const Measure mixed({{0.3, 2.0}}, Density{1.0, 2.0, 0.0, {}});
  const Triple cases[] = {
      {Measure({{0.5, 1.0}, {0.8, 0.25}}, std::nullopt), 0.5, PowerSeries::log_kernel(0.7, 1024)},
      {Measure::lebesgue(), 1.0, random_poly(rng, 20, false)},
      {Measure::power(1.0), 2.0, PowerSeries::power_kernel(0.6, 1.0, 2.0, 1024)},
      {Measure::power(3.0), 0.0, PowerSeries::binomial(0.5, 1024)},
      {mixed, -0.5, PowerSeries::log_kernel(0.9, 1024)},
      {Measure::power(1.0, 1.0, -1.0), 1.0, random_poly(rng, 12, false)},
  };
  double worst_rep = 0.0;
  for (const auto& tc : cases) {
    const OperatorSpec s(tc.mu, tc.alpha, 1024, Space::bloch());
    const auto h = hankel_coefficients(s, tc.f);
    for (int i = 0; i < 25; ++i) {
      const cplx z = random_disk_point(rng, 0.9);
      worst_rep = std::max(worst_rep, std::abs(eval(h.coefficients, z).value - apply_integral(s, tc.f, z)));
    }
  }
  o.require(worst_rep <= 1e-7, "representation");

  auto fast_vs_direct = [&](const Measure& mu, std::size_t N, double& worst, double& t_direct, double& t_fft) {
    const OperatorSpec s(mu, 0.7, N);
    std::normal_distribution<double> nd;
    std::vector<cplx> c(N + 1);
    for (auto& v : c) v = cplx(nd(rng), nd(rng));
    const PowerSeries f(c);
    auto t0 = clock_type::now();
    const auto d = hankel_coefficients(s, f, HankelMethod::direct).coefficients;
    t_direct = seconds_since(t0);
    t0 = clock_type::now();
    const auto q = hankel_coefficients(s, f, HankelMethod::fft).coefficients;
    t_fft = seconds_since(t0);
    for (std::size_t n = 0; n <= N; ++n) worst = std::max(worst, std::abs(d[n] - q[n]) / s.gamma_factors()[n]);
  };
  double worst_fft = 0.0, td = 0.0, tf = 0.0;
  for (const Measure& mu : {Measure::power(0.5), Measure::point(0.999, 0.5)})
    fast_vs_direct(mu, std::size_t{1} << 12, worst_fft, td, tf);
  o.require(worst_fft <= 1e-10, "fft vs direct");
  double unused = 0.0;
  fast_vs_direct(Measure::power(0.5), std::size_t{1} << 16, unused, td, tf);
  const double speedup = td / tf;
  o.require(speedup >= 10.0, "speedup");
  o.detail << "worst |series - integral| " << worst_rep << ", worst fft diff " << worst_fft << ", speedup at 2^16 "
           << speedup << " (" << td << " s vs " << tf << " s)";
  return o;
}

Outcome bloch_boundary_sweep() {
  Outcome o;
  const auto t0 = clock_type::now();
  int agree = 0, total = 0, blocked = 0;
  double worst_slope = 0.0;
  for (double p : {1.0, 2.0})
    for (double alpha : {0.0, 1.0}) {
      const double crit = 2.0 / p + alpha + 1.0;
      for (double d : {-1.0, -0.5, 0.5, 1.0}) {
        const Prediction pred = d > 0 ? Prediction::bounded : Prediction::unbounded;
        const TheoremCase c = make_case(TheoremId::T4_8, alpha, crit + d, pred, p);
        const ExperimentResult r = growth_experiment(c);
        ++total;
        if (r.agreement == Agreement::agree) ++agree;
        else o.require(false, c.label + " " + to_string(r.agreement));
        if (r.gate_blocked) {
          ++blocked;
          continue;
        }
        // R_j ~ (1-a)^{sigma - sigma*} with 1-a = 2^{-j}
        const double err = std::fabs(r.empirical_exponent + d);
        worst_slope = std::max(worst_slope, err);
        o.require(err <= 0.15, c.label + " slope " + std::to_string(r.empirical_exponent));
      }
    }
  const double dt = seconds_since(t0);
  o.detail << agree << "/" << total << " agree (" << blocked << " blocked by the source-space gate), worst slope error "
           << worst_slope << ", " << dt << " s";
  o.require(dt < 300.0, "runtime");
  return o;
}

Outcome hilbert_schmidt() {
  Outcome o;
  double lo = 1e300, hi = 0.0;
  for (double a : {0.5, 0.9, 0.99})
    for (double alpha : {0.5, 1.0}) {
      const double w = 0.75;
      const OperatorSpec s(Measure::point(a, w), alpha, 16, Space::hankel_a2());
      const double closed = w * w * std::pow(1.0 - a * a, -(2.0 + 2.0 * alpha));
      const double ratio = hs_sum(s, std::size_t{1} << 12).value / closed;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  o.require(lo >= 0.5 && hi <= 2.0, "atom band");
  // sigma = 0.5 < alpha = 1: the tail integrability condition fails
  const OperatorSpec viol(Measure::power(0.5), 1.0, 16, Space::hankel_a2());
  const double growth = hs_sum(viol, std::size_t{1} << 16).value / hs_sum(viol, std::size_t{1} << 10).value;
  o.require(!tail_integrability(viol.measure(), 4.0).finite(), "condition should fail");
  o.require(growth >= 4.0, "growth");
  o.detail << "atom ratios in [" << lo << ", " << hi << "], growth 2^10 -> 2^16 " << growth;
  return o;
}

Outcome carleson_counterexample() {
  Outcome o;
  const double p = 1.0, alpha = 2.0, s = 2.0 / p + alpha - 1.0;
  const Measure mu = Measure::power(2.0 / p + alpha - 2.0);
  const auto rep = carleson_classify(mu, {s, 0.0, false});
  const auto integ = integrability_check(mu, s, 0.0);
  o.detail << "carleson " << to_string(rep.verdict) << " (sup " << rep.sup_estimate << "), integrability "
           << (integ.status == Finiteness::infinite ? "infinite" : "not infinite");
  o.require(rep.verdict == Verdict::holds, "carleson");
  o.require(integ.status == Finiteness::infinite, "integrability");
  return o;
}

int run_cli_binary(const std::string& args) {
  const std::string cmd = std::string(HILBOP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome regression_suite() {
  Outcome o;
  const auto t0 = clock_type::now();
  const SuiteReport rep = run_suite(default_bundle());
  const double dt = seconds_since(t0);
  o.require(rep.cases.size() == 24, "bundle size");
  o.require(rep.disagree == 0 && rep.errors == 0, "disagreements");
  o.require(rep.unexpected_inconclusive() == 0, "unexpected inconclusive");
  o.require(dt < 600.0, "runtime");
  const int code_default = run_cli_binary("suite --bundle default");
  const int code_seeded = run_cli_binary("suite --bundle seeded-failure");
  o.require(code_default == 0, "default bundle exit status");
  o.require(code_seeded != 0 && code_seeded != -1, "seeded failure exit status");
  o.detail << rep.cases.size() << " cases, agree " << rep.agree << ", disagree " << rep.disagree << ", inconclusive "
           << rep.inconclusive << " (expected " << rep.expected_inconclusive << "), " << dt
           << " s; cli exit default " << code_default << ", seeded-failure " << code_seeded;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"moments-vs-beta", moments_against_beta},
      {"parseval-a2", parseval},
      {"dyadic-block-estimates", dyadic_estimates},
      {"k1-k2-equivalence", k1_k2_band},
      {"j-integral-regimes", j_regimes},
      {"representation-and-fast-hankel", representation},
      {"bloch-target-boundary-sweep", bloch_boundary_sweep},
      {"hilbert-schmidt", hilbert_schmidt},
      {"carleson-not-integrable", carleson_counterexample},
      {"regression-suite", regression_suite},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    if (!out.pass) ++failed;
    std::string text = out.detail.str();
    if (!out.failures.empty()) text += " [failed: " + out.failures + "]";
    std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", index, c.name, text.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
