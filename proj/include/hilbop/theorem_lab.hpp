#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

#include "hilbop/hilbert_op.hpp"
#include "hilbop/measure.hpp"
#include "hilbop/norms.hpp"
#include "hilbop/series.hpp"

namespace hilbop {

enum class TheoremId { T3_1, T3_2, T3_4, T3_5, T4_1a, T4_1b, T4_4a, T4_4b, T4_4c, T4_8, T4_10, T4_11, T4_12, C3_3, C4_3, C4_9 };

inline constexpr TheoremId all_theorem_ids[] = {
    TheoremId::T3_1,  TheoremId::T3_2,  TheoremId::T3_4,  TheoremId::T3_5, TheoremId::T4_1a, TheoremId::T4_1b,
    TheoremId::T4_4a, TheoremId::T4_4b, TheoremId::T4_4c, TheoremId::T4_8, TheoremId::T4_10, TheoremId::T4_11,
    TheoremId::T4_12, TheoremId::C3_3,  TheoremId::C4_3,  TheoremId::C4_9};

inline const char* to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T3_1: return "T3.1";
    case TheoremId::T3_2: return "T3.2";
    case TheoremId::T3_4: return "T3.4";
    case TheoremId::T3_5: return "T3.5";
    case TheoremId::T4_1a: return "T4.1a";
    case TheoremId::T4_1b: return "T4.1b";
    case TheoremId::T4_4a: return "T4.4a";
    case TheoremId::T4_4b: return "T4.4b";
    case TheoremId::T4_4c: return "T4.4c";
    case TheoremId::T4_8: return "T4.8";
    case TheoremId::T4_10: return "T4.10";
    case TheoremId::T4_11: return "T4.11";
    case TheoremId::T4_12: return "T4.12";
    case TheoremId::C3_3: return "C3.3";
    case TheoremId::C4_3: return "C4.3";
    default: return "C4.9";
  }
}

inline std::optional<TheoremId> parse_theorem_id(std::string_view s) {
  for (TheoremId id : all_theorem_ids)
    if (s == to_string(id)) return id;
  return std::nullopt;
}

/// Which operator property a theorem characterizes.
enum class Property { boundedness, compactness, hilbert_schmidt, monotonicity };

inline Property property_of(TheoremId id) {
  switch (id) {
    case TheoremId::T3_2:
    case TheoremId::T4_10: return Property::compactness;
    case TheoremId::T4_12: return Property::hilbert_schmidt;
    case TheoremId::C3_3:
    case TheoremId::C4_3:
    case TheoremId::C4_9: return Property::monotonicity;
    default: return Property::boundedness;
  }
}

enum class Prediction { bounded, unbounded, compact, not_compact, hilbert_schmidt, not_hilbert_schmidt, not_applicable };

inline const char* to_string(Prediction p) {
  switch (p) {
    case Prediction::bounded: return "bounded";
    case Prediction::unbounded: return "unbounded";
    case Prediction::compact: return "compact";
    case Prediction::not_compact: return "not_compact";
    case Prediction::hilbert_schmidt: return "hilbert_schmidt";
    case Prediction::not_hilbert_schmidt: return "not_hilbert_schmidt";
    default: return "not_applicable";
  }
}

inline std::optional<Prediction> parse_prediction(std::string_view s) {
  for (Prediction p : {Prediction::bounded, Prediction::unbounded, Prediction::compact, Prediction::not_compact,
                       Prediction::hilbert_schmidt, Prediction::not_hilbert_schmidt, Prediction::not_applicable})
    if (s == to_string(p)) return p;
  return std::nullopt;
}

/// holds for bounded / compact / hilbert_schmidt, fails for their negations.
inline Verdict prediction_verdict(Prediction p) {
  switch (p) {
    case Prediction::bounded:
    case Prediction::compact:
    case Prediction::hilbert_schmidt: return Verdict::holds;
    case Prediction::not_applicable: return Verdict::inconclusive;
    default: return Verdict::fails;
  }
}

enum class Agreement { agree, disagree, inconclusive };

inline const char* to_string(Agreement a) {
  switch (a) {
    case Agreement::agree: return "agree";
    case Agreement::disagree: return "disagree";
    default: return "inconclusive";
  }
}

inline Agreement agreement_of(Verdict a, Verdict b) {
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Agreement::inconclusive;
  return a == b ? Agreement::agree : Agreement::disagree;
}

struct TheoremCase {
  std::string label;
  TheoremId theorem = TheoremId::T4_8;
  double alpha = 0.0;
  double p = 1.0;
  double q = 1.0;
  double gamma = 0.0;
  double alpha_prime = 0.0;  // corollaries: the smaller parameter
  Measure measure;
  std::string measure_text;
  Prediction prediction = Prediction::not_applicable;
  bool predicate_only = false;
  double exponent_shift = 0.0;  // added to the predicate's exponent; zero except in the seeded failure case

  bool expected_inconclusive() const { return prediction == Prediction::not_applicable; }
};

/// Throws parameter_error when the parameters violate the theorem's hypotheses.
inline void validate_case(const TheoremCase& c) {
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw parameter_error("theorem_lab", std::string(to_string(c.theorem)) + ": " + what);
  };
  need(c.alpha > -1.0, "alpha must exceed -1");
  const double a = c.alpha;
  switch (c.theorem) {
    case TheoremId::T3_1: need(a > 1.0, "needs alpha > 1"); break;
    case TheoremId::T3_2: need(a < 1.0, "needs -1 < alpha < 1"); break;
    case TheoremId::T3_4:
      need(c.p > 1.0, "needs 1 < p");
      need(a + 1.0 - 2.0 / c.p > 0.0, "needs alpha + 1 - 2/p > 0");
      need(c.gamma > 1.0 + 1.0 / c.p, "needs gamma > 1 + 1/p");
      break;
    case TheoremId::T3_5:
      need(c.p > 1.0, "needs 1 < p");
      need(a + 1.0 - 2.0 / c.p > 0.0, "needs alpha + 1 - 2/p > 0");
      break;
    case TheoremId::T4_1a: need(c.p > 0.0 && c.p <= 1.0 && a > 1.0, "needs 0 < p <= 1 and alpha > 1"); break;
    case TheoremId::T4_1b: need(c.p > 0.0 && c.p <= 1.0 && a < 1.0, "needs 0 < p <= 1 and alpha < 1"); break;
    case TheoremId::T4_4a:
    case TheoremId::T4_4b:
    case TheoremId::T4_4c: {
      need(c.p > 0.0 && c.p <= 1.0 && c.q > 1.0, "needs 0 < p <= 1 < q");
      const double g = a + 1.0 - 2.0 / c.q;
      if (c.theorem == TheoremId::T4_4a) need(g > 0.0, "needs alpha + 1 - 2/q > 0");
      if (c.theorem == TheoremId::T4_4b) need(g < 0.0, "needs alpha + 1 - 2/q < 0");
      if (c.theorem == TheoremId::T4_4c) need(std::fabs(g) < 1e-12, "needs alpha + 1 = 2/q");
      break;
    }
    case TheoremId::T4_8:
    case TheoremId::T4_10: need(c.p > 0.0, "needs p > 0"); break;
    case TheoremId::T4_11: need(c.p >= 1.0 && c.p <= 2.0 && a > 1.0, "needs 1 <= p <= 2 and alpha > 1"); break;
    case TheoremId::T4_12: need(a != 0.0, "needs alpha != 0"); break;
    case TheoremId::C3_3:
    case TheoremId::C4_9:
      need(c.alpha_prime > -1.0 && c.alpha_prime < a, "needs -1 < alpha' < alpha");
      break;
    case TheoremId::C4_3:
      need(c.alpha_prime > -1.0 && c.alpha_prime < a, "needs -1 < alpha' < alpha");
      need(c.p > 0.0 && c.p <= 1.0, "needs 0 < p <= 1");
      break;
  }
}

struct PredicateResult {
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
};

namespace detail {

inline Verdict finiteness_verdict(const IntegrabilityResult& r) {
  return r.status == Finiteness::finite     ? Verdict::holds
         : r.status == Finiteness::infinite ? Verdict::fails
                                            : Verdict::inconclusive;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline Space source_space(const TheoremCase& c) {
  switch (c.theorem) {
    case TheoremId::T3_1:
    case TheoremId::T3_2:
    case TheoremId::T3_4:
    case TheoremId::T3_5:
    case TheoremId::C3_3: return Space::bloch();
    case TheoremId::T4_12:
    case TheoremId::C4_9: return Space::hankel_a2();
    default: return Space::bergman(c.p);
  }
}

inline PredicateResult carleson_predicate(const Measure& mu, double s, double gamma, bool vanishing,
                                          const char* what) {
  const CarlesonReport r = carleson_classify(mu, {s, gamma, vanishing});
  std::string d = std::string(what) + " " + fmt(s) + (gamma > 0.0 ? " (log power " + fmt(gamma) + ")" : "") +
                  ": " + to_string(r.verdict);
  return {r.verdict, d};
}

/// B -> A^1 boundedness at any alpha: the integrability condition for alpha > 1, the gate alone below 1.
inline PredicateResult bloch_a1_bounded(const Measure& mu, double alpha, double shift) {
  if (alpha < 1.0) {
    const GateResult g = gate_check(mu, Space::bloch());
    return {g.verdict, std::string("log-integrability gate: ") + to_string(g.verdict)};
  }
  if (alpha == 1.0) return {Verdict::inconclusive, "alpha = 1 is not covered"};
  const auto r = integrability_check(mu, alpha - 1.0 + shift, 1.0);
  return {finiteness_verdict(r), "int log(e/(1-t)) (1-t)^{-" + fmt(alpha - 1.0 + shift) + "} dmu " + to_string(r.status)};
}

/// A^p -> A^1 boundedness for 0 < p <= 1 and any alpha.
inline PredicateResult ap_a1_bounded(const Measure& mu, double p, double alpha, double shift) {
  const double s = alpha > 1.0 ? 2.0 / p + alpha - 1.0 : 2.0 / p;
  return carleson_predicate(mu, s + shift, 0.0, false, "Carleson exponent");
}

inline PredicateResult hs_condition(const Measure& mu, double alpha, double shift) {
  if (alpha < 0.0) return {Verdict::holds, "negative alpha: Hilbert-Schmidt under the gate"};
  const auto r = tail_integrability(mu, 2.0 + 2.0 * alpha + shift);
  return {finiteness_verdict(r),
          "int mu([t,1)) (1-t)^{-" + fmt(2.0 + 2.0 * alpha + shift) + "} dmu " + to_string(r.status)};
}

}  // namespace detail

struct MonotonicityResult {
  Verdict at_alpha = Verdict::inconclusive;
  Verdict at_alpha_prime = Verdict::inconclusive;
  Verdict implication = Verdict::inconclusive;  // holds when "passes at alpha" implies "passes at alpha'"
  std::string detail;
};

enum class MonotonicityContext { bloch_to_a1, ap_to_a1, hilbert_schmidt };

/// Runs the boundedness (or Hilbert-Schmidt) predicate at alpha and at alpha' < alpha and evaluates the
/// implication. p is used by the A^p context only.
inline MonotonicityResult monotonicity_check(const Measure& mu, double alpha, double alpha_prime,
                                             MonotonicityContext ctx, double p = 1.0, double shift = 0.0) {
  if (!(alpha_prime > -1.0 && alpha_prime < alpha))
    throw parameter_error("theorem_lab", "monotonicity needs -1 < alpha' < alpha");
  auto pred = [&](double a, double sh) {
    switch (ctx) {
      case MonotonicityContext::bloch_to_a1: return detail::bloch_a1_bounded(mu, a, sh);
      case MonotonicityContext::ap_to_a1: return detail::ap_a1_bounded(mu, p, a, sh);
      default: return detail::hs_condition(mu, a, sh);
    }
  };
  const PredicateResult hi = pred(alpha, shift), lo = pred(alpha_prime, 0.0);
  MonotonicityResult r;
  r.at_alpha = hi.verdict;
  r.at_alpha_prime = lo.verdict;
  r.detail = "alpha " + detail::fmt(alpha) + ": " + hi.detail + "; alpha' " + detail::fmt(alpha_prime) + ": " + lo.detail;
  if (hi.verdict == Verdict::fails)
    r.implication = Verdict::holds;
  else if (hi.verdict == Verdict::inconclusive || lo.verdict == Verdict::inconclusive)
    r.implication = Verdict::inconclusive;
  else
    r.implication = lo.verdict == Verdict::holds ? Verdict::holds : Verdict::fails;
  return r;
}

/// The measure condition that each theorem pairs with its operator property.
inline PredicateResult predicate(const TheoremCase& c) {
  validate_case(c);
  const Measure& mu = c.measure;
  const double a = c.alpha, p = c.p, sh = c.exponent_shift;

  switch (c.theorem) {
    case TheoremId::C3_3:
    case TheoremId::C4_3:
    case TheoremId::C4_9: {
      const auto ctx = c.theorem == TheoremId::C3_3   ? MonotonicityContext::bloch_to_a1
                       : c.theorem == TheoremId::C4_3 ? MonotonicityContext::ap_to_a1
                                                      : MonotonicityContext::hilbert_schmidt;
      const auto m = monotonicity_check(mu, a, c.alpha_prime, ctx, p, sh);
      return {m.implication, m.detail};
    }
    default: break;
  }

  const GateResult gate = gate_check(mu, detail::source_space(c));
  if (gate.verdict != Verdict::holds)
    return {gate.verdict, std::string("well-definedness gate on ") + gate.space.name() + ": " + to_string(gate.verdict)};

  auto hypothesis = [&](double s, const char* what) -> std::optional<PredicateResult> {
    const CarlesonReport r = carleson_classify(mu, {s, 0.0, false});
    if (r.verdict == Verdict::holds) return std::nullopt;
    return PredicateResult{Verdict::inconclusive,
                           std::string("hypothesis ") + what + " " + detail::fmt(s) + "-Carleson " + to_string(r.verdict)};
  };

  switch (c.theorem) {
    case TheoremId::T3_1: return detail::bloch_a1_bounded(mu, a, sh);
    case TheoremId::T3_2: return {Verdict::holds, "log-integrability gate holds"};
    case TheoremId::T3_4: {
      auto r = detail::carleson_predicate(mu, a + 1.0 - 2.0 / p + sh, c.gamma, false, "log-Carleson exponent");
      if (r.verdict == Verdict::fails) r = {Verdict::inconclusive, r.detail + " (sufficient condition only)"};
      return r;
    }
    case TheoremId::T3_5: {
      auto r = detail::carleson_predicate(mu, a + 1.0 - 2.0 / p + sh, 1.0, false, "log-Carleson exponent");
      if (r.verdict == Verdict::holds) r = {Verdict::inconclusive, r.detail + " (necessary condition only)"};
      return r;
    }
    case TheoremId::T4_1a: return detail::carleson_predicate(mu, 2.0 / p + a - 1.0 + sh, 0.0, false, "Carleson exponent");
    case TheoremId::T4_1b: return detail::carleson_predicate(mu, 2.0 / p + sh, 0.0, false, "Carleson exponent");
    case TheoremId::T4_4a: {
      if (auto h = hypothesis(2.0 / p, "")) return *h;
      const double qprime_term = 2.0 * (1.0 - 1.0 / c.q);
      return detail::carleson_predicate(mu, 2.0 / p + qprime_term + a - 1.0 + sh, 0.0, false, "Carleson exponent");
    }
    case TheoremId::T4_4b:
      if (auto h = hypothesis(2.0 / p + sh, "")) return *h;
      return {Verdict::holds, "alpha + 1 < 2/q with the Carleson hypothesis"};
    case TheoremId::T4_4c: {
      if (auto h = hypothesis(2.0 / p, "")) return *h;
      auto r = detail::carleson_predicate(mu, 2.0 / p + sh, 1.0 / c.q, false, "log-Carleson exponent");
      if (r.verdict == Verdict::fails) r = {Verdict::inconclusive, r.detail + " (sufficient condition only)"};
      return r;
    }
    case TheoremId::T4_8: return detail::carleson_predicate(mu, 2.0 / p + a + 1.0 + sh, 0.0, false, "Carleson exponent");
    case TheoremId::T4_10:
      return detail::carleson_predicate(mu, 2.0 / p + a + 1.0 + sh, 0.0, true, "vanishing Carleson exponent");
    case TheoremId::T4_11: {
      if (auto h = hypothesis((2.0 - (p - 1.0) * (p - 1.0)) / p, "")) return *h;
      return detail::carleson_predicate(mu, a + 1.0 + sh, 0.0, false, "Carleson exponent");
    }
    case TheoremId::T4_12: return detail::hs_condition(mu, a, sh);
    default: return {Verdict::inconclusive, "unsupported"};
  }
}

// ---------------------------------------------------------------------------------------------
// growth experiments

struct ExperimentOptions {
  int j_min = 3;
  int j_max = 12;
  double eps_slope = 0.1;
  double decay_fraction = 0.2;  // compactness: final ratio below this fraction of the max
  int radial_order = 10;
  int angular_order = 10;
  int extra_depth = 8;
  int hs_j_min = 8;  // Hilbert-Schmidt sums at K = 2^j
  int hs_j_max = 14;
};

struct SweepPoint {
  int j = 0;
  double parameter = 0.0;
  double source_norm = 0.0;
  double target_norm = 0.0;
  double ratio = 0.0;
};

struct ExperimentResult {
  Verdict predicate_verdict = Verdict::inconclusive;
  std::string predicate_detail;
  Verdict empirical_verdict = Verdict::inconclusive;
  double empirical_exponent = std::numeric_limits<double>::quiet_NaN();  // log2 R_j per j step
  double half_width = std::numeric_limits<double>::quiet_NaN();          // 95% confidence half-width
  double max_residual = 0.0;
  std::vector<SweepPoint> sweep;
  bool ran = false;
  bool gate_blocked = false;
  Agreement agreement = Agreement::inconclusive;
  std::string note;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;
  double max_residual = 0.0;
};

/// Least-squares line through (x_i, y_i) with a Student-t 95% half-width on the slope.
inline SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw parameter_error("theorem_lab", "slope fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
    f.max_residual = std::max(f.max_residual, std::fabs(r));
  }
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.half_width = tq * std::sqrt(ss / (n - 2) / sxx);
  return f;
}

namespace detail {

enum class Target { a_q, bloch };

inline AreaBudget experiment_budget(const ExperimentOptions& o) {
  AreaBudget b;
  b.refine = false;
  b.radial_order = o.radial_order;
  b.angular_order = o.angular_order;
  b.extra_depth = o.extra_depth;
  return b;
}

inline std::pair<Target, double> target_of(const TheoremCase& c) {
  switch (c.theorem) {
    case TheoremId::T3_4:
    case TheoremId::T3_5:
    case TheoremId::T4_11: return {Target::a_q, c.p};
    case TheoremId::T4_4a:
    case TheoremId::T4_4b:
    case TheoremId::T4_4c: return {Target::a_q, c.q};
    case TheoremId::T4_8:
    case TheoremId::T4_10: return {Target::bloch, 0.0};
    default: return {Target::a_q, 1.0};
  }
}

struct SourceSample {
  double norm = 0.0;
  std::function<double(double, double)> value;  // f(t) given (t, 1-t)
};

// Normalized test functions: log kernels (Bloch), monomials z^{2^j} (Bloch, compactness) and
// (1-a^2)^{2/p} / (1-az)^{4/p} (A^p).
inline SourceSample source_sample(const TheoremCase& c, int j, double a, const AreaBudget& b) {
  SourceSample s;
  if (source_space(c).kind == SpaceKind::bloch) {
    if (property_of(c.theorem) == Property::compactness) {
      const std::size_t n = std::size_t{1} << j;
      s.norm = bloch_norm(PowerSeries::monomial(n, n)).value;
      s.value = [n](double t, double) { return std::pow(t, static_cast<double>(n)); };
    } else {
      const LogKernel fam{a};
      s.norm = bloch_norm_radial_fn(FamilyFunction{fam}, 1.0).value;
      s.value = [fam](double, double omt) { return *closed_form_real(fam, omt); };
    }
  } else {
    const PowerKernel fam{a, 2.0 / c.p, 4.0 / c.p};
    s.norm = ap_norm_fn(FamilyFunction{fam}, c.p, b).value;
    s.value = [fam](double, double omt) { return *closed_form_real(fam, omt); };
  }
  return s;
}

inline void norm_sweep(const TheoremCase& c, const OperatorSpec& spec, const ExperimentOptions& o,
                       ExperimentResult& r) {
  const AreaBudget b = experiment_budget(o);
  const auto [target, q] = target_of(c);
  for (int j = o.j_min; j <= o.j_max; ++j) {
    const double a = 1.0 - std::ldexp(1.0, -j);
    const SourceSample src = source_sample(c, j, a, b);
    const ImageFunction img = image_function(spec, src.value);
    const double tgt = target == Target::bloch ? bloch_norm_radial_fn(img, img.value_real(0.0, 1.0)).value
                                               : ap_norm_fn(img, q, b, j + o.extra_depth).value;
    r.sweep.push_back({j, a, src.norm, tgt, tgt / src.norm});
  }
}

inline void hs_sweep(const OperatorSpec& spec, const ExperimentOptions& o, ExperimentResult& r) {
  for (int j = o.hs_j_min; j <= o.hs_j_max; ++j) {
    const HsSum s = hs_sum(spec, std::size_t{1} << j);
    r.sweep.push_back({j, std::ldexp(1.0, j), 0.0, s.value, s.value});
  }
}

inline void fit_sweep(ExperimentResult& r) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.sweep.size(); ++i) {
    x.push_back(r.sweep[i].j);
    y.push_back(std::log2(r.sweep[i].ratio));
  }
  const SlopeFit f = fit_slope(x, y);
  r.empirical_exponent = f.slope;
  r.half_width = f.half_width;
  r.max_residual = f.max_residual;
}

}  // namespace detail

/// Runs the predicate and, unless the case is predicate-only, the normalized-family growth experiment,
/// then compares the two sides. Corollary cases compare the predicate implication at alpha and alpha'.
inline ExperimentResult growth_experiment(const TheoremCase& c, const ExperimentOptions& o = {}) {
  ExperimentResult r;
  const PredicateResult pr = predicate(c);
  r.predicate_verdict = pr.verdict;
  r.predicate_detail = pr.detail;

  const Property prop = property_of(c.theorem);
  if (prop == Property::monotonicity) {
    r.agreement = pr.verdict == Verdict::holds   ? Agreement::agree
                  : pr.verdict == Verdict::fails ? Agreement::disagree
                                                 : Agreement::inconclusive;
    r.note = "implication check";
    return r;
  }
  if (c.predicate_only) {
    r.agreement = agreement_of(pr.verdict, prediction_verdict(c.prediction));
    r.note = "predicate-only";
    return r;
  }

  const OperatorSpec spec(c.measure, c.alpha, 16, detail::source_space(c));
  if (spec.gate()->verdict == Verdict::fails) {
    r.gate_blocked = true;
    r.empirical_verdict = Verdict::fails;
    r.note = "unbounded-by-gate";
    r.agreement = agreement_of(r.predicate_verdict, r.empirical_verdict);
    return r;
  }
  if (spec.gate()->verdict == Verdict::inconclusive) {
    r.note = "gate inconclusive";
    return r;
  }

  r.ran = true;
  if (prop == Property::hilbert_schmidt) {
    detail::hs_sweep(spec, o, r);
    // increments S_K - S_{K/2} scale like K^lambda on both sides of the boundary; the sum diverges iff lambda >= 0
    std::vector<double> x, y;
    for (std::size_t i = r.sweep.size() - 4; i < r.sweep.size(); ++i) {
      x.push_back(r.sweep[i].j);
      y.push_back(std::log2(std::max(r.sweep[i].ratio - r.sweep[i - 1].ratio, 1e-300)));
    }
    const SlopeFit f = fit_slope(x, y);
    r.empirical_exponent = f.slope;
    r.half_width = f.half_width;
    r.max_residual = f.max_residual;
    if (std::fabs(f.slope) > std::max(o.eps_slope, f.half_width))
      r.empirical_verdict = f.slope > 0.0 ? Verdict::fails : Verdict::holds;
    const double growth = r.sweep.back().ratio / r.sweep[r.sweep.size() - 2].ratio;
    r.note = "hs_sum growth per K doubling " + detail::fmt(growth);
  } else {
    detail::norm_sweep(c, spec, o, r);
    detail::fit_sweep(r);
    if (prop == Property::compactness) {
      const std::size_t n = r.sweep.size();
      bool decreasing = n >= 4;
      for (std::size_t i = n - 3; decreasing && i < n; ++i)
        if (!(r.sweep[i].ratio < r.sweep[i - 1].ratio)) decreasing = false;
      double mx = 0.0;
      for (const auto& s : r.sweep) mx = std::max(mx, s.ratio);
      if (decreasing && r.sweep.back().ratio < o.decay_fraction * mx)
        r.empirical_verdict = Verdict::holds;
      else if (r.empirical_exponent > -o.eps_slope)
        r.empirical_verdict = Verdict::fails;
      r.note = "final/max ratio " + detail::fmt(r.sweep.back().ratio / mx);
    } else if (std::fabs(r.empirical_exponent - o.eps_slope) <= r.half_width) {
      r.note = "slope interval contains the threshold";
    } else {
      r.empirical_verdict = r.empirical_exponent > o.eps_slope ? Verdict::fails : Verdict::holds;
    }
  }
  r.agreement = agreement_of(r.predicate_verdict, r.empirical_verdict);
  return r;
}

// ---------------------------------------------------------------------------------------------
// bundled cases and the suite runner

/// c (1-t)^{sigma-1} log^delta(e/(1-t)) dt with a readable description.
inline std::pair<Measure, std::string> power_density_case(double sigma, double delta = 0.0) {
  std::string text = "(1-t)^" + detail::fmt(sigma - 1.0);
  if (delta != 0.0) text += " log^" + detail::fmt(delta) + "(e/(1-t))";
  return {Measure::power(sigma - 1.0, 1.0, delta), text + " dt"};
}

inline TheoremCase make_case(TheoremId id, double alpha, double sigma, Prediction pred, double p = 1.0,
                             double q = 1.0, double gamma = 0.0, double delta = 0.0, double alpha_prime = 0.0) {
  TheoremCase c;
  c.theorem = id;
  c.alpha = alpha;
  c.p = p;
  c.q = q;
  c.gamma = gamma;
  c.alpha_prime = alpha_prime;
  std::tie(c.measure, c.measure_text) = power_density_case(sigma, delta);
  c.prediction = pred;
  std::ostringstream os;
  os << to_string(id) << "/alpha=" << alpha;
  if (id == TheoremId::C3_3 || id == TheoremId::C4_3 || id == TheoremId::C4_9) os << "/alpha'=" << alpha_prime;
  if (detail::source_space(c).kind == SpaceKind::bergman) os << "/p=" << p;
  if (id == TheoremId::T3_4 || id == TheoremId::T3_5) os << "/p=" << p;
  if (id == TheoremId::T4_4a || id == TheoremId::T4_4b || id == TheoremId::T4_4c) os << "/q=" << q;
  os << "/sigma=" << sigma;
  if (delta != 0.0) os << "/log=" << delta;
  c.label = os.str();
  validate_case(c);
  return c;
}

/// 24 cases strictly inside each regime, plus the documented open strip between the log-Carleson
/// sufficient and necessary conditions (expected inconclusive).
inline std::vector<TheoremCase> default_bundle() {
  using T = TheoremId;
  using P = Prediction;
  std::vector<TheoremCase> v;
  v.push_back(make_case(T::T3_1, 2.0, 2.0, P::bounded));
  v.push_back(make_case(T::T3_1, 2.0, 0.5, P::unbounded));
  v.push_back(make_case(T::T3_2, 0.5, 0.5, P::compact));
  v.push_back(make_case(T::C3_3, 2.0, 2.0, P::bounded, 1.0, 1.0, 0.0, 0.0, 1.5));
  v.push_back(make_case(T::T3_4, 1.0, 1.5, P::bounded, 2.0, 1.0, 2.0));
  v.push_back(make_case(T::T3_5, 1.0, 0.5, P::unbounded, 2.0));
  v.push_back(make_case(T::T3_5, 1.0, 1.0, P::not_applicable, 2.0, 1.0, 0.0, -1.25));
  v.push_back(make_case(T::T4_1a, 2.0, 4.0, P::bounded, 1.0));
  v.push_back(make_case(T::T4_1a, 2.0, 2.5, P::unbounded, 1.0));
  v.push_back(make_case(T::T4_1b, 0.5, 3.0, P::bounded, 1.0));
  v.push_back(make_case(T::T4_1b, 0.5, 1.5, P::unbounded, 1.0));
  v.push_back(make_case(T::C4_3, 3.0, 5.0, P::bounded, 1.0, 1.0, 0.0, 0.0, 2.0));
  v.push_back(make_case(T::T4_4a, 1.0, 3.5, P::bounded, 1.0, 2.0));
  v.push_back(make_case(T::T4_4a, 1.0, 2.5, P::unbounded, 1.0, 2.0));
  v.push_back(make_case(T::T4_4b, -0.75, 2.5, P::bounded, 1.0, 4.0));
  TheoremCase c44 = make_case(T::T4_4c, 0.0, 2.5, P::bounded, 1.0, 2.0);
  c44.predicate_only = true;
  v.push_back(c44);
  v.push_back(make_case(T::T4_8, 1.0, 3.5, P::bounded, 2.0));
  v.push_back(make_case(T::T4_8, 1.0, 2.5, P::unbounded, 2.0));
  v.push_back(make_case(T::T4_10, 1.0, 3.5, P::compact, 2.0));
  v.push_back(make_case(T::T4_11, 2.0, 3.5, P::bounded, 2.0));
  v.push_back(make_case(T::T4_11, 2.0, 2.0, P::unbounded, 2.0));
  v.push_back(make_case(T::T4_12, 1.0, 2.5, P::hilbert_schmidt));
  v.push_back(make_case(T::T4_12, 1.0, 1.5, P::not_hilbert_schmidt));
  v.push_back(make_case(T::C4_9, 2.0, 3.5, P::hilbert_schmidt, 1.0, 1.0, 0.0, 0.0, 1.0));
  return v;
}

/// A->B case whose predicate uses an exponent two units too small, so it claims boundedness where the
/// experiment finds growth.
inline TheoremCase seeded_failure_case() {
  TheoremCase c = make_case(TheoremId::T4_8, 1.0, 2.5, Prediction::unbounded, 2.0);
  c.exponent_shift = -2.0;
  c.label += "/misparametrized";
  return c;
}

struct CaseReport {
  TheoremCase input;
  ExperimentResult result;
  std::string error;  // error tag and message when the case threw

  bool matches_prediction() const {
    return error.empty() && result.predicate_verdict == prediction_verdict(input.prediction);
  }
};

struct SuiteReport {
  std::vector<CaseReport> cases;
  int agree = 0;
  int disagree = 0;
  int inconclusive = 0;
  int expected_inconclusive = 0;
  int errors = 0;

  bool success() const { return disagree == 0 && errors == 0; }
  int unexpected_inconclusive() const { return inconclusive - expected_inconclusive; }
};

/// Worker count: HML_THREADS when set to a positive integer, else the hardware concurrency.
inline unsigned suite_threads() {
  if (const char* env = std::getenv("HML_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline CaseReport run_case(const TheoremCase& c, const ExperimentOptions& o = {}) {
  CaseReport rep;
  rep.input = c;
  try {
    rep.result = growth_experiment(c, o);
  } catch (const error& e) {
    rep.error = e.tag() + ": " + e.what();
  } catch (const std::exception& e) {
    rep.error = std::string("theorem_lab/unexpected: ") + e.what();
  }
  return rep;
}

inline SuiteReport run_suite(const std::vector<TheoremCase>& cases, const ExperimentOptions& o = {},
                             unsigned threads = 0) {
  SuiteReport s;
  s.cases.resize(cases.size());
  if (threads == 0) threads = suite_threads();
  threads = std::min<unsigned>(threads, std::max<std::size_t>(cases.size(), 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) s.cases[i] = run_case(cases[i], o);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& c : s.cases) {
    if (!c.error.empty()) {
      ++s.errors;
      continue;
    }
    switch (c.result.agreement) {
      case Agreement::agree: ++s.agree; break;
      case Agreement::disagree: ++s.disagree; break;
      default:
        ++s.inconclusive;
        if (c.input.expected_inconclusive()) ++s.expected_inconclusive;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------------------------
// report writers

namespace detail {

inline nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const CaseReport& c) {
  nlohmann::ordered_json j;
  const TheoremCase& in = c.input;
  const ExperimentResult& r = c.result;
  j["case"] = in.label;
  j["theorem"] = to_string(in.theorem);
  j["alpha"] = in.alpha;
  j["p"] = in.p;
  j["q"] = in.q;
  j["gamma"] = in.gamma;
  if (property_of(in.theorem) == Property::monotonicity) j["alpha_prime"] = in.alpha_prime;
  j["measure"] = in.measure_text;
  j["prediction"] = to_string(in.prediction);
  j["expected_inconclusive"] = in.expected_inconclusive();
  j["predicate_only"] = in.predicate_only;
  j["predicate"] = to_string(r.predicate_verdict);
  j["predicate_detail"] = r.predicate_detail;
  j["empirical"] = to_string(r.empirical_verdict);
  j["slope"] = detail::number_or_null(r.empirical_exponent);
  j["half_width"] = detail::number_or_null(r.half_width);
  j["gate_blocked"] = r.gate_blocked;
  j["agreement"] = c.error.empty() ? to_string(r.agreement) : "error";
  j["note"] = r.note;
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

inline nlohmann::ordered_json to_json(const SuiteReport& s) {
  nlohmann::ordered_json j;
  j["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : s.cases) j["cases"].push_back(to_json(c));
  j["summary"] = {{"total", s.cases.size()},
                  {"agree", s.agree},
                  {"disagree", s.disagree},
                  {"inconclusive", s.inconclusive},
                  {"expected_inconclusive", s.expected_inconclusive},
                  {"errors", s.errors},
                  {"success", s.success()}};
  return j;
}

inline constexpr const char* sweep_csv_header =
    "case,theorem,j,parameter,source_norm,target_norm,ratio,slope,predicate,empirical,agreement";

/// One row per sweep point across all cases; doubles are written with 17 significant digits.
inline void write_sweep_csv(std::ostream& os, const SuiteReport& s) {
  os << sweep_csv_header << '\n';
  const auto old = os.precision(17);
  for (const auto& c : s.cases) {
    for (const auto& p : c.result.sweep) {
      os << c.input.label << ',' << to_string(c.input.theorem) << ',' << p.j << ',' << p.parameter << ','
         << p.source_norm << ',' << p.target_norm << ',' << p.ratio << ',' << c.result.empirical_exponent << ','
         << to_string(c.result.predicate_verdict) << ',' << to_string(c.result.empirical_verdict) << ','
         << to_string(c.result.agreement) << '\n';
    }
  }
  os.precision(old);
}

}  // namespace hilbop
