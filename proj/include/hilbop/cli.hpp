#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hilbop/hilbert_op.hpp"
#include "hilbop/io.hpp"
#include "hilbop/measure.hpp"
#include "hilbop/norms.hpp"
#include "hilbop/series.hpp"
#include "hilbop/theorem_lab.hpp"

namespace hilbop::cli {

enum exit_code : int { ok = 0, verdict = 1, usage = 2 };

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rows with a fixed header. Table mode prints notes and aligned columns; csv and plotdata print the
/// header and rows only.
class Output {
 public:
  explicit Output(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(std::vector<std::string> r) { rows_.push_back(std::move(r)); }
  void note(std::string line) { notes_.push_back(std::move(line)); }
  void footer(std::string line) { footer_.push_back(std::move(line)); }

  void write(std::ostream& os, const std::string& format) const {
    if (format != "table") {
      write_csv_line(os, header_);
      for (const auto& r : rows_) write_csv_line(os, r);
      return;
    }
    for (const auto& n : notes_) os << n << '\n';
    if (rows_.empty()) {
      for (const auto& n : footer_) os << n << '\n';
      return;
    }
    std::vector<std::size_t> w(header_.size());
    for (std::size_t i = 0; i < header_.size(); ++i) w[i] = header_[i].size();
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << r[i];
        if (i + 1 < r.size()) os << std::string(w[i] - r[i].size() + 2, ' ');
      }
      os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    for (const auto& n : footer_) os << n << '\n';
  }

 private:
  static void write_csv_line(std::ostream& os, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> notes_;
  std::vector<std::string> footer_;
};

struct OutputOpts {
  std::string format = "table";
  std::string out;
};

struct MeasureOpts {
  std::string path;
  std::string atoms;

  Measure load() const {
    if (path.empty() == atoms.empty()) throw usage_error("give exactly one of --measure or --atoms");
    try {
      return path.empty() ? parse_atoms(atoms) : load_measure(path);
    } catch (const parameter_error& e) {
      throw usage_error(e.what());
    }
  }
};

struct FamilyOpts {
  std::string kind = "log";
  double b = 0.5;
  double a = 0.5;
  double beta = 1.0;
  double exponent = 2.0;
  double c = 1.0;

  PowerSeries make(std::size_t N) const {
    if (kind == "log") return PowerSeries::log_kernel(b, N);
    if (kind == "power") return PowerSeries::power_kernel(a, beta, exponent, N);
    return PowerSeries::binomial(c, N);
  }
  Family family() const {
    if (kind == "log") return LogKernel{b};
    if (kind == "power") return PowerKernel{a, beta, exponent};
    return Binomial{c};
  }
};

inline std::string num(double v) { return format_double(v); }

inline std::string table_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace detail {

inline void add_output(CLI::App* sub, OutputOpts& o) {
  sub->add_option("--format", o.format, "table, csv or plotdata")
      ->check(CLI::IsMember({"table", "csv", "plotdata"}))
      ->capture_default_str();
  sub->add_option("--out", o.out, "write the result here instead of standard output");
}

inline void add_measure(CLI::App* sub, MeasureOpts& m) {
  auto* a = sub->add_option("--measure", m.path, "measure spec JSON file");
  auto* b = sub->add_option("--atoms", m.atoms, "atoms-only measure \"t:w,t:w\"");
  a->excludes(b);
}

inline void add_family(CLI::App* sub, FamilyOpts& f, const std::string& prefix = "") {
  sub->add_option("--" + prefix + "family", f.kind, "log, power or binomial")
      ->check(CLI::IsMember({"log", "power", "binomial"}))
      ->capture_default_str();
  sub->add_option("--" + prefix + "b", f.b, "log kernel log(e/(1-bz))")->capture_default_str();
  sub->add_option("--" + prefix + "a", f.a, "power kernel point")->capture_default_str();
  sub->add_option("--" + prefix + "beta", f.beta, "power kernel normalization power")->capture_default_str();
  sub->add_option("--" + prefix + "exponent", f.exponent, "power kernel exponent")->capture_default_str();
  sub->add_option("--" + prefix + "c", f.c, "binomial (1-z)^{-c}")->capture_default_str();
}

inline cplx parse_point(const std::string& s) {
  const auto parts = hilbop::detail::split(s, ',');
  try {
    if (parts.size() == 1) return {hilbop::detail::parse_double(parts[0], "z"), 0.0};
    if (parts.size() == 2)
      return {hilbop::detail::parse_double(parts[0], "z"), hilbop::detail::parse_double(parts[1], "z")};
  } catch (const parameter_error& e) {
    throw usage_error(e.what());
  }
  throw usage_error("--z expects x or x,y");
}

inline void emit(const Output& o, const OutputOpts& opts, std::ostream& out) {
  if (opts.out.empty()) {
    o.write(out, opts.format);
    return;
  }
  std::ofstream f(opts.out);
  if (!f) throw usage_error("cannot write '" + opts.out + "'");
  o.write(f, opts.format);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw usage_error("cannot write '" + path + "'");
  f << text;
}

inline Output suite_output(const SuiteReport& s, const std::string& format) {
  if (format == "plotdata") {
    Output o({"case", "theorem", "j", "parameter", "source_norm", "target_norm", "ratio", "slope", "predicate",
              "empirical", "agreement"});
    for (const auto& c : s.cases)
      for (const auto& p : c.result.sweep)
        o.row({c.input.label, to_string(c.input.theorem), std::to_string(p.j), num(p.parameter), num(p.source_norm),
               num(p.target_norm), num(p.ratio), num(c.result.empirical_exponent),
               to_string(c.result.predicate_verdict), to_string(c.result.empirical_verdict),
               to_string(c.result.agreement)});
    return o;
  }
  const bool table = format == "table";
  auto n = [&](double v) { return table ? table_num(v) : num(v); };
  Output o({"case", "theorem", "prediction", "predicate", "empirical", "slope", "half_width", "agreement"});
  for (const auto& c : s.cases) {
    const auto& r = c.result;
    std::string agreement = c.error.empty() ? to_string(r.agreement) : "error";
    if (table && r.agreement == Agreement::inconclusive && c.input.expected_inconclusive())
      agreement += " (expected)";
    if (table && r.gate_blocked) agreement += " (gate)";
    o.row({c.input.label, to_string(c.input.theorem), to_string(c.input.prediction), to_string(r.predicate_verdict),
           r.ran || r.gate_blocked ? to_string(r.empirical_verdict) : "-",
           std::isfinite(r.empirical_exponent) ? n(r.empirical_exponent) : "-",
           std::isfinite(r.half_width) ? n(r.half_width) : "-", agreement});
  }
  for (const auto& c : s.cases)
    if (!c.error.empty()) o.footer("error in " + c.input.label + ": " + c.error);
  o.footer("cases " + std::to_string(s.cases.size()) + ", agree " + std::to_string(s.agree) + ", disagree " +
         std::to_string(s.disagree) + ", inconclusive " + std::to_string(s.inconclusive) + " (expected " +
         std::to_string(s.expected_inconclusive) + "), errors " + std::to_string(s.errors));
  return o;
}

}  // namespace detail

/// Parses argv, runs one subcommand and returns the process exit status.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Generalized Hilbert operators on Bergman and Bloch spaces: measures, norms, operators, theorem lab",
               "hilbop"};
  app.require_subcommand(1, 1);
  app.allow_extras(false);

  MeasureOpts meas;
  OutputOpts outp;
  FamilyOpts fam, gfam;
  Route route = Route::automatic;
  std::string route_name = "auto";
  std::size_t n_max = 10, N = 1024, K = 4096;
  int depth = 24, jmax = 20;
  double s = 1.0, gamma = 0.0, alpha = 0.0, p = 2.0, q = 1.0, alpha_prime = 0.0;
  bool vanishing = false, predicate_only = false;
  std::vector<double> ts;
  std::vector<std::string> zs;
  std::string space = "none", bundle = "default", json_path, sweeps_path, theorem_id, prediction = "not_applicable";
  unsigned threads = 0;

  auto* c_mom = app.add_subcommand("moments", "moments mu_n = int t^n dmu");
  detail::add_measure(c_mom, meas);
  c_mom->add_option("--n", n_max, "largest index")->check(CLI::Range(0, 1000000))->capture_default_str();
  c_mom->add_option("--route", route_name, "auto or quadrature")
      ->check(CLI::IsMember({"auto", "quadrature"}))
      ->capture_default_str();
  detail::add_output(c_mom, outp);

  auto* c_tail = app.add_subcommand("tail", "tails mu([t,1)) at t = 1 - 2^-j or at given t");
  detail::add_measure(c_tail, meas);
  c_tail->add_option("--depth", depth, "largest j")->check(CLI::Range(0, 1000))->capture_default_str();
  c_tail->add_option("--t", ts, "explicit points in [0, 1)");
  detail::add_output(c_tail, outp);

  auto* c_carl = app.add_subcommand("carleson", "classify mu as a (log) s-Carleson measure");
  detail::add_measure(c_carl, meas);
  c_carl->add_option("--s", s, "Carleson exponent")->required();
  c_carl->add_option("--gamma", gamma, "log power")->check(CLI::NonNegativeNumber)->capture_default_str();
  c_carl->add_option("--depth", depth, "J; samples run to J + 4")->check(CLI::Range(8, 48))->capture_default_str();
  c_carl->add_flag("--vanishing", vanishing, "test the vanishing condition");
  detail::add_output(c_carl, outp);

  auto* c_apply = app.add_subcommand("apply", "evaluate I(f)(z) by the integral and by the Hankel series");
  detail::add_measure(c_apply, meas);
  c_apply->add_option("--alpha", alpha, "alpha > -1")->required();
  detail::add_family(c_apply, fam);
  c_apply->add_option("--z", zs, "points x or x,y (use --z=-0.5,0.1 for negative x)")->required();
  c_apply->add_option("--N", N, "series truncation")->check(CLI::Range(1, 1 << 20))->capture_default_str();
  c_apply->add_option("--space", space, "gate: none, bloch or ap")
      ->check(CLI::IsMember({"none", "bloch", "ap"}))
      ->capture_default_str();
  c_apply->add_option("--p", p, "A^p exponent for --space ap")->capture_default_str();
  detail::add_output(c_apply, outp);

  auto* c_norm = app.add_subcommand("norm", "norm of a family member in H^p, A^p or the Bloch space");
  detail::add_family(c_norm, fam);
  c_norm->add_option("--space", space, "hp, ap or bloch")->required()->check(CLI::IsMember({"hp", "ap", "bloch"}));
  c_norm->add_option("--p", p, "exponent for hp / ap")->capture_default_str();
  c_norm->add_option("--N", N, "series truncation")->check(CLI::Range(1, 1 << 22))->capture_default_str();
  detail::add_output(c_norm, outp);

  auto* c_pair = app.add_subcommand("pairing", "Bloch / A^1 pairing <I(f), g> as r -> 1");
  detail::add_measure(c_pair, meas);
  c_pair->add_option("--alpha", alpha, "alpha > -1")->required();
  detail::add_family(c_pair, fam);
  detail::add_family(c_pair, gfam, "g-");
  c_pair->add_option("--N", N, "series truncation")->check(CLI::Range(1, 1 << 20))->capture_default_str();
  c_pair->add_option("--jmax", jmax, "largest j, r = 1 - 2^-j")->check(CLI::Range(2, 40))->capture_default_str();
  detail::add_output(c_pair, outp);

  auto* c_hs = app.add_subcommand("hs", "Hilbert-Schmidt sum and integral on A^2");
  detail::add_measure(c_hs, meas);
  c_hs->add_option("--alpha", alpha, "alpha > -1")->required();
  c_hs->add_option("--K", K, "sum cutoff")->check(CLI::Range(2, 1 << 24))->capture_default_str();
  detail::add_output(c_hs, outp);

  auto* c_suite = app.add_subcommand("suite", "run a bundle of theorem cases");
  c_suite->add_option("--bundle", bundle, "default or seeded-failure (default plus one misparametrized case)")
      ->check(CLI::IsMember({"default", "seeded-failure"}))
      ->capture_default_str();
  c_suite->add_option("--json", json_path, "write the JSON summary here");
  c_suite->add_option("--sweeps", sweeps_path, "write the sweep CSV here");
  c_suite->add_option("--threads", threads, "worker threads (overrides HML_THREADS)")->check(CLI::Range(1u, 1024u));
  detail::add_output(c_suite, outp);

  auto* c_thm = app.add_subcommand("theorem", "run one theorem case: predicate, growth experiment, agreement");
  c_thm->add_option("--id", theorem_id, "T3.1 .. T4.12, C3.3, C4.3, C4.9")->required();
  detail::add_measure(c_thm, meas);
  c_thm->add_option("--alpha", alpha, "alpha > -1")->required();
  c_thm->add_option("--p", p, "source exponent")->capture_default_str();
  c_thm->add_option("--q", q, "target exponent (A^p -> A^q cases)")->capture_default_str();
  c_thm->add_option("--gamma", gamma, "log power (log-Carleson cases)")->capture_default_str();
  c_thm->add_option("--alpha-prime", alpha_prime, "smaller parameter for corollary cases")->capture_default_str();
  c_thm->add_option("--prediction", prediction, "documented expectation")->capture_default_str();
  c_thm->add_flag("--predicate-only", predicate_only, "skip the growth experiment");
  c_thm->add_option("--json", json_path, "write the JSON report here");
  detail::add_output(c_thm, outp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }
  if (route_name == "quadrature") route = Route::quadrature;

  try {
    if (c_mom->parsed()) {
      const Measure mu = meas.load();
      Output o({"n", "moment"});
      const bool table = outp.format == "table";
      for (std::size_t n = 0; n <= n_max; ++n) {
        const double m = moment(mu, n, route);
        o.row({std::to_string(n), table ? table_num(m) : num(m)});
      }
      o.note("measure: " + describe_measure(mu));
      detail::emit(o, outp, out);
      return exit_code::ok;
    }

    if (c_tail->parsed()) {
      const Measure mu = meas.load();
      const bool table = outp.format == "table";
      auto n = [&](double v) { return table ? table_num(v) : num(v); };
      Output o({"t", "one_minus_t", "tail"});
      if (!ts.empty()) {
        for (double t : ts) {
          if (!(t >= 0.0 && t < 1.0)) throw usage_error("--t values must lie in [0, 1)");
          o.row({n(t), n(1.0 - t), n(tail(mu, t))});
        }
      } else {
        for (int j = 0; j <= depth; ++j) {
          const double x = std::ldexp(1.0, -j);
          o.row({n(1.0 - x), n(x), n(tail_at(mu, x))});
        }
      }
      o.note("measure: " + describe_measure(mu));
      detail::emit(o, outp, out);
      return exit_code::ok;
    }

    if (c_carl->parsed()) {
      const Measure mu = meas.load();
      if (!(s > 0.0)) throw usage_error("--s must be positive");
      const CarlesonReport r = carleson_classify(mu, {s, gamma, vanishing}, depth);
      const bool table = outp.format == "table";
      auto n = [&](double v) { return table ? table_num(v) : num(v); };
      Output o({"j", "t", "ratio", "verdict"});
      for (const auto& smp : r.ratio_samples) o.row({std::to_string(smp.j), n(smp.t), n(smp.ratio), to_string(r.verdict)});
      o.note(std::string(vanishing ? "vanishing " : "") + "Carleson s=" + table_num(s) + " gamma=" + table_num(gamma) +
             " J=" + std::to_string(depth) + ": " + to_string(r.verdict) + "  sup " + table_num(r.sup_estimate) +
             "  last " + table_num(r.limit_estimate.value_or(0.0)));
      detail::emit(o, outp, out);
      return exit_code::ok;
    }

    if (c_apply->parsed()) {
      const Measure mu = meas.load();
      std::vector<cplx> pts;
      for (const auto& z : zs) {
        const cplx v = detail::parse_point(z);
        if (!(std::abs(v) < 1.0)) throw usage_error("--z must lie in the open unit disk");
        pts.push_back(v);
      }
      std::optional<Space> src;
      if (space == "bloch") src = Space::bloch();
      if (space == "ap") src = Space::bergman(p);
      const OperatorSpec spec(mu, alpha, N, src);
      const PowerSeries f = fam.make(N);
      const HankelResult h = hankel_coefficients(spec, f);
      const bool table = outp.format == "table";
      auto n = [&](double v) { return table ? table_num(v) : num(v); };
      Output o({"re_z", "im_z", "re_integral", "im_integral", "re_series", "im_series", "abs_diff"});
      for (const cplx z : pts) {
        const cplx vi = apply_integral(spec, f, z);
        const cplx vs = horner(h.coefficients.coeffs(), z);
        o.row({n(z.real()), n(z.imag()), n(vi.real()), n(vi.imag()), n(vs.real()), n(vs.imag()), n(std::abs(vi - vs))});
      }
      o.note("f = " + describe(f.family()) + ", alpha = " + table_num(alpha) + ", N = " + std::to_string(N) +
             (h.stabilized ? "" : "  (Hankel sums not stabilized at N)"));
      detail::emit(o, outp, out);
      return exit_code::ok;
    }

    if (c_norm->parsed()) {
      NormEstimate e;
      if (space == "hp") {
        e = hp_norm(fam.make(N), p);
      } else if (space == "ap") {
        e = ap_norm_fn(FamilyFunction{fam.family()}, p);
      } else {
        e = bloch_norm(fam.make(N));
      }
      const bool table = outp.format == "table";
      Output o({"space", "p", "value", "method", "refinement_delta", "certified"});
      o.row({space, table ? table_num(p) : num(p), table ? table_num(e.value) : num(e.value), e.method,
             table ? table_num(e.refinement_delta) : num(e.refinement_delta), e.certified ? "yes" : "no"});
      detail::emit(o, outp, out);
      return exit_code::ok;
    }

    if (c_pair->parsed()) {
      const Measure mu = meas.load();
      const OperatorSpec spec(mu, alpha, 16);
      const PairingLimit r = dual_pairing_limit(spec, fam.make(N), gfam.make(N), jmax);
      const bool table = outp.format == "table";
      auto n = [&](double v) { return table ? table_num(v) : num(v); };
      Output o({"j", "r", "re", "im"});
      for (const auto& [j, v] : r.values) o.row({std::to_string(j), n(1.0 - std::ldexp(1.0, -j)), n(v.real()), n(v.imag())});
      o.note("limit " + table_num(r.limit.real()) + (r.limit.imag() != 0.0 ? " + " + table_num(r.limit.imag()) + "i" : "") +
             (r.extrapolated ? " (extrapolated)" : "") + (r.diverging ? "  DIVERGING" : ""));
      detail::emit(o, outp, out);
      return r.diverging ? exit_code::verdict : exit_code::ok;
    }

    if (c_hs->parsed()) {
      const Measure mu = meas.load();
      const OperatorSpec spec(mu, alpha, 16, Space::hankel_a2());
      const HsSum sum = hs_sum(spec, K);
      const HsIntegral in = hs_integral(spec);
      const double ratio = in.finite ? sum.value / in.value : std::numeric_limits<double>::infinity();
      const bool in_band = in.finite && !sum.diverging && ratio >= 0.5 && ratio <= 2.0;
      const std::string band = sum.diverging || !in.finite ? "diverging" : in_band ? "in_band" : "out_of_band";
      const bool table = outp.format == "table";
      auto n = [&](double v) { return table ? table_num(v) : num(v); };
      Output o({"K", "sum", "previous", "growth", "integral", "tail_form", "ratio", "verdict"});
      o.row({std::to_string(K), n(sum.value), n(sum.previous), n(sum.growth), n(in.value), n(in.tail_form), n(ratio), band});
      detail::emit(o, outp, out);
      return sum.diverging || !in.finite ? exit_code::verdict : exit_code::ok;
    }

    if (c_suite->parsed()) {
      std::vector<TheoremCase> cases = default_bundle();
      if (bundle == "seeded-failure") cases.push_back(seeded_failure_case());
      const SuiteReport rep = run_suite(cases, {}, threads);
      if (!json_path.empty()) detail::write_text(json_path, to_json(rep).dump(2) + "\n");
      if (!sweeps_path.empty()) {
        std::ostringstream os;
        write_sweep_csv(os, rep);
        detail::write_text(sweeps_path, os.str());
      }
      detail::emit(detail::suite_output(rep, outp.format), outp, out);
      return rep.success() ? exit_code::ok : exit_code::verdict;
    }

    if (c_thm->parsed()) {
      const auto id = parse_theorem_id(theorem_id);
      if (!id) throw usage_error("unknown theorem id '" + theorem_id + "'");
      const auto pred = parse_prediction(prediction);
      if (!pred) throw usage_error("unknown prediction '" + prediction + "'");
      TheoremCase c;
      c.theorem = *id;
      c.alpha = alpha;
      c.p = p;
      c.q = q;
      c.gamma = gamma;
      c.alpha_prime = alpha_prime;
      c.measure = meas.load();
      c.measure_text = describe_measure(c.measure);
      c.prediction = *pred;
      c.predicate_only = predicate_only;
      c.label = theorem_id;
      try {
        validate_case(c);
      } catch (const parameter_error& e) {
        throw usage_error(e.what());
      }
      const SuiteReport rep = run_suite({c}, {}, 1);
      if (!json_path.empty()) detail::write_text(json_path, to_json(rep.cases[0]).dump(2) + "\n");
      Output o = detail::suite_output(rep, outp.format);
      if (outp.format == "table") o.footer("predicate: " + rep.cases[0].result.predicate_detail);
      detail::emit(o, outp, out);
      if (!rep.cases[0].error.empty()) return exit_code::verdict;
      return rep.disagree ? exit_code::verdict : exit_code::ok;
    }
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return exit_code::usage;
  } catch (const parameter_error& e) {
    err << "error [" << e.tag() << "]: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const error& e) {
    err << "error [" << e.tag() << "]: " << e.what() << '\n';
    return exit_code::verdict;
  }
  return exit_code::usage;
}

}  // namespace hilbop::cli
