#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pshdf/expr.hpp"
#include "pshdf/report.hpp"

using namespace pshdf;

namespace {

enum Exit { kPass = 0, kFail = 1, kUnknown = 2, kUsage = 64 };

struct Options {
  std::string r, h, K, csv;
  double radius = 1e-2;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  int max_stages = 4;
  std::optional<int> degree_cap;
  int max_K_exp = 20;
  double tol = kDefaultTolerance;
  std::string bound = "levi+grad";
  bool real = false, json = false, no_absorb = false;
};

void emit(const Options& o, const Json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

std::string fmt(double x) { return detail::fmt(x); }

std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += ", ";
    s += fmt(p[k].real()) + (p[k].imag() < 0 ? " - " : " + ") + fmt(std::abs(p[k].imag())) + "i";
  }
  return s + ")";
}

void write_csv_file(const std::string& path, const std::vector<Point>& pts, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& cols) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  write_csv(f, pts, names, cols);
}

ConstructionConfig construction_config(const Options& o) {
  ConstructionConfig c;
  c.max_stages = o.max_stages;
  c.degree_cap = o.degree_cap;
  c.bound = parse_bound(o.bound);
  c.absorb = !o.no_absorb;
  c.k.radius = o.radius;
  c.k.samples = o.samples;
  c.k.seed = o.seed;
  c.k.max_K_exp = o.max_K_exp;
  c.k.tol = o.tol;
  return c;
}

ConvexMultiplierConfig convex_config(const Options& o) {
  ConvexMultiplierConfig c;
  c.radius = o.radius;
  c.samples = o.samples;
  c.seed = o.seed;
  c.max_K_exp = o.max_K_exp;
  c.tol = o.tol;
  return c;
}

int cmd_levi(const Options& o) {
  if (o.real) {
    RealDefiningFunction df(parse_rpoly(o.r));
    Json j = report::base("levi", "Pass", df.dim());
    j["real"] = true;
    Json forms = Json::array();
    std::string text;
    for (int k = 0; k + 1 < df.dim(); ++k) {
      const RPoly L = tangential_form(df, k);
      forms.push_back({{"canonical", to_string(L)}, {"real", to_string(L)}});
      text += (df.dim() > 2 ? "[j=" + std::to_string(k + 1) + "] " : std::string()) + to_string(L) + "\n";
    }
    j["levi"] = forms;
    emit(o, j, text);
    return kPass;
  }
  const auto df = make_defining_function(parse_wpoly(o.r));
  const LeviData d = levi_data(df);
  Json j = report::base("levi", "Pass", df.dim());
  j["input"] = {{"r", report::poly(df.r())}};
  Json forms = Json::array(), origin = Json::array();
  std::string text;
  for (std::size_t k = 0; k < d.levi.size(); ++k) {
    forms.push_back(report::poly(d.levi[k]));
    origin.push_back(d.levi[k].constant_term().to_string());
    text += (d.levi.size() > 1 ? "[j=" + std::to_string(k + 1) + "] " : std::string()) + d.levi[k].to_string() + "\n";
  }
  j["levi"] = forms;
  j["levi_at_origin"] = origin;
  j["gradient_z_sq"] = report::poly(d.gradient_z_sq);
  emit(o, j, text);
  return kPass;
}

int cmd_analyze(const Options& o) {
  if (o.real) {
    const RPoly r = parse_rpoly(o.r);
    std::optional<RealDefiningFunction> df;
    try {
      df.emplace(r);
    } catch (const NormalFormError& e) {
      Json j = report::base("analyze", "Fail", static_cast<int>(r.nvars()));
      j["real"] = true;
      j["normal_form"] = {{"valid", false}, {"violations", e.violations()}};
      std::string text = "not in normal form:\n";
      for (const auto& v : e.violations()) text += "  " + v + "\n";
      emit(o, j, text);
      return kFail;
    }
    const RealShell shell = sample_real_boundary(*df, o.radius, o.samples, o.seed);
    const ConvexityScan scan = convexity_scan(*df, shell.points);
    const bool ok = !scan.witness;
    Json j = report::base("analyze", ok ? "Pass" : "Fail", df->dim());
    j["real"] = true;
    j["normal_form"] = {{"valid", true}, {"violations", Json::array()}};
    j["convexity"] = {{"radius", report::num(shell.radius)}, {"samples", scan.samples},
                      {"negatives", scan.negatives}, {"min_value", report::num(scan.min_value)}};
    if (scan.witness) j["convexity"]["witness"] = report::real_point(*scan.witness);
    std::string text = "normal form: ok\nconvexity scan: " + std::to_string(scan.negatives) + " negative of " +
                       std::to_string(scan.samples) + ", min " + fmt(scan.min_value) + "\n";
    emit(o, j, text);
    return ok ? kPass : kFail;
  }

  const WPoly r = parse_wpoly(o.r);
  const NormalFormCheck nf = validate_normal_form(r);
  if (!nf.valid()) {
    Json j = report::base("analyze", "Fail", r.dim());
    j["input"] = {{"r", report::poly(r)}};
    j["normal_form"] = {{"valid", false}, {"violations", nf.violations}};
    std::string text = "not in normal form:\n";
    for (const auto& v : nf.violations) text += "  " + v + "\n";
    emit(o, j, text);
    return kFail;
  }
  const DefiningFunction& df = *nf.value;
  const BoundaryShell shell = sample_boundary(df, o.radius, o.samples, o.seed);
  const LeviScan scan = levi_scan(df, shell);
  const DominanceOracle oracle(df);
  const DominanceVerdict gate = levi_dominance_gate(oracle);
  const bool ok = !scan.witness;

  Json j = report::base("analyze", ok ? "Pass" : "Fail", df.dim());
  j["input"] = {{"r", report::poly(df.r())}};
  j["normal_form"] = {{"valid", true}, {"violations", Json::array()}};
  Json forms = Json::array(), origin = Json::array();
  std::string text = "normal form: ok\n";
  for (int k = 0; k < df.nz(); ++k) {
    const WPoly L = levi_form(df, k);
    forms.push_back(report::poly(L));
    origin.push_back(L.constant_term().to_string());
    text += "Levi form" + (df.nz() > 1 ? " (j=" + std::to_string(k + 1) + ")" : std::string()) + ": " +
            L.to_real_string() + "\n";
  }
  j["levi"] = forms;
  j["levi_at_origin"] = origin;
  j["strongly_pseudoconvex_at_origin"] = strong_psc_shortcut(df).has_value();
  j["levi_scan"] = levi_scan_json(scan);
  j["levi_gate"] = report::verdict(gate);
  text += "strongly pseudoconvex at 0: " + std::string(strong_psc_shortcut(df) ? "yes" : "no") + "\n";
  text += "Levi scan at radius " + fmt(scan.radius) + ": " + std::to_string(scan.negatives) + " negative of " +
          std::to_string(scan.samples) + ", min " + fmt(scan.min_value) + "\n";
  if (scan.witness) text += "  witness " + fmt_point(*scan.witness) + "\n";
  text += "|r_z|^2 against the Levi form: " + to_string(gate.status) + "\n";
  if (gate.witness) text += "  escape along " + gate.witness->curve.label + "\n";

  std::vector<double> values;
  const CompiledPoly<> L(levi_form(df));
  for (const auto& p : shell.points) values.push_back(L(p).real());
  write_csv_file(o.csv, shell.points, {"levi"}, {values});
  emit(o, j, text);
  return ok ? kPass : kFail;
}

std::string trace(const ConstructionReport& rep) {
  std::string s;
  if (rep.warning) s += "warning: " + *rep.warning + "\n";
  for (const auto& st : rep.stages) {
    s += "stage " + std::to_string(st.index) + " (bound " + to_string(st.bound) + (st.escalated ? ", escalated" : "") +
         ")\n";
    s += "  candidate T = " + st.candidate_T.to_real_string() + "\n";
    for (const auto& a : st.absorbed) s += "  absorbed " + a.to_real_string() + "\n";
    if (st.k.found)
      s += "  k_search: K = " + st.k.K.get_str() + " at radius " + fmt(st.k.radius) + "\n";
    else
      s += "  k_search: " + st.k.failure + "\n";
    for (std::size_t j = 0; j < st.split.size(); ++j) {
      const std::string tag = st.split.size() > 1 ? "[j=" + std::to_string(j + 1) + "] " : "";
      s += "  " + tag + "S = " + st.split[j].S.to_string() + "\n";
      s += "  " + tag + "E = " + st.split[j].E.to_string() + "\n";
      if (j < st.T_inc.size()) {
        s += "  " + tag + "T_inc = " + st.T_inc[j].to_string() + "\n";
        if (!st.residual[j].is_zero()) s += "  " + tag + "residual = " + st.residual[j].to_string() + "\n";
      }
    }
  }
  s += "status: " + to_string(rep.status) + "\n" + rep.message + "\n";
  s += "T = " + rep.final.T.to_real_string() + "\n";
  if (rep.final.K) s += "K = " + rep.final.K->get_str() + "\n";
  if (rep.identity) s += "identity deviation " + fmt(rep.identity->max_deviation) + "\n";
  for (std::size_t k = 0; k < rep.contraction.size(); ++k)
    s += "contraction " + std::to_string(k + 1) + ": " + fmt(rep.contraction[k]) + "\n";
  return s;
}

int cmd_construct(const Options& o) {
  if (o.real) {
    RealDefiningFunction df(parse_rpoly(o.r));
    const auto cfg = convex_config(o);
    try {
      const auto res = convex_multiplier(df, cfg);
      std::string text = std::string(res.found ? "Certified" : "Exhausted") + "\nh = " + to_string(res.h) +
                         "\nK = " + res.K.get_str() + "\n";
      emit(o, convex_json(df, res, cfg), text);
      return res.found ? kPass : kUnknown;
    } catch (const NotConvexError& e) {
      Json j = report::base("construct", "NotConvex", df.dim());
      j["real"] = true;
      j["message"] = e.what();
      j["witness"] = report::real_point(e.witness());
      emit(o, j, std::string(e.what()) + "\n");
      return kFail;
    }
  }
  const auto df = make_defining_function(parse_wpoly(o.r));
  try {
    const auto rep = df.dim() > 2 ? cn_simultaneous(df, construction_config(o)) : run_construction(df, construction_config(o));
    emit(o, construction_json(rep), trace(rep));
    switch (rep.status) {
      case ConstructionStatus::Certified: return kPass;
      case ConstructionStatus::Obstructed: return kFail;
      default: return kUnknown;
    }
  } catch (const NotPseudoconvexError& e) {
    Json j = report::base("construct", "NotPseudoconvex", df.dim());
    j["input"] = {{"r", report::poly(df.r())}};
    j["message"] = e.what();
    j["witness"] = report::point(e.witness());
    emit(o, j, std::string(e.what()) + "\nwitness " + fmt_point(e.witness()) + "\n");
    return kFail;
  }
}

int cmd_verify(const Options& o) {
  if (o.h.empty()) throw CLI::RequiredError("--h");
  if (o.real) {
    RealDefiningFunction df(parse_rpoly(o.r));
    const RPoly h = parse_rpoly(o.h, df.dim());
    const RealShell shell = sample_real_boundary(df, o.radius, o.samples, o.seed);
    const auto res = real_hessian_check(df.r() * h, shell, o.tol);
    Json j = report::base("verify", res.passed ? "Pass" : "Fail", df.dim());
    j["real"] = true;
    j["input"] = {{"r", {{"canonical", to_string(df.r())}, {"real", to_string(df.r())}}},
                  {"h", {{"canonical", to_string(h)}, {"real", to_string(h)}}}};
    j["psd"] = report::psd(res, true);
    emit(o, j, std::string("real Hessian of r h: ") + (res.passed ? "PSD" : "not PSD") + ", least eigenvalue " +
                   fmt(res.minima.least_eigenvalue) + "\n");
    return res.passed ? kPass : kFail;
  }
  const auto df = make_defining_function(parse_wpoly(o.r));
  const WPoly h = parse_wpoly(o.h, df.dim());
  if (!h.is_real()) throw ConfigError("h must be real-valued");
  const BoundaryShell shell = sample_boundary(df, o.radius, o.samples, o.seed);
  const PsdCheckResult psd = psd_check(h * df.r(), shell, o.tol);
  const DominanceOracle oracle(df);
  const auto nc = necessary_conditions_check(df, h, shell.points, oracle, o.tol);
  std::optional<IdentityCheck> id;
  if (!o.K.empty()) {
    Rational K(o.K);
    K.canonicalize();
    const WPoly T = h - WPoly::constant(df.dim(), 1) - df.r().scaled(GaussianRational(K));
    id = hessian_identity_check(df, K, T, shell);
  }
  const bool ok = psd.passed && nc.passed() && (!id || id->passed());

  Json j = report::base("verify", ok ? "Pass" : "Fail", df.dim());
  j["input"] = {{"r", report::poly(df.r())}, {"h", report::poly(h)}};
  j["config"] = {{"radius", report::num(o.radius)}, {"samples", o.samples}, {"seed", o.seed}, {"tol", report::num(o.tol)}};
  j["psd"] = report::psd(psd);
  j["necessary_conditions"] = necessary_json(nc);
  if (id) j["identity"] = report::identity(*id);

  std::string text = std::string("rho = r h: ") + (psd.passed ? "PSD on the shell" : "not PSD on the shell") + "\n";
  if (!psd.passed) {
    const int n = df.dim();
    text += "  witness " + fmt_point(psd.worst_point) + "\n  rho_wwbar = " +
            fmt(psd.worst_hessian[(n - 1) * n + (n - 1)].real()) + ", least eigenvalue " +
            fmt(psd.worst_values.least_eigenvalue) + "\n";
  }
  for (const auto& i : nc.inequalities)
    text += std::string("  ") + (i.holds ? "holds " : "FAILS ") + i.name + " (min slack " + fmt(i.min_slack) + ")\n";
  for (const auto& v : nc.e_verdicts) text += "  E against levi+grad: " + to_string(v.status) + "\n";
  if (id) text += "  identity deviation " + fmt(id->max_deviation) + (id->passed() ? " (ok)" : " (too large)") + "\n";
  std::vector<double> least, minor;
  const HessianField H(h * df.r());
  for (const auto& p : shell.points) {
    const auto v = psd_values(H(p), df.dim());
    least.push_back(v.least_eigenvalue);
    minor.push_back(v.minor);
  }
  write_csv_file(o.csv, shell.points, {"least_eigenvalue", "minor"}, {least, minor});
  emit(o, j, text);
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local plurisubharmonic defining functions: analysis and construction"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--r", o.r, "defining function, e.g. \"Im(w) + abs2(z)\"");
  app.add_option("--radius", o.radius, "verification shell radius")->capture_default_str();
  app.add_option("--samples", o.samples, "boundary samples per shell")->capture_default_str();
  app.add_option("--seed", o.seed, "sampling seed")->capture_default_str();
  app.add_option("--max-stages", o.max_stages, "construction stage budget")->capture_default_str();
  app.add_option("--degree-cap", o.degree_cap, "truncation degree for T");
  app.add_option("--max-K-exp", o.max_K_exp, "largest K = 2^e tried")->capture_default_str();
  app.add_option("--tol", o.tol, "PSD tolerance")->capture_default_str();
  app.add_option("--bound", o.bound, "error-term bound")->check(CLI::IsMember({"levi", "levi+grad"}))->capture_default_str();
  app.add_option("--csv", o.csv, "write the sampled point table here");
  app.add_flag("--real", o.real, "real-convex mode: r = y + G(x, y)");
  app.add_flag("--json", o.json, "emit a JSON report");
  app.add_flag("--no-absorb", o.no_absorb, "keep multiples of r in T");

  auto* levi = app.add_subcommand("levi", "print the symbolic Levi form");
  auto* analyze = app.add_subcommand("analyze", "normal form, Levi diagnostics and the dominance gate");
  auto* construct = app.add_subcommand("construct", "build a multiplier h = 1 + Kr + T");
  auto* verify = app.add_subcommand("verify", "check a user-supplied multiplier h");
  verify->set_help_flag("--help", "print this help message and exit");
  verify->add_option("--h", o.h, "multiplier h");
  verify->add_option("--K", o.K, "K for the Hessian identity check, with T = h - 1 - K r");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  try {
    if (o.r.empty()) throw CLI::RequiredError("--r");
    if (levi->parsed()) return cmd_levi(o);
    if (analyze->parsed()) return cmd_analyze(o);
    if (construct->parsed()) return cmd_construct(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const NormalFormError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
