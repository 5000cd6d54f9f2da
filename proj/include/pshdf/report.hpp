#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "pshdf/multiplier.hpp"
#include "pshdf/real_convex.hpp"

namespace pshdf {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "pshdf-report";
inline constexpr const char* kReportVersion = "v1";

namespace report {

// 12 significant digits keep golden files stable across build flags;
// non-finite values become null.
inline Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

inline Json poly(const WPoly& p) { return {{"canonical", p.to_string()}, {"real", p.to_real_string()}}; }

inline Json point(const Point& p) {
  Json out = Json::array();
  for (const auto& c : p) out.push_back({num(c.real()), num(c.imag())});
  return out;
}

inline Json real_point(const std::vector<double>& p) {
  Json out = Json::array();
  for (double c : p) out.push_back(num(c));
  return out;
}

inline Json matrix(const std::vector<std::complex<double>>& h, bool real_only = false) {
  Json out = Json::array();
  for (const auto& c : h) out.push_back(real_only ? num(c.real()) : Json{num(c.real()), num(c.imag())});
  return out;
}

inline Json psd_values(const PsdValues& v) {
  return {{"diag_z", num(v.diag_z)}, {"diag_w", num(v.diag_w)}, {"minor", num(v.minor)},
          {"least_eigenvalue", num(v.least_eigenvalue)}};
}

inline Json psd(const PsdCheckResult& r, bool real_only = false) {
  Json out{{"passed", r.passed},
           {"tolerance", num(r.tolerance)},
           {"points_checked", r.points_checked},
           {"minima", psd_values(r.minima)}};
  if (r.points_checked > 0) {
    Json coords = Json::array();
    for (const auto& c : r.worst_point) coords.push_back(num(c.real()));
    out["worst_point"] = real_only ? coords : point(r.worst_point);
    out["worst_values"] = psd_values(r.worst_values);
    out["worst_hessian"] = matrix(r.worst_hessian, real_only);
  }
  return out;
}

inline Json probe(const Probe& p) {
  Json c = Json::array();
  for (double x : p.coeffs) c.push_back(num(x));
  return {{"label", p.label}, {"is_ray", p.is_ray}, {"coeffs", c}, {"exponents", p.exponents}};
}

inline Json verdict(const DominanceVerdict& v) {
  Json out{{"status", to_string(v.status)}, {"bound", to_string(v.bound)}, {"constant", num(v.constant)}};
  if (!v.certificate.empty()) out["certificate"] = v.certificate;
  if (!v.note.empty()) out["note"] = v.note;
  if (v.witness) {
    Json table = Json::array();
    for (const auto& row : v.witness->table)
      table.push_back({{"t", num(row.t)}, {"numerator", num(row.numerator)}, {"bound", num(row.bound)},
                       {"ratio", num(row.ratio)}});
    out["witness"] = {{"curve", probe(v.witness->curve)},
                      {"run_begin", v.witness->run_begin},
                      {"run_end", v.witness->run_end},
                      {"table", table}};
  }
  return out;
}

inline Json identity(const IdentityCheck& id) {
  return {{"max_deviation", num(id.max_deviation)}, {"allowed", num(id.allowed())}, {"max_lhs", num(id.max_lhs)},
          {"points", id.points}, {"passed", id.passed()}};
}

inline Json k_search(const KSearchResult& k) {
  Json out{{"found", k.found},
           {"K", k.K.get_str()},
           {"exponent", k.exponent},
           {"requested_radius", num(k.requested_radius)},
           {"radius", num(k.radius)},
           {"shell_shrinks", k.shell_shrinks},
           {"samples", k.samples},
           {"seed", k.seed},
           {"min_abs_h", num(k.min_abs_h)},
           {"gate", verdict(k.gate)},
           {"psd", psd(k.psd)}};
  if (!k.failure.empty()) out["failure"] = k.failure;
  return out;
}

inline Json split(const SplitResult& s, const WPoly& g, int j) {
  Json terms = Json::array();
  for (const auto& t : s.terms)
    terms.push_back({{"term", t.term.to_string()}, {"role", t.in_s ? "S" : "E"}, {"verdict", verdict(t.verdict)}});
  return {{"j", j + 1}, {"g", poly(g)}, {"S", poly(s.S)}, {"E", poly(s.E)}, {"has_unknown", s.has_unknown},
          {"terms", terms}};
}

inline Json base(const std::string& command, const std::string& status, int dim) {
  return {{"schema", kReportSchema}, {"version", kReportVersion}, {"command", command}, {"status", status},
          {"dim", dim}};
}

}  // namespace report

inline Json construction_json(const ConstructionReport& rep) {
  using namespace report;
  Json out = base("construct", to_string(rep.status), rep.dim);
  out["input"] = {{"r", poly(rep.r)}};
  const auto& c = rep.config;
  out["config"] = {{"max_stages", c.max_stages},
                   {"degree_cap", rep.degree_cap},
                   {"bound", to_string(c.bound)},
                   {"escalate", c.escalate},
                   {"absorb", c.absorb},
                   {"radius", num(c.k.radius)},
                   {"samples", c.k.samples},
                   {"seed", c.k.seed},
                   {"max_K_exp", c.k.max_K_exp},
                   {"tol", num(c.k.tol)},
                   {"probe_seed", c.probes.seed}};
  out["message"] = rep.message;
  if (rep.warning) out["warning"] = *rep.warning;
  out["shortcut_applicable"] = rep.shortcut_applicable;
  out["bound_initial"] = to_string(rep.initial_bound);
  out["bound_final"] = to_string(rep.final_bound);

  Json stages = Json::array();
  for (const auto& st : rep.stages) {
    Json s{{"index", st.index},
           {"bound", to_string(st.bound)},
           {"escalated", st.escalated},
           {"candidate_T", poly(st.candidate_T)}};
    Json absorbed = Json::array();
    for (const auto& a : st.absorbed) absorbed.push_back(poly(a));
    s["absorbed"] = absorbed;
    s["k_search"] = k_search(st.k);
    if (!st.split.empty()) {
      Json sp = Json::array();
      for (std::size_t j = 0; j < st.split.size(); ++j) sp.push_back(split(st.split[j], st.g[j], static_cast<int>(j)));
      s["split"] = sp;
    }
    if (!st.T_inc.empty()) {
      Json solves = Json::array();
      for (std::size_t j = 0; j < st.T_inc.size(); ++j) {
        Json one{{"j", j + 1}, {"T_inc", poly(st.T_inc[j])}, {"residual", poly(st.residual[j])}};
        if (st.residual_verdicts[j]) one["residual_verdict"] = verdict(*st.residual_verdicts[j]);
        solves.push_back(one);
      }
      s["solve"] = solves;
      s["merged_T_inc"] = poly(st.merged_T_inc);
      s["T_after"] = poly(st.T_after);
    }
    stages.push_back(s);
  }
  out["stages"] = stages;

  Json result{{"stage", rep.final.stage}, {"T", poly(rep.final.T)}};
  if (rep.final.K) {
    result["K"] = rep.final.K->get_str();
    result["h"] = poly(WPoly::constant(rep.dim, 1) + rep.final.T + rep.r.scaled(GaussianRational(*rep.final.K)));
  }
  Json absorbed = Json::array();
  for (const auto& a : rep.final.absorbed) absorbed.push_back(poly(a));
  result["absorbed"] = absorbed;
  out["result"] = result;
  if (rep.identity) out["identity"] = identity(*rep.identity);
  Json contraction = Json::array();
  for (double x : rep.contraction) contraction.push_back(num(x));
  out["contraction"] = contraction;
  Json conflicts = Json::array();
  for (const auto& cf : rep.conflicts) {
    Json terms = Json::array();
    for (const auto& t : cf.terms) terms.push_back(poly(t));
    conflicts.push_back({{"j", cf.j + 1}, {"k", cf.k + 1}, {"detail", cf.detail}, {"terms", terms}});
  }
  out["conflicts"] = conflicts;
  return out;
}

inline Json convex_json(const RealDefiningFunction& df, const ConvexMultiplierResult& res,
                        const ConvexMultiplierConfig& cfg) {
  using namespace report;
  Json out = base("construct", res.found ? "Certified" : "Exhausted", df.dim());
  out["real"] = true;
  out["input"] = {{"r", {{"canonical", to_string(df.r())}, {"real", to_string(df.r())}}}};
  out["config"] = {{"radius", num(cfg.radius)}, {"samples", cfg.samples}, {"seed", cfg.seed},
                   {"max_K_exp", cfg.max_K_exp}, {"tol", num(cfg.tol)}};
  out["result"] = {{"K", res.K.get_str()},
                   {"exponent", res.exponent},
                   {"h", {{"canonical", to_string(res.h)}, {"real", to_string(res.h)}}},
                   {"radius", num(res.radius)}};
  out["psd"] = psd(res.psd, true);
  out["convexity"] = {{"samples", res.scan.samples}, {"negatives", res.scan.negatives},
                      {"min_value", num(res.scan.min_value)}};
  return out;
}

inline Json levi_scan_json(const LeviScan& s) {
  using namespace report;
  Json out{{"radius", num(s.radius)}, {"samples", s.samples}, {"negatives", s.negatives},
           {"min_value", num(s.min_value)}};
  if (s.samples > 0) out["min_point"] = point(s.min_point);
  if (s.witness) out["witness"] = point(*s.witness);
  return out;
}

inline Json necessary_json(const NecessaryConditionsReport& nc) {
  using namespace report;
  Json ineq = Json::array();
  for (const auto& i : nc.inequalities)
    ineq.push_back({{"name", i.name}, {"holds", i.holds}, {"min_slack", num(i.min_slack)},
                    {"worst_point", point(i.worst_point)}});
  Json ev = Json::array();
  for (const auto& v : nc.e_verdicts) ev.push_back(verdict(v));
  return {{"passed", nc.passed()}, {"inequalities", ineq}, {"max_abs_E", num(nc.max_abs_E)}, {"E_verdicts", ev}};
}

}  // namespace pshdf
