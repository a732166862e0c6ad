#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"
#include "qeuclid/frame.hpp"
#include "qeuclid/runner.hpp"

namespace qeuclid_tools {

using nlohmann::json;

inline const char* kconv_name(qeuclid::KConvention kc) {
  return kc == qeuclid::KConvention::standard ? "standard" : "h";
}

inline const char* sign_branch_name(qeuclid::SignBranch b) {
  return b == qeuclid::SignBranch::positive ? "positive" : "negative";
}

inline json config_json(const qeuclid::RunConfig& cfg) {
  json tags = json::array();
  for (auto t : cfg.tags) tags.push_back(qeuclid::tag_name(t));
  json branches = json::array();
  for (auto b : cfg.branches) branches.push_back(qeuclid::branch_name(b));
  json fams = json::array();
  for (const auto& name : qeuclid::known_families())
    if (cfg.families.empty() ||
        std::find(cfg.families.begin(), cfg.families.end(), name) != cfg.families.end())
      fams.push_back(name);
  json cj{{"n", cfg.N},
          {"families", fams},
          {"theorems", cfg.theorems},
          {"calculi", tags},
          {"branches", branches},
          {"mode", qeuclid::mode_name(cfg.mode)},
          {"k_convention", kconv_name(cfg.k_convention)},
          {"gamma_branch", sign_branch_name(cfg.gamma_branch)}};
  if (cfg.mode == qeuclid::RunMode::sampled) {
    cj["seed"] = cfg.seed;
    cj["samples"] = cfg.samples;
  }
  return cj;
}

inline json check_json(const qeuclid::CheckResult& c, bool timings) {
  json j{{"check_id", c.id}, {"status", c.pass ? "pass" : "fail"}, {"residual", c.residual}};
  if (timings) j["timing_ms"] = c.timing_ms;
  return j;
}

// Geometry checks are grouped by section so the branch/calculus cross product
// stays readable; every other family is a flat check list.
inline std::string geometry_section(const std::string& id) {
  static const std::vector<std::string> sections = {"torsion", "compat",   "covdev",
                                                    "metric",  "curvature", "sigma"};
  for (const auto& s : sections)
    if (id.rfind("geometry." + s, 0) == 0) return s;
  return "other";
}

inline json family_json(const qeuclid::FamilyReport& fr, bool timings) {
  json out{{"family", fr.family}};
  if (fr.family == "geometry") {
    json sections(json::value_t::object);
    for (const auto& c : fr.report.checks)
      sections[geometry_section(c.id)].push_back(check_json(c, timings));
    out["sections"] = sections;
  } else {
    json checks = json::array();
    for (const auto& c : fr.report.checks) checks.push_back(check_json(c, timings));
    out["checks"] = checks;
  }
  return out;
}

inline json render_json(const qeuclid::RunConfig& cfg, const qeuclid::RunResult& rr) {
  json doc;
  doc["schema"] = 1;
  doc["command"] = "verify";
  doc["config"] = config_json(cfg);
  json runs = json::array();
  std::size_t total = 0, failed = 0;
  for (const auto& pt : rr.points) {
    json families = json::array();
    for (const auto& fr : pt.families) {
      families.push_back(family_json(fr, cfg.timings));
      for (const auto& c : fr.report.checks) {
        ++total;
        if (!c.pass) ++failed;
      }
    }
    runs.push_back(json{{"point", pt.point}, {"families", families}});
  }
  doc["runs"] = runs;
  doc["summary"] =
      json{{"checks", total}, {"failed", failed}, {"status", failed == 0 ? "pass" : "fail"}};
  return doc;
}

inline std::string render_markdown(const qeuclid::RunConfig& cfg,
                                   const qeuclid::RunResult& rr) {
  std::string out = "# Verification report (N = " + std::to_string(cfg.N) + ", " +
                    qeuclid::mode_name(cfg.mode) + " mode)\n";
  std::size_t total = 0, failed = 0;
  for (const auto& pt : rr.points) {
    out += "\n## Point: " + pt.point + "\n";
    for (const auto& fr : pt.families) {
      out += "\n### Family: " + fr.family + "\n\n";
      out += cfg.timings ? "| check | status | residual | time (ms) |\n|---|---|---|---|\n"
                         : "| check | status | residual |\n|---|---|---|\n";
      for (const auto& c : fr.report.checks) {
        ++total;
        if (!c.pass) ++failed;
        std::string residual = c.residual;
        for (auto& ch : residual)
          if (ch == '|' || ch == '\n') ch = ' ';
        out += "| " + c.id + " | " + (c.pass ? "pass" : "FAIL") + " | " + residual + " |";
        if (cfg.timings) {
          char buf[32];
          std::snprintf(buf, sizeof buf, " %.1f |", c.timing_ms);
          out += buf;
        }
        out += "\n";
      }
    }
  }
  out += "\nSummary: " + std::to_string(total - failed) + "/" + std::to_string(total) +
         " checks pass (" + (failed == 0 ? "pass" : "fail") + ").\n";
  return out;
}

namespace emitdetail {

inline json tensor4_json(const qeuclid::SparseTensor4<qeuclid::QScalar>& t) {
  json entries = json::array();
  for (const auto& [key, v] : t.entries())
    entries.push_back(json{{"key", json::array({key[0], key[1], key[2], key[3]})},
                           {"value", v.to_q_string()}});
  return entries;
}

inline json metric_json(const qeuclid::SparseTensor2<qeuclid::QScalar>& g) {
  json entries = json::array();
  for (const auto& [key, v] : g.entries())
    entries.push_back(
        json{{"key", json::array({key[0], key[1]})}, {"value", v.to_q_string()}});
  return entries;
}

}  // namespace emitdetail

// Closed-form data emitters. All documents are deterministic for a fixed
// config: tensors iterate in sorted key order and every scalar is printed in
// the canonical q-power form the expression grammar accepts back.
inline json emit_document(const qeuclid::RunConfig& cfg, const std::string& target) {
  using namespace qeuclid;
  validate_config(cfg);
  const auto ctx = make_exact_context(cfg.N, cfg.k_convention);
  const CalculusKind tag = cfg.tags.front();
  json doc;
  doc["schema"] = 1;
  doc["command"] = "emit";
  doc["target"] = target;
  doc["n"] = cfg.N;
  if (target == "rmatrix") {
    const auto b = build_tensors(ctx);
    doc["entries"] = emitdetail::tensor4_json(b.rhat);
    doc["inverse"] = emitdetail::tensor4_json(b.rhat_inv);
    return doc;
  }
  if (target == "metric") {
    const auto b = build_tensors(ctx);
    doc["lower"] = emitdetail::metric_json(b.g_lower);
    doc["upper"] = emitdetail::metric_json(b.g_upper);
    return doc;
  }
  if (target == "projectors") {
    const auto b = build_tensors(ctx);
    doc["symmetric"] = emitdetail::tensor4_json(b.proj_s);
    doc["antisymmetric"] = emitdetail::tensor4_json(b.proj_a);
    doc["trace"] = emitdetail::tensor4_json(b.proj_t);
    return doc;
  }
  const Algebra<QScalar> alg(ctx);
  if (target == "lambdas") {
    doc["calculus"] = tag_name(tag);
    const auto g = build_gammas(ctx, tag, GammaMode::theorem2);
    const auto fd = build_frame_data(alg, g);
    json entries = json::array();
    for (const auto& [a, lam] : fd.lambdas) {
      const auto& gamma = g.value(a);
      json entry{{"index", a},
                 {"gamma", json{{"sector", radical_sector_label(gamma.key)},
                                {"coeff", gamma.coeff.to_q_string()}}},
                 {"rescaled", alg.to_string(lam)}};
      if (g.is_rational(a)) entry["text"] = alg.to_string(alg.scale(lam, gamma.coeff));
      entries.push_back(entry);
    }
    doc["entries"] = entries;
    return doc;
  }
  if (target == "frame" || target == "dirac") {
    doc["calculus"] = tag_name(tag);
    const auto tensors = build_tensors(ctx);
    const Calculus<QScalar> calc(alg, tensors, tag);
    if (target == "dirac") {
      json components = json::array();
      for (const auto& [i, c] : calc.dirac().coeffs)
        components.push_back(json{{"basis", i}, {"value", alg.to_string(c)}});
      doc["components"] = components;
      return doc;
    }
    const auto fd =
        build_frame(alg, calc, build_frame_data(alg, build_gammas(ctx, tag, GammaMode::theorem2)));
    json entries = json::array();
    for (int a : ctx.alphabet()) {
      json components = json::array();
      for (int l : ctx.alphabet())
        components.push_back(
            json{{"basis", l}, {"value", alg.to_string(fd.theta_components.at({a, l}))}});
      entries.push_back(json{{"index", a}, {"components", components}});
    }
    doc["entries"] = entries;
    return doc;
  }
  throw ConfigError("unknown emit target '" + target +
                    "' (expected rmatrix|metric|projectors|lambdas|frame|dirac)");
}

}  // namespace qeuclid_tools
