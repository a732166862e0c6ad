#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qeuclid/expr.hpp"
#include "qeuclid/runner.hpp"
#include "qeuclid_tools/render.hpp"

namespace {

using namespace qeuclid;

std::vector<CalculusKind> parse_tags(const std::string& s) {
  if (s == "plain") return {CalculusKind::plain};
  if (s == "barred") return {CalculusKind::barred};
  if (s == "both") return {CalculusKind::plain, CalculusKind::barred};
  throw ConfigError("--calculus must be plain, barred or both, got '" + s + "'");
}

std::vector<SigmaBranch> parse_branches(const std::string& s) {
  if (s == "plus") return {SigmaBranch::plus};
  if (s == "minus") return {SigmaBranch::minus};
  if (s == "both") return {SigmaBranch::plus, SigmaBranch::minus};
  throw ConfigError("--sigma must be plus, minus or both, got '" + s + "'");
}

std::vector<int> parse_theorems(const std::string& s) {
  if (s == "all") return {1, 2, 3, 4, 5};
  if (s.size() == 1 && s[0] >= '1' && s[0] <= '5') return {s[0] - '0'};
  throw ConfigError("--theorem must be 1..5 or all, got '" + s + "'");
}

RunMode parse_mode(const std::string& s) {
  if (s == "exact") return RunMode::exact;
  if (s == "sampled") return RunMode::sampled;
  throw ConfigError("--mode must be exact or sampled, got '" + s + "'");
}

KConvention parse_kconv(const std::string& s) {
  if (s == "standard") return KConvention::standard;
  if (s == "h") return KConvention::h_equals_k;
  throw ConfigError("--k-convention must be standard or h, got '" + s + "'");
}

SignBranch parse_gamma_branch(const std::string& s) {
  if (s == "positive") return SignBranch::positive;
  if (s == "negative") return SignBranch::negative;
  throw ConfigError("--gamma-branch must be positive or negative, got '" + s + "'");
}

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "config error: cannot open output file '" << path << "'\n";
    return 2;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qeuclid: exact symbolic verification of the N-dimensional quantum Euclidean space"};
  app.require_subcommand(1);

  int n = 3;
  std::string calculus = "both";
  std::string sigma = "both";
  std::string theorem = "all";
  std::string mode = "exact";
  std::string kconv = "standard";
  std::string gamma_branch = "positive";
  std::string format = "json";
  std::string out_path;
  std::vector<std::string> families;
  bool all = false;
  bool timings = false;
  std::uint64_t seed = 20260815;
  int samples = 3;
  int threads = 0;
  std::string emit_target;
  std::string text;

  auto add_n = [&n](CLI::App* cmd) {
    cmd->add_option("--n", n, "Dimension N of the quantum space (N >= 3)")
        ->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "Run check families and report pass/fail");
  add_n(verify);
  verify->add_flag("--all", all, "Run every check family (the default selection)");
  verify->add_option("--family", families,
                     "Restrict to families: rmatrix space calculus theorem frame geometry");
  verify->add_option("--theorem", theorem, "Theorem selector: 1|2|3|4|5|all")
      ->capture_default_str();
  verify->add_option("--calculus", calculus, "Calculus selector: plain|barred|both")
      ->capture_default_str();
  verify->add_option("--sigma", sigma, "Flip-branch selector: plus|minus|both")
      ->capture_default_str();
  verify->add_option("--mode", mode, "Arithmetic mode: exact|sampled")->capture_default_str();
  verify->add_option("--seed", seed, "Sample-point seed (sampled mode)")->capture_default_str();
  verify->add_option("--samples", samples, "Number of sample points (sampled mode)")
      ->capture_default_str();
  verify->add_option("--k-convention", kconv, "Constant convention: standard|h")
      ->capture_default_str();
  verify
      ->add_option("--gamma-branch", gamma_branch,
                   "Square-root sign branch for the glue normalization: positive|negative")
      ->capture_default_str();
  verify->add_option("--format", format, "Report format: json|md")->capture_default_str();
  verify->add_option("--out", out_path, "Write the report to PATH instead of stdout");
  verify->add_flag("--timings", timings, "Include per-check wall times in the report");
  verify->add_option("--threads", threads,
                     "Worker threads (0 = auto; QEUCLID_THREADS caps either way)");

  auto* emit = app.add_subcommand("emit", "Print closed-form data as a JSON document");
  emit->add_option("target", emit_target, "rmatrix|metric|projectors|lambdas|frame|dirac")
      ->required();
  add_n(emit);
  emit->add_option("--calculus", calculus, "plain|barred (lambdas/frame/dirac targets)")
      ->capture_default_str();
  emit->add_option("--k-convention", kconv, "Constant convention: standard|h")
      ->capture_default_str();
  emit->add_option("--out", out_path, "Write the document to PATH instead of stdout");

  auto* normalize =
      app.add_subcommand("normalize", "Parse an expression and print its normal form");
  normalize->add_option("expr", text, "Expression text")->required();
  add_n(normalize);

  auto* parse_check =
      app.add_subcommand("parse-check", "Parse an expression and validate its indices");
  parse_check->add_option("expr", text, "Expression text")->required();
  add_n(parse_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(verify)) {
      RunConfig cfg;
      cfg.N = n;
      cfg.theorems = parse_theorems(theorem);
      cfg.tags = parse_tags(calculus);
      cfg.branches = parse_branches(sigma);
      cfg.mode = parse_mode(mode);
      cfg.seed = seed;
      cfg.samples = samples;
      cfg.k_convention = parse_kconv(kconv);
      cfg.gamma_branch = parse_gamma_branch(gamma_branch);
      cfg.timings = timings;
      cfg.threads = threads;
      if (!families.empty())
        cfg.families = families;
      else if (!all && theorem != "all")
        cfg.families = {"theorem"};
      validate_config(cfg);
      if (format != "json" && format != "md")
        throw ConfigError("--format must be json or md, got '" + format + "'");
      const RunResult rr = run_verify(cfg);
      const std::string rendered = format == "md"
                                       ? qeuclid_tools::render_markdown(cfg, rr)
                                       : qeuclid_tools::render_json(cfg, rr).dump(2) + "\n";
      if (const int rc = write_output(rendered, out_path)) return rc;
      return exit_code(rr);
    }

    if (app.got_subcommand(emit)) {
      RunConfig cfg;
      cfg.N = n;
      cfg.tags = parse_tags(calculus == "both" ? "plain" : calculus);
      cfg.k_convention = parse_kconv(kconv);
      const auto doc = qeuclid_tools::emit_document(cfg, emit_target);
      return write_output(doc.dump(2) + "\n", out_path);
    }

    if (app.got_subcommand(parse_check)) {
      try {
        parse_expr(text, n);
      } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
      }
      std::cout << "ok\n";
      return 0;
    }

    // normalize
    const auto ctx = make_exact_context(n);
    const Algebra<QScalar> alg(ctx);
    const auto tensors = build_tensors(ctx);
    const Calculus<QScalar> plain(alg, tensors, CalculusKind::plain);
    const Calculus<QScalar> barred(alg, tensors, CalculusKind::barred);
    const Evaluator<QScalar> ev(alg, &plain, &barred);
    try {
      const auto result = ev.eval(parse_expr(text, n));
      if (result.is_form())
        std::cout << form_to_string(alg, result.form, *result.form_tag) << '\n';
      else
        std::cout << alg.to_string(result.scalar) << '\n';
    } catch (const ParseError& e) {
      std::cerr << "parse error: " << e.what() << '\n';
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
