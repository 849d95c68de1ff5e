#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "gltlab/dsl.hpp"
#include "gltlab/error.hpp"
#include "gltlab/experiment.hpp"
#include "gltlab/report.hpp"
#include "gltlab/spectra.hpp"

namespace {

using namespace gltlab;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::numerical:
    case ErrorKind::quadrature:
    case ErrorKind::singular_evaluation:
    case ErrorKind::domain: return kNumerical;
    default: return kUsage;
  }
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  bool plot = false;
};

void apply_globals(ConfigSections& s, const Globals& g) {
  if (g.seed) s["experiment"]["seed"] = std::to_string(*g.seed);
  if (!g.out.empty()) s["experiment"]["output"] = g.out;
  if (g.plot) s["experiment"]["plot"] = "true";
}

int finish(const ExperimentResult& res, const ExperimentConfig& cfg, bool write) {
  if (write) write_artifacts(res, cfg.output);
  std::cout << res.artifacts.at("summary.json");
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << (res.pass ? "PASS" : "FAIL") << '\n';
  return res.pass ? kPass : kFail;
}

int run_sections(ConfigSections s, const Globals& g, bool always_write) {
  apply_globals(s, g);
  const auto cfg = make_config(s, ".");
  const auto res = run_experiment(cfg);
  return finish(res, cfg, always_write || !g.out.empty());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gltlab: spectral symbols, GLT calculus and approximating classes of matrix sequences"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "seed for stochastic experiments");
  app.add_option("--out", g.out, "output directory for artifacts");
  app.add_flag("--plot", g.plot, "emit SVG plots");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config file")->required();

  std::string expr;
  int d = 0, r = 0, degree = 16;
  auto add_expr_opts = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--expr", expr, "expression in the GLT expression language");
    if (required) o->required();
    sub->add_option("--d", d, "number of levels (default: inferred)");
    sub->add_option("--r", r, "block size (default: inferred)");
    sub->add_option("--degree", degree, "truncation degree for non-band-limited Toeplitz arguments");
  };

  auto* parse = app.add_subcommand("parse", "parse and print the canonical form of an expression");
  add_expr_opts(parse, true);

  std::string n_text, mode = "sigma";
  auto* spec = app.add_subcommand("spectrum", "print the spectrum of an expression at one size");
  add_expr_opts(spec, true);
  spec->add_option("--n", n_text, "size, e.g. 64 or 16,16")->required();
  spec->add_option("--mode", mode, "sigma or lambda")->check(CLI::IsMember({"sigma", "lambda"}));

  std::string sizes, basket, tol;
  auto* dist = app.add_subcommand("check-dist", "distribution check of an expression against its symbol");
  add_expr_opts(dist, true);
  dist->add_option("--sizes", sizes, "sizes, e.g. '64,128,256' or '(16,16),(32,32)'")->required();
  dist->add_option("--mode", mode, "sigma or lambda")->check(CLI::IsMember({"sigma", "lambda"}));
  dist->add_option("--basket", basket, "test functions, e.g. 'x,x2,bump1'");
  dist->add_option("--tol", tol, "error tolerance at the largest size");

  std::string target = "inverse-square", family = "truncation", templ, m_values = "1,2,4,8";
  auto* acs = app.add_subcommand("check-acs", "approximating class check");
  add_expr_opts(acs, false);
  acs->add_option("--target", target, "inverse-square or expr");
  acs->add_option("--family", family, "truncation, offset or template");
  acs->add_option("--template", templ, "family expression containing {m}");
  acs->add_option("--m", m_values, "approximation indices");
  acs->add_option("--sizes", sizes, "sizes")->required();

  std::string model, p_values = "1,2,inf";
  auto* zero = app.add_subcommand("check-zero", "zero-distribution test");
  add_expr_opts(zero, false);
  zero->add_option("--model", model, "spikes, rank-one, identity or expr")->required();
  zero->add_option("--p", p_values, "Schatten exponents");
  zero->add_option("--sizes", sizes, "sizes")->required();
  zero->add_option("--tol", tol, "tolerance at the largest size");

  std::string trials = "1000", s_design = "inverse-m";
  auto* sacs = app.add_subcommand("check-sacs", "stochastic approximating class Monte Carlo check");
  sacs->add_option("--trials", trials, "trials per (m, n)");
  sacs->add_option("--m", m_values, "approximation indices");
  sacs->add_option("--s-design", s_design, "inverse-m, constant or zero");
  sacs->add_option("--sizes", sizes, "sizes")->required();

  auto* glt5 = app.add_subcommand("check-glt5", "quasi-Hermitian split check");
  add_expr_opts(glt5, false);
  glt5->add_option("--model", model, "hermitian, corner, shift or expr")->required();
  glt5->add_option("--sizes", sizes, "sizes")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  if (seed_opt->count()) g.seed = seed_value;

  auto sequence = [&](ConfigSections& s) {
    if (!expr.empty()) s["sequence"]["expr"] = expr;
    if (d) s["sequence"]["d"] = std::to_string(d);
    if (r) s["sequence"]["r"] = std::to_string(r);
    s["sequence"]["default_degree"] = std::to_string(degree);
    if (!sizes.empty()) s["sequence"]["sizes"] = sizes;
  };

  try {
    if (run->parsed()) {
      auto cfg = load_config(config_path);
      if (g.seed) cfg.seed = g.seed;
      if (!g.out.empty()) cfg.output = g.out;
      if (g.plot) cfg.plot = true;
      if (cfg.kind == ExperimentKind::sacs && !cfg.seed)
        throw Error(ErrorKind::configuration, "seed: required for stochastic experiments");
      const auto res = run_experiment(cfg);
      return finish(res, cfg, true);
    }
    if (parse->parsed()) {
      const auto e = dsl::parse(expr, {d, r, degree});
      std::cout << dsl::format(e) << '\n';
      std::cout << "d = " << e.d() << ", r = " << e.r() << ", hermitian = " << (e.hermitian() ? "yes" : "no") << '\n';
      try {
        std::cout << "symbol: " << symbol_of(e).describe() << '\n';
      } catch (const Error& err) {
        std::cout << "symbol: undefined (" << err.what() << ")\n";
      }
      return kPass;
    }
    if (spec->parsed()) {
      const auto e = dsl::parse(expr, {d, r, degree});
      const auto n = MultiIndex::parse(n_text);
      const auto m = materialize(e, n);
      for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
      const auto values = spectrum(m.matrix.values, mode == "lambda" ? SpectralMode::eigen : SpectralMode::singular);
      std::ostringstream csv;
      csv << "index,re,im\n";
      for (std::size_t i = 0; i < values.size(); ++i)
        csv << i + 1 << ',' << report::number(values[i].real()) << ',' << report::number(values[i].imag()) << '\n';
      if (!g.out.empty()) {
        ExperimentResult res;
        res.pass = true;
        res.artifacts["spectrum.csv"] = csv.str();
        write_artifacts(res, g.out);
      } else {
        std::cout << csv.str();
      }
      return kPass;
    }
    ConfigSections s;
    if (dist->parsed()) {
      s["experiment"]["kind"] = "distribution";
      sequence(s);
      s["check"]["mode"] = mode;
      if (!basket.empty()) s["check"]["basket"] = basket;
      if (!tol.empty()) s["check"]["tolerance"] = tol;
    } else if (acs->parsed()) {
      s["experiment"]["kind"] = "acs";
      sequence(s);
      s["acs"]["target"] = target;
      s["acs"]["family"] = family;
      if (!templ.empty()) s["acs"]["template"] = templ;
      s["acs"]["m_values"] = m_values;
    } else if (zero->parsed()) {
      s["experiment"]["kind"] = "zero";
      sequence(s);
      s["zero"]["model"] = model;
      s["zero"]["p"] = p_values;
      if (!tol.empty()) s["zero"]["tolerance"] = tol;
    } else if (sacs->parsed()) {
      s["experiment"]["kind"] = "sacs";
      sequence(s);
      s["sacs"]["trials"] = trials;
      s["sacs"]["m_values"] = m_values;
      s["sacs"]["s_design"] = s_design;
    } else if (glt5->parsed()) {
      s["experiment"]["kind"] = "glt5";
      sequence(s);
      s["glt5"]["model"] = model;
    }
    return run_sections(std::move(s), g, false);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.line() << ":" << e.column() << ": " << e.message() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
