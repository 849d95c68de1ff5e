#include "gltlab/experiment.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gltlab/acs.hpp"
#include "gltlab/dsl.hpp"
#include "gltlab/error.hpp"
#include "gltlab/glt.hpp"
#include "gltlab/report.hpp"
#include "gltlab/spectra.hpp"

namespace gltlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_int(const std::string& s, std::int64_t& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_uint(const std::string& s, std::uint64_t& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_real(const std::string& s, double& out) {
  if (s == "inf" || s == "infinity") {
    out = INFINITY;
    return true;
  }
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config text

ConfigSections parse_config_text(std::string_view text) {
  ConfigSections out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw Error(ErrorKind::configuration, "line " + std::to_string(number) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      out[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::configuration, "line " + std::to_string(number) + ": expected 'key = value'");
    if (section.empty())
      throw Error(ErrorKind::configuration, "line " + std::to_string(number) + ": key outside any section");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::configuration, "line " + std::to_string(number) + ": empty key");
    if (out[section].count(key))
      throw Error(ErrorKind::configuration, "line " + std::to_string(number) + ": duplicate key '" + key + "'");
    out[section][key] = trim(t.substr(eq + 1));
  }
  return out;
}

std::vector<std::vector<std::int64_t>> parse_size_list(std::string_view text) {
  std::vector<std::vector<std::int64_t>> out;
  const std::string s(text);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  };
  auto read_int = [&]() {
    skip();
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '-')) ++j;
    std::int64_t v = 0;
    if (j == i || !parse_int(s.substr(i, j - i), v))
      throw Error(ErrorKind::configuration, "sizes: expected an integer at offset " + std::to_string(i));
    i = j;
    return v;
  };
  skip();
  while (i < s.size()) {
    std::vector<std::int64_t> entry;
    if (s[i] == '(') {
      ++i;
      for (;;) {
        entry.push_back(read_int());
        skip();
        if (i < s.size() && s[i] == ',') {
          ++i;
          continue;
        }
        if (i < s.size() && s[i] == ')') {
          ++i;
          break;
        }
        throw Error(ErrorKind::configuration, "sizes: unterminated multi-index");
      }
    } else {
      entry.push_back(read_int());
    }
    out.push_back(std::move(entry));
    skip();
    if (i < s.size()) {
      if (s[i] != ',') throw Error(ErrorKind::configuration, "sizes: expected ',' between sizes");
      ++i;
      skip();
    }
  }
  return out;
}

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::distribution: return "distribution";
    case ExperimentKind::acs: return "acs";
    case ExperimentKind::zero: return "zero";
    case ExperimentKind::sacs: return "sacs";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::glt5: return "glt5";
  }
  return "?";
}

ExperimentConfig make_config(const ConfigSections& sections, const std::filesystem::path& base_dir) {
  static const std::map<std::string, std::vector<std::string>> known = {
      {"experiment", {"kind", "name", "seed", "output", "plot"}},
      {"sequence", {"expr", "d", "r", "default_degree", "sizes"}},
      {"check",
       {"mode", "basket", "tolerance", "scale_tolerance", "slack", "grid_points", "quadrature_tolerance",
        "range_tolerance"}},
      {"acs", {"target", "target_coeffs", "family", "template", "m_values"}},
      {"zero", {"model", "p", "tolerance"}},
      {"sacs", {"base", "c0", "w0", "s_design", "s_value", "violation", "m_values", "trials"}},
      {"glt5", {"model"}},
  };
  std::vector<std::string> errors;
  for (const auto& [sec, kv] : sections) {
    auto it = known.find(sec);
    if (it == known.end()) {
      errors.push_back(sec + ": unknown section");
      continue;
    }
    for (const auto& [k, v] : kv)
      if (std::find(it->second.begin(), it->second.end(), k) == it->second.end())
        errors.push_back(k + ": unknown key in [" + sec + "]");
  }
  auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    auto s = sections.find(sec);
    if (s == sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  };
  auto real_field = [&](const std::string& sec, const std::string& key, double& dst, double lo, double hi) {
    if (auto v = get(sec, key)) {
      double x = 0;
      if (!parse_real(*v, x) || !(x >= lo && x <= hi))
        errors.push_back(key + ": expected a number in [" + report::number(lo) + ", " + report::number(hi) + "]");
      else
        dst = x;
    }
  };
  auto int_field = [&](const std::string& sec, const std::string& key, auto& dst, std::int64_t lo, std::int64_t hi) {
    if (auto v = get(sec, key)) {
      std::int64_t x = 0;
      if (!parse_int(*v, x) || x < lo || x > hi)
        errors.push_back(key + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      else
        dst = static_cast<std::remove_reference_t<decltype(dst)>>(x);
    }
  };
  auto choice = [&](const std::string& sec, const std::string& key, std::string& dst,
                    const std::vector<std::string>& allowed) {
    if (auto v = get(sec, key)) {
      if (std::find(allowed.begin(), allowed.end(), *v) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        errors.push_back(key + ": '" + *v + "' is not one of " + list);
      } else {
        dst = *v;
      }
    }
  };
  auto m_list = [&](const std::string& sec, std::vector<std::int64_t>& dst) {
    if (auto v = get(sec, "m_values")) {
      std::vector<std::int64_t> out;
      bool ok = true;
      for (const auto& item : split_list(*v)) {
        std::int64_t x = 0;
        if (!parse_int(item, x) || x < 1) ok = false;
        out.push_back(x);
      }
      for (std::size_t i = 1; ok && i < out.size(); ++i)
        if (out[i] <= out[i - 1]) ok = false;
      if (!ok || out.empty())
        errors.push_back("m_values: expected strictly increasing positive integers");
      else
        dst = out;
    }
  };

  ExperimentConfig c;
  std::string kind = "distribution";
  if (auto v = get("experiment", "kind")) {
    kind = *v;
  } else {
    errors.push_back("kind: missing ([experiment] kind = distribution | acs | zero | sacs | spectrum | glt5)");
  }
  static const std::map<std::string, ExperimentKind> kinds = {
      {"distribution", ExperimentKind::distribution}, {"acs", ExperimentKind::acs},
      {"zero", ExperimentKind::zero},                 {"sacs", ExperimentKind::sacs},
      {"spectrum", ExperimentKind::spectrum},         {"glt5", ExperimentKind::glt5}};
  if (auto it = kinds.find(kind); it != kinds.end())
    c.kind = it->second;
  else
    errors.push_back("kind: unknown experiment kind '" + kind + "'");
  if (auto v = get("experiment", "name")) c.name = *v;
  if (auto v = get("experiment", "seed")) {
    std::uint64_t s = 0;
    if (!parse_uint(*v, s))
      errors.push_back("seed: expected a non-negative 64-bit integer");
    else
      c.seed = s;
  }
  if (auto v = get("experiment", "output")) {
    std::filesystem::path p(*v);
    c.output = p.is_relative() ? base_dir / p : p;
  }
  auto bool_field = [&](const std::string& sec, const std::string& key, bool& dst) {
    if (auto v = get(sec, key)) {
      if (*v == "true" || *v == "yes" || *v == "1")
        dst = true;
      else if (*v == "false" || *v == "no" || *v == "0")
        dst = false;
      else
        errors.push_back(key + ": expected true or false");
    }
  };
  bool_field("experiment", "plot", c.plot);

  if (auto v = get("sequence", "expr")) c.expr = *v;
  int_field("sequence", "d", c.d, 0, 8);
  int_field("sequence", "r", c.r, 0, 64);
  int_field("sequence", "default_degree", c.default_degree, 0, 4096);
  if (auto v = get("sequence", "sizes")) {
    c.sizes_text = *v;
    try {
      c.sizes = parse_size_list(*v);
      if (c.sizes.empty()) throw Error(ErrorKind::configuration, "sizes: empty list");
      std::vector<MultiIndex> mi;
      for (const auto& s : c.sizes) mi.emplace_back(s);
      validate_sizes(mi, static_cast<int>(mi.front().dim()));
    } catch (const Error& e) {
      std::string msg = e.what();
      errors.push_back(msg.rfind("sizes", 0) == 0 ? msg : "sizes: " + msg);
    }
  } else {
    errors.push_back("sizes: missing ([sequence] sizes = 64, 128, ...)");
  }

  choice("check", "mode", c.mode, {"sigma", "lambda"});
  if (auto v = get("check", "basket")) c.basket = split_list(*v);
  real_field("check", "tolerance", c.tolerance, 0.0, 1e300);
  bool_field("check", "scale_tolerance", c.scale_tolerance);
  real_field("check", "slack", c.slack, 1.0, 1e6);
  int_field("check", "grid_points", c.grid_points, 1, 1 << 16);
  real_field("check", "quadrature_tolerance", c.quadrature_tolerance, 0.0, 1.0);
  if (get("check", "range_tolerance")) {
    double x = 0;
    real_field("check", "range_tolerance", x, 0.0, 1e300);
    c.range_tolerance = x;
  }
  if (!c.basket.empty()) {
    try {
      make_basket(c.basket, 0.0, 1.0);
    } catch (const Error& e) {
      errors.push_back(std::string("basket: ") + e.what());
    }
  }

  choice("acs", "target", c.target, {"inverse-square", "expr", "coefficients"});
  if (auto v = get("acs", "target_coeffs")) {
    std::filesystem::path p(*v);
    c.target_coeffs = p.is_relative() ? base_dir / p : p;
    if (!std::filesystem::exists(c.target_coeffs))
      errors.push_back("target_coeffs: file '" + c.target_coeffs.string() + "' does not exist");
  }
  choice("acs", "family", c.family, {"truncation", "offset", "template"});
  if (auto v = get("acs", "template")) c.family_template = *v;
  m_list("acs", c.m_values);

  choice("zero", "model", c.zero_model, {"spikes", "rank-one", "identity", "expr"});
  if (auto v = get("zero", "p")) {
    std::vector<double> ps;
    bool ok = true;
    for (const auto& item : split_list(*v)) {
      double x = 0;
      if (!parse_real(item, x) || !(x >= 1.0)) ok = false;
      ps.push_back(x);
    }
    if (!ok || ps.empty())
      errors.push_back("p: expected Schatten exponents >= 1 (or inf)");
    else
      c.p_values = ps;
  }
  real_field("zero", "tolerance", c.zero_tolerance, 0.0, 1e300);

  choice("sacs", "base", c.sacs_base, {"inverse-square", "expr"});
  real_field("sacs", "c0", c.c0, 0.0, 1.0);
  real_field("sacs", "w0", c.w0, 0.0, 1e300);
  choice("sacs", "s_design", c.s_design, {"inverse-m", "constant", "zero"});
  real_field("sacs", "s_value", c.s_value, 0.0, 1.0);
  real_field("sacs", "violation", c.violation, 0.0, 1.0);
  if (c.kind == ExperimentKind::sacs) m_list("sacs", c.m_values);
  int_field("sacs", "trials", c.trials, 100, 100000000);

  choice("glt5", "model", c.glt5_model, {"hermitian", "corner", "shift", "expr"});

  const bool needs_expr = c.kind == ExperimentKind::distribution || c.kind == ExperimentKind::spectrum ||
                          (c.kind == ExperimentKind::acs && c.target == "expr") ||
                          (c.kind == ExperimentKind::zero && c.zero_model == "expr") ||
                          (c.kind == ExperimentKind::sacs && c.sacs_base == "expr") ||
                          (c.kind == ExperimentKind::glt5 && c.glt5_model == "expr");
  if (needs_expr && c.expr.empty()) errors.push_back("expr: missing ([sequence] expr = ...)");
  if (!c.expr.empty()) {
    try {
      dsl::parse(c.expr, {c.d, c.r, c.default_degree});
    } catch (const ParseError& e) {
      errors.push_back("expr: " + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.message());
    } catch (const Error& e) {
      errors.push_back(std::string("expr: ") + e.what());
    }
  }
  if (c.kind == ExperimentKind::sacs && !c.seed) errors.push_back("seed: required for stochastic experiments");
  if (c.kind == ExperimentKind::acs && c.target == "coefficients" && c.target_coeffs.empty())
    errors.push_back("target_coeffs: required when target = coefficients");
  if (c.kind == ExperimentKind::acs && c.family == "template" && c.family_template.find("{m}") == std::string::npos)
    errors.push_back("template: expected an expression containing {m}");
  const bool one_level = c.kind == ExperimentKind::acs || c.kind == ExperimentKind::sacs ||
                         (c.kind == ExperimentKind::zero && c.zero_model != "expr") ||
                         (c.kind == ExperimentKind::glt5 && c.glt5_model != "expr");
  const bool builtin_target = (c.kind == ExperimentKind::acs && c.target == "inverse-square") ||
                              (c.kind == ExperimentKind::sacs && c.sacs_base == "inverse-square") ||
                              (c.kind == ExperimentKind::glt5 && c.glt5_model != "expr");
  if (one_level && builtin_target && !c.sizes.empty() && c.sizes.front().size() != 1)
    errors.push_back("sizes: built-in models are one-level; give plain integers");

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorKind::configuration, msg);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open config file '" + file.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return make_config(parse_config_text(ss.str()), file.parent_path().empty() ? "." : file.parent_path());
}

// ---------------------------------------------------------------------------
// Runner

namespace {

using nlohmann::json;

std::vector<MultiIndex> to_multi(const std::vector<std::vector<std::int64_t>>& sizes) {
  std::vector<MultiIndex> out;
  for (const auto& s : sizes) out.emplace_back(s);
  return out;
}

GltExpr parse_expr(const ExperimentConfig& c, const std::string& text) {
  return dsl::parse(text, {c.d, c.r, c.default_degree});
}

TrigPolynomial inverse_square(std::int64_t max_offset) {
  TrigPolynomial f(1, 1);
  for (std::int64_t k = -max_offset; k <= max_offset; ++k)
    f.set(MultiIndex{k}, CMatrix::Constant(1, 1, 1.0 / (1.0 + static_cast<double>(k * k))));
  return f;
}

std::int64_t largest_entry(const std::vector<MultiIndex>& sizes) {
  std::int64_t m = 1;
  for (const auto& n : sizes) m = std::max(m, n.max_abs_entry());
  return m;
}

MatrixSequence materializer(const GltExpr& e, std::vector<std::string>& warnings) {
  return [e, &warnings](const MultiIndex& n) {
    auto m = materialize(e, n);
    warnings.insert(warnings.end(), m.warnings.begin(), m.warnings.end());
    return m.matrix.values;
  };
}

TrigPolynomial toeplitz_coefficients(const GltExpr& e, const char* field) {
  if (e.kind() != GltKind::toeplitz)
    throw Error(ErrorKind::configuration, std::string(field) + ": truncation needs a single Toeplitz expression");
  return e.toeplitz_leaf().coefficients;
}

json verdict(const std::string& criterion, const std::string& anchor, bool pass) {
  return json{{"criterion", criterion}, {"anchor", anchor}, {"pass", pass}};
}

std::string svg_trend(const std::string& title, const std::string& ylabel, const std::vector<report::Series>& s) {
  return report::loglog_chart(title, "matrix order d_n", ylabel, s);
}

void run_distribution(const ExperimentConfig& c, ExperimentResult& res, json& summary) {
  const auto e = parse_expr(c, c.expr);
  DistributionOptions opt;
  opt.mode = c.mode == "lambda" ? SpectralMode::eigen : SpectralMode::singular;
  opt.basket = c.basket;
  opt.tolerance = c.tolerance;
  opt.slack = c.slack;
  opt.scale_tolerance = c.scale_tolerance;
  opt.quadrature.initial_points = c.grid_points;
  opt.quadrature.tolerance = c.quadrature_tolerance;
  MaterializeOptions mopt;
  const auto rep = glt1_verify(e, to_multi(c.sizes), opt, mopt);
  res.artifacts["distribution.csv"] = rep.to_csv();
  if (c.plot) res.artifacts["distribution.svg"] = rep.to_svg();
  for (const auto& [id, ok] : rep.function_verdicts)
    summary["verdicts"].push_back(verdict("test function " + id,
                                          std::string("distribution of ") +
                                              (opt.mode == SpectralMode::eigen ? "eigenvalues" : "singular values") +
                                              " given by the symbol",
                                          ok));
  summary["symbol_range"] = {rep.symbol_lo, rep.symbol_hi};
  summary["tolerance_scales"] = rep.function_scales;
  summary["outliers"] = rep.outliers;
  summary["expr"] = dsl::format(e);
  res.pass = rep.pass;
}

void run_spectrum(const ExperimentConfig& c, ExperimentResult& res, json& summary) {
  const auto e = parse_expr(c, c.expr);
  const auto mode = c.mode == "lambda" ? SpectralMode::eigen : SpectralMode::singular;
  std::ostringstream csv;
  csv << "n,d_n,mode,index,re,im\n";
  std::vector<cplx> all;
  for (const auto& n : to_multi(c.sizes)) {
    auto m = materialize(e, n);
    res.warnings.insert(res.warnings.end(), m.warnings.begin(), m.warnings.end());
    const auto values = spectrum(m.matrix.values, mode);
    for (std::size_t i = 0; i < values.size(); ++i)
      csv << report::csv_field(n.to_string()) << ',' << values.size() << ',' << to_string(mode) << ',' << i + 1 << ','
          << report::number(values[i].real()) << ',' << report::number(values[i].imag()) << '\n';
    all.insert(all.end(), values.begin(), values.end());
  }
  res.artifacts["spectrum.csv"] = csv.str();
  res.pass = true;
  if (c.range_tolerance) {
    const auto rv = range_check(all, symbol_of(e), mode, *c.range_tolerance);
    summary["range_worst_distance"] = rv.worst_distance;
    summary["verdicts"].push_back(verdict("symbol range inside spectral hull", "range of the symbol", rv.pass));
    res.pass = rv.pass;
  }
  summary["expr"] = dsl::format(e);
}

void write_bounds(ExperimentResult& res, const std::string& file, const AcsCertificate& cert) {
  std::ostringstream out;
  out << "m,c,omega,s\n";
  for (std::size_t i = 0; i < cert.m_values.size(); ++i)
    out << cert.m_values[i] << ',' << report::number(cert.c[i]) << ',' << report::number(cert.omega[i]) << ','
        << report::number(cert.s[i]) << '\n';
  res.artifacts[file] = out.str();
}

void run_acs(const ExperimentConfig& c, ExperimentResult& res, json& summary) {
  const auto sizes = to_multi(c.sizes);
  MatrixSequence target;
  std::optional<TrigPolynomial> f;
  if (c.target == "inverse-square") {
    f = inverse_square(largest_entry(sizes));
  } else if (c.target == "coefficients") {
    std::ifstream in(c.target_coeffs);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + c.target_coeffs.string() + "'");
    f = read_coefficients_csv(in);
  }
  std::optional<GltExpr> target_expr;
  if (f) {
    target = [f](const MultiIndex& n) { return toeplitz(*f, n).values; };
  } else {
    target_expr = parse_expr(c, c.expr);
    target = materializer(*target_expr, res.warnings);
  }
  SequenceFamily family;
  if (c.family == "truncation") {
    const TrigPolynomial base = f ? *f : toeplitz_coefficients(*target_expr, "expr");
    family = [base](std::int64_t m, const MultiIndex& n) {
      return toeplitz(base.truncated(MultiIndex::filled(n.dim(), m)), n).values;
    };
  } else if (c.family == "offset") {
    family = [target](std::int64_t, const MultiIndex& n) {
      CMatrix a = target(n);
      return CMatrix(a + CMatrix::Identity(a.rows(), a.cols()));
    };
  } else {
    family = [&c, &res](std::int64_t m, const MultiIndex& n) {
      std::string text = c.family_template;
      for (auto pos = text.find("{m}"); pos != std::string::npos; pos = text.find("{m}"))
        text.replace(pos, 3, std::to_string(m));
      auto mat = materialize(parse_expr(c, text), n);
      res.warnings.insert(res.warnings.end(), mat.warnings.begin(), mat.warnings.end());
      return mat.matrix.values;
    };
  }
  const auto cert = acs_check(family, target, c.m_values, sizes);
  res.artifacts["acs_certificate.csv"] = cert.to_csv();
  write_bounds(res, "acs_bounds.csv", cert);
  if (c.plot) {
    report::Series sc{"c(m)", {}, cert.c}, so{"omega(m)", {}, cert.omega};
    for (auto m : cert.m_values) sc.x.push_back(static_cast<double>(m)), so.x.push_back(static_cast<double>(m));
    res.artifacts["acs_bounds.svg"] = report::loglog_chart("approximating class bounds", "m", "bound", {sc, so});
  }
  summary["splitting_rule"] = cert.splitting_rule;
  summary["verdicts"].push_back(
      verdict("c(m) and omega(m) trend to zero", "approximating class of sequences", cert.pass));
  res.pass = cert.pass;
}

void run_zero(const ExperimentConfig& c, ExperimentResult& res, json& summary) {
  const auto sizes = to_multi(c.sizes);
  MatrixSequence seq;
  if (c.zero_model == "spikes") {
    seq = [](const MultiIndex& n) {
      const auto order = nu(n);
      CMatrix a = CMatrix::Zero(order, order);
      const auto k = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(order))));
      for (std::int64_t i = 0; i < k; ++i) a(i, i) = 1.0;
      return a;
    };
  } else if (c.zero_model == "rank-one") {
    seq = [](const MultiIndex& n) {
      const auto order = nu(n);
      CMatrix a = CMatrix::Zero(order, order);
      a(0, 0) = 1.0;
      return a;
    };
  } else if (c.zero_model == "identity") {
    seq = [](const MultiIndex& n) {
      const auto order = nu(n);
      return CMatrix(CMatrix::Identity(order, order));
    };
  } else {
    seq = materializer(parse_expr(c, c.expr), res.warnings);
  }
  bool all = true;
  std::vector<report::Series> series;
  for (double p : c.p_values) {
    ZeroTestOptions opt;
    opt.tolerance = c.zero_tolerance;
    opt.slack = c.slack;
    const auto r = zero_distribution_test(seq, p, sizes, opt);
    const std::string tag = std::isinf(p) ? "inf" : report::number(p);
    res.artifacts["zero_p" + tag + ".csv"] = r.to_csv();
    summary["verdicts"].push_back(verdict("p = " + tag, "zero-distributed sequence", r.pass));
    summary["details"]["p = " + tag] = {{"schatten_trend", r.schatten_pass}, {"splitting_trend", r.splitting_pass}};
    all = all && r.pass;
    report::Series s{"p = " + tag, {}, r.normalized_norms};
    for (auto o : r.orders) s.x.push_back(static_cast<double>(o));
    series.push_back(std::move(s));
  }
  if (c.plot) res.artifacts["zero.svg"] = svg_trend("normalized Schatten norms", "||A||_p / d_n^(1/p)", series);
  res.pass = all;
}

void run_sacs(const ExperimentConfig& c, ExperimentResult& res, json& summary) {
  const auto sizes = to_multi(c.sizes);
  const TrigPolynomial base = c.sacs_base == "inverse-square" ? inverse_square(largest_entry(sizes))
                                                              : toeplitz_coefficients(parse_expr(c, c.expr), "expr");
  TruncationModelParams params;
  params.c0 = c.c0;
  params.w0 = c.w0;
  params.s_design = c.s_design == "zero"       ? TruncationModelParams::SDesign::zero
                    : c.s_design == "constant" ? TruncationModelParams::SDesign::constant
                                               : TruncationModelParams::SDesign::inverse_m;
  params.s_value = c.s_value;
  params.violation = c.violation;
  const auto model = truncation_model(base, params, *c.seed);
  const auto cert = sacs_check(model, c.m_values, sizes, c.trials);
  res.artifacts["sacs_certificate.csv"] = cert.to_csv();
  write_bounds(res, "sacs_bounds.csv", cert);
  summary["hoeffding_radius"] = cert.hoeffding_radius;
  summary["trials"] = cert.trials;
  summary["verdicts"].push_back(
      verdict("event frequencies and vanishing c, omega, s", "stochastic approximating class", cert.pass));
  res.pass = cert.pass;
}

void run_glt5(const ExperimentConfig& c, ExperimentResult& res, json& summary) {
  const auto sizes = to_multi(c.sizes);
  MatrixSequence seq;
  TrigPolynomial lap(1, 1);
  lap.set(MultiIndex{0}, CMatrix::Constant(1, 1, 2.0));
  lap.set(MultiIndex{1}, CMatrix::Constant(1, 1, -1.0));
  lap.set(MultiIndex{-1}, CMatrix::Constant(1, 1, -1.0));
  if (c.glt5_model == "hermitian") {
    seq = [lap](const MultiIndex& n) { return toeplitz(lap, n).values; };
  } else if (c.glt5_model == "corner") {
    seq = [lap](const MultiIndex& n) {
      CMatrix a = toeplitz(lap, n).values;
      a(0, a.cols() - 1) += cplx(0.0, 1.0 / static_cast<double>(n[0]));
      return a;
    };
  } else if (c.glt5_model == "shift") {
    TrigPolynomial shift(1, 1);
    shift.set(MultiIndex{1}, CMatrix::Constant(1, 1, 1.0));
    seq = [shift](const MultiIndex& n) { return toeplitz(shift, n).values; };
  } else {
    seq = materializer(parse_expr(c, c.expr), res.warnings);
  }
  const auto split = glt5_split_check(seq, sizes);
  res.artifacts["glt5_split.csv"] = split.to_csv();
  summary["verdicts"].push_back(verdict("bounded Hermitian split", "quasi-Hermitian split", split.bounded));
  summary["verdicts"].push_back(
      verdict("remainder trace norm vanishes", "quasi-Hermitian split", split.trace_vanishing));
  res.pass = split.pass;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c) {
  ExperimentResult res;
  json summary;
  summary["experiment"] = c.name;
  summary["kind"] = to_string(c.kind);
  summary["sizes"] = c.sizes;
  summary["verdicts"] = json::array();
  if (c.seed) summary["seed"] = *c.seed;
  switch (c.kind) {
    case ExperimentKind::distribution: run_distribution(c, res, summary); break;
    case ExperimentKind::spectrum: run_spectrum(c, res, summary); break;
    case ExperimentKind::acs: run_acs(c, res, summary); break;
    case ExperimentKind::zero: run_zero(c, res, summary); break;
    case ExperimentKind::sacs: run_sacs(c, res, summary); break;
    case ExperimentKind::glt5: run_glt5(c, res, summary); break;
  }
  summary["pass"] = res.pass;
  summary["warnings"] = res.warnings;
  std::vector<std::string> files;
  for (const auto& [name, bytes] : res.artifacts) files.push_back(name);
  summary["artifacts"] = files;
  res.artifacts["summary.json"] = summary.dump(2) + "\n";
  return res;
}

void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + dir.string() + "': " + ec.message());
  const std::string suffix = ".tmp-" + std::to_string(::getpid());
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
  auto cleanup = [&] {
    for (const auto& [tmp, final_path] : staged) std::filesystem::remove(tmp, ec);
  };
  for (const auto& [name, bytes] : result.artifacts) {
    const auto final_path = dir / name;
    const auto tmp = dir / (name + suffix);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    staged.emplace_back(tmp, final_path);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())) || !out.flush()) {
      cleanup();
      throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    }
  }
  for (const auto& [tmp, final_path] : staged) {
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) {
      cleanup();
      throw Error(ErrorKind::io, "cannot rename '" + tmp.string() + "': " + ec.message());
    }
  }
}

}  // namespace gltlab
