#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gltlab {

/// Raw sections: section -> key -> value, in file order of first appearance.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

/// Line-oriented format: "[section]" headers, "key = value" pairs, '#'
/// comments. Throws configuration with line numbers for malformed lines.
ConfigSections parse_config_text(std::string_view text);

enum class ExperimentKind { distribution, acs, zero, sacs, spectrum, glt5 };
const char* to_string(ExperimentKind k);

/// Validated experiment description. Unused fields keep their defaults.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::distribution;
  std::string name = "experiment";
  std::optional<std::uint64_t> seed;
  std::filesystem::path output = "gltlab-out";
  bool plot = false;

  // [sequence]
  std::string expr;
  int d = 0;
  int r = 0;
  int default_degree = 16;
  std::string sizes_text;  ///< as written, for the summary

  // [check]
  std::string mode = "sigma";
  std::vector<std::string> basket;
  double tolerance = 0.05;
  bool scale_tolerance = true;
  double slack = 1.5;
  int grid_points = 64;
  double quadrature_tolerance = 1e-6;
  std::optional<double> range_tolerance;

  // [acs]
  std::string target = "inverse-square";
  std::filesystem::path target_coeffs;
  std::string family = "truncation";
  std::string family_template;
  std::vector<std::int64_t> m_values = {1, 2, 4, 8};

  // [zero]
  std::string zero_model = "spikes";
  std::vector<double> p_values = {1.0, 2.0};
  double zero_tolerance = 0.1;

  // [sacs]
  std::string sacs_base = "inverse-square";
  double c0 = 0.5;
  double w0 = 0.5;
  std::string s_design = "inverse-m";
  double s_value = 0.3;
  double violation = 0.25;
  std::int64_t trials = 1000;

  // [glt5]
  std::string glt5_model = "corner";

  std::vector<std::vector<std::int64_t>> sizes;
};

/// Validates every field and reports all violations at once, each message
/// starting with the offending field name. Relative file paths resolve
/// against base_dir.
ExperimentConfig make_config(const ConfigSections& sections, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& file);

struct ExperimentResult {
  bool pass = false;
  std::map<std::string, std::string> artifacts;  ///< file name -> bytes
  std::vector<std::string> warnings;
};

/// Runs the experiment entirely in memory; artifacts include summary.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes each artifact to a temporary file in the output directory and
/// renames them into place once all writes have succeeded.
void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

/// "64, 128" (one level) or "(16,16), (32,32)".
std::vector<std::vector<std::int64_t>> parse_size_list(std::string_view text);

}  // namespace gltlab
