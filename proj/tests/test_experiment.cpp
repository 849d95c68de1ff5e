#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/experiment.hpp"
#include "gltlab/report.hpp"
#include "json.hpp"

using namespace gltlab;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = GLTLAB_CONFIG_DIR;

ExperimentConfig config_from(const std::string& text) { return make_config(parse_config_text(text)); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::vector<std::string> error_lines(const std::string& text) {
  try {
    config_from(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::configuration);
    std::vector<std::string> out;
    std::istringstream in(e.what());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) out.push_back(line.substr(line.find_first_not_of(' ')));
    return out;
  }
  ADD_FAILURE() << "config accepted:\n" << text;
  return {};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gltlab-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GLTLAB_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kLaplacian = R"(
[experiment]
kind = distribution
name = lap
[sequence]
expr = T(2 - 2*cos(t1))
sizes = 16, 32, 64
[check]
mode = lambda
)";

}  // namespace

TEST(Config, ParsesSectionsAndComments) {
  const auto s = parse_config_text("# top\n[experiment]\nkind = zero  \n\n[sequence]\nsizes = 8, 16 # trailing\n");
  EXPECT_EQ(s.at("experiment").at("kind"), "zero");
  EXPECT_EQ(s.at("sequence").at("sizes"), "8, 16");
}

TEST(Config, MalformedLinesNameTheLine) {
  for (const char* text : {"[experiment\nkind = zero\n", "kind = zero\n", "[experiment]\nkind zero\n",
                           "[experiment]\nkind = a\nkind = b\n"}) {
    try {
      parse_config_text(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::configuration);
      EXPECT_EQ(std::string(e.what()).rfind("line ", 0), 0u) << e.what();
    }
  }
}

TEST(Config, ValidConfigLoads) {
  const auto c = config_from(kLaplacian);
  EXPECT_EQ(c.kind, ExperimentKind::distribution);
  EXPECT_EQ(c.sizes.size(), 3u);
  EXPECT_EQ(c.mode, "lambda");
  for (const auto& entry : fs::directory_iterator(kConfigDir)) {
    if (entry.path().extension() == ".ini") {
      EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    }
  }
}

TEST(Config, ReportsEveryViolationByField) {
  const auto errors = error_lines(R"(
[experiment]
kind = sacs
[sequence]
sizes = 32, 16
[check]
tolerance = -1
mode = both
[sacs]
trials = 5
[bogus]
x = 1
)");
  auto has = [&](const std::string& field) {
    return std::any_of(errors.begin(), errors.end(), [&](const std::string& l) { return l.rfind(field + ":", 0) == 0; });
  };
  EXPECT_TRUE(has("sizes"));
  EXPECT_TRUE(has("tolerance"));
  EXPECT_TRUE(has("mode"));
  EXPECT_TRUE(has("trials"));
  EXPECT_TRUE(has("seed"));
  EXPECT_TRUE(has("bogus"));
  EXPECT_EQ(errors.size(), 6u);
}

TEST(Config, MissingFilesAndBadExpressions) {
  auto errors = error_lines("[experiment]\nkind = acs\n[sequence]\nsizes = 8, 16\n[acs]\ntarget = coefficients\n"
                            "target_coeffs = no/such/file.csv\n");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].rfind("target_coeffs:", 0), 0u);
  errors = error_lines("[experiment]\nkind = distribution\n[sequence]\nexpr = T(x1)\nsizes = 8, 16\n");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].rfind("expr: 1:3:", 0), 0u) << errors[0];
}

TEST(Config, SizeLists) {
  EXPECT_EQ(parse_size_list("64, 128"), (std::vector<std::vector<std::int64_t>>{{64}, {128}}));
  EXPECT_EQ(parse_size_list("(16,16), (32, 32)"), (std::vector<std::vector<std::int64_t>>{{16, 16}, {32, 32}}));
  EXPECT_THROW(parse_size_list("(16,16"), Error);
}

TEST(Experiment, RerunsAreByteIdentical) {
  for (const char* name : {"laplacian.ini", "sacs_truncation.ini", "zero_suite.ini", "acs_truncation.ini"}) {
    auto c = load_config(kConfigDir / name);
    if (c.kind == ExperimentKind::sacs) c.trials = 200;
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    EXPECT_EQ(a.artifacts, b.artifacts) << name;
    EXPECT_TRUE(a.pass) << name;
  }
}

TEST(Experiment, CsvHeadersMatchDocumentation) {
  const std::map<std::string, std::string> headers = {
      {"distribution.csv", "n,d_n,mode,F_id,empirical,symbol,abs_error"},
      {"spectrum.csv", "n,d_n,mode,index,re,im"},
      {"acs_certificate.csv", "m,n,d_n,rank_frac,norm_part,freq_rank,freq_norm,freq_S,verdict"},
      {"sacs_certificate.csv", "m,n,d_n,rank_frac,norm_part,freq_rank,freq_norm,freq_S,verdict"},
      {"zero_p1.csv", "n,d_n,p,normalized_norm,rank_frac,norm_part,splitting_distance"},
      {"glt5_split.csv", "n,d_n,x_norm,y_norm,y_trace_normalized"},
  };
  std::size_t seen = 0;
  for (const char* name : {"laplacian.ini", "spectrum.ini", "acs_truncation.ini", "sacs_truncation.ini",
                           "zero_suite.ini", "glt5_corner.ini"}) {
    auto c = load_config(kConfigDir / name);
    if (c.kind == ExperimentKind::sacs) c.trials = 100;
    const auto result = run_experiment(c);
    for (const auto& [file, bytes] : result.artifacts) {
      auto it = headers.find(file);
      if (it == headers.end()) continue;
      EXPECT_EQ(first_line(bytes), it->second) << file;
      ++seen;
    }
    ASSERT_TRUE(result.artifacts.count("summary.json"));
    const auto summary = nlohmann::json::parse(result.artifacts.at("summary.json"));
    EXPECT_EQ(summary.at("pass").get<bool>(), result.pass);
  }
  EXPECT_EQ(seen, headers.size());
}

TEST(Experiment, PlotsAreSelfContainedSvg) {
  auto c = load_config(kConfigDir / "laplacian.ini");
  c.plot = true;
  const auto result = run_experiment(c);
  ASSERT_TRUE(result.artifacts.count("distribution.svg"));
  const auto& svg = result.artifacts.at("distribution.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(svg.find("href"), std::string::npos);
}

TEST(Experiment, ArtifactsWrittenWithoutLeftovers) {
  const auto dir = scratch_dir("write");
  ExperimentResult r;
  r.artifacts = {{"a.csv", "x\n1\n"}, {"summary.json", "{}"}};
  write_artifacts(r, dir / "nested");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir / "nested")) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"a.csv", "summary.json"}));
  std::ifstream in(dir / "nested" / "a.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "x\n1\n");
  fs::remove_all(dir);
}

TEST(Report, NumbersAndFields) {
  EXPECT_EQ(report::number(0.1), "0.1");
  EXPECT_EQ(report::number(-2.0), "-2");
  EXPECT_EQ(report::number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(report::csv_field("8,8"), "\"8,8\"");
  EXPECT_EQ(report::csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(report::csv_field("plain"), "plain");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("parse --expr 'T(2 - 2*cos(t1))'"), 0);
  EXPECT_EQ(run_cli("parse --expr 'T('"), 2);
  EXPECT_EQ(run_cli("spectrum --expr 'T(1)' --n 0"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("check-dist --expr 'T(2 - 2*cos(t1))' --sizes 32,64,128 --mode lambda --basket x,x2,bump1"), 0);
  EXPECT_EQ(run_cli("check-zero --model identity --sizes 16,32,64"), 1);
  EXPECT_EQ(run_cli("check-zero --model spikes --sizes 64,128,256"), 0);
  EXPECT_EQ(run_cli("check-dist --expr 'D(x1)^-1' --sizes 16,32"), 3);
  EXPECT_EQ(run_cli("check-sacs --sizes 8,16 --trials 100"), 2);
}

TEST(Cli, RunWritesArtifacts) {
  const auto dir = scratch_dir("cli");
  EXPECT_EQ(run_cli("--out '" + dir.string() + "' run '" + (kConfigDir / "glt5_corner.ini").string() + "'"), 0);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "glt5_split.csv"));
  fs::remove_all(dir);
}
