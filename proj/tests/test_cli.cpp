#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtscore/config.hpp"
#include "mtscore/csv.hpp"
#include "mtscore/errors.hpp"
#include "mtscore/experiment.hpp"

namespace fs = std::filesystem;
using mtscore::DetectorKind;
using mtscore::ExperimentConfig;
using mtscore::RunMode;
using mtscore::WidthPolicy;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mtscore_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  ASSERT_TRUE(out.good());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

long line_count(const std::string& text) {
  long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = std::string(MTSCORE_CLI_BIN) + " " + args + " >" + out_file.string() +
                          " 2>" + err_file.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WEXITSTATUS(raw);
  r.out = read_text(out_file);
  r.err = read_text(err_file);
  return r;
}

// A config small enough that every mode finishes in well under a second.
std::string small_config(const std::string& mode, const std::string& extra = "") {
  std::string text = R"({"mode": ")" + mode + R"(", "trials": 120, "snapshots": 200)";
  if (!extra.empty()) text += ", " + extra;
  text += "}";
  return text;
}

}  // namespace

TEST(ConfigParse, EmptyObjectGivesReferenceDefaults) {
  const ExperimentConfig parsed = mtscore::parse_config("{}");
  EXPECT_EQ(parsed, ExperimentConfig{});
  EXPECT_EQ(parsed.mode, RunMode::power);
  EXPECT_EQ(parsed.seed, 12345u);
  EXPECT_EQ(parsed.trials, 10000);
  EXPECT_EQ(parsed.snapshots, 1000);
  EXPECT_EQ(parsed.alpha, 0.01);
  EXPECT_EQ(parsed.theta1.range_m, 1.51);
  EXPECT_EQ(parsed.theta1.bearing_deg, 0.5);
  ASSERT_EQ(parsed.detectors.size(), 3u);
  EXPECT_EQ(parsed.threads, 0);
}

TEST(ConfigParse, RoundTripsThroughEmit) {
  std::vector<ExperimentConfig> cases;
  cases.emplace_back();

  ExperimentConfig varied;
  varied.mode = RunMode::width_curve;
  varied.seed = 991;
  varied.trials = 500;
  varied.snapshots = 128;
  varied.alpha = 0.05;
  varied.array = {4, 0.5, 2.0};
  varied.theta0 = {2.5, -10.0};
  varied.theta1 = {2.6, 3.0};
  varied.noise.family = mtscore::NoiseSpec::Family::k_dist;
  varied.noise.variance = 2.0;
  varied.noise.shape = 1.5;
  varied.signal.variance = 0.5;
  varied.snr_grid_db = {-5, 0, 5};
  varied.width_grid = {2.0, 12.0, 1.0};
  varied.detectors = {
      mtscore::DetectorConfig{DetectorKind::mt_gqst, WidthPolicy::fixed, 7.5, 3.0},
      mtscore::DetectorConfig{DetectorKind::zmnl_gqst, WidthPolicy::data_driven, 5.0, 2.5},
      mtscore::DetectorConfig{DetectorKind::gqst, WidthPolicy::data_driven, 5.0, 3.0}};
  varied.output_dir = "elsewhere";
  varied.threads = 2;
  cases.push_back(varied);

  for (const auto& c : cases) {
    const ExperimentConfig back = mtscore::parse_config(mtscore::emit_config(c));
    EXPECT_EQ(back, c);
  }
}

TEST(ConfigParse, UnknownFieldListsValidOnes) {
  try {
    mtscore::parse_config(R"({"sigma": 1.0})");
    FAIL() << "expected ParseError";
  } catch (const mtscore::ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("sigma"), std::string::npos);
    EXPECT_NE(what.find("snapshots"), std::string::npos);
  }
}

TEST(ConfigParse, NestedUnknownFieldRejected) {
  EXPECT_THROW(mtscore::parse_config(R"({"noise": {"variance": 1.0, "colour": "pink"}})"),
               mtscore::ParseError);
  EXPECT_THROW(mtscore::parse_config(R"({"theta0": {"range_m": 1.5, "bearing": 0}})"),
               mtscore::ParseError);
}

TEST(ConfigParse, TypeMismatchIsParseError) {
  EXPECT_THROW(mtscore::parse_config(R"({"trials": "many"})"), mtscore::ParseError);
  EXPECT_THROW(mtscore::parse_config(R"({"alpha": []})"), mtscore::ParseError);
  EXPECT_THROW(mtscore::parse_config("not json at all"), mtscore::ParseError);
}

TEST(ConfigParse, RangeViolationsAreValidationErrors) {
  try {
    mtscore::parse_config(R"({"theta0": {"range_m": -1.0}})");
    FAIL() << "expected ValidationError";
  } catch (const mtscore::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("range_m must be positive"), std::string::npos);
  }
  EXPECT_THROW(mtscore::parse_config(R"({"alpha": 1.5})"), mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"trials": 0})"), mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"array": {"sensors": 1}})"), mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"theta1": {"range_m": 1.5, "bearing_deg": 95}})"),
               mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"width_grid": {"step": 0}})"),
               mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"threads": -1})"), mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"detectors": []})"), mtscore::ValidationError);
  EXPECT_THROW(
      mtscore::parse_config(R"({"noise": {"family": "k_dist", "shape": -1.0}})"),
      mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"mode": "power", "snr_grid_db": []})"),
               mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(
                   R"({"mode": "power", "theta1": {"range_m": 1.5, "bearing_deg": 0}})"),
               mtscore::ValidationError);
}

TEST(ConfigParse, DetectorFieldPolicing) {
  EXPECT_THROW(mtscore::parse_config(R"({"detectors": [{"kind": "gqst", "width": 5}]})"),
               mtscore::ValidationError);
  EXPECT_THROW(
      mtscore::parse_config(R"({"detectors": [{"kind": "mt_gqst", "clip_factor": 3}]})"),
      mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(
                   R"({"detectors": [{"kind": "mt_gqst", "width_policy": "data_driven", "width": 5}]})"),
               mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(
                   R"({"detectors": [{"kind": "mt_gqst", "width_policy": "fixed"}]})"),
               mtscore::ValidationError);
  EXPECT_THROW(mtscore::parse_config(R"({"noise": {"family": "gaussian", "shape": 2.0}})"),
               mtscore::ValidationError);
}

TEST(ConfigParse, ModeNamesRoundTrip) {
  for (auto mode :
       {RunMode::size, RunMode::power, RunMode::width_curve, RunMode::single_test})
    EXPECT_EQ(mtscore::parse_run_mode(mtscore::run_mode_name(mode)), mode);
  EXPECT_THROW(mtscore::parse_run_mode("bogus"), mtscore::ValidationError);
}

TEST(ConfigFile, MissingFileIsIoError) {
  EXPECT_THROW(mtscore::load_config_file("/nonexistent/dir/config.json"), mtscore::IoError);
}

TEST(ConfigFile, LoadsAndParses) {
  const fs::path dir = fresh_dir("cfg_load");
  write_text(dir / "c.json", R"({"seed": 7})");
  EXPECT_EQ(mtscore::load_config_file((dir / "c.json").string()).seed, 7u);
}

TEST(CsvFormat, SeventeenDigitDoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-10, 12345.6789, 9.87e300}) {
    const std::string s = mtscore::format_csv_cell(mtscore::CsvCell{v});
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(mtscore::format_csv_cell(mtscore::CsvCell{static_cast<long long>(42)}), "42");
}

TEST(CsvFormat, QuotesSpecialStrings) {
  EXPECT_EQ(mtscore::format_csv_cell(mtscore::CsvCell{std::string("plain")}), "plain");
  EXPECT_EQ(mtscore::format_csv_cell(mtscore::CsvCell{std::string("a,b")}), "\"a,b\"");
  EXPECT_EQ(mtscore::format_csv_cell(mtscore::CsvCell{std::string("say \"hi\"")}),
            "\"say \"\"hi\"\"\"");
}

TEST(CsvEmit, HeaderOnlyFileForZeroRows) {
  const fs::path dir = fresh_dir("csv_header");
  const fs::path path = dir / "empty.csv";
  const auto artifact = mtscore::emit_csv({"a", "b"}, {}, path.string());
  EXPECT_EQ(artifact.path, path.string());
  EXPECT_EQ(artifact.format, "csv");
  EXPECT_EQ(artifact.schema_version, mtscore::kArtifactSchemaVersion);
  EXPECT_EQ(read_text(path), "a,b\n");
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST(CsvEmit, RejectsMismatchedRowWidth) {
  const fs::path dir = fresh_dir("csv_bad");
  const std::vector<mtscore::CsvRow> rows{{mtscore::CsvCell{1.0}}};
  EXPECT_THROW(mtscore::emit_csv({"a", "b"}, rows, (dir / "x.csv").string()),
               std::invalid_argument);
  EXPECT_THROW(mtscore::emit_csv({}, {}, (dir / "y.csv").string()), std::invalid_argument);
}

TEST(Experiment, ScenarioAssemblyConvertsDegrees) {
  ExperimentConfig cfg;
  cfg.snapshots = 321;
  cfg.alpha = 0.03;
  cfg.seed = 55;
  cfg.noise.family = mtscore::NoiseSpec::Family::k_dist;
  cfg.noise.shape = 1.25;
  const mtscore::Scenario sc = mtscore::make_scenario(cfg);
  EXPECT_EQ(sc.snapshots, 321);
  EXPECT_EQ(sc.alpha, 0.03);
  EXPECT_EQ(sc.seed, 55u);
  EXPECT_EQ(sc.noise.family, mtscore::NoiseSpec::Family::k_dist);
  EXPECT_EQ(sc.noise.shape, 1.25);
  EXPECT_DOUBLE_EQ(sc.theta1.bearing_rad, mtscore::deg2rad(cfg.theta1.bearing_deg));
  EXPECT_EQ(sc.theta1.range_m, cfg.theta1.range_m);
  EXPECT_EQ(sc.geom.sensors, cfg.array.sensors);
}

TEST(Experiment, DetectorAssemblyMapsFields) {
  mtscore::DetectorConfig dc{DetectorKind::mt_gqst, WidthPolicy::fixed, 7.0, 3.0};
  const mtscore::WidthGridSpec grid{2.0, 8.0, 0.5};
  const mtscore::DetectorSpec spec = mtscore::make_detector(dc, grid);
  EXPECT_EQ(spec.kind, DetectorKind::mt_gqst);
  EXPECT_EQ(spec.width_policy, WidthPolicy::fixed);
  EXPECT_EQ(spec.width, 7.0);
  EXPECT_EQ(spec.width_grid, mtscore::make_width_grid(2.0, 8.0, 0.5));

  mtscore::DetectorConfig zc{DetectorKind::zmnl_gqst, WidthPolicy::data_driven, 5.0, 2.25};
  EXPECT_EQ(mtscore::make_detector(zc, grid).clip_factor, 2.25);
}

TEST(Experiment, SingleTestWritesReportAndManifest) {
  const fs::path dir = fresh_dir("exp_single");
  ExperimentConfig cfg = mtscore::parse_config(small_config("single_test"));
  cfg.output_dir = (dir / "out").string();
  const auto artifacts = mtscore::run_experiment(cfg);
  ASSERT_EQ(artifacts.size(), 2u);
  EXPECT_TRUE(artifacts[0].path.ends_with("report.json"));
  EXPECT_TRUE(artifacts.back().path.ends_with("manifest.json"));
  EXPECT_EQ(artifacts[0].format, "json");

  const json report = json::parse(read_text(artifacts[0].path));
  for (const char* key : {"detector", "statistic", "threshold", "alpha", "df", "reject",
                          "width", "seed"})
    EXPECT_TRUE(report.contains(key)) << key;
  EXPECT_EQ(report.at("df").get<int>(), 2);
  EXPECT_TRUE(report.at("width").is_number());

  const json manifest = json::parse(read_text(artifacts.back().path));
  EXPECT_EQ(manifest.at("version").get<std::string>(), mtscore::kVersion);
  EXPECT_EQ(manifest.at("mode").get<std::string>(), "single_test");
  ASSERT_TRUE(manifest.contains("files"));
  // The manifest lists every artifact written before it, excluding itself.
  EXPECT_EQ(manifest.at("files").size(), artifacts.size() - 1);
  for (const auto& entry : manifest.at("files")) {
    EXPECT_TRUE(entry.contains("path"));
    EXPECT_TRUE(entry.contains("format"));
    EXPECT_EQ(entry.at("schema_version").get<std::string>(), mtscore::kArtifactSchemaVersion);
  }

  // The manifest's config echo parses back to the exact configuration.
  const ExperimentConfig echoed = mtscore::parse_config(manifest.at("config").dump());
  EXPECT_EQ(echoed, cfg);
}

TEST(Experiment, PlainDetectorReportsConstantWidth) {
  const fs::path dir = fresh_dir("exp_single_plain");
  ExperimentConfig cfg =
      mtscore::parse_config(small_config("single_test", R"("detectors": [{"kind": "gqst"}])"));
  cfg.output_dir = (dir / "out").string();
  const auto artifacts = mtscore::run_experiment(cfg);
  const json report = json::parse(read_text(artifacts[0].path));
  EXPECT_EQ(report.at("width").get<std::string>(), "constant");
}

TEST(Experiment, MostNullSeedsAccept) {
  // A correctly sized test at alpha = 0.01 under the null should accept for
  // the vast majority of seeds.
  const fs::path dir = fresh_dir("exp_seeds");
  int rejects = 0;
  for (int seed = 0; seed < 100; ++seed) {
    ExperimentConfig cfg = mtscore::parse_config(
        R"({"mode": "single_test", "snapshots": 1000, "detectors": [{"kind": "mt_gqst"}]})");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.output_dir = (dir / ("out" + std::to_string(seed))).string();
    const auto artifacts = mtscore::run_experiment(cfg);
    const json report = json::parse(read_text(artifacts[0].path));
    if (report.at("reject").get<bool>()) ++rejects;
  }
  EXPECT_LE(rejects, 2);
}

TEST(Experiment, WidthCurveHasOneRowPerGridPoint) {
  const fs::path dir = fresh_dir("exp_width");
  ExperimentConfig cfg = mtscore::parse_config(small_config("width_curve"));
  cfg.output_dir = (dir / "out").string();
  const auto artifacts = mtscore::run_experiment(cfg);
  const std::string text = read_text(artifacts[0].path);
  EXPECT_TRUE(artifacts[0].path.ends_with("width_curve.csv"));
  EXPECT_EQ(line_count(text), 1 + 59);
  EXPECT_EQ(text.substr(0, text.find('\n')), "omega,spectral_norm");
}

TEST(Experiment, SizeCsvLayoutAndByteStability) {
  const fs::path dir = fresh_dir("exp_size");
  ExperimentConfig cfg = mtscore::parse_config(
      small_config("size", R"("detectors": [{"kind": "gqst"}, {"kind": "zmnl_gqst"}])"));
  cfg.output_dir = (dir / "a").string();
  const auto first = mtscore::run_experiment(cfg);
  const std::string text = read_text(first[0].path);
  EXPECT_TRUE(first[0].path.ends_with("size.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')), "detector,rejections,trials,invalid,rate,stderr");
  EXPECT_EQ(line_count(text), 1 + 2);

  cfg.output_dir = (dir / "b").string();
  const auto second = mtscore::run_experiment(cfg);
  EXPECT_EQ(read_text(second[0].path), text);

  const json ma = json::parse(read_text(first.back().path));
  json mb = json::parse(read_text(second.back().path));
  json ma_stripped = ma;
  ma_stripped.erase("wall_time_s");
  mb.erase("wall_time_s");
  // Output dir differs between the two runs; normalize it before comparing.
  ma_stripped.at("config").erase("output_dir");
  mb.at("config").erase("output_dir");
  ma_stripped.erase("files");
  mb.erase("files");
  EXPECT_EQ(ma_stripped, mb);
}

TEST(Experiment, PowerCsvLayout) {
  const fs::path dir = fresh_dir("exp_power");
  ExperimentConfig cfg = mtscore::parse_config(small_config(
      "power", R"("detectors": [{"kind": "gqst"}], "snr_grid_db": [-10, 0])"));
  cfg.output_dir = (dir / "out").string();
  const auto artifacts = mtscore::run_experiment(cfg);
  const std::string text = read_text(artifacts[0].path);
  EXPECT_TRUE(artifacts[0].path.ends_with("power.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "snr_db,detector,rejections,trials,rate,stderr,analytic_rate");
  EXPECT_EQ(line_count(text), 1 + 2);
}

TEST(Cli, HappyPathWritesArtifacts) {
  const fs::path dir = fresh_dir("cli_ok");
  write_text(dir / "cfg.json", small_config("single_test"));
  const CliResult r = run_cli("--config " + (dir / "cfg.json").string() + " --out " +
                                  (dir / "out").string(),
                              dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("manifest.json"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
}

TEST(Cli, SeedAndModeOverridesLandInManifest) {
  const fs::path dir = fresh_dir("cli_seed");
  write_text(dir / "cfg.json", small_config("size", R"("detectors": [{"kind": "gqst"}])"));
  const CliResult r = run_cli("--config " + (dir / "cfg.json").string() +
                                  " --mode single_test --seed 777 --out " +
                                  (dir / "out").string(),
                              dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const json manifest = json::parse(read_text(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest.at("seed").get<std::uint64_t>(), 777u);
  EXPECT_EQ(manifest.at("mode").get<std::string>(), "single_test");
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
}

TEST(Cli, ParseErrorExitsTwo) {
  const fs::path dir = fresh_dir("cli_parse");
  write_text(dir / "cfg.json", "{ not json");
  EXPECT_EQ(run_cli("--config " + (dir / "cfg.json").string(), dir).code, 2);
}

TEST(Cli, ValidationErrorExitsThree) {
  const fs::path dir = fresh_dir("cli_validate");
  write_text(dir / "cfg.json", R"({"theta0": {"range_m": -1.0}})");
  EXPECT_EQ(run_cli("--config " + (dir / "cfg.json").string(), dir).code, 3);
}

TEST(Cli, MissingConfigFileExitsFour) {
  const fs::path dir = fresh_dir("cli_io");
  EXPECT_EQ(run_cli("--config " + (dir / "does_not_exist.json").string(), dir).code, 4);
}

TEST(Cli, WarnsWhenLocationLeavesValidityInterval) {
  const fs::path dir = fresh_dir("cli_warn");
  write_text(dir / "cfg.json",
             small_config("single_test", R"("theta0": {"range_m": 10.0, "bearing_deg": 0})"));
  const CliResult r = run_cli("--config " + (dir / "cfg.json").string() + " --out " +
                                  (dir / "out").string(),
                              dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("outside the near-field validity interval"), std::string::npos);
}
