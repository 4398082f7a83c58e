#include <sys/wait.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "lifecast/errors.hpp"
#include "lifecast/pipeline.hpp"
#include "lifecast/synthetic.hpp"

using namespace lifecast;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lifecast_test_" + name);
  fs::remove_all(dir);
  return dir;
}

// Small but fully supported experiment: with 12 years the split is
// 4/4/4, report horizons run 1..3, and alpha 0.5 keeps the conformal
// rank below its cap at every horizon.
std::string tiny_config_text(std::uint64_t seed = 7) {
  std::ostringstream out;
  out << R"({"data": {"kind": "synthetic", "n_years": 12, "n_ages": 6, "noise_sd": 0.01},)"
      << R"( "alphas": [0.5], "seed": )" << seed << "}";
  return out.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture =
      fs::temp_directory_path() / ("lifecast_cli_capture_" + std::to_string(++counter) + ".txt");
  const std::string command =
      std::string(LIFECAST_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CommandResult result;
  if (status != -1 && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(capture, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  fs::remove(capture);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal config yields documented defaults") {
  const RunConfig config = parse_run_config(R"({"data": {"kind": "synthetic"}})");
  CHECK(config.data_kind == RunConfig::DataKind::Synthetic);
  CHECK(config.synth.n_years == 48);
  CHECK(config.synth.n_ages == 111);
  CHECK(config.synth.n_components == 2);
  CHECK(config.synth.start_year == 1975);
  CHECK(config.synth.radix == 100000.0);
  REQUIRE(config.transforms.size() == 2);
  CHECK(config.transforms[0] == Transform::Clr);
  CHECK(config.transforms[1] == Transform::CdfLogit);
  REQUIRE(config.models.size() == 3);
  CHECK(config.models[0] == ModelKind::Ufts);
  CHECK(config.models[2] == ModelKind::Mlfts);
  REQUIRE(config.settings.approaches.size() == 3);
  REQUIRE(config.settings.alphas.size() == 2);
  CHECK(config.settings.alphas[0] == 0.2);
  CHECK(config.settings.alphas[1] == 0.05);
  CHECK(config.settings.k_rule.kind == KRule::Kind::Evr);
  CHECK(config.settings.score_model.kind == ScoreModelConfig::Kind::RandomWalkDrift);
  CHECK(config.settings.standardize_mfts == false);
  CHECK(config.settings.refit_k == true);
  CHECK(config.settings.cdf.clamp == false);
  CHECK(config.split_explicit == false);
  CHECK(config.seed == 1);
  CHECK(config.threads == 1);
  CHECK(config.plots == false);
  CHECK(config.out_dir.empty());
}

TEST_CASE("full config round trip honours every field") {
  const RunConfig config = parse_run_config(R"({
    "data": {"kind": "synthetic", "n_years": 20, "n_ages": 9, "n_components": 3,
             "noise_sd": 0.002, "start_year": 1900, "radix": 1000.0,
             "drift_scale": 0.01, "innov_sd": 0.02},
    "transforms": ["cdf"],
    "models": ["ufts"],
    "approaches": ["parametric"],
    "alphas": [0.1],
    "k": {"rule": "fixed", "value": 3},
    "score_model": {"kind": "ar", "max_order": 4},
    "split": {"train_end": 1909, "val_end": 1914, "test_end": 1919},
    "seed": 42,
    "threads": 3,
    "plots": true,
    "out_dir": "somewhere",
    "standardize_mfts": true,
    "refit_k": false,
    "cdf_clamp": true,
    "cdf_eps": 1e-9
  })");
  CHECK(config.synth.n_years == 20);
  CHECK(config.synth.n_ages == 9);
  CHECK(config.synth.n_components == 3);
  CHECK(config.synth.noise_sd == 0.002);
  CHECK(config.synth.start_year == 1900);
  CHECK(config.synth.radix == 1000.0);
  CHECK(config.synth.drift_scale == 0.01);
  CHECK(config.synth.innov_sd == 0.02);
  REQUIRE(config.transforms.size() == 1);
  CHECK(config.transforms[0] == Transform::CdfLogit);
  REQUIRE(config.models.size() == 1);
  CHECK(config.models[0] == ModelKind::Ufts);
  REQUIRE(config.settings.approaches.size() == 1);
  CHECK(config.settings.approaches[0] == Approach::Parametric);
  REQUIRE(config.settings.alphas.size() == 1);
  CHECK(config.settings.alphas[0] == 0.1);
  CHECK(config.settings.k_rule.kind == KRule::Kind::Fixed);
  CHECK(config.settings.k_rule.fixed_k == 3);
  CHECK(config.settings.score_model.kind == ScoreModelConfig::Kind::Ar);
  CHECK(config.settings.score_model.ar_max_order == 4);
  CHECK(config.split_explicit == true);
  CHECK(config.split.train_end == 1909);
  CHECK(config.split.val_end == 1914);
  CHECK(config.split.test_end == 1919);
  CHECK(config.seed == 42);
  CHECK(config.threads == 3);
  CHECK(config.plots == true);
  CHECK(config.out_dir == "somewhere");
  CHECK(config.settings.standardize_mfts == true);
  CHECK(config.settings.refit_k == false);
  CHECK(config.settings.cdf.clamp == true);
  CHECK(config.settings.cdf.eps == 1e-9);
}

TEST_CASE("hmd config needs both file paths") {
  const RunConfig config = parse_run_config(
      R"({"data": {"kind": "hmd", "female": "f.txt", "male": "m.txt", "radix": 1000}})");
  CHECK(config.data_kind == RunConfig::DataKind::Hmd);
  CHECK(config.hmd_female_path == "f.txt");
  CHECK(config.hmd_male_path == "m.txt");
  CHECK(config.hmd_radix == 1000.0);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"kind": "hmd", "female": "f.txt"}})"),
                  ConfigError);
}

TEST_CASE("malformed configs are rejected with the offending key") {
  CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[1, 2]"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("{}"), "config needs a 'data' object", ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"data": {"kind": "synthetic"}, "bogus": 1})"),
                       "unknown config key 'bogus' in config", ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"data": {"kind": "synthetic", "female": "x"}})"),
                       "unknown config key 'female' in data", ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"kind": "csv"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {}})"), ConfigError);

  const std::string base = R"({"data": {"kind": "synthetic"}, )";
  CHECK_THROWS_WITH_AS(parse_run_config(base + R"("alphas": [1.5]})"),
                       "alpha 1.5 outside (0, 1)", ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("alphas": []})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("alphas": ["a"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("transforms": ["clr", "clr"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("transforms": ["logit"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("transforms": []})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("models": ["arima"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("approaches": ["bootstrap"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("k": {"rule": "aic"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("k": {"rule": "fixed", "value": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("k": {"rule": "evr", "extra": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("score_model": {"kind": "arma"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("score_model": {"kind": "ar", "max_order": -1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("split": {"kind": "halves"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("split": {"train_end": 1, "val_end": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("seed": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("seed": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("threads": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(base + R"("cdf_eps": 0.7})"), ConfigError);

  CHECK_THROWS_AS(parse_run_config(R"({"data": {"kind": "synthetic", "n_years": 5}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"kind": "synthetic", "n_ages": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"data": {"kind": "synthetic", "n_ages": 6, "n_components": 5}})"),
      ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"data": {"kind": "synthetic", "noise_sd": -0.1}})"),
                  ConfigError);
}

TEST_CASE("name parsers accept documented aliases and reject junk") {
  CHECK(transform_from_string("clr") == Transform::Clr);
  CHECK(transform_from_string("cdf") == Transform::CdfLogit);
  CHECK(transform_from_string("cdf-logit") == Transform::CdfLogit);
  CHECK_THROWS_AS(transform_from_string("ilr"), ConfigError);
  CHECK(model_from_string("mfts") == ModelKind::Mfts);
  CHECK_THROWS_AS(model_from_string("var"), ConfigError);
  CHECK(approach_from_string("sd") == Approach::Sd);
  CHECK(approach_from_string("conformal") == Approach::Conformal);
  CHECK(approach_from_string("parametric") == Approach::Parametric);
  CHECK_THROWS_AS(approach_from_string("quantile"), ConfigError);
}

TEST_CASE("canonical config ignores execution details but not the experiment") {
  RunConfig a = parse_run_config(tiny_config_text());
  RunConfig b = a;
  b.threads = 8;
  b.out_dir = "elsewhere";
  b.plots = true;
  CHECK(canonical_config_json(a) == canonical_config_json(b));

  RunConfig c = a;
  c.seed = 8;
  CHECK(canonical_config_json(a) != canonical_config_json(c));
  RunConfig d = a;
  d.settings.alphas = {0.5, 0.2};
  CHECK(canonical_config_json(a) != canonical_config_json(d));

  const std::string hash = fnv1a_hex(canonical_config_json(a));
  REQUIRE(hash.size() == 16);
  for (char ch : hash) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
}

TEST_CASE("fnv1a matches published reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("output directory precedence: flag, config, environment, default") {
  RunConfig config = parse_run_config(R"({"data": {"kind": "synthetic"}})");
  unsetenv("LIFECAST_OUT_DIR");
  CHECK(resolve_out_dir("flagged", config) == "flagged");
  CHECK(resolve_out_dir("", config) == "lifecast-out");
  config.out_dir = "from-config";
  CHECK(resolve_out_dir("", config) == "from-config");
  CHECK(resolve_out_dir("flagged", config) == "flagged");
  config.out_dir.clear();
  setenv("LIFECAST_OUT_DIR", "from-env", 1);
  CHECK(resolve_out_dir("", config) == "from-env");
  CHECK(resolve_out_dir("flagged", config) == "flagged");
  unsetenv("LIFECAST_OUT_DIR");
  CHECK(resolve_out_dir("", config) == "lifecast-out");
}

TEST_CASE("synthetic dataset derives the male seed from the female one") {
  RunConfig config = parse_run_config(tiny_config_text(9));
  const Dataset data = load_dataset(config);
  CHECK(data.female.sex() == Sex::Female);
  CHECK(data.male.sex() == Sex::Male);
  CHECK(data.female.n_years() == 12);
  CHECK(data.female.n_ages() == 6);
  CHECK((data.female.values() - data.male.values()).cwiseAbs().maxCoeff() > 0.0);

  SynthSpec male_spec = config.synth;
  male_spec.sex = Sex::Male;
  male_spec.seed = 10;
  const LifeTableSeries male = synth_lifetable(male_spec);
  CHECK((data.male.values() - male.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pipeline writes the selected artifacts and a faithful manifest") {
  const RunConfig config = parse_run_config(tiny_config_text());
  const fs::path dir = fresh_dir("pipeline_full");
  const PipelineResult result = run_pipeline(config, dir.string());

  CHECK(result.under_supported == false);
  const std::vector<std::string> expected = {"calibration.csv", "report_alpha0.5.csv",
                                             "detail.json", "manifest.json"};
  REQUIRE(result.artifacts == expected);
  for (const std::string& name : expected) CHECK(fs::exists(dir / name));

  const nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(manifest.at("version").get<std::string>() == "0.1.0");
  CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
  CHECK(manifest.at("config_hash").get<std::string>() ==
        fnv1a_hex(canonical_config_json(config)));
  CHECK(manifest.at("seed").get<std::uint64_t>() == 7);
  CHECK(manifest.at("data").at("kind").get<std::string>() == "synthetic");
  CHECK(manifest.at("data").at("n_years").get<int>() == 12);
  CHECK(manifest.at("split").at("train_end").get<int>() == 1978);
  CHECK(manifest.at("split").at("val_end").get<int>() == 1982);
  CHECK(manifest.at("split").at("test_end").get<int>() == 1986);
  CHECK(manifest.at("under_supported").get<bool>() == false);
  CHECK(manifest.at("artifacts").get<std::vector<std::string>>() ==
        std::vector<std::string>{"calibration.csv", "report_alpha0.5.csv", "detail.json"});
  CHECK(manifest.find("threads") == manifest.end());

  // Calibration table: one xi column per (transform, model, sex, alpha),
  // one row per report horizon.
  const std::vector<std::string> cal_lines = split_lines(read_file(dir / "calibration.csv"));
  REQUIRE(cal_lines.size() == 4);  // header + horizons 1..3
  const std::vector<std::string> header = split_csv_row(cal_lines[0]);
  REQUIRE(header.size() == 1 + 2 * 3 * 2 * 1);
  CHECK(header[0] == "horizon");
  CHECK(header[1] == "xi_clr_ufts_female_a0.5");
  for (std::size_t i = 1; i < header.size(); ++i) CHECK(header[i].rfind("xi_", 0) == 0);
  for (std::size_t row = 1; row < cal_lines.size(); ++row) {
    const std::vector<std::string> cells = split_csv_row(cal_lines[row]);
    REQUIRE(cells.size() == header.size());
    CHECK(cells[0] == std::to_string(row));
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const double value = std::stod(cells[i]);
      CHECK(std::isfinite(value));
      CHECK(value >= 0.0);
    }
  }

  // Report grid: 2 sexes x 6 metrics x 3 approaches rows, one column
  // per (transform, model) pair.
  const std::vector<std::string> report_lines =
      split_lines(read_file(dir / "report_alpha0.5.csv"));
  REQUIRE(report_lines.size() == 1 + 2 * 6 * 3);
  CHECK(report_lines[0] == "sex,metric,approach,clr_ufts,clr_mfts,clr_mlfts,cdf_ufts,cdf_mfts,cdf_mlfts");
  for (std::size_t row = 1; row < report_lines.size(); ++row) {
    const std::vector<std::string> cells = split_csv_row(report_lines[row]);
    REQUIRE(cells.size() == 9);
    for (std::size_t i = 3; i < cells.size(); ++i) CHECK(std::isfinite(std::stod(cells[i])));
  }

  const nlohmann::json detail = nlohmann::json::parse(read_file(dir / "detail.json"));
  CHECK(detail.at("methods").size() == 2 * 2 * 3 * 3 * 1);
  CHECK(detail.at("calibrations").size() == 2 * 3 * 2 * 1);
  CHECK(detail.at("under_supported").get<bool>() == false);

  fs::remove_all(dir);
}

TEST_CASE("artifact selection writes only what was asked for") {
  const RunConfig config = parse_run_config(tiny_config_text());

  ArtifactSelection calibration_only;
  calibration_only.manifest = false;
  calibration_only.reports = false;
  const fs::path cal_dir = fresh_dir("pipeline_cal");
  const PipelineResult cal = run_pipeline(config, cal_dir.string(), calibration_only);
  CHECK(cal.artifacts == std::vector<std::string>{"calibration.csv"});
  CHECK(fs::exists(cal_dir / "calibration.csv"));
  CHECK(!fs::exists(cal_dir / "manifest.json"));
  CHECK(!fs::exists(cal_dir / "detail.json"));
  CHECK(!fs::exists(cal_dir / "report_alpha0.5.csv"));

  ArtifactSelection reports_only;
  reports_only.manifest = false;
  reports_only.calibration = false;
  const fs::path rep_dir = fresh_dir("pipeline_rep");
  const PipelineResult rep = run_pipeline(config, rep_dir.string(), reports_only);
  CHECK(rep.artifacts == std::vector<std::string>{"report_alpha0.5.csv", "detail.json"});
  CHECK(!fs::exists(rep_dir / "calibration.csv"));
  CHECK(!fs::exists(rep_dir / "manifest.json"));
  CHECK(fs::exists(rep_dir / "detail.json"));

  fs::remove_all(cal_dir);
  fs::remove_all(rep_dir);
}

TEST_CASE("artifacts are byte-identical across runs and thread counts") {
  RunConfig config = parse_run_config(tiny_config_text());
  const fs::path dir_a = fresh_dir("pipeline_det_a");
  const fs::path dir_b = fresh_dir("pipeline_det_b");
  const fs::path dir_c = fresh_dir("pipeline_det_c");
  run_pipeline(config, dir_a.string());
  run_pipeline(config, dir_b.string());
  config.threads = 4;
  run_pipeline(config, dir_c.string());

  for (const char* name :
       {"calibration.csv", "report_alpha0.5.csv", "detail.json", "manifest.json"}) {
    const std::string reference = read_file(dir_a / name);
    CHECK(read_file(dir_b / name) == reference);
    CHECK(read_file(dir_c / name) == reference);
  }

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::remove_all(dir_c);
}

TEST_CASE("plots are written when requested") {
  RunConfig config = parse_run_config(tiny_config_text());
  config.plots = true;
  const fs::path dir = fresh_dir("pipeline_plots");
  const PipelineResult result = run_pipeline(config, dir.string());
  int svg_count = 0;
  for (const std::string& name : result.artifacts) {
    if (name.rfind("plots/", 0) == 0) {
      ++svg_count;
      CHECK(fs::exists(dir / name));
      const std::string body = read_file(dir / name);
      CHECK(contains(body, "<svg"));
      CHECK(contains(body, "</svg>"));
    }
  }
  CHECK(svg_count >= 2);  // at least the two observed-data fans
  fs::remove_all(dir);
}

TEST_CASE("file diagnostics summarize the bundled sample") {
  const DataDiagnostics d =
      diagnose_hmd_file(std::string(LIFECAST_DATA_DIR) + "/hmd_sample_female.txt");
  CHECK(d.first_year == 1975);
  CHECK(d.last_year == 1979);
  CHECK(d.first_age == "0");
  CHECK(d.last_age == "110+");
  CHECK(d.n_rows == 555);
  CHECK(d.zero_count_cells == 3);
  CHECK(d.max_radix_residual >= 0.0);
  CHECK(d.max_radix_residual < 1e-3);  // dx is printed to whole counts

  const std::string text = format_diagnostics(d);
  CHECK(contains(text, "years 1975-1979\n"));
  CHECK(contains(text, "ages 0-110+\n"));
  CHECK(contains(text, "rows 555\n"));
  CHECK(contains(text, "zero counts: 3 cells\n"));
  CHECK(contains(text, "max radix residual: "));

  const DataDiagnostics dm =
      diagnose_hmd_file(std::string(LIFECAST_DATA_DIR) + "/hmd_sample_male.txt");
  CHECK(dm.zero_count_cells == 0);
}

TEST_CASE("cli: version and argument errors") {
  const CommandResult version = run_cli("--version");
  CHECK(version.exit_code == 0);
  CHECK(contains(version.output, "0.1.0"));

  CHECK(run_cli("").exit_code == 2);           // a subcommand is required
  CHECK(run_cli("bogus").exit_code == 2);      // unknown subcommand
  CHECK(run_cli("run").exit_code == 2);        // --config is required
  CHECK(run_cli("run --config x --nope").exit_code == 2);

  const CommandResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(contains(help.output, "run"));
  CHECK(contains(help.output, "validate-data"));
}

TEST_CASE("cli: config problems exit 2 without writing artifacts") {
  const CommandResult missing = run_cli("run --config /nonexistent/config.json");
  CHECK(missing.exit_code == 2);
  CHECK(contains(missing.output, "config error:"));

  const fs::path cfg = fs::temp_directory_path() / "lifecast_test_bad_alpha.json";
  {
    std::ofstream out(cfg);
    out << R"({"data": {"kind": "synthetic", "n_years": 12, "n_ages": 6}, "alphas": [1.5]})";
  }
  const fs::path dir = fresh_dir("cli_bad_alpha_out");
  const CommandResult bad =
      run_cli("run --config " + cfg.string() + " --out " + dir.string());
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.output, "config error:"));
  CHECK(contains(bad.output, "alpha 1.5"));
  CHECK(!fs::exists(dir));
  fs::remove(cfg);
}

TEST_CASE("cli: run, calibrate and report write their artifact sets") {
  const fs::path cfg = fs::temp_directory_path() / "lifecast_test_tiny.json";
  {
    std::ofstream out(cfg);
    out << tiny_config_text();
  }

  const fs::path run_dir = fresh_dir("cli_run_out");
  const CommandResult run =
      run_cli("run --config " + cfg.string() + " --out " + run_dir.string());
  CHECK(run.exit_code == 0);
  CHECK(contains(run.output, "wrote 4 artifact(s) to " + run_dir.string()));
  CHECK(fs::exists(run_dir / "manifest.json"));
  CHECK(fs::exists(run_dir / "calibration.csv"));
  CHECK(fs::exists(run_dir / "report_alpha0.5.csv"));
  CHECK(fs::exists(run_dir / "detail.json"));

  const fs::path cal_dir = fresh_dir("cli_cal_out");
  const CommandResult cal =
      run_cli("calibrate --config " + cfg.string() + " --out " + cal_dir.string());
  CHECK(cal.exit_code == 0);
  CHECK(fs::exists(cal_dir / "calibration.csv"));
  CHECK(!fs::exists(cal_dir / "manifest.json"));
  CHECK(!fs::exists(cal_dir / "detail.json"));

  const fs::path rep_dir = fresh_dir("cli_rep_out");
  const CommandResult rep =
      run_cli("report --config " + cfg.string() + " --out " + rep_dir.string());
  CHECK(rep.exit_code == 0);
  CHECK(fs::exists(rep_dir / "report_alpha0.5.csv"));
  CHECK(fs::exists(rep_dir / "detail.json"));
  CHECK(!fs::exists(rep_dir / "calibration.csv"));

  // The calibration table must not depend on which subcommand produced it.
  CHECK(read_file(cal_dir / "calibration.csv") == read_file(run_dir / "calibration.csv"));

  fs::remove_all(run_dir);
  fs::remove_all(cal_dir);
  fs::remove_all(rep_dir);
  fs::remove(cfg);
}

TEST_CASE("cli: demanding coverage on a short series reports under-support") {
  const fs::path cfg = fs::temp_directory_path() / "lifecast_test_under.json";
  {
    std::ofstream out(cfg);
    // With 4 validation years, conformal alpha=0.05 needs a rank beyond
    // the largest available residual at every horizon.
    out << R"({"data": {"kind": "synthetic", "n_years": 12, "n_ages": 6},
               "alphas": [0.05], "seed": 7})";
  }
  const fs::path dir = fresh_dir("cli_under_out");
  const CommandResult result =
      run_cli("run --config " + cfg.string() + " --out " + dir.string());
  CHECK(result.exit_code == 3);
  CHECK(contains(result.output, "under-supported"));
  CHECK(fs::exists(dir / "manifest.json"));
  const nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(manifest.at("under_supported").get<bool>() == true);
  fs::remove_all(dir);
  fs::remove(cfg);
}

TEST_CASE("cli: validate-data prints diagnostics") {
  const CommandResult ok =
      run_cli(std::string("validate-data ") + LIFECAST_DATA_DIR + "/hmd_sample_female.txt");
  CHECK(ok.exit_code == 0);
  CHECK(contains(ok.output, "years 1975-1979"));
  CHECK(contains(ok.output, "rows 555"));
  CHECK(contains(ok.output, "zero counts: 3 cells"));

  const CommandResult missing = run_cli("validate-data /nonexistent/table.txt");
  CHECK(missing.exit_code == 1);
  CHECK(contains(missing.output, "error:"));
}

TEST_CASE("cli: transform emits CSV and respects the method's domain") {
  const std::string female = std::string(LIFECAST_DATA_DIR) + "/hmd_sample_female.txt";
  const std::string male = std::string(LIFECAST_DATA_DIR) + "/hmd_sample_male.txt";

  const CommandResult cdf = run_cli("transform --input " + female + " --method cdf");
  CHECK(cdf.exit_code == 0);
  CHECK(cdf.output.rfind("year,age,value\n", 0) == 0);
  CHECK(split_lines(cdf.output).size() == 1 + 5 * 110);  // last coordinate is dropped

  // The female sample has zero-count cells, which the log-ratio
  // transform rejects; the male sample is strictly positive.
  const CommandResult clr_female = run_cli("transform --input " + female + " --method clr");
  CHECK(clr_female.exit_code == 1);
  CHECK(contains(clr_female.output, "error:"));
  const CommandResult clr_male = run_cli("transform --input " + male + " --method clr");
  CHECK(clr_male.exit_code == 0);
  CHECK(split_lines(clr_male.output).size() == 1 + 5 * 111);

  const fs::path out_csv = fs::temp_directory_path() / "lifecast_test_transform.csv";
  fs::remove(out_csv);
  const CommandResult to_file =
      run_cli("transform --input " + male + " --method cdf --output " + out_csv.string());
  CHECK(to_file.exit_code == 0);
  REQUIRE(fs::exists(out_csv));
  CHECK(read_file(out_csv).rfind("year,age,value\n", 0) == 0);
  fs::remove(out_csv);

  CHECK(run_cli("transform --input " + male + " --method ilr").exit_code == 2);
}

TEST_CASE("cli: fit dumps a decomposition as JSON") {
  const std::string female = std::string(LIFECAST_DATA_DIR) + "/hmd_sample_female.txt";
  const std::string male = std::string(LIFECAST_DATA_DIR) + "/hmd_sample_male.txt";
  const std::string inputs = " --female " + female + " --male " + male;

  const CommandResult ufts = run_cli("fit" + inputs + " --model ufts --method cdf --k 2");
  CHECK(ufts.exit_code == 0);
  const nlohmann::json model = nlohmann::json::parse(ufts.output);
  CHECK(model.at("kind").get<std::string>() == "ufts");
  CHECK(model.at("transform").get<std::string>() == "cdf");
  CHECK(model.at("n_series").get<int>() == 1);
  CHECK(model.at("n_years").get<int>() == 5);
  CHECK(model.at("common").at("k_selected").get<int>() == 2);

  const CommandResult mlfts = run_cli("fit" + inputs + " --model mlfts --method cdf");
  CHECK(mlfts.exit_code == 0);
  const nlohmann::json deep = nlohmann::json::parse(mlfts.output);
  CHECK(deep.at("kind").get<std::string>() == "mlfts");
  CHECK(deep.at("n_series").get<int>() == 2);
  CHECK(deep.at("specific").size() == 2);

  const fs::path out_json = fs::temp_directory_path() / "lifecast_test_fit.json";
  fs::remove(out_json);
  const CommandResult to_file =
      run_cli("fit" + inputs + " --model mfts --method cdf --output " + out_json.string());
  CHECK(to_file.exit_code == 0);
  REQUIRE(fs::exists(out_json));
  CHECK(nlohmann::json::parse(read_file(out_json)).at("kind").get<std::string>() == "mfts");
  fs::remove(out_json);

  CHECK(run_cli("fit" + inputs + " --model var").exit_code == 2);
  CHECK(run_cli("fit --female " + female + " --model ufts").exit_code == 2);
}
