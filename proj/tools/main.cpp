#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "lifecast/errors.hpp"
#include "lifecast/fpca.hpp"
#include "lifecast/hmd_io.hpp"
#include "lifecast/pipeline.hpp"
#include "lifecast/version.hpp"

namespace {

using namespace lifecast;

struct PipelineArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 0;  // 0: keep config value
  bool plots = false;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config and environment)");
  cmd->add_option("--threads", args.threads, "worker threads (overrides config)");
  cmd->add_flag("--plots", args.plots, "also write SVG plots");
}

int run_pipeline_command(const PipelineArgs& args, const ArtifactSelection& selection) {
  RunConfig config = load_run_config(args.config_path);
  if (args.threads > 0) config.threads = args.threads;
  if (args.plots) config.plots = true;
  const std::string out_dir = resolve_out_dir(args.out_dir, config);
  const PipelineResult result = run_pipeline(config, out_dir, selection);
  std::cout << "wrote " << result.artifacts.size() << " artifact(s) to " << out_dir << '\n';
  for (const std::string& name : result.artifacts) std::cout << "  " << name << '\n';
  if (result.under_supported) {
    std::cout << "note: some horizons are under-supported for the requested coverage levels\n";
    return 3;
  }
  return 0;
}

void write_text_or_stdout(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forecast life-table death counts with calibrated prediction intervals"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  PipelineArgs run_args, calibrate_args, report_args;
  CLI::App* cmd_run = app.add_subcommand("run", "full pipeline: backtest plus every artifact");
  add_pipeline_options(cmd_run, run_args);
  CLI::App* cmd_calibrate =
      app.add_subcommand("calibrate", "backtest, writing only the calibration table");
  add_pipeline_options(cmd_calibrate, calibrate_args);
  CLI::App* cmd_report =
      app.add_subcommand("report", "backtest, writing only the evaluation reports");
  add_pipeline_options(cmd_report, report_args);

  std::string validate_path;
  double validate_radix = 100000.0;
  CLI::App* cmd_validate =
      app.add_subcommand("validate-data", "summarize a life-table text file");
  cmd_validate->add_option("file", validate_path, "life-table text file")->required();
  cmd_validate->add_option("--radix", validate_radix, "expected per-year total");

  std::string tr_input, tr_output, tr_method = "cdf", tr_sex = "female";
  bool tr_clamp = false;
  double tr_radix = 100000.0;
  CLI::App* cmd_transform =
      app.add_subcommand("transform", "transform a life-table file and emit year,age,value CSV");
  cmd_transform->add_option("--input", tr_input, "life-table text file")->required();
  cmd_transform->add_option("--method", tr_method, "clr or cdf (default cdf)");
  cmd_transform->add_option("--sex", tr_sex, "female or male (label only)");
  cmd_transform->add_option("--output", tr_output, "output CSV path (default stdout)");
  cmd_transform->add_flag("--clamp", tr_clamp, "clamp degenerate cumulative values");
  cmd_transform->add_option("--radix", tr_radix, "expected per-year total");

  std::string fit_female, fit_male, fit_method = "cdf", fit_model = "ufts", fit_sex = "female",
              fit_output;
  int fit_k = 0;
  double fit_radix = 100000.0;
  CLI::App* cmd_fit = app.add_subcommand("fit", "fit one decomposition and dump it as JSON");
  cmd_fit->add_option("--female", fit_female, "female life-table text file")->required();
  cmd_fit->add_option("--male", fit_male, "male life-table text file")->required();
  cmd_fit->add_option("--method", fit_method, "clr or cdf (default cdf)");
  cmd_fit->add_option("--model", fit_model, "ufts, mfts or mlfts");
  cmd_fit->add_option("--sex", fit_sex, "series for ufts (female or male)");
  cmd_fit->add_option("--k", fit_k, "fixed component count (0 = eigenvalue-ratio rule)");
  cmd_fit->add_option("--output", fit_output, "output JSON path (default stdout)");
  cmd_fit->add_option("--radix", fit_radix, "expected per-year total");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_run) return run_pipeline_command(run_args, ArtifactSelection{});
    if (*cmd_calibrate) {
      ArtifactSelection selection;
      selection.manifest = false;
      selection.reports = false;
      return run_pipeline_command(calibrate_args, selection);
    }
    if (*cmd_report) {
      ArtifactSelection selection;
      selection.manifest = false;
      selection.calibration = false;
      return run_pipeline_command(report_args, selection);
    }
    if (*cmd_validate) {
      std::cout << format_diagnostics(diagnose_hmd_file(validate_path, validate_radix));
      return 0;
    }
    if (*cmd_transform) {
      const Sex sex = tr_sex == "male" ? Sex::Male : Sex::Female;
      const HmdTable table = read_hmd_lifetable(tr_input, sex, tr_radix);
      const LifeTableSeries counts = lifetable_from_qx(table.qx, tr_radix);
      CdfOptions options;
      options.clamp = tr_clamp;
      const UnconstrainedSeries series =
          forward_transform(transform_from_string(tr_method), counts, options);
      std::vector<std::string> labels(counts.grid().labels().begin(),
                                      counts.grid().labels().begin() + series.n_coords());
      std::ostringstream csv;
      write_series_csv(csv, labels, series.years, series.values);
      write_text_or_stdout(tr_output, csv.str());
      return 0;
    }
    if (*cmd_fit) {
      const HmdTable female = read_hmd_lifetable(fit_female, Sex::Female, fit_radix);
      const HmdTable male = read_hmd_lifetable(fit_male, Sex::Male, fit_radix);
      const Transform transform = transform_from_string(fit_method);
      const UnconstrainedSeries f =
          forward_transform(transform, lifetable_from_qx(female.qx, fit_radix));
      const UnconstrainedSeries m =
          forward_transform(transform, lifetable_from_qx(male.qx, fit_radix));
      const KRule rule = fit_k > 0 ? KRule::fixed(fit_k) : KRule::evr();
      FpcaModel model;
      switch (model_from_string(fit_model)) {
        case ModelKind::Ufts:
          model = fit_sex == "male" ? fit_ufts(m, Sex::Male, rule) : fit_ufts(f, Sex::Female, rule);
          break;
        case ModelKind::Mfts:
          model = fit_mfts(f, m, rule);
          break;
        default:
          model = fit_mlfts(f, m, rule);
          break;
      }
      write_text_or_stdout(fit_output, model_to_json(model) + "\n");
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
