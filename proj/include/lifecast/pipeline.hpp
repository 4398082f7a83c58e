#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lifecast/evaluation.hpp"
#include "lifecast/hmd_io.hpp"
#include "lifecast/synthetic.hpp"

namespace lifecast {

/// Declarative description of one full experiment. Parsed from a JSON
/// config file; every field is validated before any file is touched.
struct RunConfig {
  enum class DataKind { Hmd, Synthetic } data_kind = DataKind::Synthetic;
  std::string hmd_female_path;
  std::string hmd_male_path;
  double hmd_radix = 100000.0;
  SynthSpec synth;  // per-sex seeds derived as seed and seed + 1

  std::vector<Transform> transforms = {Transform::Clr, Transform::CdfLogit};
  std::vector<ModelKind> models = {ModelKind::Ufts, ModelKind::Mfts, ModelKind::Mlfts};
  BacktestSettings settings;

  /// Explicit split boundaries; when absent the data span is divided
  /// into equal thirds (remainder to training).
  bool split_explicit = false;
  SplitSpec split;

  std::uint64_t seed = 1;
  int threads = 1;
  bool plots = false;
  std::string out_dir;  // may be empty; see resolve_out_dir
};

/// Name parsers shared by the config reader and the CLI. All throw
/// ConfigError on unknown names. transform_from_string accepts "clr",
/// "cdf" and the alias "cdf-logit".
Transform transform_from_string(const std::string& name);
ModelKind model_from_string(const std::string& name);
Approach approach_from_string(const std::string& name);

/// Parses and validates a config document. Throws ConfigError with the
/// offending key in the message.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Output directory precedence: command-line flag, config value,
/// LIFECAST_OUT_DIR environment variable, "lifecast-out".
std::string resolve_out_dir(const std::string& flag_value, const RunConfig& config);

/// Canonical JSON of the experiment-defining fields (data, methods,
/// split, seed), independent of execution details such as thread count
/// or output paths. Hashing it identifies the experiment.
std::string canonical_config_json(const RunConfig& config);

/// 64-bit FNV-1a of a byte string, as fixed-width hex.
std::string fnv1a_hex(const std::string& bytes);

struct Dataset {
  LifeTableSeries female;
  LifeTableSeries male;
};

/// Loads or generates the two sex series named by the config.
Dataset load_dataset(const RunConfig& config);

/// The split to use for a dataset: the explicit one, or equal thirds.
SplitSpec resolve_split(const RunConfig& config, const Dataset& data);

struct PipelineResult {
  BacktestOutcome outcome;
  std::vector<std::string> artifacts;  // file names relative to out_dir
  bool under_supported = false;
};

/// What a pipeline invocation should write.
struct ArtifactSelection {
  bool manifest = true;
  bool calibration = true;
  bool reports = true;  // per-alpha report CSVs plus detail.json
};

/// Runs the full backtest and writes the selected artifacts into
/// out_dir (created if missing). Every output is deterministic for a
/// given config: no timestamps, fixed value formatting.
PipelineResult run_pipeline(const RunConfig& config, const std::string& out_dir,
                            const ArtifactSelection& artifacts = {});

/// Summary statistics of one HMD-format file, for `validate-data`.
struct DataDiagnostics {
  int first_year = 0;
  int last_year = 0;
  std::string first_age;
  std::string last_age;
  int n_rows = 0;
  int zero_count_cells = 0;
  double max_radix_residual = 0.0;  // max relative |sum(dx) - radix| over years
};

DataDiagnostics diagnose_hmd_file(const std::string& path, double radix = 100000.0);
std::string format_diagnostics(const DataDiagnostics& d);

}  // namespace lifecast
