#include "lifecast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <tuple>

#include <nlohmann/json.hpp>

#include "lifecast/errors.hpp"
#include "lifecast/plot.hpp"
#include "lifecast/version.hpp"

namespace lifecast {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string gnum(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown config key '" + it.key() + "' in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  return it->get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) {
    throw ConfigError(std::string("config key '") + key + "' must be an integer");
  }
  return it->get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(std::string("config key '") + key + "' must be a boolean");
  return it->get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
  return it->get<std::string>();
}

template <typename T>
std::vector<T> parse_name_list(const json& obj, const char* key, T (*parse)(const std::string&),
                               std::vector<T> fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array() || it->empty()) {
    throw ConfigError(std::string("config key '") + key + "' must be a nonempty array");
  }
  std::vector<T> out;
  for (const json& entry : *it) {
    if (!entry.is_string()) {
      throw ConfigError(std::string("entries of '") + key + "' must be strings");
    }
    T value = parse(entry.get<std::string>());
    for (const T& seen : out) {
      if (seen == value) {
        throw ConfigError(std::string("duplicate entry in '") + key + "'");
      }
    }
    out.push_back(value);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string k_rule_name(const KRule& rule) {
  if (rule.kind == KRule::Kind::Evr) return "evr";
  return "fixed:" + std::to_string(rule.fixed_k);
}

std::string score_model_name(const ScoreModelConfig& config) {
  if (config.kind == ScoreModelConfig::Kind::RandomWalkDrift) return "rwd";
  return "ar:" + std::to_string(config.ar_max_order);
}

}  // namespace

Transform transform_from_string(const std::string& name) {
  if (name == "clr") return Transform::Clr;
  if (name == "cdf" || name == "cdf-logit") return Transform::CdfLogit;
  throw ConfigError("unknown transform '" + name + "' (expected clr or cdf)");
}

ModelKind model_from_string(const std::string& name) {
  if (name == "ufts") return ModelKind::Ufts;
  if (name == "mfts") return ModelKind::Mfts;
  if (name == "mlfts") return ModelKind::Mlfts;
  throw ConfigError("unknown model '" + name + "' (expected ufts, mfts or mlfts)");
}

Approach approach_from_string(const std::string& name) {
  if (name == "sd") return Approach::Sd;
  if (name == "conformal") return Approach::Conformal;
  if (name == "parametric") return Approach::Parametric;
  throw ConfigError("unknown approach '" + name + "' (expected sd, conformal or parametric)");
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j, "config",
             {"data", "transforms", "models", "approaches", "alphas", "k", "score_model",
              "split", "seed", "threads", "plots", "out_dir", "standardize_mfts", "refit_k",
              "cdf_clamp", "cdf_eps"});

  RunConfig config;

  auto data_it = j.find("data");
  if (data_it == j.end() || !data_it->is_object()) {
    throw ConfigError("config needs a 'data' object");
  }
  const json& data = *data_it;
  const std::string kind = get_string(data, "kind", "");
  if (kind == "hmd") {
    check_keys(data, "data", {"kind", "female", "male", "radix"});
    config.data_kind = RunConfig::DataKind::Hmd;
    config.hmd_female_path = get_string(data, "female", "");
    config.hmd_male_path = get_string(data, "male", "");
    if (config.hmd_female_path.empty() || config.hmd_male_path.empty()) {
      throw ConfigError("hmd data needs 'female' and 'male' file paths");
    }
    config.hmd_radix = get_number(data, "radix", 100000.0);
    if (!(config.hmd_radix > 0.0)) throw ConfigError("radix must be positive");
  } else if (kind == "synthetic") {
    check_keys(data, "data",
               {"kind", "n_years", "n_ages", "n_components", "noise_sd", "start_year", "radix",
                "drift_scale", "innov_sd"});
    config.data_kind = RunConfig::DataKind::Synthetic;
    SynthSpec spec;
    spec.n_years = get_int(data, "n_years", spec.n_years);
    spec.n_ages = get_int(data, "n_ages", spec.n_ages);
    spec.n_components = get_int(data, "n_components", spec.n_components);
    spec.noise_sd = get_number(data, "noise_sd", spec.noise_sd);
    spec.start_year = get_int(data, "start_year", spec.start_year);
    spec.radix = get_number(data, "radix", spec.radix);
    spec.drift_scale = get_number(data, "drift_scale", spec.drift_scale);
    spec.innov_sd = get_number(data, "innov_sd", spec.innov_sd);
    if (spec.n_years < 7) throw ConfigError("synthetic data needs n_years >= 7 for a split");
    if (spec.n_ages < 3) throw ConfigError("synthetic data needs n_ages >= 3");
    if (spec.n_components < 1 || spec.n_components >= spec.n_ages - 1) {
      throw ConfigError("n_components must be in [1, n_ages-2]");
    }
    if (spec.noise_sd < 0.0) throw ConfigError("noise_sd must be nonnegative");
    if (!(spec.radix > 0.0)) throw ConfigError("radix must be positive");
    config.synth = spec;
  } else {
    throw ConfigError("data.kind must be 'hmd' or 'synthetic'");
  }

  config.transforms =
      parse_name_list(j, "transforms", transform_from_string, config.transforms);
  config.models = parse_name_list(j, "models", model_from_string, config.models);
  config.settings.approaches =
      parse_name_list(j, "approaches", approach_from_string, config.settings.approaches);

  if (auto it = j.find("alphas"); it != j.end()) {
    if (!it->is_array() || it->empty()) throw ConfigError("'alphas' must be a nonempty array");
    config.settings.alphas.clear();
    for (const json& entry : *it) {
      if (!entry.is_number()) throw ConfigError("entries of 'alphas' must be numbers");
      config.settings.alphas.push_back(entry.get<double>());
    }
  }
  for (double alpha : config.settings.alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("alpha " + gnum(alpha) + " outside (0, 1)");
    }
  }

  if (auto it = j.find("k"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("'k' must be an object");
    check_keys(*it, "k", {"rule", "value"});
    const std::string rule = get_string(*it, "rule", "evr");
    if (rule == "evr") {
      config.settings.k_rule = KRule::evr();
    } else if (rule == "fixed") {
      const int value = get_int(*it, "value", 6);
      if (value < 1) throw ConfigError("fixed component count must be >= 1");
      config.settings.k_rule = KRule::fixed(value);
    } else {
      throw ConfigError("k.rule must be 'evr' or 'fixed'");
    }
  }

  if (auto it = j.find("score_model"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("'score_model' must be an object");
    check_keys(*it, "score_model", {"kind", "max_order"});
    const std::string model = get_string(*it, "kind", "rwd");
    if (model == "rwd") {
      config.settings.score_model.kind = ScoreModelConfig::Kind::RandomWalkDrift;
    } else if (model == "ar") {
      config.settings.score_model.kind = ScoreModelConfig::Kind::Ar;
      config.settings.score_model.ar_max_order = get_int(*it, "max_order", 6);
      if (config.settings.score_model.ar_max_order < 0) {
        throw ConfigError("score_model.max_order must be >= 0");
      }
    } else {
      throw ConfigError("score_model.kind must be 'rwd' or 'ar'");
    }
  }

  if (auto it = j.find("split"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("'split' must be an object");
    check_keys(*it, "split", {"kind", "train_end", "val_end", "test_end"});
    const std::string split_kind = get_string(*it, "kind", "");
    if (split_kind == "equal-thirds") {
      config.split_explicit = false;
    } else if (split_kind.empty()) {
      if (!it->contains("train_end") || !it->contains("val_end") || !it->contains("test_end")) {
        throw ConfigError("explicit split needs train_end, val_end and test_end");
      }
      config.split_explicit = true;
      config.split.train_end = get_int(*it, "train_end", 0);
      config.split.val_end = get_int(*it, "val_end", 0);
      config.split.test_end = get_int(*it, "test_end", 0);
    } else {
      throw ConfigError("split.kind must be 'equal-thirds' or omitted for explicit bounds");
    }
  }

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      throw ConfigError("'seed' must be a nonnegative integer");
    }
    config.seed = it->get<std::uint64_t>();
  }
  config.threads = get_int(j, "threads", 1);
  if (config.threads < 1) throw ConfigError("'threads' must be >= 1");
  config.plots = get_bool(j, "plots", false);
  config.out_dir = get_string(j, "out_dir", "");
  config.settings.standardize_mfts = get_bool(j, "standardize_mfts", false);
  config.settings.refit_k = get_bool(j, "refit_k", true);
  config.settings.cdf.clamp = get_bool(j, "cdf_clamp", false);
  config.settings.cdf.eps = get_number(j, "cdf_eps", config.settings.cdf.eps);
  if (!(config.settings.cdf.eps > 0.0 && config.settings.cdf.eps < 0.5)) {
    throw ConfigError("'cdf_eps' must lie in (0, 0.5)");
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string resolve_out_dir(const std::string& flag_value, const RunConfig& config) {
  if (!flag_value.empty()) return flag_value;
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("LIFECAST_OUT_DIR"); env != nullptr && env[0] != '\0') {
    return env;
  }
  return "lifecast-out";
}

std::string canonical_config_json(const RunConfig& config) {
  json c;
  if (config.data_kind == RunConfig::DataKind::Hmd) {
    c["data"] = {{"kind", "hmd"},
                 {"female", config.hmd_female_path},
                 {"male", config.hmd_male_path},
                 {"radix", config.hmd_radix}};
  } else {
    const SynthSpec& s = config.synth;
    c["data"] = {{"kind", "synthetic"},   {"n_years", s.n_years},
                 {"n_ages", s.n_ages},     {"n_components", s.n_components},
                 {"noise_sd", s.noise_sd}, {"start_year", s.start_year},
                 {"radix", s.radix},       {"drift_scale", s.drift_scale},
                 {"innov_sd", s.innov_sd}};
  }
  json transforms = json::array();
  for (Transform t : config.transforms) transforms.push_back(to_string(t));
  json models = json::array();
  for (ModelKind m : config.models) models.push_back(to_string(m));
  json approaches = json::array();
  for (Approach a : config.settings.approaches) approaches.push_back(to_string(a));
  c["transforms"] = transforms;
  c["models"] = models;
  c["approaches"] = approaches;
  c["alphas"] = config.settings.alphas;
  c["k_rule"] = k_rule_name(config.settings.k_rule);
  c["score_model"] = score_model_name(config.settings.score_model);
  if (config.split_explicit) {
    c["split"] = {{"train_end", config.split.train_end},
                  {"val_end", config.split.val_end},
                  {"test_end", config.split.test_end}};
  } else {
    c["split"] = "equal-thirds";
  }
  c["seed"] = config.seed;
  c["standardize_mfts"] = config.settings.standardize_mfts;
  c["refit_k"] = config.settings.refit_k;
  c["cdf"] = {{"clamp", config.settings.cdf.clamp}, {"eps", config.settings.cdf.eps}};
  return c.dump();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char byte : std::string_view(bytes)) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Dataset load_dataset(const RunConfig& config) {
  if (config.data_kind == RunConfig::DataKind::Hmd) {
    HmdTable female = read_hmd_lifetable(config.hmd_female_path, Sex::Female, config.hmd_radix);
    HmdTable male = read_hmd_lifetable(config.hmd_male_path, Sex::Male, config.hmd_radix);
    // Counts are rebuilt from qx at full precision; the published dx
    // column is only as precise as its printing.
    return {lifetable_from_qx(std::move(female.qx), config.hmd_radix),
            lifetable_from_qx(std::move(male.qx), config.hmd_radix)};
  }
  SynthSpec female = config.synth;
  female.sex = Sex::Female;
  female.seed = config.seed;
  SynthSpec male = config.synth;
  male.sex = Sex::Male;
  male.seed = config.seed + 1;
  return {synth_lifetable(female), synth_lifetable(male)};
}

SplitSpec resolve_split(const RunConfig& config, const Dataset& data) {
  if (config.split_explicit) return config.split;
  return SplitSpec::equal_thirds(data.female.years());
}

namespace {

std::string calibration_csv(const BacktestOutcome& outcome) {
  std::ostringstream out;
  out << "horizon";
  for (const CalibrationReport& c : outcome.calibrations) {
    out << ",xi_" << to_string(c.transform) << '_' << to_string(c.model) << '_'
        << to_string(c.sex) << "_a" << gnum(c.alpha);
  }
  out << '\n';
  const std::size_t horizons = outcome.calibrations.front().xi.size();
  for (std::size_t h = 0; h < horizons; ++h) {
    out << (h + 1);
    for (const CalibrationReport& c : outcome.calibrations) out << ',' << num(c.xi[h]);
    out << '\n';
  }
  return out.str();
}

double metric_value(const MethodReport& report, int metric) {
  switch (metric) {
    case 0: return report.mean_ecp;
    case 1: return report.median_ecp;
    case 2: return report.mean_cpd;
    case 3: return report.median_cpd;
    case 4: return report.mean_score;
    default: return report.median_score;
  }
}

constexpr const char* kMetricNames[6] = {"mean_ecp",  "median_ecp",  "mean_cpd",
                                         "median_cpd", "mean_score", "median_score"};

std::string report_csv(const BacktestOutcome& outcome, double alpha) {
  std::map<std::tuple<int, int, int, int>, const MethodReport*> lookup;
  std::vector<Sex> sexes;
  for (const MethodReport& m : outcome.methods) {
    if (m.alpha != alpha) continue;
    lookup[{static_cast<int>(m.sex), static_cast<int>(m.transform), static_cast<int>(m.model),
            static_cast<int>(m.approach)}] = &m;
    if (std::find(sexes.begin(), sexes.end(), m.sex) == sexes.end()) sexes.push_back(m.sex);
  }
  std::ostringstream out;
  out << "sex,metric,approach";
  for (Transform t : outcome.transforms) {
    for (ModelKind m : outcome.models) {
      out << ',' << to_string(t) << '_' << to_string(m);
    }
  }
  out << '\n';
  for (Sex sex : sexes) {
    for (int metric = 0; metric < 6; ++metric) {
      for (Approach approach : outcome.settings.approaches) {
        out << to_string(sex) << ',' << kMetricNames[metric] << ',' << to_string(approach);
        for (Transform t : outcome.transforms) {
          for (ModelKind m : outcome.models) {
            const MethodReport* report =
                lookup.at({static_cast<int>(sex), static_cast<int>(t), static_cast<int>(m),
                           static_cast<int>(approach)});
            out << ',' << num(metric_value(*report, metric));
          }
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

json split_json(const SplitSpec& split) {
  return {{"train_end", split.train_end},
          {"val_end", split.val_end},
          {"test_end", split.test_end}};
}

std::string detail_json(const BacktestOutcome& outcome, const SplitSpec& split) {
  json doc;
  doc["split"] = split_json(split);
  doc["under_supported"] = outcome.any_under_supported;
  json methods = json::array();
  for (const MethodReport& m : outcome.methods) {
    json horizons = json::array();
    for (const HorizonMetrics& h : m.horizons) {
      horizons.push_back({{"horizon", h.horizon},
                          {"n_pairs", h.n_pairs},
                          {"ecp", h.ecp},
                          {"cpd", h.cpd},
                          {"mean_score", h.mean_score},
                          {"under_supported", h.under_supported}});
    }
    methods.push_back({{"sex", to_string(m.sex)},
                       {"transform", to_string(m.transform)},
                       {"model", to_string(m.model)},
                       {"approach", to_string(m.approach)},
                       {"alpha", m.alpha},
                       {"horizons", horizons},
                       {"mean_ecp", m.mean_ecp},
                       {"median_ecp", m.median_ecp},
                       {"mean_cpd", m.mean_cpd},
                       {"median_cpd", m.median_cpd},
                       {"mean_score", m.mean_score},
                       {"median_score", m.median_score},
                       {"any_under_supported", m.any_under_supported},
                       {"best_mean_cpd", m.best_mean_cpd},
                       {"best_median_cpd", m.best_median_cpd},
                       {"best_mean_score", m.best_mean_score},
                       {"best_median_score", m.best_median_score}});
  }
  doc["methods"] = methods;
  json calibrations = json::array();
  for (const CalibrationReport& c : outcome.calibrations) {
    calibrations.push_back({{"sex", to_string(c.sex)},
                            {"transform", to_string(c.transform)},
                            {"model", to_string(c.model)},
                            {"alpha", c.alpha},
                            {"xi", c.xi},
                            {"n_ratios", c.n_ratios},
                            {"under_supported", c.under_supported}});
  }
  doc["calibrations"] = calibrations;
  return doc.dump(2) + "\n";
}

std::string manifest_json(const RunConfig& config, const Dataset& data, const SplitSpec& split,
                          const BacktestOutcome& outcome,
                          const std::vector<std::string>& artifacts) {
  json doc;
  doc["version"] = kVersion;
  doc["config_hash"] = fnv1a_hex(canonical_config_json(config));
  doc["seed"] = config.seed;
  doc["data"] = {
      {"kind", config.data_kind == RunConfig::DataKind::Hmd ? "hmd" : "synthetic"},
      {"first_year", data.female.first_year()},
      {"last_year", data.female.last_year()},
      {"n_years", data.female.n_years()},
      {"n_ages", data.female.n_ages()},
      {"radix", data.female.radix()}};
  doc["split"] = split_json(split);
  json transforms = json::array();
  for (Transform t : config.transforms) transforms.push_back(to_string(t));
  json models = json::array();
  for (ModelKind m : config.models) models.push_back(to_string(m));
  json approaches = json::array();
  for (Approach a : config.settings.approaches) approaches.push_back(to_string(a));
  doc["transforms"] = transforms;
  doc["models"] = models;
  doc["approaches"] = approaches;
  doc["alphas"] = config.settings.alphas;
  doc["k_rule"] = k_rule_name(config.settings.k_rule);
  doc["score_model"] = score_model_name(config.settings.score_model);
  doc["under_supported"] = outcome.any_under_supported;
  doc["artifacts"] = artifacts;
  return doc.dump(2) + "\n";
}

void write_plots(const std::filesystem::path& out_dir, const Dataset& data,
                 const BacktestOutcome& outcome, std::vector<std::string>& artifacts) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "plots");
  const auto add = [&](const std::string& name, const std::string& content) {
    write_file(out_dir / "plots" / name, content);
    artifacts.push_back("plots/" + name);
  };
  add("fan_" + to_string(data.female.sex()) + ".svg",
      svg_curve_fan(data.female, "observed death counts, " + to_string(data.female.sex())));
  add("fan_" + to_string(data.male.sex()) + ".svg",
      svg_curve_fan(data.male, "observed death counts, " + to_string(data.male.sex())));

  const double alpha = outcome.settings.alphas.front();
  for (const BacktestCell& cell : outcome.cells) {
    for (std::size_t s = 0; s < cell.sexes.size(); ++s) {
      const SexBacktest& sb = cell.sexes[s];
      const TestForecast* first = nullptr;
      for (const TestForecast& tf : sb.forecasts) {
        if (tf.horizon == 1) {
          first = &tf;
          break;
        }
      }
      if (first == nullptr || sb.calibration.empty()) continue;
      const HorizonCalibration& hc = sb.calibration.front();
      const IntervalBand band =
          sd_band(first->point_counts, hc.gamma, hc.xi.front().xi, alpha);
      const LifeTableSeries& truth = s == 0 ? data.female : data.male;
      const Eigen::VectorXd actual =
          truth.values().row(first->target_year - truth.first_year()).transpose();
      const std::string name = "band_" + to_string(cell.transform) + "_" +
                               to_string(cell.model) + "_" + to_string(sb.sex) + ".svg";
      add(name, svg_band_plot(band.lower, band.upper, first->point_counts, actual,
                              to_string(cell.transform) + " " + to_string(cell.model) + " " +
                                  to_string(sb.sex) + ", one year ahead, alpha " +
                                  gnum(alpha)));
    }
  }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const std::string& out_dir,
                            const ArtifactSelection& selection) {
  Dataset data = load_dataset(config);
  const SplitSpec split = resolve_split(config, data);
  BacktestOutcome outcome =
      run_full_backtest(data.female, data.male, split, config.transforms, config.models,
                        config.settings, config.threads);

  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> artifacts;

  if (selection.calibration) {
    write_file(dir / "calibration.csv", calibration_csv(outcome));
    artifacts.push_back("calibration.csv");
  }
  if (selection.reports) {
    for (double alpha : config.settings.alphas) {
      const std::string name = "report_alpha" + gnum(alpha) + ".csv";
      write_file(dir / name, report_csv(outcome, alpha));
      artifacts.push_back(name);
    }
    write_file(dir / "detail.json", detail_json(outcome, split));
    artifacts.push_back("detail.json");
  }
  if (config.plots) write_plots(dir, data, outcome, artifacts);
  if (selection.manifest) {
    write_file(dir / "manifest.json", manifest_json(config, data, split, outcome, artifacts));
    artifacts.push_back("manifest.json");
  }

  PipelineResult result;
  result.under_supported = outcome.any_under_supported;
  result.outcome = std::move(outcome);
  result.artifacts = std::move(artifacts);
  return result;
}

DataDiagnostics diagnose_hmd_file(const std::string& path, double radix) {
  const HmdTable table = read_hmd_lifetable(path, Sex::Other, radix);
  DataDiagnostics d;
  d.first_year = table.deaths.first_year();
  d.last_year = table.deaths.last_year();
  d.first_age = table.deaths.grid().labels().front();
  d.last_age = table.deaths.grid().labels().back();
  d.n_rows = static_cast<int>(table.rows.size());
  std::map<int, double> year_sums;
  for (const HmdRow& row : table.rows) {
    if (row.dx == 0.0) ++d.zero_count_cells;
    year_sums[row.year] += row.dx;
  }
  for (const auto& [year, sum] : year_sums) {
    (void)year;
    d.max_radix_residual = std::max(d.max_radix_residual, std::abs(sum - radix) / radix);
  }
  return d;
}

std::string format_diagnostics(const DataDiagnostics& d) {
  std::ostringstream out;
  out << "years " << d.first_year << '-' << d.last_year << '\n';
  out << "ages " << d.first_age << '-' << d.last_age << '\n';
  out << "rows " << d.n_rows << '\n';
  out << "zero counts: " << d.zero_count_cells << " cells\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", d.max_radix_residual);
  out << "max radix residual: " << buf << " relative\n";
  return out.str();
}

}  // namespace lifecast
