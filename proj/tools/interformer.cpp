// Command-line front end for the interformer shared library. Every piece of
// domain work goes through the C API; this file only handles argument
// parsing, config merging, and file paths.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "interformer/c_api.h"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(if_status status, const std::string& what) {
  if (status == IF_OK) return;
  const std::string message = what + ": " + if_last_error();
  if (status == IF_ERR_INVALID_ARGUMENT) throw UsageError(message);
  throw std::runtime_error(message);
}

// Owned string coming back from the C API.
struct ApiString {
  char* text = nullptr;
  ~ApiString() { if_string_free(text); }
  std::string str() const { return text == nullptr ? std::string() : std::string(text); }
};

struct DatasetHandle {
  if_dataset* ptr = nullptr;
  ~DatasetHandle() { if_dataset_free(ptr); }
};
struct ModelHandle {
  if_model* ptr = nullptr;
  ~ModelHandle() { if_model_free(ptr); }
};
struct ClassifierHandle {
  if_classifier* ptr = nullptr;
  ~ClassifierHandle() { if_classifier_free(ptr); }
};

json default_config() {
  return json{
      {"seed", 1},
      {"out", "out"},
      {"dataset", ""},
      {"test_dataset", ""},
      {"checkpoint", ""},
      {"classifier", ""},
      {"synth",
       {{"classes", {"push", "wave", "kick", "approach", "still"}},
        {"samples_per_class", 40},
        {"joint_count", 9},
        {"t_min", 14},
        {"t_max", 28},
        {"noise_sd", 0.01},
        {"frame_rate", 15.0}}},
      {"model",
       {{"joint_count", 9},
        {"n_layers", 6},
        {"temporal_heads", 3},
        {"spatial_heads", 3},
        {"ffn_hidden", 0},
        {"use_spatial", true},
        {"use_adjacency", true},
        {"use_distance", true},
        {"mask_mode", "post_softmax"},
        {"adjacency_hops", "one"},
        {"eos_sentinel", 5.0}}},
      {"train",
       {{"batch_size", 128},
        {"steps", 1000},
        {"alpha", 1e-4},
        {"beta1", 0.9},
        {"beta2", 0.98},
        {"epsilon", 1e-9},
        {"lambda_ff", 1.0},
        {"input_noise_sd", 0.0},
        {"checkpoint_every", 0}}},
      {"gen",
       {{"max_len", 0},
        {"eos_threshold", 0.0},
        {"noise_sd", 0.0},
        {"chunk_len", 50},
        {"samples", 1},
        {"long", false},
        {"sample_index", 0}}},
      {"classifier_train",
       {{"hidden", 64},
        {"layers", 2},
        {"steps", 400},
        {"batch_size", 16},
        {"alpha", 1e-3},
        {"holdout_fraction", 0.2}}},
      {"eval", {{"length_tolerance", 2}}},
      {"ablate",
       {{"seeds", {1, 2, 3}},
        {"grid", "s1s4"},
        {"train_per_class", 40},
        {"test_per_class", 10}}},
  };
}

// File values override defaults; unknown keys anywhere are an error.
void merge_into(json& base, const json& overlay, const std::string& prefix) {
  for (const auto& [key, value] : overlay.items()) {
    if (!base.contains(key)) {
      throw UsageError("config: unknown key '" + prefix + key + "'");
    }
    if (base[key].is_object() && value.is_object()) {
      merge_into(base[key], value, prefix + key + ".");
    } else {
      base[key] = value;
    }
  }
}

json load_run_config(const std::string& config_path) {
  json config = default_config();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("config: cannot open '" + config_path + "'");
    json overlay;
    try {
      in >> overlay;
    } catch (const json::exception& e) {
      throw UsageError("config: malformed JSON in '" + config_path + "': " + e.what());
    }
    merge_into(config, overlay, "");
  }
  return config;
}

// Per-command flag overrides collected as (json pointer, value) pairs.
class Overrides {
 public:
  template <typename T>
  void bind(CLI::App* cmd, const std::string& flag, const std::string& pointer,
            const std::string& help) {
    auto* option = cmd->add_option_function<T>(
        flag, [this, pointer](const T& value) { values_[pointer] = value; }, help);
    if constexpr (!std::is_same_v<T, std::vector<std::string>> &&
                  !std::is_same_v<T, std::vector<std::uint64_t>>) {
      option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  void bind_flag(CLI::App* cmd, const std::string& flag, const std::string& pointer,
                 const std::string& help) {
    cmd->add_flag_function(
        flag, [this, pointer](std::int64_t count) { values_[pointer] = count > 0; }, help);
  }

  void apply(json& config) const {
    for (const auto& [pointer, value] : values_) {
      config[json::json_pointer(pointer)] = value;
    }
  }

 private:
  std::map<std::string, json> values_;
};

void propagate_seed(json& config) {
  const auto seed = config.at("seed").get<std::uint64_t>();
  for (const char* section : {"synth", "train", "gen", "classifier_train"}) {
    if (!config[section].contains("seed")) config[section]["seed"] = seed;
  }
}

std::string out_path(const json& config, const std::string& name) {
  return (std::filesystem::path(config.at("out").get<std::string>()) / name).string();
}

void echo_config(const json& config, const std::string& command) {
  std::filesystem::create_directories(config.at("out").get<std::string>());
  json echo = config;
  echo["command"] = command;
  std::ofstream out(out_path(config, "config." + command + ".json"), std::ios::trunc);
  out << echo.dump(2) << '\n';
}

std::string require_path(const json& config, const char* key, const char* flag) {
  const std::string value = config.at(key).get<std::string>();
  if (value.empty()) {
    throw UsageError(std::string("missing ") + key + " path (set " + flag +
                     " or the '" + key + "' config key)");
  }
  return value;
}

DatasetHandle load_dataset_checked(const std::string& path) {
  DatasetHandle dataset;
  check(if_dataset_load(path.c_str(), &dataset.ptr), "loading dataset '" + path + "'");
  return dataset;
}

// --- subcommands -------------------------------------------------------------

int cmd_synth(const json& config) {
  echo_config(config, "synth");
  DatasetHandle dataset;
  check(if_dataset_synthesize(config.at("synth").dump().c_str(), &dataset.ptr),
        "synthesizing dataset");
  std::string path = config.at("dataset").get<std::string>();
  if (path.empty()) path = out_path(config, "dataset.json");
  check(if_dataset_save(dataset.ptr, path.c_str()), "saving dataset");

  ApiString summary;
  check(if_dataset_summary_json(dataset.ptr, &summary.text), "summarizing dataset");
  const json s = json::parse(summary.str());
  std::cout << "wrote " << s.at("samples").get<std::size_t>() << " samples to " << path << '\n';
  for (const auto& [name, count] : s.at("classes").items()) {
    std::cout << "  " << name << ": " << count.get<int>() << '\n';
  }
  return 0;
}

int cmd_train(const json& config, const std::string& resume_path, int setup) {
  echo_config(config, "train");
  DatasetHandle dataset = load_dataset_checked(require_path(config, "dataset", "--dataset"));

  ModelHandle model;
  if (!resume_path.empty()) {
    check(if_model_load(resume_path.c_str(), &model.ptr), "loading checkpoint");
  } else {
    json model_config = config.at("model");
    if (setup > 0) {
      model_config["use_spatial"] = setup >= 2;
      model_config["use_adjacency"] = setup >= 3;
      model_config["use_distance"] = setup >= 4;
    }
    check(if_model_create(model_config.dump().c_str(), config.at("seed").get<std::uint64_t>(),
                          &model.ptr),
          "creating model");
  }

  json train_config = config.at("train");
  std::string checkpoint = config.at("checkpoint").get<std::string>();
  if (checkpoint.empty()) checkpoint = out_path(config, "model.ckpt");
  train_config["checkpoint_path"] = checkpoint;
  const std::string log_path = out_path(config, "train_log.csv");
  check(if_train(model.ptr, dataset.ptr, train_config.dump().c_str(), log_path.c_str()),
        "training");
  std::cout << "checkpoint: " << checkpoint << "\nlog: " << log_path << '\n';
  return 0;
}

int cmd_generate(const json& config) {
  echo_config(config, "generate");
  DatasetHandle dataset = load_dataset_checked(require_path(config, "dataset", "--dataset"));
  ModelHandle model;
  check(if_model_load(require_path(config, "checkpoint", "--checkpoint").c_str(), &model.ptr),
        "loading checkpoint");

  json gen = config.at("gen");
  const auto samples = gen.at("samples").get<std::size_t>();
  const bool long_windows = gen.at("long").get<bool>();
  const auto sample_index = gen.at("sample_index").get<std::size_t>();
  gen.erase("samples");
  gen.erase("long");
  gen.erase("sample_index");

  if (samples > 1) {
    const std::string prefix = out_path(config, "generated_s");
    check(if_generate_diverse_to_files(model.ptr, dataset.ptr, sample_index, gen.dump().c_str(),
                                       samples, prefix.c_str()),
          "generating");
    std::cout << "wrote " << samples << " sequences to " << prefix << "*.json\n";
  } else {
    const std::string path = out_path(config, "generated.json");
    const std::string csv = out_path(config, "generated.csv");
    check(if_generate_to_file(model.ptr, dataset.ptr, sample_index, gen.dump().c_str(),
                              long_windows ? 1 : 0, path.c_str(), csv.c_str()),
          "generating");
    std::cout << "wrote " << path << " and " << csv << '\n';
  }
  return 0;
}

ClassifierHandle obtain_classifier(const json& config) {
  ClassifierHandle classifier;
  const std::string path = config.at("classifier").get<std::string>();
  if (!path.empty() && std::filesystem::exists(path)) {
    check(if_classifier_load(path.c_str(), &classifier.ptr), "loading classifier");
    return classifier;
  }
  DatasetHandle train_set = load_dataset_checked(require_path(config, "dataset", "--dataset"));
  double holdout = 0.0;
  check(if_classifier_train(train_set.ptr, config.at("classifier_train").dump().c_str(),
                            &classifier.ptr, &holdout),
        "training classifier");
  std::cout << "classifier holdout accuracy: " << holdout << "%\n";
  if (!path.empty()) {
    check(if_classifier_save(classifier.ptr, path.c_str()), "saving classifier");
  }
  return classifier;
}

int cmd_eval(const json& config) {
  echo_config(config, "eval");
  DatasetHandle test_set =
      load_dataset_checked(require_path(config, "test_dataset", "--test-dataset"));
  ModelHandle model;
  check(if_model_load(require_path(config, "checkpoint", "--checkpoint").c_str(), &model.ptr),
        "loading checkpoint");
  ClassifierHandle classifier = obtain_classifier(config);

  json eval_config = config.at("eval");
  eval_config["gen"] = config.at("gen");
  eval_config["gen"].erase("samples");
  eval_config["gen"].erase("long");
  eval_config["gen"].erase("sample_index");

  ApiString report_json, report_table;
  check(if_evaluate(model.ptr, classifier.ptr, test_set.ptr, eval_config.dump().c_str(),
                    &report_json.text, &report_table.text),
        "evaluating");

  std::ofstream json_out(out_path(config, "eval.json"), std::ios::trunc);
  json_out << report_json.str() << '\n';
  std::ofstream table_out(out_path(config, "eval.txt"), std::ios::trunc);
  table_out << report_table.str();
  std::cout << report_table.str();
  return 0;
}

struct AblateRow {
  std::string name;
  json model_overrides;
};

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double sd_of(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

int cmd_ablate(const json& config) {
  echo_config(config, "ablate");
  const json& ab = config.at("ablate");
  const auto seeds = ab.at("seeds").get<std::vector<std::uint64_t>>();
  const std::string grid = ab.at("grid").get<std::string>();

  std::vector<AblateRow> rows;
  if (grid == "s1s4" || grid == "both") {
    rows.push_back({"S1 transformer",
                    {{"use_spatial", false}, {"use_adjacency", false}, {"use_distance", false}}});
    rows.push_back({"S2 +spatial",
                    {{"use_spatial", true}, {"use_adjacency", false}, {"use_distance", false}}});
    rows.push_back({"S3 +adjacency",
                    {{"use_spatial", true}, {"use_adjacency", true}, {"use_distance", false}}});
    rows.push_back({"S4 +distance",
                    {{"use_spatial", true}, {"use_adjacency", true}, {"use_distance", true}}});
  }
  if (grid == "multihead" || grid == "both") {
    const auto t_heads = config.at("model").at("temporal_heads").get<std::size_t>();
    rows.push_back({"T1 S1 heads", {{"temporal_heads", 1}, {"spatial_heads", 1}}});
    rows.push_back({"Tm S1 heads", {{"temporal_heads", t_heads}, {"spatial_heads", 1}}});
    rows.push_back({"T1 Sm heads", {{"temporal_heads", 1}, {"spatial_heads", 3}}});
    rows.push_back({"Tm Sm heads", {{"temporal_heads", t_heads}, {"spatial_heads", 3}}});
  }
  if (rows.empty()) throw UsageError("ablate: grid must be s1s4, multihead, or both");

  json synth_train = config.at("synth");
  synth_train["samples_per_class"] = ab.at("train_per_class");
  synth_train["joint_count"] = config.at("model").at("joint_count");
  json synth_test = synth_train;
  synth_test["samples_per_class"] = ab.at("test_per_class");

  json eval_config = config.at("eval");
  eval_config["gen"] = config.at("gen");
  eval_config["gen"].erase("samples");
  eval_config["gen"].erase("long");
  eval_config["gen"].erase("sample_index");

  json result = json::array();
  std::map<std::string, std::vector<double>> zerov_metrics;
  for (const auto& row : rows) {
    json model_config = config.at("model");
    for (const auto& [key, value] : row.model_overrides.items()) model_config[key] = value;

    std::vector<double> accuracy, fvd_values, div_scores;
    for (const std::uint64_t seed : seeds) {
      json st = synth_train;
      st["seed"] = seed;
      json se = synth_test;
      se["seed"] = seed + 7777;
      DatasetHandle train_set, test_set;
      check(if_dataset_synthesize(st.dump().c_str(), &train_set.ptr), "synth train set");
      check(if_dataset_synthesize(se.dump().c_str(), &test_set.ptr), "synth test set");

      ModelHandle model;
      check(if_model_create(model_config.dump().c_str(), seed, &model.ptr), "creating model");
      json train_config = config.at("train");
      train_config["seed"] = seed;
      check(if_train(model.ptr, train_set.ptr, train_config.dump().c_str(), nullptr),
            "training " + row.name);

      json classifier_config = config.at("classifier_train");
      classifier_config["seed"] = seed;
      ClassifierHandle classifier;
      check(if_classifier_train(train_set.ptr, classifier_config.dump().c_str(), &classifier.ptr,
                                nullptr),
            "training classifier");

      ApiString report_json;
      check(if_evaluate(model.ptr, classifier.ptr, test_set.ptr, eval_config.dump().c_str(),
                        &report_json.text, nullptr),
            "evaluating " + row.name);
      const json report = json::parse(report_json.str());
      accuracy.push_back(report.at("model").at("average_accuracy").get<double>());
      fvd_values.push_back(report.at("model").at("fvd").get<double>());
      div_scores.push_back(report.at("model").at("diversity_score").get<double>());
      zerov_metrics["accuracy"].push_back(
          report.at("zero_velocity").at("average_accuracy").get<double>());
      zerov_metrics["fvd"].push_back(report.at("zero_velocity").at("fvd").get<double>());
      std::cout << row.name << " seed " << seed << ": accuracy "
                << accuracy.back() << "%, fvd " << fvd_values.back() << ", div score "
                << div_scores.back() << '\n';
    }
    result.push_back({{"setup", row.name},
                      {"model_config", model_config},
                      {"accuracy_mean", mean_of(accuracy)},
                      {"accuracy_sd", sd_of(accuracy)},
                      {"fvd_mean", mean_of(fvd_values)},
                      {"fvd_sd", sd_of(fvd_values)},
                      {"diversity_score_mean", mean_of(div_scores)},
                      {"diversity_score_sd", sd_of(div_scores)}});
  }

  json output{{"rows", result},
              {"seeds", seeds},
              {"zerov_accuracy_mean", mean_of(zerov_metrics["accuracy"])},
              {"zerov_fvd_mean", mean_of(zerov_metrics["fvd"])}};
  std::ofstream out(out_path(config, "ablate.json"), std::ios::trunc);
  out << output.dump(2) << '\n';

  std::ostringstream table;
  table << "setup            accuracy%          fvd        div-score\n";
  for (const auto& row : result) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-15s %6.1f +-%5.1f %9.3f +-%7.3f %7.1f +-%5.1f\n",
                  row.at("setup").get<std::string>().c_str(),
                  row.at("accuracy_mean").get<double>(), row.at("accuracy_sd").get<double>(),
                  row.at("fvd_mean").get<double>(), row.at("fvd_sd").get<double>(),
                  row.at("diversity_score_mean").get<double>(),
                  row.at("diversity_score_sd").get<double>());
    table << line;
  }
  char zv[160];
  std::snprintf(zv, sizeof(zv), "%-15s %6.1f          %9.3f\n", "zerov",
                output.at("zerov_accuracy_mean").get<double>(),
                output.at("zerov_fvd_mean").get<double>());
  table << zv;
  std::ofstream table_out(out_path(config, "ablate.txt"), std::ios::trunc);
  table_out << table.str();
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interformer: skeleton reaction generation"};
  app.require_subcommand(1);

  struct CommonFlags {
    std::string config_path;
    Overrides overrides;
  };
  std::map<std::string, std::shared_ptr<CommonFlags>> flags;

  auto add_common = [&](CLI::App* cmd) {
    auto f = std::make_shared<CommonFlags>();
    flags[cmd->get_name()] = f;
    cmd->add_option("--config", f->config_path, "JSON run config; flags override the file");
    f->overrides.bind<std::uint64_t>(cmd, "--seed", "/seed", "global seed");
    f->overrides.bind<std::string>(cmd, "--out", "/out", "output directory");
    return f;
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic interaction dataset");
  {
    auto f = add_common(synth);
    f->overrides.bind<std::string>(synth, "--dataset", "/dataset", "output dataset path");
    f->overrides.bind<std::vector<std::string>>(synth, "--classes", "/synth/classes",
                                                "interaction classes");
    f->overrides.bind<std::size_t>(synth, "--samples-per-class", "/synth/samples_per_class",
                                   "samples per class");
    f->overrides.bind<std::size_t>(synth, "--k", "/synth/joint_count", "joints per skeleton");
    f->overrides.bind<std::size_t>(synth, "--t-min", "/synth/t_min", "shortest sequence");
    f->overrides.bind<std::size_t>(synth, "--t-max", "/synth/t_max", "longest sequence");
    f->overrides.bind<double>(synth, "--noise-sd", "/synth/noise_sd", "coordinate jitter");
  }

  CLI::App* train = app.add_subcommand("train", "train a model on a dataset");
  std::string resume_path;
  int setup = 0;
  {
    auto f = add_common(train);
    f->overrides.bind<std::string>(train, "--dataset", "/dataset", "training dataset path");
    f->overrides.bind<std::string>(train, "--checkpoint", "/checkpoint",
                                   "checkpoint output path");
    train->add_option("--resume", resume_path, "continue from an existing checkpoint");
    train->add_option("--setup", setup, "ablation setup 1-4 applied to the model config")
        ->check(CLI::Range(1, 4));
    f->overrides.bind<std::size_t>(train, "--steps", "/train/steps", "total optimizer steps");
    f->overrides.bind<std::size_t>(train, "--batch-size", "/train/batch_size", "batch size");
    f->overrides.bind<double>(train, "--alpha", "/train/alpha", "learning rate");
    f->overrides.bind<double>(train, "--lambda-ff", "/train/lambda_ff",
                              "first-frame loss weight");
    f->overrides.bind<double>(train, "--input-noise-sd", "/train/input_noise_sd",
                              "decoder-input jitter during training");
    f->overrides.bind<std::size_t>(train, "--checkpoint-every", "/train/checkpoint_every",
                                   "checkpoint interval in steps");
    f->overrides.bind<std::size_t>(train, "--k", "/model/joint_count", "joints per skeleton");
    f->overrides.bind<std::size_t>(train, "--n-layers", "/model/n_layers", "stack depth");
    f->overrides.bind<std::size_t>(train, "--temporal-heads", "/model/temporal_heads",
                                   "temporal attention heads");
    f->overrides.bind<std::size_t>(train, "--spatial-heads", "/model/spatial_heads",
                                   "spatial attention heads (1 or 3)");
    f->overrides.bind<std::size_t>(train, "--ffn-hidden", "/model/ffn_hidden",
                                   "feed-forward width (0 = 4d)");
    f->overrides.bind<std::string>(train, "--mask-mode", "/model/mask_mode",
                                   "post_softmax | pre_softmax");
    f->overrides.bind<std::string>(train, "--adjacency-hops", "/model/adjacency_hops",
                                   "one | path");
    f->overrides.bind<double>(train, "--eos-sentinel", "/model/eos_sentinel",
                              "end-of-sequence coordinate value");
  }

  CLI::App* generate = app.add_subcommand("generate", "generate reactions from a checkpoint");
  {
    auto f = add_common(generate);
    f->overrides.bind<std::string>(generate, "--dataset", "/dataset",
                                   "dataset supplying actions and seed frames");
    f->overrides.bind<std::string>(generate, "--checkpoint", "/checkpoint", "model checkpoint");
    f->overrides.bind<std::size_t>(generate, "--sample-index", "/gen/sample_index",
                                   "which sample's action to react to");
    f->overrides.bind<std::size_t>(generate, "--samples", "/gen/samples",
                                   "number of noisy generations");
    f->overrides.bind<double>(generate, "--noise-sd", "/gen/noise_sd", "encoder noise");
    f->overrides.bind<std::size_t>(generate, "--max-len", "/gen/max_len",
                                   "length cap (0 = action length)");
    f->overrides.bind<std::size_t>(generate, "--chunk-len", "/gen/chunk_len",
                                   "window length for --long");
    f->overrides.bind<double>(generate, "--eos-threshold", "/gen/eos_threshold",
                              "sentinel detection threshold");
    f->overrides.bind_flag(generate, "--long", "/gen/long", "windowed long-sequence generation");
  }

  CLI::App* evaluate = app.add_subcommand("eval", "score generated reactions");
  {
    auto f = add_common(evaluate);
    f->overrides.bind<std::string>(evaluate, "--dataset", "/dataset",
                                   "training dataset (classifier source)");
    f->overrides.bind<std::string>(evaluate, "--test-dataset", "/test_dataset",
                                   "held-out dataset to evaluate on");
    f->overrides.bind<std::string>(evaluate, "--checkpoint", "/checkpoint", "model checkpoint");
    f->overrides.bind<std::string>(evaluate, "--classifier", "/classifier",
                                   "classifier checkpoint (trained if absent)");
    f->overrides.bind<std::size_t>(evaluate, "--classifier-steps", "/classifier_train/steps",
                                   "classifier training steps");
    f->overrides.bind<std::size_t>(evaluate, "--classifier-hidden", "/classifier_train/hidden",
                                   "classifier hidden size");
    f->overrides.bind<int>(evaluate, "--length-tolerance", "/eval/length_tolerance",
                           "frame slack for the length check");
  }

  CLI::App* ablate = app.add_subcommand("ablate", "compare ablation setups over several seeds");
  {
    auto f = add_common(ablate);
    f->overrides.bind<std::string>(ablate, "--grid", "/ablate/grid",
                                   "s1s4 | multihead | both");
    f->overrides.bind<std::vector<std::uint64_t>>(ablate, "--ablate-seeds", "/ablate/seeds",
                                                  "seeds to average over");
    f->overrides.bind<std::size_t>(ablate, "--train-per-class", "/ablate/train_per_class",
                                   "training samples per class");
    f->overrides.bind<std::size_t>(ablate, "--test-per-class", "/ablate/test_per_class",
                                   "test samples per class");
    f->overrides.bind<std::size_t>(ablate, "--steps", "/train/steps", "steps per run");
    f->overrides.bind<std::size_t>(ablate, "--batch-size", "/train/batch_size", "batch size");
    f->overrides.bind<double>(ablate, "--alpha", "/train/alpha", "learning rate");
    f->overrides.bind<std::size_t>(ablate, "--k", "/model/joint_count", "joints per skeleton");
    f->overrides.bind<std::size_t>(ablate, "--n-layers", "/model/n_layers", "stack depth");
    f->overrides.bind<std::size_t>(ablate, "--classifier-steps", "/classifier_train/steps",
                                   "classifier training steps");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // anything but help/success is a usage error
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto& f = flags.at(chosen->get_name());
  try {
    json config = load_run_config(f->config_path);
    f->overrides.apply(config);
    propagate_seed(config);

    if (chosen == synth) return cmd_synth(config);
    if (chosen == train) return cmd_train(config, resume_path, setup);
    if (chosen == generate) return cmd_generate(config);
    if (chosen == evaluate) return cmd_eval(config);
    if (chosen == ablate) return cmd_ablate(config);
    throw UsageError("unknown subcommand");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
