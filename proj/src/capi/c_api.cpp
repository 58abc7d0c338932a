#include "interformer/c_api.h"

#include <cstring>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/classifier.hpp"
#include "core/config_json.hpp"
#include "core/dataset_io.hpp"
#include "core/errors.hpp"
#include "core/generation.hpp"
#include "core/metrics.hpp"
#include "core/model.hpp"
#include "core/synth.hpp"
#include "core/training.hpp"

struct if_dataset {
  interformer::Dataset data;
};

struct if_model {
  interformer::InterFormerModel model;
  std::optional<interformer::AdamState> optimizer;
};

struct if_classifier {
  interformer::MotionClassifier classifier;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
if_status guarded(Fn&& fn) {
  try {
    fn();
    return IF_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return IF_ERR_INVALID_ARGUMENT;
  } catch (const interformer::IoError& e) {
    set_error(e.what());
    return IF_ERR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return IF_ERR_RUNTIME;
  }
}

nlohmann::json parse_config(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": malformed JSON: " + e.what());
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void require_arg(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

const interformer::InteractionSample& sample_at(const if_dataset* dataset, size_t index) {
  if (index >= dataset->data.samples.size()) {
    throw std::invalid_argument("sample index " + std::to_string(index) +
                                " out of range; dataset has " +
                                std::to_string(dataset->data.samples.size()) + " samples");
  }
  return dataset->data.samples[index];
}

}  // namespace

extern "C" {

const char* if_version(void) { return "interformer 1.0.0"; }

const char* if_last_error(void) { return g_last_error.c_str(); }

void if_string_free(char* text) { delete[] text; }

/* --- datasets ----------------------------------------------------------- */

if_status if_dataset_synthesize(const char* synth_config_json, if_dataset** out) {
  return guarded([&] {
    require_arg(out != nullptr, "if_dataset_synthesize: out is null");
    auto config =
        interformer::synth_config_from_json(parse_config(synth_config_json, "synth config"));
    *out = new if_dataset{interformer::synthesize_dataset(config)};
  });
}

if_status if_dataset_load(const char* path, if_dataset** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "if_dataset_load: null argument");
    *out = new if_dataset{interformer::load_dataset(path)};
  });
}

if_status if_dataset_save(const if_dataset* dataset, const char* path) {
  return guarded([&] {
    require_arg(dataset != nullptr && path != nullptr, "if_dataset_save: null argument");
    interformer::save_dataset(dataset->data, path);
  });
}

size_t if_dataset_size(const if_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->data.samples.size();
}

if_status if_dataset_summary_json(const if_dataset* dataset, char** out_json) {
  return guarded([&] {
    require_arg(dataset != nullptr && out_json != nullptr,
                "if_dataset_summary_json: null argument");
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& sample : dataset->data.samples) {
      const std::string& label = sample.label;
      counts[label] = counts.value(label, 0) + 1;
    }
    nlohmann::json summary{{"samples", dataset->data.samples.size()},
                           {"joint_count", dataset->data.topology.joint_count},
                           {"classes", counts}};
    *out_json = copy_string(summary.dump());
  });
}

void if_dataset_free(if_dataset* dataset) { delete dataset; }

/* --- models -------------------------------------------------------------- */

if_status if_model_create(const char* model_config_json, uint64_t seed, if_model** out) {
  return guarded([&] {
    require_arg(out != nullptr, "if_model_create: out is null");
    auto config =
        interformer::ModelConfig::from_json(parse_config(model_config_json, "model config"));
    *out = new if_model{interformer::InterFormerModel(config, seed), std::nullopt};
  });
}

if_status if_model_load(const char* checkpoint_path, if_model** out) {
  return guarded([&] {
    require_arg(checkpoint_path != nullptr && out != nullptr, "if_model_load: null argument");
    interformer::Checkpoint raw;
    auto model = interformer::InterFormerModel::load(checkpoint_path, &raw);
    std::optional<interformer::AdamState> optimizer;
    auto state = interformer::make_adam_state(model.parameters());
    if (interformer::restore_adam_state(state, raw, model)) optimizer = std::move(state);
    *out = new if_model{std::move(model), std::move(optimizer)};
  });
}

if_status if_model_save(const if_model* model, const char* checkpoint_path) {
  return guarded([&] {
    require_arg(model != nullptr && checkpoint_path != nullptr, "if_model_save: null argument");
    if (model->optimizer) {
      model->model.save(checkpoint_path,
                        interformer::adam_state_entries(*model->optimizer, model->model),
                        {{"step", model->optimizer->step}});
    } else {
      model->model.save(checkpoint_path);
    }
  });
}

if_status if_model_config_json(const if_model* model, char** out_json) {
  return guarded([&] {
    require_arg(model != nullptr && out_json != nullptr, "if_model_config_json: null argument");
    *out_json = copy_string(model->model.config().to_json().dump());
  });
}

void if_model_free(if_model* model) { delete model; }

/* --- training ------------------------------------------------------------ */

if_status if_train(if_model* model, const if_dataset* dataset, const char* train_config_json,
                   const char* log_csv_path) {
  return guarded([&] {
    require_arg(model != nullptr && dataset != nullptr, "if_train: null argument");
    auto config =
        interformer::train_config_from_json(parse_config(train_config_json, "train config"));
    const interformer::AdamState* resume =
        model->optimizer.has_value() ? &*model->optimizer : nullptr;
    auto output = interformer::train_model(model->model, dataset->data, config, resume);
    model->optimizer = std::move(output.adam);
    if (log_csv_path != nullptr && *log_csv_path != '\0') {
      output.log.write_csv(log_csv_path);
    }
  });
}

/* --- generation ----------------------------------------------------------- */

if_status if_generate_to_file(const if_model* model, const if_dataset* dataset,
                              size_t sample_index, const char* gen_config_json,
                              int use_long_windows, const char* out_json_path,
                              const char* out_csv_path) {
  return guarded([&] {
    require_arg(model != nullptr && dataset != nullptr && out_json_path != nullptr,
                "if_generate_to_file: null argument");
    auto config = interformer::gen_config_from_json(parse_config(gen_config_json, "gen config"));
    const auto& sample = sample_at(dataset, sample_index);
    const auto masks = interformer::build_adjacency_masks(
        dataset->data.topology, model->model.config().adjacency_hops);
    interformer::MotionSequence reaction =
        use_long_windows != 0
            ? interformer::generate_long(model->model, sample.action,
                                         sample.reaction.frames[0], config, masks)
            : interformer::generate(model->model, sample.action, sample.reaction.frames[0],
                                    config, masks);
    reaction.label = sample.label;
    interformer::save_sequence(reaction, dataset->data.topology, out_json_path);
    if (out_csv_path != nullptr && *out_csv_path != '\0') {
      interformer::save_sequence_csv(reaction, out_csv_path);
    }
  });
}

if_status if_generate_diverse_to_files(const if_model* model, const if_dataset* dataset,
                                       size_t sample_index, const char* gen_config_json,
                                       size_t n_samples, const char* out_prefix) {
  return guarded([&] {
    require_arg(model != nullptr && dataset != nullptr && out_prefix != nullptr,
                "if_generate_diverse_to_files: null argument");
    auto config = interformer::gen_config_from_json(parse_config(gen_config_json, "gen config"));
    const auto& sample = sample_at(dataset, sample_index);
    const auto masks = interformer::build_adjacency_masks(
        dataset->data.topology, model->model.config().adjacency_hops);
    auto sequences = interformer::generate_diverse(
        model->model, sample.action, sample.reaction.frames[0], config, masks, n_samples);
    for (size_t i = 0; i < sequences.size(); ++i) {
      sequences[i].label = sample.label;
      interformer::save_sequence(sequences[i], dataset->data.topology,
                                 std::string(out_prefix) + std::to_string(i) + ".json");
    }
  });
}

/* --- classifier + evaluation ---------------------------------------------- */

if_status if_classifier_train(const if_dataset* dataset, const char* config_json,
                              if_classifier** out, double* holdout_accuracy_out) {
  return guarded([&] {
    require_arg(dataset != nullptr && out != nullptr, "if_classifier_train: null argument");
    auto config =
        interformer::classifier_config_from_json(parse_config(config_json, "classifier config"));
    auto result = interformer::train_classifier(dataset->data, config);
    if (holdout_accuracy_out != nullptr) *holdout_accuracy_out = result.holdout_accuracy;
    *out = new if_classifier{std::move(result.classifier)};
  });
}

if_status if_classifier_save(const if_classifier* classifier, const char* path) {
  return guarded([&] {
    require_arg(classifier != nullptr && path != nullptr, "if_classifier_save: null argument");
    classifier->classifier.save(path);
  });
}

if_status if_classifier_load(const char* path, if_classifier** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "if_classifier_load: null argument");
    *out = new if_classifier{interformer::MotionClassifier::load(path)};
  });
}

void if_classifier_free(if_classifier* classifier) { delete classifier; }

if_status if_evaluate(const if_model* model, const if_classifier* classifier,
                      const if_dataset* test_set, const char* eval_config_json,
                      char** report_json_out, char** report_table_out) {
  return guarded([&] {
    require_arg(model != nullptr && classifier != nullptr && test_set != nullptr,
                "if_evaluate: null argument");
    auto config =
        interformer::eval_config_from_json(parse_config(eval_config_json, "eval config"));
    auto summary =
        interformer::evaluate(model->model, test_set->data, classifier->classifier, config);
    if (report_json_out != nullptr) *report_json_out = copy_string(summary.to_json().dump(2));
    if (report_table_out != nullptr) *report_table_out = copy_string(summary.to_table());
  });
}

}  // extern "C"
