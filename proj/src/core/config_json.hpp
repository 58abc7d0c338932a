#pragma once

#include <json.hpp>

#include "core/classifier.hpp"
#include "core/generation.hpp"
#include "core/metrics.hpp"
#include "core/synth.hpp"
#include "core/training.hpp"

namespace interformer {

// Strict JSON config parsers: every field optional with its struct default,
// unknown keys rejected.
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json synth_config_to_json(const SynthConfig& config);

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

GenConfig gen_config_from_json(const nlohmann::json& j);
nlohmann::json gen_config_to_json(const GenConfig& config);

ClassifierConfig classifier_config_from_json(const nlohmann::json& j);
nlohmann::json classifier_config_to_json(const ClassifierConfig& config);

EvalConfig eval_config_from_json(const nlohmann::json& j);
nlohmann::json eval_config_to_json(const EvalConfig& config);

}  // namespace interformer
