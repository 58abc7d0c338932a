#include "core/config_json.hpp"

#include <stdexcept>

namespace interformer {

namespace {

using nlohmann::json;

[[noreturn]] void unknown_key(const char* what, const std::string& key) {
  throw std::invalid_argument(std::string(what) + " config: unknown key '" + key + "'");
}

}  // namespace

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "classes") {
      c.classes = value.get<std::vector<std::string>>();
    } else if (key == "samples_per_class") {
      c.samples_per_class = value.get<std::size_t>();
    } else if (key == "joint_count") {
      c.joint_count = value.get<std::size_t>();
    } else if (key == "t_min") {
      c.t_min = value.get<std::size_t>();
    } else if (key == "t_max") {
      c.t_max = value.get<std::size_t>();
    } else if (key == "noise_sd") {
      c.noise_sd = value.get<double>();
    } else if (key == "frame_rate") {
      c.frame_rate = value.get<double>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else {
      unknown_key("synth", key);
    }
  }
  return c;
}

json synth_config_to_json(const SynthConfig& c) {
  return json{{"classes", c.classes},
              {"samples_per_class", c.samples_per_class},
              {"joint_count", c.joint_count},
              {"t_min", c.t_min},
              {"t_max", c.t_max},
              {"noise_sd", c.noise_sd},
              {"frame_rate", c.frame_rate},
              {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "batch_size") {
      c.batch_size = value.get<std::size_t>();
    } else if (key == "steps") {
      c.steps = value.get<std::size_t>();
    } else if (key == "alpha") {
      c.adam.alpha = value.get<double>();
    } else if (key == "beta1") {
      c.adam.beta1 = value.get<double>();
    } else if (key == "beta2") {
      c.adam.beta2 = value.get<double>();
    } else if (key == "epsilon") {
      c.adam.epsilon = value.get<double>();
    } else if (key == "lambda_ff") {
      c.lambda_ff = value.get<double>();
    } else if (key == "input_noise_sd") {
      c.input_noise_sd = value.get<double>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = value.get<std::size_t>();
    } else if (key == "checkpoint_path") {
      c.checkpoint_path = value.get<std::string>();
    } else {
      unknown_key("train", key);
    }
  }
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  return json{{"batch_size", c.batch_size},
              {"steps", c.steps},
              {"alpha", c.adam.alpha},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"epsilon", c.adam.epsilon},
              {"lambda_ff", c.lambda_ff},
              {"input_noise_sd", c.input_noise_sd},
              {"seed", c.seed},
              {"checkpoint_every", c.checkpoint_every},
              {"checkpoint_path", c.checkpoint_path}};
}

GenConfig gen_config_from_json(const json& j) {
  GenConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "max_len") {
      c.max_len = value.get<std::size_t>();
    } else if (key == "eos_threshold") {
      c.eos_threshold = value.get<double>();
    } else if (key == "noise_sd") {
      c.noise_sd = value.get<double>();
    } else if (key == "chunk_len") {
      c.chunk_len = value.get<std::size_t>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else {
      unknown_key("gen", key);
    }
  }
  return c;
}

json gen_config_to_json(const GenConfig& c) {
  return json{{"max_len", c.max_len},
              {"eos_threshold", c.eos_threshold},
              {"noise_sd", c.noise_sd},
              {"chunk_len", c.chunk_len},
              {"seed", c.seed}};
}

ClassifierConfig classifier_config_from_json(const json& j) {
  ClassifierConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "hidden") {
      c.hidden = value.get<std::size_t>();
    } else if (key == "layers") {
      c.layers = value.get<std::size_t>();
    } else if (key == "steps") {
      c.steps = value.get<std::size_t>();
    } else if (key == "batch_size") {
      c.batch_size = value.get<std::size_t>();
    } else if (key == "alpha") {
      c.adam.alpha = value.get<double>();
    } else if (key == "holdout_fraction") {
      c.holdout_fraction = value.get<double>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else {
      unknown_key("classifier", key);
    }
  }
  return c;
}

json classifier_config_to_json(const ClassifierConfig& c) {
  return json{{"hidden", c.hidden},
              {"layers", c.layers},
              {"steps", c.steps},
              {"batch_size", c.batch_size},
              {"alpha", c.adam.alpha},
              {"holdout_fraction", c.holdout_fraction},
              {"seed", c.seed}};
}

EvalConfig eval_config_from_json(const json& j) {
  EvalConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "length_tolerance") {
      c.length_tolerance = value.get<int>();
    } else if (key == "gen") {
      c.gen = gen_config_from_json(value);
    } else {
      unknown_key("eval", key);
    }
  }
  return c;
}

json eval_config_to_json(const EvalConfig& c) {
  return json{{"length_tolerance", c.length_tolerance}, {"gen", gen_config_to_json(c.gen)}};
}

}  // namespace interformer
