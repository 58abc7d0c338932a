#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/adam.hpp"
#include "core/dataset_io.hpp"
#include "core/tensor.hpp"

namespace interformer {

struct ClassifierConfig {
  std::size_t hidden = 64;
  std::size_t layers = 2;
  std::size_t steps = 400;
  std::size_t batch_size = 16;
  AdamConfig adam{1e-3, 0.9, 0.98, 1e-9};
  double holdout_fraction = 0.2;
  std::uint64_t seed = 1;
};

// Stacked gated-recurrent classifier over motion sequences. The deep feature
// of a sequence is the top layer's final hidden state.
class MotionClassifier {
 public:
  MotionClassifier(std::size_t input_size, std::vector<std::string> classes,
                   const ClassifierConfig& config, std::uint64_t seed);

  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t input_size() const { return input_size_; }
  std::size_t feature_size() const { return config_.hidden; }

  // Class scores for one sequence (C x 1, on the tape).
  Tensor logits(const MotionSequence& seq) const;
  // Final top-layer hidden state (H x 1, on the tape).
  Tensor feature_tensor(const MotionSequence& seq) const;
  std::vector<double> features(const MotionSequence& seq) const;
  std::size_t classify(const MotionSequence& seq) const;  // class index
  const std::string& classify_name(const MotionSequence& seq) const;

  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::vector<Tensor> parameters() const;
  void zero_grad() const;

  void save(const std::string& path) const;
  static MotionClassifier load(const std::string& path);

 private:
  struct GruLayer {
    Tensor w_update, u_update, b_update;
    Tensor w_reset, u_reset, b_reset;
    Tensor w_cand, u_cand, b_cand;
  };

  Tensor run_layers(const MotionSequence& seq) const;

  std::size_t input_size_;
  std::vector<std::string> classes_;
  ClassifierConfig config_;
  std::vector<GruLayer> layers_;
  Tensor head_w;  // C x H
  Tensor head_b;  // C x 1
};

struct ClassifierTrainResult {
  MotionClassifier classifier;
  double holdout_accuracy = 0.0;  // percent
};

// Trains on the reaction sequences only; a seeded fraction of the samples is
// held out and scored after training. Deterministic in config.seed.
ClassifierTrainResult train_classifier(const Dataset& dataset, const ClassifierConfig& config);

// Percent of sequences classified into their labeled class.
double classification_accuracy(const MotionClassifier& classifier,
                               const std::vector<const MotionSequence*>& sequences,
                               const std::vector<std::string>& labels);

}  // namespace interformer
