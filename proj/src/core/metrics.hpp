#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/classifier.hpp"
#include "core/dataset_io.hpp"
#include "core/generation.hpp"
#include "core/model.hpp"

namespace interformer {

// One row per sequence: the classifier's deep feature of each input.
std::vector<std::vector<double>> extract_features(const MotionClassifier& classifier,
                                                  const std::vector<const MotionSequence*>& seqs);

// Frechet distance between Gaussian fits of two feature sets:
// |mu_a - mu_b|^2 + tr(C_a + C_b - 2 (C_a C_b)^(1/2)), covariance with the
// b - 1 denominator, the matrix square root via symmetric eigendecomposition
// of C_a^(1/2) C_b C_a^(1/2) with eigenvalues below 1e-10 clamped to zero.
double fvd(const std::vector<std::vector<double>>& features_a,
           const std::vector<std::vector<double>>& features_b);

// Mean pairwise feature distance over all ordered pairs, 1/(b(b-1))
// normalizer with the zero diagonal terms included in the sum.
double diversity(const std::vector<std::vector<double>>& features);

// Percent deviation of the generated diversity from the ground truth's.
double diversity_score(double div_gt, double div_gen);

struct EvalReport {
  std::map<std::string, double> per_class_accuracy;  // percent
  double average_accuracy = 0.0;                     // percent
  double fvd = 0.0;
  double diversity = 0.0;
  double diversity_score = 0.0;

  nlohmann::json to_json() const;
};

struct EvalSummary {
  EvalReport ground_truth;
  EvalReport model;
  EvalReport zero_velocity;
  std::size_t samples = 0;
  std::size_t length_matches = 0;    // generated length within +/- 2 of the action
  std::size_t eos_stops = 0;         // generations terminated by the sentinel

  nlohmann::json to_json() const;
  std::string to_table() const;
};

struct EvalConfig {
  GenConfig gen;
  int length_tolerance = 2;
};

// Generates a reaction for every test action (seeded with the ground-truth
// first frame), scores the generated set and the frozen-pose baseline
// against the ground truth.
EvalSummary evaluate(const InterFormerModel& model, const Dataset& test_set,
                     const MotionClassifier& classifier, const EvalConfig& config = {});

}  // namespace interformer
