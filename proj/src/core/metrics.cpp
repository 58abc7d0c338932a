#include "core/metrics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace interformer {

std::vector<std::vector<double>> extract_features(const MotionClassifier& classifier,
                                                  const std::vector<const MotionSequence*>& seqs) {
  if (seqs.empty()) throw std::invalid_argument("extract_features: empty input");
  std::vector<std::vector<double>> out;
  out.reserve(seqs.size());
  for (const MotionSequence* seq : seqs) out.push_back(classifier.features(*seq));
  return out;
}

namespace {

constexpr double kEigenFloor = 1e-10;

Eigen::MatrixXd covariance(const std::vector<std::vector<double>>& rows,
                           Eigen::VectorXd& mean_out) {
  const auto b = static_cast<Eigen::Index>(rows.size());
  const auto h = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(b, h);
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < h; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  mean_out = m.colwise().mean();
  Eigen::MatrixXd centered = m.rowwise() - mean_out.transpose();
  return centered.transpose() * centered / static_cast<double>(b - 1);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  Eigen::VectorXd values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values(i) = values(i) < kEigenFloor ? 0.0 : std::sqrt(values(i));
  }
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

double fvd(const std::vector<std::vector<double>>& features_a,
           const std::vector<std::vector<double>>& features_b) {
  if (features_a.size() < 2 || features_b.size() < 2) {
    throw std::invalid_argument("fvd: each feature set needs at least two rows");
  }
  if (features_a[0].size() != features_b[0].size()) {
    throw std::invalid_argument("fvd: feature dimensions disagree");
  }
  Eigen::VectorXd mean_a, mean_b;
  Eigen::MatrixXd cov_a = covariance(features_a, mean_a);
  Eigen::MatrixXd cov_b = covariance(features_b, mean_b);

  Eigen::MatrixXd root_a = psd_sqrt(cov_a);
  Eigen::MatrixXd inner = root_a * cov_b * root_a;
  inner = 0.5 * (inner + inner.transpose());  // guard symmetry against rounding
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inner);
  double trace_sqrt = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double value = solver.eigenvalues()(i);
    if (value > kEigenFloor) trace_sqrt += std::sqrt(value);
  }
  const double mean_term = (mean_a - mean_b).squaredNorm();
  return mean_term + cov_a.trace() + cov_b.trace() - 2.0 * trace_sqrt;
}

double diversity(const std::vector<std::vector<double>>& features) {
  const std::size_t b = features.size();
  if (b < 2) throw std::invalid_argument("diversity: at least two feature rows required");
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      double acc = 0.0;
      for (std::size_t h = 0; h < features[i].size(); ++h) {
        const double diff = features[i][h] - features[j][h];
        acc += diff * diff;
      }
      total += std::sqrt(acc);
    }
  }
  return total / (static_cast<double>(b) * static_cast<double>(b - 1));
}

double diversity_score(double div_gt, double div_gen) {
  if (div_gt <= 0.0) {
    throw std::invalid_argument("diversity_score: ground-truth diversity must be positive");
  }
  return 100.0 * std::abs(div_gt - div_gen) / div_gt;
}

nlohmann::json EvalReport::to_json() const {
  return nlohmann::json{{"per_class_accuracy", per_class_accuracy},
                        {"average_accuracy", average_accuracy},
                        {"fvd", fvd},
                        {"diversity", diversity},
                        {"diversity_score", diversity_score}};
}

nlohmann::json EvalSummary::to_json() const {
  return nlohmann::json{{"ground_truth", ground_truth.to_json()},
                        {"model", model.to_json()},
                        {"zero_velocity", zero_velocity.to_json()},
                        {"samples", samples},
                        {"length_matches", length_matches},
                        {"eos_stops", eos_stops}};
}

std::string EvalSummary::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  std::vector<std::string> class_names;
  for (const auto& [name, acc] : ground_truth.per_class_accuracy) class_names.push_back(name);

  os << "classification accuracy (%)\n";
  os << std::setw(14) << std::left << "method";
  for (const auto& name : class_names) os << std::setw(10) << std::right << name;
  os << std::setw(10) << std::right << "average" << '\n';
  auto acc_row = [&](const char* label, const EvalReport& report) {
    os << std::setw(14) << std::left << label;
    for (const auto& name : class_names) {
      os << std::setw(10) << std::right << report.per_class_accuracy.at(name);
    }
    os << std::setw(10) << std::right << report.average_accuracy << '\n';
  };
  acc_row("gt", ground_truth);
  acc_row("zerov", zero_velocity);
  acc_row("interformer", model);

  os << '\n' << std::setprecision(4);
  os << "distribution metrics\n";
  os << std::setw(14) << std::left << "method" << std::setw(12) << std::right << "fvd"
     << std::setw(12) << "diversity" << std::setw(12) << "score" << '\n';
  auto div_row = [&](const char* label, const EvalReport& report) {
    os << std::setw(14) << std::left << label << std::setw(12) << std::right << report.fvd
       << std::setw(12) << report.diversity << std::setw(12) << report.diversity_score << '\n';
  };
  div_row("gt", ground_truth);
  div_row("zerov", zero_velocity);
  div_row("interformer", model);
  return os.str();
}

EvalSummary evaluate(const InterFormerModel& model, const Dataset& test_set,
                     const MotionClassifier& classifier, const EvalConfig& config) {
  if (test_set.samples.empty()) throw std::invalid_argument("evaluate: empty test set");
  const AdjacencyMasks masks =
      build_adjacency_masks(test_set.topology, model.config().adjacency_hops);

  EvalSummary summary;
  summary.samples = test_set.samples.size();

  std::vector<MotionSequence> generated, frozen;
  std::vector<std::string> labels;
  generated.reserve(test_set.samples.size());
  for (const auto& sample : test_set.samples) {
    GenStats stats;
    generated.push_back(generate(model, sample.action, sample.reaction.frames[0], config.gen,
                                 masks, &stats));
    frozen.push_back(
        zero_velocity_baseline(sample.reaction.frames[0], sample.action.length(),
                               sample.action.frame_rate));
    labels.push_back(sample.label);
    if (stats.stopped_by_eos) ++summary.eos_stops;
    const auto difference =
        static_cast<long>(generated.back().length()) - static_cast<long>(sample.action.length());
    if (std::abs(difference) <= config.length_tolerance) ++summary.length_matches;
  }

  auto report_for = [&](const std::vector<const MotionSequence*>& seqs,
                        const std::vector<const MotionSequence*>& gt) {
    EvalReport report;
    std::map<std::string, std::size_t> class_total, class_correct;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      ++class_total[labels[i]];
      if (classifier.classify_name(*seqs[i]) == labels[i]) ++class_correct[labels[i]];
    }
    double correct_sum = 0.0;
    for (const auto& [name, total] : class_total) {
      const double acc =
          100.0 * static_cast<double>(class_correct[name]) / static_cast<double>(total);
      report.per_class_accuracy[name] = acc;
      correct_sum += static_cast<double>(class_correct[name]);
    }
    report.average_accuracy = 100.0 * correct_sum / static_cast<double>(seqs.size());

    auto features = extract_features(classifier, seqs);
    auto gt_features = extract_features(classifier, gt);
    report.fvd = fvd(gt_features, features);
    report.diversity = diversity(features);
    report.diversity_score = diversity_score(diversity(gt_features), report.diversity);
    return report;
  };

  std::vector<const MotionSequence*> gt_seqs, gen_seqs, zv_seqs;
  for (std::size_t i = 0; i < test_set.samples.size(); ++i) {
    gt_seqs.push_back(&test_set.samples[i].reaction);
    gen_seqs.push_back(&generated[i]);
    zv_seqs.push_back(&frozen[i]);
  }
  summary.ground_truth = report_for(gt_seqs, gt_seqs);
  summary.model = report_for(gen_seqs, gt_seqs);
  summary.zero_velocity = report_for(zv_seqs, gt_seqs);
  return summary;
}

}  // namespace interformer
