#include "core/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "core/checkpoint.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"

namespace interformer {

namespace {

Tensor init_weight(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<double> data(rows * cols);
  for (auto& v : data) v = rng.uniform(-bound, bound);
  return Tensor::from_data({rows, cols}, std::move(data), true);
}

Tensor zeros_param(std::size_t rows, std::size_t cols) {
  return Tensor::from_data({rows, cols}, std::vector<double>(rows * cols, 0.0), true);
}

}  // namespace

MotionClassifier::MotionClassifier(std::size_t input_size, std::vector<std::string> classes,
                                   const ClassifierConfig& config, std::uint64_t seed)
    : input_size_(input_size), classes_(std::move(classes)), config_(config) {
  if (classes_.size() < 2) {
    throw std::invalid_argument("classifier: at least two classes required");
  }
  if (config_.layers < 1 || config_.hidden < 1) {
    throw std::invalid_argument("classifier: hidden size and layer count must be positive");
  }
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t h = config_.hidden;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::size_t in = l == 0 ? input_size_ : h;
    GruLayer layer;
    layer.w_update = init_weight(h, in, rng);
    layer.u_update = init_weight(h, h, rng);
    layer.b_update = zeros_param(h, 1);
    layer.w_reset = init_weight(h, in, rng);
    layer.u_reset = init_weight(h, h, rng);
    layer.b_reset = zeros_param(h, 1);
    layer.w_cand = init_weight(h, in, rng);
    layer.u_cand = init_weight(h, h, rng);
    layer.b_cand = zeros_param(h, 1);
    layers_.push_back(std::move(layer));
  }
  head_w = init_weight(classes_.size(), h, rng);
  head_b = zeros_param(classes_.size(), 1);
}

Tensor MotionClassifier::run_layers(const MotionSequence& seq) const {
  if (seq.length() < 1) throw std::invalid_argument("classifier: empty sequence");
  if (3 * seq.joint_count() != input_size_) {
    throw std::invalid_argument("classifier: sequence feature size does not match");
  }
  const std::size_t h = config_.hidden;
  const Tensor ones = Tensor::from_data({h, 1}, std::vector<double>(h, 1.0));
  std::vector<Tensor> hidden(layers_.size(), Tensor::zeros({h, 1}));

  for (const auto& frame : seq.frames) {
    Tensor x = Tensor::from_data({input_size_, 1}, frame.coords);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const GruLayer& cell = layers_[l];
      Tensor update =
          sigmoid(add(add(matmul(cell.w_update, x), matmul(cell.u_update, hidden[l])),
                      cell.b_update));
      Tensor reset = sigmoid(
          add(add(matmul(cell.w_reset, x), matmul(cell.u_reset, hidden[l])), cell.b_reset));
      Tensor candidate = interformer::tanh(
          add(add(matmul(cell.w_cand, x), matmul(cell.u_cand, mul(reset, hidden[l]))),
              cell.b_cand));
      hidden[l] = add(mul(sub(ones, update), hidden[l]), mul(update, candidate));
      x = hidden[l];
    }
  }
  return hidden.back();
}

Tensor MotionClassifier::feature_tensor(const MotionSequence& seq) const {
  return run_layers(seq);
}

std::vector<double> MotionClassifier::features(const MotionSequence& seq) const {
  return run_layers(seq).data();
}

Tensor MotionClassifier::logits(const MotionSequence& seq) const {
  return add(matmul(head_w, run_layers(seq)), head_b);
}

std::size_t MotionClassifier::classify(const MotionSequence& seq) const {
  const auto scores = logits(seq).data();
  return static_cast<std::size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
}

const std::string& MotionClassifier::classify_name(const MotionSequence& seq) const {
  return classes_[classify(seq)];
}

std::vector<std::pair<std::string, Tensor>> MotionClassifier::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::string p = "gru." + std::to_string(l);
    out.emplace_back(p + ".wz", layers_[l].w_update);
    out.emplace_back(p + ".uz", layers_[l].u_update);
    out.emplace_back(p + ".bz", layers_[l].b_update);
    out.emplace_back(p + ".wr", layers_[l].w_reset);
    out.emplace_back(p + ".ur", layers_[l].u_reset);
    out.emplace_back(p + ".br", layers_[l].b_reset);
    out.emplace_back(p + ".wh", layers_[l].w_cand);
    out.emplace_back(p + ".uh", layers_[l].u_cand);
    out.emplace_back(p + ".bh", layers_[l].b_cand);
  }
  out.emplace_back("head.w", head_w);
  out.emplace_back("head.b", head_b);
  return out;
}

std::vector<Tensor> MotionClassifier::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, tensor] : named_parameters()) out.push_back(tensor);
  return out;
}

void MotionClassifier::zero_grad() const {
  for (auto& [name, tensor] : named_parameters()) {
    Tensor t = tensor;
    t.zero_grad();
  }
}

void MotionClassifier::save(const std::string& path) const {
  std::vector<CheckpointEntry> entries;
  for (const auto& [name, tensor] : named_parameters()) {
    entries.push_back({name, tensor.shape(), tensor.data()});
  }
  nlohmann::json meta;
  meta["kind"] = "motion_classifier";
  meta["input_size"] = input_size_;
  meta["classes"] = classes_;
  meta["hidden"] = config_.hidden;
  meta["layers"] = config_.layers;
  write_checkpoint(path, entries, meta);
}

MotionClassifier MotionClassifier::load(const std::string& path) {
  Checkpoint ckpt = read_checkpoint(path);
  if (ckpt.meta.value("kind", "") != "motion_classifier") {
    throw std::runtime_error("classifier load: '" + path + "' is not a classifier checkpoint");
  }
  ClassifierConfig config;
  config.hidden = ckpt.meta.at("hidden").get<std::size_t>();
  config.layers = ckpt.meta.at("layers").get<std::size_t>();
  MotionClassifier classifier(ckpt.meta.at("input_size").get<std::size_t>(),
                              ckpt.meta.at("classes").get<std::vector<std::string>>(), config, 0);
  for (auto& [name, tensor] : classifier.named_parameters()) {
    const CheckpointEntry* entry = ckpt.find(name);
    if (!entry || entry->shape != tensor.shape()) {
      throw std::runtime_error("classifier load: bad entry for '" + name + "'");
    }
    Tensor t = tensor;
    t.mutable_data() = entry->values;
  }
  return classifier;
}

ClassifierTrainResult train_classifier(const Dataset& dataset, const ClassifierConfig& config) {
  if (dataset.samples.empty()) throw std::invalid_argument("train_classifier: empty dataset");
  std::set<std::string> label_set;
  for (const auto& sample : dataset.samples) label_set.insert(sample.label);
  if (label_set.size() < 2) {
    throw std::invalid_argument("train_classifier: need at least two classes, got " +
                                std::to_string(label_set.size()));
  }
  std::vector<std::string> classes(label_set.begin(), label_set.end());
  std::map<std::string, std::size_t> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i) class_index[classes[i]] = i;

  const std::size_t input_size = 3 * dataset.topology.joint_count;
  ClassifierTrainResult result{MotionClassifier(input_size, classes, config, config.seed), 0.0};
  MotionClassifier& classifier = result.classifier;

  // Seeded holdout split.
  std::vector<std::size_t> order(dataset.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng = Rng(config.seed).derive(0x401d0u);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(
        split_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  const auto holdout_count = static_cast<std::size_t>(
      std::floor(config.holdout_fraction * static_cast<double>(order.size())));
  std::vector<std::size_t> holdout(order.begin(),
                                   order.begin() + static_cast<std::ptrdiff_t>(holdout_count));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(holdout_count),
                                 order.end());
  if (train.empty()) throw std::invalid_argument("train_classifier: holdout leaves no data");

  auto params = classifier.parameters();
  AdamState adam = make_adam_state(params, config.adam);

  const std::size_t batches_per_epoch =
      (train.size() + config.batch_size - 1) / config.batch_size;
  std::vector<std::size_t> epoch_order = train;
  std::uint64_t cached_epoch = static_cast<std::uint64_t>(-1);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const std::uint64_t epoch = step / batches_per_epoch;
    if (epoch != cached_epoch) {
      Rng rng = Rng(config.seed).derive(0xe90c4 + epoch);
      epoch_order = train;
      for (std::size_t i = epoch_order.size(); i > 1; --i) {
        const auto j =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(epoch_order[i - 1], epoch_order[j]);
      }
      cached_epoch = epoch;
    }
    const std::size_t batch_start = (step % batches_per_epoch) * config.batch_size;
    const std::size_t batch_end = std::min(batch_start + config.batch_size, epoch_order.size());

    classifier.zero_grad();
    Tensor total;
    for (std::size_t b = batch_start; b < batch_end; ++b) {
      const auto& sample = dataset.samples[epoch_order[b]];
      Tensor log_probs = log_softmax(classifier.logits(sample.reaction), 0);
      std::vector<double> one_hot(classes.size(), 0.0);
      one_hot[class_index.at(sample.label)] = 1.0;
      Tensor nll = scale(sum(mul_constant(log_probs, one_hot)), -1.0);
      total = total.defined() ? add(total, nll) : nll;
    }
    total = scale(total, 1.0 / static_cast<double>(batch_end - batch_start));
    if (!std::isfinite(total.value())) {
      throw std::runtime_error("train_classifier: non-finite loss at step " +
                               std::to_string(step + 1));
    }
    total.backward();
    adam_step(params, adam);
  }

  if (!holdout.empty()) {
    std::size_t correct = 0;
    for (const std::size_t i : holdout) {
      const auto& sample = dataset.samples[i];
      if (classifier.classify_name(sample.reaction) == sample.label) ++correct;
    }
    result.holdout_accuracy =
        100.0 * static_cast<double>(correct) / static_cast<double>(holdout.size());
  }
  return result;
}

double classification_accuracy(const MotionClassifier& classifier,
                               const std::vector<const MotionSequence*>& sequences,
                               const std::vector<std::string>& labels) {
  if (sequences.empty()) throw std::invalid_argument("classification_accuracy: empty input");
  if (sequences.size() != labels.size()) {
    throw std::invalid_argument("classification_accuracy: label count mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (classifier.classify_name(*sequences[i]) == labels[i]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(sequences.size());
}

}  // namespace interformer
