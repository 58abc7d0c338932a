#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "core/training.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace interformer;

namespace {

ModelConfig tiny_config() {
  ModelConfig config;
  config.joint_count = 5;
  config.n_layers = 1;
  config.temporal_heads = 3;
  config.ffn_hidden = 8;
  return config;
}

Dataset tiny_dataset(std::size_t per_class, std::size_t t_len, std::uint64_t seed) {
  SynthConfig sc;
  sc.classes = {"push", "still"};
  sc.samples_per_class = per_class;
  sc.joint_count = 5;
  sc.t_min = t_len;
  sc.t_max = t_len;
  sc.seed = seed;
  return synthesize_dataset(sc);
}

}  // namespace

TEST_CASE("sequence loss basics and oracle agreement") {
  Tensor x = Tensor::from_data({3, 2}, {1, 2, 3, 4, 5, 6});
  CHECK(sequence_loss(x, x).value() == 0.0);

  // one joint, one frame, offset (1, 0, 0)
  Tensor a = Tensor::from_data({3, 1}, {1, 0, 0});
  Tensor b = Tensor::from_data({3, 1}, {0, 0, 0});
  CHECK(sequence_loss(a, b).value() == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(3);
  const std::size_t d = 9, t_len = 4;
  Tensor g = testsupport::random_tensor({d, t_len}, rng, false);
  Tensor t = testsupport::random_tensor({d, t_len}, rng, false);
  const double want = testsupport::oracle_sequence_loss(g.data(), t.data(), d, t_len);
  CHECK(sequence_loss(g, t).value() == doctest::Approx(want).epsilon(1e-12));

  Tensor wrong = Tensor::zeros({3, 3});
  CHECK_THROWS_AS(sequence_loss(x, wrong), std::invalid_argument);
}

TEST_CASE("first-frame loss basics and oracle agreement") {
  Rng rng(5);
  Tensor y = testsupport::random_tensor({6, 4}, rng, false);
  CHECK(first_frame_loss(y, y).value() == 0.0);

  // constant translation of every generated frame leaves the deltas alone
  std::vector<double> shifted = y.data();
  for (std::size_t f = 0; f < 6; ++f) {
    for (std::size_t t = 0; t < 4; ++t) shifted[f * 4 + t] += 0.7;
  }
  CHECK(first_frame_loss(Tensor::from_data({6, 4}, shifted), y).value() ==
        doctest::Approx(0.0).epsilon(1e-12));

  // single joint: real delta (1,0,0), generated delta zero
  Tensor real = Tensor::from_data({3, 2}, {0, 1, 0, 0, 0, 0});
  Tensor gen = Tensor::from_data({3, 2}, {0, 0, 0, 0, 0, 0});
  CHECK(first_frame_loss(gen, real).value() == doctest::Approx(1.0).epsilon(1e-15));

  Tensor g2 = testsupport::random_tensor({6, 4}, rng, false);
  const double want = testsupport::oracle_first_frame_loss(g2.data(), y.data(), 6, 4);
  CHECK(first_frame_loss(g2, y).value() == doctest::Approx(want).epsilon(1e-12));

  Tensor single = Tensor::zeros({6, 1});
  CHECK_THROWS_AS(first_frame_loss(single, single), std::invalid_argument);
}

TEST_CASE("one training step keeps shapes and a finite loss") {
  InterFormerModel model(tiny_config(), 3);
  Dataset ds = tiny_dataset(2, 6, 7);
  TrainConfig config;
  config.steps = 1;
  config.batch_size = 4;
  auto before = model.named_parameters();
  std::vector<std::vector<std::size_t>> shapes;
  for (auto& [n, t] : before) shapes.push_back(t.shape());

  auto out = train_model(model, ds, config);
  REQUIRE(out.log.entries.size() == 1);
  CHECK(std::isfinite(out.log.entries[0].total));
  CHECK(out.log.entries[0].step == 1);
  auto after = model.named_parameters();
  for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i].second.shape() == shapes[i]);
}

TEST_CASE("training is bit-deterministic in the seed") {
  Dataset ds = tiny_dataset(3, 5, 11);
  TrainConfig config;
  config.steps = 8;
  config.batch_size = 2;
  config.seed = 42;

  InterFormerModel a(tiny_config(), 5);
  InterFormerModel b(tiny_config(), 5);
  auto log_a = train_model(a, ds, config);
  auto log_b = train_model(b, ds, config);

  auto pa = a.named_parameters();
  auto pb = b.named_parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].second.data() == pb[i].second.data());
  }
  for (std::size_t s = 0; s < log_a.log.entries.size(); ++s) {
    CHECK(log_a.log.entries[s].total == log_b.log.entries[s].total);
  }
}

TEST_CASE("training loss decreases on a tiny dataset") {
  InterFormerModel model(tiny_config(), 9);
  Dataset ds = tiny_dataset(1, 6, 13);
  TrainConfig config;
  config.steps = 150;
  config.batch_size = 2;
  config.adam.alpha = 1e-3;
  auto out = train_model(model, ds, config);
  CHECK(out.log.entries.back().total < 0.5 * out.log.entries.front().total);
}

TEST_CASE("training aborts on a diverging run with the step index") {
  InterFormerModel model(tiny_config(), 15);
  Dataset ds = tiny_dataset(1, 5, 17);
  TrainConfig config;
  config.steps = 5;
  config.batch_size = 2;
  config.adam.alpha = 1e200;  // first update sends the squared loss to overflow
  CHECK_THROWS_WITH_AS(train_model(model, ds, config), doctest::Contains("step"),
                       std::runtime_error);
}

TEST_CASE("resumed training replays the uninterrupted run bit-exactly") {
  Dataset ds = tiny_dataset(2, 5, 19);
  const std::string path = "resume_test.ckpt";

  TrainConfig first_half;
  first_half.steps = 12;
  first_half.batch_size = 2;
  first_half.seed = 7;
  first_half.adam.alpha = 1e-3;
  first_half.checkpoint_path = path;

  InterFormerModel split_run(tiny_config(), 21);
  train_model(split_run, ds, first_half);

  Checkpoint raw;
  InterFormerModel resumed = InterFormerModel::load(path, &raw);
  auto adam = make_adam_state(resumed.parameters(), first_half.adam);
  REQUIRE(restore_adam_state(adam, raw, resumed));
  CHECK(adam.step == 12);

  TrainConfig full = first_half;
  full.steps = 24;
  full.checkpoint_path.clear();
  train_model(resumed, ds, full, &adam);

  InterFormerModel straight(tiny_config(), 21);
  train_model(straight, ds, full);

  auto pa = resumed.named_parameters();
  auto pb = straight.named_parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].second.data() == pb[i].second.data());
  }
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("train log CSV has monotone steps") {
  InterFormerModel model(tiny_config(), 23);
  Dataset ds = tiny_dataset(2, 4, 23);
  TrainConfig config;
  config.steps = 5;
  config.batch_size = 8;
  auto out = train_model(model, ds, config);
  const std::string path = "trainlog_test.csv";
  out.log.write_csv(path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,sequence_loss,first_frame_loss,total_loss,seconds");
  std::size_t previous = 0, rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t step = std::stoul(line.substr(0, line.find(',')));
    CHECK(step > previous);
    previous = step;
    ++rows;
  }
  CHECK(rows == 5);
  std::remove(path.c_str());
}

TEST_CASE("training with the first-frame loss disabled is supported") {
  InterFormerModel model(tiny_config(), 25);
  Dataset ds = tiny_dataset(1, 4, 29);
  TrainConfig config;
  config.steps = 3;
  config.batch_size = 2;
  config.lambda_ff = 0.0;
  auto out = train_model(model, ds, config);
  for (const auto& e : out.log.entries) {
    CHECK(e.total == doctest::Approx(e.sequence_loss).epsilon(1e-12));
  }
}

TEST_CASE("empty datasets and mismatched topologies are rejected") {
  InterFormerModel model(tiny_config(), 27);
  Dataset empty;
  empty.topology = make_synth_topology(5);
  TrainConfig config;
  CHECK_THROWS_AS(train_model(model, empty, config), std::invalid_argument);

  SynthConfig sc;
  sc.joint_count = 6;
  sc.samples_per_class = 1;
  sc.classes = {"still"};
  Dataset wrong = synthesize_dataset(sc);
  CHECK_THROWS_AS(train_model(model, wrong, config), std::invalid_argument);
}
