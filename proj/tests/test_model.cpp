#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "support/gradcheck.hpp"

using namespace interformer;

namespace {

ModelConfig tiny_config(std::size_t k = 5, std::size_t n_layers = 1) {
  ModelConfig config;
  config.joint_count = k;
  config.n_layers = n_layers;
  config.temporal_heads = 3;
  config.spatial_heads = 3;
  config.ffn_hidden = 8;
  return config;
}

InteractionSample tiny_sample(std::size_t k, std::size_t t_len, std::uint64_t seed) {
  SynthConfig sc;
  sc.classes = {"push"};
  sc.samples_per_class = 1;
  sc.joint_count = k;
  sc.t_min = t_len;
  sc.t_max = t_len;
  sc.seed = seed;
  return synthesize_dataset(sc).samples[0];
}

}  // namespace

TEST_CASE("encode produces d x T for any length and is deterministic") {
  auto config = tiny_config();
  InterFormerModel model(config, 7);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  for (std::size_t t_len : {1u, 2u, 5u}) {
    auto sample = tiny_sample(5, std::max<std::size_t>(t_len, 2), 3);
    sample.action.frames.resize(t_len);
    Tensor z1 = model.encode(sample.action, masks);
    CHECK(z1.rows() == config.feature_size());
    CHECK(z1.cols() == t_len);
    Tensor z2 = model.encode(sample.action, masks);
    CHECK(z1.data() == z2.data());
  }
}

TEST_CASE("encode rejects non-finite input and foreign masks") {
  auto config = tiny_config();
  InterFormerModel model(config, 7);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 4, 3);
  sample.action.frames[1].coords[0] = std::nan("");
  CHECK_THROWS_AS(model.encode(sample.action, masks), std::invalid_argument);

  auto sample_ok = tiny_sample(5, 4, 3);
  auto masks6 = build_adjacency_masks(make_synth_topology(6));
  CHECK_THROWS_AS(model.encode(sample_ok.action, masks6), std::invalid_argument);
}

TEST_CASE("temporal-only setup never touches the spatial parameters") {
  auto config = tiny_config().with_ablation_setup(1);
  InterFormerModel model(config, 11);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 4, 5);

  model.zero_grad();
  auto fwd = model.forward_teacher_forced(sample, masks);
  mse_mean(fwd.prediction, fwd.target).backward();

  bool spatial_grads_all_zero = true;
  bool temporal_grads_touched = false;
  for (const auto& [name, tensor] : model.named_parameters()) {
    const bool spatial = name.find("sspat") != std::string::npos ||
                         name.find("ispat") != std::string::npos;
    double magnitude = 0.0;
    for (double g : tensor.grad()) magnitude += std::abs(g);
    if (spatial && magnitude != 0.0) spatial_grads_all_zero = false;
    if (!spatial && magnitude > 0.0) temporal_grads_touched = true;
  }
  CHECK(spatial_grads_all_zero);
  CHECK(temporal_grads_touched);
}

TEST_CASE("decode output shape and strict length check") {
  auto config = tiny_config();
  InterFormerModel model(config, 13);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 6, 7);
  Tensor encoded = model.encode(sample.action, masks);

  MotionSequence partial;
  partial.frames.assign(sample.reaction.frames.begin(), sample.reaction.frames.begin() + 3);
  Tensor out = model.decode(partial, encoded, sample.action, masks);
  CHECK(out.rows() == config.feature_size());
  CHECK(out.cols() == 3);

  MotionSequence too_long;
  too_long.frames = sample.reaction.frames;
  for (int extra = 0; extra < 2; ++extra) {
    too_long.frames.push_back(sample.reaction.frames.back());
  }
  CHECK_THROWS_AS(model.decode(too_long, encoded, sample.action, masks),
                  std::invalid_argument);
}

TEST_CASE("decoder output before frame t ignores changes at frame t") {
  auto config = tiny_config();
  InterFormerModel model(config, 17);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 6, 9);
  Tensor encoded = model.encode(sample.action, masks);

  Tensor base = model.decode(sample.reaction, encoded, sample.action, masks);

  const std::size_t bump_at = 3;
  MotionSequence perturbed = sample.reaction;
  for (auto& c : perturbed.frames[bump_at].coords) c += 0.25;
  Tensor changed = model.decode(perturbed, encoded, sample.action, masks);

  for (std::size_t f = 0; f < base.rows(); ++f) {
    for (std::size_t t = 0; t < bump_at; ++t) {
      CHECK(changed.at(f, t) == doctest::Approx(base.at(f, t)).epsilon(1e-12));
    }
  }
  double moved = 0.0;
  for (std::size_t f = 0; f < base.rows(); ++f) {
    moved += std::abs(changed.at(f, bump_at) - base.at(f, bump_at));
  }
  CHECK(moved > 0.0);
}

TEST_CASE("teacher forcing shapes and a finite positive loss") {
  auto config = tiny_config();
  InterFormerModel model(config, 19);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 5, 11);

  auto fwd = model.forward_teacher_forced(sample, masks);
  CHECK(fwd.prediction.cols() == 6);  // 5 reaction frames plus the sentinel
  CHECK(fwd.target.cols() == 6);
  for (std::size_t f = 0; f < fwd.target.rows(); ++f) {
    CHECK(fwd.target.at(f, 5) == config.eos_sentinel);
  }
  const double loss = mse_mean(fwd.prediction, fwd.target).value();
  CHECK(std::isfinite(loss));
  CHECK(loss > 0.0);
}

TEST_CASE("full tiny model passes a sampled finite-difference gradient check") {
  auto config = tiny_config(5, 1);
  InterFormerModel model(config, 23);
  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 4, 13);

  std::vector<Tensor> leaves = model.parameters();
  Rng rng(31);
  const double err = testsupport::sampled_grad_rel_err(
      leaves,
      [&]() {
        auto fwd = model.forward_teacher_forced(sample, masks);
        return mse_mean(fwd.prediction, fwd.target);
      },
      2, rng);
  CHECK(err < 1e-3);
}

TEST_CASE("parameter inventory is a pure function of the config") {
  auto config = tiny_config(6, 2);
  InterFormerModel a(config, 1);
  InterFormerModel b(config, 2);
  auto pa = a.named_parameters();
  auto pb = b.named_parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].first == pb[i].first);
    CHECK(pa[i].second.shape() == pb[i].second.shape());
  }

  auto s1 = config.with_ablation_setup(1);
  InterFormerModel c(s1, 3);
  CHECK(c.named_parameters().size() == pa.size());
}

TEST_CASE("model checkpoint round-trips bit-exactly with its config sidecar") {
  auto config = tiny_config(5, 2);
  config.use_distance = false;
  InterFormerModel model(config, 29);
  const std::string path = "model_roundtrip_test.ckpt";
  model.save(path);
  InterFormerModel loaded = InterFormerModel::load(path);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());

  CHECK(loaded.config().use_distance == false);
  CHECK(loaded.config().joint_count == 5);
  auto pa = model.named_parameters();
  auto pb = loaded.named_parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].second.data() == pb[i].second.data());
  }

  auto masks = build_adjacency_masks(make_synth_topology(5), config.adjacency_hops);
  auto sample = tiny_sample(5, 4, 17);
  Tensor za = model.encode(sample.action, masks);
  Tensor zb = loaded.encode(sample.action, masks);
  CHECK(za.data() == zb.data());
}

TEST_CASE("config validation catches inconsistent setups") {
  auto config = tiny_config();
  config.temporal_heads = 4;  // does not divide 15
  CHECK_THROWS_AS(InterFormerModel(config, 1), std::invalid_argument);

  auto config2 = tiny_config();
  config2.use_spatial = false;
  config2.use_adjacency = true;
  CHECK_THROWS_AS(InterFormerModel(config2, 1), std::invalid_argument);

  auto config3 = tiny_config();
  config3.n_layers = 0;
  CHECK_THROWS_AS(InterFormerModel(config3, 1), std::invalid_argument);
}

TEST_CASE("config json round-trips and rejects unknown keys") {
  auto config = tiny_config(7, 3);
  config.mask_mode = MaskMode::kPreSoftmax;
  config.adjacency_hops = AdjacencyHops::kPath;
  auto j = config.to_json();
  auto back = ModelConfig::from_json(j);
  CHECK(back.joint_count == 7);
  CHECK(back.mask_mode == MaskMode::kPreSoftmax);
  CHECK(back.adjacency_hops == AdjacencyHops::kPath);

  j["bogus_knob"] = 3;
  CHECK_THROWS_AS(ModelConfig::from_json(j), std::invalid_argument);
}
