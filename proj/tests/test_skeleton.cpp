#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "core/dataset_io.hpp"
#include "core/rng.hpp"
#include "core/skeleton.hpp"
#include "core/synth.hpp"

using namespace interformer;

namespace {

SkeletonTopology chain3() {
  SkeletonTopology t;
  t.joint_count = 3;
  t.parent = {0, 0, 1};
  t.root = 0;
  return t;
}

Pose random_pose(std::size_t k, Rng& rng) {
  Pose p;
  p.coords.resize(3 * k);
  for (auto& c : p.coords) c = rng.uniform(-2.0, 2.0);
  return p;
}

}  // namespace

TEST_CASE("adjacency masks for a 3-joint chain") {
  auto masks = build_adjacency_masks(chain3());
  const std::size_t k = 3;
  // inward: child -> parent pairs (1,0) and (2,1)
  CHECK(masks.inward[1 * k + 0] == 1.0);
  CHECK(masks.inward[2 * k + 1] == 1.0);
  CHECK(masks.inward[0 * k + 0] == 0.0);
  // outward: parent -> child pairs (0,1) and (1,2)
  CHECK(masks.outward[0 * k + 1] == 1.0);
  CHECK(masks.outward[1 * k + 2] == 1.0);
  // combined mask is tridiagonal
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double expected = (i == j || i + 1 == j || j + 1 == i) ? 1.0 : 0.0;
      CHECK(masks.mask[i * k + j] == expected);
    }
  }
}

TEST_CASE("adjacency mask of a single edge is all ones") {
  SkeletonTopology t;
  t.joint_count = 2;
  t.parent = {0, 0};
  t.root = 0;
  auto masks = build_adjacency_masks(t);
  for (double v : masks.mask) CHECK(v == 1.0);
}

TEST_CASE("adjacency masks match a brute-force pass over the parent relation") {
  // Star of 5 plus random trees.
  SkeletonTopology star;
  star.joint_count = 5;
  star.parent = {0, 0, 0, 0, 0};
  star.root = 0;
  auto star_masks = build_adjacency_masks(star);
  std::size_t root_row_ones = 0;
  for (std::size_t j = 0; j < 5; ++j) root_row_ones += star_masks.mask[j] > 0 ? 1 : 0;
  CHECK(root_row_ones == 5);

  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(2, 9));
    SkeletonTopology t;
    t.joint_count = k;
    t.root = 0;
    t.parent.resize(k);
    t.parent[0] = 0;
    for (std::size_t j = 1; j < k; ++j) {
      t.parent[j] = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(j) - 1));
    }
    auto masks = build_adjacency_masks(t);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const bool inward = i != t.root && t.parent[i] == j;
        const bool outward = j != t.root && t.parent[j] == i;
        CHECK(masks.inward[i * k + j] == (inward ? 1.0 : 0.0));
        CHECK(masks.outward[i * k + j] == (outward ? 1.0 : 0.0));
        CHECK(masks.mask[i * k + j] == ((i == j || inward || outward) ? 1.0 : 0.0));
        // symmetry and the inward/outward transposition invariant
        CHECK(masks.mask[i * k + j] == masks.mask[j * k + i]);
        CHECK(masks.inward[i * k + j] == masks.outward[j * k + i]);
      }
      CHECK(masks.mask[i * k + i] == 1.0);
    }
  }
}

TEST_CASE("full-path adjacency marks every ancestor") {
  auto masks = build_adjacency_masks(chain3(), AdjacencyHops::kPath);
  const std::size_t k = 3;
  CHECK(masks.inward[2 * k + 1] == 1.0);
  CHECK(masks.inward[2 * k + 0] == 1.0);  // grandparent reachable on the root path
  CHECK(masks.mask[2 * k + 0] == 1.0);
}

TEST_CASE("cyclic parent links are rejected") {
  SkeletonTopology t;
  t.joint_count = 3;
  t.parent = {0, 2, 1};  // 1 <-> 2 cycle
  t.root = 0;
  CHECK_THROWS_AS(build_adjacency_masks(t), std::invalid_argument);
}

TEST_CASE("interaction distance basics") {
  Pose a;
  a.coords = {0, 0, 0, 1, 1, 1};
  auto d_self = interaction_distance(a, a);
  CHECK(d_self[0] == 0.0);
  CHECK(d_self[3] == 0.0);
  for (double v : d_self) CHECK(v <= 0.0);

  Pose p, q;
  p.coords = {0, 0, 0};
  q.coords = {3, 4, 0};
  auto d = interaction_distance(p, q);
  CHECK(d[0] == doctest::Approx(-5.0).epsilon(1e-15));
}

TEST_CASE("interaction distance matches a scalar loop and transposes its arguments") {
  Rng rng(23);
  const std::size_t k = 6;
  Pose a = random_pose(k, rng);
  Pose b = random_pose(k, rng);
  auto d = interaction_distance(a, b);
  auto d_rev = interaction_distance(b, a);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double diff = a.coords[3 * i + c] - b.coords[3 * j + c];
        acc += diff * diff;
      }
      CHECK(d[i * k + j] == doctest::Approx(-std::sqrt(acc)).epsilon(1e-12));
      CHECK(d[i * k + j] == doctest::Approx(d_rev[j * k + i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("interaction distance rejects mismatched joint counts") {
  Pose a, b;
  a.coords.assign(9, 0.0);
  b.coords.assign(6, 0.0);
  CHECK_THROWS_AS(interaction_distance(a, b), std::invalid_argument);
}

TEST_CASE("normalization modes") {
  SynthConfig config;
  config.samples_per_class = 1;
  config.classes = {"push"};
  config.noise_sd = 0.0;
  Dataset ds = synthesize_dataset(config);
  InteractionSample& sample = ds.samples[0];

  SUBCASE("none is the identity") {
    InteractionSample copy = sample;
    auto params = normalize_sample(copy, ds.topology, NormalizationMode::kNone);
    CHECK(copy.action.frames[0].coords == sample.action.frames[0].coords);
    CHECK(params.scale == 1.0);
  }

  SUBCASE("center_scale normalizes the reference frame and round-trips") {
    InteractionSample copy = sample;
    auto params = normalize_sample(copy, ds.topology, NormalizationMode::kCenterScale);

    CHECK(mean_bone_length(copy.action.frames[0], ds.topology) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(copy.action.frames[0].x(ds.topology.root) == doctest::Approx(0.0).epsilon(1e-12));

    denormalize_sequence(copy.action, params);
    denormalize_sequence(copy.reaction, params);
    for (std::size_t t = 0; t < sample.action.length(); ++t) {
      for (std::size_t i = 0; i < sample.action.frames[t].coords.size(); ++i) {
        CHECK(copy.action.frames[t].coords[i] ==
              doctest::Approx(sample.action.frames[t].coords[i]).epsilon(1e-12));
        CHECK(copy.reaction.frames[t].coords[i] ==
              doctest::Approx(sample.reaction.frames[t].coords[i]).epsilon(1e-12));
      }
    }
  }

  SUBCASE("zero bone length is rejected") {
    InteractionSample degenerate = sample;
    for (auto& frame : degenerate.action.frames) frame.coords.assign(frame.coords.size(), 0.0);
    CHECK_THROWS_AS(normalize_sample(degenerate, ds.topology, NormalizationMode::kCenterScale),
                    std::invalid_argument);
  }
}

TEST_CASE("dataset save/load round-trips") {
  SynthConfig config;
  config.samples_per_class = 2;
  config.joint_count = 6;
  Dataset ds = synthesize_dataset(config);

  const std::string path = "dataset_roundtrip_test.json";
  save_dataset(ds, path);
  Dataset loaded = load_dataset(path);
  std::remove(path.c_str());

  REQUIRE(loaded.samples.size() == ds.samples.size());
  CHECK(loaded.topology.parent == ds.topology.parent);
  for (std::size_t s = 0; s < ds.samples.size(); ++s) {
    CHECK(loaded.samples[s].label == ds.samples[s].label);
    REQUIRE(loaded.samples[s].action.length() == ds.samples[s].action.length());
    for (std::size_t t = 0; t < ds.samples[s].action.length(); ++t) {
      CHECK(loaded.samples[s].action.frames[t].coords == ds.samples[s].action.frames[t].coords);
      CHECK(loaded.samples[s].reaction.frames[t].coords ==
            ds.samples[s].reaction.frames[t].coords);
    }
  }
}

TEST_CASE("empty sample list round-trips") {
  Dataset ds;
  ds.topology = make_synth_topology(5);
  const std::string path = "dataset_empty_test.json";
  save_dataset(ds, path);
  Dataset loaded = load_dataset(path);
  std::remove(path.c_str());
  CHECK(loaded.samples.empty());
  CHECK(loaded.topology.joint_count == 5);
}

TEST_CASE("malformed frame reports its index") {
  Dataset ds;
  ds.topology = make_synth_topology(5);
  InteractionSample sample;
  sample.label = "still";
  for (int t = 0; t < 3; ++t) {
    Pose p;
    p.coords.assign(15, 0.1);
    sample.action.frames.push_back(p);
    sample.reaction.frames.push_back(p);
  }
  ds.samples.push_back(sample);
  std::string text = dataset_to_json(ds);
  // Drop one joint from the second action frame.
  auto broken = nlohmann::json::parse(text);
  broken["samples"][0]["action"][1].erase(4);
  CHECK_THROWS_WITH_AS(static_cast<void>(dataset_from_json(broken.dump())),
                       doctest::Contains("frame 1"), std::runtime_error);
}

TEST_CASE("sequence export round-trips with the same frame shape") {
  SynthConfig config;
  config.samples_per_class = 1;
  config.classes = {"wave"};
  Dataset ds = synthesize_dataset(config);
  const std::string path = "sequence_roundtrip_test.json";
  save_sequence(ds.samples[0].reaction, ds.topology, path);
  SkeletonTopology topo;
  MotionSequence seq = load_sequence(path, &topo);
  std::remove(path.c_str());
  CHECK(topo.parent == ds.topology.parent);
  REQUIRE(seq.length() == ds.samples[0].reaction.length());
  for (std::size_t t = 0; t < seq.length(); ++t) {
    CHECK(seq.frames[t].coords == ds.samples[0].reaction.frames[t].coords);
  }
  CHECK(seq.label.value() == "wave");
}

TEST_CASE("synthesis is deterministic in the seed") {
  SynthConfig config;
  config.samples_per_class = 3;
  config.seed = 99;
  Dataset a = synthesize_dataset(config);
  Dataset b = synthesize_dataset(config);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    for (std::size_t t = 0; t < a.samples[s].action.length(); ++t) {
      CHECK(a.samples[s].action.frames[t].coords == b.samples[s].action.frames[t].coords);
      CHECK(a.samples[s].reaction.frames[t].coords == b.samples[s].reaction.frames[t].coords);
    }
  }

  config.seed = 100;
  Dataset c = synthesize_dataset(config);
  CHECK(a.samples[0].action.frames[0].coords != c.samples[0].action.frames[0].coords);
}

TEST_CASE("still reactions do not move when noise is off") {
  SynthConfig config;
  config.classes = {"still"};
  config.samples_per_class = 4;
  config.noise_sd = 0.0;
  Dataset ds = synthesize_dataset(config);
  for (const auto& sample : ds.samples) {
    for (std::size_t t = 1; t < sample.reaction.length(); ++t) {
      CHECK(sample.reaction.frames[t].coords == sample.reaction.frames[0].coords);
    }
  }
}

TEST_CASE("push reactions are shoved backward on x") {
  SynthConfig config;
  config.classes = {"push"};
  config.samples_per_class = 10;
  Dataset ds = synthesize_dataset(config);
  for (const auto& sample : ds.samples) {
    const auto& frames = sample.reaction.frames;
    const double displacement = frames.back().x(ds.topology.root) - frames.front().x(ds.topology.root);
    CHECK(displacement < 0.0);
  }
}

TEST_CASE("unknown class names are rejected") {
  SynthConfig config;
  config.classes = {"moonwalk"};
  CHECK_THROWS_AS(synthesize_dataset(config), std::invalid_argument);
}

TEST_CASE("synthesis requires at least 5 joints") {
  SynthConfig config;
  config.joint_count = 4;
  CHECK_THROWS_AS(synthesize_dataset(config), std::invalid_argument);
}

TEST_CASE("extremities are the childless joints") {
  auto topo = make_synth_topology(9);
  auto leaves = topo.extremities();
  // hand_r, foot_r, hand_l, foot_l and the last spine segment
  CHECK(std::find(leaves.begin(), leaves.end(), 3) != leaves.end());
  CHECK(std::find(leaves.begin(), leaves.end(), 4) != leaves.end());
  CHECK(std::find(leaves.begin(), leaves.end(), 8) != leaves.end());
  CHECK(std::find(leaves.begin(), leaves.end(), 0) == leaves.end());
}
