#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace interformer {

namespace {

constexpr std::size_t kRoot = 0;
constexpr std::size_t kSpine = 1;
constexpr std::size_t kHead = 2;
constexpr std::size_t kHand = 3;
constexpr std::size_t kFoot = 4;

constexpr double kBodySeparation = 0.75;  // each character this far from the origin on x

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

// Rest pose centered above the origin; x_offset places the character.
Pose rest_pose(std::size_t k, double x_offset) {
  Pose pose;
  pose.coords.assign(3 * k, 0.0);
  auto set = [&](std::size_t j, double x, double y, double z) {
    pose.coords[3 * j] = x + x_offset;
    pose.coords[3 * j + 1] = y;
    pose.coords[3 * j + 2] = z;
  };
  set(kRoot, 0.0, 0.0, 1.0);
  set(kSpine, 0.0, 0.0, 1.45);
  set(kHead, 0.0, 0.0, 1.7);
  set(kHand, 0.0, 0.35, 1.4);
  set(kFoot, 0.0, 0.15, 0.0);
  if (k > 5) set(5, 0.0, -0.35, 1.4);   // second hand
  if (k > 6) set(6, 0.0, -0.15, 0.0);   // second foot
  for (std::size_t j = 7; j < k; ++j) { // extra spine segments above the head
    set(j, 0.0, 0.0, 1.7 + 0.18 * static_cast<double>(j - 6));
  }
  return pose;
}

void translate_all(Pose& pose, double dx, double dy, double dz) {
  for (std::size_t j = 0; j < pose.joint_count(); ++j) {
    pose.coords[3 * j] += dx;
    pose.coords[3 * j + 1] += dy;
    pose.coords[3 * j + 2] += dz;
  }
}

void move_joint(Pose& pose, std::size_t j, double dx, double dy, double dz) {
  pose.coords[3 * j] += dx;
  pose.coords[3 * j + 1] += dy;
  pose.coords[3 * j + 2] += dz;
}

// Lean every joint above the root along x proportionally to its height.
void tilt_body(Pose& pose, std::size_t root, double amount) {
  const double z0 = pose.z(root);
  for (std::size_t j = 0; j < pose.joint_count(); ++j) {
    const double h = pose.z(j) - z0;
    if (h > 0.0) pose.coords[3 * j] += amount * h;
  }
}

struct SampleMotion {
  MotionSequence action;
  MotionSequence reaction;
};

SampleMotion make_sample(const std::string& cls, std::size_t k, std::size_t frames, Rng& rng,
                         double frame_rate) {
  SampleMotion out;
  out.action.frame_rate = frame_rate;
  out.reaction.frame_rate = frame_rate;

  const double amp = rng.uniform(0.85, 1.15);    // per-sample amplitude variation
  const double y_jitter = rng.uniform(-0.06, 0.06);
  const double phase0 = rng.uniform(0.0, 0.5);

  // Action stands at +x and acts toward -x; reaction stands at -x.
  const Pose action_rest = [&] {
    Pose p = rest_pose(k, kBodySeparation);
    translate_all(p, 0.0, y_jitter, 0.0);
    return p;
  }();
  const Pose reaction_rest = [&] {
    Pose p = rest_pose(k, -kBodySeparation);
    translate_all(p, 0.0, y_jitter, 0.0);
    return p;
  }();

  const auto tmax = static_cast<double>(frames - 1);
  for (std::size_t t = 0; t < frames; ++t) {
    const double s = tmax > 0.0 ? static_cast<double>(t) / tmax : 0.0;
    Pose action = action_rest;
    Pose reaction = reaction_rest;

    if (cls == "push") {
      const double reach = 0.55 * amp * std::sin(M_PI * std::min(s / 0.8, 1.0));
      move_joint(action, kHand, -reach, -0.3 * reach, 0.0);
      const double shove = 0.45 * amp * smoothstep((s - 0.35) / 0.45);
      translate_all(reaction, -shove, 0.0, 0.0);
    } else if (cls == "wave") {
      const double cycles = 2.0;
      const double osc = 0.3 * amp * std::sin(2.0 * M_PI * (cycles * s + phase0));
      move_joint(action, kHand, 0.0, osc, 0.25 + 0.1 * osc);
      const double lag = 3.0;  // frames
      if (static_cast<double>(t) >= lag && tmax > lag) {
        const double sl = (static_cast<double>(t) - lag) / tmax;
        const double osc_r = 0.3 * amp * std::sin(2.0 * M_PI * (cycles * sl + phase0));
        move_joint(reaction, kHand, 0.0, osc_r, 0.25 + 0.1 * osc_r);
      }
    } else if (cls == "kick") {
      const double reach = 0.6 * amp * std::sin(M_PI * std::min(s / 0.7, 1.0));
      move_joint(action, kFoot, -reach, 0.0, 0.5 * reach);
      const double shove = 0.35 * amp * smoothstep((s - 0.3) / 0.4);
      translate_all(reaction, -shove, 0.0, 0.0);
      tilt_body(reaction, kRoot, -0.25 * amp * smoothstep((s - 0.3) / 0.4));
    } else if (cls == "approach") {
      const double walk = 0.5 * amp * s;
      translate_all(action, -walk, 0.0, 0.02 * std::sin(2.0 * M_PI * 3.0 * s));
      translate_all(reaction, walk, 0.0, 0.02 * std::sin(2.0 * M_PI * 3.0 * s + 1.0));
    } else if (cls == "still") {
      const double bob = 0.05 * amp * std::sin(2.0 * M_PI * (s + phase0));
      move_joint(action, kHead, 0.0, 0.0, bob);
      move_joint(action, kSpine, 0.0, 0.0, 0.6 * bob);
      // reaction keeps the rest pose
    } else {
      throw std::invalid_argument("synthesize_dataset: unknown class '" + cls + "'");
    }

    out.action.frames.push_back(std::move(action));
    out.reaction.frames.push_back(std::move(reaction));
  }
  return out;
}

void add_noise(MotionSequence& seq, Rng& rng, double sd) {
  if (sd <= 0.0) return;
  for (auto& frame : seq.frames) {
    for (auto& c : frame.coords) c += rng.normal(0.0, sd);
  }
}

}  // namespace

const std::vector<std::string>& synth_class_names() {
  static const std::vector<std::string> names{"push", "wave", "kick", "approach", "still"};
  return names;
}

SkeletonTopology make_synth_topology(std::size_t k) {
  if (k < 5) throw std::invalid_argument("make_synth_topology: at least 5 joints required");
  SkeletonTopology topology;
  topology.joint_count = k;
  topology.root = kRoot;
  topology.parent.assign(k, 0);
  topology.joint_names.assign(k, "");
  auto def = [&](std::size_t j, std::size_t parent, const char* name) {
    if (j < k) {
      topology.parent[j] = parent;
      topology.joint_names[j] = name;
    }
  };
  def(kRoot, kRoot, "root");
  def(kSpine, kRoot, "spine");
  def(kHead, kSpine, "head");
  def(kHand, kSpine, "hand_r");
  def(kFoot, kRoot, "foot_r");
  def(5, kSpine, "hand_l");
  def(6, kRoot, "foot_l");
  for (std::size_t j = 7; j < k; ++j) {
    topology.parent[j] = (j == 7) ? kHead : j - 1;
    topology.joint_names[j] = "seg" + std::to_string(j - 7);
  }
  validate_topology(topology);
  return topology;
}

Dataset synthesize_dataset(const SynthConfig& config) {
  if (config.joint_count < 5) {
    throw std::invalid_argument("synthesize_dataset: joint_count must be at least 5");
  }
  if (config.t_min < 2 || config.t_max < config.t_min) {
    throw std::invalid_argument("synthesize_dataset: need 2 <= t_min <= t_max");
  }
  if (config.samples_per_class < 1) {
    throw std::invalid_argument("synthesize_dataset: samples_per_class must be positive");
  }
  const auto& known = synth_class_names();
  for (const auto& cls : config.classes) {
    if (std::find(known.begin(), known.end(), cls) == known.end()) {
      throw std::invalid_argument("synthesize_dataset: unknown class '" + cls + "'");
    }
  }

  Dataset dataset;
  dataset.topology = make_synth_topology(config.joint_count);
  Rng rng(config.seed);
  for (std::size_t ci = 0; ci < config.classes.size(); ++ci) {
    const std::string& cls = config.classes[ci];
    for (std::size_t si = 0; si < config.samples_per_class; ++si) {
      Rng sample_rng = rng.derive(ci * 100003 + si);
      const auto frames = static_cast<std::size_t>(sample_rng.uniform_int(
          static_cast<std::int64_t>(config.t_min), static_cast<std::int64_t>(config.t_max)));
      SampleMotion motion =
          make_sample(cls, config.joint_count, frames, sample_rng, config.frame_rate);
      add_noise(motion.action, sample_rng, config.noise_sd);
      add_noise(motion.reaction, sample_rng, config.noise_sd);
      InteractionSample sample;
      sample.action = std::move(motion.action);
      sample.reaction = std::move(motion.reaction);
      sample.label = cls;
      sample.action.label = cls;
      sample.reaction.label = cls;
      dataset.samples.push_back(std::move(sample));
    }
  }
  return dataset;
}

}  // namespace interformer
