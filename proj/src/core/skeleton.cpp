#include "core/skeleton.hpp"

#include <cmath>
#include <stdexcept>

namespace interformer {

std::vector<std::size_t> SkeletonTopology::extremities() const {
  std::vector<bool> has_child(joint_count, false);
  for (std::size_t j = 0; j < joint_count; ++j) {
    if (j != root) has_child[parent[j]] = true;
  }
  std::vector<std::size_t> leaves;
  for (std::size_t j = 0; j < joint_count; ++j) {
    if (!has_child[j]) leaves.push_back(j);
  }
  return leaves;
}

void validate_topology(const SkeletonTopology& topology) {
  const std::size_t k = topology.joint_count;
  if (k < 2) throw std::invalid_argument("topology: at least 2 joints required");
  if (topology.parent.size() != k) {
    throw std::invalid_argument("topology: parent table length does not match joint count");
  }
  if (topology.root >= k) throw std::invalid_argument("topology: root index out of range");
  if (topology.parent[topology.root] != topology.root) {
    throw std::invalid_argument("topology: the root's parent must be itself");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (topology.parent[j] >= k) {
      throw std::invalid_argument("topology: parent index out of range for joint " +
                                  std::to_string(j));
    }
    // Walk to the root; more than k hops means a cycle.
    std::size_t cur = j;
    std::size_t hops = 0;
    while (cur != topology.root) {
      cur = topology.parent[cur];
      if (++hops > k) {
        throw std::invalid_argument("topology: cyclic parent links at joint " + std::to_string(j));
      }
    }
  }
}

AdjacencyMasks build_adjacency_masks(const SkeletonTopology& topology, AdjacencyHops hops) {
  validate_topology(topology);
  const std::size_t k = topology.joint_count;
  AdjacencyMasks masks;
  masks.joint_count = k;
  masks.identity.assign(k * k, 0.0);
  masks.inward.assign(k * k, 0.0);
  masks.outward.assign(k * k, 0.0);
  masks.mask.assign(k * k, 0.0);

  for (std::size_t i = 0; i < k; ++i) masks.identity[i * k + i] = 1.0;

  for (std::size_t i = 0; i < k; ++i) {
    if (i == topology.root) continue;
    if (hops == AdjacencyHops::kOneHop) {
      masks.inward[i * k + topology.parent[i]] = 1.0;
    } else {
      for (std::size_t a = topology.parent[i];; a = topology.parent[a]) {
        masks.inward[i * k + a] = 1.0;
        if (a == topology.root) break;
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) masks.outward[i * k + j] = masks.inward[j * k + i];
  }
  for (std::size_t e = 0; e < k * k; ++e) {
    const double combined = masks.identity[e] + masks.inward[e] + masks.outward[e];
    masks.mask[e] = combined > 0.0 ? 1.0 : 0.0;
  }
  return masks;
}

std::vector<double> interaction_distance(const Pose& action_pose, const Pose& reaction_pose) {
  const std::size_t k = action_pose.joint_count();
  if (reaction_pose.joint_count() != k) {
    throw std::invalid_argument("interaction_distance: joint counts differ, " +
                                std::to_string(k) + " vs " +
                                std::to_string(reaction_pose.joint_count()));
  }
  std::vector<double> dist(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double dx = action_pose.x(i) - reaction_pose.x(j);
      const double dy = action_pose.y(i) - reaction_pose.y(j);
      const double dz = action_pose.z(i) - reaction_pose.z(j);
      dist[i * k + j] = -std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  }
  return dist;
}

double mean_bone_length(const Pose& pose, const SkeletonTopology& topology) {
  double total = 0.0;
  std::size_t bones = 0;
  for (std::size_t j = 0; j < topology.joint_count; ++j) {
    if (j == topology.root) continue;
    const std::size_t p = topology.parent[j];
    const double dx = pose.x(j) - pose.x(p);
    const double dy = pose.y(j) - pose.y(p);
    const double dz = pose.z(j) - pose.z(p);
    total += std::sqrt(dx * dx + dy * dy + dz * dz);
    ++bones;
  }
  return total / static_cast<double>(bones);
}

namespace {

void apply_normalization(MotionSequence& seq, const NormalizationParams& params) {
  for (auto& frame : seq.frames) {
    for (std::size_t j = 0; j < frame.joint_count(); ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        frame.coords[3 * j + c] = (frame.coords[3 * j + c] - params.offset[c]) / params.scale;
      }
    }
  }
}

}  // namespace

NormalizationParams normalize_sample(InteractionSample& sample, const SkeletonTopology& topology,
                                     NormalizationMode mode) {
  NormalizationParams params;
  params.mode = mode;
  if (mode == NormalizationMode::kNone) return params;

  if (sample.action.frames.empty()) {
    throw std::invalid_argument("normalize_sample: empty action sequence");
  }
  const Pose& first = sample.action.frames[0];
  params.offset = {first.x(topology.root), first.y(topology.root), first.z(topology.root)};
  params.scale = mean_bone_length(first, topology);
  if (params.scale <= 0.0) {
    throw std::invalid_argument("normalize_sample: zero bone length in the reference frame");
  }
  apply_normalization(sample.action, params);
  apply_normalization(sample.reaction, params);
  return params;
}

void denormalize_sequence(MotionSequence& seq, const NormalizationParams& params) {
  if (params.mode == NormalizationMode::kNone) return;
  for (auto& frame : seq.frames) {
    for (std::size_t j = 0; j < frame.joint_count(); ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        frame.coords[3 * j + c] = frame.coords[3 * j + c] * params.scale + params.offset[c];
      }
    }
  }
}

}  // namespace interformer
