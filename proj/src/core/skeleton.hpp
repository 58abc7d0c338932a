#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace interformer {

// Directed joint tree. The root's parent is itself; extremities are the
// joints with no children.
struct SkeletonTopology {
  std::size_t joint_count = 0;
  std::vector<std::size_t> parent;
  std::size_t root = 0;
  std::vector<std::string> joint_names;  // optional, may be empty

  std::vector<std::size_t> extremities() const;
};

// Validates tree structure (k >= 2, parent links acyclic and rooted).
// Throws std::invalid_argument on violation.
void validate_topology(const SkeletonTopology& topology);

struct Pose {
  // k x 3 row-major joint coordinates.
  std::vector<double> coords;

  std::size_t joint_count() const { return coords.size() / 3; }
  double x(std::size_t j) const { return coords[3 * j]; }
  double y(std::size_t j) const { return coords[3 * j + 1]; }
  double z(std::size_t j) const { return coords[3 * j + 2]; }
};

struct MotionSequence {
  std::vector<Pose> frames;
  double frame_rate = 30.0;
  std::optional<std::string> label;

  std::size_t length() const { return frames.size(); }
  std::size_t joint_count() const { return frames.empty() ? 0 : frames[0].joint_count(); }
};

struct InteractionSample {
  MotionSequence action;
  MotionSequence reaction;
  std::string label;
};

// Binary joint-relation matrices combined into the spatial attention mask.
struct AdjacencyMasks {
  std::size_t joint_count = 0;
  std::vector<double> identity;  // k x k
  std::vector<double> inward;    // one hop (or full path) toward the root
  std::vector<double> outward;   // transpose of inward
  std::vector<double> mask;      // identity + inward + outward, clipped to {0,1}
};

enum class AdjacencyHops {
  kOneHop,  // inward[i][j] = 1 iff j is the parent of i
  kPath,    // inward[i][j] = 1 iff j is any proper ancestor of i
};

AdjacencyMasks build_adjacency_masks(const SkeletonTopology& topology,
                                     AdjacencyHops hops = AdjacencyHops::kOneHop);

// Negated pairwise joint distances between two poses: entry (i, j) is
// -|a_i - b_j|, so nearer pairs get larger values. Returns a k x k row-major
// matrix.
std::vector<double> interaction_distance(const Pose& action_pose, const Pose& reaction_pose);

enum class NormalizationMode { kNone, kCenterScale };

// Offset/scale removed from a sample, kept so the transform can be undone.
struct NormalizationParams {
  NormalizationMode mode = NormalizationMode::kNone;
  std::array<double, 3> offset{0, 0, 0};
  double scale = 1.0;
};

// Mean |joint - parent| over all non-root joints of one frame.
double mean_bone_length(const Pose& pose, const SkeletonTopology& topology);

// Center-scale: subtracts the root position of the action's first frame from
// both sequences and divides by the action's mean bone length (frame 1).
NormalizationParams normalize_sample(InteractionSample& sample, const SkeletonTopology& topology,
                                     NormalizationMode mode);
void denormalize_sequence(MotionSequence& seq, const NormalizationParams& params);

}  // namespace interformer
