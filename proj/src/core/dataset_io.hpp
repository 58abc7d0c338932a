#pragma once

#include <string>
#include <vector>

#include "core/skeleton.hpp"

namespace interformer {

struct Dataset {
  SkeletonTopology topology;
  std::vector<InteractionSample> samples;
};

// JSON dataset file:
//   {"topology": {"parents": [...], "root": 0, "names": [...]},
//    "samples": [{"label": "...", "frame_rate": 30.0,
//                 "action": [[[x,y,z] * k] * T], "reaction": [...]}]}
// Coordinates round-trip at full double precision.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);

// Single-sequence export, same frame array shape:
//   {"topology": {...}, "frame_rate": 30.0, "label": "...", "frames": [...]}
void save_sequence(const MotionSequence& seq, const SkeletonTopology& topology,
                   const std::string& path);
MotionSequence load_sequence(const std::string& path, SkeletonTopology* topology_out = nullptr);

// Per-frame CSV dump: header "frame,joint,x,y,z".
void save_sequence_csv(const MotionSequence& seq, const std::string& path);

}  // namespace interformer
