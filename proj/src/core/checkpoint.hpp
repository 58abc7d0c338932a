#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace interformer {

struct CheckpointEntry {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

// Single-file parameter checkpoint: a one-line JSON manifest (names, shapes,
// dtype tag, optional metadata) followed by the raw little-endian 64-bit
// float payload of each entry in manifest order. Round-trips bit-exactly.
void write_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries,
                      const nlohmann::json& meta = nlohmann::json::object());

struct Checkpoint {
  std::vector<CheckpointEntry> entries;
  nlohmann::json meta;

  const CheckpointEntry* find(const std::string& name) const;
};

Checkpoint read_checkpoint(const std::string& path);

}  // namespace interformer
