#include "core/checkpoint.hpp"

#include "core/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace interformer {

namespace {

constexpr const char* kFormatTag = "ifckpt-v1";

void put_f64_le(std::ofstream& out, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(bits));
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64_le(std::ifstream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated float payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  double value = 0.0;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries,
                      const nlohmann::json& meta) {
  nlohmann::json manifest;
  manifest["format"] = kFormatTag;
  manifest["params"] = nlohmann::json::array();
  for (const auto& e : entries) {
    std::size_t n = 1;
    for (auto d : e.shape) n *= d;
    if (n != e.values.size()) {
      throw std::invalid_argument("checkpoint: entry '" + e.name + "' shape/value mismatch");
    }
    manifest["params"].push_back({{"name", e.name}, {"shape", e.shape}, {"dtype", "f64"}});
  }
  if (!meta.empty()) manifest["meta"] = meta;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open '" + path + "' for writing");
  out << manifest.dump() << '\n';
  for (const auto& e : entries) {
    for (double v : e.values) put_f64_le(out, v);
  }
  out.flush();
  if (!out) throw IoError("checkpoint: write failed for '" + path + "'");
}

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing manifest line");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: malformed manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kFormatTag) {
    throw std::runtime_error("checkpoint: unrecognized format tag in '" + path + "'");
  }

  Checkpoint ckpt;
  ckpt.meta = manifest.value("meta", nlohmann::json::object());
  for (const auto& p : manifest.at("params")) {
    CheckpointEntry e;
    e.name = p.at("name").get<std::string>();
    if (p.at("dtype").get<std::string>() != "f64") {
      throw std::runtime_error("checkpoint: unsupported dtype for '" + e.name + "'");
    }
    e.shape = p.at("shape").get<std::vector<std::size_t>>();
    std::size_t n = 1;
    for (auto d : e.shape) n *= d;
    e.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.values[i] = get_f64_le(in);
    ckpt.entries.push_back(std::move(e));
  }
  return ckpt;
}

}  // namespace interformer
