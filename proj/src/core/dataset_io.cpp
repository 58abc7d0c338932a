#include "core/dataset_io.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace interformer {

namespace {

using nlohmann::json;

json topology_to_json(const SkeletonTopology& topology) {
  json t;
  t["parents"] = topology.parent;
  t["root"] = topology.root;
  t["names"] = topology.joint_names;
  return t;
}

SkeletonTopology topology_from_json(const json& t) {
  SkeletonTopology topology;
  topology.parent = t.at("parents").get<std::vector<std::size_t>>();
  topology.joint_count = topology.parent.size();
  topology.root = t.at("root").get<std::size_t>();
  if (t.contains("names")) topology.joint_names = t.at("names").get<std::vector<std::string>>();
  validate_topology(topology);
  return topology;
}

json frames_to_json(const MotionSequence& seq) {
  json frames = json::array();
  for (const auto& frame : seq.frames) {
    json fj = json::array();
    for (std::size_t j = 0; j < frame.joint_count(); ++j) {
      fj.push_back({frame.x(j), frame.y(j), frame.z(j)});
    }
    frames.push_back(std::move(fj));
  }
  return frames;
}

MotionSequence frames_from_json(const json& frames, std::size_t k, const std::string& context) {
  MotionSequence seq;
  seq.frames.reserve(frames.size());
  std::size_t index = 0;
  for (const auto& fj : frames) {
    if (fj.size() != k) {
      throw std::runtime_error(context + ": frame " + std::to_string(index) + " has " +
                               std::to_string(fj.size()) + " joints, expected " +
                               std::to_string(k));
    }
    Pose pose;
    pose.coords.reserve(3 * k);
    for (const auto& joint : fj) {
      if (joint.size() != 3) {
        throw std::runtime_error(context + ": frame " + std::to_string(index) +
                                 " has a joint without 3 coordinates");
      }
      for (const auto& c : joint) {
        const double v = c.get<double>();
        if (!std::isfinite(v)) {
          throw std::runtime_error(context + ": non-finite coordinate in frame " +
                                   std::to_string(index));
        }
        pose.coords.push_back(v);
      }
    }
    seq.frames.push_back(std::move(pose));
    ++index;
  }
  return seq;
}

}  // namespace

std::string dataset_to_json(const Dataset& dataset) {
  json root;
  root["topology"] = topology_to_json(dataset.topology);
  root["samples"] = json::array();
  for (const auto& sample : dataset.samples) {
    json sj;
    sj["label"] = sample.label;
    sj["frame_rate"] = sample.action.frame_rate;
    sj["action"] = frames_to_json(sample.action);
    sj["reaction"] = frames_to_json(sample.reaction);
    root["samples"].push_back(std::move(sj));
  }
  return root.dump();
}

Dataset dataset_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("dataset: JSON parse error: ") + e.what());
  }
  Dataset dataset;
  try {
    dataset.topology = topology_from_json(root.at("topology"));
    const std::size_t k = dataset.topology.joint_count;
    std::size_t sample_index = 0;
    for (const auto& sj : root.at("samples")) {
      InteractionSample sample;
      sample.label = sj.at("label").get<std::string>();
      const double frame_rate = sj.at("frame_rate").get<double>();
      const std::string ctx = "sample " + std::to_string(sample_index);
      sample.action = frames_from_json(sj.at("action"), k, ctx + " action");
      sample.reaction = frames_from_json(sj.at("reaction"), k, ctx + " reaction");
      sample.action.frame_rate = frame_rate;
      sample.reaction.frame_rate = frame_rate;
      sample.action.label = sample.label;
      sample.reaction.label = sample.label;
      if (sample.action.length() != sample.reaction.length()) {
        throw std::runtime_error(ctx + ": action has " + std::to_string(sample.action.length()) +
                                 " frames but reaction has " +
                                 std::to_string(sample.reaction.length()));
      }
      if (sample.action.length() < 1) {
        throw std::runtime_error(ctx + ": empty sequence");
      }
      dataset.samples.push_back(std::move(sample));
      ++sample_index;
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("dataset: missing or mistyped field: ") + e.what());
  }
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("dataset: cannot open '" + path + "' for writing");
  out << dataset_to_json(dataset) << '\n';
  if (!out) throw IoError("dataset: write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("dataset: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_json(buf.str());
}

void save_sequence(const MotionSequence& seq, const SkeletonTopology& topology,
                   const std::string& path) {
  json root;
  root["topology"] = topology_to_json(topology);
  root["frame_rate"] = seq.frame_rate;
  if (seq.label) {
    root["label"] = *seq.label;
  } else {
    root["label"] = nullptr;
  }
  root["frames"] = frames_to_json(seq);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("sequence: cannot open '" + path + "' for writing");
  out << root.dump() << '\n';
  if (!out) throw IoError("sequence: write failed for '" + path + "'");
}

MotionSequence load_sequence(const std::string& path, SkeletonTopology* topology_out) {
  std::ifstream in(path);
  if (!in) throw IoError("sequence: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  json root;
  try {
    root = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("sequence: JSON parse error: ") + e.what());
  }
  try {
    SkeletonTopology topology = topology_from_json(root.at("topology"));
    MotionSequence seq =
        frames_from_json(root.at("frames"), topology.joint_count, "sequence");
    seq.frame_rate = root.at("frame_rate").get<double>();
    if (root.contains("label") && !root.at("label").is_null()) {
      seq.label = root.at("label").get<std::string>();
    }
    if (topology_out) *topology_out = topology;
    return seq;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("sequence: missing or mistyped field: ") + e.what());
  }
}

void save_sequence_csv(const MotionSequence& seq, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("sequence: cannot open '" + path + "' for writing");
  out << "frame,joint,x,y,z\n";
  out.precision(17);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const Pose& frame = seq.frames[t];
    for (std::size_t j = 0; j < frame.joint_count(); ++j) {
      out << t << ',' << j << ',' << frame.x(j) << ',' << frame.y(j) << ',' << frame.z(j) << '\n';
    }
  }
}

}  // namespace interformer
