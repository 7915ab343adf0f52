#pragma once

// Robot joint space: the 14-channel pose, joint limits, and the pose-stream
// JSONL format shared by retargeting output and generated sequences.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gestgen/config.hpp"
#include "gestgen/error.hpp"

namespace gestgen {

enum class Side { kLeft, kRight };

/// Pose channels in serialization order.
enum class Channel : std::size_t {
  kHeadYaw,
  kHeadPitch,
  kLShoulderPitch,
  kLShoulderRoll,
  kLElbowYaw,
  kLElbowRoll,
  kLWristYaw,
  kLHandOpen,
  kRShoulderPitch,
  kRShoulderRoll,
  kRElbowYaw,
  kRElbowRoll,
  kRWristYaw,
  kRHandOpen,
};

inline constexpr std::size_t kChannelCount = 14;

inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "head_yaw",         "head_pitch",      "l_shoulder_pitch", "l_shoulder_roll",
    "l_elbow_yaw",      "l_elbow_roll",    "l_wrist_yaw",      "l_hand_open",
    "r_shoulder_pitch", "r_shoulder_roll", "r_elbow_yaw",      "r_elbow_roll",
    "r_wrist_yaw",      "r_hand_open",
};

enum class ArmJoint : std::size_t {
  kShoulderPitch,
  kShoulderRoll,
  kElbowYaw,
  kElbowRoll,
  kWristYaw,
  kHandOpen,
};

inline constexpr Channel arm_channel(Side side, ArmJoint joint) {
  const std::size_t base = side == Side::kLeft ? 2 : 8;
  return static_cast<Channel>(base + static_cast<std::size_t>(joint));
}

inline constexpr std::size_t index(Channel c) { return static_cast<std::size_t>(c); }

struct RobotPose {
  std::array<double, kChannelCount> q{};

  double& operator[](Channel c) { return q[index(c)]; }
  double operator[](Channel c) const { return q[index(c)]; }
  double& arm(Side s, ArmJoint j) { return q[index(arm_channel(s, j))]; }
  double arm(Side s, ArmJoint j) const { return q[index(arm_channel(s, j))]; }

  friend bool operator==(const RobotPose&, const RobotPose&) = default;
};

struct JointRange {
  double min = 0.0;
  double max = 0.0;
};

struct JointLimits {
  std::array<JointRange, kChannelCount> range{};
  double max_wrist_yaw = 1.8239;
  double k1 = 1.0;  // head yaw gain
  double k2 = 0.2;  // yaw-to-pitch coupling gain

  const JointRange& operator[](Channel c) const { return range[index(c)]; }
  JointRange& operator[](Channel c) { return range[index(c)]; }

  double clamp(Channel c, double v) const {
    const auto& r = range[index(c)];
    return std::clamp(v, r.min, r.max);
  }

  bool contains(const RobotPose& p) const {
    for (std::size_t i = 0; i < kChannelCount; ++i) {
      if (!(p.q[i] >= range[i].min && p.q[i] <= range[i].max)) return false;
    }
    return true;
  }

  void validate() const {
    for (std::size_t i = 0; i < kChannelCount; ++i) {
      if (!(range[i].min < range[i].max) || !std::isfinite(range[i].min) ||
          !std::isfinite(range[i].max)) {
        throw ConfigError("joint limits for '" + std::string(kChannelNames[i]) +
                          "' must satisfy min < max");
      }
    }
    if (!(max_wrist_yaw > 0.0)) throw ConfigError("max_wrist_yaw must be positive");
    if (!std::isfinite(k1) || !std::isfinite(k2)) throw ConfigError("gains must be finite");
  }

  /// Pepper documented joint ranges (NAOqi 2.8).
  static JointLimits pepper() {
    JointLimits l;
    auto set = [&](Channel c, double lo, double hi) { l[c] = {lo, hi}; };
    set(Channel::kHeadYaw, -2.0857, 2.0857);
    set(Channel::kHeadPitch, -0.7068, 0.6371);
    set(Channel::kLShoulderPitch, -2.0857, 2.0857);
    set(Channel::kLShoulderRoll, 0.0087, 1.5620);
    set(Channel::kLElbowYaw, -2.0857, 2.0857);
    set(Channel::kLElbowRoll, -1.5620, -0.0087);
    set(Channel::kLWristYaw, -1.8239, 1.8239);
    set(Channel::kLHandOpen, 0.0, 1.0);
    set(Channel::kRShoulderPitch, -2.0857, 2.0857);
    set(Channel::kRShoulderRoll, -1.5620, -0.0087);
    set(Channel::kRElbowYaw, -2.0857, 2.0857);
    set(Channel::kRElbowRoll, 0.0087, 1.5620);
    set(Channel::kRWristYaw, -1.8239, 1.8239);
    set(Channel::kRHandOpen, 0.0, 1.0);
    l.max_wrist_yaw = 1.8239;
    return l;
  }
};

/// Pose with every channel at zero, pulled into the limits.
inline RobotPose rest_pose(const JointLimits& limits) {
  RobotPose p;
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    p.q[i] = std::clamp(0.0, limits.range[i].min, limits.range[i].max);
  }
  return p;
}

/// Everything the retargeting stage reads from a limits file.
struct RetargetConfig {
  JointLimits limits = JointLimits::pepper();
  int glove_window = 20;
  double glove_normalizer = 200.0;  // N; default is window²/2
  double palm_up_elbow_yaw = -std::numbers::pi / 2;
  std::uint64_t seed = 0;
  std::size_t calibration_frames = 10;

  void validate() const {
    limits.validate();
    if (glove_window <= 0) throw ConfigError("glove.window must be positive");
    if (!(glove_normalizer > 0.0)) throw ConfigError("glove.normalizer must be positive");
    if (!std::isfinite(palm_up_elbow_yaw)) {
      throw ConfigError("glove.palm_up_elbow_yaw must be finite");
    }
  }
};

/// Reads a limits file. Missing keys keep the Pepper defaults; unknown keys
/// are rejected.
///
///   [gains]     k1, k2
///   [glove]     window, normalizer, max_wrist_yaw, palm_up_elbow_yaw
///   [retarget]  seed, calibration_frames
///   [limits]    <channel name> = [min, max]   (one per channel)
inline RetargetConfig parse_retarget_config(const KeyValueConfig& kv) {
  std::set<std::string> known = {"gains.k1",
                                 "gains.k2",
                                 "glove.window",
                                 "glove.normalizer",
                                 "glove.max_wrist_yaw",
                                 "glove.palm_up_elbow_yaw",
                                 "retarget.seed",
                                 "retarget.calibration_frames"};
  for (auto name : kChannelNames) known.insert("limits." + std::string(name));
  kv.require_known(known);

  RetargetConfig cfg;
  auto& lim = cfg.limits;
  lim.k1 = kv.get_double("gains.k1", lim.k1);
  lim.k2 = kv.get_double("gains.k2", lim.k2);
  lim.max_wrist_yaw = kv.get_double("glove.max_wrist_yaw", lim.max_wrist_yaw);
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    const auto r = kv.get_range("limits." + std::string(kChannelNames[i]),
                                {lim.range[i].min, lim.range[i].max});
    lim.range[i] = {r.first, r.second};
  }
  const auto window = kv.get_uint("glove.window", static_cast<std::uint64_t>(cfg.glove_window));
  if (window == 0 || window > 100000) throw ConfigError("glove.window out of range");
  cfg.glove_window = static_cast<int>(window);
  cfg.glove_normalizer = kv.get_double(
      "glove.normalizer", static_cast<double>(cfg.glove_window) * cfg.glove_window * 0.5);
  cfg.palm_up_elbow_yaw = kv.get_double("glove.palm_up_elbow_yaw", cfg.palm_up_elbow_yaw);
  cfg.seed = kv.get_uint("retarget.seed", cfg.seed);
  cfg.calibration_frames = kv.get_uint("retarget.calibration_frames", cfg.calibration_frames);
  cfg.validate();
  return cfg;
}

inline RetargetConfig load_retarget_config(const std::string& path) {
  return parse_retarget_config(KeyValueConfig::load(path));
}

// Pose stream JSONL: an optional {"meta": {...}} first line, then one
// {"t": seconds, "q": [14 values]} object per line in channel order.

struct TimedPose {
  double t = 0.0;
  RobotPose pose;

  friend bool operator==(const TimedPose&, const TimedPose&) = default;
};

struct PoseStream {
  std::vector<TimedPose> poses;
  std::optional<double> frame_period;
};

inline void save_pose_stream(const std::string& path, const std::vector<TimedPose>& poses,
                             std::optional<double> frame_period = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write pose stream '" + path + "'");
  if (frame_period) {
    nlohmann::ordered_json meta;
    meta["meta"]["frame_period"] = *frame_period;
    meta["meta"]["channels"] = kChannelNames;
    out << meta.dump() << '\n';
  }
  for (const auto& p : poses) {
    nlohmann::ordered_json j;
    j["t"] = p.t;
    j["q"] = p.pose.q;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline PoseStream load_pose_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pose stream '" + path + "'");
  PoseStream stream;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line, "expected a JSON object");
    if (j.contains("meta")) {
      if (!stream.poses.empty()) throw ParseError(line, "meta header must come first");
      const auto& meta = j["meta"];
      if (meta.contains("frame_period")) {
        if (!meta["frame_period"].is_number() || !(meta["frame_period"].get<double>() > 0.0)) {
          throw ParseError(line, "meta.frame_period must be a positive number");
        }
        stream.frame_period = meta["frame_period"].get<double>();
      }
      continue;
    }
    if (!j.contains("t") || !j["t"].is_number()) throw ParseError(line, "missing numeric \"t\"");
    if (!j.contains("q") || !j["q"].is_array() || j["q"].size() != kChannelCount) {
      throw ParseError(line, "\"q\" must hold exactly 14 values");
    }
    TimedPose tp;
    tp.t = j["t"].get<double>();
    for (std::size_t i = 0; i < kChannelCount; ++i) {
      if (!j["q"][i].is_number()) throw ParseError(line, "non-numeric joint value");
      tp.pose.q[i] = j["q"][i].get<double>();
      if (!std::isfinite(tp.pose.q[i])) throw ParseError(line, "non-finite joint value");
    }
    if (!stream.poses.empty() && !(tp.t > stream.poses.back().t)) {
      throw ParseError(line, "timestamps must be strictly increasing");
    }
    stream.poses.push_back(tp);
  }
  return stream;
}

}  // namespace gestgen
