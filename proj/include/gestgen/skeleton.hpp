#pragma once

// Human skeleton capture model and recording ingestion.
//
// Capture space: x increases toward the subject's left (left-to-right as seen
// from the sensor), y points up, z points away from the sensor toward the
// subject. Units are meters.

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gestgen/error.hpp"

namespace gestgen {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double k, Vec3 a) { return {k * a.x, k * a.y, k * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(Vec3 v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Vectors shorter than this have no usable direction.
inline constexpr double kDegenerateNorm = 1e-9;

/// Unit vector along v. Throws DegenerateGeometry when ‖v‖ ≤ 1e-9.
inline Vec3 normalize(Vec3 v) {
  const double n = norm(v);
  if (!(n > kDegenerateNorm)) {
    throw DegenerateGeometry("cannot normalize a vector of length " + std::to_string(n));
  }
  return {v.x / n, v.y / n, v.z / n};
}

enum class Joint : std::size_t {
  kHead,
  kNeck,
  kTorso,
  kLeftShoulder,
  kLeftElbow,
  kLeftHand,
  kRightShoulder,
  kRightElbow,
  kRightHand,
  kLeftHip,
  kLeftKnee,
  kLeftFoot,
  kRightHip,
  kRightKnee,
  kRightFoot,
};

inline constexpr std::size_t kJointCount = 15;

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "head",       "neck",      "torso",          "left_shoulder", "left_elbow",
    "left_hand",  "right_shoulder", "right_elbow", "right_hand",  "left_hip",
    "left_knee",  "left_foot", "right_hip",      "right_knee",    "right_foot",
};

inline std::string_view joint_name(Joint j) {
  return kJointNames[static_cast<std::size_t>(j)];
}

inline std::optional<Joint> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

struct SkeletonFrame {
  double timestamp = 0.0;
  std::array<Vec3, kJointCount> joints{};

  Vec3& operator[](Joint j) { return joints[static_cast<std::size_t>(j)]; }
  const Vec3& operator[](Joint j) const { return joints[static_cast<std::size_t>(j)]; }
};

struct Recording {
  std::vector<SkeletonFrame> frames;
  double fps = 30.0;
  std::string subject;
};

/// Displacement `to - from`, unnormalized.
inline Vec3 vector_between(const SkeletonFrame& frame, Joint from, Joint to) {
  return frame[to] - frame[from];
}

inline Vec3 vector_between(const SkeletonFrame& frame, std::string_view from,
                           std::string_view to) {
  const auto a = joint_from_name(from);
  const auto b = joint_from_name(to);
  if (!a) throw ValidationError("unknown joint name '" + std::string(from) + "'");
  if (!b) throw ValidationError("unknown joint name '" + std::string(to) + "'");
  return vector_between(frame, *a, *b);
}

/// Checks the Recording invariants; throws ValidationError naming the
/// offending frame.
inline void validate(const Recording& rec) {
  if (!(rec.fps > 0.0) || !std::isfinite(rec.fps)) {
    throw ValidationError("recording frame rate must be positive, got " +
                          std::to_string(rec.fps));
  }
  if (rec.frames.empty()) {
    throw ValidationError("recording '" + rec.subject +
                          "' has no frames; a unit of movement needs at least 4");
  }
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const auto& f = rec.frames[i];
    if (!std::isfinite(f.timestamp)) {
      throw ValidationError("frame " + std::to_string(i) + ": non-finite timestamp");
    }
    if (i > 0 && !(f.timestamp > rec.frames[i - 1].timestamp)) {
      throw ValidationError("frame " + std::to_string(i) +
                            ": timestamps must be strictly increasing");
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if (!is_finite(f.joints[j])) {
        throw ValidationError("frame " + std::to_string(i) + ": joint '" +
                              std::string(kJointNames[j]) + "' is not finite");
      }
    }
  }
}

namespace detail {

inline Vec3 parse_vec3(const nlohmann::json& j, std::size_t line, std::string_view joint) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(line, "joint '" + std::string(joint) + "' must be an array [x,y,z]");
  }
  for (const auto& c : j) {
    if (!c.is_number()) {
      throw ParseError(line, "joint '" + std::string(joint) + "' has a non-numeric coordinate");
    }
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/// Reads the JSONL recording format: a metadata header line followed by one
/// frame per line.
inline Recording load_recording(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open recording '" + path + "'");

  Recording rec;
  std::string text;
  std::size_t line = 0;
  bool have_meta = false;
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

    if (!have_meta) {
      if (!j.contains("meta") || !j["meta"].is_object()) {
        throw ParseError(line, "first line must be the {\"meta\": {...}} header");
      }
      const auto& meta = j["meta"];
      if (!meta.contains("fps") || !meta["fps"].is_number()) {
        throw ParseError(line, "meta.fps must be a number");
      }
      rec.fps = meta["fps"].get<double>();
      if (meta.contains("subject")) {
        if (!meta["subject"].is_string()) throw ParseError(line, "meta.subject must be a string");
        rec.subject = meta["subject"].get<std::string>();
      }
      have_meta = true;
      continue;
    }

    const std::size_t index = rec.frames.size();
    if (!j.contains("t") || !j["t"].is_number()) throw ParseError(line, "missing numeric \"t\"");
    if (!j.contains("joints") || !j["joints"].is_object()) {
      throw ParseError(line, "missing \"joints\" object");
    }
    const auto& joints = j["joints"];
    if (joints.size() != kJointCount) {
      throw ValidationError("frame " + std::to_string(index) + " (line " +
                            std::to_string(line) + "): expected " +
                            std::to_string(kJointCount) + " joints, got " +
                            std::to_string(joints.size()));
    }
    SkeletonFrame frame;
    frame.timestamp = j["t"].get<double>();
    std::array<bool, kJointCount> seen{};
    for (const auto& [name, value] : joints.items()) {
      const auto joint = joint_from_name(name);
      if (!joint) {
        throw ValidationError("frame " + std::to_string(index) + " (line " +
                              std::to_string(line) + "): unknown joint '" + name + "'");
      }
      seen[static_cast<std::size_t>(*joint)] = true;
      frame[*joint] = detail::parse_vec3(value, line, name);
    }
    for (std::size_t k = 0; k < kJointCount; ++k) {
      if (!seen[k]) {
        throw ValidationError("frame " + std::to_string(index) + ": missing joint '" +
                              std::string(kJointNames[k]) + "'");
      }
    }
    rec.frames.push_back(frame);
  }
  if (!have_meta) throw ParseError(line == 0 ? 1 : line, "missing metadata header");

  validate(rec);
  return rec;
}

/// Writes the JSONL recording format. Doubles are printed in shortest
/// round-trip form, so load_recording reproduces them exactly.
inline void save_recording(const Recording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write recording '" + path + "'");

  nlohmann::ordered_json meta;
  meta["meta"]["fps"] = rec.fps;
  meta["meta"]["subject"] = rec.subject;
  out << meta.dump() << '\n';
  for (const auto& f : rec.frames) {
    nlohmann::ordered_json line;
    line["t"] = f.timestamp;
    auto& joints = line["joints"];
    for (std::size_t k = 0; k < kJointCount; ++k) {
      const Vec3& v = f.joints[k];
      joints[std::string(kJointNames[k])] = {v.x, v.y, v.z};
    }
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace gestgen
