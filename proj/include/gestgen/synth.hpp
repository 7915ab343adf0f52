#pragma once

// Procedural talking-gesture skeleton used for demos and tests: a standing
// subject facing the sensor, arms swinging on incommensurate sinusoids, head
// nodding and tilting slightly, plus colored-glove hand crops.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gestgen/glove.hpp"
#include "gestgen/random.hpp"
#include "gestgen/retarget.hpp"
#include "gestgen/skeleton.hpp"

namespace gestgen::synth {

struct Options {
  std::size_t frames = 480;
  std::uint64_t seed = 0;
  double fps = 4.0;
  std::string subject = "synthetic";
};

namespace detail {

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct ArmPhases {
  std::array<double, 4> phase{};
  std::array<double, 4> freq{};  // Hz
};

inline ArmPhases draw_phases(Rng& rng) {
  ArmPhases p;
  for (std::size_t i = 0; i < 4; ++i) {
    p.phase[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.freq[i] = rng.uniform(0.12, 0.45);
  }
  return p;
}

inline double wave(const ArmPhases& p, std::size_t i, double t) {
  return std::sin(2.0 * std::numbers::pi * p.freq[i] * t + p.phase[i]);
}

/// Shoulder-to-elbow and elbow-to-hand offsets in the body frame for the
/// left arm; the right arm mirrors x.
inline std::pair<Vec3, Vec3> arm_offsets(const ArmPhases& p, double t) {
  const double abduction = 0.35 + 0.25 * wave(p, 0, t);
  const double flexion = 0.45 + 0.35 * wave(p, 1, t);
  const double bend = 2.3 + 0.5 * wave(p, 2, t);  // angle between segments; keeps elbow roll off its limits
  const double twist = 0.5 * wave(p, 3, t);

  const Vec3 upper{std::sin(abduction), std::cos(abduction) * std::sin(flexion),
                   -std::cos(abduction) * std::cos(flexion)};
  const Vec3 fwd{0.0, 1.0, 0.0};
  const Vec3 perp = normalize(fwd - dot(fwd, upper) * upper);
  const Vec3 side = normalize(cross(upper, perp));
  const Vec3 dir = std::cos(twist) * perp + std::sin(twist) * side;
  const Vec3 fore = std::cos(bend) * upper + std::sin(bend) * dir;
  return {0.28 * upper, 0.25 * fore};
}

}  // namespace detail

/// Deterministic recording for a given seed.
inline Recording make_recording(const Options& opts) {
  if (opts.frames == 0) throw ValidationError("synthetic recording needs at least one frame");
  if (!(opts.fps > 0.0)) throw ValidationError("synthetic frame rate must be positive");

  using kinematics::from_body;
  Rng rng(opts.seed);
  const auto left = detail::draw_phases(rng);
  const auto right = detail::draw_phases(rng);
  const auto head = detail::draw_phases(rng);
  const Vec3 subject_origin{0.0, 0.1, 2.2};  // torso, capture space

  Recording rec;
  rec.fps = opts.fps;
  rec.subject = opts.subject;
  rec.frames.reserve(opts.frames);
  for (std::size_t i = 0; i < opts.frames; ++i) {
    const double t = static_cast<double>(i) / opts.fps;
    SkeletonFrame f;
    f.timestamp = t;

    std::array<Vec3, kJointCount> body{};
    auto at = [&](Joint j) -> Vec3& { return body[static_cast<std::size_t>(j)]; };
    at(Joint::kTorso) = {0.0, 0.0, 0.0};
    at(Joint::kNeck) = {0.0, 0.0, 0.30};
    at(Joint::kHead) = at(Joint::kNeck) + 0.22 * Vec3{0.15 * detail::wave(head, 0, t),
                                                      0.05 + 0.12 * detail::wave(head, 1, t), 1.0};
    at(Joint::kLeftShoulder) = {0.18, 0.0, 0.27};
    at(Joint::kRightShoulder) = {-0.18, 0.0, 0.27};

    const auto [lu, lf] = detail::arm_offsets(left, t);
    at(Joint::kLeftElbow) = at(Joint::kLeftShoulder) + lu;
    at(Joint::kLeftHand) = at(Joint::kLeftElbow) + lf;
    auto [ru, rf] = detail::arm_offsets(right, t);
    ru.x = -ru.x;
    rf.x = -rf.x;
    at(Joint::kRightElbow) = at(Joint::kRightShoulder) + ru;
    at(Joint::kRightHand) = at(Joint::kRightElbow) + rf;

    at(Joint::kLeftHip) = {0.10, 0.0, -0.22};
    at(Joint::kRightHip) = {-0.10, 0.0, -0.22};
    at(Joint::kLeftKnee) = {0.11, 0.02, -0.66};
    at(Joint::kRightKnee) = {-0.11, 0.02, -0.66};
    at(Joint::kLeftFoot) = {0.12, 0.0, -1.08};
    at(Joint::kRightFoot) = {-0.12, 0.0, -1.08};

    for (std::size_t j = 0; j < kJointCount; ++j) {
      const Vec3 jitter{rng.uniform(-0.002, 0.002), rng.uniform(-0.002, 0.002),
                        rng.uniform(-0.002, 0.002)};
      f.joints[j] = subject_origin + from_body(body[j] + jitter);
    }
    rec.frames.push_back(f);
  }
  return rec;
}

/// Glove crop of side `window` with the given green and red pixel counts; the
/// rest is skin colored.
inline RgbImage glove_crop(int window, std::size_t green, std::size_t red) {
  RgbImage img(window, window);
  const std::size_t total = static_cast<std::size_t>(window) * window;
  for (std::size_t k = 0; k < total; ++k) {
    const int x = static_cast<int>(k % window), y = static_cast<int>(k / window);
    if (k < green) {
      img.set(x, y, 30, 190, 40);
    } else if (k < green + red) {
      img.set(x, y, 200, 35, 30);
    } else {
      img.set(x, y, 190, 160, 140);
    }
  }
  return img;
}

struct GloveCrop {
  std::string name;
  RgbImage image;
};

/// Five hand states from palm-up to back-of-hand.
inline std::vector<GloveCrop> glove_crops(int window = 20) {
  const std::size_t area = static_cast<std::size_t>(window) * window;
  return {
      {"palm_up", glove_crop(window, area / 2, 0)},
      {"palm_most", glove_crop(window, area * 2 / 5, area / 10)},
      {"edge_on", glove_crop(window, area / 5, area / 5)},
      {"back_most", glove_crop(window, area / 10, area * 3 / 10)},
      {"back_full", glove_crop(window, 0, area / 2)},
  };
}

/// Writes `recording_path`, a `hands.jsonl` sidecar next to it, and the glove
/// crops under `gloves/`. Returns the sidecar path.
inline std::string write_session(const Options& opts, const std::string& recording_path,
                                 int window = 20) {
  namespace fs = std::filesystem;
  const Recording rec = make_recording(opts);
  const fs::path dir = fs::path(recording_path).parent_path();
  const fs::path glove_dir = dir / "gloves";
  std::error_code ec;
  fs::create_directories(glove_dir, ec);
  if (ec) throw IoError("cannot create '" + glove_dir.string() + "': " + ec.message());
  save_recording(rec, recording_path);
  const auto crops = glove_crops(window);
  for (const auto& c : crops) write_ppm(c.image, (glove_dir / (c.name + ".ppm")).string());

  Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto lp = detail::draw_phases(rng);
  const auto rp = detail::draw_phases(rng);
  auto pick = [&](const detail::ArmPhases& p, double t) {
    const double u = 0.5 * (detail::wave(p, 0, t) + 1.0);
    const auto k = std::min(crops.size() - 1, static_cast<std::size_t>(u * crops.size()));
    return "gloves/" + crops[k].name + ".ppm";
  };

  const std::string sidecar = (dir / "hands.jsonl").string();
  std::ofstream out(sidecar, std::ios::binary);
  if (!out) throw IoError("cannot write '" + sidecar + "'");
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const double t = rec.frames[i].timestamp;
    nlohmann::ordered_json j;
    j["frame"] = i;
    j["left"] = pick(lp, t);
    j["right"] = pick(rp, t);
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + sidecar + "'");
  return sidecar;
}

}  // namespace gestgen::synth
