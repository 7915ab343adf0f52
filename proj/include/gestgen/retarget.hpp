#pragma once

// Direct-kinematics retargeting of a captured skeleton onto the robot's
// head and arm joints.
//
// Angles are computed in a body frame obtained from capture space by a
// quarter turn about x: x toward the subject's left, y toward the subject's
// front, z up. Left-arm formulas are primary; the right arm uses the same
// formulas with roll and yaw signs mirrored.

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "gestgen/glove.hpp"
#include "gestgen/random.hpp"
#include "gestgen/robot_pose.hpp"
#include "gestgen/skeleton.hpp"

namespace gestgen {

namespace kinematics {

inline constexpr double kPi = std::numbers::pi;

/// Capture space (x left, y up, z away from sensor) to body frame
/// (x left, y forward, z up).
inline Vec3 to_body(Vec3 c) { return {c.x, -c.z, c.y}; }
inline Vec3 from_body(Vec3 b) { return {b.x, b.z, -b.y}; }

/// Rotation of v by -π/2 about the body x axis: up becomes forward.
inline Vec3 rotate_minus_quarter_x(Vec3 v) { return {v.x, v.z, -v.y}; }

/// Piecewise elbow-yaw range conversion:
///   [π/2, π]   -> [-π/2, 0]  (θ - π)
///   [-π, -π/2] -> [0, π]     (2(θ + π))
///   (-π/2, π/2) unchanged.
inline double range_conv(double theta) {
  theta = std::clamp(theta, -kPi, kPi);
  if (theta >= kPi / 2) return theta - kPi;
  if (theta <= -kPi / 2) return 2.0 * (theta + kPi);
  return theta;
}

inline double mirror(Side side, double angle) { return side == Side::kLeft ? angle : -angle; }

inline Joint shoulder(Side s) { return s == Side::kLeft ? Joint::kLeftShoulder : Joint::kRightShoulder; }
inline Joint elbow(Side s) { return s == Side::kLeft ? Joint::kLeftElbow : Joint::kRightElbow; }
inline Joint hand(Side s) { return s == Side::kLeft ? Joint::kLeftHand : Joint::kRightHand; }
inline Side other(Side s) { return s == Side::kLeft ? Side::kRight : Side::kLeft; }

inline double safe_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }
inline double safe_asin(double s) { return std::asin(std::clamp(s, -1.0, 1.0)); }

/// Shoulder → other shoulder, body frame.
inline Vec3 across_shoulders(const SkeletonFrame& f, Side s) {
  return to_body(vector_between(f, shoulder(s), shoulder(other(s))));
}
inline Vec3 upper_arm(const SkeletonFrame& f, Side s) {
  return to_body(vector_between(f, shoulder(s), elbow(s)));
}
inline Vec3 forearm(const SkeletonFrame& f, Side s) {
  return to_body(vector_between(f, elbow(s), hand(s)));
}
inline Vec3 neck_to_head(const SkeletonFrame& f) {
  return to_body(vector_between(f, Joint::kNeck, Joint::kHead));
}

// Unclamped joint angles. Each throws DegenerateGeometry when a vector it
// needs has no direction.

inline double shoulder_roll_raw(const SkeletonFrame& f, Side s) {
  const double c = dot(normalize(across_shoulders(f, s)), normalize(upper_arm(f, s)));
  return mirror(s, safe_acos(c) - kPi / 2);
}

inline double elbow_roll_raw(const SkeletonFrame& f, Side s) {
  const double c = dot(normalize(upper_arm(f, s)), normalize(forearm(f, s)));
  return mirror(s, safe_acos(c) - kPi);
}

inline double elbow_yaw_raw(const SkeletonFrame& f, Side s) {
  const Vec3 n = normalize(forearm(f, s));
  if (std::hypot(n.y, n.z) <= kDegenerateNorm) {
    throw DegenerateGeometry("forearm has no component in the sagittal plane");
  }
  return mirror(s, range_conv(std::atan2(n.z, n.y)));
}

inline double shoulder_pitch_raw(const SkeletonFrame& f, Side s) {
  return safe_asin(normalize(upper_arm(f, s)).z);
}

namespace detail {

/// Neck→head offset after the -π/2 rotation, checked for a usable forward
/// component.
inline Vec3 rotated_head_offset(const SkeletonFrame& f) {
  const Vec3 v = neck_to_head(f);
  const Vec3 r = rotate_minus_quarter_x(normalize(v));
  if (std::abs(r.y) <= kDegenerateNorm) {
    throw DegenerateGeometry("head is level with the neck");
  }
  return r;
}

}  // namespace detail

/// Human head yaw: lateral head-over-neck angle of the rotated offset.
inline double human_head_yaw(const SkeletonFrame& f) {
  const Vec3 r = detail::rotated_head_offset(f);
  return std::atan(r.x / r.y);
}

/// Human head pitch: depression angle of the rotated offset, positive when
/// the head leans forward.
inline double human_head_pitch(const SkeletonFrame& f) {
  const Vec3 r = detail::rotated_head_offset(f);
  return std::atan(-r.z / r.y);
}

}  // namespace kinematics

// Clamped per-joint operations.

inline double shoulder_roll(const SkeletonFrame& f, Side s, const JointLimits& lim) {
  return lim.clamp(arm_channel(s, ArmJoint::kShoulderRoll), kinematics::shoulder_roll_raw(f, s));
}

inline double elbow_roll(const SkeletonFrame& f, Side s, const JointLimits& lim) {
  return lim.clamp(arm_channel(s, ArmJoint::kElbowRoll), kinematics::elbow_roll_raw(f, s));
}

inline double elbow_yaw(const SkeletonFrame& f, Side s, const JointLimits& lim) {
  return lim.clamp(arm_channel(s, ArmJoint::kElbowYaw), kinematics::elbow_yaw_raw(f, s));
}

inline double shoulder_pitch(const SkeletonFrame& f, Side s, const JointLimits& lim) {
  return lim.clamp(arm_channel(s, ArmJoint::kShoulderPitch),
                   kinematics::shoulder_pitch_raw(f, s));
}

/// K1 times the human head yaw, clamped.
inline double head_yaw(const SkeletonFrame& f, const JointLimits& lim) {
  return lim.clamp(Channel::kHeadYaw, lim.k1 * kinematics::human_head_yaw(f));
}

/// Head pitch relative to the calibrated rest offset, plus |K2·yaw| where
/// yaw is the robot head yaw already commanded for this frame.
inline double head_pitch(const SkeletonFrame& f, const JointLimits& lim, double robot_head_yaw,
                         double pitch_offset = 0.0) {
  const double pitch = kinematics::human_head_pitch(f) - pitch_offset;
  return lim.clamp(Channel::kHeadPitch, pitch + std::abs(lim.k2 * robot_head_yaw));
}

inline double head_pitch(const SkeletonFrame& f, const JointLimits& lim) {
  return head_pitch(f, lim, head_yaw(f, lim));
}

/// Zero-pitch offset: mean human head pitch over the first `count` frames
/// whose head geometry is usable. Returns 0 when none are.
inline double calibrate_head_pitch(std::span<const SkeletonFrame> frames, std::size_t count = 10) {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < frames.size() && i < count; ++i) {
    try {
      sum += kinematics::human_head_pitch(frames[i]);
      ++used;
    } catch (const DegenerateGeometry&) {
    }
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

struct RetargetedFrame {
  RobotPose pose;
  std::bitset<kChannelCount> held;  // channels that fell back to the previous/rest value
};

/// Full 14-channel retarget of one frame. Channels whose geometry is
/// degenerate keep the value from `prev` (or the rest pose). Hand opening is
/// drawn uniformly from [0, 1), left then right, so every call consumes
/// exactly two draws.
inline RetargetedFrame retarget_frame_detailed(const SkeletonFrame& frame,
                                               const GloveReading& left_glove,
                                               const GloveReading& right_glove,
                                               const RetargetConfig& cfg,
                                               const std::optional<RobotPose>& prev, Rng& rng,
                                               double pitch_offset = 0.0) {
  const JointLimits& lim = cfg.limits;
  const RobotPose fallback = prev ? *prev : rest_pose(lim);
  RetargetedFrame out;
  RobotPose& pose = out.pose;

  auto solve = [&](Channel c, auto&& compute) {
    try {
      pose[c] = compute();
    } catch (const DegenerateGeometry&) {
      pose[c] = fallback[c];
      out.held.set(index(c));
    }
  };

  solve(Channel::kHeadYaw, [&] { return head_yaw(frame, lim); });
  solve(Channel::kHeadPitch,
        [&] { return head_pitch(frame, lim, pose[Channel::kHeadYaw], pitch_offset); });

  for (Side s : {Side::kLeft, Side::kRight}) {
    solve(arm_channel(s, ArmJoint::kShoulderPitch), [&] { return shoulder_pitch(frame, s, lim); });
    solve(arm_channel(s, ArmJoint::kShoulderRoll), [&] { return shoulder_roll(frame, s, lim); });
    solve(arm_channel(s, ArmJoint::kElbowRoll), [&] { return elbow_roll(frame, s, lim); });

    const GloveReading& glove = s == Side::kLeft ? left_glove : right_glove;
    if (glove.palm_only) {
      pose.arm(s, ArmJoint::kElbowYaw) = kinematics::mirror(s, cfg.palm_up_elbow_yaw);
    } else {
      solve(arm_channel(s, ArmJoint::kElbowYaw), [&] { return elbow_yaw(frame, s, lim); });
    }
    pose.arm(s, ArmJoint::kWristYaw) = kinematics::mirror(
        s, wrist_yaw_from_reading(glove, cfg.glove_normalizer, lim.max_wrist_yaw));
  }
  pose.arm(Side::kLeft, ArmJoint::kHandOpen) = rng.uniform01();
  pose.arm(Side::kRight, ArmJoint::kHandOpen) = rng.uniform01();

  for (std::size_t i = 0; i < kChannelCount; ++i) {
    pose.q[i] = std::clamp(pose.q[i], lim.range[i].min, lim.range[i].max);
  }
  return out;
}

inline RobotPose retarget_frame(const SkeletonFrame& frame, const GloveReading& left_glove,
                                const GloveReading& right_glove, const RetargetConfig& cfg,
                                const std::optional<RobotPose>& prev, Rng& rng,
                                double pitch_offset = 0.0) {
  return retarget_frame_detailed(frame, left_glove, right_glove, cfg, prev, rng, pitch_offset)
      .pose;
}

struct GlovePair {
  GloveReading left;
  GloveReading right;
};

struct RetargetRun {
  std::vector<TimedPose> poses;
  std::size_t holds = 0;  // total held channels over the run
  double pitch_offset = 0.0;
};

/// Sequential retarget of a whole recording. `gloves` maps frame index to
/// readings; frames without an entry use an empty (neutral) reading.
inline RetargetRun retarget_recording(const Recording& rec,
                                      const std::map<std::size_t, GlovePair>& gloves,
                                      const RetargetConfig& cfg) {
  cfg.validate();
  RetargetRun run;
  run.pitch_offset = calibrate_head_pitch(rec.frames, cfg.calibration_frames);
  Rng rng(cfg.seed);
  std::optional<RobotPose> prev;
  const GlovePair neutral{};
  run.poses.reserve(rec.frames.size());
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const auto it = gloves.find(i);
    const GlovePair& g = it == gloves.end() ? neutral : it->second;
    const auto r = retarget_frame_detailed(rec.frames[i], g.left, g.right, cfg, prev, rng,
                                           run.pitch_offset);
    run.holds += r.held.count();
    run.poses.push_back({rec.frames[i].timestamp, r.pose});
    prev = r.pose;
  }
  return run;
}

/// Loads a hands sidecar and classifies every referenced crop.
inline std::map<std::size_t, GlovePair> load_glove_readings(const std::string& sidecar_path) {
  std::map<std::size_t, GlovePair> out;
  std::map<std::string, GloveReading> cache;
  auto classify = [&](const std::string& path) {
    auto it = cache.find(path);
    if (it == cache.end()) it = cache.emplace(path, classify_glove_pixels(read_ppm(path))).first;
    return it->second;
  };
  for (const auto& [frame, paths] : load_hands_sidecar(sidecar_path)) {
    out[frame] = {classify(paths.left), classify(paths.right)};
  }
  return out;
}

}  // namespace gestgen
