#pragma once

// Test-only helpers: scratch directories, random skeleton frames, and
// geometric oracles written directly in capture coordinates. The oracles
// share no code with the library's kinematics: no body-frame transform, no
// normalization, angles from atan2 instead of acos/asin.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gestgen/gestgen.hpp"

namespace gestgen::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "gestgen") {
    std::random_device rd;
    const auto base = fs::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = base / (tag + "_" + std::to_string(rd()));
      if (fs::create_directory(candidate)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create a scratch directory");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Frame with every joint jittered by up to ±spread metres (capture space)
/// around a standing subject facing the sensor.
inline SkeletonFrame random_frame(Rng& rng, double spread = 0.3) {
  // Nominal positions: x toward the subject's left, y up, z away.
  static const std::array<Vec3, kJointCount> nominal = {{
      {0.0, 0.65, 2.0},    // head
      {0.0, 0.40, 2.0},    // neck
      {0.0, 0.10, 2.0},    // torso
      {0.18, 0.37, 2.0},   // left shoulder
      {0.25, 0.10, 1.9},   // left elbow
      {0.25, 0.20, 1.7},   // left hand
      {-0.18, 0.37, 2.0},  // right shoulder
      {-0.25, 0.10, 1.9},  // right elbow
      {-0.25, 0.20, 1.7},  // right hand
      {0.10, -0.12, 2.0},  {0.11, -0.56, 2.0}, {0.12, -0.98, 2.0},
      {-0.10, -0.12, 2.0}, {-0.11, -0.56, 2.0}, {-0.12, -0.98, 2.0},
  }};
  SkeletonFrame f;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    f.joints[j] = nominal[j] + Vec3{rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                                    rng.uniform(-spread, spread)};
  }
  // Head stays above the neck so the head angles are defined.
  f[Joint::kHead].y = f[Joint::kNeck].y + 0.05 + rng.uniform(0.0, 0.3);
  return f;
}

/// Swaps left and right joints and negates x: the sagittal mirror image.
inline SkeletonFrame mirror_frame(const SkeletonFrame& f) {
  SkeletonFrame m = f;
  auto swap_pair = [&](Joint a, Joint b) { std::swap(m[a], m[b]); };
  swap_pair(Joint::kLeftShoulder, Joint::kRightShoulder);
  swap_pair(Joint::kLeftElbow, Joint::kRightElbow);
  swap_pair(Joint::kLeftHand, Joint::kRightHand);
  swap_pair(Joint::kLeftHip, Joint::kRightHip);
  swap_pair(Joint::kLeftKnee, Joint::kRightKnee);
  swap_pair(Joint::kLeftFoot, Joint::kRightFoot);
  for (auto& j : m.joints) j.x = -j.x;
  return m;
}

/// T-pose: arms straight out to the sides, elbows bent forward by 90°.
inline SkeletonFrame t_pose() {
  SkeletonFrame f;
  f[Joint::kTorso] = {0.0, 0.1, 2.0};
  f[Joint::kNeck] = {0.0, 0.4, 2.0};
  f[Joint::kHead] = {0.0, 0.65, 2.0};
  f[Joint::kLeftShoulder] = {0.18, 0.37, 2.0};
  f[Joint::kLeftElbow] = {0.46, 0.37, 2.0};
  f[Joint::kLeftHand] = {0.46, 0.37, 1.75};
  f[Joint::kRightShoulder] = {-0.18, 0.37, 2.0};
  f[Joint::kRightElbow] = {-0.46, 0.37, 2.0};
  f[Joint::kRightHand] = {-0.46, 0.37, 1.75};
  f[Joint::kLeftHip] = {0.1, -0.12, 2.0};
  f[Joint::kRightHip] = {-0.1, -0.12, 2.0};
  f[Joint::kLeftKnee] = {0.11, -0.56, 2.0};
  f[Joint::kRightKnee] = {-0.11, -0.56, 2.0};
  f[Joint::kLeftFoot] = {0.12, -0.98, 2.0};
  f[Joint::kRightFoot] = {-0.12, -0.98, 2.0};
  return f;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_param = 0;
};

/// Central-difference check of backward() for L = Σ c_ro·y_ro with random
/// coefficients c. Batches are redrawn until every ReLU-family
/// pre-activation sits at least `kink_margin` from its kink, so a step of h
/// never crosses one. Relative error uses max(|a|, |n|, floor) as the
/// denominator; the floor absorbs round-off on near-zero gradients.
inline GradCheckResult finite_difference_check(nn::MlpNetwork<double> net, std::size_t rows,
                                               Rng& rng, double h = 1e-5,
                                               double floor = 1e-6,
                                               double kink_margin = 1e-3) {
  using nn::Activation;
  nn::Matrix<double> x(rows, net.input_dim());
  nn::ForwardResult<double> fwd;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) throw std::runtime_error("no batch clear of activation kinks");
    for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);
    fwd = nn::forward(net, x);
    bool clear = true;
    for (std::size_t l = 0; l < net.layers().size() && clear; ++l) {
      const auto a = net.layers()[l].activation;
      if (a != Activation::kRelu && a != Activation::kLeakyRelu) continue;
      for (double z : fwd.tape.pre[l].data()) {
        if (std::abs(z) < kink_margin) {
          clear = false;
          break;
        }
      }
    }
    if (clear) break;
  }

  nn::Matrix<double> c(rows, net.output_dim());
  for (auto& v : c.data()) v = rng.uniform(-1.0, 1.0);
  auto loss = [&](const nn::MlpNetwork<double>& n) {
    const auto y = nn::predict(n, x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.data().size(); ++i) s += c.data()[i] * y.data()[i];
    return s;
  };
  const auto grads = nn::backward(net, fwd.tape, c);

  GradCheckResult res;
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = loss(net);
    params[i] = keep - h;
    const double down = loss(net);
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = grads.params[i];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), floor});
    const double rel = std::abs(numeric - analytic) / denom;
    if (rel > res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst_param = i;
    }
    ++res.checked;
  }
  return res;
}

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

struct V {
  double x, y, z;
};

inline V sub(const Vec3& to, const Vec3& from) {
  return {to.x - from.x, to.y - from.y, to.z - from.z};
}

/// Unsigned angle in [0, π] via atan2(|a×b|, a·b).
inline double angle_between(V a, V b) {
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a.x * b.x + a.y * b.y + a.z * b.z);
}

/// Endpoint-matching affine maps for the elbow-yaw range conversion, written
/// as interpolation between the stated interval endpoints.
inline double range_conv(double t) {
  if (t >= kPi / 2) {
    const double s = (t - kPi / 2) / (kPi / 2);  // 0 at π/2, 1 at π
    return -kPi / 2 + s * (0.0 - (-kPi / 2));
  }
  if (t <= -kPi / 2) {
    const double s = (t - (-kPi)) / (kPi / 2);  // 0 at -π, 1 at -π/2
    return 0.0 + s * (kPi - 0.0);
  }
  return t;
}

struct ArmJoints {
  Joint shoulder, elbow, hand, other_shoulder;
  double sign;
};

inline ArmJoints arm(Side s) {
  if (s == Side::kLeft) {
    return {Joint::kLeftShoulder, Joint::kLeftElbow, Joint::kLeftHand, Joint::kRightShoulder, 1.0};
  }
  return {Joint::kRightShoulder, Joint::kRightElbow, Joint::kRightHand, Joint::kLeftShoulder, -1.0};
}

inline double shoulder_roll(const SkeletonFrame& f, Side s) {
  const auto a = arm(s);
  return a.sign * (angle_between(sub(f[a.other_shoulder], f[a.shoulder]),
                                 sub(f[a.elbow], f[a.shoulder])) -
                   kPi / 2);
}

inline double elbow_roll(const SkeletonFrame& f, Side s) {
  const auto a = arm(s);
  return a.sign *
         (angle_between(sub(f[a.elbow], f[a.shoulder]), sub(f[a.hand], f[a.elbow])) - kPi);
}

/// Forearm direction angle in the sagittal plane: forward is toward the
/// sensor (-z in capture space), up is +y.
inline double elbow_yaw_angle(const SkeletonFrame& f, Side s) {
  const auto a = arm(s);
  const V v = sub(f[a.hand], f[a.elbow]);
  return std::atan2(v.y, -v.z);
}

inline double elbow_yaw(const SkeletonFrame& f, Side s) {
  return arm(s).sign * range_conv(elbow_yaw_angle(f, s));
}

/// Elevation of the upper arm above the horizontal plane.
inline double shoulder_pitch(const SkeletonFrame& f, Side s) {
  const auto a = arm(s);
  const V v = sub(f[a.elbow], f[a.shoulder]);
  return std::atan2(v.y, std::hypot(v.x, v.z));
}

/// Lateral lean of the head over the neck.
inline double human_head_yaw(const SkeletonFrame& f) {
  const V v = sub(f[Joint::kHead], f[Joint::kNeck]);
  return std::atan2(v.x, v.y);  // v.y > 0 for frames the oracle accepts
}

/// Forward lean (toward the sensor) of the head over the neck.
inline double human_head_pitch(const SkeletonFrame& f) {
  const V v = sub(f[Joint::kHead], f[Joint::kNeck]);
  return std::atan2(-v.z, v.y);
}

inline double clamp_to(const JointLimits& lim, Channel c, double v) {
  return std::min(std::max(v, lim[c].min), lim[c].max);
}

inline double head_yaw(const SkeletonFrame& f, const JointLimits& lim) {
  return clamp_to(lim, Channel::kHeadYaw, lim.k1 * human_head_yaw(f));
}

inline double head_pitch(const SkeletonFrame& f, const JointLimits& lim, double offset = 0.0) {
  const double yaw = oracle::head_yaw(f, lim);
  return clamp_to(lim, Channel::kHeadPitch, human_head_pitch(f) - offset + std::abs(lim.k2 * yaw));
}

/// True when every oracle quantity is well conditioned: segment angles away
/// from 0 and π, the elbow-yaw angle away from the ±π/2 seams, the head
/// above the neck.
inline bool well_conditioned(const SkeletonFrame& f) {
  for (Side s : {Side::kLeft, Side::kRight}) {
    const auto a = arm(s);
    const double roll = angle_between(sub(f[a.other_shoulder], f[a.shoulder]),
                                      sub(f[a.elbow], f[a.shoulder]));
    const double bend = angle_between(sub(f[a.elbow], f[a.shoulder]), sub(f[a.hand], f[a.elbow]));
    if (std::sin(roll) < 1e-3 || std::sin(bend) < 1e-3) return false;
    const V fore = sub(f[a.hand], f[a.elbow]);
    if (std::hypot(fore.y, fore.z) < 1e-3) return false;
    const double yaw = elbow_yaw_angle(f, s);
    if (std::abs(std::abs(yaw) - kPi / 2) < 1e-6) return false;
  }
  const V hn = sub(f[Joint::kHead], f[Joint::kNeck]);
  return hn.y > 1e-3;
}

}  // namespace oracle

}  // namespace gestgen::testing
