#pragma once

// Gesture sequences: units of movement played back to back, optionally with
// linear blend frames across each seam.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gestgen/dataset.hpp"
#include "gestgen/error.hpp"
#include "gestgen/robot_pose.hpp"

namespace gestgen {

inline constexpr double kDefaultFramePeriod = 0.25;
inline constexpr std::size_t kDefaultBlendFrames = 2;

struct GestureSequence {
  std::vector<RobotPose> poses;
  double frame_period = kDefaultFramePeriod;

  double duration() const { return static_cast<double>(poses.size()) * frame_period; }

  friend bool operator==(const GestureSequence&, const GestureSequence&) = default;
};

/// Units of movement needed to cover `duration` seconds: ⌈duration / (4·period)⌉.
inline std::size_t ums_needed(double duration, double frame_period) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw ValidationError("duration must be a finite value >= 0");
  }
  if (!(frame_period > 0.0) || !std::isfinite(frame_period)) {
    throw ValidationError("frame period must be positive");
  }
  return static_cast<std::size_t>(
      std::ceil(duration / (static_cast<double>(kPosesPerUm) * frame_period)));
}

/// Value a fraction t of the way from a to b, kept inside [min(a,b), max(a,b)].
inline double lerp_bounded(double a, double b, double t) {
  const double v = (1.0 - t) * a + t * b;
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

/// Concatenates the UMs' poses, inserting `blend` interpolated frames between
/// the last pose of each UM and the first pose of the next. Length is
/// 4n + blend·(n-1).
inline GestureSequence assemble(const std::vector<UnitOfMovement>& ums, double frame_period,
                                std::size_t blend) {
  if (ums.empty()) throw ValidationError("cannot assemble an empty list of units of movement");
  if (!(frame_period > 0.0)) throw ValidationError("frame period must be positive");
  GestureSequence seq;
  seq.frame_period = frame_period;
  seq.poses.reserve(kPosesPerUm * ums.size() + blend * (ums.size() - 1));
  for (std::size_t u = 0; u < ums.size(); ++u) {
    if (u > 0) {
      const RobotPose a = ums[u - 1].pose(kPosesPerUm - 1);
      const RobotPose b = ums[u].pose(0);
      for (std::size_t k = 1; k <= blend; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(blend + 1);
        RobotPose p;
        for (std::size_t c = 0; c < kChannelCount; ++c) p.q[c] = lerp_bounded(a.q[c], b.q[c], t);
        seq.poses.push_back(p);
      }
    }
    for (std::size_t p = 0; p < kPosesPerUm; ++p) seq.poses.push_back(ums[u].pose(p));
  }
  return seq;
}

/// Writes the sequence as a pose stream with t = i·frame_period.
inline void export_sequence(const GestureSequence& seq, const std::string& path) {
  std::vector<TimedPose> timed(seq.poses.size());
  for (std::size_t i = 0; i < seq.poses.size(); ++i) {
    timed[i] = {static_cast<double>(i) * seq.frame_period, seq.poses[i]};
  }
  save_pose_stream(path, timed, seq.frame_period);
}

inline GestureSequence load_sequence(const std::string& path) {
  auto stream = load_pose_stream(path);
  GestureSequence seq;
  if (stream.frame_period) {
    seq.frame_period = *stream.frame_period;
  } else if (stream.poses.size() >= 2) {
    seq.frame_period = stream.poses[1].t - stream.poses[0].t;
  }
  seq.poses.reserve(stream.poses.size());
  for (const auto& tp : stream.poses) seq.poses.push_back(tp.pose);
  return seq;
}

/// Largest absolute change of any channel between consecutive frames.
inline double max_frame_jump(const GestureSequence& seq) {
  double worst = 0.0;
  for (std::size_t i = 1; i < seq.poses.size(); ++i) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      worst = std::max(worst, std::abs(seq.poses[i].q[c] - seq.poses[i - 1].q[c]));
    }
  }
  return worst;
}

/// One text row per frame: time, then a gauge character per channel showing
/// where the value sits within its limits (' ' at min through '@' at max).
inline void print_timeline(const GestureSequence& seq, const JointLimits& limits,
                           std::ostream& out, bool realtime = false) {
  static constexpr char kRamp[] = " .:-=+*#%@";
  constexpr std::size_t kLevels = sizeof(kRamp) - 2;
  out << "   t(s)  hy hp | lsp lsr ley ler lwy lho | rsp rsr rey rer rwy rho\n";
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < seq.poses.size(); ++i) {
    if (realtime) {
      std::this_thread::sleep_until(
          start + std::chrono::duration<double>(static_cast<double>(i) * seq.frame_period));
    }
    char tbuf[16];
    std::snprintf(tbuf, sizeof tbuf, "%7.2f", static_cast<double>(i) * seq.frame_period);
    out << tbuf << ' ';
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const auto& r = limits.range[c];
      const double f = std::clamp((seq.poses[i].q[c] - r.min) / (r.max - r.min), 0.0, 1.0);
      const char g = kRamp[static_cast<std::size_t>(std::lround(f * kLevels))];
      if (c == 2 || c == 8) out << " |";
      out << (c < 2 ? "  " : "   ") << g;
    }
    out << '\n';
    if (realtime) out.flush();
  }
}

}  // namespace gestgen
