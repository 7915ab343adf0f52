#pragma once

// Training corpus: windows of 4 consecutive poses ("units of movement"),
// flattened pose-major to 56 values and scaled channel-wise to [-1, 1].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gestgen/binary_io.hpp"
#include "gestgen/error.hpp"
#include "gestgen/robot_pose.hpp"

namespace gestgen {

inline constexpr std::size_t kPosesPerUm = 4;
inline constexpr std::size_t kUmSize = kPosesPerUm * kChannelCount;  // 56

struct UnitOfMovement {
  std::array<double, kUmSize> values{};

  double& at(std::size_t pose, std::size_t channel) { return values[pose * kChannelCount + channel]; }
  double at(std::size_t pose, std::size_t channel) const {
    return values[pose * kChannelCount + channel];
  }

  RobotPose pose(std::size_t p) const {
    RobotPose out;
    std::copy_n(values.begin() + p * kChannelCount, kChannelCount, out.q.begin());
    return out;
  }

  friend bool operator==(const UnitOfMovement&, const UnitOfMovement&) = default;
};

/// Per-channel [lo, hi] bounds mapped onto [-1, 1].
struct NormalizationSpec {
  std::array<JointRange, kChannelCount> bounds{};

  static NormalizationSpec from_limits(const JointLimits& limits) {
    NormalizationSpec n;
    n.bounds = limits.range;
    return n;
  }

  void validate() const {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (!(bounds[c].min < bounds[c].max) || !std::isfinite(bounds[c].min) ||
          !std::isfinite(bounds[c].max)) {
        throw ValidationError("normalization bounds for '" + std::string(kChannelNames[c]) +
                              "' must satisfy lo < hi");
      }
    }
  }
};

struct Corpus {
  std::vector<UnitOfMovement> ums;  // normalized
  NormalizationSpec norm;
  std::vector<std::string> provenance;
};

/// Sliding windows of 4 poses at `stride`; fewer than 4 poses gives none.
inline std::vector<UnitOfMovement> window_poses(std::span<const RobotPose> poses,
                                                std::size_t stride) {
  if (stride == 0) throw ValidationError("window stride must be at least 1");
  std::vector<UnitOfMovement> out;
  if (poses.size() < kPosesPerUm) return out;
  out.reserve((poses.size() - kPosesPerUm) / stride + 1);
  for (std::size_t start = 0; start + kPosesPerUm <= poses.size(); start += stride) {
    UnitOfMovement um;
    for (std::size_t p = 0; p < kPosesPerUm; ++p) {
      std::copy(poses[start + p].q.begin(), poses[start + p].q.end(),
                um.values.begin() + p * kChannelCount);
    }
    out.push_back(um);
  }
  return out;
}

inline UnitOfMovement normalize_um(const UnitOfMovement& um, const NormalizationSpec& norm) {
  UnitOfMovement out;
  for (std::size_t i = 0; i < kUmSize; ++i) {
    const auto& b = norm.bounds[i % kChannelCount];
    const double x = std::clamp(um.values[i], b.min, b.max);
    out.values[i] = std::clamp(2.0 * (x - b.min) / (b.max - b.min) - 1.0, -1.0, 1.0);
  }
  return out;
}

/// Inverse of normalize_um. Inputs are clamped to [-1, 1] and outputs to
/// [lo, hi], so any value decodes to an in-bounds joint.
inline UnitOfMovement denormalize_um(const UnitOfMovement& um, const NormalizationSpec& norm) {
  UnitOfMovement out;
  for (std::size_t i = 0; i < kUmSize; ++i) {
    const auto& b = norm.bounds[i % kChannelCount];
    const double u = std::clamp(um.values[i], -1.0, 1.0);
    const double x = 0.5 * ((1.0 - u) * b.min + (1.0 + u) * b.max);
    out.values[i] = std::clamp(x, b.min, b.max);
  }
  return out;
}

inline bool is_normalized(const UnitOfMovement& um) {
  return std::all_of(um.values.begin(), um.values.end(),
                     [](double v) { return v >= -1.0 && v <= 1.0; });
}

// corpus.bin: {"format":"gestgen-corpus", "version":1, "count":n, "dims":56,
// "channels":[...], "norm":[[lo,hi] x14], "provenance":[...], "values":n*56}
// followed by n*56 little-endian doubles.

inline constexpr int kCorpusVersion = 1;

inline nlohmann::ordered_json norm_to_json(const NormalizationSpec& norm) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& b : norm.bounds) arr.push_back({b.min, b.max});
  return arr;
}

inline NormalizationSpec norm_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_array() || j.size() != kChannelCount) {
    throw ValidationError("normalization spec must list 14 [lo, hi] pairs");
  }
  NormalizationSpec n;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (!j[c].is_array() || j[c].size() != 2 || !j[c][0].is_number() || !j[c][1].is_number()) {
      throw ValidationError("normalization entry " + std::to_string(c) + " must be [lo, hi]");
    }
    n.bounds[c] = {j[c][0].get<double>(), j[c][1].get<double>()};
  }
  n.validate();
  return n;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  nlohmann::ordered_json h;
  h["format"] = "gestgen-corpus";
  h["version"] = kCorpusVersion;
  h["count"] = corpus.ums.size();
  h["dims"] = kUmSize;
  h["channels"] = kChannelNames;
  h["norm"] = norm_to_json(corpus.norm);
  h["provenance"] = corpus.provenance;
  h["values"] = corpus.ums.size() * kUmSize;
  std::vector<double> flat;
  flat.reserve(corpus.ums.size() * kUmSize);
  for (const auto& um : corpus.ums) flat.insert(flat.end(), um.values.begin(), um.values.end());
  write_headered_payload(path, h, flat);
}

inline Corpus load_corpus(const std::string& path) {
  const auto data = read_headered_payload(path, "gestgen-corpus", "values");
  const auto& h = data.header;
  if (h.value("version", 0) != kCorpusVersion) {
    throw ValidationError("'" + path + "': unsupported corpus version");
  }
  if (h.value("dims", std::size_t{0}) != kUmSize) {
    throw ValidationError("'" + path + "': expected 56 values per unit of movement");
  }
  const auto count = h.value("count", std::size_t{0});
  if (count * kUmSize != data.values.size()) {
    throw ValidationError("'" + path + "': count does not match payload size");
  }
  Corpus corpus;
  corpus.norm = norm_from_json(h.at("norm"));
  if (h.contains("provenance")) {
    corpus.provenance = h["provenance"].get<std::vector<std::string>>();
  }
  corpus.ums.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::copy_n(data.values.begin() + i * kUmSize, kUmSize, corpus.ums[i].values.begin());
    if (!is_normalized(corpus.ums[i])) {
      throw ValidationError("'" + path + "': unit of movement " + std::to_string(i) +
                            " lies outside [-1, 1]");
    }
  }
  return corpus;
}

/// Named pose sequence feeding a corpus build.
struct PoseSource {
  std::string id;
  std::vector<RobotPose> poses;
};

/// Windows every source (ordered by id) and normalizes the result.
inline Corpus build_corpus(std::vector<PoseSource> sources, const NormalizationSpec& norm,
                           std::size_t stride) {
  norm.validate();
  std::stable_sort(sources.begin(), sources.end(),
                   [](const PoseSource& a, const PoseSource& b) { return a.id < b.id; });
  Corpus corpus;
  corpus.norm = norm;
  for (const auto& src : sources) {
    for (const auto& um : window_poses(src.poses, stride)) {
      corpus.ums.push_back(normalize_um(um, norm));
    }
    corpus.provenance.push_back(src.id);
  }
  return corpus;
}

/// Moves the trailing `fraction` of units into a second corpus.
inline Corpus split_holdout(Corpus& corpus, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ValidationError("holdout fraction must lie in [0, 1)");
  }
  const auto n = static_cast<std::size_t>(std::floor(fraction * corpus.ums.size()));
  Corpus held;
  held.norm = corpus.norm;
  held.provenance = corpus.provenance;
  held.ums.assign(corpus.ums.end() - static_cast<std::ptrdiff_t>(n), corpus.ums.end());
  corpus.ums.resize(corpus.ums.size() - n);
  return held;
}

}  // namespace gestgen
