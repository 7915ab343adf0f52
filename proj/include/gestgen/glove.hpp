#pragma once

// Colored-glove hand state: green palm, red back. The share of glove pixels
// in a hand crop drives the robot wrist yaw, and an all-green crop marks a
// palm-up hand.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gestgen/error.hpp"

namespace gestgen {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB triples

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(std::size_t(w) * h * 3, 0) {
    if (w < 0 || h < 0) throw ValidationError("image dimensions must be non-negative");
  }

  bool empty() const { return width == 0 || height == 0; }

  std::uint8_t* at(int x, int y) { return &pixels[(std::size_t(y) * width + x) * 3]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(std::size_t(y) * width + x) * 3];
  }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto* p = at(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  bool valid() const {
    return width >= 0 && height >= 0 &&
           pixels.size() == std::size_t(width) * std::size_t(height) * 3;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct PixelCoord {
  int x = 0;
  int y = 0;
};

enum class GloveSide { kPalm, kBack };

struct GloveReading {
  std::size_t palm_pixels = 0;
  std::size_t back_pixels = 0;
  std::size_t max = 0;
  GloveSide dominant = GloveSide::kPalm;
  bool palm_only = false;

  friend bool operator==(const GloveReading&, const GloveReading&) = default;
};

/// Builds a reading from raw counts, filling the derived fields.
inline GloveReading make_glove_reading(std::size_t palm, std::size_t back) {
  GloveReading r;
  r.palm_pixels = palm;
  r.back_pixels = back;
  r.dominant = palm >= back ? GloveSide::kPalm : GloveSide::kBack;
  r.max = std::max(palm, back);
  r.palm_only = back == 0 && palm > 0;
  return r;
}

/// Minimum 8-bit lead of the dominant channel over the other two.
inline constexpr int kChromaMargin = 40;

inline bool is_glove_green(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return g >= r + kChromaMargin && g >= b + kChromaMargin;
}

inline bool is_glove_red(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return r >= g + kChromaMargin && r >= b + kChromaMargin;
}

/// Square crop of side `window` centred on `hand`, clipped to the image.
inline RgbImage extract_hand_subimage(const RgbImage& image, PixelCoord hand, int window) {
  if (window <= 0) throw ValidationError("hand window must be positive");
  if (hand.x < 0 || hand.y < 0 || hand.x >= image.width || hand.y >= image.height) {
    throw ValidationError("hand pixel (" + std::to_string(hand.x) + "," +
                          std::to_string(hand.y) + ") lies outside the " +
                          std::to_string(image.width) + "x" + std::to_string(image.height) +
                          " image");
  }
  const int x0 = std::max(0, hand.x - window / 2);
  const int y0 = std::max(0, hand.y - window / 2);
  const int x1 = std::min(image.width, hand.x - window / 2 + window);
  const int y1 = std::min(image.height, hand.y - window / 2 + window);

  RgbImage out(x1 - x0, y1 - y0);
  const std::size_t row_bytes = std::size_t(out.width) * 3;
  for (int y = y0; y < y1; ++y) {
    std::copy_n(image.at(x0, y), row_bytes, out.at(0, y - y0));
  }
  return out;
}

inline GloveReading classify_glove_pixels(const RgbImage& sub) {
  if (!sub.valid()) throw ValidationError("image buffer does not match its dimensions");
  if (sub.empty()) throw ValidationError("cannot classify an empty hand subimage");
  std::size_t palm = 0;
  std::size_t back = 0;
  for (std::size_t i = 0; i < sub.pixels.size(); i += 3) {
    const auto r = sub.pixels[i], g = sub.pixels[i + 1], b = sub.pixels[i + 2];
    if (is_glove_green(r, g, b)) {
      ++palm;
    } else if (is_glove_red(r, g, b)) {
      ++back;
    }
  }
  return make_glove_reading(palm, back);
}

/// Wrist yaw from a glove reading. Palm-dominant readings give
/// (max/N)·max_wrist_yaw in [0, max_wrist_yaw]; back-dominant readings give
/// ((max-N)/N)·max_wrist_yaw in [-max_wrist_yaw, 0]. `max` is clamped to N.
inline double wrist_yaw_from_reading(const GloveReading& r, double normalizer,
                                     double max_wrist_yaw) {
  if (!(normalizer > 0.0)) {
    throw ConfigError("glove normalizing pixel count N must be positive");
  }
  const double m = std::min(static_cast<double>(r.max), normalizer);
  if (r.dominant == GloveSide::kPalm) return m / normalizer * max_wrist_yaw;
  return (m - normalizer) / normalizer * max_wrist_yaw;
}

/// Default N for a given crop side: half the crop area.
inline double default_glove_normalizer(int window) {
  return static_cast<double>(window) * window * 0.5;
}

// PPM (P6, maxval 255) I/O for offline hand crops.

inline RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path + "'");

  auto next_token = [&]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };

  if (next_token() != "P6") throw ValidationError("'" + path + "' is not a binary PPM (P6)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw ValidationError("'" + path + "': malformed PPM header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) {
    throw ValidationError("'" + path + "': unsupported PPM dimensions or maxval");
  }
  RgbImage img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw ValidationError("'" + path + "': truncated pixel data");
  }
  return img;
}

inline void write_ppm(const RgbImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image '" + path + "'");
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Per-frame hand crops from a `hands.jsonl` sidecar:
/// `{"frame": <index>, "left": "<ppm>", "right": "<ppm>"}` per line.
/// Relative paths resolve against the sidecar's directory.
struct HandCropPaths {
  std::string left;
  std::string right;
};

inline std::map<std::size_t, HandCropPaths> load_hands_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hands sidecar '" + path + "'");
  const auto slash = path.find_last_of('/');
  const std::string dir = slash == std::string::npos ? "" : path.substr(0, slash + 1);
  auto resolve = [&](const std::string& p) { return (p.empty() || p[0] == '/') ? p : dir + p; };

  std::map<std::size_t, HandCropPaths> out;
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
    if (!j.is_object() || !j.contains("frame") || !j["frame"].is_number_unsigned() ||
        !j.contains("left") || !j["left"].is_string() || !j.contains("right") ||
        !j["right"].is_string()) {
      throw ParseError(line, "expected {\"frame\": n, \"left\": path, \"right\": path}");
    }
    out[j["frame"].get<std::size_t>()] = {resolve(j["left"].get<std::string>()),
                                          resolve(j["right"].get<std::string>())};
  }
  return out;
}

}  // namespace gestgen
