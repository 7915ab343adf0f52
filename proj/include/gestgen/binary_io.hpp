#pragma once

// Container used by corpus and model files: one line of JSON header, a
// newline, then a payload of little-endian IEEE-754 doubles.

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gestgen/error.hpp"

namespace gestgen {

struct HeaderedPayload {
  nlohmann::ordered_json header;
  std::vector<double> values;
};

inline void write_headered_payload(const std::string& path, const nlohmann::ordered_json& header,
                                   std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << header.dump() << '\n';
  std::vector<char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Reads the header, then exactly `header[count_key]` doubles.
inline HeaderedPayload read_headered_payload(const std::string& path, const std::string& format,
                                             const std::string& count_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path + "': missing header");

  HeaderedPayload out;
  try {
    out.header = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path + "': invalid header: " + e.what());
  }
  if (!out.header.is_object() || out.header.value("format", "") != format) {
    throw ValidationError("'" + path + "' is not a " + format + " file");
  }
  if (!out.header.contains(count_key) || !out.header[count_key].is_number_unsigned()) {
    throw ValidationError("'" + path + "': header lacks '" + count_key + "'");
  }
  const auto count = out.header[count_key].get<std::size_t>();
  std::vector<char> bytes(count * 8);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw ValidationError("'" + path + "': payload truncated");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ValidationError("'" + path + "': trailing bytes after payload");
  }
  out.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    }
    out.values[i] = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace gestgen
