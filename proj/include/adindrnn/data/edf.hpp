// Copyright 2026 The ADIndRNN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// European Data Format reader and writer.
//
// Layout: a 256-byte ASCII fixed header, then 256 bytes of ASCII signal
// header per signal (stored field-major: all labels, then all transducers,
// ...), then data records. Each data record holds, signal after signal,
// samples_per_record 16-bit little-endian two's-complement integers.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "adindrnn/core/error.hpp"

namespace adindrnn::data {

struct EdfSignal {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  int digital_min = -32768;
  int digital_max = 32767;
  std::string prefiltering;
  std::size_t samples_per_record = 0;
  std::string reserved;
  std::vector<std::int16_t> digital;  // record_count * samples_per_record values

  /// physical_min + (d - digital_min) * (physical_max - physical_min) /
  /// (digital_max - digital_min)
  double to_physical(std::int32_t d) const {
    return physical_min + static_cast<double>(d - digital_min) * (physical_max - physical_min) /
                              static_cast<double>(digital_max - digital_min);
  }

  std::vector<double> physical() const {
    std::vector<double> out(digital.size());
    for (std::size_t i = 0; i < digital.size(); ++i) out[i] = to_physical(digital[i]);
    return out;
  }
};

struct EdfRecord {
  std::string version = "0";
  std::string patient;
  std::string recording;
  std::string start_date = "01.01.00";
  std::string start_time = "00.00.00";
  std::string reserved;
  std::size_t record_count = 0;
  double record_duration = 1.0;  // seconds per data record
  std::vector<EdfSignal> signals;

  double duration() const { return static_cast<double>(record_count) * record_duration; }

  double sampling_rate(std::size_t signal) const {
    return static_cast<double>(signals.at(signal).samples_per_record) / record_duration;
  }

  std::size_t header_bytes() const { return 256 * (signals.size() + 1); }

  /// Index of the first signal with this label, if any.
  std::optional<std::size_t> find_signal(std::string_view label) const {
    for (std::size_t i = 0; i < signals.size(); ++i) {
      if (signals[i].label == label) return i;
    }
    return std::nullopt;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\0')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.remove_suffix(1);
  return s;
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string text(std::size_t offset, std::size_t width) const {
    require(offset, width);
    const char* p = reinterpret_cast<const char*>(bytes_.data() + offset);
    return std::string(trim(std::string_view(p, width)));
  }

  double real(std::size_t offset, std::size_t width, const char* field) const {
    const std::string s = text(offset, width);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ParseError(std::string("EDF: non-numeric ") + field + " '" + s + "'", offset);
    }
    return v;
  }

  long long integer(std::size_t offset, std::size_t width, const char* field) const {
    std::string s = text(offset, width);
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(std::string("EDF: non-integer ") + field + " '" + s + "'", offset);
    }
    return v;
  }

  void require(std::size_t offset, std::size_t width) const {
    if (offset + width > bytes_.size()) {
      throw ParseError("EDF: truncated header, need " + std::to_string(offset + width) +
                           " bytes, have " + std::to_string(bytes_.size()),
                       bytes_.size());
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
};

}  // namespace detail

/// Parses an EDF file image. With `header_only`, sample data are not
/// decoded; `file_size` then stands in for the image length when only the
/// headers were read, so the record count is still resolved and checked.
inline EdfRecord parse_edf(std::span<const std::uint8_t> bytes, bool header_only = false,
                           std::optional<std::size_t> file_size = std::nullopt) {
  detail::HeaderReader h(bytes);
  h.require(0, 256);
  EdfRecord rec;
  rec.version = h.text(0, 8);
  rec.patient = h.text(8, 80);
  rec.recording = h.text(88, 80);
  rec.start_date = h.text(168, 8);
  rec.start_time = h.text(176, 8);
  const long long header_bytes = h.integer(184, 8, "header byte count");
  rec.reserved = h.text(192, 44);
  const long long records = h.integer(236, 8, "data record count");
  rec.record_duration = h.real(244, 8, "data record duration");
  const long long ns = h.integer(252, 4, "signal count");
  if (ns <= 0) throw ParseError("EDF: signal count must be positive", 252);
  if (!(rec.record_duration > 0.0)) throw ParseError("EDF: data record duration must be positive", 244);

  const std::size_t n = static_cast<std::size_t>(ns);
  if (header_bytes != static_cast<long long>(256 * (n + 1))) {
    throw ParseError("EDF: header byte count " + std::to_string(header_bytes) +
                         " does not match " + std::to_string(n) + " signals",
                     184);
  }
  h.require(256, 256 * n);

  rec.signals.resize(n);
  std::size_t off = 256;
  auto field = [&](std::size_t width, auto&& assign) {
    for (std::size_t i = 0; i < n; ++i) assign(rec.signals[i], off + i * width, width);
    off += n * width;
  };
  field(16, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.label = h.text(o, w); });
  field(80, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.transducer = h.text(o, w); });
  field(8, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.physical_dimension = h.text(o, w); });
  field(8, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.physical_min = h.real(o, w, "physical minimum"); });
  field(8, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.physical_max = h.real(o, w, "physical maximum"); });
  field(8, [&](EdfSignal& s, std::size_t o, std::size_t w) {
    s.digital_min = static_cast<int>(h.integer(o, w, "digital minimum"));
  });
  const std::size_t dig_max_off = off;
  field(8, [&](EdfSignal& s, std::size_t o, std::size_t w) {
    s.digital_max = static_cast<int>(h.integer(o, w, "digital maximum"));
  });
  field(80, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.prefiltering = h.text(o, w); });
  field(8, [&](EdfSignal& s, std::size_t o, std::size_t w) {
    const long long v = h.integer(o, w, "samples per record");
    if (v <= 0) throw ParseError("EDF: samples per record must be positive", o);
    s.samples_per_record = static_cast<std::size_t>(v);
  });
  field(32, [&](EdfSignal& s, std::size_t o, std::size_t w) { s.reserved = h.text(o, w); });

  std::size_t record_bytes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = rec.signals[i];
    if (s.digital_max <= s.digital_min) {
      throw ParseError("EDF: signal '" + s.label + "' has digital maximum " +
                           std::to_string(s.digital_max) + " <= digital minimum " +
                           std::to_string(s.digital_min),
                       dig_max_off + i * 8);
    }
    record_bytes += 2 * s.samples_per_record;
  }

  const std::size_t data_start = static_cast<std::size_t>(header_bytes);
  const std::size_t image_size = file_size.value_or(bytes.size());
  const std::size_t available = image_size - std::min(image_size, data_start);
  if (records < 0) {
    if (records != -1) throw ParseError("EDF: negative data record count", 236);
    rec.record_count = available / record_bytes;
  } else {
    rec.record_count = static_cast<std::size_t>(records);
  }
  const std::size_t needed = data_start + rec.record_count * record_bytes;
  if (image_size < needed) {
    throw ParseError("EDF: truncated data, need " + std::to_string(needed) + " bytes, have " +
                         std::to_string(image_size),
                     image_size);
  }
  if (header_only) return rec;

  for (auto& s : rec.signals) s.digital.resize(rec.record_count * s.samples_per_record);
  std::size_t pos = data_start;
  for (std::size_t r = 0; r < rec.record_count; ++r) {
    for (auto& s : rec.signals) {
      std::int16_t* dst = s.digital.data() + r * s.samples_per_record;
      for (std::size_t k = 0; k < s.samples_per_record; ++k) {
        const std::uint16_t u = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        dst[k] = static_cast<std::int16_t>(u);
        pos += 2;
      }
    }
  }
  return rec;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path,
                                                 std::size_t limit = SIZE_MAX) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes;
  const auto size = std::filesystem::file_size(path);
  bytes.resize(static_cast<std::size_t>(std::min<std::uintmax_t>(size, limit)));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw DataError("failed reading " + path.string());
  return bytes;
}

inline EdfRecord read_edf_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_edf(bytes);
}

/// Reads only the headers, resolving the record count from the file size.
inline EdfRecord read_edf_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> head(256);
  in.read(reinterpret_cast<char*>(head.data()), 256);
  if (!in) throw ParseError("EDF: truncated header in " + path.string(), 0);
  const auto ns = detail::HeaderReader(head).integer(252, 4, "signal count");
  if (ns <= 0) throw ParseError("EDF: signal count must be positive", 252);
  head.resize(256 * (static_cast<std::size_t>(ns) + 1));
  in.read(reinterpret_cast<char*>(head.data() + 256), static_cast<std::streamsize>(head.size() - 256));
  if (!in) throw ParseError("EDF: truncated signal headers in " + path.string(), 256);

  return parse_edf(head, true, static_cast<std::size_t>(std::filesystem::file_size(path)));
}

namespace detail {

/// Formats a number into at most `width` characters, exactly when possible.
inline std::string format_number(double v, std::size_t width) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    if (ec != std::errc()) continue;
    std::string s(buf, ptr);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back == v && s.size() <= width) return s;
  }
  for (int precision = 17; precision >= 1; --precision) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    if (ec == std::errc() && static_cast<std::size_t>(ptr - buf) <= width) return std::string(buf, ptr);
  }
  throw Error("EDF: cannot format " + std::to_string(v) + " in " + std::to_string(width) + " characters");
}

inline void put_field(std::vector<std::uint8_t>& out, std::string_view s, std::size_t width) {
  if (s.size() > width) {
    throw Error("EDF: field '" + std::string(s) + "' exceeds " + std::to_string(width) + " characters");
  }
  out.insert(out.end(), s.begin(), s.end());
  out.insert(out.end(), width - s.size(), static_cast<std::uint8_t>(' '));
}

}  // namespace detail

/// Serializes a record to EDF bytes. Numeric header fields are written in
/// their shortest exact form when it fits the field width.
inline std::vector<std::uint8_t> write_edf(const EdfRecord& rec) {
  using detail::format_number;
  using detail::put_field;
  std::vector<std::uint8_t> out;
  const std::size_t n = rec.signals.size();
  out.reserve(rec.header_bytes());
  put_field(out, rec.version, 8);
  put_field(out, rec.patient, 80);
  put_field(out, rec.recording, 80);
  put_field(out, rec.start_date, 8);
  put_field(out, rec.start_time, 8);
  put_field(out, std::to_string(rec.header_bytes()), 8);
  put_field(out, rec.reserved, 44);
  put_field(out, std::to_string(rec.record_count), 8);
  put_field(out, format_number(rec.record_duration, 8), 8);
  put_field(out, std::to_string(n), 4);
  for (const auto& s : rec.signals) put_field(out, s.label, 16);
  for (const auto& s : rec.signals) put_field(out, s.transducer, 80);
  for (const auto& s : rec.signals) put_field(out, s.physical_dimension, 8);
  for (const auto& s : rec.signals) put_field(out, format_number(s.physical_min, 8), 8);
  for (const auto& s : rec.signals) put_field(out, format_number(s.physical_max, 8), 8);
  for (const auto& s : rec.signals) put_field(out, std::to_string(s.digital_min), 8);
  for (const auto& s : rec.signals) put_field(out, std::to_string(s.digital_max), 8);
  for (const auto& s : rec.signals) put_field(out, s.prefiltering, 80);
  for (const auto& s : rec.signals) put_field(out, std::to_string(s.samples_per_record), 8);
  for (const auto& s : rec.signals) put_field(out, s.reserved, 32);

  for (const auto& s : rec.signals) {
    if (s.digital.size() != rec.record_count * s.samples_per_record) {
      throw DataError("EDF: signal '" + s.label + "' holds " + std::to_string(s.digital.size()) +
                      " samples, header implies " +
                      std::to_string(rec.record_count * s.samples_per_record));
    }
  }
  for (std::size_t r = 0; r < rec.record_count; ++r) {
    for (const auto& s : rec.signals) {
      const std::int16_t* src = s.digital.data() + r * s.samples_per_record;
      for (std::size_t k = 0; k < s.samples_per_record; ++k) {
        const auto u = static_cast<std::uint16_t>(src[k]);
        out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
      }
    }
  }
  return out;
}

inline void write_edf_file(const std::filesystem::path& path, const EdfRecord& rec) {
  const auto bytes = write_edf(rec);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace adindrnn::data
