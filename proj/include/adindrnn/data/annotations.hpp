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


// Seizure annotations: a canonical CSV form and an importer for the
// per-case "summary" text files that ship with CHB-MIT.

#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adindrnn/core/error.hpp"
#include "adindrnn/core/format.hpp"

namespace adindrnn::data {

struct Interval {
  double start = 0.0;  // seconds from the start of the record
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct SeizureAnnotation {
  std::string record_id;
  std::vector<Interval> intervals;  // sorted, non-overlapping
};

enum class AnnotationFormat { csv, chb_summary };

inline AnnotationFormat annotation_format_from_string(std::string_view s) {
  if (s == "csv") return AnnotationFormat::csv;
  if (s == "chb_summary") return AnnotationFormat::chb_summary;
  throw ConfigError("unknown annotation format '" + std::string(s) + "' (expected csv or chb_summary)");
}

/// Annotations keyed by record id. A record listed with no intervals is
/// known to be seizure-free; a record that is not listed at all is an error
/// at lookup time.
class AnnotationSet {
 public:
  /// Adds intervals to `record_id` (creating it if needed), then re-sorts
  /// and checks the record's intervals. On error the set is unchanged.
  void add(const std::string& record_id, std::vector<Interval> intervals = {}) {
    auto it = records_.find(record_id);
    SeizureAnnotation a = it != records_.end() ? it->second : SeizureAnnotation{record_id, {}};
    a.intervals.insert(a.intervals.end(), intervals.begin(), intervals.end());
    normalize(a);
    records_[record_id] = std::move(a);
  }

  bool contains(const std::string& record_id) const { return records_.count(record_id) != 0; }

  const SeizureAnnotation& at(const std::string& record_id) const {
    auto it = records_.find(record_id);
    if (it == records_.end()) throw DataError("no annotation for record '" + record_id + "'");
    return it->second;
  }

  std::vector<std::string> record_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, a] : records_) ids.push_back(id);
    return ids;
  }

  std::size_t size() const { return records_.size(); }

  std::size_t interval_count() const {
    std::size_t n = 0;
    for (const auto& [id, a] : records_) n += a.intervals.size();
    return n;
  }

  /// Throws DataError when an interval of `record_id` ends after `duration`.
  void check_duration(const std::string& record_id, double duration) const {
    for (const auto& iv : at(record_id).intervals) {
      if (iv.end > duration) {
        throw DataError("record '" + record_id + "': seizure [" + std::to_string(iv.start) + ", " +
                        std::to_string(iv.end) + ") ends after the record (" +
                        std::to_string(duration) + " s)");
      }
    }
  }

 private:
  static void normalize(SeizureAnnotation& a) {
    for (const auto& iv : a.intervals) {
      if (!(iv.start >= 0.0) || !(iv.end > iv.start)) {
        throw DataError("record '" + a.record_id + "': invalid seizure interval [" +
                        std::to_string(iv.start) + ", " + std::to_string(iv.end) + ")");
      }
    }
    std::sort(a.intervals.begin(), a.intervals.end(),
              [](const Interval& x, const Interval& y) { return x.start < y.start; });
    for (std::size_t i = 1; i < a.intervals.size(); ++i) {
      if (a.intervals[i].start < a.intervals[i - 1].end) {
        throw DataError("record '" + a.record_id + "': overlapping seizure intervals at " +
                        std::to_string(a.intervals[i].start) + " s");
      }
    }
  }

  std::map<std::string, SeizureAnnotation> records_;
};

namespace detail {

inline std::string_view strip(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline double parse_seconds(std::string_view s, std::size_t line) {
  s = strip(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("annotations: '" + std::string(s) + "' is not a number of seconds", line);
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(strip(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string record_id_from_file_name(std::string_view name) {
  std::string id(strip(name));
  const auto dot = id.rfind('.');
  if (dot != std::string::npos) id.erase(dot);
  return id;
}

// Error offsets are 1-based line numbers.
inline AnnotationSet parse_csv(std::string_view text) {
  AnnotationSet set;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = strip(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_commas(line);
    if (!header_seen) {
      if (f.size() != 3 || f[0] != "record_id" || f[1] != "start_s" || f[2] != "end_s") {
        throw ParseError("annotations: expected header 'record_id,start_s,end_s'", line_no);
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 3 || f[0].empty()) {
      throw ParseError("annotations: expected 'record_id,start_s,end_s'", line_no);
    }
    const std::string id(f[0]);
    if (f[1].empty() && f[2].empty()) {
      set.add(id);  // seizure-free record
      continue;
    }
    const Interval iv{parse_seconds(f[1], line_no), parse_seconds(f[2], line_no)};
    if (!(iv.end > iv.start)) {
      throw ParseError("annotations: end must be after start for '" + id + "'", line_no);
    }
    try {
      set.add(id, {iv});
    } catch (const DataError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!header_seen) throw ParseError("annotations: missing header 'record_id,start_s,end_s'", 1);
  return set;
}

inline AnnotationSet parse_chb_summary(std::string_view text) {
  static const std::regex file_re(R"(^\s*File Name:\s*(\S+)\s*$)");
  static const std::regex start_re(R"(^\s*Seizure(?:\s+\d+)?\s+Start Time:\s*([0-9.]+)\s*seconds\s*$)");
  static const std::regex end_re(R"(^\s*Seizure(?:\s+\d+)?\s+End Time:\s*([0-9.]+)\s*seconds\s*$)");

  AnnotationSet set;
  std::string current;
  bool pending = false;
  double pending_start = 0.0;
  std::size_t pending_line = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::smatch m;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_match(line, m, file_re)) {
      if (pending) throw ParseError("annotations: seizure start without end", pending_line);
      current = record_id_from_file_name(m[1].str());
      set.add(current);
    } else if (std::regex_match(line, m, start_re)) {
      if (current.empty()) throw ParseError("annotations: seizure before any 'File Name:'", line_no);
      if (pending) throw ParseError("annotations: seizure start without end", pending_line);
      pending_start = parse_seconds(m[1].str(), line_no);
      pending = true;
      pending_line = line_no;
    } else if (std::regex_match(line, m, end_re)) {
      if (!pending) throw ParseError("annotations: seizure end without start", line_no);
      const Interval iv{pending_start, parse_seconds(m[1].str(), line_no)};
      pending = false;
      if (!(iv.end > iv.start)) {
        throw ParseError("annotations: end must be after start in '" + current + "'", line_no);
      }
      try {
        set.add(current, {iv});
      } catch (const DataError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
  }
  if (pending) throw ParseError("annotations: seizure start without end", pending_line);
  return set;
}

}  // namespace detail

inline AnnotationSet parse_annotations(std::string_view text, AnnotationFormat format) {
  return format == AnnotationFormat::csv ? detail::parse_csv(text) : detail::parse_chb_summary(text);
}

/// Reads one annotation file, or every *-summary.txt file of a directory when
/// `path` is a directory and the format is chb_summary.
inline AnnotationSet read_annotations(const std::filesystem::path& path, AnnotationFormat format) {
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open annotations " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (!std::filesystem::is_directory(path)) return parse_annotations(slurp(path), format);
  if (format != AnnotationFormat::chb_summary) {
    throw ConfigError("annotations: a directory is only accepted for chb_summary files");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(path)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 12 && name.ends_with("-summary.txt")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  AnnotationSet all;
  for (const auto& f : files) {
    const AnnotationSet one = parse_annotations(slurp(f), format);
    for (const auto& id : one.record_ids()) all.add(id, one.at(id).intervals);
  }
  return all;
}

inline std::string to_csv(const AnnotationSet& set) {
  std::ostringstream out;
  out << "record_id,start_s,end_s\n";
  for (const auto& id : set.record_ids()) {
    const auto& a = set.at(id);
    if (a.intervals.empty()) out << id << ",,\n";
    for (const auto& iv : a.intervals) out << id << ',' << shortest(iv.start) << ',' << shortest(iv.end) << '\n';
  }
  return out.str();
}

}  // namespace adindrnn::data
