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


// A set of annotated records with a fixed channel selection. Records are
// either EDF files (read on demand) or in-memory EdfRecords.

#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "adindrnn/data/annotations.hpp"
#include "adindrnn/data/edf.hpp"
#include "adindrnn/data/segment.hpp"
#include "adindrnn/data/segment_cache.hpp"

namespace adindrnn::data {

struct CorpusEntry {
  std::string id;
  std::filesystem::path path;                // empty for in-memory records
  std::shared_ptr<const EdfRecord> record;   // null for file-backed records
  std::vector<std::string> labels;           // signal labels in file order
  double rate = 0.0;                         // of the selected channels
  std::size_t total_samples = 0;

  double duration() const { return static_cast<double>(total_samples) / rate; }
};

/// Labels that never name a usable EEG channel.
inline bool is_placeholder_label(const std::string& label) {
  if (label.empty() || label == "EDF Annotations") return true;
  return std::all_of(label.begin(), label.end(), [](char c) { return c == '-' || c == '.'; });
}

/// Labels present in every record, in the order of the first record.
inline std::vector<std::string> common_channels(const std::vector<std::vector<std::string>>& label_lists) {
  std::vector<std::string> out;
  if (label_lists.empty()) return out;
  std::set<std::string> seen;
  for (const auto& label : label_lists.front()) {
    if (is_placeholder_label(label) || !seen.insert(label).second) continue;
    const bool everywhere = std::all_of(label_lists.begin() + 1, label_lists.end(), [&](const auto& l) {
      return std::find(l.begin(), l.end(), label) != l.end();
    });
    if (everywhere) out.push_back(label);
  }
  return out;
}

class Corpus {
 public:
  /// Every *.edf file under `root` (sorted by path) whose stem is not in
  /// `exclude`. An empty `channels` selects common_channels().
  static Corpus from_directory(const std::filesystem::path& root, AnnotationSet annotations,
                               const std::vector<std::string>& exclude = {},
                               std::vector<std::string> channels = {}) {
    if (!std::filesystem::is_directory(root)) throw DataError("data root " + root.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
      if (!e.is_regular_file()) continue;
      std::string ext = e.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext != ".edf") continue;
      const std::string id = e.path().stem().string();
      if (std::find(exclude.begin(), exclude.end(), id) != exclude.end()) continue;
      files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no EDF files under " + root.string());

    Corpus c;
    c.annotations_ = std::move(annotations);
    std::vector<EdfRecord> headers;
    for (const auto& f : files) {
      CorpusEntry e;
      e.id = f.stem().string();
      e.path = f;
      headers.push_back(read_edf_header(f));
      c.entries_.push_back(std::move(e));
    }
    c.finish(headers, std::move(channels));
    return c;
  }

  static Corpus from_records(std::vector<std::pair<std::string, EdfRecord>> records,
                             AnnotationSet annotations, std::vector<std::string> channels = {}) {
    if (records.empty()) throw DataError("corpus has no records");
    Corpus c;
    c.annotations_ = std::move(annotations);
    std::vector<EdfRecord> headers;
    for (auto& [id, rec] : records) {
      CorpusEntry e;
      e.id = id;
      EdfRecord header = rec;
      for (auto& s : header.signals) s.digital.clear();
      headers.push_back(std::move(header));
      e.record = std::make_shared<const EdfRecord>(std::move(rec));
      c.entries_.push_back(std::move(e));
    }
    c.finish(headers, std::move(channels));
    return c;
  }

  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<CorpusEntry>& entries() const { return entries_; }
  const AnnotationSet& annotations() const { return annotations_; }

  double shortest_duration() const {
    double d = entries_.front().duration();
    for (const auto& e : entries_) d = std::min(d, e.duration());
    return d;
  }

  /// Windows of every record at `seg_len`, record after record.
  std::vector<SegmentInfo> plan(double seg_len) const {
    std::vector<SegmentInfo> out;
    for (const auto& e : entries_) {
      auto w = plan_windows(e.id, e.total_samples, e.rate, seg_len, annotations_.at(e.id).intervals);
      out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    }
    return out;
  }

  /// Samples for the given windows, in the same order. Each record is read
  /// at most once. With a cache, whole-record segment lists are stored on
  /// first use and read back afterwards.
  std::vector<SegmentRef> materialize(const std::vector<SegmentInfo>& infos, std::size_t decimate = 1,
                                      const SegmentCache* cache = nullptr) const {
    std::map<std::string, std::vector<std::size_t>> by_record;
    for (std::size_t i = 0; i < infos.size(); ++i) by_record[infos[i].record_id].push_back(i);
    std::vector<SegmentRef> out(infos.size());
    for (const auto& [id, idx] : by_record) {
      const CorpusEntry& e = entry(id);
      if (cache) {
        const double seg_len = infos[idx.front()].length();
        auto segs = cache->load(id, seg_len, channels_, decimate);
        if (!segs) {
          segs = segment_record(*load(e), annotations_.at(id), seg_len, channels_, decimate);
          cache->store(id, seg_len, channels_, decimate, *segs);
        }
        std::map<std::size_t, const Segment*> at;
        for (const auto& s : *segs) at[s.info.start_sample] = &s;
        for (std::size_t i : idx) {
          auto it = at.find(infos[i].start_sample);
          if (it == at.end() || it->second->info.samples != infos[i].samples) {
            throw DataError("segment cache for '" + id + "' lacks the window at sample " +
                            std::to_string(infos[i].start_sample));
          }
          out[i] = std::make_shared<const Segment>(*it->second);
        }
        continue;
      }
      const auto rec = load(e);
      const ChannelSelection sel = select_channels(*rec, channels_);
      for (std::size_t i : idx) {
        out[i] = std::make_shared<const Segment>(Segment{infos[i], extract_window(*rec, sel, infos[i], decimate)});
      }
    }
    return out;
  }

  const CorpusEntry& entry(const std::string& id) const {
    for (const auto& e : entries_) {
      if (e.id == id) return e;
    }
    throw DataError("record '" + id + "' is not in the corpus");
  }

 private:
  void finish(const std::vector<EdfRecord>& headers, std::vector<std::string> channels) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (const auto& s : headers[i].signals) entries_[i].labels.push_back(s.label);
    }
    if (channels.empty()) {
      std::vector<std::vector<std::string>> lists;
      for (const auto& e : entries_) lists.push_back(e.labels);
      channels = common_channels(lists);
      if (channels.empty()) throw DataError("the records share no channel");
    }
    channels_ = std::move(channels);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      auto& e = entries_[i];
      ChannelSelection sel;
      try {
        sel = select_channels(headers[i], channels_);
      } catch (const DataError& err) {
        throw DataError("record '" + e.id + "': " + err.what());
      }
      e.rate = sel.rate;
      e.total_samples = sel.total_samples;
      annotations_.check_duration(e.id, e.duration());
    }
  }

  static std::shared_ptr<const EdfRecord> load(const CorpusEntry& e) {
    if (e.record) return e.record;
    return std::make_shared<const EdfRecord>(read_edf_file(e.path));
  }

  std::vector<CorpusEntry> entries_;
  std::vector<std::string> channels_;
  AnnotationSet annotations_;
};

}  // namespace adindrnn::data
