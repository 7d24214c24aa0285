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


// Test-side EDF writer. Written from the file layout alone so that round
// trips through the library parser do not share code with its writer.

#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace fixture {

struct Signal {
  std::string label;
  double phys_min = -3276.8, phys_max = 3276.7;
  int dig_min = -32768, dig_max = 32767;
  int samples_per_record = 0;
  std::vector<std::int16_t> digital;  // records * samples_per_record
};

struct Edf {
  int records = 0;
  double record_seconds = 1.0;
  std::vector<Signal> signals;
};

inline void field(std::string& out, const std::string& s, std::size_t width) {
  std::string f = s.substr(0, width);
  f.resize(width, ' ');
  out += f;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8g", v);
  std::string s = buf;
  if (s.size() > 8) {
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    s = buf;
  }
  return s;
}

inline std::vector<std::uint8_t> write(const Edf& e) {
  const std::size_t ns = e.signals.size();
  std::string h;
  field(h, "0", 8);
  field(h, "X X X fixture", 80);
  field(h, "Startdate X fixture", 80);
  field(h, "02.03.04", 8);
  field(h, "05.06.07", 8);
  field(h, std::to_string(256 * (ns + 1)), 8);
  field(h, "", 44);
  field(h, std::to_string(e.records), 8);
  field(h, num(e.record_seconds), 8);
  field(h, std::to_string(ns), 4);
  for (const auto& s : e.signals) field(h, s.label, 16);
  for (std::size_t i = 0; i < ns; ++i) field(h, "AgAgCl electrode", 80);
  for (std::size_t i = 0; i < ns; ++i) field(h, "uV", 8);
  for (const auto& s : e.signals) field(h, num(s.phys_min), 8);
  for (const auto& s : e.signals) field(h, num(s.phys_max), 8);
  for (const auto& s : e.signals) field(h, std::to_string(s.dig_min), 8);
  for (const auto& s : e.signals) field(h, std::to_string(s.dig_max), 8);
  for (std::size_t i = 0; i < ns; ++i) field(h, "HP:0.1Hz", 80);
  for (const auto& s : e.signals) field(h, std::to_string(s.samples_per_record), 8);
  for (std::size_t i = 0; i < ns; ++i) field(h, "", 32);

  std::vector<std::uint8_t> out(h.begin(), h.end());
  for (int r = 0; r < e.records; ++r) {
    for (const auto& s : e.signals) {
      for (int k = 0; k < s.samples_per_record; ++k) {
        const auto v = static_cast<std::uint16_t>(s.digital[static_cast<std::size_t>(r * s.samples_per_record + k)]);
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
      }
    }
  }
  return out;
}

}  // namespace fixture
