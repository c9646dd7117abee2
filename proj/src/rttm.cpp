// Copyright (c) 2026 The voicetype authors
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

#include "vtc/rttm.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vtc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream iss(line);
  std::string field;
  while (iss >> field) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const char* what, size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " +
                             what + " '" + s + "'");
  }
  return v;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

std::vector<Annotation> parse_rttm(std::istream& in) {
  std::vector<Annotation> annotations;
  std::map<std::string, size_t> index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 9) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected >= 9 fields, got " +
                               std::to_string(fields.size()));
    }
    if (fields[0] != "SPEAKER") {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected SPEAKER record, got '" + fields[0] +
                               "'");
    }
    const std::string& uri = fields[1];
    const double onset = parse_double(fields[3], "onset", line_no);
    const double duration = parse_double(fields[4], "duration", line_no);
    if (onset < 0.0) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": negative onset");
    }
    if (duration <= 0.0) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": non-positive duration");
    }
    auto [it, inserted] = index.try_emplace(uri, annotations.size());
    if (inserted) annotations.push_back(Annotation{uri, {}});
    annotations[it->second].entries.push_back(
        {{onset, onset + duration}, voice_class_from_label(fields[7])});
  }
  return annotations;
}

std::vector<Annotation> parse_rttm_file(const std::string& path) {
  auto in = open_or_throw(path);
  try {
    return parse_rttm(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string format_time(double seconds) {
  char buf[64];
  for (int precision = 3; precision <= 9; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*f", precision, seconds);
    if (std::strtod(buf, nullptr) == seconds) break;
  }
  return buf;
}

void serialize_rttm(std::ostream& out, const Annotation& a) {
  for (const auto& e : a.entries) {
    out << "SPEAKER " << a.uri << " 1 " << format_time(e.segment.onset) << ' '
        << format_time(e.segment.duration()) << " <NA> <NA> "
        << to_string(e.label) << " <NA> <NA>\n";
  }
}

void serialize_rttm(std::ostream& out, const std::vector<Annotation>& as) {
  for (const auto& a : as) serialize_rttm(out, a);
}

void write_rttm_file(const std::string& path, const Annotation& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  serialize_rttm(out, a);
}

std::map<std::string, std::vector<Segment>> parse_uem(std::istream& in) {
  std::map<std::string, std::vector<Segment>> regions;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 4) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 4 fields, got " +
                               std::to_string(fields.size()));
    }
    const double onset = parse_double(fields[2], "onset", line_no);
    const double offset = parse_double(fields[3], "offset", line_no);
    if (offset <= onset) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": empty scoring region");
    }
    regions[fields[0]].push_back({onset, offset});
  }
  for (auto& [uri, segments] : regions)
    segments = merge_segments(std::move(segments));
  return regions;
}

std::map<std::string, std::vector<Segment>> parse_uem_file(
    const std::string& path) {
  auto in = open_or_throw(path);
  try {
    return parse_uem(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace vtc
