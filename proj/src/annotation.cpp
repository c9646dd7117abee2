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

#include "vtc/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtc {

bool segments_equal(const Segment& a, const Segment& b, double eps) {
  return std::fabs(a.onset - b.onset) <= eps &&
         std::fabs(a.offset - b.offset) <= eps;
}

const char* to_string(VoiceClass c) {
  switch (c) {
    case VoiceClass::KCHI: return "KCHI";
    case VoiceClass::OCH: return "OCH";
    case VoiceClass::MAL: return "MAL";
    case VoiceClass::FEM: return "FEM";
    case VoiceClass::UNK: return "UNK";
    case VoiceClass::SPEECH: return "SPEECH";
  }
  return "UNK";
}

VoiceClass voice_class_from_string(const std::string& s) {
  if (s == "KCHI") return VoiceClass::KCHI;
  if (s == "OCH") return VoiceClass::OCH;
  if (s == "MAL") return VoiceClass::MAL;
  if (s == "FEM") return VoiceClass::FEM;
  if (s == "UNK") return VoiceClass::UNK;
  if (s == "SPEECH") return VoiceClass::SPEECH;
  throw std::invalid_argument("unknown voice class: '" + s + "'");
}

VoiceClass voice_class_from_label(const std::string& s) {
  // CHI shows up in some reference files as a variant spelling of OCH.
  if (s == "CHI") return VoiceClass::OCH;
  if (s == "KCHI" || s == "OCH" || s == "MAL" || s == "FEM" || s == "UNK" ||
      s == "SPEECH") {
    return voice_class_from_string(s);
  }
  return VoiceClass::UNK;
}

const std::vector<VoiceClass>& output_classes() {
  static const std::vector<VoiceClass> classes = {
      VoiceClass::KCHI, VoiceClass::OCH, VoiceClass::MAL, VoiceClass::FEM,
      VoiceClass::SPEECH};
  return classes;
}

const std::vector<VoiceClass>& reference_classes() {
  static const std::vector<VoiceClass> classes = {
      VoiceClass::KCHI, VoiceClass::OCH, VoiceClass::MAL, VoiceClass::FEM,
      VoiceClass::UNK};
  return classes;
}

bool Annotation::has_class(VoiceClass c) const {
  return std::any_of(entries.begin(), entries.end(),
                     [c](const AnnotationEntry& e) { return e.label == c; });
}

std::vector<Segment> Annotation::support(VoiceClass c) const {
  std::vector<Segment> segments;
  for (const auto& e : entries) {
    if (e.label == c) segments.push_back(e.segment);
  }
  return merge_segments(std::move(segments));
}

double Annotation::duration(VoiceClass c) const {
  return total_duration(support(c));
}

double Annotation::extent() const {
  double end = 0.0;
  for (const auto& e : entries) end = std::max(end, e.segment.offset);
  return end;
}

Annotation Annotation::normalized() const {
  Annotation out;
  out.uri = uri;
  for (int c = 0; c < kNumVoiceClasses; ++c) {
    const auto cls = static_cast<VoiceClass>(c);
    for (const Segment& s : support(cls)) {
      out.entries.push_back({s, cls});
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const AnnotationEntry& a, const AnnotationEntry& b) {
              if (a.segment.onset != b.segment.onset)
                return a.segment.onset < b.segment.onset;
              if (a.segment.offset != b.segment.offset)
                return a.segment.offset < b.segment.offset;
              return static_cast<int>(a.label) < static_cast<int>(b.label);
            });
  return out;
}

bool annotations_equal(const Annotation& a, const Annotation& b, double eps) {
  if (a.uri != b.uri || a.entries.size() != b.entries.size()) return false;
  for (size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].label != b.entries[i].label) return false;
    if (!segments_equal(a.entries[i].segment, b.entries[i].segment, eps))
      return false;
  }
  return true;
}

std::vector<Segment> merge_segments(std::vector<Segment> segments) {
  if (segments.empty()) return segments;
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) {
              if (a.onset != b.onset) return a.onset < b.onset;
              return a.offset < b.offset;
            });
  std::vector<Segment> merged;
  merged.push_back(segments.front());
  for (size_t i = 1; i < segments.size(); ++i) {
    Segment& last = merged.back();
    if (segments[i].onset <= last.offset + kTimeEpsilon) {
      last.offset = std::max(last.offset, segments[i].offset);
    } else {
      merged.push_back(segments[i]);
    }
  }
  return merged;
}

std::vector<Segment> intersect_segments(const std::vector<Segment>& a,
                                        const std::vector<Segment>& b) {
  std::vector<Segment> out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double onset = std::max(a[i].onset, b[j].onset);
    const double offset = std::min(a[i].offset, b[j].offset);
    if (offset - onset > kTimeEpsilon) out.push_back({onset, offset});
    if (a[i].offset < b[j].offset) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

double total_duration(const std::vector<Segment>& segments) {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration();
  return total;
}

Annotation derive_speech(const Annotation& a) {
  if (a.has_class(VoiceClass::SPEECH)) {
    throw std::invalid_argument("annotation '" + a.uri +
                                "' already carries SPEECH entries");
  }
  std::vector<Segment> all;
  for (const auto& e : a.entries) all.push_back(e.segment);
  Annotation out = a;
  for (const Segment& s : merge_segments(std::move(all))) {
    out.entries.push_back({s, VoiceClass::SPEECH});
  }
  return out;
}

}  // namespace vtc
