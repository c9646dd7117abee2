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

#ifndef VTC_ANNOTATION_HPP_
#define VTC_ANNOTATION_HPP_

#include <string>
#include <vector>

namespace vtc {

// Time comparisons throughout the toolkit use this tolerance (seconds).
inline constexpr double kTimeEpsilon = 1e-9;

// Half-open time interval [onset, offset) in seconds.
struct Segment {
  double onset = 0.0;
  double offset = 0.0;

  double duration() const { return offset - onset; }
  bool contains(double t) const {
    return t >= onset - kTimeEpsilon && t < offset - kTimeEpsilon;
  }
};

bool segments_equal(const Segment& a, const Segment& b,
                    double eps = kTimeEpsilon);

// The six voice classes. Reference annotations carry KCHI/OCH/MAL/FEM/UNK;
// the classifier scores KCHI/OCH/MAL/FEM/SPEECH. UNK marks speech whose
// source the annotator could not identify: it feeds SPEECH but is never
// predicted.
enum class VoiceClass { KCHI, OCH, MAL, FEM, UNK, SPEECH };

inline constexpr int kNumVoiceClasses = 6;

const char* to_string(VoiceClass c);

// Strict conversion: throws on anything that is not one of the six labels.
VoiceClass voice_class_from_string(const std::string& s);

// Lenient conversion for reference files: "CHI" is folded into OCH and
// any label outside the taxonomy maps to UNK.
VoiceClass voice_class_from_label(const std::string& s);

// The five classes a model scores, in output order.
const std::vector<VoiceClass>& output_classes();

// The five classes a reference file may carry.
const std::vector<VoiceClass>& reference_classes();

struct AnnotationEntry {
  Segment segment;
  VoiceClass label = VoiceClass::UNK;
};

// Labeled intervals for one recording. Entries of different classes may
// overlap freely (multi-label); same-class overlaps are collapsed by
// normalized().
struct Annotation {
  std::string uri;
  std::vector<AnnotationEntry> entries;

  bool has_class(VoiceClass c) const;
  // Merged, sorted intervals covered by class c.
  std::vector<Segment> support(VoiceClass c) const;
  // Total duration covered by class c.
  double duration(VoiceClass c) const;
  // Largest offset over all entries (0 when empty).
  double extent() const;

  // Canonical form: same-class overlapping or abutting entries merged,
  // entries sorted by (onset, offset, class).
  Annotation normalized() const;
};

bool annotations_equal(const Annotation& a, const Annotation& b,
                       double eps = kTimeEpsilon);

// ---------------------------------------------------------------------------
// Interval algebra on merged, sorted segment lists.
// ---------------------------------------------------------------------------

// Sorts and merges overlapping or abutting segments.
std::vector<Segment> merge_segments(std::vector<Segment> segments);

// Intersection of two merged lists.
std::vector<Segment> intersect_segments(const std::vector<Segment>& a,
                                        const std::vector<Segment>& b);

// Sum of durations.
double total_duration(const std::vector<Segment>& segments);

// ---------------------------------------------------------------------------
// SPEECH derivation
// ---------------------------------------------------------------------------

// Returns a copy of `a` with SPEECH entries covering the interval union of
// every reference-class entry (UNK included). Throws if `a` already has
// SPEECH entries, so the derivation cannot be applied twice.
Annotation derive_speech(const Annotation& a);

}  // namespace vtc

#endif  // VTC_ANNOTATION_HPP_
