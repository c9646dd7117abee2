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

#ifndef VTC_METRICS_HPP_
#define VTC_METRICS_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vtc/annotation.hpp"
#include "vtc/manifest.hpp"

namespace vtc {

// Durations, in seconds, of correctly detected, falsely detected and missed
// speech for one class.
struct DetectionCounts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;

  DetectionCounts& operator+=(const DetectionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// Interval-based counts for one class on one recording; no collar. When
// `uem` is non-empty both annotations are cropped to it first.
DetectionCounts detection_counts(const Annotation& ref, const Annotation& hyp,
                                 VoiceClass cls,
                                 const std::vector<Segment>& uem = {});

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Empty hypothesis scores precision 1 when the reference is empty too,
// otherwise 0. Empty reference scores recall 1. F is the harmonic mean,
// 0 when both terms vanish; together these make an absent class with no
// false alarms score F = 1.
Prf prf_from_counts(const DetectionCounts& c);

struct ClassReport {
  DetectionCounts counts;  // micro-accumulated across recordings
  Prf scores;
};

struct EvalReport {
  std::vector<VoiceClass> classes;
  std::map<VoiceClass, ClassReport> per_class;
  double average_f = 0.0;  // macro average over `classes`
  std::vector<std::string> missing_uris;
};

// References with SPEECH derived for any annotation lacking it.
std::map<std::string, Annotation> with_derived_speech(
    std::map<std::string, Annotation> refs);

// Reference annotations read from each entry's RTTM, keyed by uri.
std::map<std::string, Annotation> load_references(
    const std::vector<ManifestEntry>& entries);

// Micro-accumulates counts per class across recordings, then macro-averages
// F across classes. Recordings with no hypothesis score as empty (and are
// reported); recordings outside a non-empty UEM are skipped.
EvalReport evaluate(
    const std::map<std::string, Annotation>& refs,
    const std::map<std::string, Annotation>& hyps,
    const std::vector<VoiceClass>& classes,
    const std::map<std::string, std::vector<Segment>>& uem = {});

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Aligned text table, one row per named report, classes as columns with the
// macro average last. Values are F in percent with one decimal.
std::string format_report_table(
    const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace vtc

#endif  // VTC_METRICS_HPP_
