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

#include "vtc/metrics.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "vtc/rttm.hpp"

namespace vtc {

using nlohmann::json;

DetectionCounts detection_counts(const Annotation& ref, const Annotation& hyp,
                                 VoiceClass cls,
                                 const std::vector<Segment>& uem) {
  std::vector<Segment> ref_support = ref.support(cls);
  std::vector<Segment> hyp_support = hyp.support(cls);
  if (!uem.empty()) {
    const std::vector<Segment> region = merge_segments(uem);
    ref_support = intersect_segments(ref_support, region);
    hyp_support = intersect_segments(hyp_support, region);
  }
  DetectionCounts c;
  c.tp = total_duration(intersect_segments(ref_support, hyp_support));
  c.fp = total_duration(hyp_support) - c.tp;
  c.fn = total_duration(ref_support) - c.tp;
  return c;
}

Prf prf_from_counts(const DetectionCounts& c) {
  Prf out;
  const bool ref_empty = c.tp + c.fn <= 0.0;
  if (c.tp + c.fp > 0.0) {
    out.precision = c.tp / (c.tp + c.fp);
  } else {
    out.precision = ref_empty ? 1.0 : 0.0;
  }
  out.recall = ref_empty ? 1.0 : c.tp / (c.tp + c.fn);
  const double denom = out.precision + out.recall;
  out.f = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

std::map<std::string, Annotation> with_derived_speech(
    std::map<std::string, Annotation> refs) {
  for (auto& [uri, annotation] : refs) {
    if (!annotation.has_class(VoiceClass::SPEECH)) {
      annotation = derive_speech(annotation);
    }
  }
  return refs;
}

std::map<std::string, Annotation> load_references(
    const std::vector<ManifestEntry>& entries) {
  std::map<std::string, Annotation> refs;
  for (const ManifestEntry& entry : entries) {
    Annotation found{entry.uri, {}};
    for (Annotation& a : parse_rttm_file(entry.rttm)) {
      if (a.uri == entry.uri) {
        found = std::move(a);
        break;
      }
    }
    refs[entry.uri] = std::move(found);
  }
  return refs;
}

EvalReport evaluate(const std::map<std::string, Annotation>& refs,
                    const std::map<std::string, Annotation>& hyps,
                    const std::vector<VoiceClass>& classes,
                    const std::map<std::string, std::vector<Segment>>& uem) {
  const std::map<std::string, Annotation> prepared = with_derived_speech(refs);

  EvalReport report;
  report.classes = classes;
  for (const VoiceClass c : classes) {
    report.per_class[c] = ClassReport{};
  }

  static const std::vector<Segment> kNoRegion;
  for (const auto& [uri, ref] : prepared) {
    const std::vector<Segment>* region = &kNoRegion;
    if (!uem.empty()) {
      const auto uem_it = uem.find(uri);
      if (uem_it == uem.end()) {
        std::cerr << "[eval] " << uri << " not in UEM; skipped\n";
        continue;
      }
      region = &uem_it->second;
    }
    const Annotation* hyp = nullptr;
    const auto hyp_it = hyps.find(uri);
    if (hyp_it != hyps.end()) {
      hyp = &hyp_it->second;
    } else {
      std::cerr << "[eval] no hypothesis for " << uri
                << "; scoring it as empty\n";
      report.missing_uris.push_back(uri);
    }
    static const Annotation kEmpty;
    for (const VoiceClass c : classes) {
      report.per_class[c].counts +=
          detection_counts(ref, hyp != nullptr ? *hyp : kEmpty, c, *region);
    }
  }

  double f_sum = 0.0;
  for (const VoiceClass c : classes) {
    ClassReport& cr = report.per_class[c];
    cr.scores = prf_from_counts(cr.counts);
    f_sum += cr.scores.f;
  }
  report.average_f =
      classes.empty() ? 0.0 : f_sum / static_cast<double>(classes.size());
  return report;
}

json report_to_json(const EvalReport& report) {
  json classes = json::array();
  json per_class = json::object();
  for (const VoiceClass c : report.classes) {
    const std::string name(to_string(c));
    classes.push_back(name);
    const ClassReport& cr = report.per_class.at(c);
    per_class[name] = json{{"tp", cr.counts.tp},
                           {"fp", cr.counts.fp},
                           {"fn", cr.counts.fn},
                           {"precision", cr.scores.precision},
                           {"recall", cr.scores.recall},
                           {"f", cr.scores.f}};
  }
  return json{{"classes", classes},
              {"per_class", per_class},
              {"average_f", report.average_f},
              {"missing_uris", report.missing_uris}};
}

EvalReport report_from_json(const json& j) {
  EvalReport report;
  for (const auto& name : j.at("classes")) {
    report.classes.push_back(voice_class_from_string(name.get<std::string>()));
  }
  for (const VoiceClass c : report.classes) {
    const json& src = j.at("per_class").at(std::string(to_string(c)));
    ClassReport cr;
    cr.counts.tp = src.at("tp").get<double>();
    cr.counts.fp = src.at("fp").get<double>();
    cr.counts.fn = src.at("fn").get<double>();
    cr.scores.precision = src.at("precision").get<double>();
    cr.scores.recall = src.at("recall").get<double>();
    cr.scores.f = src.at("f").get<double>();
    report.per_class[c] = cr;
  }
  report.average_f = j.at("average_f").get<double>();
  if (j.contains("missing_uris")) {
    for (const auto& uri : j.at("missing_uris")) {
      report.missing_uris.push_back(uri.get<std::string>());
    }
  }
  return report;
}

std::string format_report_table(
    const std::vector<std::pair<std::string, EvalReport>>& rows) {
  if (rows.empty()) {
    return "";
  }
  const std::vector<VoiceClass>& classes = rows.front().second.classes;
  for (const auto& [name, report] : rows) {
    if (report.classes != classes) {
      throw std::invalid_argument(
          "report table: class sets differ between reports");
    }
  }

  std::vector<std::string> headers;
  for (const VoiceClass c : classes) {
    headers.emplace_back(to_string(c));
  }
  headers.emplace_back("Ave.");

  size_t name_width = 0;
  for (const auto& [name, report] : rows) {
    name_width = std::max(name_width, name.size());
  }

  const auto percent = [](double f) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * f);
    return std::string(buf);
  };

  std::vector<std::vector<std::string>> cells;
  for (const auto& [name, report] : rows) {
    std::vector<std::string> row;
    for (const VoiceClass c : classes) {
      row.push_back(percent(report.per_class.at(c).scores.f));
    }
    row.push_back(percent(report.average_f));
    cells.push_back(std::move(row));
  }

  std::vector<size_t> widths(headers.size());
  for (size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : cells) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }

  std::ostringstream out;
  out << std::string(name_width, ' ');
  for (size_t c = 0; c < headers.size(); ++c) {
    out << "  " << std::string(widths[c] - headers[c].size(), ' ')
        << headers[c];
  }
  out << "\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    out << rows[r].first
        << std::string(name_width - rows[r].first.size(), ' ');
    for (size_t c = 0; c < headers.size(); ++c) {
      out << "  " << std::string(widths[c] - cells[r][c].size(), ' ')
          << cells[r][c];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace vtc
