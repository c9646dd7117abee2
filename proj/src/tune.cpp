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

#include "vtc/tune.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "vtc/label_matrix.hpp"

namespace vtc {

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) {
    grid.push_back(i * 0.05);
  }
  return grid;
}

namespace {

// Single-class hypothesis: frames strictly above sigma, decoded to maximal
// segments exactly as binarize() does for that class.
Annotation threshold_class(const ScoreTrack& track, size_t class_index,
                           double sigma, const std::string& uri) {
  LabelMatrix m;
  m.grid = track.grid;
  m.classes = {track.classes[class_index]};
  m.values.resize(static_cast<size_t>(track.grid.count));
  for (int64_t f = 0; f < track.grid.count; ++f) {
    m.values[static_cast<size_t>(f)] =
        track.values(f, static_cast<int64_t>(class_index)) > sigma ? 1 : 0;
  }
  return decode_frames(m, uri);
}

}  // namespace

TuneResult tune_thresholds(
    const std::vector<EpochScores>& epochs,
    const std::map<std::string, Annotation>& refs,
    const std::vector<double>& grid,
    const std::map<std::string, std::vector<Segment>>& uem) {
  if (epochs.empty()) {
    throw std::invalid_argument("tune: no epochs to sweep");
  }
  if (grid.empty()) {
    throw std::invalid_argument("tune: empty threshold grid");
  }
  for (const EpochScores& e : epochs) {
    if (e.scores.empty()) {
      throw std::invalid_argument("tune: epoch " + std::to_string(e.epoch) +
                                  " has no scores");
    }
  }
  const std::map<std::string, Annotation> prepared = with_derived_speech(refs);

  // Earlier epochs win ties, whatever order the caller passed.
  std::vector<const EpochScores*> ordered;
  ordered.reserve(epochs.size());
  for (const EpochScores& e : epochs) {
    ordered.push_back(&e);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const EpochScores* a, const EpochScores* b) {
                     return a->epoch < b->epoch;
                   });

  const std::vector<VoiceClass> classes =
      epochs.front().scores.begin()->second.classes;

  TuneResult result;
  result.grid = grid;
  bool have_best = false;

  static const std::vector<Segment> kNoRegion;
  for (const EpochScores* epoch : ordered) {
    std::map<VoiceClass, std::vector<double>> curves;
    Thresholds thresholds;
    double f_sum = 0.0;
    for (size_t ci = 0; ci < classes.size(); ++ci) {
      const VoiceClass cls = classes[ci];
      std::vector<double> curve;
      curve.reserve(grid.size());
      double best_f = -1.0;
      double best_sigma = grid.front();
      for (const double sigma : grid) {
        DetectionCounts acc;
        for (const auto& [uri, track] : epoch->scores) {
          if (track.classes != classes) {
            throw std::invalid_argument(
                "tune: score tracks disagree on classes");
          }
          const auto ref_it = prepared.find(uri);
          if (ref_it == prepared.end()) {
            throw std::invalid_argument("tune: no reference for " + uri);
          }
          const std::vector<Segment>* region = &kNoRegion;
          if (!uem.empty()) {
            const auto uem_it = uem.find(uri);
            if (uem_it == uem.end()) continue;
            region = &uem_it->second;
          }
          acc += detection_counts(ref_it->second,
                                  threshold_class(track, ci, sigma, uri), cls,
                                  *region);
        }
        const double f = prf_from_counts(acc).f;
        curve.push_back(f);
        if (f > best_f) {  // ties keep the lower threshold
          best_f = f;
          best_sigma = sigma;
        }
      }
      curves[cls] = std::move(curve);
      thresholds.sigma[cls] = best_sigma;
      f_sum += best_f;
    }
    const double avg_f = f_sum / static_cast<double>(classes.size());
    result.average_f_by_epoch.emplace_back(epoch->epoch, avg_f);
    if (!have_best || avg_f > result.best_average_f) {
      have_best = true;
      result.best_average_f = avg_f;
      result.best_epoch = epoch->epoch;
      result.checkpoint_path = epoch->checkpoint_path;
      result.thresholds = thresholds;
      result.f_by_sigma = curves;
    }
  }
  return result;
}

void write_threshold_curves_csv(const std::string& path, const TuneResult& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "sigma";
  for (const auto& [cls, curve] : r.f_by_sigma) {
    out << "," << to_string(cls);
  }
  out << "\n";
  char buf[32];
  for (size_t i = 0; i < r.grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.grid[i]);
    out << buf;
    for (const auto& [cls, curve] : r.f_by_sigma) {
      std::snprintf(buf, sizeof(buf), "%.6f", curve[i]);
      out << "," << buf;
    }
    out << "\n";
  }
}

void write_threshold_curves_svg(const std::string& path, const TuneResult& r) {
  if (r.grid.empty() || r.f_by_sigma.empty()) {
    throw std::invalid_argument("threshold curves: nothing to plot");
  }
  constexpr int kWidth = 640, kHeight = 400;
  constexpr int kLeft = 56, kRight = 150, kTop = 24, kBottom = 44;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_min = r.grid.front();
  const double x_max = r.grid.back();
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;

  const auto x_of = [&](double sigma) {
    return kLeft + (sigma - x_min) / x_span * plot_w;
  };
  const auto y_of = [&](double f) { return kTop + (1.0 - f) * plot_h; };

  static const char* kPalette[] = {"#d62728", "#ff7f0e", "#1f77b4",
                                   "#9467bd", "#2ca02c", "#8c564b"};

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  // Axes and horizontal gridlines.
  for (int i = 0; i <= 4; ++i) {
    const double f = i * 0.25;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#dddddd\"/>\n",
                  static_cast<double>(kLeft), y_of(f), kLeft + plot_w, y_of(f));
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                  "text-anchor=\"end\" fill=\"#444444\">%.2f</text>\n",
                  kLeft - 6.0, y_of(f) + 4.0, f);
    out << buf;
  }
  for (const double sigma : {x_min, (x_min + x_max) / 2.0, x_max}) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                  "text-anchor=\"middle\" fill=\"#444444\">%.2f</text>\n",
                  x_of(sigma), kTop + plot_h + 18.0, sigma);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%d\" y=\"%d\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"#888888\"/>\n",
                kLeft, kTop, plot_w, plot_h);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "text-anchor=\"middle\" fill=\"#444444\">threshold</text>\n",
                kLeft + plot_w / 2.0, kTop + plot_h + 36.0);
  out << buf;

  size_t color = 0;
  double legend_y = kTop + 12.0;
  for (const auto& [cls, curve] : r.f_by_sigma) {
    const char* stroke = kPalette[color % 6];
    out << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < r.grid.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x_of(r.grid[i]),
                    y_of(curve[i]));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"%s\" stroke-width=\"1.5\"/>\n",
                  kLeft + plot_w + 12.0, legend_y, kLeft + plot_w + 34.0,
                  legend_y, stroke);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                  "fill=\"#222222\">%s</text>\n",
                  kLeft + plot_w + 40.0, legend_y + 4.0,
                  to_string(cls));
    out << buf;
    legend_y += 18.0;
    ++color;
  }
  out << "</svg>\n";
}

}  // namespace vtc
