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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "vtc/metrics.hpp"
#include "vtc/split.hpp"
#include "vtc/tune.hpp"

using namespace vtc;
using vtc::test::TempDir;

namespace {

Annotation single(const std::string& uri, VoiceClass cls, double on,
                  double off) {
  Annotation a;
  a.uri = uri;
  a.entries = {{{on, off}, cls}};
  return a;
}

}  // namespace

TEST_CASE("detection counts on hand-checked interval layouts") {
  SUBCASE("half overlap") {
    const auto c = detection_counts(single("u", VoiceClass::KCHI, 0, 10),
                                    single("u", VoiceClass::KCHI, 5, 15),
                                    VoiceClass::KCHI);
    CHECK(c.tp == doctest::Approx(5.0));
    CHECK(c.fp == doctest::Approx(5.0));
    CHECK(c.fn == doctest::Approx(5.0));
  }
  SUBCASE("disjoint") {
    const auto c = detection_counts(single("u", VoiceClass::KCHI, 0, 2),
                                    single("u", VoiceClass::KCHI, 3, 5),
                                    VoiceClass::KCHI);
    CHECK(c.tp == doctest::Approx(0.0));
    CHECK(c.fp == doctest::Approx(2.0));
    CHECK(c.fn == doctest::Approx(2.0));
  }
  SUBCASE("nested") {
    const auto c = detection_counts(single("u", VoiceClass::FEM, 0, 10),
                                    single("u", VoiceClass::FEM, 2, 4),
                                    VoiceClass::FEM);
    CHECK(c.tp == doctest::Approx(2.0));
    CHECK(c.fp == doctest::Approx(0.0));
    CHECK(c.fn == doctest::Approx(8.0));
  }
  SUBCASE("classes do not leak into each other") {
    const auto c = detection_counts(single("u", VoiceClass::KCHI, 0, 10),
                                    single("u", VoiceClass::FEM, 0, 10),
                                    VoiceClass::KCHI);
    CHECK(c.tp == doctest::Approx(0.0));
    CHECK(c.fp == doctest::Approx(0.0));
    CHECK(c.fn == doctest::Approx(10.0));
  }
}

TEST_CASE("uem regions crop both sides before counting") {
  const auto ref = single("u", VoiceClass::MAL, 0, 10);
  const auto hyp = single("u", VoiceClass::MAL, 5, 15);
  const auto c =
      detection_counts(ref, hyp, VoiceClass::MAL, {{0.0, 10.0}});
  CHECK(c.tp == doctest::Approx(5.0));
  CHECK(c.fp == doctest::Approx(0.0));  // [10, 15) is outside the region
  CHECK(c.fn == doctest::Approx(5.0));

  // Disjoint scoring regions.
  const auto c2 = detection_counts(ref, hyp, VoiceClass::MAL,
                                   {{0.0, 2.0}, {8.0, 12.0}});
  CHECK(c2.tp == doctest::Approx(2.0));  // [8, 10)
  CHECK(c2.fp == doctest::Approx(2.0));  // [10, 12)
  CHECK(c2.fn == doctest::Approx(2.0));  // [0, 2) is the only missed ref
}

TEST_CASE("prf conventions for empty references and hypotheses") {
  // Nothing to find, nothing claimed: perfect score.
  Prf p = prf_from_counts({0.0, 0.0, 0.0});
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f == 1.0);

  // Nothing to find but false alarms: zero precision, full recall.
  p = prf_from_counts({0.0, 3.0, 0.0});
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f == 0.0);

  // Something to find, nothing claimed: zero everything.
  p = prf_from_counts({0.0, 0.0, 4.0});
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f == 0.0);
}

TEST_CASE("f is the harmonic mean of precision and recall") {
  // p = 0.5, r = 0.25: harmonic mean 1/3. A common transcription slip
  // (dividing by p*r instead of p+r) would return 2 here.
  const Prf p = prf_from_counts({1.0, 1.0, 3.0});
  CHECK(p.precision == doctest::Approx(0.5));
  CHECK(p.recall == doctest::Approx(0.25));
  CHECK(p.f == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p.f <= 1.0);
}

TEST_CASE("evaluate micro-accumulates counts before computing f") {
  std::map<std::string, Annotation> refs, hyps;
  refs["u1"] = single("u1", VoiceClass::KCHI, 0, 10);
  hyps["u1"] = single("u1", VoiceClass::KCHI, 0, 5);
  refs["u2"] = single("u2", VoiceClass::KCHI, 0, 1);
  hyps["u2"] = single("u2", VoiceClass::KCHI, 0, 1);

  const auto report = evaluate(refs, hyps, {VoiceClass::KCHI});
  const auto& kchi = report.per_class.at(VoiceClass::KCHI);
  CHECK(kchi.counts.tp == doctest::Approx(6.0));
  CHECK(kchi.counts.fn == doctest::Approx(5.0));
  // Micro F: 2*6 / (2*6 + 0 + 5), not the mean of per-file F values.
  CHECK(kchi.scores.f == doctest::Approx(12.0 / 17.0).epsilon(1e-12));
  CHECK(report.average_f == doctest::Approx(12.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("an absent class with no false alarms scores f = 1") {
  std::map<std::string, Annotation> refs, hyps;
  refs["u"] = single("u", VoiceClass::KCHI, 0, 5);
  hyps["u"] = single("u", VoiceClass::KCHI, 0, 5);
  const auto report =
      evaluate(refs, hyps, {VoiceClass::KCHI, VoiceClass::OCH});
  CHECK(report.per_class.at(VoiceClass::OCH).scores.f == 1.0);
  CHECK(report.per_class.at(VoiceClass::KCHI).scores.f ==
        doctest::Approx(1.0));
  CHECK(report.average_f == doctest::Approx(1.0));
}

TEST_CASE("recordings without a hypothesis count as empty and are listed") {
  std::map<std::string, Annotation> refs, hyps;
  refs["u1"] = single("u1", VoiceClass::FEM, 0, 4);
  refs["u2"] = single("u2", VoiceClass::FEM, 0, 6);
  hyps["u1"] = single("u1", VoiceClass::FEM, 0, 4);

  const auto report = evaluate(refs, hyps, {VoiceClass::FEM});
  REQUIRE(report.missing_uris.size() == 1);
  CHECK(report.missing_uris[0] == "u2");
  const auto& fem = report.per_class.at(VoiceClass::FEM);
  CHECK(fem.counts.tp == doctest::Approx(4.0));
  CHECK(fem.counts.fn == doctest::Approx(6.0));
}

TEST_CASE("evaluate derives speech in references that lack it") {
  std::map<std::string, Annotation> refs, hyps;
  refs["u"] = single("u", VoiceClass::UNK, 0, 3);
  Annotation hyp;
  hyp.uri = "u";
  hyp.entries = {{{0.0, 3.0}, VoiceClass::SPEECH}};
  hyps["u"] = hyp;

  const auto report = evaluate(refs, hyps, {VoiceClass::SPEECH});
  CHECK(report.per_class.at(VoiceClass::SPEECH).scores.f ==
        doctest::Approx(1.0));
}

TEST_CASE("report json round trips") {
  std::map<std::string, Annotation> refs, hyps;
  refs["u"] = single("u", VoiceClass::KCHI, 0, 10);
  hyps["u"] = single("u", VoiceClass::KCHI, 2, 11);
  auto report = evaluate(refs, hyps, output_classes());
  report.missing_uris.push_back("ghost");

  const auto j = report_to_json(report);
  const auto back = report_from_json(j);
  CHECK(back.classes == report.classes);
  CHECK(back.average_f == report.average_f);
  REQUIRE(back.missing_uris.size() == 1);
  for (const auto c : report.classes) {
    CHECK(back.per_class.at(c).scores.f == report.per_class.at(c).scores.f);
    CHECK(back.per_class.at(c).counts.tp == report.per_class.at(c).counts.tp);
  }
}

TEST_CASE("the report table shows percent f with the average last") {
  EvalReport report;
  report.classes = output_classes();
  const double fs[5] = {0.687, 0.332, 0.429, 0.634, 0.784};
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    ClassReport cr;
    cr.scores.f = fs[i];
    report.per_class[report.classes[i]] = cr;
    sum += fs[i];
  }
  report.average_f = sum / 5.0;

  const std::string table = format_report_table({{"model", report}});
  CHECK(table.find("model") != std::string::npos);
  CHECK(table.find("68.7") != std::string::npos);
  CHECK(table.find("33.2") != std::string::npos);
  CHECK(table.find("42.9") != std::string::npos);
  CHECK(table.find("63.4") != std::string::npos);
  CHECK(table.find("78.4") != std::string::npos);
  CHECK(table.find("57.3") != std::string::npos);  // macro average
  // Column order: classes then the average, which comes last.
  CHECK(table.find("KCHI") < table.find("SPEECH"));
  CHECK(table.find("SPEECH") < table.find("Ave."));
  CHECK(table.rfind("Ave.") > table.rfind("SPEECH"));
}

// ---------------------------------------------------------------------------
// Threshold tuning
// ---------------------------------------------------------------------------

namespace {

// 10 s on a 0.5 s grid; frames [0, 10) of 20.
ScoreTrack step_track(const std::vector<VoiceClass>& classes,
                      const std::vector<std::pair<double, double>>& levels) {
  // levels[c] = {value on frames 0-9, value on frames 10-19}.
  ScoreTrack t;
  t.grid = {0.0, 0.5, 20};
  t.classes = classes;
  t.values.resize(20, static_cast<int64_t>(classes.size()));
  for (size_t c = 0; c < classes.size(); ++c) {
    for (int r = 0; r < 20; ++r) {
      t.values(r, static_cast<int64_t>(c)) =
          r < 10 ? levels[c].first : levels[c].second;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("tuning picks the f-maximizing threshold, lowest on ties") {
  EpochScores epoch;
  epoch.epoch = 1;
  epoch.checkpoint_path = "epoch_001.ckpt";
  epoch.scores["u"] = step_track({VoiceClass::KCHI}, {{0.8, 0.4}});
  std::map<std::string, Annotation> refs;
  refs["u"] = single("u", VoiceClass::KCHI, 0, 5);

  const auto result = tune_thresholds({epoch}, refs);
  CHECK(result.best_epoch == 1);
  CHECK(result.checkpoint_path == "epoch_001.ckpt");
  // F = 1 for every sigma in [0.40, 0.75]; the tie keeps the lowest.
  CHECK(result.thresholds.sigma.at(VoiceClass::KCHI) == doctest::Approx(0.40));
  CHECK(result.best_average_f == doctest::Approx(1.0));

  // The sweep curve is recorded per grid value: 0.05 ... 0.95.
  REQUIRE(result.grid.size() == 19);
  const auto& curve = result.f_by_sigma.at(VoiceClass::KCHI);
  REQUIRE(curve.size() == 19);
  CHECK(curve[6] == doctest::Approx(2.0 / 3.0));  // 0.35: false alarms remain
  CHECK(curve[7] == doctest::Approx(1.0));        // 0.40: clean split
  CHECK(curve[14] == doctest::Approx(1.0));       // 0.75: still clean
  CHECK(curve[15] == doctest::Approx(0.0));       // 0.80: everything gone
  CHECK(curve.back() == doctest::Approx(0.0));
}

TEST_CASE("tuning tie-breaks toward the earlier epoch") {
  std::map<std::string, Annotation> refs;
  refs["u"] = single("u", VoiceClass::KCHI, 0, 5);
  EpochScores e1, e2;
  e1.epoch = 1;
  e1.scores["u"] = step_track({VoiceClass::KCHI}, {{0.8, 0.4}});
  e2.epoch = 2;
  e2.scores["u"] = step_track({VoiceClass::KCHI}, {{0.8, 0.4}});
  // Presented out of order on purpose.
  const auto result = tune_thresholds({e2, e1}, refs);
  CHECK(result.best_epoch == 1);
  REQUIRE(result.average_f_by_epoch.size() == 2);
  CHECK(result.average_f_by_epoch[0].first == 1);
  CHECK(result.average_f_by_epoch[1].first == 2);
}

TEST_CASE("a strictly better later epoch wins") {
  std::map<std::string, Annotation> refs;
  refs["u"] = single("u", VoiceClass::KCHI, 0, 5);

  // Epoch 1: scores overlap so no threshold separates them cleanly.
  EpochScores e1;
  e1.epoch = 1;
  {
    ScoreTrack t;
    t.grid = {0.0, 0.5, 20};
    t.classes = {VoiceClass::KCHI};
    t.values.resize(20, 1);
    for (int r = 0; r < 20; ++r) {
      const bool in_ref = r < 10;
      // Two reference frames sink below two non-reference frames.
      if (in_ref) {
        t.values(r, 0) = r < 8 ? 0.9 : 0.2;
      } else {
        t.values(r, 0) = r < 12 ? 0.6 : 0.1;
      }
    }
    e1.scores["u"] = t;
  }
  // Epoch 2: clean separation.
  EpochScores e2;
  e2.epoch = 2;
  e2.scores["u"] = step_track({VoiceClass::KCHI}, {{0.9, 0.1}});

  const auto result = tune_thresholds({e1, e2}, refs);
  CHECK(result.best_epoch == 2);
  CHECK(result.best_average_f == doctest::Approx(1.0));
  CHECK(result.thresholds.sigma.at(VoiceClass::KCHI) == doctest::Approx(0.10));
  // Both epochs appear in the sweep summary, in epoch order.
  REQUIRE(result.average_f_by_epoch.size() == 2);
  CHECK(result.average_f_by_epoch[0].second < 1.0);
  CHECK(result.average_f_by_epoch[1].second == doctest::Approx(1.0));
}

TEST_CASE("tuned thresholds reproduce their f when applied") {
  Rng rng(4001);
  EpochScores epoch;
  epoch.epoch = 1;
  ScoreTrack t;
  t.grid = {0.0, 0.25, 40};
  t.classes = {VoiceClass::KCHI, VoiceClass::SPEECH};
  t.values.resize(40, 2);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 2; ++c) t.values(r, c) = rng.uniform();
  }
  epoch.scores["u"] = t;

  std::map<std::string, Annotation> refs;
  Annotation ref;
  ref.uri = "u";
  ref.entries = {{{1.0, 4.0}, VoiceClass::KCHI},
                 {{1.0, 6.5}, VoiceClass::SPEECH}};
  refs["u"] = ref;

  const auto result = tune_thresholds({epoch}, refs);

  // Replaying the decision chain by hand gives the same average F, exactly.
  std::map<std::string, Annotation> hyps;
  hyps["u"] = binarize(t, result.thresholds, "u");
  const auto report = evaluate(refs, hyps, t.classes);
  CHECK(report.average_f == result.best_average_f);
}

TEST_CASE("tuning respects uem regions") {
  std::map<std::string, Annotation> refs;
  refs["u"] = single("u", VoiceClass::KCHI, 0, 2);
  EpochScores epoch;
  epoch.epoch = 1;
  ScoreTrack t;
  t.grid = {0.0, 0.5, 20};
  t.classes = {VoiceClass::KCHI};
  t.values.resize(20, 1);
  for (int r = 0; r < 20; ++r) {
    t.values(r, 0) = r < 4 ? 0.9 : (r < 10 ? 0.8 : 0.9);  // junk tail
  }
  epoch.scores["u"] = t;

  std::map<std::string, std::vector<Segment>> uem;
  uem["u"] = {{0.0, 5.0}};
  const auto with_uem = tune_thresholds({epoch}, refs, {0.8}, uem);
  CHECK(with_uem.best_average_f == doctest::Approx(1.0));
  const auto without = tune_thresholds({epoch}, refs, {0.8});
  CHECK(without.best_average_f < 1.0);
}

TEST_CASE("tuning requires references for every scored uri") {
  EpochScores epoch;
  epoch.epoch = 1;
  epoch.scores["mystery"] = step_track({VoiceClass::KCHI}, {{0.8, 0.4}});
  CHECK_THROWS(tune_thresholds({epoch}, {}));
  CHECK_THROWS(tune_thresholds({}, {}));  // no epochs at all
}

TEST_CASE("threshold sweep curves land on disk as csv and svg") {
  TempDir tmp("curves");
  EpochScores epoch;
  epoch.epoch = 1;
  epoch.scores["u"] =
      step_track({VoiceClass::KCHI, VoiceClass::SPEECH}, {{0.8, 0.4}, {0.7, 0.3}});
  std::map<std::string, Annotation> refs;
  Annotation ref;
  ref.uri = "u";
  ref.entries = {{{0.0, 5.0}, VoiceClass::KCHI},
                 {{0.0, 5.0}, VoiceClass::SPEECH}};
  refs["u"] = ref;
  const auto result = tune_thresholds({epoch}, refs);

  const std::string csv_path = tmp.file("curves.csv");
  write_threshold_curves_csv(csv_path, result);
  const std::string csv = vtc::test::read_text(csv_path);
  CHECK(csv.find("sigma") != std::string::npos);
  CHECK(csv.find("KCHI") != std::string::npos);
  // One header plus one row per grid value.
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<int64_t>(result.grid.size()) + 1);

  const std::string svg_path = tmp.file("curves.svg");
  write_threshold_curves_svg(svg_path, result);
  const std::string svg = vtc::test::read_text(svg_path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

// ---------------------------------------------------------------------------
// Corpus splitting
// ---------------------------------------------------------------------------

namespace {

std::vector<ManifestEntry> entries_for_children(int n, int recs_per_child) {
  std::vector<ManifestEntry> entries;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < recs_per_child; ++r) {
      ManifestEntry e;
      e.uri = "c" + std::to_string(c) + "_r" + std::to_string(r);
      e.audio = e.uri + ".wav";
      e.rttm = e.uri + ".rttm";
      e.child_id = "child_" + std::to_string(c);
      entries.push_back(e);
    }
  }
  return entries;
}

std::map<std::string, double> uniform_durations(
    const std::vector<ManifestEntry>& entries, double seconds) {
  std::map<std::string, double> d;
  for (const auto& e : entries) d[e.uri] = seconds;
  return d;
}

}  // namespace

TEST_CASE("three equal children land one per split") {
  const auto entries = entries_for_children(3, 2);
  const auto durations = uniform_durations(entries, 60.0);
  for (uint64_t seed : {1ULL, 2ULL, 3ULL, 99ULL}) {
    const auto assigned = assign_splits(entries, durations, {}, seed);
    std::map<std::string, std::set<std::string>> by_split;
    for (const auto& e : assigned) by_split[e.split].insert(e.child_id);
    REQUIRE(by_split.size() == 3);
    CHECK(by_split.at("train").size() == 1);
    CHECK(by_split.at("dev").size() == 1);
    CHECK(by_split.at("test").size() == 1);
  }
}

TEST_CASE("children never straddle splits") {
  const auto entries = entries_for_children(10, 3);
  std::map<std::string, double> durations;
  Rng rng(4002);
  for (const auto& e : entries) durations[e.uri] = rng.uniform(30.0, 600.0);

  const auto assigned = assign_splits(entries, durations, {}, 7);
  CHECK(assigned.size() == entries.size());
  std::map<std::string, std::string> child_split;
  for (const auto& e : assigned) {
    REQUIRE((e.split == "train" || e.split == "dev" || e.split == "test"));
    auto [it, inserted] = child_split.emplace(e.child_id, e.split);
    if (!inserted) CHECK(it->second == e.split);
  }

  // The train split holds the largest share of total duration.
  std::map<std::string, double> split_duration;
  for (const auto& e : assigned) split_duration[e.split] += durations[e.uri];
  CHECK(split_duration["train"] > split_duration["dev"]);
  CHECK(split_duration["train"] > split_duration["test"]);
}

TEST_CASE("split assignment is deterministic per seed") {
  const auto entries = entries_for_children(8, 2);
  const auto durations = uniform_durations(entries, 120.0);
  const auto a = assign_splits(entries, durations, {}, 5);
  const auto b = assign_splits(entries, durations, {}, 5);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].split == b[i].split);
}

TEST_CASE("pinned entries are honored before balancing") {
  auto entries = entries_for_children(4, 1);
  entries[2].pin_split = "test";
  const auto durations = uniform_durations(entries, 60.0);
  const auto assigned = assign_splits(entries, durations, {}, 1);
  for (const auto& e : assigned) {
    if (e.uri == entries[2].uri) CHECK(e.split == "test");
  }

  // Conflicting pins for one child are rejected.
  auto conflict = entries_for_children(3, 2);
  conflict[0].pin_split = "train";
  conflict[1].pin_split = "dev";  // same child, different split
  CHECK_THROWS(
      assign_splits(conflict, uniform_durations(conflict, 60.0), {}, 1));

  // Unknown split names are rejected.
  auto bad = entries_for_children(3, 1);
  bad[0].pin_split = "validation";
  CHECK_THROWS(assign_splits(bad, uniform_durations(bad, 60.0), {}, 1));
}

TEST_CASE("degenerate corpora are rejected") {
  const auto two = entries_for_children(2, 3);
  CHECK_THROWS(assign_splits(two, uniform_durations(two, 60.0), {}, 1));

  const auto three = entries_for_children(3, 1);
  std::map<std::string, double> missing;  // no durations at all
  CHECK_THROWS(assign_splits(three, missing, {}, 1));

  // Every child pinned to train leaves dev and test empty.
  auto pinned = entries_for_children(3, 1);
  for (auto& e : pinned) e.pin_split = "train";
  CHECK_THROWS(
      assign_splits(pinned, uniform_durations(pinned, 60.0), {}, 1));
}

TEST_CASE("entries without child ids fall back to uri grouping") {
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < 6; ++i) {
    ManifestEntry e;
    e.uri = "rec" + std::to_string(i);
    e.audio = e.uri + ".wav";
    entries.push_back(e);
  }
  const auto assigned =
      assign_splits(entries, uniform_durations(entries, 60.0), {}, 3);
  std::set<std::string> seen;
  for (const auto& e : assigned) seen.insert(e.split);
  CHECK(seen.size() == 3);
}
