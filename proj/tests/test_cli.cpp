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

// End-to-end drive of the command line binary: synth -> split -> train ->
// tune -> apply -> eval -> report on a corpus small enough to finish in
// seconds. The whole pipeline runs once; test cases inspect its outputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "test_util.hpp"
#include "vtc/audio.hpp"
#include "vtc/manifest.hpp"
#include "vtc/metrics.hpp"
#include "vtc/rttm.hpp"
#include "vtc/sliding.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Injected by the build so the test exercises exactly the binary it ships.
const char* binary_path() { return VOICETYPE_BIN; }

int run(const std::string& args, std::string* output = nullptr) {
  static int counter = 0;
  const fs::path log =
      fs::temp_directory_path() / ("vtc_cli_log_" + std::to_string(getpid()) +
                                   "_" + std::to_string(counter++));
  const std::string command = std::string(binary_path()) + " " + args + " > " +
                              log.string() + " 2>&1";
  const int raw = std::system(command.c_str());
  std::string text = vtc::test::read_text(log.string());
  fs::remove(log);
  if (output != nullptr) *output = text;
  if (raw == -1) return -1;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void run_or_die(const std::string& args) {
  std::string output;
  const int code = run(args, &output);
  if (code != 0) {
    throw std::runtime_error("command failed (" + std::to_string(code) +
                             "): " + args + "\n" + output);
  }
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

struct Pipeline {
  vtc::test::TempDir tmp{"cli"};
  std::string corpus_dir, manifest, split_manifest, run_dir, thresholds,
      curves_prefix, hyp_dir, score_dir, report, eval_table, report_table;
  std::string best_checkpoint;
  std::string test_uri;

  Pipeline() {
    corpus_dir = tmp.file("corpus");
    manifest = corpus_dir + "/manifest.jsonl";
    split_manifest = tmp.file("split.jsonl");
    run_dir = tmp.file("run");
    thresholds = tmp.file("thresholds.json");
    curves_prefix = tmp.file("curves");
    hyp_dir = tmp.file("hyp");
    score_dir = tmp.file("scores");
    report = tmp.file("report.json");

    run_or_die("synth --out " + corpus_dir +
               " --recordings 3 --seconds 12 --children 3"
               " --noise-files 1 --noise-seconds 4 --seed 5");
    run_or_die("split --manifest " + manifest + " --out " + split_manifest +
               " --seed 3");

    const std::string config = tmp.file("config.json");
    vtc::test::write_text(config, R"({
      "model": {
        "chunk_duration": 0.5,
        "sinc": {"filters": 6, "length": 31, "stride": 10, "pool": 3},
        "conv_blocks": [{"filters": 8, "kernel": 5, "pool": 3}],
        "recurrent": {"layers": 1, "hidden": 8},
        "head": {"layers": 1, "width": 16}
      },
      "train": {
        "epochs": 2,
        "epoch_seconds": 16,
        "batch_size": 4,
        "seed": 9
      }
    })");
    run_or_die("train --manifest " + split_manifest + " --out " + run_dir +
               " --config " + config);
    run_or_die("tune --manifest " + split_manifest + " --split dev" +
               " --checkpoint " + run_dir + "/epoch_001.ckpt " + run_dir +
               "/epoch_002.ckpt --out " + thresholds + " --step 0.25" +
               " --curves " + curves_prefix);

    best_checkpoint = json::parse(std::ifstream(thresholds))
                          .at("checkpoint")
                          .get<std::string>();
    run_or_die("apply --manifest " + split_manifest + " --split test" +
               " --checkpoint " + best_checkpoint + " --thresholds " +
               thresholds + " --out " + hyp_dir + " --scores " + score_dir +
               " --step 0.25");

    const int eval_code =
        run("eval --manifest " + split_manifest + " --split test --hyp " +
                hyp_dir + " --out " + report + " --name tiny",
            &eval_table);
    if (eval_code != 0) {
      throw std::runtime_error("eval failed:\n" + eval_table);
    }
    const int report_code =
        run("report tiny=" + report + " again=" + report, &report_table);
    if (report_code != 0) {
      throw std::runtime_error("report failed:\n" + report_table);
    }

    for (const auto& e :
         vtc::filter_split(vtc::load_manifest(split_manifest), "test")) {
      test_uri = e.uri;
    }
  }
};

const Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

}  // namespace

TEST_CASE("synth writes a corpus the manifest loader accepts") {
  const auto& p = pipeline();
  const auto entries = vtc::load_manifest(p.manifest);
  REQUIRE(entries.size() == 3);
  for (const auto& e : entries) {
    CHECK(fs::exists(e.audio));
    CHECK(fs::exists(e.rttm));
    CHECK(vtc::wav_duration(e.audio) == doctest::Approx(12.0));
    CHECK_FALSE(e.child_id.empty());
    // References must parse and carry at least one voice segment.
    const auto annotations = vtc::parse_rttm_file(e.rttm);
    REQUIRE(annotations.size() == 1);
    CHECK(annotations[0].uri == e.uri);
    CHECK(annotations[0].entries.size() > 0);
  }
  int noise_wavs = 0;
  for (const auto& f : fs::directory_iterator(p.corpus_dir + "/noise")) {
    if (f.path().extension() == ".wav") ++noise_wavs;
  }
  CHECK(noise_wavs == 1);
}

TEST_CASE("split assigns every child to exactly one split") {
  const auto& p = pipeline();
  const auto entries = vtc::load_manifest(p.split_manifest);
  REQUIRE(entries.size() == 3);
  std::map<std::string, std::set<std::string>> children_by_split;
  for (const auto& e : entries) {
    REQUIRE((e.split == "train" || e.split == "dev" || e.split == "test"));
    children_by_split[e.split].insert(e.child_id);
  }
  CHECK(children_by_split.size() == 3);
  std::set<std::string> seen;
  for (const auto& [split, children] : children_by_split) {
    for (const auto& c : children) {
      CHECK(seen.insert(c).second);  // no child straddles two splits
    }
  }
}

TEST_CASE("train writes checkpoints, a log and the resolved configuration") {
  const auto& p = pipeline();
  CHECK(fs::exists(p.run_dir + "/epoch_001.ckpt"));
  CHECK(fs::exists(p.run_dir + "/epoch_002.ckpt"));
  CHECK_FALSE(fs::exists(p.run_dir + "/epoch_003.ckpt"));

  const json model = json::parse(std::ifstream(p.run_dir + "/model.json"));
  CHECK(model.at("sinc").at("filters").get<int>() == 6);
  CHECK(model.at("chunk_duration").get<double>() == 0.5);
  const json train = json::parse(std::ifstream(p.run_dir + "/train.json"));
  CHECK(train.at("epochs").get<int>() == 2);
  CHECK(train.at("seed").get<uint64_t>() == 9);

  // 16 s / 0.5 s chunks / batch 4 = 8 steps per epoch, two epochs logged.
  CHECK(count_lines(p.run_dir + "/train_log.jsonl") == 16);
}

TEST_CASE("tune writes thresholds inside the grid plus sweep curves") {
  const auto& p = pipeline();
  const auto t = vtc::load_thresholds(p.thresholds);
  REQUIRE(t.sigma.size() == vtc::output_classes().size());
  for (const auto& [cls, sigma] : t.sigma) {
    CHECK(sigma >= 0.05);
    CHECK(sigma <= 0.95);
  }
  const json j = json::parse(std::ifstream(p.thresholds));
  const int epoch = j.at("epoch").get<int>();
  CHECK(epoch >= 1);
  CHECK(epoch <= 2);
  CHECK(fs::exists(j.at("checkpoint").get<std::string>()));

  // Header plus one row per default grid point.
  CHECK(count_lines(p.curves_prefix + ".csv") == 20);
  const std::string svg = vtc::test::read_text(p.curves_prefix + ".svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("apply writes an rttm hypothesis and a raw score dump") {
  const auto& p = pipeline();
  REQUIRE_FALSE(p.test_uri.empty());
  const std::string rttm = p.hyp_dir + "/" + p.test_uri + ".rttm";
  REQUIRE(fs::exists(rttm));
  // May be empty after two toy epochs, but it must parse when present.
  for (const auto& a : vtc::parse_rttm_file(rttm)) {
    CHECK(a.uri == p.test_uri);
  }
  CHECK(fs::exists(p.score_dir + "/" + p.test_uri + ".scores"));
  const json sidecar = json::parse(
      std::ifstream(p.score_dir + "/" + p.test_uri + ".scores.json"));
  CHECK(sidecar.at("count").get<int>() > 0);
  CHECK(sidecar.at("classes").size() == vtc::output_classes().size());
}

TEST_CASE("eval prints a table and writes a parseable report") {
  const auto& p = pipeline();
  CHECK(p.eval_table.find("Ave.") != std::string::npos);
  CHECK(p.eval_table.find("tiny") != std::string::npos);
  CHECK(p.eval_table.find("KCHI") != std::string::npos);
  const auto parsed =
      vtc::report_from_json(json::parse(std::ifstream(p.report)));
  CHECK(parsed.per_class.size() == vtc::output_classes().size());
}

TEST_CASE("report prints one row per input") {
  const auto& p = pipeline();
  CHECK(p.report_table.find("tiny") != std::string::npos);
  CHECK(p.report_table.find("again") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero") {
  const auto& p = pipeline();
  CHECK(run("frobnicate") != 0);
  CHECK(run("train --out /tmp/nowhere") != 0);  // missing required --manifest
  CHECK(run("tune --manifest " + p.split_manifest + " --checkpoint " +
            p.run_dir + "/epoch_001.ckpt --out /tmp/t.json --grid banana") !=
        0);
  CHECK(run("apply --manifest " + p.split_manifest +
            " --checkpoint /no/such.ckpt --thresholds " + p.thresholds +
            " --out /tmp/nowhere") != 0);
  CHECK(run("eval --manifest " + p.split_manifest +
            " --split nonexistent --hyp " + p.hyp_dir) != 0);
}
