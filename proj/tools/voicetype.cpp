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

// Command line front end: synthesize a desk-scale corpus, split it by child,
// train multitask or per-class models, tune decision thresholds on scored
// checkpoints, apply a model to recordings and evaluate the hypotheses.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vtc/audio.hpp"
#include "vtc/checkpoint.hpp"
#include "vtc/manifest.hpp"
#include "vtc/metrics.hpp"
#include "vtc/model.hpp"
#include "vtc/rttm.hpp"
#include "vtc/sliding.hpp"
#include "vtc/split.hpp"
#include "vtc/synth.hpp"
#include "vtc/trainer.hpp"
#include "vtc/tune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<vtc::ManifestEntry> entries_for(const std::string& manifest_path,
                                            const std::string& split) {
  const auto all = vtc::load_manifest(manifest_path);
  auto picked = vtc::filter_split(all, split);
  if (picked.empty()) {
    throw std::runtime_error(manifest_path + ": no entries" +
                             (split.empty() ? "" : " in split '" + split + "'"));
  }
  return picked;
}

std::vector<double> parse_grid(const std::string& text) {
  // lo:hi:step, inclusive of hi up to rounding.
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw std::runtime_error("grid must be lo:hi:step, got '" + text + "'");
  }
  const double lo = std::stod(text.substr(0, first));
  const double hi = std::stod(text.substr(first + 1, second - first - 1));
  const double step = std::stod(text.substr(second + 1));
  if (!(step > 0.0) || hi < lo) {
    throw std::runtime_error("grid must be lo:hi:step with step > 0");
  }
  std::vector<double> grid;
  const auto count = static_cast<int64_t>(std::floor((hi - lo) / step + 1e-9));
  for (int64_t i = 0; i <= count; ++i) grid.push_back(lo + i * step);
  return grid;
}

std::map<std::string, std::vector<vtc::Segment>> load_uem_opt(
    const std::string& path) {
  if (path.empty()) return {};
  return vtc::parse_uem_file(path);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int run_synth(const std::string& out_dir, const vtc::SynthConfig& config) {
  const auto corpus = vtc::generate_synthetic_corpus(out_dir, config);
  std::cout << corpus.manifest_path << "\n";
  std::cerr << "[synth] " << corpus.entries.size() << " recordings, noise in "
            << corpus.noise_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

int run_split(const std::string& manifest_path, const std::string& out_path,
              const vtc::SplitFractions& fractions, uint64_t seed) {
  const auto entries = vtc::load_manifest(manifest_path);
  std::map<std::string, double> durations;
  for (const auto& e : entries) durations[e.uri] = vtc::wav_duration(e.audio);
  const auto assigned = vtc::assign_splits(entries, durations, fractions, seed);
  vtc::save_manifest(out_path, assigned);

  std::map<std::string, double> split_seconds;
  for (const auto& e : assigned) split_seconds[e.split] += durations[e.uri];
  for (const auto& [name, seconds] : split_seconds) {
    std::cerr << "[split] " << name << ": " << seconds << " s\n";
  }
  std::cout << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int run_train(const std::string& manifest_path, const std::string& out_dir,
              const std::string& config_path, bool small,
              const std::string& mode, int epochs, double epoch_seconds,
              int batch_size, int64_t seed, const std::string& cache_dir) {
  vtc::ModelConfig model = small ? vtc::ModelConfig::small() : vtc::ModelConfig{};
  vtc::TrainConfig train_config;
  if (!config_path.empty()) {
    const json j = load_json_file(config_path);
    if (j.contains("model")) {
      model = vtc::ModelConfig::from_json(j.at("model"), model);
    }
    if (j.contains("train")) {
      train_config = vtc::TrainConfig::from_json(j.at("train"), train_config);
    }
  }
  if (!mode.empty()) train_config.mode = mode;
  if (epochs > 0) train_config.epochs = epochs;
  if (epoch_seconds > 0.0) train_config.epoch_seconds = epoch_seconds;
  if (batch_size > 0) train_config.batch_size = batch_size;
  if (seed >= 0) train_config.seed = static_cast<uint64_t>(seed);

  fs::create_directories(out_dir);
  const auto entries = vtc::load_manifest(manifest_path);

  if (train_config.mode == "binary-suite") {
    write_json_file((fs::path(out_dir) / "model.json").string(), model.to_json());
    write_json_file((fs::path(out_dir) / "train.json").string(),
                    train_config.to_json());
    const auto results = vtc::train_binary_suite(model, train_config, entries,
                                                 out_dir, cache_dir);
    for (const auto& [cls, result] : results) {
      std::cout << vtc::to_string(cls) << " "
                << result.checkpoint_paths.back() << "\n";
    }
    return 0;
  }

  train_config.validate();
  // The resolved configuration next to the checkpoints documents the run.
  write_json_file((fs::path(out_dir) / "model.json").string(), model.to_json());
  write_json_file((fs::path(out_dir) / "train.json").string(),
                  train_config.to_json());
  const auto result =
      vtc::train(model, train_config, entries, out_dir, cache_dir);
  for (const auto& path : result.checkpoint_paths) std::cout << path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

int run_tune(const std::string& manifest_path, const std::string& split,
             const std::vector<std::string>& checkpoints,
             const std::string& out_path, double step,
             const std::string& grid_text, const std::string& uem_path,
             const std::string& curves_prefix, const std::string& cache_dir) {
  // Parse the grid before scoring so a bad spec fails fast.
  const auto grid =
      grid_text.empty() ? vtc::default_threshold_grid() : parse_grid(grid_text);
  const auto entries = entries_for(manifest_path, split);
  const auto refs = vtc::load_references(entries);
  const auto uem = load_uem_opt(uem_path);

  std::vector<vtc::EpochScores> epochs;
  std::vector<vtc::VoiceClass> classes;
  for (const auto& path : checkpoints) {
    auto loaded = vtc::load_checkpoint(path);
    if (epochs.empty()) {
      classes = loaded.model->config().classes;
    } else if (loaded.model->config().classes != classes) {
      throw std::runtime_error(path +
                               ": checkpoints to tune must share one class set");
    }
    vtc::ModelScorer scorer(*loaded.model);
    vtc::SlidingSpec sliding{loaded.model->config().chunk_duration, step};
    vtc::EpochScores es;
    es.epoch = loaded.meta.epoch;
    es.checkpoint_path = path;
    es.scores = vtc::score_files(scorer, entries, sliding, cache_dir);
    epochs.push_back(std::move(es));
    std::cerr << "[tune] scored epoch " << loaded.meta.epoch << " (" << path
              << ")\n";
  }

  const auto result = vtc::tune_thresholds(epochs, refs, grid, uem);

  vtc::save_thresholds(out_path, result.thresholds, result.best_epoch,
                       result.checkpoint_path);
  if (!curves_prefix.empty()) {
    vtc::write_threshold_curves_csv(curves_prefix + ".csv", result);
    vtc::write_threshold_curves_svg(curves_prefix + ".svg", result);
  }

  for (const auto& [epoch, avg_f] : result.average_f_by_epoch) {
    std::cerr << "[tune] epoch " << epoch << " best average F " << avg_f
              << "\n";
  }
  std::cerr << "[tune] chose epoch " << result.best_epoch << " with average F "
            << result.best_average_f << "\n";
  std::cout << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// apply
// ---------------------------------------------------------------------------

int run_apply(const std::string& manifest_path, const std::string& split,
              const std::vector<std::string>& checkpoints,
              const std::string& thresholds_path, const std::string& out_dir,
              const std::string& score_dir, double step,
              const std::string& cache_dir) {
  const auto entries = entries_for(manifest_path, split);
  const auto thresholds = vtc::load_thresholds(thresholds_path);

  if (checkpoints.size() == 1) {
    auto loaded = vtc::load_checkpoint(checkpoints[0]);
    vtc::ModelScorer scorer(*loaded.model);
    vtc::ApplyOptions options;
    options.sliding = {loaded.model->config().chunk_duration, step};
    options.out_dir = out_dir;
    options.score_dir = score_dir;
    options.cache_dir = cache_dir;
    const auto result = vtc::apply_files(scorer, thresholds, entries, options);
    for (const auto& path : result.rttm_paths) std::cout << path << "\n";
    if (!result.failed_uris.empty()) {
      std::cerr << "[apply] " << result.failed_uris.size()
                << " recording(s) failed\n";
      return 1;
    }
    return 0;
  }

  // Several single-class models vote on disjoint classes; their decisions
  // merge into one hypothesis per recording.
  std::vector<vtc::LoadedCheckpoint> models;
  for (const auto& path : checkpoints) {
    models.push_back(vtc::load_checkpoint(path));
  }
  if (!score_dir.empty()) {
    throw std::runtime_error(
        "--scores supports a single checkpoint; raw dumps are per model");
  }
  fs::create_directories(out_dir);
  std::vector<std::string> failed;
  for (const auto& entry : entries) {
    try {
      vtc::Annotation merged;
      merged.uri = entry.uri;
      for (auto& m : models) {
        const vtc::Waveform audio = vtc::load_audio(
            entry.audio, m.model->config().sample_rate, cache_dir);
        vtc::ModelScorer scorer(*m.model);
        vtc::SlidingSpec sliding{m.model->config().chunk_duration, step};
        const auto track = vtc::slide_scores(scorer, audio, sliding);
        const auto hyp = vtc::binarize(track, thresholds, entry.uri);
        for (const auto& e : hyp.entries) merged.entries.push_back(e);
      }
      const std::string rttm_path =
          (fs::path(out_dir) / (entry.uri + ".rttm")).string();
      vtc::write_rttm_file(rttm_path, merged.normalized());
      std::cout << rttm_path << "\n";
    } catch (const std::exception& e) {
      std::cerr << "[apply] " << entry.uri << " failed: " << e.what() << "\n";
      failed.push_back(entry.uri);
    }
  }
  if (!failed.empty()) {
    std::cerr << "[apply] " << failed.size() << " recording(s) failed\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int run_eval(const std::string& manifest_path, const std::string& split,
             const std::string& hyp_dir, const std::string& out_path,
             const std::string& uem_path, const std::string& name) {
  const auto entries = entries_for(manifest_path, split);
  const auto refs = vtc::load_references(entries);
  const auto uem = load_uem_opt(uem_path);

  std::map<std::string, vtc::Annotation> hyps;
  for (const auto& entry : entries) {
    const fs::path path = fs::path(hyp_dir) / (entry.uri + ".rttm");
    if (!fs::exists(path)) continue;  // counted as missing by evaluate
    for (auto& a : vtc::parse_rttm_file(path.string())) {
      if (a.uri == entry.uri) hyps[entry.uri] = std::move(a);
    }
  }

  const auto report = vtc::evaluate(refs, hyps, vtc::output_classes(), uem);
  if (!out_path.empty()) {
    write_json_file(out_path, vtc::report_to_json(report));
  }
  std::cout << vtc::format_report_table({{name, report}});
  if (!report.missing_uris.empty()) {
    std::cerr << "[eval] " << report.missing_uris.size()
              << " recording(s) had no hypothesis\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int run_report(const std::vector<std::string>& specs) {
  std::vector<std::pair<std::string, vtc::EvalReport>> rows;
  for (const auto& spec : specs) {
    std::string name, path;
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      path = spec;
      name = fs::path(spec).stem().string();
    } else {
      name = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    }
    rows.emplace_back(name, vtc::report_from_json(load_json_file(path)));
  }
  std::cout << vtc::format_report_table(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voice type classification toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic test corpus with known voice bands");
  std::string synth_out;
  vtc::SynthConfig synth_config;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--recordings", synth_config.recordings, "recording count");
  synth->add_option("--seconds", synth_config.recording_seconds,
                    "seconds per recording");
  synth->add_option("--children", synth_config.children, "distinct children");
  synth->add_option("--noise-files", synth_config.noise_files,
                    "background noise files");
  synth->add_option("--noise-seconds", synth_config.noise_seconds,
                    "seconds per noise file");
  synth->add_option("--seed", synth_config.seed, "corpus seed");
  synth->add_option("--split", synth_config.split,
                    "stamp this split on every entry");

  // split
  auto* split = app.add_subcommand(
      "split", "assign child-disjoint train/dev/test splits");
  std::string split_manifest, split_out;
  uint64_t split_seed = 1;
  vtc::SplitFractions fractions;
  split->add_option("--manifest", split_manifest, "input manifest")->required();
  split->add_option("--out", split_out, "output manifest")->required();
  split->add_option("--seed", split_seed, "shuffle seed");
  split->add_option("--train", fractions.train, "train fraction");
  split->add_option("--dev", fractions.dev, "dev fraction");
  split->add_option("--test", fractions.test, "test fraction");

  // train
  auto* train = app.add_subcommand("train", "train a classifier");
  std::string train_manifest, train_out, train_config_path, train_mode;
  std::string train_cache = vtc::audio_cache_dir_from_env();
  int train_epochs = 0, train_batch = 0;
  double train_epoch_seconds = 0.0;
  int64_t train_seed = -1;
  bool train_small = false;
  train->add_option("--manifest", train_manifest, "training manifest")
      ->required();
  train->add_option("--out", train_out, "checkpoint directory")->required();
  train->add_option("--config", train_config_path,
                    "json with optional 'model' and 'train' overrides");
  train->add_option("--mode", train_mode,
                    "multitask | binary:<CLASS> | binary-suite");
  train->add_option("--epochs", train_epochs, "override epoch count");
  train->add_option("--epoch-seconds", train_epoch_seconds,
                    "override audio seconds per epoch");
  train->add_option("--batch-size", train_batch, "override batch size");
  train->add_option("--seed", train_seed, "override training seed");
  train->add_flag("--small", train_small,
                  "start from the desk-scale architecture");
  train->add_option("--cache", train_cache, "resampled audio cache directory");

  // tune
  auto* tune = app.add_subcommand(
      "tune", "pick per-class thresholds and the best checkpoint");
  std::string tune_manifest, tune_split, tune_out, tune_grid, tune_uem,
      tune_curves;
  std::string tune_cache = vtc::audio_cache_dir_from_env();
  std::vector<std::string> tune_checkpoints;
  double tune_step = 0.5;
  tune->add_option("--manifest", tune_manifest, "manifest with references")
      ->required();
  tune->add_option("--split", tune_split, "restrict to one split");
  tune->add_option("--checkpoint", tune_checkpoints,
                   "checkpoint(s) to sweep, one per epoch")
      ->required()
      ->expected(-1);
  tune->add_option("--out", tune_out, "thresholds json")->required();
  tune->add_option("--step", tune_step, "sliding step in seconds");
  tune->add_option("--grid", tune_grid, "threshold grid lo:hi:step");
  tune->add_option("--uem", tune_uem, "scoring regions (uem)");
  tune->add_option("--curves", tune_curves,
                   "write <prefix>.csv and <prefix>.svg sweep curves");
  tune->add_option("--cache", tune_cache, "resampled audio cache directory");

  // apply
  auto* apply = app.add_subcommand(
      "apply", "run a model over recordings and write rttm hypotheses");
  std::string apply_manifest, apply_split, apply_thresholds, apply_out,
      apply_scores;
  std::string apply_cache = vtc::audio_cache_dir_from_env();
  std::vector<std::string> apply_checkpoints;
  double apply_step = 0.5;
  apply->add_option("--manifest", apply_manifest, "manifest to score")
      ->required();
  apply->add_option("--split", apply_split, "restrict to one split");
  apply->add_option("--checkpoint", apply_checkpoints,
                    "model checkpoint(s); several single-class models merge")
      ->required()
      ->expected(-1);
  apply->add_option("--thresholds", apply_thresholds, "thresholds json")
      ->required();
  apply->add_option("--out", apply_out, "rttm output directory")->required();
  apply->add_option("--scores", apply_scores, "raw score dump directory");
  apply->add_option("--step", apply_step, "sliding step in seconds");
  apply->add_option("--cache", apply_cache, "resampled audio cache directory");

  // eval
  auto* eval = app.add_subcommand(
      "eval", "score rttm hypotheses against manifest references");
  std::string eval_manifest, eval_split, eval_hyp, eval_out, eval_uem;
  std::string eval_name = "model";
  eval->add_option("--manifest", eval_manifest, "manifest with references")
      ->required();
  eval->add_option("--split", eval_split, "restrict to one split");
  eval->add_option("--hyp", eval_hyp, "directory of <uri>.rttm hypotheses")
      ->required();
  eval->add_option("--out", eval_out, "report json");
  eval->add_option("--uem", eval_uem, "scoring regions (uem)");
  eval->add_option("--name", eval_name, "row label in the printed table");

  // report
  auto* report = app.add_subcommand(
      "report", "print a combined table from report json files");
  std::vector<std::string> report_specs;
  report->add_option("reports", report_specs, "report files, name=path or path")
      ->required()
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_out, synth_config);
    if (split->parsed()) {
      return run_split(split_manifest, split_out, fractions, split_seed);
    }
    if (train->parsed()) {
      return run_train(train_manifest, train_out, train_config_path,
                       train_small, train_mode, train_epochs,
                       train_epoch_seconds, train_batch, train_seed,
                       train_cache);
    }
    if (tune->parsed()) {
      return run_tune(tune_manifest, tune_split, tune_checkpoints, tune_out,
                      tune_step, tune_grid, tune_uem, tune_curves, tune_cache);
    }
    if (apply->parsed()) {
      return run_apply(apply_manifest, apply_split, apply_checkpoints,
                       apply_thresholds, apply_out, apply_scores, apply_step,
                       apply_cache);
    }
    if (eval->parsed()) {
      return run_eval(eval_manifest, eval_split, eval_hyp, eval_out, eval_uem,
                      eval_name);
    }
    if (report->parsed()) return run_report(report_specs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
