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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "vtc/checkpoint.hpp"
#include "vtc/loss.hpp"
#include "vtc/lr_schedule.hpp"
#include "vtc/rttm.hpp"
#include "vtc/synth.hpp"
#include "vtc/trainer.hpp"

using namespace vtc;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using vtc::test::TempDir;

TEST_CASE("bce matches closed forms") {
  // Indifferent scores on one positive and one negative slot: ln 2.
  MatrixXd scores(1, 2), targets(1, 2);
  scores << 0.5, 0.5;
  targets << 1.0, 0.0;
  CHECK(bce_loss(scores, targets) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // A single positive scored 0.25: -ln 0.25.
  MatrixXd s1(1, 1), t1(1, 1);
  s1 << 0.25;
  t1 << 1.0;
  CHECK(bce_loss(s1, t1) ==
        doctest::Approx(-std::log(0.25)).epsilon(1e-12));

  // Perfect scores are clamped, never infinite.
  MatrixXd s2(1, 2), t2(1, 2);
  s2 << 0.0, 1.0;
  t2 << 1.0, 0.0;
  const double worst = bce_loss(s2, t2);
  CHECK(std::isfinite(worst));
  CHECK(worst == doctest::Approx(-std::log(kScoreClamp)).epsilon(1e-9));
}

TEST_CASE("batch bce averages across every slot of every item") {
  MatrixXd a(1, 2), b(1, 2), ta(1, 2), tb(1, 2);
  a << 0.5, 0.5;
  b << 0.25, 0.25;
  ta << 1.0, 0.0;
  tb << 1.0, 1.0;
  const double want = (2.0 * std::log(2.0) + 2.0 * -std::log(0.25)) / 4.0;
  const std::vector<MatrixXd> scores{a, b};
  const std::vector<MatrixXd> targets{ta, tb};
  CHECK(bce_loss(scores, targets) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("bce logit gradient matches finite differences") {
  Rng rng(2001);
  MatrixXd logits(3, 4), targets(3, 4);
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 3; ++r) {
      logits(r, c) = rng.uniform(-3.0, 3.0);
      targets(r, c) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    }
  }
  const auto loss_at = [&](const MatrixXd& z) {
    return bce_loss(std::vector<MatrixXd>{nn::sigmoid(z)},
                    std::vector<MatrixXd>{targets});
  };
  const auto grads =
      bce_grad_logits({nn::sigmoid(logits)}, {targets});
  REQUIRE(grads.size() == 1);
  const double h = 1e-6;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 3; ++r) {
      MatrixXd up = logits, down = logits;
      up(r, c) += h;
      down(r, c) -= h;
      const double numeric = (loss_at(up) - loss_at(down)) / (2.0 * h);
      CHECK(grads[0](r, c) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("cyclical schedule rises to the peak and repeats") {
  const double base = 1e-4, peak = 1e-2;
  const int64_t spe = 100;  // cycle length 150 with the default 1.5 epochs

  CHECK(cyclical_lr(0, spe, base, peak) == doctest::Approx(base).epsilon(1e-12));
  CHECK(cyclical_lr(75, spe, base, peak) ==
        doctest::Approx(peak).epsilon(1e-12));
  CHECK(cyclical_lr(150, spe, base, peak) ==
        doctest::Approx(base).epsilon(1e-12));
  // Periodicity.
  for (int64_t s = 0; s < 150; s += 7) {
    CHECK(cyclical_lr(s, spe, base, peak) ==
          doctest::Approx(cyclical_lr(s + 150, spe, base, peak))
              .epsilon(1e-12));
  }
  // Triangular symmetry around the peak.
  CHECK(cyclical_lr(30, spe, base, peak) ==
        doctest::Approx(cyclical_lr(120, spe, base, peak)).epsilon(1e-12));
  // Strictly rising on the way up.
  for (int64_t s = 0; s < 75; ++s) {
    CHECK(cyclical_lr(s + 1, spe, base, peak) >
          cyclical_lr(s, spe, base, peak));
  }
  // Every value stays inside the band.
  for (int64_t s = 0; s < 400; ++s) {
    const double lr = cyclical_lr(s, spe, base, peak);
    CHECK(lr >= base - 1e-15);
    CHECK(lr <= peak + 1e-15);
  }
}

TEST_CASE("mode strings select output classes") {
  CHECK(classes_for_mode("multitask") == output_classes());
  const auto fem = classes_for_mode("binary:FEM");
  REQUIRE(fem.size() == 1);
  CHECK(fem[0] == VoiceClass::FEM);
  CHECK(classes_for_mode("binary:SPEECH")[0] == VoiceClass::SPEECH);
  CHECK_THROWS(classes_for_mode("binary:UNK"));  // never predicted
  CHECK_THROWS(classes_for_mode("binary:"));
  CHECK_THROWS(classes_for_mode("solo"));
}

TEST_CASE("train config json round trips and merges") {
  TrainConfig c;
  c.epochs = 7;
  c.epoch_seconds = 120.0;
  c.batch_size = 3;
  c.seed = 99;
  c.mode = "binary:MAL";
  const auto j = c.to_json();
  const auto back = TrainConfig::from_json(j);
  CHECK(back.epochs == 7);
  CHECK(back.epoch_seconds == 120.0);
  CHECK(back.batch_size == 3);
  CHECK(back.seed == 99);
  CHECK(back.mode == "binary:MAL");

  const auto merged =
      TrainConfig::from_json(nlohmann::json{{"epochs", 2}}, c);
  CHECK(merged.epochs == 2);
  CHECK(merged.mode == "binary:MAL");

  TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS(bad.validate());
  bad = TrainConfig{};
  bad.max_lr = 1e-5;  // below base_lr
  CHECK_THROWS(bad.validate());
}

// ---------------------------------------------------------------------------
// Training set loading
// ---------------------------------------------------------------------------

namespace {

// Two usable recordings plus one too short to hold a chunk.
std::vector<ManifestEntry> tiny_manifest(const TempDir& tmp,
                                         const std::string& split = "") {
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < 2; ++i) {
    const std::string uri = "rec" + std::to_string(i);
    const std::string wav = tmp.file(uri + ".wav");
    const std::string rttm = tmp.file(uri + ".rttm");
    write_wav(wav, vtc::test::make_sine(200.0 + 100.0 * i, 6.0, 16000));
    Annotation a;
    a.uri = uri;
    a.entries = {{{1.0, 2.5}, VoiceClass::KCHI}, {{3.0, 4.0}, VoiceClass::UNK}};
    write_rttm_file(rttm, a);
    entries.push_back({uri, wav, rttm, split, "", ""});
  }
  const std::string wav = tmp.file("short.wav");
  const std::string rttm = tmp.file("short.rttm");
  write_wav(wav, vtc::test::make_sine(300.0, 0.4, 16000));
  Annotation a;
  a.uri = "short";
  a.entries = {{{0.0, 0.2}, VoiceClass::FEM}};
  write_rttm_file(rttm, a);
  entries.push_back({"short", wav, rttm, split, "", ""});
  return entries;
}

ModelConfig trainer_test_model() {
  ModelConfig c;
  c.sample_rate = 16000;
  c.chunk_duration = 0.5;
  c.sinc_filters = 6;
  c.sinc_length = 31;
  c.sinc_stride = 10;
  c.sinc_pool = 3;
  c.conv_blocks = {{8, 5, 3}};
  c.recurrent_layers = 1;
  c.recurrent_hidden = 8;
  c.head_layers = 1;
  c.head_width = 16;
  return c;
}

}  // namespace

TEST_CASE("load_training_set derives speech and drops short recordings") {
  TempDir tmp("load");
  const auto manifest = tiny_manifest(tmp);
  const auto recs = load_training_set(manifest, 16000, 2.0, "");
  REQUIRE(recs.size() == 2);  // "short" dropped
  for (const auto& r : recs) {
    CHECK(r.reference.has_class(VoiceClass::SPEECH));
    // UNK feeds the derived speech.
    const auto sp = r.reference.support(VoiceClass::SPEECH);
    REQUIRE(sp.size() == 2);
    CHECK(sp[1].onset == doctest::Approx(3.0));
    CHECK(sp[1].offset == doctest::Approx(4.0));
  }
}

TEST_CASE("load_training_set respects splits") {
  TempDir tmp("split");
  auto manifest = tiny_manifest(tmp);
  // No split anywhere: everything is used.
  CHECK(load_training_set(manifest, 16000, 2.0, "").size() == 2);

  // Mark one entry train: only it is used.
  manifest[0].split = "train";
  manifest[1].split = "dev";
  manifest[2].split = "dev";
  CHECK(load_training_set(manifest, 16000, 2.0, "").size() == 1);

  // Splits exist but none is train: configuration error.
  manifest[0].split = "dev";
  CHECK_THROWS(load_training_set(manifest, 16000, 2.0, ""));
}

TEST_CASE("training writes checkpoints, a log and falling losses") {
  TempDir tmp("train");
  TempDir out("trainout");
  const auto manifest = tiny_manifest(tmp);

  TrainConfig tc;
  tc.epochs = 2;
  tc.epoch_seconds = 16.0;
  tc.batch_size = 4;
  tc.seed = 3;
  const auto result = train(trainer_test_model(), tc, manifest, out.str());

  REQUIRE(result.checkpoint_paths.size() == 2);
  CHECK(result.checkpoint_paths[0].find("epoch_001.ckpt") != std::string::npos);
  CHECK(result.checkpoint_paths[1].find("epoch_002.ckpt") != std::string::npos);
  REQUIRE(result.epoch_losses.size() == 2);
  for (double l : result.epoch_losses) {
    CHECK(std::isfinite(l));
    CHECK(l > 0.0);
  }

  // steps_per_epoch = round(16 / 0.5 / 4) = 8.
  std::ifstream log(result.log_path);
  REQUIRE(log.good());
  std::string line;
  int64_t lines = 0;
  const int64_t spe = 8;
  while (std::getline(log, line)) {
    const auto j = nlohmann::json::parse(line);
    const int64_t step = j.at("step").get<int64_t>();
    CHECK(j.at("epoch").get<int>() == static_cast<int>(step / spe) + 1);
    CHECK(j.at("lr").get<double>() ==
          doctest::Approx(cyclical_lr(step, spe, tc.base_lr, tc.max_lr,
                                      tc.cycle_epochs))
              .epsilon(1e-12));
    CHECK(std::isfinite(j.at("loss").get<double>()));
    ++lines;
  }
  CHECK(lines == 2 * spe);

  // Checkpoint metadata carries the epoch and cumulative steps.
  const auto first = load_checkpoint(result.checkpoint_paths[0]);
  CHECK(first.meta.epoch == 1);
  CHECK(first.meta.global_step == spe);
  CHECK(first.meta.mean_loss == doctest::Approx(result.epoch_losses[0]));
  const auto second = load_checkpoint(result.checkpoint_paths[1]);
  CHECK(second.meta.epoch == 2);
  CHECK(second.meta.global_step == 2 * spe);
  CHECK(!second.meta.rng_state.empty());
}

TEST_CASE("training is bit-reproducible") {
  TempDir tmp("repro");
  TempDir out_a("outa");
  TempDir out_b("outb");
  const auto manifest = tiny_manifest(tmp);

  TrainConfig tc;
  tc.epochs = 1;
  tc.epoch_seconds = 8.0;
  tc.batch_size = 2;
  tc.seed = 11;
  const auto ra = train(trainer_test_model(), tc, manifest, out_a.str());
  const auto rb = train(trainer_test_model(), tc, manifest, out_b.str());

  const auto ba = vtc::test::read_bytes(ra.checkpoint_paths[0]);
  const auto bb = vtc::test::read_bytes(rb.checkpoint_paths[0]);
  REQUIRE(!ba.empty());
  CHECK(ba == bb);

  // A different seed diverges.
  TempDir out_c("outc");
  tc.seed = 12;
  const auto rc = train(trainer_test_model(), tc, manifest, out_c.str());
  CHECK(vtc::test::read_bytes(rc.checkpoint_paths[0]) != ba);
}

TEST_CASE("binary mode trains a single-class model") {
  TempDir tmp("bin");
  TempDir out("binout");
  const auto manifest = tiny_manifest(tmp);

  TrainConfig tc;
  tc.epochs = 1;
  tc.epoch_seconds = 8.0;
  tc.batch_size = 2;
  tc.seed = 5;
  tc.mode = "binary:KCHI";
  const auto result = train(trainer_test_model(), tc, manifest, out.str());
  const auto loaded = load_checkpoint(result.checkpoint_paths[0]);
  REQUIRE(loaded.model->config().classes.size() == 1);
  CHECK(loaded.model->config().classes[0] == VoiceClass::KCHI);
}

TEST_CASE("the binary suite trains one model per output class") {
  TempDir tmp("suite");
  TempDir out("suiteout");
  const auto manifest = tiny_manifest(tmp);

  TrainConfig tc;
  tc.epochs = 1;
  tc.epoch_seconds = 4.0;
  tc.batch_size = 2;
  tc.seed = 8;
  const auto results =
      train_binary_suite(trainer_test_model(), tc, manifest, out.str());
  REQUIRE(results.size() == output_classes().size());
  for (const VoiceClass c : output_classes()) {
    REQUIRE(results.count(c) == 1);
    const auto& r = results.at(c);
    REQUIRE(r.checkpoint_paths.size() == 1);
    const auto loaded = load_checkpoint(r.checkpoint_paths[0]);
    REQUIRE(loaded.model->config().classes.size() == 1);
    CHECK(loaded.model->config().classes[0] == c);
    CHECK(r.checkpoint_paths[0].find(std::string("binary_") + to_string(c)) !=
          std::string::npos);
  }
}

TEST_CASE("augmented training still reproduces bit-exactly") {
  TempDir tmp("aug");
  TempDir noise_dir("augnoise");
  TempDir out_a("auga");
  TempDir out_b("augb");
  const auto manifest = tiny_manifest(tmp);
  write_wav(noise_dir.file("n0.wav"),
            vtc::test::make_sine(60.0, 1.0, 16000, 0.3));

  TrainConfig tc;
  tc.epochs = 1;
  tc.epoch_seconds = 8.0;
  tc.batch_size = 2;
  tc.seed = 21;
  tc.augment = true;
  tc.noise_dir = noise_dir.str();
  const auto ra = train(trainer_test_model(), tc, manifest, out_a.str());
  const auto rb = train(trainer_test_model(), tc, manifest, out_b.str());
  CHECK(vtc::test::read_bytes(ra.checkpoint_paths[0]) ==
        vtc::test::read_bytes(rb.checkpoint_paths[0]));

  // Turning augmentation off changes the run.
  TempDir out_c("augc");
  tc.augment = false;
  const auto rc = train(trainer_test_model(), tc, manifest, out_c.str());
  CHECK(vtc::test::read_bytes(rc.checkpoint_paths[0]) !=
        vtc::test::read_bytes(ra.checkpoint_paths[0]));
}
