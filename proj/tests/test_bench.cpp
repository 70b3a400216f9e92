// tests/test_bench.cpp

// Copyright 2026  maskbench authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>

#include "maskbench/bench/derange.hpp"
#include "maskbench/bench/experiment.hpp"
#include "maskbench/bench/manifest.hpp"
#include "maskbench/bench/qualitative.hpp"
#include "maskbench/bench/synthcorpus.hpp"

using namespace maskbench;
using namespace maskbench::bench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("derange never maps an element to itself") {
  SECTION("two elements can only swap") {
    const auto p = derange(2, 123);
    CHECK(p == std::vector<size_t>{1, 0});
  }
  SECTION("sizes and seeds") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
      for (size_t n : {2, 3, 10, 257}) {
        const auto p = derange(n, seed);
        REQUIRE(p.size() == n);
        std::set<size_t> seen;
        for (size_t i = 0; i < n; ++i) {
          REQUIRE(p[i] != i);
          seen.insert(p[i]);
        }
        REQUIRE(seen.size() == n);  // a permutation
      }
    }
  }
  SECTION("deterministic under the seed") {
    CHECK(derange(1000, 7) == derange(1000, 7));
    CHECK(derange(1000, 7) != derange(1000, 8));
  }
  SECTION("singleton cannot be deranged") {
    CHECK_THROWS_AS(derange(1, 0), ConsistencyError);
  }
}

TEST_CASE("manifest round trips through JSON") {
  RunManifest m;
  m.config = {{"name", "t"}};
  StageRecord s;
  s.name = "stage1";
  s.inputs["a.txt"] = "00ff";
  s.outputs["b.txt"] = "11ee";
  s.wall_ms = 12.5;
  m.stages.push_back(s);
  const std::string path =
      (fs::temp_directory_path() / "mb_manifest.json").string();
  write_manifest(m, path);
  RunManifest r = read_manifest(path);
  REQUIRE(r.stages.size() == 1);
  CHECK(r.stages[0].name == "stage1");
  CHECK(r.stages[0].inputs.at("a.txt") == "00ff");
  CHECK(r.stages[0].outputs.at("b.txt") == "11ee");
  CHECK(r.tool_version == kToolVersion);
}

TEST_CASE("qualitative dump ranks by masked-position disagreement") {
  std::map<std::string, std::vector<std::string>> refs = {
      {"u1", {"the", "dog", "ran"}},
      {"u2", {"a", "cat", "sat"}},
      {"u3", {"big", "bird", "flew"}}};
  std::map<std::string, std::vector<int>> masked = {
      {"u1", {1}}, {"u2", {1}}, {"u3", {1}}};

  // u2: three-way disagreement; u1: two runs differ; u3: all agree.
  std::vector<DecodedRun> runs = {
      {"run_a",
       {{"u1", {"the", "dog", "ran"}},
        {"u2", {"a", "cat", "sat"}},
        {"u3", {"big", "bird", "flew"}}}},
      {"run_b",
       {{"u1", {"the", "dog", "ran"}},
        {"u2", {"a", "hat", "sat"}},
        {"u3", {"big", "bird", "flew"}}}},
      {"run_c",
       {{"u1", {"the", "cog", "ran"}},
        {"u2", {"a", "mat", "sat"}},
        {"u3", {"big", "bird", "flew"}}}}};

  SECTION("identical runs give zero disagreement") {
    std::vector<DecodedRun> same = {runs[0], runs[0], runs[0]};
    auto entries = qualitative_dump(same, refs, masked, 5);
    for (const auto& e : entries) CHECK(e.disagreement == 0);
  }
  SECTION("k = 0 gives an empty table") {
    CHECK(qualitative_dump(runs, refs, masked, 0).empty());
  }
  SECTION("max-disagreement utterance is selected first") {
    auto entries = qualitative_dump(runs, refs, masked, 2);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].id == "u1");  // ties broken by id; u1 and u2 both disagree
    // u1 and u2 each have one disagreeing masked position; u3 has none.
    CHECK(entries[0].disagreement == 1);
    CHECK(entries[1].id == "u2");
    CHECK(entries[1].disagreement == 1);
    // A deletion shows as the *** marker.
    std::vector<DecodedRun> with_del = {
        {"short", {{"u1", {"the"}}, {"u2", {"a"}}, {"u3", {"big"}}}},
        runs[0]};
    auto entries2 = qualitative_dump(with_del, refs, masked, 3);
    bool saw_marker = false;
    for (const auto& e : entries2) {
      for (const auto& [name, toks] : e.aligned) {
        for (const auto& t : toks) {
          if (t == "***") saw_marker = true;
        }
      }
    }
    CHECK(saw_marker);
    const std::string text = render_qualitative(entries2);
    CHECK(text.find("[dog]") != std::string::npos);
  }
}

TEST_CASE("synth corpus generates a consistent miniature dataset") {
  const fs::path dir = fresh_dir("mb_synth_unit");
  SynthSpec spec;
  spec.n_utts = 12;
  spec.vocab_words = 8;
  spec.n_targets = 2;
  spec.fillers_per_utt = 2;
  spec.train_count = 8;
  spec.seed = 5;
  const SynthPaths paths = generate_synth_corpus(spec, dir.string());

  const auto trans = read_transcripts(paths.trans);
  REQUIRE(trans.size() == 12);
  const auto tagged = lexmask::read_tagged_transcripts(paths.tagged);
  const auto ctm = corruptor::parse_ctm(read_text_file(paths.ctm));

  // Every utterance has exactly one NN token and it is a target word.
  for (const auto& [id, toks] : tagged) {
    int nn = 0;
    for (const auto& t : toks) {
      if (t.pos == "NN") {
        ++nn;
        CHECK((t.token == "w00" || t.token == "w01"));
      }
    }
    CHECK(nn == 1);
    CHECK(toks.size() == 3);
    REQUIRE(ctm.count(id) == 1);
    CHECK(ctm.at(id).size() == 3);
  }

  // Visual archive rows are one-hot on the target's vocab index.
  const auto visual = signalio::read_features(paths.visual);
  const auto ids = read_list_file(paths.visual_ids);
  REQUIRE(visual.frames.rows() == 12);
  REQUIRE(visual.frames.cols() == 8);
  for (long r = 0; r < visual.frames.rows(); ++r) {
    CHECK(visual.frames.row(r).sum() == 1.0);
  }
  CHECK(ids.size() == 12);
  CHECK(read_list_file(paths.train_list).size() == 8);
  CHECK(read_list_file(paths.test_list).size() == 4);

  // Audio (per word) is a clean tone: the wav exists and is non-silent.
  const auto w = signalio::read_wav(
      (fs::path(paths.wav_dir) / (ids[0] + ".wav")).string());
  CHECK(w.samples.size() > 8000);
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak > 0.2);
  CHECK(peak <= 0.31);
}

TEST_CASE("experiment pipeline runs end to end and is reproducible") {
  const fs::path data_dir = fresh_dir("mb_exp_data");
  SynthSpec spec;
  spec.n_utts = 16;
  spec.vocab_words = 8;
  spec.n_targets = 2;
  spec.fillers_per_utt = 2;
  spec.word_duration = 0.12;
  spec.word_gap = 0.04;
  spec.train_count = 12;
  spec.seed = 9;
  const SynthPaths paths = generate_synth_corpus(spec, data_dir.string());

  ExperimentConfig cfg;
  cfg.name = "unit-mini";
  cfg.data.wav_dir = paths.wav_dir;
  cfg.data.trans = paths.trans;
  cfg.data.tagged = paths.tagged;
  cfg.data.ctm = paths.ctm;
  cfg.data.visual = paths.visual;
  cfg.data.visual_ids = paths.visual_ids;
  cfg.data.train_list = paths.train_list;
  cfg.data.test_list = paths.test_list;
  cfg.wordset.type = WordsetSpec::Type::kNouns;
  cfg.wordset.n = 2;
  cfg.mask.type = corruptor::MaskType::kSilence;
  cfg.features.n_mels = 20;
  cfg.model.enc_hidden = 6;
  cfg.model.enc_layers = 3;
  cfg.model.subsample = {1, 2};
  cfg.model.dec_hidden = 8;
  cfg.model.embed = 6;
  cfg.model.attn = 6;
  cfg.train.epochs = 2;
  cfg.seeds = {4};
  Condition uni{"unimodal", VisualMode::kNone, Congruency::kCongruent};
  Condition multi{"multimodal", VisualMode::kArchive, Congruency::kCongruent};
  Condition incdec{"incdec", VisualMode::kArchive,
                   Congruency::kIncongruentDecode};
  cfg.conditions = {uni, multi, incdec};

  const fs::path out1 = fresh_dir("mb_exp_out1");
  cfg.out_dir = out1.string();
  const ResultsTable t1 = run_experiment(cfg);
  REQUIRE(t1.conditions.size() == 3);
  CHECK(t1.find("unimodal") != nullptr);
  CHECK(t1.find("unimodal")->seeds.size() == 1);
  CHECK(t1.find("unimodal")->seeds[0].rr.has_value());

  // All artifacts exist.
  CHECK(fs::exists(out1 / "wordset.txt"));
  CHECK(fs::exists(out1 / "plans.json"));
  CHECK(fs::exists(out1 / "manifest.json"));
  CHECK(fs::exists(out1 / "results.json"));
  CHECK(fs::exists(out1 / "cond_unimodal" / "seed_4" / "hyp.txt"));
  CHECK(fs::exists(out1 / "cond_multimodal" / "seed_4" / "score.json"));
  // Incongruent decoding reuses the congruent multimodal checkpoint: only
  // one archive-visual checkpoint exists.
  CHECK(fs::exists(out1 / "ckpts" / "archive_congruent_4.mbmodel"));
  CHECK(!fs::exists(out1 / "ckpts" / "archive_deranged_4.mbmodel"));

  // Re-running into a second directory reproduces the table bit-for-bit and
  // every stage output hash.
  const fs::path out2 = fresh_dir("mb_exp_out2");
  cfg.out_dir = out2.string();
  const ResultsTable t2 = run_experiment(cfg);
  CHECK(results_to_json(t1).dump() == results_to_json(t2).dump());

  const RunManifest m1 = read_manifest((out1 / "manifest.json").string());
  const RunManifest m2 = read_manifest((out2 / "manifest.json").string());
  REQUIRE(m1.stages.size() == m2.stages.size());
  for (size_t i = 0; i < m1.stages.size(); ++i) {
    CHECK(m1.stages[i].name == m2.stages[i].name);
    CHECK(m1.stages[i].outputs == m2.stages[i].outputs);
  }
}

TEST_CASE("experiment config validation catches broken inputs") {
  ExperimentConfig cfg;
  cfg.out_dir = (fs::temp_directory_path() / "mb_cfg_out").string();
  cfg.data.wav_dir = "/nonexistent/wavs";
  cfg.data.trans = "/nonexistent/trans.txt";
  cfg.data.ctm = "/nonexistent/align.ctm";
  cfg.data.train_list = "/nonexistent/train.list";
  cfg.data.test_list = "/nonexistent/test.list";
  Condition c{"x", VisualMode::kNone, Congruency::kCongruent};
  cfg.conditions = {c};
  CHECK_THROWS_AS(validate_config(cfg), ConsistencyError);

  ExperimentConfig dup = cfg;
  dup.seeds = {1, 1};
  CHECK_THROWS_AS(validate_config(dup), ConsistencyError);
}

TEST_CASE("experiment config JSON round trip") {
  nlohmann::json j = {
      {"name", "roundtrip"},
      {"data",
       {{"wav_dir", "w"},
        {"trans", "t"},
        {"ctm", "c"},
        {"train_list", "tr"},
        {"test_list", "te"}}},
      {"wordset", {{"type", "nouns"}, {"n", 7}}},
      {"mask", {{"type", "noise"}, {"noise_std", 0.2}}},
      {"seeds", {11, 12}},
      {"conditions",
       {{{"name", "a"}, {"visual", "none"}, {"congruency", "congruent"}},
        {{"name", "b"},
         {"visual", "archive"},
         {"congruency", "incongruent_train"}}}},
      {"out_dir", "/tmp/mb_out"}};
  const ExperimentConfig cfg = experiment_config_from_json(j);
  CHECK(cfg.name == "roundtrip");
  CHECK(cfg.wordset.n == 7);
  CHECK(cfg.mask.type == corruptor::MaskType::kWhiteNoise);
  CHECK(cfg.mask.noise_std == 0.2);
  CHECK(cfg.seeds == std::vector<uint64_t>{11, 12});
  REQUIRE(cfg.conditions.size() == 2);
  CHECK(cfg.conditions[1].congruency == Congruency::kIncongruentTrain);
  const nlohmann::json back = experiment_config_to_json(cfg);
  const ExperimentConfig cfg2 = experiment_config_from_json(back);
  CHECK(experiment_config_to_json(cfg2) == back);
}
