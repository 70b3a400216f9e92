// maskbench/bench/experiment.hpp

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

#ifndef MASKBENCH_BENCH_EXPERIMENT_HPP_
#define MASKBENCH_BENCH_EXPERIMENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/align.hpp"
#include "maskbench/bench/derange.hpp"
#include "maskbench/bench/manifest.hpp"
#include "maskbench/ctm.hpp"
#include "maskbench/error.hpp"
#include "maskbench/features.hpp"
#include "maskbench/mask.hpp"
#include "maskbench/neuro/checkpoint.hpp"
#include "maskbench/neuro/train.hpp"
#include "maskbench/textio.hpp"
#include "maskbench/wav.hpp"
#include "maskbench/wordset.hpp"

namespace maskbench {
namespace bench {

namespace fs = std::filesystem;

enum class Congruency { kCongruent, kIncongruentDecode, kIncongruentTrain };
enum class VisualMode { kNone, kArchive, kIndicator };

inline std::string to_string(Congruency c) {
  switch (c) {
    case Congruency::kCongruent: return "congruent";
    case Congruency::kIncongruentDecode: return "incongruent_decode";
    case Congruency::kIncongruentTrain: return "incongruent_train";
  }
  return "congruent";
}

inline Congruency congruency_from_string(const std::string& s) {
  if (s == "congruent") return Congruency::kCongruent;
  if (s == "incongruent_decode") return Congruency::kIncongruentDecode;
  if (s == "incongruent_train") return Congruency::kIncongruentTrain;
  throw ParseError("unknown congruency: " + s);
}

inline std::string to_string(VisualMode v) {
  switch (v) {
    case VisualMode::kNone: return "none";
    case VisualMode::kArchive: return "archive";
    case VisualMode::kIndicator: return "indicator";
  }
  return "none";
}

inline VisualMode visual_mode_from_string(const std::string& s) {
  if (s == "none") return VisualMode::kNone;
  if (s == "archive") return VisualMode::kArchive;
  if (s == "indicator") return VisualMode::kIndicator;
  throw ParseError("unknown visual mode: " + s);
}

struct Condition {
  std::string name;
  VisualMode visual = VisualMode::kNone;
  Congruency congruency = Congruency::kCongruent;
};

struct DataPaths {
  std::string wav_dir;
  std::string trans;
  std::string tagged;
  std::string ctm;
  std::string visual;      // MBFEAT1 archive, rows = utterances
  std::string visual_ids;  // sidecar id-order file
  std::string train_list;
  std::string test_list;
};

struct WordsetSpec {
  enum class Type { kNouns, kPlaces, kExplicit };
  Type type = Type::kNouns;
  int n = 100;           // nouns
  std::string file;      // categories file or explicit wordset file
};

struct MaskSpec {
  corruptor::MaskType type = corruptor::MaskType::kSilence;
  double expansion = 0.25;
  double duration = 0.5;
  double noise_std = 0.1;
  uint64_t seed = 0;
};

struct FeatureSpec {
  int n_mels = 40;
  bool pitch = false;
  // Mean/variance normalization fitted on the training split and recorded in
  // the checkpoint. Archives on disk always hold raw features.
  bool normalize = true;
};

struct ModelSpec {
  int enc_hidden = 32;
  int enc_layers = 6;
  std::vector<int> subsample = {3, 4};
  int dec_hidden = 64;
  int embed = 32;
  int attn = 32;
};

struct TrainSpec {
  double lr = 1e-3;
  int epochs = 20;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DataPaths data;
  WordsetSpec wordset;
  MaskSpec mask;
  FeatureSpec features;
  ModelSpec model;
  TrainSpec train;
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::vector<Condition> conditions;
  std::string out_dir;
  int decode_max_len = 0;  // 0: 2 * longest reference + 4
};

// $MASKBENCH_WORKDIR anchors relative output paths when set.
inline std::string resolve_workdir(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  const char* base = std::getenv("MASKBENCH_WORKDIR");
  if (base == nullptr || *base == '\0') return path;
  return (fs::path(base) / path).string();
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.name = j.value("name", std::string("experiment"));
  const auto& d = j.at("data");
  cfg.data.wav_dir = d.at("wav_dir").get<std::string>();
  cfg.data.trans = d.at("trans").get<std::string>();
  cfg.data.tagged = d.value("tagged", std::string());
  cfg.data.ctm = d.at("ctm").get<std::string>();
  cfg.data.visual = d.value("visual", std::string());
  cfg.data.visual_ids = d.value("visual_ids", std::string());
  cfg.data.train_list = d.at("train_list").get<std::string>();
  cfg.data.test_list = d.at("test_list").get<std::string>();

  const auto& w = j.at("wordset");
  const std::string wtype = w.at("type").get<std::string>();
  if (wtype == "nouns") {
    cfg.wordset.type = WordsetSpec::Type::kNouns;
    cfg.wordset.n = w.value("n", 100);
  } else if (wtype == "places") {
    cfg.wordset.type = WordsetSpec::Type::kPlaces;
    cfg.wordset.file = w.at("categories").get<std::string>();
  } else if (wtype == "explicit") {
    cfg.wordset.type = WordsetSpec::Type::kExplicit;
    cfg.wordset.file = w.at("file").get<std::string>();
  } else {
    throw ParseError("unknown wordset type: " + wtype);
  }

  if (j.contains("mask")) {
    const auto& m = j.at("mask");
    cfg.mask.type =
        corruptor::mask_type_from_string(m.value("type", std::string("silence")));
    cfg.mask.expansion = m.value("expansion", 0.25);
    cfg.mask.duration = m.value("duration", 0.5);
    cfg.mask.noise_std = m.value("noise_std", 0.1);
    cfg.mask.seed = m.value("seed", 0);
  }
  if (j.contains("features")) {
    cfg.features.n_mels = j.at("features").value("n_mels", 40);
    cfg.features.pitch = j.at("features").value("pitch", false);
    cfg.features.normalize = j.at("features").value("normalize", true);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.model.enc_hidden = m.value("enc_hidden", 32);
    cfg.model.enc_layers = m.value("enc_layers", 6);
    cfg.model.subsample = m.value("subsample", std::vector<int>{3, 4});
    cfg.model.dec_hidden = m.value("dec_hidden", 64);
    cfg.model.embed = m.value("embed", 32);
    cfg.model.attn = m.value("attn", 32);
  }
  if (j.contains("train")) {
    cfg.train.lr = j.at("train").value("lr", 1e-3);
    cfg.train.epochs = j.at("train").value("epochs", 20);
  }
  cfg.seeds = j.value("seeds", std::vector<uint64_t>{1, 2, 3});
  if (j.contains("conditions")) {
    for (const auto& jc : j.at("conditions")) {
      Condition c;
      c.name = jc.at("name").get<std::string>();
      c.visual = visual_mode_from_string(jc.value("visual", std::string("none")));
      c.congruency =
          congruency_from_string(jc.value("congruency", std::string("congruent")));
      cfg.conditions.push_back(c);
    }
  } else {
    Condition c;
    c.name = "default";
    c.visual = visual_mode_from_string(j.value("visual", std::string("none")));
    c.congruency =
        congruency_from_string(j.value("congruency", std::string("congruent")));
    cfg.conditions.push_back(c);
  }
  cfg.out_dir = resolve_workdir(j.at("out_dir").get<std::string>());
  cfg.decode_max_len = j.value("decode_max_len", 0);
  return cfg;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json jc = nlohmann::json::array();
  for (const auto& c : cfg.conditions) {
    jc.push_back({{"name", c.name},
                  {"visual", to_string(c.visual)},
                  {"congruency", to_string(c.congruency)}});
  }
  nlohmann::json jw;
  switch (cfg.wordset.type) {
    case WordsetSpec::Type::kNouns:
      jw = {{"type", "nouns"}, {"n", cfg.wordset.n}};
      break;
    case WordsetSpec::Type::kPlaces:
      jw = {{"type", "places"}, {"categories", cfg.wordset.file}};
      break;
    case WordsetSpec::Type::kExplicit:
      jw = {{"type", "explicit"}, {"file", cfg.wordset.file}};
      break;
  }
  return {{"name", cfg.name},
          {"data",
           {{"wav_dir", cfg.data.wav_dir},
            {"trans", cfg.data.trans},
            {"tagged", cfg.data.tagged},
            {"ctm", cfg.data.ctm},
            {"visual", cfg.data.visual},
            {"visual_ids", cfg.data.visual_ids},
            {"train_list", cfg.data.train_list},
            {"test_list", cfg.data.test_list}}},
          {"wordset", jw},
          {"mask",
           {{"type", corruptor::to_string(cfg.mask.type)},
            {"expansion", cfg.mask.expansion},
            {"duration", cfg.mask.duration},
            {"noise_std", cfg.mask.noise_std},
            {"seed", cfg.mask.seed}}},
          {"features",
           {{"n_mels", cfg.features.n_mels},
            {"pitch", cfg.features.pitch},
            {"normalize", cfg.features.normalize}}},
          {"model",
           {{"enc_hidden", cfg.model.enc_hidden},
            {"enc_layers", cfg.model.enc_layers},
            {"subsample", cfg.model.subsample},
            {"dec_hidden", cfg.model.dec_hidden},
            {"embed", cfg.model.embed},
            {"attn", cfg.model.attn}}},
          {"train", {{"lr", cfg.train.lr}, {"epochs", cfg.train.epochs}}},
          {"seeds", cfg.seeds},
          {"conditions", jc},
          {"out_dir", cfg.out_dir},
          {"decode_max_len", cfg.decode_max_len}};
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw ConsistencyError("config: no seeds");
  std::set<uint64_t> distinct(cfg.seeds.begin(), cfg.seeds.end());
  if (distinct.size() != cfg.seeds.size()) {
    throw ConsistencyError("config: seeds must be distinct");
  }
  if (cfg.conditions.empty()) throw ConsistencyError("config: no conditions");
  if (cfg.out_dir.empty()) throw ConsistencyError("config: no out_dir");

  auto need = [](const std::string& path, const std::string& what) {
    if (path.empty() || !fs::exists(path)) {
      throw ConsistencyError("config: missing " + what + ": " + path);
    }
  };
  need(cfg.data.wav_dir, "wav dir");
  need(cfg.data.trans, "transcripts");
  need(cfg.data.ctm, "alignments");
  need(cfg.data.train_list, "train list");
  need(cfg.data.test_list, "test list");
  if (cfg.wordset.type == WordsetSpec::Type::kNouns) {
    need(cfg.data.tagged, "tagged transcripts");
  } else {
    need(cfg.wordset.file, "wordset source file");
  }
  bool any_archive = false;
  for (const auto& c : cfg.conditions) {
    if (c.visual == VisualMode::kArchive) any_archive = true;
  }
  if (any_archive) {
    need(cfg.data.visual, "visual feature archive");
    need(cfg.data.visual_ids, "visual id sidecar");
  }
  for (const auto& list : {cfg.data.train_list, cfg.data.test_list}) {
    for (const auto& id : read_list_file(list)) {
      need((fs::path(cfg.data.wav_dir) / (id + ".wav")).string(),
           "wav for " + id);
    }
  }
}

struct SeedResult {
  uint64_t seed = 0;
  double wer = 0.0;
  std::optional<double> rr;
};

struct ConditionResult {
  std::string name;
  std::vector<SeedResult> seeds;
  double mean_wer = 0.0;
  double std_wer = 0.0;
  std::optional<double> mean_rr;
  std::optional<double> std_rr;
};

struct ResultsTable {
  std::string experiment;
  std::vector<ConditionResult> conditions;

  const ConditionResult* find(const std::string& name) const {
    for (const auto& c : conditions) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

inline void finalize_condition(ConditionResult& cr) {
  double sum = 0.0;
  for (const auto& s : cr.seeds) sum += s.wer;
  cr.mean_wer = sum / cr.seeds.size();
  double var = 0.0;
  for (const auto& s : cr.seeds) {
    var += (s.wer - cr.mean_wer) * (s.wer - cr.mean_wer);
  }
  cr.std_wer = std::sqrt(var / cr.seeds.size());  // population std

  bool all_rr = true;
  for (const auto& s : cr.seeds) all_rr = all_rr && s.rr.has_value();
  if (all_rr && !cr.seeds.empty()) {
    double rsum = 0.0;
    for (const auto& s : cr.seeds) rsum += *s.rr;
    const double mean = rsum / cr.seeds.size();
    double rvar = 0.0;
    for (const auto& s : cr.seeds) rvar += (*s.rr - mean) * (*s.rr - mean);
    cr.mean_rr = mean;
    cr.std_rr = std::sqrt(rvar / cr.seeds.size());
  }
}

inline nlohmann::json results_to_json(const ResultsTable& rt) {
  nlohmann::json jt = {{"experiment", rt.experiment},
                       {"conditions", nlohmann::json::array()}};
  for (const auto& c : rt.conditions) {
    nlohmann::json js = nlohmann::json::array();
    for (const auto& s : c.seeds) {
      js.push_back({{"seed", s.seed},
                    {"wer", s.wer},
                    {"rr", s.rr ? nlohmann::json(*s.rr) : nlohmann::json()}});
    }
    jt["conditions"].push_back(
        {{"name", c.name},
         {"seeds", js},
         {"mean_wer", c.mean_wer},
         {"std_wer", c.std_wer},
         {"mean_rr", c.mean_rr ? nlohmann::json(*c.mean_rr) : nlohmann::json()},
         {"std_rr", c.std_rr ? nlohmann::json(*c.std_rr) : nlohmann::json()}});
  }
  return jt;
}

inline ResultsTable results_from_json(const nlohmann::json& j) {
  ResultsTable rt;
  rt.experiment = j.at("experiment").get<std::string>();
  for (const auto& jc : j.at("conditions")) {
    ConditionResult c;
    c.name = jc.at("name").get<std::string>();
    for (const auto& js : jc.at("seeds")) {
      SeedResult s;
      s.seed = js.at("seed").get<uint64_t>();
      s.wer = js.at("wer").get<double>();
      if (!js.at("rr").is_null()) s.rr = js.at("rr").get<double>();
      c.seeds.push_back(s);
    }
    c.mean_wer = jc.at("mean_wer").get<double>();
    c.std_wer = jc.at("std_wer").get<double>();
    if (!jc.at("mean_rr").is_null()) c.mean_rr = jc.at("mean_rr").get<double>();
    if (!jc.at("std_rr").is_null()) c.std_rr = jc.at("std_rr").get<double>();
    rt.conditions.push_back(std::move(c));
  }
  return rt;
}

inline std::string render_results_text(const ResultsTable& rt) {
  std::ostringstream os;
  os << "experiment: " << rt.experiment << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %16s %16s  %s\n", "condition",
                "WER mean+-std", "RR mean+-std", "per-seed (wer/rr)");
  os << line;
  for (const auto& c : rt.conditions) {
    std::string rr = "-";
    if (c.mean_rr) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%6.2f +- %5.2f", *c.mean_rr, *c.std_rr);
      rr = buf;
    }
    char wer[48];
    std::snprintf(wer, sizeof(wer), "%6.2f +- %5.2f", c.mean_wer, c.std_wer);
    std::ostringstream per_seed;
    for (const auto& s : c.seeds) {
      per_seed << " " << s.seed << ":" << std::fixed;
      char b[40];
      if (s.rr) {
        std::snprintf(b, sizeof(b), "%.2f/%.2f", s.wer, *s.rr);
      } else {
        std::snprintf(b, sizeof(b), "%.2f/-", s.wer);
      }
      per_seed << b;
    }
    std::snprintf(line, sizeof(line), "%-24s %16s %16s %s\n", c.name.c_str(),
                  wer, rr.c_str(), per_seed.str().c_str());
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Runner.

class ExperimentRunner {
 public:
  explicit ExperimentRunner(const ExperimentConfig& cfg) : cfg_(cfg) {}

  // Runs every condition x seed, writes all artifacts under cfg.out_dir and
  // returns the aggregated table. Any stage failure is rethrown with the
  // stage name attached.
  ResultsTable run() {
    validate_config(cfg_);
    fs::create_directories(cfg_.out_dir);
    fs::create_directories(fs::path(cfg_.out_dir) / "masked");
    fs::create_directories(fs::path(cfg_.out_dir) / "feats");
    fs::create_directories(fs::path(cfg_.out_dir) / "ckpts");
    manifest_.config = experiment_config_to_json(cfg_);

    try {
      stage_wordset();
      stage_plans();
      stage_mask();
      stage_features();
    } catch (const Error&) {
      write_manifest(manifest_, manifest_path());
      throw;
    }

    ResultsTable table;
    table.experiment = cfg_.name;
    for (const auto& cond : cfg_.conditions) {
      ConditionResult cr;
      cr.name = cond.name;
      for (uint64_t seed : cfg_.seeds) {
        try {
          cr.seeds.push_back(run_condition_seed(cond, seed));
        } catch (const Error& e) {
          write_manifest(manifest_, manifest_path());
          throw ConsistencyError("condition " + cond.name + " seed " +
                                 std::to_string(seed) + " failed: " +
                                 e.what());
        }
      }
      finalize_condition(cr);
      table.conditions.push_back(std::move(cr));
    }

    write_text_file(results_json_path(), results_to_json(table).dump(2) + "\n");
    write_text_file((fs::path(cfg_.out_dir) / "results.txt").string(),
                    render_results_text(table));
    {
      StageRecord rec;
      rec.name = "report";
      rec.outputs[rel(results_json_path())] = file_hash_hex(results_json_path());
      manifest_.stages.push_back(rec);
    }
    write_manifest(manifest_, manifest_path());
    return table;
  }

  std::string manifest_path() const {
    return (fs::path(cfg_.out_dir) / "manifest.json").string();
  }
  std::string results_json_path() const {
    return (fs::path(cfg_.out_dir) / "results.json").string();
  }

 private:
  std::string rel(const std::string& path) const {
    return fs::relative(path, cfg_.out_dir).string();
  }

  std::string masked_wav_path(const std::string& id) const {
    return (fs::path(cfg_.out_dir) / "masked" / (id + ".wav")).string();
  }
  std::string feat_path(const std::string& id) const {
    return (fs::path(cfg_.out_dir) / "feats" / (id + ".feat")).string();
  }

  void stage_wordset() {
    StageTimer timer;
    StageRecord rec;
    rec.name = "wordset";
    switch (cfg_.wordset.type) {
      case WordsetSpec::Type::kNouns: {
        rec.inputs[rel_or_abs(cfg_.data.tagged)] =
            file_hash_hex(cfg_.data.tagged);
        wordset_ = lexmask::top_nouns(
            lexmask::read_tagged_transcripts(cfg_.data.tagged),
            cfg_.wordset.n);
        break;
      }
      case WordsetSpec::Type::kPlaces: {
        rec.inputs[rel_or_abs(cfg_.wordset.file)] =
            file_hash_hex(cfg_.wordset.file);
        const auto trans = read_transcripts(cfg_.data.trans);
        std::set<std::string> vocab;
        for (const auto& [utt, toks] : trans) {
          vocab.insert(toks.begin(), toks.end());
        }
        wordset_ = lexmask::place_words(
            vocab, lexmask::read_categories(cfg_.wordset.file));
        break;
      }
      case WordsetSpec::Type::kExplicit: {
        rec.inputs[rel_or_abs(cfg_.wordset.file)] =
            file_hash_hex(cfg_.wordset.file);
        wordset_ = lexmask::read_wordset(cfg_.wordset.file);
        break;
      }
    }
    const std::string out =
        (fs::path(cfg_.out_dir) / "wordset.txt").string();
    lexmask::write_wordset(wordset_, out);
    rec.outputs[rel(out)] = file_hash_hex(out);
    rec.wall_ms = timer.elapsed_ms();
    manifest_.stages.push_back(rec);
  }

  void stage_plans() {
    StageTimer timer;
    StageRecord rec;
    rec.name = "plan";
    rec.inputs[rel_or_abs(cfg_.data.ctm)] = file_hash_hex(cfg_.data.ctm);
    rec.inputs[rel_or_abs(cfg_.data.trans)] = file_hash_hex(cfg_.data.trans);

    trans_ = read_transcripts(cfg_.data.trans);
    timings_ = corruptor::parse_ctm(read_text_file(cfg_.data.ctm));

    plan_file_.mask_type = cfg_.mask.type;
    plan_file_.mask_duration = cfg_.mask.duration;
    plan_file_.expansion = cfg_.mask.expansion;
    plan_file_.noise_std = cfg_.mask.noise_std;
    plan_file_.seed = cfg_.mask.seed;
    corruptor::PlanOptions opts;
    opts.expansion = cfg_.mask.expansion;
    opts.mask_duration = cfg_.mask.duration;
    opts.mask_type = cfg_.mask.type;
    opts.seed = cfg_.mask.seed;
    for (const auto& [id, tokens] : trans_) {
      auto it = timings_.find(id);
      if (it == timings_.end()) {
        throw ConsistencyError("no alignment for utterance " + id);
      }
      plan_file_.plans.push_back(
          corruptor::plan_masks(id, it->second, tokens, wordset_, opts));
    }
    const std::string out = (fs::path(cfg_.out_dir) / "plans.json").string();
    corruptor::write_plan_file(plan_file_, out);
    rec.outputs[rel(out)] = file_hash_hex(out);
    rec.wall_ms = timer.elapsed_ms();
    manifest_.stages.push_back(rec);
  }

  void stage_mask() {
    StageTimer timer;
    StageRecord rec;
    rec.name = "mask";
    for (const auto& plan : plan_file_.plans) {
      const std::string in =
          (fs::path(cfg_.data.wav_dir) / (plan.utterance_id + ".wav"))
              .string();
      const std::string out = masked_wav_path(plan.utterance_id);
      const signalio::Waveform w = signalio::read_wav(in);
      signalio::write_wav(
          corruptor::apply_masks(w, plan, plan_file_.noise_std), out);
      rec.outputs[rel(out)] = file_hash_hex(out);
    }
    rec.wall_ms = timer.elapsed_ms();
    manifest_.stages.push_back(rec);
  }

  void stage_features() {
    StageTimer timer;
    StageRecord rec;
    rec.name = "features";
    signalio::LogmelOptions mel_opts;
    mel_opts.n_mels = cfg_.features.n_mels;
    for (const auto& plan : plan_file_.plans) {
      const std::string in = masked_wav_path(plan.utterance_id);
      const std::string out = feat_path(plan.utterance_id);
      const signalio::Waveform w = signalio::read_wav(in);
      signalio::FeatureMatrix fm = signalio::logmel_features(w, mel_opts);
      if (cfg_.features.pitch) {
        fm = signalio::hstack(fm, signalio::pitch_features(w));
      }
      signalio::write_features(fm, out);
      rec.outputs[rel(out)] = file_hash_hex(out);
    }
    rec.wall_ms = timer.elapsed_ms();
    manifest_.stages.push_back(rec);
  }

  // Visual vector per utterance under a given assignment.
  std::map<std::string, neuro::Vec> assign_visual(
      const std::vector<std::string>& ids, VisualMode mode, bool deranged,
      uint64_t derange_seed) {
    std::map<std::string, neuro::Vec> out;
    if (mode == VisualMode::kNone) return out;
    std::vector<size_t> perm(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) perm[i] = i;
    if (deranged) perm = derange(ids.size(), derange_seed);
    for (size_t i = 0; i < ids.size(); ++i) {
      out[ids[i]] = visual_for(ids[perm[i]], mode);
    }
    return out;
  }

  neuro::Vec visual_for(const std::string& id, VisualMode mode) {
    if (mode == VisualMode::kArchive) {
      load_archive();
      auto it = archive_rows_.find(id);
      if (it == archive_rows_.end()) {
        throw ConsistencyError("no visual feature for utterance " + id);
      }
      return it->second;
    }
    // Indicator: dim = |wordset|, 1 for each word masked in this utterance.
    const std::vector<std::string> words(wordset_.words.begin(),
                                         wordset_.words.end());
    neuro::Vec v = neuro::Vec::Zero(static_cast<int>(words.size()));
    const corruptor::MaskPlan* plan = plan_file_.find(id);
    const auto& tokens = trans_.at(id);
    if (plan != nullptr) {
      for (int idx : plan->masked_token_indices) {
        const std::string& w = tokens[idx];
        const auto it = std::lower_bound(words.begin(), words.end(), w);
        if (it != words.end() && *it == w) {
          v(static_cast<int>(it - words.begin())) = 1.0;
        }
      }
    }
    return v;
  }

  void load_archive() {
    if (!archive_rows_.empty()) return;
    const signalio::FeatureMatrix fm =
        signalio::read_features(cfg_.data.visual);
    const std::vector<std::string> ids = read_list_file(cfg_.data.visual_ids);
    if (static_cast<long>(ids.size()) != fm.frames.rows()) {
      throw ConsistencyError(
          "visual archive rows do not match the id sidecar");
    }
    for (size_t i = 0; i < ids.size(); ++i) {
      archive_rows_[ids[i]] = fm.frames.row(static_cast<long>(i)).transpose();
    }
  }

  int visual_dim(VisualMode mode) {
    switch (mode) {
      case VisualMode::kNone: return 0;
      case VisualMode::kArchive:
        load_archive();
        return static_cast<int>(archive_rows_.begin()->second.size());
      case VisualMode::kIndicator:
        return static_cast<int>(wordset_.words.size());
    }
    return 0;
  }

  // Fitted once per experiment on the raw training-split features.
  const signalio::FeatureNormalizer* normalizer() {
    if (!cfg_.features.normalize) return nullptr;
    if (!norm_) {
      std::vector<Eigen::MatrixXd> train_feats;
      for (const auto& id : read_list_file(cfg_.data.train_list)) {
        train_feats.push_back(signalio::read_features(feat_path(id)).frames);
      }
      std::vector<const Eigen::MatrixXd*> ptrs;
      for (const auto& m : train_feats) ptrs.push_back(&m);
      norm_ = signalio::FeatureNormalizer::fit(ptrs);
    }
    return &*norm_;
  }

  SeedResult run_condition_seed(const Condition& cond, uint64_t seed) {
    const std::vector<std::string> train_ids =
        read_list_file(cfg_.data.train_list);
    const std::vector<std::string> test_ids =
        read_list_file(cfg_.data.test_list);

    // Vocabulary from the training transcripts only.
    std::map<std::string, std::vector<std::string>> train_trans;
    for (const auto& id : train_ids) train_trans[id] = trans_.at(id);
    const neuro::Vocabulary vocab =
        neuro::Vocabulary::from_corpus(train_trans);

    // Incongruent decoding trains on congruent pairings; incongruent
    // training deranges the training assignment with its own stream.
    const bool train_deranged = cond.congruency == Congruency::kIncongruentTrain;
    const bool test_deranged = cond.congruency != Congruency::kCongruent;

    const std::string ckpt_key =
        to_string(cond.visual) + "_" +
        (train_deranged ? "deranged" : "congruent") + "_" +
        std::to_string(seed);
    const std::string ckpt_path =
        (fs::path(cfg_.out_dir) / "ckpts" / (ckpt_key + ".mbmodel")).string();

    std::shared_ptr<neuro::Seq2Seq> model;
    auto cached = trained_.find(ckpt_key);
    if (cached != trained_.end()) {
      model = cached->second;
    } else {
      StageTimer timer;
      StageRecord rec;
      rec.name = "train/" + cond.name + "/seed_" + std::to_string(seed);

      neuro::ModelConfig mc;
      mc.encoder.input_dim =
          cfg_.features.n_mels + (cfg_.features.pitch ? 3 : 0);
      mc.encoder.hidden = cfg_.model.enc_hidden;
      mc.encoder.n_layers = cfg_.model.enc_layers;
      mc.encoder.subsample_after = cfg_.model.subsample;
      mc.decoder.vocab_size = vocab.size();
      mc.decoder.embed_dim = cfg_.model.embed;
      mc.decoder.hidden = cfg_.model.dec_hidden;
      mc.decoder.attention_dim = cfg_.model.attn;
      mc.visual_dim = visual_dim(cond.visual);

      auto train_visual =
          assign_visual(train_ids, cond.visual, train_deranged,
                        derive_seed(seed, "derange-train"));

      std::vector<neuro::TrainExample> dataset;
      for (const auto& id : train_ids) {
        neuro::TrainExample ex;
        ex.features = signalio::read_features(feat_path(id)).frames;
        if (const auto* norm = normalizer()) norm->apply(ex.features);
        ex.tokens = vocab.encode(trans_.at(id));
        if (cond.visual != VisualMode::kNone) ex.visual = train_visual.at(id);
        dataset.push_back(std::move(ex));
      }

      model = std::make_shared<neuro::Seq2Seq>(mc, seed);
      neuro::TrainHyper hyper;
      hyper.adam.lr = cfg_.train.lr;
      hyper.epochs = cfg_.train.epochs;
      hyper.seed = seed;
      const std::vector<double> curve = neuro::train(*model, dataset, hyper);

      nlohmann::json extra = {{"loss_curve", curve},
                              {"condition", cond.name},
                              {"visual", to_string(cond.visual)},
                              {"train_deranged", train_deranged}};
      if (const auto* norm = normalizer()) {
        extra["feature_mean"] = std::vector<double>(
            norm->mean.data(), norm->mean.data() + norm->mean.size());
        extra["feature_inv_std"] = std::vector<double>(
            norm->inv_std.data(),
            norm->inv_std.data() + norm->inv_std.size());
      }
      neuro::write_checkpoint(*model, vocab, seed, ckpt_path, extra);
      trained_[ckpt_key] = model;

      rec.outputs[rel(ckpt_path)] = file_hash_hex(ckpt_path);
      rec.wall_ms = timer.elapsed_ms();
      manifest_.stages.push_back(rec);
    }

    // Decode the test set.
    StageTimer decode_timer;
    StageRecord decode_rec;
    decode_rec.name = "decode/" + cond.name + "/seed_" + std::to_string(seed);
    auto test_visual = assign_visual(test_ids, cond.visual, test_deranged,
                                     derive_seed(seed, "derange-test"));
    int max_len = cfg_.decode_max_len;
    if (max_len <= 0) {
      size_t longest = 0;
      for (const auto& [id, toks] : trans_) {
        longest = std::max(longest, toks.size());
      }
      max_len = static_cast<int>(2 * longest + 4);
    }

    std::map<std::string, std::vector<std::string>> hyp;
    for (const auto& id : test_ids) {
      neuro::Mat feats = signalio::read_features(feat_path(id)).frames;
      if (const auto* norm = normalizer()) norm->apply(feats);
      const neuro::Vec* vis = nullptr;
      neuro::Vec v;
      if (cond.visual != VisualMode::kNone) {
        v = test_visual.at(id);
        vis = &v;
      }
      const std::vector<int> ids_out = model->greedy_decode(feats, vis,
                                                            max_len);
      std::vector<std::string> words;
      for (int tok : ids_out) {
        words.push_back(vocab.token(tok));
      }
      hyp[id] = std::move(words);
    }
    const std::string cond_dir =
        (fs::path(cfg_.out_dir) / ("cond_" + cond.name) /
         ("seed_" + std::to_string(seed)))
            .string();
    fs::create_directories(cond_dir);
    const std::string hyp_path = (fs::path(cond_dir) / "hyp.txt").string();
    write_transcripts(hyp, hyp_path);
    decode_rec.outputs[rel(hyp_path)] = file_hash_hex(hyp_path);
    decode_rec.wall_ms = decode_timer.elapsed_ms();
    manifest_.stages.push_back(decode_rec);

    // Score.
    StageTimer score_timer;
    StageRecord score_rec;
    score_rec.name = "score/" + cond.name + "/seed_" + std::to_string(seed);
    std::vector<scorer::ScorePair> pairs;
    scorer::MaskedIndexMap masked;
    for (const auto& id : test_ids) {
      pairs.push_back({id, trans_.at(id), hyp.at(id)});
      const corruptor::MaskPlan* plan = plan_file_.find(id);
      if (plan != nullptr && !plan->masked_token_indices.empty()) {
        masked[id] = plan->masked_token_indices;
      }
    }
    const scorer::ScoreReport report = scorer::score_corpus(pairs, masked);
    const std::string score_path = (fs::path(cond_dir) / "score.json").string();
    write_text_file(score_path, scorer::report_to_json(report).dump(2) + "\n");
    score_rec.outputs[rel(score_path)] = file_hash_hex(score_path);
    score_rec.wall_ms = score_timer.elapsed_ms();
    manifest_.stages.push_back(score_rec);

    SeedResult sr;
    sr.seed = seed;
    sr.wer = report.wer_percent;
    sr.rr = report.rr_percent;
    return sr;
  }

  std::string rel_or_abs(const std::string& path) const {
    std::error_code ec;
    const auto r = fs::relative(path, cfg_.out_dir, ec);
    if (ec || r.empty()) return path;
    return r.string();
  }

  ExperimentConfig cfg_;
  RunManifest manifest_;
  lexmask::WordSet wordset_;
  std::map<std::string, std::vector<std::string>> trans_;
  std::map<std::string, std::vector<corruptor::WordTiming>> timings_;
  corruptor::PlanFile plan_file_;
  std::map<std::string, neuro::Vec> archive_rows_;
  std::map<std::string, std::shared_ptr<neuro::Seq2Seq>> trained_;
  std::optional<signalio::FeatureNormalizer> norm_;
};

inline ResultsTable run_experiment(const ExperimentConfig& cfg) {
  ExperimentRunner runner(cfg);
  return runner.run();
}

// Identical pipeline with the visual feature replaced by the ground-truth
// mask indicator from each utterance's plan.
inline ResultsTable upper_bound_run(ExperimentConfig cfg) {
  Condition c;
  c.name = "indicator";
  c.visual = VisualMode::kIndicator;
  c.congruency = Congruency::kCongruent;
  cfg.conditions = {c};
  return run_experiment(cfg);
}

}  // namespace bench
}  // namespace maskbench

#endif  // MASKBENCH_BENCH_EXPERIMENT_HPP_
