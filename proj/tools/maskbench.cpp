// tools/maskbench.cpp

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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maskbench/align.hpp"
#include "maskbench/bench/experiment.hpp"
#include "maskbench/bench/qualitative.hpp"
#include "maskbench/bench/synthcorpus.hpp"
#include "maskbench/ctm.hpp"
#include "maskbench/features.hpp"
#include "maskbench/mask.hpp"
#include "maskbench/neuro/checkpoint.hpp"
#include "maskbench/neuro/standard_checks.hpp"
#include "maskbench/neuro/train.hpp"
#include "maskbench/textio.hpp"
#include "maskbench/wav.hpp"
#include "maskbench/wordset.hpp"

namespace fs = std::filesystem;
using namespace maskbench;

namespace {

int cmd_features(const std::string& wav_path, const std::string& out_path,
                 int n_mels, bool pitch) {
  const signalio::Waveform w = signalio::read_wav(wav_path);
  signalio::LogmelOptions opts;
  opts.n_mels = n_mels;
  signalio::FeatureMatrix fm = signalio::logmel_features(w, opts);
  if (pitch) fm = signalio::hstack(fm, signalio::pitch_features(w));
  signalio::write_features(fm, out_path);
  std::printf("%s: %d frames x %d dims -> %s\n", wav_path.c_str(), fm.rows(),
              fm.cols(), out_path.c_str());
  return 0;
}

int cmd_mask(const std::string& wav_dir, const std::string& ctm_path,
             const std::string& trans_path, const std::string& wordset_path,
             const std::string& type, double expansion, double duration,
             double noise_std, uint64_t seed, const std::string& out_dir) {
  const auto trans = read_transcripts(trans_path);
  const auto timings = corruptor::parse_ctm(read_text_file(ctm_path));
  const lexmask::WordSet ws = lexmask::read_wordset(wordset_path);
  fs::create_directories(out_dir);

  corruptor::PlanFile pf;
  pf.mask_type = corruptor::mask_type_from_string(type);
  pf.mask_duration = duration;
  pf.expansion = expansion;
  pf.noise_std = noise_std;
  pf.seed = seed;

  corruptor::PlanOptions opts;
  opts.mask_type = pf.mask_type;
  opts.mask_duration = duration;
  opts.expansion = expansion;
  opts.seed = seed;

  long masked_words = 0;
  for (const auto& [id, tokens] : trans) {
    auto it = timings.find(id);
    if (it == timings.end()) {
      throw ConsistencyError("no alignment for utterance " + id);
    }
    corruptor::MaskPlan plan =
        corruptor::plan_masks(id, it->second, tokens, ws, opts);
    masked_words += static_cast<long>(plan.masked_token_indices.size());
    const signalio::Waveform w =
        signalio::read_wav((fs::path(wav_dir) / (id + ".wav")).string());
    signalio::write_wav(corruptor::apply_masks(w, plan, noise_std),
                        (fs::path(out_dir) / (id + ".wav")).string());
    pf.plans.push_back(std::move(plan));
  }
  const std::string plans_path = (fs::path(out_dir) / "plans.json").string();
  corruptor::write_plan_file(pf, plans_path);
  std::printf("masked %ld word occurrences across %zu utterances -> %s\n",
              masked_words, pf.plans.size(), out_dir.c_str());
  return 0;
}

int cmd_wordset_nouns(const std::string& tagged_path, int n,
                      const std::string& out_path) {
  const lexmask::WordSet ws =
      lexmask::top_nouns(lexmask::read_tagged_transcripts(tagged_path), n);
  lexmask::write_wordset(ws, out_path);
  std::printf("%zu nouns -> %s\n", ws.words.size(), out_path.c_str());
  return 0;
}

int cmd_wordset_places(const std::string& trans_path,
                       const std::string& categories_path,
                       const std::string& out_path, bool strict) {
  const auto trans = read_transcripts(trans_path);
  std::set<std::string> vocab;
  for (const auto& [id, toks] : trans) vocab.insert(toks.begin(), toks.end());
  lexmask::PlaceWordsOptions opts;
  opts.strict = strict;
  lexmask::WordSet ws = lexmask::place_words(
      vocab, lexmask::read_categories(categories_path), opts);
  ws.source_file = categories_path;
  lexmask::write_wordset(ws, out_path);
  std::printf("%zu place words -> %s\n", ws.words.size(), out_path.c_str());
  return 0;
}

int cmd_wordset_coverage(const std::string& trans_path,
                         const std::string& wordset_path) {
  const auto trans = read_transcripts(trans_path);
  const lexmask::WordSet ws = lexmask::read_wordset(wordset_path);
  const lexmask::Coverage cov = lexmask::coverage(trans, ws);
  std::printf("%ld / %ld tokens = %.1f%%\n", cov.hits, cov.total,
              cov.percent());
  return 0;
}

int cmd_score(const std::string& ref_path, const std::string& hyp_path,
              const std::string& plan_path, const std::string& out_path) {
  const auto refs = read_transcripts(ref_path);
  const auto hyps = read_transcripts(hyp_path);
  std::vector<scorer::ScorePair> pairs;
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    if (it == hyps.end()) {
      throw ConsistencyError("no hypothesis for utterance " + id);
    }
    pairs.push_back({id, ref, it->second});
  }
  scorer::MaskedIndexMap masked;
  if (!plan_path.empty()) {
    const corruptor::PlanFile pf = corruptor::read_plan_file(plan_path);
    for (const auto& plan : pf.plans) {
      if (!plan.masked_token_indices.empty() &&
          refs.count(plan.utterance_id)) {
        masked[plan.utterance_id] = plan.masked_token_indices;
      }
    }
  }
  const scorer::ScoreReport rep = scorer::score_corpus(pairs, masked);
  if (!out_path.empty()) {
    write_text_file(out_path, scorer::report_to_json(rep).dump(2) + "\n");
  }
  std::printf("WER %.2f%%  (S=%ld D=%ld I=%ld N=%ld)\n", rep.wer_percent,
              rep.n_sub, rep.n_del, rep.n_ins, rep.n_ref);
  if (rep.rr_percent) {
    std::printf("RR  %.2f%%  (%ld / %ld masked words recovered)\n",
                *rep.rr_percent, rep.recovered, rep.masked_total);
  }
  return 0;
}

struct TrainCliConfig {
  std::string features_dir;
  std::string trans;
  std::string utt_list;
  std::string visual;
  std::string visual_ids;
  bench::ModelSpec model;
  bench::TrainSpec train;
  uint64_t seed = 1;
  bool normalize = true;
};

TrainCliConfig train_config_from_json(const nlohmann::json& j) {
  TrainCliConfig cfg;
  const auto& d = j.at("data");
  cfg.features_dir =
      bench::resolve_workdir(d.at("features_dir").get<std::string>());
  cfg.trans = bench::resolve_workdir(d.at("trans").get<std::string>());
  if (d.contains("utt_list")) {
    cfg.utt_list = bench::resolve_workdir(d.at("utt_list").get<std::string>());
  }
  if (d.contains("visual")) {
    cfg.visual = bench::resolve_workdir(d.at("visual").get<std::string>());
  }
  if (d.contains("visual_ids")) {
    cfg.visual_ids =
        bench::resolve_workdir(d.at("visual_ids").get<std::string>());
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
  cfg.seed = j.value("seed", 1);
  cfg.normalize = j.value("normalize", true);
  return cfg;
}

int cmd_train(const std::string& config_path, const std::string& out_path) {
  const TrainCliConfig cfg = train_config_from_json(
      nlohmann::json::parse(read_text_file(config_path)));
  const auto trans = read_transcripts(cfg.trans);
  std::vector<std::string> ids;
  if (!cfg.utt_list.empty()) {
    ids = read_list_file(cfg.utt_list);
  } else {
    for (const auto& [id, toks] : trans) ids.push_back(id);
  }

  std::map<std::string, neuro::Vec> visual;
  int visual_dim = 0;
  if (!cfg.visual.empty()) {
    const signalio::FeatureMatrix fm = signalio::read_features(cfg.visual);
    const auto vids = read_list_file(cfg.visual_ids);
    if (static_cast<long>(vids.size()) != fm.frames.rows()) {
      throw ConsistencyError("visual archive rows do not match id sidecar");
    }
    for (size_t i = 0; i < vids.size(); ++i) {
      visual[vids[i]] = fm.frames.row(static_cast<long>(i)).transpose();
    }
    visual_dim = static_cast<int>(fm.frames.cols());
  }

  std::map<std::string, std::vector<std::string>> train_trans;
  for (const auto& id : ids) train_trans[id] = trans.at(id);
  const neuro::Vocabulary vocab = neuro::Vocabulary::from_corpus(train_trans);

  std::vector<neuro::TrainExample> dataset;
  int input_dim = -1;
  for (const auto& id : ids) {
    neuro::TrainExample ex;
    ex.features = signalio::read_features(
                      (fs::path(cfg.features_dir) / (id + ".feat")).string())
                      .frames;
    if (input_dim < 0) input_dim = static_cast<int>(ex.features.cols());
    ex.tokens = vocab.encode(trans.at(id));
    if (visual_dim > 0) ex.visual = visual.at(id);
    dataset.push_back(std::move(ex));
  }

  std::optional<signalio::FeatureNormalizer> norm;
  if (cfg.normalize) {
    std::vector<const Eigen::MatrixXd*> ptrs;
    for (const auto& ex : dataset) ptrs.push_back(&ex.features);
    norm = signalio::FeatureNormalizer::fit(ptrs);
    for (auto& ex : dataset) norm->apply(ex.features);
  }

  neuro::ModelConfig mc;
  mc.encoder.input_dim = input_dim;
  mc.encoder.hidden = cfg.model.enc_hidden;
  mc.encoder.n_layers = cfg.model.enc_layers;
  mc.encoder.subsample_after = cfg.model.subsample;
  mc.decoder.vocab_size = vocab.size();
  mc.decoder.embed_dim = cfg.model.embed;
  mc.decoder.hidden = cfg.model.dec_hidden;
  mc.decoder.attention_dim = cfg.model.attn;
  mc.visual_dim = visual_dim;

  neuro::Seq2Seq model(mc, cfg.seed);
  neuro::TrainHyper hyper;
  hyper.adam.lr = cfg.train.lr;
  hyper.epochs = cfg.train.epochs;
  hyper.seed = cfg.seed;
  const std::vector<double> curve = neuro::train(model, dataset, hyper);
  for (size_t e = 0; e < curve.size(); ++e) {
    std::printf("epoch %zu  mean loss %.6f\n", e, curve[e]);
  }
  nlohmann::json extra = {{"loss_curve", curve}};
  if (norm) {
    extra["feature_mean"] = std::vector<double>(
        norm->mean.data(), norm->mean.data() + norm->mean.size());
    extra["feature_inv_std"] = std::vector<double>(
        norm->inv_std.data(), norm->inv_std.data() + norm->inv_std.size());
  }
  neuro::write_checkpoint(model, vocab, cfg.seed, out_path, extra);
  std::printf("checkpoint -> %s\n", out_path.c_str());
  return 0;
}

int cmd_decode(const std::string& ckpt_path, const std::string& features_dir,
               const std::string& visual_path, const std::string& visual_ids,
               const std::string& list_path, const std::string& out_path,
               int max_len) {
  const neuro::LoadedModel lm = neuro::read_checkpoint(ckpt_path);

  std::vector<std::string> ids;
  if (!list_path.empty()) {
    ids = read_list_file(list_path);
  } else {
    for (const auto& entry : fs::directory_iterator(features_dir)) {
      if (entry.path().extension() == ".feat") {
        ids.push_back(entry.path().stem().string());
      }
    }
    std::sort(ids.begin(), ids.end());
  }

  std::map<std::string, neuro::Vec> visual;
  if (lm.config.visual_dim > 0) {
    if (visual_path.empty() || visual_ids.empty()) {
      throw ConsistencyError(
          "checkpoint is multimodal; --visual and --visual-ids are required");
    }
    const signalio::FeatureMatrix fm = signalio::read_features(visual_path);
    const auto vids = read_list_file(visual_ids);
    if (static_cast<long>(vids.size()) != fm.frames.rows()) {
      throw ConsistencyError("visual archive rows do not match id sidecar");
    }
    for (size_t i = 0; i < vids.size(); ++i) {
      visual[vids[i]] = fm.frames.row(static_cast<long>(i)).transpose();
    }
  }

  std::optional<signalio::FeatureNormalizer> norm;
  if (lm.extra.contains("feature_mean")) {
    norm.emplace();
    const auto mean = lm.extra.at("feature_mean").get<std::vector<double>>();
    const auto inv = lm.extra.at("feature_inv_std").get<std::vector<double>>();
    norm->mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
    norm->inv_std = Eigen::Map<const Eigen::VectorXd>(inv.data(), inv.size());
  }

  std::map<std::string, std::vector<std::string>> hyp;
  for (const auto& id : ids) {
    neuro::Mat feats = signalio::read_features(
                           (fs::path(features_dir) / (id + ".feat")).string())
                           .frames;
    if (norm) norm->apply(feats);
    const neuro::Vec* vis = nullptr;
    neuro::Vec v;
    if (lm.config.visual_dim > 0) {
      v = visual.at(id);
      vis = &v;
    }
    std::vector<std::string> words;
    for (int tok : lm.model->greedy_decode(feats, vis, max_len)) {
      words.push_back(lm.vocab.token(tok));
    }
    hyp[id] = std::move(words);
  }
  write_transcripts(hyp, out_path);
  std::printf("decoded %zu utterances -> %s\n", hyp.size(), out_path.c_str());
  return 0;
}

int cmd_gradcheck(const std::string& config_path) {
  neuro::StandardCheckDims dims;
  if (!config_path.empty()) {
    const nlohmann::json j =
        nlohmann::json::parse(read_text_file(config_path));
    dims.enc_input = j.value("enc_input", dims.enc_input);
    dims.enc_hidden = j.value("enc_hidden", dims.enc_hidden);
    dims.vocab = j.value("vocab", dims.vocab);
    dims.embed = j.value("embed", dims.embed);
    dims.dec_hidden = j.value("dec_hidden", dims.dec_hidden);
    dims.attn = j.value("attn", dims.attn);
    dims.frames = j.value("frames", dims.frames);
    dims.visual = j.value("visual", dims.visual);
    dims.seed = j.value("seed", dims.seed);
  }
  bool all_pass = true;
  for (const auto& [name, rep] : neuro::run_standard_gradchecks(dims)) {
    all_pass = all_pass && rep.pass;
    if (rep.nonfinite_gradient) {
      std::printf("[FAIL] %-10s non-finite analytic gradient at %s\n",
                  name.c_str(), rep.nonfinite_param.c_str());
      continue;
    }
    std::printf("[%s] %-10s max rel err %.3e over %zu params (worst %s)\n",
                rep.pass ? "PASS" : "FAIL", name.c_str(), rep.max_rel_err,
                rep.n_checked, rep.worst_param.c_str());
  }
  return all_pass ? 0 : 1;
}

int cmd_experiment(const std::string& config_path) {
  const bench::ExperimentConfig cfg = bench::experiment_config_from_json(
      nlohmann::json::parse(read_text_file(config_path)));
  const bench::ResultsTable table = bench::run_experiment(cfg);
  std::fputs(bench::render_results_text(table).c_str(), stdout);
  std::printf("artifacts under %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& runs_dir, int qualitative_k) {
  const std::string results_path =
      (fs::path(runs_dir) / "results.json").string();
  const bench::ResultsTable table = bench::results_from_json(
      nlohmann::json::parse(read_text_file(results_path)));
  std::fputs(bench::render_results_text(table).c_str(), stdout);
  if (qualitative_k <= 0) return 0;

  // Reconstruct refs and masks from the run manifest's config snapshot.
  const bench::RunManifest manifest =
      bench::read_manifest((fs::path(runs_dir) / "manifest.json").string());
  const auto data = manifest.config.at("data");
  const auto refs_all = read_transcripts(data.at("trans").get<std::string>());
  const auto test_ids =
      read_list_file(data.at("test_list").get<std::string>());
  const corruptor::PlanFile pf = corruptor::read_plan_file(
      (fs::path(runs_dir) / "plans.json").string());

  std::map<std::string, std::vector<std::string>> refs;
  std::map<std::string, std::vector<int>> masked;
  for (const auto& id : test_ids) {
    refs[id] = refs_all.at(id);
    const corruptor::MaskPlan* plan = pf.find(id);
    if (plan != nullptr && !plan->masked_token_indices.empty()) {
      masked[id] = plan->masked_token_indices;
    }
  }

  // One run per condition: the first seed's hypotheses.
  std::vector<bench::DecodedRun> runs;
  for (const auto& cond : table.conditions) {
    if (cond.seeds.empty()) continue;
    const std::string hyp_path =
        (fs::path(runs_dir) / ("cond_" + cond.name) /
         ("seed_" + std::to_string(cond.seeds[0].seed)) / "hyp.txt")
            .string();
    runs.push_back({cond.name, read_transcripts(hyp_path)});
  }
  const auto entries =
      bench::qualitative_dump(runs, refs, masked, qualitative_k);
  std::fputs(bench::render_qualitative(entries).c_str(), stdout);
  return 0;
}

int cmd_synth(const std::string& out_dir, int utts, int vocab, int targets,
              int fillers, uint64_t seed, int train_count) {
  bench::SynthSpec spec;
  spec.n_utts = utts;
  spec.vocab_words = vocab;
  spec.n_targets = targets;
  spec.fillers_per_utt = fillers;
  spec.seed = seed;
  spec.train_count = train_count;
  const bench::SynthPaths paths = bench::generate_synth_corpus(spec, out_dir);
  std::printf("synthetic corpus (%d utterances, %d-word vocab) -> %s\n", utts,
              vocab, out_dir.c_str());
  std::printf("  wavs:   %s\n  trans:  %s\n  tagged: %s\n  ctm:    %s\n",
              paths.wav_dir.c_str(), paths.trans.c_str(),
              paths.tagged.c_str(), paths.ctm.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maskbench: word-masked speech recovery workbench"};
  app.require_subcommand(1);

  // features
  std::string wav_path, out_path;
  int n_mels = 40;
  bool pitch = false;
  auto* features = app.add_subcommand(
      "features", "Compute log-mel (+ pitch) features for one wav");
  features->add_option("--wav", wav_path)->required();
  features->add_option("--out", out_path)->required();
  features->add_option("--n-mels", n_mels);
  features->add_flag("--pitch", pitch);

  // mask
  std::string wav_dir, ctm_path, trans_path, wordset_path, mask_out;
  std::string mask_type = "silence";
  double expansion = 0.25, duration = 0.5, noise_std = 0.1;
  uint64_t mask_seed = 0;
  auto* mask =
      app.add_subcommand("mask", "Splice word masks into a directory of wavs");
  mask->add_option("--wav-dir", wav_dir)->required();
  mask->add_option("--ctm", ctm_path)->required();
  mask->add_option("--trans", trans_path)->required();
  mask->add_option("--wordset", wordset_path)->required();
  mask->add_option("--type", mask_type)
      ->check(CLI::IsMember({"silence", "noise"}));
  mask->add_option("--expansion", expansion);
  mask->add_option("--duration", duration);
  mask->add_option("--noise-std", noise_std);
  mask->add_option("--seed", mask_seed);
  mask->add_option("--out-dir", mask_out)->required();

  // wordset nouns|places|coverage
  auto* wordset = app.add_subcommand("wordset", "Build or inspect word sets");
  wordset->require_subcommand(1);
  std::string tagged_path, categories_path, ws_out, ws_trans, ws_file;
  int top_n = 100;
  bool strict = false;
  auto* nouns = wordset->add_subcommand("nouns", "Top-N nouns by NN tag");
  nouns->add_option("--tagged", tagged_path)->required();
  nouns->add_option("--n", top_n);
  nouns->add_option("--out", ws_out)->required();
  auto* places =
      wordset->add_subcommand("places", "Corpus words matching categories");
  places->add_option("--trans", ws_trans)->required();
  places->add_option("--categories", categories_path)->required();
  places->add_option("--out", ws_out)->required();
  places->add_flag("--strict", strict);
  auto* coverage =
      wordset->add_subcommand("coverage", "Corpus coverage of a word set");
  coverage->add_option("--trans", ws_trans)->required();
  coverage->add_option("--wordset", ws_file)->required();

  // score
  std::string ref_path, hyp_path, plan_path, score_out;
  auto* score = app.add_subcommand("score", "WER / recovery-rate scoring");
  score->add_option("--ref", ref_path)->required();
  score->add_option("--hyp", hyp_path)->required();
  score->add_option("--mask-plan", plan_path);
  score->add_option("--out", score_out);

  // train
  std::string train_config, train_out;
  auto* train = app.add_subcommand("train", "Train a model from a config");
  train->add_option("--config", train_config)->required();
  train->add_option("--out", train_out)->required();

  // decode
  std::string ckpt_path, feat_dir, visual_path, visual_ids, list_path,
      decode_out;
  int max_len = 32;
  auto* decode = app.add_subcommand("decode", "Greedy-decode feature files");
  decode->add_option("--ckpt", ckpt_path)->required();
  decode->add_option("--features", feat_dir)->required();
  decode->add_option("--visual", visual_path);
  decode->add_option("--visual-ids", visual_ids);
  decode->add_option("--list", list_path);
  decode->add_option("--out", decode_out)->required();
  decode->add_option("--max-len", max_len);

  // gradcheck
  std::string gradcheck_config;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Finite-difference checks on the standard graphs");
  gradcheck->add_option("--config", gradcheck_config);

  // experiment
  std::string experiment_config;
  auto* experiment =
      app.add_subcommand("experiment", "Run a full experiment config");
  experiment->add_option("--config", experiment_config)->required();

  // report
  std::string runs_dir;
  int qualitative_k = 0;
  auto* report =
      app.add_subcommand("report", "Re-render results and qualitative table");
  report->add_option("--runs", runs_dir)->required();
  report->add_option("--qualitative", qualitative_k);

  // synth
  std::string synth_out;
  int synth_utts = 200, synth_vocab = 30, synth_targets = 5, synth_fillers = 3,
      synth_train = 160;
  uint64_t synth_seed = 0;
  auto* synth =
      app.add_subcommand("synth", "Generate the synthetic tone-word corpus");
  synth->add_option("--out-dir", synth_out)->required();
  synth->add_option("--utts", synth_utts);
  synth->add_option("--vocab", synth_vocab);
  synth->add_option("--targets", synth_targets);
  synth->add_option("--fillers", synth_fillers);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--train-count", synth_train);

  CLI11_PARSE(app, argc, argv);

  try {
    if (features->parsed()) {
      return cmd_features(wav_path, out_path, n_mels, pitch);
    }
    if (mask->parsed()) {
      return cmd_mask(wav_dir, ctm_path, trans_path, wordset_path, mask_type,
                      expansion, duration, noise_std, mask_seed, mask_out);
    }
    if (wordset->parsed()) {
      if (nouns->parsed()) {
        return cmd_wordset_nouns(tagged_path, top_n, ws_out);
      }
      if (places->parsed()) {
        return cmd_wordset_places(ws_trans, categories_path, ws_out, strict);
      }
      return cmd_wordset_coverage(ws_trans, ws_file);
    }
    if (score->parsed()) {
      return cmd_score(ref_path, hyp_path, plan_path, score_out);
    }
    if (train->parsed()) return cmd_train(train_config, train_out);
    if (decode->parsed()) {
      return cmd_decode(ckpt_path, feat_dir, visual_path, visual_ids,
                        list_path, decode_out, max_len);
    }
    if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_config);
    if (experiment->parsed()) return cmd_experiment(experiment_config);
    if (report->parsed()) return cmd_report(runs_dir, qualitative_k);
    if (synth->parsed()) {
      return cmd_synth(synth_out, synth_utts, synth_vocab, synth_targets,
                       synth_fillers, synth_seed, synth_train);
    }
  } catch (const std::exception& e) {
    std::cerr << "maskbench: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
