// tests/test_neuro.cpp

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

#include <cmath>
#include <filesystem>

#include "maskbench/neuro/checkpoint.hpp"
#include "maskbench/neuro/model.hpp"
#include "maskbench/neuro/train.hpp"
#include "maskbench/rng.hpp"
#include "maskbench/textio.hpp"

using namespace maskbench;
using namespace maskbench::neuro;

namespace {

Mat random_mat(Rng& rng, int rows, int cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  }
  return m;
}

ModelConfig tiny_config(int visual_dim) {
  ModelConfig cfg;
  cfg.encoder.input_dim = 4;
  cfg.encoder.hidden = 6;
  cfg.encoder.n_layers = 6;
  cfg.encoder.subsample_after = {3, 4};
  cfg.decoder.vocab_size = 8;
  cfg.decoder.embed_dim = 5;
  cfg.decoder.hidden = 6;
  cfg.decoder.n_layers = 2;
  cfg.decoder.attention_dim = 4;
  cfg.visual_dim = visual_dim;
  return cfg;
}

}  // namespace

TEST_CASE("encoder output length follows the ceil(ceil(T/2)/2) chain") {
  Encoder enc(EncoderConfig{});
  CHECK(enc.out_len(100) == 25);
  CHECK(enc.out_len(1) == 1);
  CHECK(enc.out_len(7) == 2);
  for (long T = 1; T <= 64; ++T) {
    const long want = (T + 1) / 2;          // ceil(T/2)
    const long want2 = (want + 1) / 2;      // ceil(ceil(T/2)/2)
    CHECK(enc.out_len(T) == want2);
  }
}

TEST_CASE("encoder forward produces the subsampled shape") {
  ModelConfig cfg = tiny_config(0);
  Seq2Seq model(cfg, 11);
  Rng rng(3);
  const Mat features = random_mat(rng, 25, 4);
  Encoder::Cache cache;
  const Mat H = model.encoder().forward(model.params(), features, cache);
  CHECK(H.rows() == 7);  // ceil(ceil(25/2)/2)
  CHECK(H.cols() == 12);
  CHECK(H.allFinite());

  const Mat empty(0, 4);
  CHECK_THROWS_AS(model.encoder().forward(model.params(), empty, cache),
                  ConsistencyError);
}

TEST_CASE("encoder with zero weights and zero input stays at zero") {
  EncoderConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden = 3;
  Encoder enc(cfg);
  ParamStore ps;
  enc.register_params(ps);  // params default to zero
  Encoder::Cache cache;
  const Mat H = enc.forward(ps, Mat::Zero(12, 4), cache);
  CHECK(H.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fuse projects through tanh") {
  Seq2Seq model(tiny_config(3), 17);
  SECTION("zero in, zero bias would give zero; stored bias is random") {
    Seq2Seq zero_model(tiny_config(3), 17);
    zero_model.params().mat("fusion.Wf").setZero();
    zero_model.params().mat("fusion.bf").setZero();
    const Vec fp = zero_model.fuse(Vec::Zero(3));
    CHECK(fp.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("large bias saturates strictly inside (-1, 1)") {
    Seq2Seq sat(tiny_config(3), 17);
    sat.params().mat("fusion.Wf").setZero();
    sat.params().mat("fusion.bf").setConstant(5.0);
    const Vec fp = sat.fuse(Vec::Ones(3));
    for (int i = 0; i < fp.size(); ++i) {
      CHECK(fp(i) > 0.999);
      CHECK(fp(i) < 1.0);
    }
  }
  SECTION("matches a scalar-loop oracle") {
    Rng rng(19);
    const Vec f = Vec::NullaryExpr(3, [&](Eigen::Index) {
      return rng.uniform(-2.0, 2.0);
    });
    const Vec fp = model.fuse(f);
    const Mat& Wf = model.params().mat("fusion.Wf");
    const Vec bf = model.params().mat("fusion.bf").col(0);
    for (int i = 0; i < fp.size(); ++i) {
      double acc = bf(i);
      for (int j = 0; j < 3; ++j) acc += Wf(i, j) * f(j);
      CHECK(std::abs(fp(i) - std::tanh(acc)) < 1e-12);
    }
  }
  SECTION("dimension mismatch is a shape error") {
    CHECK_THROWS_AS(model.fuse(Vec::Zero(5)), ShapeError);
  }
}

TEST_CASE("decode_step attention weights") {
  Seq2Seq model(tiny_config(0), 23);
  Rng rng(29);
  const Mat features = random_mat(rng, 13, 4);
  Encoder::Cache cache;
  const Mat H = model.encoder().forward(model.params(), features, cache);
  const Mat HW = model.attention_precompute(H);

  SECTION("zeroed attention scores give uniform weights") {
    Seq2Seq flat(tiny_config(0), 23);
    flat.params().mat("dec.attn.v").setZero();
    Encoder::Cache c2;
    const Mat H2 = flat.encoder().forward(flat.params(), features, c2);
    const Mat HW2 = flat.attention_precompute(H2);
    auto res = flat.decode_step(Vocabulary::kBos, flat.initial_state(), H2,
                                HW2, nullptr);
    for (int i = 0; i < res.alpha.size(); ++i) {
      CHECK(res.alpha(i) == Catch::Approx(1.0 / H2.rows()).epsilon(1e-12));
    }
  }
  SECTION("weights are a distribution") {
    auto res = model.decode_step(Vocabulary::kBos, model.initial_state(), H,
                                 HW, nullptr);
    CHECK(std::abs(res.alpha.sum() - 1.0) < 1e-9);
    CHECK(res.alpha.minCoeff() >= 0.0);
    Vec p = (res.logits.array() - res.logits.maxCoeff()).exp().matrix();
    p /= p.sum();
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);
  }
  SECTION("softmax is invariant to a constant score shift") {
    Rng r2(31);
    Vec scores(9);
    for (int i = 0; i < 9; ++i) scores(i) = r2.uniform(-4.0, 4.0);
    const Vec a = softmax<double>(scores);
    const Vec shifted = (scores.array() + 123.5).matrix();
    const Vec b = softmax<double>(shifted);
    for (int i = 0; i < 9; ++i) {
      CHECK(a(i) == Catch::Approx(b(i)).epsilon(1e-12));
    }
    CHECK(std::abs(a.sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("multimodal forward with zeroed fusion inputs equals unimodal") {
  // Same seed gives different layouts, so copy the shared weights over and
  // zero the fusion input columns of the first decoder layer.
  ModelConfig ucfg = tiny_config(0);
  ModelConfig mcfg = tiny_config(3);
  Seq2Seq uni(ucfg, 31);
  Seq2Seq multi(mcfg, 31);

  // Copy every shared parameter from uni into multi.
  for (auto& e : multi.params().entries()) {
    if (e.name == "fusion.Wf" || e.name == "fusion.bf") {
      e.value.setZero();
      continue;
    }
    if (e.name == "dec.l0.Wx") continue;  // shapes differ; handled below
    e.value = uni.params().mat(e.name);
  }
  // dec.l0 input layout: [embed(5); fused(6); ctx(12)] vs [embed(5); ctx(12)].
  const Mat& src = uni.params().mat("dec.l0.Wx");
  Mat& dst = multi.params().mat("dec.l0.Wx");
  dst.setZero();
  dst.leftCols(5) = src.leftCols(5);
  dst.rightCols(12) = src.rightCols(12);
  // fusion.bf is zero so f' = tanh(0) = 0, and the f' columns are zero too.

  Rng rng(37);
  const Mat features = random_mat(rng, 9, 4);
  const Vec visual = Vec::Ones(3);
  const std::vector<int> tokens = {3, 5, 7};
  Seq2Seq uni2 = uni, multi2 = multi;
  const double lu = uni2.sequence_loss(features, tokens, nullptr, false);
  const double lm = multi2.sequence_loss(features, tokens, &visual, false);
  CHECK(lu == lm);  // bit-for-bit

  const std::vector<int> du = uni2.greedy_decode(features, nullptr, 10);
  const std::vector<int> dm = multi2.greedy_decode(features, &visual, 10);
  CHECK(du == dm);
}

TEST_CASE("parameter flatten/unflatten is the identity") {
  Seq2Seq model(tiny_config(2), 41);
  const std::vector<double> flat = model.params().flatten();
  CHECK(flat.size() == model.params().flat_size());
  Seq2Seq other(tiny_config(2), 99);
  other.params().unflatten(flat);
  const std::vector<double> back = other.params().flatten();
  REQUIRE(back.size() == flat.size());
  for (size_t i = 0; i < flat.size(); ++i) REQUIRE(back[i] == flat[i]);
}

TEST_CASE("training memorizes a single example") {
  ModelConfig cfg = tiny_config(0);
  Seq2Seq model(cfg, 43);
  Rng rng(47);
  std::vector<TrainExample> data(1);
  data[0].features = random_mat(rng, 11, 4);
  data[0].tokens = {4, 6, 3};

  TrainHyper hyper;
  hyper.epochs = 400;
  hyper.adam.lr = 1e-2;
  hyper.seed = 43;
  const std::vector<double> curve = train(model, data, hyper);
  REQUIRE(int(curve.size()) == hyper.epochs);
  CHECK(curve.back() < 0.1);
  for (size_t e = 4; e < curve.size(); ++e) {
    CHECK(curve[e] <= curve[e - 1] + 1e-9);
  }

  // The memorized pair decodes exactly.
  CHECK(model.greedy_decode(data[0].features, nullptr, 10) == data[0].tokens);
  // Determinism of decoding.
  CHECK(model.greedy_decode(data[0].features, nullptr, 10) ==
        model.greedy_decode(data[0].features, nullptr, 10));
  CHECK(model.greedy_decode(data[0].features, nullptr, 0).empty());
}

TEST_CASE("training is deterministic given the seed") {
  ModelConfig cfg = tiny_config(0);
  Rng rng(53);
  std::vector<TrainExample> data(3);
  for (auto& ex : data) {
    ex.features = random_mat(rng, 9, 4);
    ex.tokens = {int(3 + rng.uniform_int(5)), int(3 + rng.uniform_int(5))};
  }
  TrainHyper hyper;
  hyper.epochs = 5;
  hyper.seed = 77;

  Seq2Seq a(cfg, hyper.seed);
  std::vector<TrainExample> da = data;
  const auto curve_a = train(a, da, hyper);
  Seq2Seq b(cfg, hyper.seed);
  std::vector<TrainExample> db = data;
  const auto curve_b = train(b, db, hyper);
  REQUIRE(curve_a.size() == curve_b.size());
  for (size_t i = 0; i < curve_a.size(); ++i) {
    REQUIRE(curve_a[i] == curve_b[i]);
  }

  SECTION("zero epochs leaves the initialization untouched") {
    Seq2Seq fresh(cfg, hyper.seed);
    TrainHyper none = hyper;
    none.epochs = 0;
    std::vector<TrainExample> dc = data;
    const auto curve = train(fresh, dc, none);
    CHECK(curve.empty());
    Seq2Seq init(cfg, hyper.seed);
    const auto f1 = fresh.params().flatten();
    const auto f2 = init.params().flatten();
    REQUIRE(f1 == f2);
  }
}

TEST_CASE("checkpoints round trip") {
  ModelConfig cfg = tiny_config(2);
  Seq2Seq model(cfg, 59);
  Vocabulary vocab(std::set<std::string>{"dog", "cat", "ran", "sat", "the"});
  const std::string path =
      (std::filesystem::temp_directory_path() / "mb_model.bin").string();
  write_checkpoint(model, vocab, 59, path, {{"note", "test"}});

  LoadedModel loaded = read_checkpoint(path);
  CHECK(loaded.config.visual_dim == 2);
  CHECK(loaded.vocab.size() == vocab.size());
  CHECK(loaded.seed == 59);
  CHECK(loaded.extra["note"] == "test");
  const auto a = model.params().flatten();
  const auto b = loaded.model->params().flatten();
  REQUIRE(a == b);

  // Decoding from the reloaded model is identical.
  Rng rng(61);
  const Mat features = random_mat(rng, 10, 4);
  const Vec visual = Vec::Ones(2);
  CHECK(model.greedy_decode(features, &visual, 8) ==
        loaded.model->greedy_decode(features, &visual, 8));

  SECTION("corrupt files fail loudly") {
    write_text_file(path, "MBMODELX\n????");
    CHECK_THROWS_AS(read_checkpoint(path), FormatError);
  }
}

TEST_CASE("GRU LM learns a deterministic alternating corpus") {
  // Corpus of "a b a b ..." sentences: after 'a' the next word is always
  // 'b', after 'b' always 'a'.
  Vocabulary vocab(std::set<std::string>{"a", "b"});
  LmConfig cfg;
  cfg.vocab_size = vocab.size();
  cfg.embed_dim = 4;
  cfg.hidden = 8;
  GruLm lm(cfg, 67);

  std::vector<std::vector<int>> corpus;
  for (int i = 0; i < 8; ++i) {
    std::vector<int> seq;
    for (int t = 0; t < 8; ++t) {
      seq.push_back(vocab.id(t % 2 == 0 ? "a" : "b"));
    }
    corpus.push_back(seq);
  }
  TrainHyper hyper;
  hyper.epochs = 60;
  hyper.adam.lr = 5e-3;
  hyper.seed = 67;
  train_lm(lm, corpus, hyper);

  // Predict at every odd position (truth 'b', context ends with 'a').
  std::vector<std::string> tokens;
  for (int t = 0; t < 8; ++t) tokens.push_back(t % 2 == 0 ? "a" : "b");
  int correct = 0, total = 0;
  for (int pos = 1; pos < 8; pos += 2) {
    auto preds = lm_predict(lm, vocab, tokens, {pos}, 3);
    REQUIRE(preds.size() == 1);
    ++total;
    if (preds[0][0] == "b") ++correct;
  }
  CHECK(correct == total);

  SECTION("empty masked set gives empty predictions") {
    CHECK(lm_predict(lm, vocab, tokens, {}, 3).empty());
  }
}

TEST_CASE("GRU LM on uniform random text is at chance level") {
  const int n_words = 6;
  std::set<std::string> words;
  for (int i = 0; i < n_words; ++i) {
    words.insert("w" + std::to_string(i));
  }
  Vocabulary vocab(words);
  LmConfig cfg;
  cfg.vocab_size = vocab.size();
  cfg.embed_dim = 4;
  cfg.hidden = 6;
  GruLm lm(cfg, 71);

  Rng rng(73);
  std::vector<std::vector<int>> corpus;
  for (int i = 0; i < 30; ++i) {
    std::vector<int> seq;
    for (int t = 0; t < 6; ++t) {
      seq.push_back(3 + int(rng.uniform_int(n_words)));
    }
    corpus.push_back(seq);
  }
  TrainHyper hyper;
  hyper.epochs = 10;
  hyper.seed = 71;
  train_lm(lm, corpus, hyper);

  // Accuracy over fresh random positions: binomial around 1/6.
  int correct = 0, total = 0;
  for (int i = 0; i < 60; ++i) {
    std::vector<std::string> tokens;
    for (int t = 0; t < 6; ++t) {
      tokens.push_back("w" + std::to_string(rng.uniform_int(n_words)));
    }
    const int pos = 2 + int(rng.uniform_int(3));
    auto preds = lm_predict(lm, vocab, tokens, {pos}, 1);
    ++total;
    if (preds[0][0] == tokens[pos]) ++correct;
  }
  const double p = 1.0 / n_words;
  const double sigma = std::sqrt(p * (1 - p) * total);
  CHECK(std::abs(correct - p * total) <= 3.0 * sigma + 1.0);
}
