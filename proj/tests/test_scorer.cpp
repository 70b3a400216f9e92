// tests/test_scorer.cpp

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

#include "maskbench/align.hpp"
#include "maskbench/rng.hpp"
#include "oracles.hpp"

using namespace maskbench;
using namespace maskbench::scorer;

namespace {

std::vector<std::string> random_tokens(Rng& rng, int max_len, int vocab) {
  std::vector<std::string> toks(rng.uniform_int(max_len + 1));
  for (auto& t : toks) {
    t = std::string(1, char('a' + rng.uniform_int(vocab)));
  }
  return toks;
}

// The AlignmentResult structural invariants: each ref index consumed exactly
// once in order by Match/Sub/Del, each hyp index by Match/Sub/Ins.
void check_alignment_invariants(const AlignmentResult& a, int n_ref,
                                int n_hyp) {
  int next_ref = 0, next_hyp = 0, matches = 0;
  for (const auto& op : a.ops) {
    switch (op.type) {
      case OpType::kMatch:
        ++matches;
        REQUIRE(op.ref_idx == next_ref++);
        REQUIRE(op.hyp_idx == next_hyp++);
        break;
      case OpType::kSub:
        REQUIRE(op.ref_idx == next_ref++);
        REQUIRE(op.hyp_idx == next_hyp++);
        break;
      case OpType::kDel:
        REQUIRE(op.ref_idx == next_ref++);
        break;
      case OpType::kIns:
        REQUIRE(op.hyp_idx == next_hyp++);
        break;
    }
  }
  REQUIRE(next_ref == n_ref);
  REQUIRE(next_hyp == n_hyp);
  REQUIRE(a.n_sub + a.n_del + matches == n_ref);
}

}  // namespace

TEST_CASE("align on identical sequences is all matches") {
  AlignmentResult a = align({"a", "dog"}, {"a", "dog"});
  CHECK(a.op_string() == "MM");
  CHECK(a.n_sub == 0);
  CHECK(a.n_del == 0);
  CHECK(a.n_ins == 0);
}

TEST_CASE("align finds the substitution") {
  AlignmentResult a = align({"a", "dog", "runs"}, {"a", "cat", "runs"});
  CHECK(a.op_string() == "MSM");
  CHECK(a.n_sub == 1);
}

TEST_CASE("align against empty hypothesis deletes everything") {
  AlignmentResult a = align({"a"}, {});
  CHECK(a.op_string() == "D");
  CHECK(a.n_del == 1);
}

TEST_CASE("align cost equals the brute-force Levenshtein oracle") {
  Rng rng(61);
  for (int trial = 0; trial < 400; ++trial) {
    auto ref = random_tokens(rng, 12, 5);
    auto hyp = random_tokens(rng, 12, 5);
    AlignmentResult a = align(ref, hyp);
    REQUIRE(a.distance() == oracles::lev_distance(ref, hyp));
    check_alignment_invariants(a, int(ref.size()), int(hyp.size()));
    // Canonical traceback agrees with the independent recursive oracle.
    REQUIRE(a.op_string() == oracles::canonical_ops(ref, hyp));
  }
}

TEST_CASE("wer pools counts over the corpus") {
  SECTION("identical pairs give zero") {
    std::vector<ScorePair> pairs = {{"u1", {"a", "b"}, {"a", "b"}},
                                    {"u2", {"c"}, {"c"}}};
    CHECK(wer(pairs).wer_percent == 0.0);
  }
  SECTION("single substitution in three words") {
    std::vector<ScorePair> pairs = {{"u1", {"a", "b", "c"}, {"a", "x", "c"}}};
    ScoreReport r = wer(pairs);
    CHECK(r.n_sub == 1);
    CHECK(r.wer_percent == Catch::Approx(100.0 / 3.0));
  }
  SECTION("insertions can push WER past 100") {
    std::vector<ScorePair> pairs = {{"u1", {"a"}, {"a", "b"}}};
    CHECK(wer(pairs).wer_percent == Catch::Approx(100.0));
    std::vector<ScorePair> two = {{"u1", {"a"}, {"x", "y"}}};
    CHECK(wer(two).wer_percent == Catch::Approx(200.0));
  }
  SECTION("pooled, not averaged") {
    // u1: 0/1 errors over N=1; u2: 3/3 over N=3. Pooled = 3/4.
    std::vector<ScorePair> pairs = {{"u1", {"a"}, {"a"}},
                                    {"u2", {"b", "c", "d"}, {"x", "y", "z"}}};
    CHECK(wer(pairs).wer_percent == Catch::Approx(75.0));
  }
  SECTION("zero reference tokens is an error") {
    std::vector<ScorePair> pairs = {{"u1", {}, {"a"}}};
    CHECK_THROWS_AS(wer(pairs), ConsistencyError);
    CHECK_THROWS_AS(wer({}), ConsistencyError);
  }
}

TEST_CASE("recovery rate counts matches at masked positions") {
  SECTION("perfect hypothesis recovers everything") {
    std::vector<ScorePair> pairs = {{"u1", {"the", "dog"}, {"the", "dog"}}};
    MaskedIndexMap masked = {{"u1", {1}}};
    ScoreReport r = recovery_rate(pairs, masked);
    REQUIRE(r.rr_percent.has_value());
    CHECK(*r.rr_percent == 100.0);
  }
  SECTION("substituted masked word is not recovered") {
    std::vector<ScorePair> pairs = {
        {"u1", {"the", "dog", "runs"}, {"the", "cat", "runs"}}};
    MaskedIndexMap masked = {{"u1", {1}}};
    ScoreReport r = recovery_rate(pairs, masked);
    CHECK(r.recovered == 0);
    CHECK(*r.rr_percent == 0.0);
  }
  SECTION("pooling over utterances: 3 of 4 is 75") {
    std::vector<ScorePair> pairs = {
        {"u1", {"a", "b", "c"}, {"a", "x", "c"}},   // masked {0,1}: recover a
        {"u2", {"d", "e", "f"}, {"d", "e", "f"}}};  // masked {0,2}: both
    MaskedIndexMap masked = {{"u1", {0, 1}}, {"u2", {0, 2}}};
    ScoreReport r = recovery_rate(pairs, masked);
    CHECK(r.masked_total == 4);
    CHECK(r.recovered == 3);
    CHECK(*r.rr_percent == Catch::Approx(75.0));
  }
  SECTION("correct word at the wrong position does not count") {
    // "dog" appears in the hypothesis but aligned elsewhere.
    std::vector<ScorePair> pairs = {
        {"u1", {"the", "dog", "sat"}, {"dog", "sat"}}};
    MaskedIndexMap masked = {{"u1", {1}}};
    ScoreReport r = recovery_rate(pairs, masked);
    // Canonical alignment: Del(the), Sub(dog->dog?) -- dog==dog is a Match:
    // ref the/dog/sat vs hyp dog/sat aligns Del, Match, Match.
    CHECK(r.recovered == 1);
  }
  SECTION("no mask entries leaves RR undefined") {
    std::vector<ScorePair> pairs = {{"u1", {"a"}, {"a"}}};
    ScoreReport r = score_corpus(pairs);
    CHECK(!r.rr_percent.has_value());
  }
  SECTION("out-of-range masked index is an error") {
    std::vector<ScorePair> pairs = {{"u1", {"a"}, {"a"}}};
    MaskedIndexMap masked = {{"u1", {3}}};
    CHECK_THROWS_AS(recovery_rate(pairs, masked), ConsistencyError);
  }
}

TEST_CASE("recovery rate agrees with the canonical-alignment oracle") {
  Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    auto ref = random_tokens(rng, 10, 4);
    auto hyp = random_tokens(rng, 10, 4);
    if (ref.empty()) ref.push_back("a");
    std::vector<int> masked;
    for (int i = 0; i < int(ref.size()); ++i) {
      if (rng.uniform() < 0.4) masked.push_back(i);
    }
    if (masked.empty()) masked.push_back(0);

    std::vector<ScorePair> pairs = {{"u", ref, hyp}};
    MaskedIndexMap mm = {{"u", masked}};
    ScoreReport r = recovery_rate(pairs, mm);

    auto matched = oracles::matched_ref_positions(ref, hyp);
    long expect = 0;
    for (int i : masked) {
      if (matched[i]) ++expect;
    }
    REQUIRE(r.recovered == expect);
    REQUIRE(r.masked_total == long(masked.size()));
  }
}

TEST_CASE("restricted LM accuracy") {
  lexmask::WordSet ws;
  ws.words = {"dog", "cat", "ball"};

  SECTION("all correct") {
    std::vector<std::vector<std::string>> preds = {{"dog"}, {"cat"}};
    std::vector<std::string> truths = {"dog", "cat"};
    LmAccuracy acc = restricted_lm_accuracy(preds, truths, ws);
    CHECK(acc.overall_percent == 100.0);
    REQUIRE(acc.restricted_percent.has_value());
    CHECK(*acc.restricted_percent == 100.0);
  }
  SECTION("spec worked example: overall one third, restricted one half") {
    // [in-set correct, out-of-set wrong, in-set wrong]
    std::vector<std::vector<std::string>> preds = {
        {"dog", "cat"}, {"tree", "dog"}, {"cat", "ball"}};
    std::vector<std::string> truths = {"dog", "dog", "ball"};
    LmAccuracy acc = restricted_lm_accuracy(preds, truths, ws);
    CHECK(acc.overall_percent == Catch::Approx(100.0 / 3.0));
    REQUIRE(acc.restricted_percent.has_value());
    CHECK(*acc.restricted_percent == Catch::Approx(50.0));
  }
  SECTION("no in-set predictions leaves restricted undefined") {
    std::vector<std::vector<std::string>> preds = {{"tree"}, {"sky"}};
    std::vector<std::string> truths = {"dog", "cat"};
    LmAccuracy acc = restricted_lm_accuracy(preds, truths, ws);
    CHECK(!acc.restricted_percent.has_value());
  }
  SECTION("empty prediction list is an error") {
    std::vector<std::vector<std::string>> preds = {{}};
    std::vector<std::string> truths = {"dog"};
    CHECK_THROWS_AS(restricted_lm_accuracy(preds, truths, ws),
                    ConsistencyError);
  }
}

TEST_CASE("score report JSON carries null RR when undefined") {
  std::vector<ScorePair> pairs = {{"u1", {"a"}, {"a"}}};
  nlohmann::json j = report_to_json(score_corpus(pairs));
  CHECK(j["rr_percent"].is_null());
  CHECK(j["wer_percent"] == 0.0);
  CHECK(j["utterances"][0]["ops"] == "M");
}
