// maskbench/align.hpp

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

#ifndef MASKBENCH_ALIGN_HPP_
#define MASKBENCH_ALIGN_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/error.hpp"
#include "maskbench/wordset.hpp"

namespace maskbench {
namespace scorer {

enum class OpType { kMatch, kSub, kDel, kIns };

struct EditOp {
  OpType type;
  int ref_idx;  // -1 for insertions
  int hyp_idx;  // -1 for deletions
};

struct AlignmentResult {
  std::vector<EditOp> ops;
  int n_sub = 0;
  int n_del = 0;
  int n_ins = 0;
  int n_ref = 0;

  int n_match() const { return n_ref - n_sub - n_del; }
  int distance() const { return n_sub + n_del + n_ins; }

  std::string op_string() const {
    std::string s;
    s.reserve(ops.size());
    for (const auto& op : ops) {
      switch (op.type) {
        case OpType::kMatch: s.push_back('M'); break;
        case OpType::kSub: s.push_back('S'); break;
        case OpType::kDel: s.push_back('D'); break;
        case OpType::kIns: s.push_back('I'); break;
      }
    }
    return s;
  }

  // True iff reference index i is aligned as a Match.
  bool ref_matched(int i) const {
    for (const auto& op : ops) {
      if (op.type == OpType::kMatch && op.ref_idx == i) return true;
    }
    return false;
  }
};

// Minimum-edit-distance alignment with unit costs. Traceback runs from the
// end and prefers Match > Sub > Del > Ins at every step, which makes the op
// sequence a deterministic function of the inputs.
inline AlignmentResult align(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp) {
  const int n = static_cast<int>(ref.size());
  const int m = static_cast<int>(hyp.size());
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) d[i][0] = i;
  for (int j = 0; j <= m; ++j) d[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = d[i - 1][j] + 1;
      const int ins = d[i][j - 1] + 1;
      d[i][j] = std::min({sub, del, ins});
    }
  }

  AlignmentResult res;
  res.n_ref = n;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        d[i][j] == d[i - 1][j - 1]) {
      res.ops.push_back({OpType::kMatch, i - 1, j - 1});
      --i; --j;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] &&
               d[i][j] == d[i - 1][j - 1] + 1) {
      res.ops.push_back({OpType::kSub, i - 1, j - 1});
      ++res.n_sub;
      --i; --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      res.ops.push_back({OpType::kDel, i - 1, -1});
      ++res.n_del;
      --i;
    } else {
      res.ops.push_back({OpType::kIns, -1, j - 1});
      ++res.n_ins;
      --j;
    }
  }
  std::reverse(res.ops.begin(), res.ops.end());
  return res;
}

struct ScorePair {
  std::string id;
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
};

struct UtteranceScore {
  std::string id;
  int n_sub = 0, n_del = 0, n_ins = 0, n_ref = 0;
  std::string ops;
  std::vector<int> masked_indices;
  std::vector<int> recovered_indices;
};

struct ScoreReport {
  // WER = 100 * (S + D + I) / N, counts pooled over the corpus.
  double wer_percent = 0.0;
  long n_sub = 0, n_del = 0, n_ins = 0, n_ref = 0;
  // RR = 100 * recovered / masked_total; undefined when masked_total == 0.
  std::optional<double> rr_percent;
  long recovered = 0;
  long masked_total = 0;
  std::vector<UtteranceScore> per_utterance;
};

// Masked reference-token indices per utterance id; utterances without masks
// may be absent.
using MaskedIndexMap = std::map<std::string, std::vector<int>>;

// Aligns every pair and pools counts. A masked reference token counts as
// recovered iff its alignment op is a Match at that reference position; a
// correct token that drifted elsewhere does not count.
inline ScoreReport score_corpus(const std::vector<ScorePair>& pairs,
                                const MaskedIndexMap& masked = {}) {
  if (pairs.empty()) throw ConsistencyError("score_corpus: no pairs");
  ScoreReport rep;
  for (const auto& pr : pairs) {
    const AlignmentResult a = align(pr.ref, pr.hyp);
    UtteranceScore us;
    us.id = pr.id;
    us.n_sub = a.n_sub;
    us.n_del = a.n_del;
    us.n_ins = a.n_ins;
    us.n_ref = a.n_ref;
    us.ops = a.op_string();
    rep.n_sub += a.n_sub;
    rep.n_del += a.n_del;
    rep.n_ins += a.n_ins;
    rep.n_ref += a.n_ref;

    auto it = masked.find(pr.id);
    if (it != masked.end()) {
      for (int idx : it->second) {
        if (idx < 0 || idx >= static_cast<int>(pr.ref.size())) {
          throw ConsistencyError("score_corpus: masked index " +
                                 std::to_string(idx) + " out of range for " +
                                 pr.id);
        }
        us.masked_indices.push_back(idx);
        ++rep.masked_total;
        if (a.ref_matched(idx)) {
          us.recovered_indices.push_back(idx);
          ++rep.recovered;
        }
      }
    }
    rep.per_utterance.push_back(std::move(us));
  }
  if (rep.n_ref == 0) {
    throw ConsistencyError("score_corpus: reference token count is zero");
  }
  rep.wer_percent = 100.0 * (rep.n_sub + rep.n_del + rep.n_ins) / rep.n_ref;
  if (rep.masked_total > 0) {
    rep.rr_percent = 100.0 * rep.recovered / rep.masked_total;
  }
  return rep;
}

inline ScoreReport wer(const std::vector<ScorePair>& pairs) {
  return score_corpus(pairs);
}

inline ScoreReport recovery_rate(const std::vector<ScorePair>& pairs,
                                 const MaskedIndexMap& masked) {
  return score_corpus(pairs, masked);
}

struct LmAccuracy {
  double overall_percent = 0.0;
  std::optional<double> restricted_percent;
  long n_total = 0;
  long n_correct = 0;
  long n_restricted = 0;
  long n_restricted_correct = 0;
};

// overall: top-1 accuracy over every masked position. restricted: top-1
// accuracy over only the positions where the top-1 prediction falls in the
// word set.
inline LmAccuracy restricted_lm_accuracy(
    const std::vector<std::vector<std::string>>& predictions,
    const std::vector<std::string>& truths, const lexmask::WordSet& ws) {
  if (predictions.size() != truths.size()) {
    throw ConsistencyError("restricted_lm_accuracy: " +
                           std::to_string(predictions.size()) +
                           " prediction lists for " +
                           std::to_string(truths.size()) + " truths");
  }
  LmAccuracy acc;
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].empty()) {
      throw ConsistencyError(
          "restricted_lm_accuracy: empty prediction list at position " +
          std::to_string(i));
    }
    const std::string& top1 = predictions[i][0];
    const bool correct = lowercase(top1) == lowercase(truths[i]);
    ++acc.n_total;
    if (correct) ++acc.n_correct;
    if (ws.contains(top1)) {
      ++acc.n_restricted;
      if (correct) ++acc.n_restricted_correct;
    }
  }
  if (acc.n_total == 0) {
    throw ConsistencyError("restricted_lm_accuracy: no positions");
  }
  acc.overall_percent = 100.0 * acc.n_correct / acc.n_total;
  if (acc.n_restricted > 0) {
    acc.restricted_percent = 100.0 * acc.n_restricted_correct /
                             acc.n_restricted;
  }
  return acc;
}

inline nlohmann::json report_to_json(const ScoreReport& rep) {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto& us : rep.per_utterance) {
    utts.push_back({{"id", us.id},
                    {"S", us.n_sub},
                    {"D", us.n_del},
                    {"I", us.n_ins},
                    {"N", us.n_ref},
                    {"ops", us.ops},
                    {"masked", us.masked_indices},
                    {"recovered", us.recovered_indices}});
  }
  nlohmann::json j = {{"wer_percent", rep.wer_percent},
                      {"S", rep.n_sub},
                      {"D", rep.n_del},
                      {"I", rep.n_ins},
                      {"N", rep.n_ref},
                      {"recovered", rep.recovered},
                      {"masked_total", rep.masked_total},
                      {"utterances", utts}};
  if (rep.rr_percent) {
    j["rr_percent"] = *rep.rr_percent;
  } else {
    j["rr_percent"] = nullptr;
  }
  return j;
}

}  // namespace scorer
}  // namespace maskbench

#endif  // MASKBENCH_ALIGN_HPP_
