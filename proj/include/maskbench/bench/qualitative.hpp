// maskbench/bench/qualitative.hpp

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

#ifndef MASKBENCH_BENCH_QUALITATIVE_HPP_
#define MASKBENCH_BENCH_QUALITATIVE_HPP_

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "maskbench/align.hpp"
#include "maskbench/error.hpp"

namespace maskbench {
namespace bench {

struct DecodedRun {
  std::string name;
  std::map<std::string, std::vector<std::string>> hyp;
};

struct QualitativeEntry {
  std::string id;
  int disagreement = 0;  // masked positions where the runs differ
  std::vector<std::string> ref;
  std::vector<int> masked;
  // run name -> token aligned to each masked reference position
  // ("***" when the alignment deletes it).
  std::vector<std::pair<std::string, std::vector<std::string>>> aligned;
  std::vector<std::pair<std::string, std::vector<std::string>>> hyps;
};

// Token each run's alignment puts at a masked reference index.
inline std::vector<std::string> aligned_tokens(
    const std::vector<std::string>& ref, const std::vector<std::string>& hyp,
    const std::vector<int>& masked) {
  const scorer::AlignmentResult a = scorer::align(ref, hyp);
  std::map<int, std::string> at;
  for (const auto& op : a.ops) {
    if (op.type == scorer::OpType::kMatch || op.type == scorer::OpType::kSub) {
      at[op.ref_idx] = hyp[op.hyp_idx];
    } else if (op.type == scorer::OpType::kDel) {
      at[op.ref_idx] = "***";
    }
  }
  std::vector<std::string> out;
  for (int idx : masked) out.push_back(at.at(idx));
  return out;
}

// The k utterances whose runs disagree most at masked positions. The
// disagreement score of an utterance is the number of masked positions at
// which the runs' aligned tokens are not all identical; ties break by
// utterance id ascending.
inline std::vector<QualitativeEntry> qualitative_dump(
    const std::vector<DecodedRun>& runs,
    const std::map<std::string, std::vector<std::string>>& refs,
    const std::map<std::string, std::vector<int>>& masked_per_utt, int k) {
  if (runs.empty()) throw ConsistencyError("qualitative_dump: no runs");
  std::vector<QualitativeEntry> entries;
  for (const auto& [id, ref] : refs) {
    auto mit = masked_per_utt.find(id);
    if (mit == masked_per_utt.end() || mit->second.empty()) continue;
    QualitativeEntry e;
    e.id = id;
    e.ref = ref;
    e.masked = mit->second;
    for (const auto& run : runs) {
      auto hit = run.hyp.find(id);
      if (hit == run.hyp.end()) {
        throw ConsistencyError("run " + run.name + " did not decode " + id);
      }
      e.aligned.push_back({run.name, aligned_tokens(ref, hit->second,
                                                    e.masked)});
      e.hyps.push_back({run.name, hit->second});
    }
    for (size_t m = 0; m < e.masked.size(); ++m) {
      bool all_same = true;
      for (size_t r = 1; r < e.aligned.size(); ++r) {
        if (e.aligned[r].second[m] != e.aligned[0].second[m]) all_same = false;
      }
      if (!all_same) ++e.disagreement;
    }
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const QualitativeEntry& a, const QualitativeEntry& b) {
              if (a.disagreement != b.disagreement) {
                return a.disagreement > b.disagreement;
              }
              return a.id < b.id;
            });
  if (static_cast<int>(entries.size()) > k) entries.resize(k);
  return entries;
}

inline std::string render_qualitative(
    const std::vector<QualitativeEntry>& entries) {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << e.id << "  (disagreement " << e.disagreement << ")\n";
    os << "  REF : ";
    for (size_t i = 0; i < e.ref.size(); ++i) {
      if (i) os << ' ';
      const bool is_masked =
          std::find(e.masked.begin(), e.masked.end(), static_cast<int>(i)) !=
          e.masked.end();
      os << (is_masked ? "[" + e.ref[i] + "]" : e.ref[i]);
    }
    os << "\n";
    for (size_t r = 0; r < e.hyps.size(); ++r) {
      os << "  " << e.hyps[r].first << " : ";
      for (size_t i = 0; i < e.hyps[r].second.size(); ++i) {
        if (i) os << ' ';
        os << e.hyps[r].second[i];
      }
      os << "   @masked:";
      for (const auto& tok : e.aligned[r].second) os << ' ' << tok;
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace bench
}  // namespace maskbench

#endif  // MASKBENCH_BENCH_QUALITATIVE_HPP_
