// maskbench/ctm.hpp

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

#ifndef MASKBENCH_CTM_HPP_
#define MASKBENCH_CTM_HPP_

#include <algorithm>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "maskbench/error.hpp"

namespace maskbench {
namespace corruptor {

// One aligned word: [start, end) in seconds within its utterance.
struct WordTiming {
  std::string word;
  double start = 0.0;
  double end = 0.0;
};

// CTM lines: `utt_id channel start_seconds duration_seconds word`, with an
// optional trailing confidence field which is ignored. Lines starting with
// ';;' or '#' are comments. Output per utterance is sorted by start time.
// Overlapping words are kept as-is with a warning; merging is the mask
// planner's job.
inline std::map<std::string, std::vector<WordTiming>> parse_ctm(
    const std::string& text, std::ostream& warn = std::cerr) {
  std::map<std::string, std::vector<WordTiming>> out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind(";;", 0) == 0 || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string utt, chan, start_s, dur_s, word, extra;
    if (!(fields >> utt >> chan >> start_s >> dur_s >> word)) {
      throw ParseError("ctm line " + std::to_string(lineno) +
                       ": expected `utt chan start dur word`");
    }
    if (fields >> extra >> extra) {
      throw ParseError("ctm line " + std::to_string(lineno) +
                       ": too many fields");
    }
    double start, dur;
    try {
      size_t pos1 = 0, pos2 = 0;
      start = std::stod(start_s, &pos1);
      dur = std::stod(dur_s, &pos2);
      if (pos1 != start_s.size() || pos2 != dur_s.size()) {
        throw std::invalid_argument("trailing junk");
      }
    } catch (const std::exception&) {
      throw ParseError("ctm line " + std::to_string(lineno) +
                       ": non-numeric start or duration");
    }
    if (start < 0.0) {
      throw ParseError("ctm line " + std::to_string(lineno) +
                       ": negative start time");
    }
    if (dur <= 0.0) {
      throw ParseError("ctm line " + std::to_string(lineno) +
                       ": non-positive duration");
    }
    out[utt].push_back(WordTiming{word, start, start + dur});
  }
  for (auto& [utt, timings] : out) {
    std::stable_sort(timings.begin(), timings.end(),
                     [](const WordTiming& a, const WordTiming& b) {
                       if (a.start != b.start) return a.start < b.start;
                       return a.end < b.end;
                     });
    for (size_t i = 1; i < timings.size(); ++i) {
      if (timings[i].start < timings[i - 1].end) {
        warn << "maskbench: warning: overlapping words in utterance " << utt
             << " ('" << timings[i - 1].word << "' and '" << timings[i].word
             << "')\n";
      }
    }
  }
  return out;
}

}  // namespace corruptor
}  // namespace maskbench

#endif  // MASKBENCH_CTM_HPP_
