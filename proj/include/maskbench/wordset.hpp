// maskbench/wordset.hpp

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

#ifndef MASKBENCH_WORDSET_HPP_
#define MASKBENCH_WORDSET_HPP_

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/textio.hpp"

namespace maskbench {
namespace lexmask {

struct TaggedToken {
  std::string token;  // lowercase
  std::string pos;
};

struct WordSet {
  enum class Kind { kTopNouns, kPlaceCategories, kExplicit };

  std::string name;
  std::set<std::string> words;  // all lowercase
  Kind kind = Kind::kExplicit;
  int top_n = 0;            // TopNouns only
  std::string source_file;  // PlaceCategories only

  bool contains(const std::string& word) const {
    return words.count(lowercase(word)) > 0;
  }
};

using TaggedCorpus = std::map<std::string, std::vector<TaggedToken>>;

// Tagged transcript lines: `utt_id<TAB>token/TAG token/TAG ...`; the tag
// follows the last '/'. Tokens are lowercased, tags kept verbatim.
inline TaggedCorpus parse_tagged_transcripts(const std::string& text) {
  TaggedCorpus out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_ws(line);
    if (fields.empty()) continue;
    std::vector<TaggedToken> toks;
    for (size_t i = 1; i < fields.size(); ++i) {
      const size_t slash = fields[i].rfind('/');
      if (slash == std::string::npos || slash == 0 ||
          slash + 1 == fields[i].size()) {
        throw ParseError("tagged transcript line " + std::to_string(lineno) +
                         ": token without /TAG: " + fields[i]);
      }
      toks.push_back(TaggedToken{lowercase(fields[i].substr(0, slash)),
                                 fields[i].substr(slash + 1)});
    }
    if (!out.emplace(fields[0], std::move(toks)).second) {
      throw ParseError("tagged transcript line " + std::to_string(lineno) +
                       ": duplicate utterance id " + fields[0]);
    }
  }
  return out;
}

inline TaggedCorpus read_tagged_transcripts(const std::string& path) {
  return parse_tagged_transcripts(read_text_file(path));
}

struct TopNounsOptions {
  // With wide_tags, NNS/NNP/NNPS count as well; default is the bare NN tag.
  bool wide_tags = false;
};

// The n most frequent noun tokens. Ties at the cutoff break
// lexicographically ascending, so the result is a deterministic function of
// the counts and top_nouns(c, n) is a prefix of top_nouns(c, n+1).
inline WordSet top_nouns(const TaggedCorpus& corpus, int n = 100,
                         const TopNounsOptions& opts = {},
                         std::ostream& warn = std::cerr) {
  if (corpus.empty()) throw ConsistencyError("top_nouns: empty corpus");
  std::unordered_map<std::string, long> counts;
  for (const auto& [utt, toks] : corpus) {
    for (const auto& t : toks) {
      const bool is_noun =
          t.pos == "NN" ||
          (opts.wide_tags &&
           (t.pos == "NNS" || t.pos == "NNP" || t.pos == "NNPS"));
      if (is_noun) ++counts[t.token];
    }
  }
  std::vector<std::pair<std::string, long>> ranked(counts.begin(),
                                                   counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  WordSet ws;
  ws.kind = WordSet::Kind::kTopNouns;
  ws.top_n = n;
  ws.name = "top" + std::to_string(n) + "_nouns";
  if (ranked.empty() && n > 0) {
    warn << "maskbench: warning: corpus has no noun-tagged tokens\n";
  } else if (static_cast<int>(ranked.size()) < n) {
    warn << "maskbench: warning: only " << ranked.size()
         << " distinct nouns for requested top " << n << "\n";
  }
  for (int i = 0; i < n && i < static_cast<int>(ranked.size()); ++i) {
    ws.words.insert(ranked[i].first);
  }
  return ws;
}

// Category names are lowercased and split on '_', '/' and '-' into unit
// tokens; a vocabulary word joins the set iff it equals one of them. In
// strict mode only single-token categories match.
inline std::vector<std::string> split_category(const std::string& category) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : lowercase(category)) {
    if (c == '_' || c == '/' || c == '-') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

struct PlaceWordsOptions {
  bool strict = false;  // only whole single-token categories match
};

inline WordSet place_words(const std::set<std::string>& vocab,
                           const std::vector<std::string>& categories,
                           const PlaceWordsOptions& opts = {}) {
  if (categories.empty()) {
    throw ConsistencyError("place_words: empty category list");
  }
  std::set<std::string> unit_tokens;
  for (const auto& cat : categories) {
    std::vector<std::string> parts = split_category(cat);
    if (opts.strict && parts.size() != 1) continue;
    unit_tokens.insert(parts.begin(), parts.end());
  }
  WordSet ws;
  ws.kind = WordSet::Kind::kPlaceCategories;
  ws.name = "place_words";
  for (const auto& w : vocab) {
    if (unit_tokens.count(lowercase(w))) ws.words.insert(lowercase(w));
  }
  return ws;
}

struct Coverage {
  long hits = 0;
  long total = 0;
  double percent() const { return 100.0 * hits / total; }
};

// Fraction of token occurrences that fall in the word set.
inline Coverage coverage(
    const std::map<std::string, std::vector<std::string>>& corpus,
    const WordSet& ws) {
  Coverage cov;
  for (const auto& [utt, toks] : corpus) {
    for (const auto& t : toks) {
      ++cov.total;
      if (ws.contains(t)) ++cov.hits;
    }
  }
  if (cov.total == 0) throw ConsistencyError("coverage: empty corpus");
  return cov;
}

inline std::string provenance_string(const WordSet& ws) {
  switch (ws.kind) {
    case WordSet::Kind::kTopNouns:
      return "top-nouns n=" + std::to_string(ws.top_n);
    case WordSet::Kind::kPlaceCategories:
      return "place-categories source=" + ws.source_file;
    case WordSet::Kind::kExplicit:
      return "explicit";
  }
  return "explicit";
}

// One lowercase word per line; '#' lines are comments. The header comment
// records provenance.
inline void write_wordset(const WordSet& ws, const std::string& path) {
  std::ostringstream os;
  os << "# wordset: " << ws.name << "\n";
  os << "# provenance: " << provenance_string(ws) << "\n";
  for (const auto& w : ws.words) os << w << "\n";
  write_text_file(path, os.str());
}

inline WordSet read_wordset(const std::string& path) {
  WordSet ws;
  ws.kind = WordSet::Kind::kExplicit;
  ws.name = path;
  for (const auto& line : read_list_file(path)) {
    for (const auto& tok : split_ws(line)) ws.words.insert(lowercase(tok));
  }
  return ws;
}

inline std::vector<std::string> read_categories(const std::string& path) {
  std::vector<std::string> cats = read_list_file(path);
  if (cats.empty()) {
    throw ConsistencyError("empty category file: " + path);
  }
  return cats;
}

}  // namespace lexmask
}  // namespace maskbench

#endif  // MASKBENCH_WORDSET_HPP_
