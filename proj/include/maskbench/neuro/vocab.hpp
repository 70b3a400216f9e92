// maskbench/neuro/vocab.hpp

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

#ifndef MASKBENCH_NEURO_VOCAB_HPP_
#define MASKBENCH_NEURO_VOCAB_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "maskbench/error.hpp"

namespace maskbench {
namespace neuro {

// Token ids: 0 = <s>, 1 = </s>, 2 = <unk>, then corpus words in
// lexicographic order (deterministic across runs).
class Vocabulary {
 public:
  static constexpr int kBos = 0;
  static constexpr int kEos = 1;
  static constexpr int kUnk = 2;

  Vocabulary() : tokens_{"<s>", "</s>", "<unk>"} { reindex(); }

  explicit Vocabulary(const std::set<std::string>& words)
      : tokens_{"<s>", "</s>", "<unk>"} {
    tokens_.insert(tokens_.end(), words.begin(), words.end());
    reindex();
  }

  static Vocabulary from_corpus(
      const std::map<std::string, std::vector<std::string>>& transcripts) {
    std::set<std::string> words;
    for (const auto& [utt, toks] : transcripts) {
      words.insert(toks.begin(), toks.end());
    }
    return Vocabulary(words);
  }

  static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
    Vocabulary v;
    v.tokens_ = tokens;
    v.reindex();
    return v;
  }

  int size() const { return static_cast<int>(tokens_.size()); }

  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }

  const std::string& token(int id) const {
    if (id < 0 || id >= size()) {
      throw ShapeError("token id " + std::to_string(id) + " out of range");
    }
    return tokens_[id];
  }

  bool is_special(int id) const { return id < 3; }

  std::vector<int> encode(const std::vector<std::string>& words) const {
    std::vector<int> ids;
    ids.reserve(words.size());
    for (const auto& w : words) ids.push_back(id(w));
    return ids;
  }

  std::vector<std::string> decode(const std::vector<int>& ids) const {
    std::vector<std::string> words;
    words.reserve(ids.size());
    for (int i : ids) words.push_back(token(i));
    return words;
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void reindex() {
    index_.clear();
    for (size_t i = 0; i < tokens_.size(); ++i) {
      index_[tokens_[i]] = static_cast<int>(i);
    }
    if (tokens_.size() < 3 || tokens_[0] != "<s>" || tokens_[1] != "</s>" ||
        tokens_[2] != "<unk>") {
      throw ConsistencyError("vocabulary must start with <s> </s> <unk>");
    }
  }

  std::vector<std::string> tokens_;
  std::map<std::string, int> index_;
};

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_VOCAB_HPP_
