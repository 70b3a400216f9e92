// maskbench/textio.hpp

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

#ifndef MASKBENCH_TEXTIO_HPP_
#define MASKBENCH_TEXTIO_HPP_

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "maskbench/error.hpp"

namespace maskbench {

inline std::string lowercase(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open file for writing: " + path);
  os << text;
  if (!os) throw IoError("short write to " + path);
}

// Transcript / hypothesis lines: `utt_id<TAB>token token ...`. Any
// whitespace separates fields. Tokens are lowercased.
inline std::map<std::string, std::vector<std::string>> parse_transcripts(
    const std::string& text) {
  std::map<std::string, std::vector<std::string>> out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_ws(line);
    if (fields.empty()) continue;
    std::vector<std::string> toks;
    toks.reserve(fields.size() - 1);
    for (size_t i = 1; i < fields.size(); ++i) {
      toks.push_back(lowercase(fields[i]));
    }
    if (!out.emplace(fields[0], std::move(toks)).second) {
      throw ParseError("transcript line " + std::to_string(lineno) +
                       ": duplicate utterance id " + fields[0]);
    }
  }
  return out;
}

inline std::map<std::string, std::vector<std::string>> read_transcripts(
    const std::string& path) {
  return parse_transcripts(read_text_file(path));
}

inline void write_transcripts(
    const std::map<std::string, std::vector<std::string>>& trans,
    const std::string& path) {
  std::ostringstream os;
  for (const auto& [utt, toks] : trans) {
    os << utt << '\t';
    for (size_t i = 0; i < toks.size(); ++i) {
      if (i) os << ' ';
      os << toks[i];
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

// One non-empty, non-comment line per entry.
inline std::vector<std::string> read_list_file(const std::string& path) {
  std::istringstream lines(read_text_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace maskbench

#endif  // MASKBENCH_TEXTIO_HPP_
