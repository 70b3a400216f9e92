// maskbench/bench/manifest.hpp

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

#ifndef MASKBENCH_BENCH_MANIFEST_HPP_
#define MASKBENCH_BENCH_MANIFEST_HPP_

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/hash.hpp"
#include "maskbench/textio.hpp"

namespace maskbench {
namespace bench {

inline constexpr const char* kToolVersion = "maskbench 0.1.0";

// Per-stage record of what went in and what came out, as content hashes
// keyed by path relative to the run directory. Wall-clock is informational;
// reproducibility is judged on the hashes alone.
struct StageRecord {
  std::string name;
  std::map<std::string, std::string> inputs;   // rel path -> fnv1a64 hex
  std::map<std::string, std::string> outputs;  // rel path -> fnv1a64 hex
  double wall_ms = 0.0;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  nlohmann::json config;
  std::vector<StageRecord> stages;

  StageRecord* find(const std::string& name) {
    for (auto& s : stages) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : m.stages) {
    stages.push_back({{"name", s.name},
                      {"inputs", s.inputs},
                      {"outputs", s.outputs},
                      {"wall_ms", s.wall_ms}});
  }
  return {{"tool_version", m.tool_version},
          {"config", m.config},
          {"stages", stages}};
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
  write_text_file(path, manifest_to_json(m).dump(2) + "\n");
}

inline RunManifest read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad manifest " + path + ": " + e.what());
  }
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.config = j.at("config");
  for (const auto& js : j.at("stages")) {
    StageRecord s;
    s.name = js.at("name").get<std::string>();
    s.inputs = js.at("inputs").get<std::map<std::string, std::string>>();
    s.outputs = js.at("outputs").get<std::map<std::string, std::string>>();
    s.wall_ms = js.at("wall_ms").get<double>();
    m.stages.push_back(std::move(s));
  }
  return m;
}

}  // namespace bench
}  // namespace maskbench

#endif  // MASKBENCH_BENCH_MANIFEST_HPP_
