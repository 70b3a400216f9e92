// maskbench/neuro/checkpoint.hpp

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

#ifndef MASKBENCH_NEURO_CHECKPOINT_HPP_
#define MASKBENCH_NEURO_CHECKPOINT_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/error.hpp"
#include "maskbench/neuro/model.hpp"
#include "maskbench/neuro/vocab.hpp"

namespace maskbench {
namespace neuro {

// Checkpoint layout: magic "MBMODEL1\n", u32 little-endian JSON header
// length, the JSON header (configs, vocab, seed), then the flat little-endian
// f64 parameter block in registration order.

namespace detail {

constexpr char kModelMagic[] = "MBMODEL1\n";  // 9 bytes

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

inline uint32_t take_u32(const unsigned char* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

inline double take_f64(const unsigned char* p) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= uint64_t(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

inline nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  return {{"encoder",
           {{"input_dim", cfg.encoder.input_dim},
            {"hidden", cfg.encoder.hidden},
            {"n_layers", cfg.encoder.n_layers},
            {"subsample_after", cfg.encoder.subsample_after}}},
          {"decoder",
           {{"vocab_size", cfg.decoder.vocab_size},
            {"embed_dim", cfg.decoder.embed_dim},
            {"hidden", cfg.decoder.hidden},
            {"n_layers", cfg.decoder.n_layers},
            {"attention_dim", cfg.decoder.attention_dim}}},
          {"visual_dim", cfg.visual_dim}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  const auto& e = j.at("encoder");
  cfg.encoder.input_dim = e.at("input_dim").get<int>();
  cfg.encoder.hidden = e.at("hidden").get<int>();
  cfg.encoder.n_layers = e.at("n_layers").get<int>();
  cfg.encoder.subsample_after =
      e.at("subsample_after").get<std::vector<int>>();
  const auto& d = j.at("decoder");
  cfg.decoder.vocab_size = d.at("vocab_size").get<int>();
  cfg.decoder.embed_dim = d.at("embed_dim").get<int>();
  cfg.decoder.hidden = d.at("hidden").get<int>();
  cfg.decoder.n_layers = d.at("n_layers").get<int>();
  cfg.decoder.attention_dim = d.at("attention_dim").get<int>();
  cfg.visual_dim = j.at("visual_dim").get<int>();
  return cfg;
}

inline void write_checkpoint(const Seq2Seq& model, const Vocabulary& vocab,
                             uint64_t seed, const std::string& path,
                             const nlohmann::json& extra = {}) {
  nlohmann::json header = {{"model", model_config_to_json(model.config())},
                           {"vocab", vocab.tokens()},
                           {"seed", seed},
                           {"extra", extra}};
  const std::string hstr = header.dump();

  std::string out;
  out.append(detail::kModelMagic, 9);
  detail::put_u32(out, static_cast<uint32_t>(hstr.size()));
  out.append(hstr);
  for (const auto& e : model.params().entries()) {
    const double* p = e.value.data();
    for (Eigen::Index i = 0; i < e.value.size(); ++i) {
      detail::put_f64(out, p[i]);
    }
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os.write(out.data(), std::streamsize(out.size()));
  if (!os) throw IoError("short write to " + path);
}

struct LoadedModel {
  ModelConfig config;
  Vocabulary vocab;
  uint64_t seed = 0;
  nlohmann::json extra;
  std::unique_ptr<Seq2Seq> model;
};

inline LoadedModel read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 13 || std::memcmp(p, detail::kModelMagic, 9) != 0) {
    throw FormatError("bad checkpoint magic: " + path);
  }
  const uint32_t hlen = detail::take_u32(p + 9);
  if (bytes.size() < 13 + size_t(hlen)) {
    throw FormatError("truncated checkpoint header: " + path);
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(13, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad checkpoint header in " + path + ": " + e.what());
  }

  LoadedModel lm;
  lm.config = model_config_from_json(header.at("model"));
  lm.vocab = Vocabulary::from_tokens(
      header.at("vocab").get<std::vector<std::string>>());
  lm.seed = header.at("seed").get<uint64_t>();
  lm.extra = header.value("extra", nlohmann::json());
  lm.model = std::make_unique<Seq2Seq>(lm.config, lm.seed);

  const size_t want = 13 + hlen + lm.model->params().flat_size() * 8;
  if (bytes.size() != want) {
    throw FormatError("checkpoint size mismatch in " + path + ": have " +
                      std::to_string(bytes.size()) + " bytes, header implies " +
                      std::to_string(want));
  }
  size_t off = 13 + hlen;
  for (auto& e : lm.model->params().entries()) {
    double* q = e.value.data();
    for (Eigen::Index i = 0; i < e.value.size(); ++i, off += 8) {
      q[i] = detail::take_f64(p + off);
    }
  }
  return lm;
}

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_CHECKPOINT_HPP_
