// maskbench/bench/synthcorpus.hpp

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

#ifndef MASKBENCH_BENCH_SYNTHCORPUS_HPP_
#define MASKBENCH_BENCH_SYNTHCORPUS_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "maskbench/features.hpp"
#include "maskbench/rng.hpp"
#include "maskbench/textio.hpp"
#include "maskbench/wav.hpp"

namespace maskbench {
namespace bench {

// Miniature spoken-caption stand-in: every vocabulary word is a distinct
// pure tone (mel-spaced so adjacent words land in different filterbank
// channels), each utterance is a few filler words plus exactly one target
// word, and the per-utterance "image" is a one-hot over the vocabulary
// identifying that target. Targets are the only NN-tagged tokens, so the
// top-nouns word set recovers exactly them.
struct SynthSpec {
  int n_utts = 200;
  int vocab_words = 30;
  int n_targets = 5;
  int fillers_per_utt = 3;  // total words per utterance = fillers + 1
  double word_duration = 0.22;
  double word_gap = 0.06;
  double amplitude = 0.3;
  int rate = 16000;
  uint64_t seed = 0;
  int train_count = 160;  // leading utterances; the rest are the test split
};

struct SynthPaths {
  std::string wav_dir;
  std::string trans;
  std::string tagged;
  std::string ctm;
  std::string visual;
  std::string visual_ids;
  std::string train_list;
  std::string test_list;
};

inline std::string synth_word(int index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "w%02d", index);
  return std::string(buf);
}

inline double synth_word_freq(const SynthSpec& spec, int word_index) {
  const double lo = signalio::hz_to_mel(300.0);
  const double hi = signalio::hz_to_mel(7400.0);
  const double mel =
      lo + (hi - lo) * word_index / std::max(1, spec.vocab_words - 1);
  return signalio::mel_to_hz(mel);
}

inline SynthPaths generate_synth_corpus(const SynthSpec& spec,
                                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wavs");

  SynthPaths paths;
  paths.wav_dir = (fs::path(out_dir) / "wavs").string();
  paths.trans = (fs::path(out_dir) / "trans.txt").string();
  paths.tagged = (fs::path(out_dir) / "tagged.txt").string();
  paths.ctm = (fs::path(out_dir) / "align.ctm").string();
  paths.visual = (fs::path(out_dir) / "visual.feat").string();
  paths.visual_ids = (fs::path(out_dir) / "visual.ids").string();
  paths.train_list = (fs::path(out_dir) / "train.list").string();
  paths.test_list = (fs::path(out_dir) / "test.list").string();

  const int words_per_utt = spec.fillers_per_utt + 1;
  const double slot = spec.word_duration + spec.word_gap;
  const long word_samps = std::lround(spec.word_duration * spec.rate);
  const long ramp = std::lround(0.010 * spec.rate);

  std::ostringstream trans, tagged, ctm, train_list, test_list, id_list;
  signalio::FeatureMatrix visual;
  visual.frames = Eigen::MatrixXd::Zero(spec.n_utts, spec.vocab_words);
  visual.frame_shift = 0.0;
  visual.frame_length = 0.0;

  for (int u = 0; u < spec.n_utts; ++u) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof(id_buf), "utt_%04d", u);
    const std::string utt_id(id_buf);

    Rng rng(derive_seed(spec.seed, "synth-utt", u));
    const int target_word = u % spec.n_targets;  // balanced targets
    const int target_pos = static_cast<int>(rng.uniform_int(words_per_utt));
    std::vector<int> word_ids(words_per_utt);
    for (int k = 0; k < words_per_utt; ++k) {
      word_ids[k] =
          k == target_pos
              ? target_word
              : spec.n_targets +
                    static_cast<int>(rng.uniform_int(
                        spec.vocab_words - spec.n_targets));
    }

    signalio::Waveform w;
    w.rate = spec.rate;
    w.samples.assign(std::lround(words_per_utt * slot * spec.rate), 0.0);
    trans << utt_id << '\t';
    tagged << utt_id << '\t';
    for (int k = 0; k < words_per_utt; ++k) {
      const std::string word = synth_word(word_ids[k]);
      const double start = k * slot;
      const double freq = synth_word_freq(spec, word_ids[k]);
      const long off = std::lround(start * spec.rate);
      for (long i = 0; i < word_samps; ++i) {
        double envelope = 1.0;
        if (i < ramp) envelope = 0.5 - 0.5 * std::cos(M_PI * i / ramp);
        if (i >= word_samps - ramp) {
          envelope = 0.5 - 0.5 * std::cos(M_PI * (word_samps - 1 - i) / ramp);
        }
        w.samples[off + i] =
            spec.amplitude * envelope *
            std::sin(2.0 * M_PI * freq * i / spec.rate);
      }
      if (k) {
        trans << ' ';
        tagged << ' ';
      }
      trans << word;
      tagged << word << '/' << (k == target_pos ? "NN" : "DT");
      char line[96];
      std::snprintf(line, sizeof(line), "%s 1 %.3f %.3f %s\n", utt_id.c_str(),
                    start, spec.word_duration, word.c_str());
      ctm << line;
    }
    trans << '\n';
    tagged << '\n';

    signalio::write_wav(
        w, (fs::path(paths.wav_dir) / (utt_id + ".wav")).string());
    visual.frames(u, target_word) = 1.0;
    id_list << utt_id << '\n';
    (u < spec.train_count ? train_list : test_list) << utt_id << '\n';
  }

  write_text_file(paths.trans, trans.str());
  write_text_file(paths.tagged, tagged.str());
  write_text_file(paths.ctm, ctm.str());
  write_text_file(paths.visual_ids, id_list.str());
  write_text_file(paths.train_list, train_list.str());
  write_text_file(paths.test_list, test_list.str());
  signalio::write_features(visual, paths.visual);
  return paths;
}

}  // namespace bench
}  // namespace maskbench

#endif  // MASKBENCH_BENCH_SYNTHCORPUS_HPP_
