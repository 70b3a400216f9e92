// maskbench/mask.hpp

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

#ifndef MASKBENCH_MASK_HPP_
#define MASKBENCH_MASK_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/ctm.hpp"
#include "maskbench/error.hpp"
#include "maskbench/rng.hpp"
#include "maskbench/textio.hpp"
#include "maskbench/wav.hpp"
#include "maskbench/wordset.hpp"

namespace maskbench {
namespace corruptor {

enum class MaskType { kSilence, kWhiteNoise };

inline std::string to_string(MaskType t) {
  return t == MaskType::kSilence ? "silence" : "noise";
}

inline MaskType mask_type_from_string(const std::string& s) {
  if (s == "silence") return MaskType::kSilence;
  if (s == "noise" || s == "whitenoise" || s == "white_noise") {
    return MaskType::kWhiteNoise;
  }
  throw ParseError("unknown mask type: " + s);
}

// A region of audio to splice out, in seconds, plus the reference-token
// positions whose expanded spans were merged into it.
struct MaskSegment {
  double start = 0.0;
  double end = 0.0;
  std::vector<int> covered_token_indices;  // strictly increasing
};

struct MaskPlan {
  std::string utterance_id;
  std::vector<MaskSegment> segments;  // sorted, non-overlapping
  MaskType mask_type = MaskType::kSilence;
  double mask_duration = 0.5;
  std::vector<int> masked_token_indices;  // sorted union over segments
  uint64_t rng_seed = 0;
};

struct PlanOptions {
  double expansion = 0.25;      // each timing mark moves by this fraction
  double mask_duration = 0.5;   // seconds of inserted mask audio
  MaskType mask_type = MaskType::kSilence;
  uint64_t seed = 0;
  // Upper clamp for expanded spans; defaults to unbounded (apply_masks
  // clamps to the actual waveform anyway).
  double utterance_duration = std::numeric_limits<double>::infinity();
};

// Expand each masked word's span by expansion * duration on both sides,
// clamp at 0 and at utterance_duration, then merge spans that overlap or
// touch into single segments. Timings are matched to reference tokens
// positionally after sorting by start time, so the plan is invariant under
// permutation of the timing list.
inline MaskPlan plan_masks(const std::string& utterance_id,
                           std::vector<WordTiming> timings,
                           const std::vector<std::string>& tokens,
                           const lexmask::WordSet& word_set,
                           const PlanOptions& opts = {}) {
  std::stable_sort(timings.begin(), timings.end(),
                   [](const WordTiming& a, const WordTiming& b) {
                     if (a.start != b.start) return a.start < b.start;
                     return a.end < b.end;
                   });
  if (timings.size() != tokens.size()) {
    throw ConsistencyError(
        "plan_masks: " + utterance_id + " has " +
        std::to_string(timings.size()) + " timings but " +
        std::to_string(tokens.size()) + " reference tokens");
  }
  for (size_t i = 0; i < timings.size(); ++i) {
    if (lowercase(timings[i].word) != lowercase(tokens[i])) {
      throw ConsistencyError("plan_masks: " + utterance_id + " token " +
                             std::to_string(i) + " is '" + tokens[i] +
                             "' but aligned word is '" + timings[i].word +
                             "'");
    }
  }

  struct Span {
    double start, end;
    int token_index;
  };
  std::vector<Span> spans;
  for (size_t i = 0; i < timings.size(); ++i) {
    if (!word_set.contains(tokens[i])) continue;
    const double d = timings[i].end - timings[i].start;
    Span s;
    s.start = std::max(0.0, timings[i].start - opts.expansion * d);
    s.end = std::min(opts.utterance_duration, timings[i].end + opts.expansion * d);
    s.token_index = static_cast<int>(i);
    spans.push_back(s);
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });

  MaskPlan plan;
  plan.utterance_id = utterance_id;
  plan.mask_type = opts.mask_type;
  plan.mask_duration = opts.mask_duration;
  plan.rng_seed = opts.seed;
  for (const Span& s : spans) {
    if (!plan.segments.empty() && s.start <= plan.segments.back().end) {
      MaskSegment& last = plan.segments.back();
      last.end = std::max(last.end, s.end);
      last.covered_token_indices.push_back(s.token_index);
    } else {
      MaskSegment seg;
      seg.start = s.start;
      seg.end = s.end;
      seg.covered_token_indices = {s.token_index};
      plan.segments.push_back(seg);
    }
  }
  for (auto& seg : plan.segments) {
    std::sort(seg.covered_token_indices.begin(),
              seg.covered_token_indices.end());
    plan.masked_token_indices.insert(plan.masked_token_indices.end(),
                                     seg.covered_token_indices.begin(),
                                     seg.covered_token_indices.end());
  }
  std::sort(plan.masked_token_indices.begin(),
            plan.masked_token_indices.end());
  return plan;
}

// Seconds-to-sample index, round half away from zero.
inline long sample_index(double t, int rate) {
  return std::llround(t * rate);
}

// Splice semantics: each segment's samples are removed and replaced by
// exactly round(mask_duration * rate) new samples, zeros for silence or
// i.i.d. Gaussian(0, noise_amplitude) clamped to [-1, 1] for white noise.
// The noise stream is keyed per (utterance, segment) so identical plans give
// bit-identical output regardless of processing order. Segments are spliced
// right to left so earlier indices stay valid.
inline signalio::Waveform apply_masks(const signalio::Waveform& w,
                                      const MaskPlan& plan,
                                      double noise_amplitude = 0.1) {
  signalio::Waveform out = w;
  const long n = static_cast<long>(w.samples.size());
  const long insert_len = std::llround(plan.mask_duration * w.rate);

  for (size_t k = plan.segments.size(); k-- > 0;) {
    const MaskSegment& seg = plan.segments[k];
    long s = sample_index(seg.start, w.rate);
    long e = sample_index(seg.end, w.rate);
    if (e <= 0 || s >= n || seg.end <= seg.start) {
      throw ConsistencyError("apply_masks: segment [" +
                             std::to_string(seg.start) + ", " +
                             std::to_string(seg.end) +
                             "] outside waveform of " + plan.utterance_id);
    }
    s = std::max<long>(0, s);
    e = std::min<long>(n, e);
    if (s >= e) {
      throw ConsistencyError("apply_masks: empty segment after clamping in " +
                             plan.utterance_id);
    }

    std::vector<double> fill(static_cast<size_t>(insert_len), 0.0);
    if (plan.mask_type == MaskType::kWhiteNoise) {
      Rng rng(derive_seed(plan.rng_seed, plan.utterance_id, k));
      for (double& v : fill) {
        v = std::clamp(rng.gaussian(0.0, noise_amplitude), -1.0, 1.0);
      }
    }
    out.samples.erase(out.samples.begin() + s, out.samples.begin() + e);
    out.samples.insert(out.samples.begin() + s, fill.begin(), fill.end());
  }
  return out;
}

// Keep word timings usable after splicing: unmasked words shift by the
// cumulative length delta of all splices strictly before them; masked words
// take their segment's new span.
inline std::vector<WordTiming> shift_timings(
    const std::vector<WordTiming>& timings, const MaskPlan& plan) {
  // Per-segment length change in seconds.
  std::vector<double> delta(plan.segments.size());
  for (size_t k = 0; k < plan.segments.size(); ++k) {
    delta[k] =
        plan.mask_duration - (plan.segments[k].end - plan.segments[k].start);
  }
  std::vector<double> prefix(plan.segments.size() + 1, 0.0);
  for (size_t k = 0; k < plan.segments.size(); ++k) {
    prefix[k + 1] = prefix[k] + delta[k];
  }

  std::vector<WordTiming> sorted = timings;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const WordTiming& a, const WordTiming& b) {
                     if (a.start != b.start) return a.start < b.start;
                     return a.end < b.end;
                   });

  std::vector<WordTiming> out;
  out.reserve(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    const WordTiming& wt = sorted[i];
    // Segment covering this token, if masked.
    long seg_of_token = -1;
    for (size_t k = 0; k < plan.segments.size(); ++k) {
      const auto& cov = plan.segments[k].covered_token_indices;
      if (std::binary_search(cov.begin(), cov.end(), static_cast<int>(i))) {
        seg_of_token = static_cast<long>(k);
        break;
      }
    }
    WordTiming nw = wt;
    if (seg_of_token >= 0) {
      const double new_start =
          plan.segments[seg_of_token].start + prefix[seg_of_token];
      nw.start = new_start;
      nw.end = new_start + plan.mask_duration;
    } else {
      // Splices strictly before the word.
      double shift = 0.0;
      for (size_t k = 0; k < plan.segments.size(); ++k) {
        if (plan.segments[k].end <= wt.start) shift += delta[k];
      }
      nw.start = wt.start + shift;
      nw.end = wt.end + shift;
    }
    out.push_back(nw);
  }
  return out;
}

inline nlohmann::json plan_to_json(const MaskPlan& plan) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : plan.segments) {
    segs.push_back({{"start", seg.start},
                    {"end", seg.end},
                    {"covered", seg.covered_token_indices}});
  }
  return {{"utterance_id", plan.utterance_id},
          {"mask_type", to_string(plan.mask_type)},
          {"mask_duration", plan.mask_duration},
          {"rng_seed", plan.rng_seed},
          {"masked_token_indices", plan.masked_token_indices},
          {"segments", segs}};
}

inline MaskPlan plan_from_json(const nlohmann::json& j) {
  MaskPlan plan;
  plan.utterance_id = j.at("utterance_id").get<std::string>();
  plan.mask_type = mask_type_from_string(j.at("mask_type").get<std::string>());
  plan.mask_duration = j.at("mask_duration").get<double>();
  plan.rng_seed = j.at("rng_seed").get<uint64_t>();
  plan.masked_token_indices =
      j.at("masked_token_indices").get<std::vector<int>>();
  for (const auto& js : j.at("segments")) {
    MaskSegment seg;
    seg.start = js.at("start").get<double>();
    seg.end = js.at("end").get<double>();
    seg.covered_token_indices = js.at("covered").get<std::vector<int>>();
    plan.segments.push_back(seg);
  }
  return plan;
}

// A plan file bundles every utterance's plan with the knobs that produced
// them (the noise amplitude is recorded here; the plan itself only carries
// what the scorer needs).
struct PlanFile {
  MaskType mask_type = MaskType::kSilence;
  double mask_duration = 0.5;
  double expansion = 0.25;
  double noise_std = 0.1;
  uint64_t seed = 0;
  std::vector<MaskPlan> plans;

  const MaskPlan* find(const std::string& utt) const {
    for (const auto& p : plans) {
      if (p.utterance_id == utt) return &p;
    }
    return nullptr;
  }
};

inline void write_plan_file(const PlanFile& pf, const std::string& path) {
  nlohmann::json j;
  j["mask_type"] = to_string(pf.mask_type);
  j["mask_duration"] = pf.mask_duration;
  j["expansion"] = pf.expansion;
  j["noise_std"] = pf.noise_std;
  j["seed"] = pf.seed;
  j["plans"] = nlohmann::json::array();
  for (const auto& p : pf.plans) j["plans"].push_back(plan_to_json(p));
  write_text_file(path, j.dump(2) + "\n");
}

inline PlanFile read_plan_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad plan file " + path + ": " + e.what());
  }
  PlanFile pf;
  try {
    pf.mask_type = mask_type_from_string(j.at("mask_type").get<std::string>());
    pf.mask_duration = j.at("mask_duration").get<double>();
    pf.expansion = j.at("expansion").get<double>();
    pf.noise_std = j.at("noise_std").get<double>();
    pf.seed = j.at("seed").get<uint64_t>();
    for (const auto& jp : j.at("plans")) pf.plans.push_back(plan_from_json(jp));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad plan file " + path + ": " + e.what());
  }
  return pf;
}

}  // namespace corruptor
}  // namespace maskbench

#endif  // MASKBENCH_MASK_HPP_
