// Copyright 2026 The semicorpus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semicorpus/selection.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "semicorpus/error.h"

namespace semicorpus {

namespace {

constexpr RejectReason kAllReasons[] = {
    RejectReason::kTooShort, RejectReason::kRepetition,
    RejectReason::kHighPerplexity, RejectReason::kMbrAboveThreshold,
    RejectReason::kPplOutsideBand};

}  // namespace

const char *ReasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTooShort: return "too_short";
    case RejectReason::kRepetition: return "repetition";
    case RejectReason::kHighPerplexity: return "high_perplexity";
    case RejectReason::kMbrAboveThreshold: return "mbr_above_threshold";
    case RejectReason::kPplOutsideBand: return "ppl_outside_band";
  }
  return "unknown";
}

std::optional<RejectReason> ParseReason(std::string_view name) {
  for (RejectReason r : kAllReasons) {
    if (name == ReasonName(r)) return r;
  }
  return std::nullopt;
}

std::vector<RejectReason> ReasonSet::items() const {
  std::vector<RejectReason> out;
  for (RejectReason r : kAllReasons) {
    if (Contains(r)) out.push_back(r);
  }
  return out;
}

std::vector<std::string> ReasonSet::names() const {
  std::vector<std::string> out;
  for (RejectReason r : items()) out.emplace_back(ReasonName(r));
  return out;
}

void Thresholds::Validate() const {
  auto fail = [](const std::string &m) {
    throw Error(ErrorCode::kValidation, "thresholds: " + m);
  };
  if (std::isnan(mbr_max) || mbr_max < 0.0) fail("mbr_max must be >= 0");
  if (!(am_ppl_max > 0.0)) fail("am_ppl_max must be positive");
  if (!(lm_ppl_min > 0.0) || !(lm_ppl_max > 0.0)) {
    fail("lm perplexity band must be positive");
  }
  if (lm_ppl_min > lm_ppl_max) fail("lm_ppl_min exceeds lm_ppl_max");
  if (min_tokens < 0) fail("min_tokens must be >= 0");
  if (!(repetition_max > 0.0 && repetition_max <= 1.0)) {
    fail("repetition_max must be in (0, 1]");
  }
  if (!(degenerate_ppl_max > 0.0)) fail("degenerate_ppl_max must be positive");
}

ScoredUtterance ScoreUtterance(const UtteranceRecord &record,
                               const Lattice &lat, const NGramModel &model,
                               int n, double acoustic_scale) {
  if (lat.utterance_id() != record.utterance_id) {
    throw Error(ErrorCode::kMismatch, "lattice '" + lat.utterance_id() +
                                          "' does not match utterance '" +
                                          record.utterance_id + "'");
  }
  ScoredUtterance s;
  s.record = record;
  MbrResult mbr = MbrDecode(lat, n, acoustic_scale);
  s.mbr_risk = mbr.risk;
  s.mbr_hypothesis = std::move(mbr.hypothesis);
  s.lattice_confidence = LatticeConfidence(lat, acoustic_scale);
  PerplexityScore p = Perplexity(model, record.transcript, record.utterance_id);
  s.ppl = p.ppl;
  s.token_count = record.transcript.size();
  s.oov_count = p.oov_count;
  return s;
}

double RepetitionRatio(const Tokens &tokens) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kValidation, "repetition ratio of empty utterance");
  }
  std::unordered_map<std::string_view, std::size_t> counts;
  std::size_t top = 0;
  for (const auto &t : tokens) top = std::max(top, ++counts[t]);
  return static_cast<double>(top) / static_cast<double>(tokens.size());
}

namespace {

bool TooShort(const ScoredUtterance &s, const Thresholds &t) {
  return s.token_count < static_cast<std::size_t>(std::max(t.min_tokens, 0));
}

}  // namespace

FilterVerdict IsDegenerate(const ScoredUtterance &s, const Thresholds &t) {
  FilterVerdict v;
  if (TooShort(s, t)) v.reasons.Add(RejectReason::kTooShort);
  if (!s.record.transcript.empty() &&
      RepetitionRatio(s.record.transcript) > t.repetition_max) {
    v.reasons.Add(RejectReason::kRepetition);
  }
  if (s.ppl > t.degenerate_ppl_max) v.reasons.Add(RejectReason::kHighPerplexity);
  return v;
}

FilterVerdict FilterAm(const ScoredUtterance &s, const Thresholds &t) {
  FilterVerdict v;
  if (s.mbr_risk > t.mbr_max) v.reasons.Add(RejectReason::kMbrAboveThreshold);
  if (s.ppl > t.am_ppl_max) v.reasons.Add(RejectReason::kHighPerplexity);
  if (TooShort(s, t)) v.reasons.Add(RejectReason::kTooShort);
  return v;
}

FilterVerdict FilterLm(const ScoredUtterance &s, const Thresholds &t) {
  FilterVerdict v;
  if (s.ppl < t.lm_ppl_min || s.ppl > t.lm_ppl_max) {
    v.reasons.Add(RejectReason::kPplOutsideBand);
  }
  return v;
}

}  // namespace semicorpus
