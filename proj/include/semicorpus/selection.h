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

#ifndef SEMICORPUS_SELECTION_H_
#define SEMICORPUS_SELECTION_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semicorpus/lattice.h"
#include "semicorpus/manifest.h"
#include "semicorpus/ngram_lm.h"

namespace semicorpus {

enum class RejectReason : std::uint8_t {
  kTooShort = 0,
  kRepetition,
  kHighPerplexity,
  kMbrAboveThreshold,
  kPplOutsideBand,
};

const char *ReasonName(RejectReason reason);
std::optional<RejectReason> ParseReason(std::string_view name);

class ReasonSet {
 public:
  void Add(RejectReason r) { bits_ |= Bit(r); }
  bool Contains(RejectReason r) const { return (bits_ & Bit(r)) != 0; }
  bool empty() const { return bits_ == 0; }
  // In enum order.
  std::vector<RejectReason> items() const;
  std::vector<std::string> names() const;
  bool operator==(const ReasonSet &) const = default;

 private:
  static std::uint8_t Bit(RejectReason r) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r));
  }
  std::uint8_t bits_ = 0;
};

struct FilterVerdict {
  ReasonSet reasons;
  bool accepted() const { return reasons.empty(); }
};

struct Thresholds {
  double mbr_max = 0.1;
  double am_ppl_max = 500.0;
  double lm_ppl_min = 40.0;
  double lm_ppl_max = 80.0;
  int min_tokens = 3;
  double repetition_max = 0.5;
  double degenerate_ppl_max = 1000.0;

  // Throws kValidation.
  void Validate() const;
};

struct ScoredUtterance {
  UtteranceRecord record;
  double mbr_risk = 0.0;
  Tokens mbr_hypothesis;
  std::optional<double> lattice_confidence;
  double ppl = 1.0;
  std::size_t token_count = 0;
  std::size_t oov_count = 0;
};

// Throws kMismatch when the lattice belongs to another utterance.
ScoredUtterance ScoreUtterance(const UtteranceRecord &record,
                               const Lattice &lat, const NGramModel &model,
                               int n = kDefaultNBest,
                               double acoustic_scale = kDefaultAcousticScale);

// Share of the most frequent token. Throws kValidation on empty input.
double RepetitionRatio(const Tokens &tokens);

FilterVerdict IsDegenerate(const ScoredUtterance &s, const Thresholds &t);
FilterVerdict FilterAm(const ScoredUtterance &s, const Thresholds &t);
FilterVerdict FilterLm(const ScoredUtterance &s, const Thresholds &t);

}  // namespace semicorpus

#endif  // SEMICORPUS_SELECTION_H_
