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

// Synthetic utterances with lattices whose confusability is controlled by a
// per-utterance noise level. Low noise gives a sharp lattice whose best path
// is the reference; high noise lets competitors win some slots.

#ifndef SEMICORPUS_TESTS_SYNTHETIC_H_
#define SEMICORPUS_TESTS_SYNTHETIC_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "semicorpus/lattice.h"
#include "semicorpus/manifest.h"

namespace semicorpus::testing {

struct SyntheticUtterance {
  UtteranceRecord record;  // transcript = 1-best path, reference = truth
  Lattice lattice;
  double noise = 0.0;
};

inline std::vector<std::string> SyntheticVocabulary(int size) {
  std::vector<std::string> v;
  for (int i = 0; i < size; ++i) v.push_back("w" + std::to_string(i));
  return v;
}

inline SyntheticUtterance MakeSyntheticUtterance(
    std::mt19937_64 &rng, const std::string &id,
    const std::vector<std::string> &vocab) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> len_dist(3, 12);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::normal_distribution<double> jitter(0.0, 1.0);

  double noise = unit(rng);
  int len = len_dist(rng);
  Tokens reference, best;
  std::vector<LatticeArc> arcs;
  for (int j = 0; j < len; ++j) {
    const std::string &truth = vocab[word(rng)];
    reference.push_back(truth);
    double truth_cost = std::abs(jitter(rng)) * noise;
    arcs.push_back({j, j + 1, truth, 0.0, 10.0 * truth_cost});
    std::optional<std::string> best_word = truth;
    double best_cost = truth_cost;
    int alternatives = 1 + static_cast<int>(unit(rng) * 2.0);
    for (int k = 0; k < alternatives; ++k) {
      std::optional<std::string> alt;
      if (unit(rng) < 0.2) {
        alt = std::nullopt;
      } else {
        do alt = vocab[word(rng)]; while (*alt == truth);
      }
      double cost = std::max(0.0, (1.0 - noise) * 6.0 + 0.7 * jitter(rng));
      arcs.push_back({j, j + 1, alt, 0.5 * cost, 5.0 * cost});
      if (cost < best_cost) {
        best_cost = cost;
        best_word = alt;
      }
    }
    if (best_word) best.push_back(*best_word);
  }
  SyntheticUtterance u{UtteranceRecord{}, Lattice(id, arcs, {{len, 0.0}}),
                       noise};
  u.record.utterance_id = id;
  u.record.call_id = "call-" + id;
  u.record.speaker_id = "spk-" + id;
  u.record.duration_seconds = 0.4 * len;
  u.record.transcript = best;
  u.record.reference = reference;
  return u;
}

inline std::vector<SyntheticUtterance> MakeSyntheticCorpus(std::uint64_t seed,
                                                           int count) {
  std::mt19937_64 rng(seed);
  auto vocab = SyntheticVocabulary(60);
  std::vector<SyntheticUtterance> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06d", i);
    out.push_back(MakeSyntheticUtterance(rng, id, vocab));
  }
  return out;
}

}  // namespace semicorpus::testing

#endif  // SEMICORPUS_TESTS_SYNTHETIC_H_
