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

#ifndef SEMICORPUS_LATTICE_H_
#define SEMICORPUS_LATTICE_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semicorpus/tokens.h"

namespace semicorpus {

inline constexpr int kDefaultNBest = 100;
inline constexpr double kDefaultAcousticScale = 0.1;
inline constexpr std::string_view kEpsilon = "<eps>";

using StateId = int;

struct LatticeArc {
  StateId from = 0;
  StateId to = 0;
  std::optional<Token> word;  // nullopt is epsilon
  double graph_cost = 0.0;
  double acoustic_cost = 0.0;

  bool operator==(const LatticeArc &) const = default;
};

// Acyclic word graph with costs in negative natural-log units.
//
// The start state is the unique state without incoming arcs. Construction
// validates the graph: it must be acyclic, every state must be reachable from
// the start and co-reachable to a final state, and all costs must be finite
// and non-negative. Arcs are held in canonical order (from, to, word, costs).
class Lattice {
 public:
  // Throws Error(kValidation) describing the first violated invariant.
  Lattice(std::string utterance_id, std::vector<LatticeArc> arcs,
          std::map<StateId, double> final_costs);

  const std::string &utterance_id() const { return utterance_id_; }
  StateId start() const { return start_; }
  const std::vector<LatticeArc> &arcs() const { return arcs_; }
  const std::map<StateId, double> &final_costs() const { return finals_; }
  const std::vector<StateId> &states() const { return states_; }

  // Dense index of a state in states(); states are kept sorted.
  std::size_t index_of(StateId state) const;
  // Indices into arcs() leaving the state with the given dense index.
  std::span<const std::size_t> out_arcs(std::size_t state_index) const;
  // Dense state indices in topological order.
  const std::vector<std::size_t> &topological_order() const { return topo_; }

  bool operator==(const Lattice &other) const {
    return utterance_id_ == other.utterance_id_ && arcs_ == other.arcs_ &&
           finals_ == other.finals_;
  }

 private:
  std::string utterance_id_;
  std::vector<LatticeArc> arcs_;
  std::map<StateId, double> finals_;
  std::vector<StateId> states_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> out_arcs_;
  std::vector<std::size_t> topo_;
  StateId start_ = 0;
};

// Text format, one block per lattice:
//
//   UTT <utterance_id>
//   <from> <to> <word|<eps>> <graph_cost> <acoustic_cost>
//   <final_state> [<final_cost>]
//   <blank line>
//
// Throws ParseError for syntax problems and Error(kValidation) for graphs that
// break the lattice invariants.
std::vector<Lattice> ParseLattices(std::string_view text);
// Exactly one block is expected.
Lattice ParseLattice(std::string_view text);

// Canonical text: arcs sorted, finals sorted, costs in shortest round-trip
// form, terminated by a blank line.
std::string SerializeLattice(const Lattice &lattice);

struct WeightedPath {
  Tokens tokens;  // epsilons removed
  double combined_cost = 0.0;
  std::optional<double> posterior;  // set by PathPosteriors
};

// graph_cost + acoustic_scale * acoustic_cost for one arc.
inline double CombinedCost(const LatticeArc &arc, double acoustic_scale) {
  return arc.graph_cost + acoustic_scale * arc.acoustic_cost;
}

// Up to n complete paths in ascending combined cost. Costs that agree to
// within 1e-9 (relative) count as ties and are ordered by token sequence.
std::vector<WeightedPath> NBestPaths(const Lattice &lattice, int n,
                                     double acoustic_scale);

// Softmax of negated costs over the given list, computed in log space.
// Throws Error(kValidation) for an empty list.
std::vector<WeightedPath> PathPosteriors(std::vector<WeightedPath> paths);

// Cost gap between the best path and the best path with a different token
// sequence; nullopt when the lattice has a single distinct token sequence.
std::optional<double> LatticeConfidence(const Lattice &lattice,
                                        double acoustic_scale);

// Expected edit distance of the hypothesis under the path posteriors,
// divided by max(1, |hypothesis|). Throws Error(kValidation) when posteriors
// are missing or do not sum to 1 within 1e-6.
double MbrRisk(const Tokens &hypothesis, std::span<const WeightedPath> paths);

struct MbrResult {
  Tokens hypothesis;
  double risk = 0.0;
};

// Minimum-risk hypothesis among the n-best candidates, with posteriors taken
// over the same n-best list. Risks within 1e-12 are ties and go to the
// cheaper candidate.
MbrResult MbrDecode(const Lattice &lattice, int n = kDefaultNBest,
                    double acoustic_scale = kDefaultAcousticScale);

}  // namespace semicorpus

#endif  // SEMICORPUS_LATTICE_H_
