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

#include "semicorpus/lattice.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include "semicorpus/error.h"
#include "semicorpus/text_metrics.h"

namespace semicorpus {

namespace {

[[noreturn]] void Invalid(const std::string &id, const std::string &what) {
  throw Error(ErrorCode::kValidation, "lattice " + id + ": " + what);
}

bool ValidCost(double c) { return std::isfinite(c) && c >= 0.0; }

std::string_view WordText(const LatticeArc &arc) {
  return arc.word ? std::string_view(*arc.word) : kEpsilon;
}

bool ArcLess(const LatticeArc &a, const LatticeArc &b) {
  return std::make_tuple(a.from, a.to, WordText(a), a.graph_cost,
                         a.acoustic_cost) <
         std::make_tuple(b.from, b.to, WordText(b), b.graph_cost,
                         b.acoustic_cost);
}

bool CostsTie(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

}  // namespace

Lattice::Lattice(std::string utterance_id, std::vector<LatticeArc> arcs,
                 std::map<StateId, double> final_costs)
    : utterance_id_(std::move(utterance_id)),
      arcs_(std::move(arcs)),
      finals_(std::move(final_costs)) {
  const std::string &id = utterance_id_;
  if (finals_.empty()) Invalid(id, "no final state");
  std::sort(arcs_.begin(), arcs_.end(), ArcLess);

  std::set<StateId> all;
  for (const auto &arc : arcs_) {
    if (arc.from < 0 || arc.to < 0) Invalid(id, "negative state id");
    if (!ValidCost(arc.graph_cost) || !ValidCost(arc.acoustic_cost)) {
      Invalid(id, "arc costs must be finite and non-negative");
    }
    if (arc.word && (arc.word->empty() || *arc.word == kEpsilon)) {
      Invalid(id, "epsilon must be represented as an empty word");
    }
    all.insert(arc.from);
    all.insert(arc.to);
  }
  for (const auto &[state, cost] : finals_) {
    if (state < 0) Invalid(id, "negative state id");
    if (!ValidCost(cost)) Invalid(id, "final costs must be finite and non-negative");
    all.insert(state);
  }
  states_.assign(all.begin(), all.end());

  const std::size_t n = states_.size();
  std::vector<std::size_t> indegree(n, 0);
  out_offsets_.assign(n + 1, 0);
  for (const auto &arc : arcs_) {
    ++out_offsets_[index_of(arc.from) + 1];
    ++indegree[index_of(arc.to)];
  }
  for (std::size_t i = 0; i < n; ++i) out_offsets_[i + 1] += out_offsets_[i];
  out_arcs_.resize(arcs_.size());
  {
    std::vector<std::size_t> fill(out_offsets_.begin(), out_offsets_.end() - 1);
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
      out_arcs_[fill[index_of(arcs_[a].from)]++] = a;
    }
  }

  // Kahn's algorithm; leftover states sit on a cycle.
  std::vector<std::size_t> sources;
  {
    std::vector<std::size_t> remaining = indegree;
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] == 0) ready.push_back(i);
    }
    sources = ready;
    std::reverse(ready.begin(), ready.end());
    while (!ready.empty()) {
      std::size_t s = ready.back();
      ready.pop_back();
      topo_.push_back(s);
      for (std::size_t a : out_arcs(s)) {
        std::size_t t = index_of(arcs_[a].to);
        if (--remaining[t] == 0) ready.push_back(t);
      }
    }
  }
  if (topo_.size() != n) Invalid(id, "cycle detected");
  if (sources.size() != 1) {
    Invalid(id, "unreachable state " + std::to_string(states_[sources[1]]) +
                    " (more than one state without incoming arcs)");
  }
  start_ = states_[sources.front()];

  std::vector<bool> coreachable(n, false);
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    std::size_t s = *it;
    bool ok = finals_.count(states_[s]) > 0;
    for (std::size_t a : out_arcs(s)) {
      ok = ok || coreachable[index_of(arcs_[a].to)];
    }
    coreachable[s] = ok;
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!coreachable[s]) {
      if (s == sources.front()) Invalid(id, "no complete path");
      Invalid(id, "state " + std::to_string(states_[s]) +
                      " cannot reach a final state");
    }
  }
}

std::size_t Lattice::index_of(StateId state) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), state);
  return static_cast<std::size_t>(it - states_.begin());
}

std::span<const std::size_t> Lattice::out_arcs(std::size_t state_index) const {
  return std::span<const std::size_t>(out_arcs_).subspan(
      out_offsets_[state_index],
      out_offsets_[state_index + 1] - out_offsets_[state_index]);
}

namespace {

class BlockBuilder {
 public:
  BlockBuilder(std::string id, std::size_t header_line)
      : id_(std::move(id)), header_line_(header_line) {}

  void AddLine(std::size_t line_no, const std::vector<std::string_view> &f) {
    if (f.size() == 5) {
      LatticeArc arc;
      arc.from = ParseState(line_no, f[0]);
      arc.to = ParseState(line_no, f[1]);
      if (f[2] != kEpsilon) arc.word = std::string(f[2]);
      arc.graph_cost = ParseCost(line_no, f[3]);
      arc.acoustic_cost = ParseCost(line_no, f[4]);
      arcs_.push_back(std::move(arc));
    } else if (f.size() == 1 || f.size() == 2) {
      StateId s = ParseState(line_no, f[0]);
      double cost = f.size() == 2 ? ParseCost(line_no, f[1]) : 0.0;
      if (!finals_.emplace(s, cost).second) {
        throw ParseError(line_no, "duplicate final state " + std::string(f[0]));
      }
    } else {
      throw ParseError(line_no, "expected 5 fields for an arc or 1-2 for a "
                                "final state, got " +
                                    std::to_string(f.size()));
    }
  }

  Lattice Build() {
    if (finals_.empty()) {
      throw Error(ErrorCode::kValidation,
                  "line " + std::to_string(header_line_) + ": lattice " + id_ +
                      " has no final state (no complete path)");
    }
    return Lattice(id_, std::move(arcs_), std::move(finals_));
  }

 private:
  static StateId ParseState(std::size_t line_no, std::string_view field) {
    long long v = 0;
    if (!ParseInt(field, &v) || v < 0 ||
        v > std::numeric_limits<StateId>::max()) {
      throw ParseError(line_no, "bad state id '" + std::string(field) + "'");
    }
    return static_cast<StateId>(v);
  }

  static double ParseCost(std::size_t line_no, std::string_view field) {
    double v = 0;
    if (!ParseDouble(field, &v)) {
      throw ParseError(line_no, "bad cost '" + std::string(field) + "'");
    }
    return v;
  }

  std::string id_;
  std::size_t header_line_;
  std::vector<LatticeArc> arcs_;
  std::map<StateId, double> finals_;
};

}  // namespace

std::vector<Lattice> ParseLattices(std::string_view text) {
  std::vector<Lattice> out;
  std::optional<BlockBuilder> block;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) {
      if (block) {
        out.push_back(block->Build());
        block.reset();
      }
      continue;
    }
    if (!block) {
      if (fields[0] != "UTT" || fields.size() != 2) {
        throw ParseError(line_no, "expected 'UTT <utterance_id>' header");
      }
      block.emplace(std::string(fields[1]), line_no);
      continue;
    }
    if (fields[0] == "UTT") {
      throw ParseError(line_no, "header inside a block; blocks end with a "
                                "blank line");
    }
    block->AddLine(line_no, fields);
  }
  if (block) out.push_back(block->Build());
  return out;
}

Lattice ParseLattice(std::string_view text) {
  auto all = ParseLattices(text);
  if (all.size() != 1) {
    throw ParseError(1, "expected exactly one lattice, found " +
                            std::to_string(all.size()));
  }
  return std::move(all.front());
}

std::string SerializeLattice(const Lattice &lattice) {
  std::string out = "UTT " + lattice.utterance_id() + "\n";
  for (const auto &arc : lattice.arcs()) {
    out += std::to_string(arc.from) + " " + std::to_string(arc.to) + " ";
    out += WordText(arc);
    out += " " + FormatDouble(arc.graph_cost) + " " +
           FormatDouble(arc.acoustic_cost) + "\n";
  }
  for (const auto &[state, cost] : lattice.final_costs()) {
    out += std::to_string(state);
    if (cost != 0.0) out += " " + FormatDouble(cost);
    out += "\n";
  }
  out += "\n";
  return out;
}

namespace {

// Best-first enumeration of complete paths in non-decreasing cost. The
// heuristic is the exact cost-to-go, so complete paths pop in cost order
// (up to floating-point noise) and partial paths are only expanded when
// they can still lead to the next-best completion.
class PathEnumerator {
 public:
  PathEnumerator(const Lattice &lat, double acoustic_scale)
      : lat_(lat), scale_(acoustic_scale) {
    const std::size_t n = lat.states().size();
    to_go_.assign(n, std::numeric_limits<double>::infinity());
    const auto &topo = lat.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      std::size_t s = *it;
      auto fin = lat.final_costs().find(lat.states()[s]);
      double best = fin != lat.final_costs().end()
                        ? fin->second
                        : std::numeric_limits<double>::infinity();
      for (std::size_t a : lat.out_arcs(s)) {
        const auto &arc = lat.arcs()[a];
        best = std::min(best, CombinedCost(arc, scale_) +
                                  to_go_[lat.index_of(arc.to)]);
      }
      to_go_[s] = best;
    }
    std::size_t start = lat.index_of(lat.start());
    Push(Entry{to_go_[start], 0.0, kNoNode, start, false});
  }

  // Lower bound on the cost of anything not yet returned.
  std::optional<double> PeekBound() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.top().priority;
  }

  std::optional<WeightedPath> Next() {
    while (!heap_.empty()) {
      Entry e = heap_.top();
      heap_.pop();
      if (e.complete) return Materialize(e);
      auto fin = lat_.final_costs().find(lat_.states()[e.state]);
      if (fin != lat_.final_costs().end()) {
        double cost = e.cost + fin->second;
        Push(Entry{cost, cost, e.node, e.state, true});
      }
      for (std::size_t a : lat_.out_arcs(e.state)) {
        const auto &arc = lat_.arcs()[a];
        std::size_t to = lat_.index_of(arc.to);
        double g = e.cost + CombinedCost(arc, scale_);
        nodes_.push_back(Node{e.node, a});
        Push(Entry{g + to_go_[to], g, nodes_.size() - 1, to, false});
      }
    }
    return std::nullopt;
  }

 private:
  static constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

  struct Node {
    std::size_t parent;
    std::size_t arc;
  };

  struct Entry {
    double priority;
    double cost;
    std::size_t node;
    std::size_t state;
    bool complete;
  };

  struct EntryGreater {
    bool operator()(const Entry &a, const Entry &b) const {
      if (a.priority != b.priority) return a.priority > b.priority;
      // Completed paths first so ties surface without extra expansion.
      if (a.complete != b.complete) return b.complete;
      return a.node > b.node;
    }
  };

  void Push(Entry e) { heap_.push(e); }

  WeightedPath Materialize(const Entry &e) const {
    WeightedPath path;
    path.combined_cost = e.cost;
    for (std::size_t n = e.node; n != kNoNode; n = nodes_[n].parent) {
      const auto &arc = lat_.arcs()[nodes_[n].arc];
      if (arc.word) path.tokens.push_back(*arc.word);
    }
    std::reverse(path.tokens.begin(), path.tokens.end());
    return path;
  }

  const Lattice &lat_;
  double scale_;
  std::vector<double> to_go_;
  std::vector<Node> nodes_;
  std::priority_queue<Entry, std::vector<Entry>, EntryGreater> heap_;
};

void CheckArgs(int n, double acoustic_scale) {
  if (n < 1) throw Error(ErrorCode::kValidation, "n-best size must be >= 1");
  if (!(acoustic_scale > 0.0) || !std::isfinite(acoustic_scale)) {
    throw Error(ErrorCode::kValidation, "acoustic scale must be positive");
  }
}

}  // namespace

std::vector<WeightedPath> NBestPaths(const Lattice &lattice, int n,
                                     double acoustic_scale) {
  CheckArgs(n, acoustic_scale);
  PathEnumerator paths(lattice, acoustic_scale);
  std::vector<WeightedPath> found;
  while (true) {
    if (found.size() >= static_cast<std::size_t>(n)) {
      // Keep pulling paths that tie with the current n-th so the
      // lexicographic tie-break sees all of them.
      double cutoff = found[static_cast<std::size_t>(n) - 1].combined_cost;
      auto bound = paths.PeekBound();
      if (!bound || !(*bound <= cutoff || CostsTie(*bound, cutoff))) break;
    }
    auto next = paths.Next();
    if (!next) break;
    found.push_back(std::move(*next));
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const WeightedPath &a, const WeightedPath &b) {
                     return a.combined_cost < b.combined_cost;
                   });
  std::size_t i = 0;
  while (i < found.size()) {
    std::size_t j = i + 1;
    while (j < found.size() &&
           CostsTie(found[i].combined_cost, found[j].combined_cost)) {
      ++j;
    }
    std::stable_sort(found.begin() + i, found.begin() + j,
                     [](const WeightedPath &a, const WeightedPath &b) {
                       return a.tokens < b.tokens;
                     });
    i = j;
  }
  if (found.size() > static_cast<std::size_t>(n)) found.resize(n);
  return found;
}

std::vector<WeightedPath> PathPosteriors(std::vector<WeightedPath> paths) {
  if (paths.empty()) {
    throw Error(ErrorCode::kValidation, "posteriors of an empty path list");
  }
  double best = paths.front().combined_cost;
  for (const auto &p : paths) best = std::min(best, p.combined_cost);
  double z = 0.0;
  for (const auto &p : paths) z += std::exp(best - p.combined_cost);
  const double log_z = std::log(z);
  for (auto &p : paths) {
    p.posterior = std::exp(best - p.combined_cost - log_z);
  }
  return paths;
}

std::optional<double> LatticeConfidence(const Lattice &lattice,
                                        double acoustic_scale) {
  CheckArgs(1, acoustic_scale);
  PathEnumerator paths(lattice, acoustic_scale);
  auto best = paths.Next();
  while (auto next = paths.Next()) {
    if (next->tokens != best->tokens) {
      return std::max(0.0, next->combined_cost - best->combined_cost);
    }
  }
  return std::nullopt;
}

double MbrRisk(const Tokens &hypothesis, std::span<const WeightedPath> paths) {
  double total = 0.0;
  for (const auto &p : paths) {
    if (!p.posterior) {
      throw Error(ErrorCode::kValidation, "path posterior not computed");
    }
    total += *p.posterior;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error(ErrorCode::kValidation,
                "posteriors sum to " + FormatDouble(total) + ", not 1");
  }
  double risk = 0.0;
  for (const auto &p : paths) {
    if (*p.posterior == 0.0) continue;
    risk += *p.posterior * EditDistance(hypothesis, p.tokens);
  }
  return risk / std::max<double>(1.0, static_cast<double>(hypothesis.size()));
}

MbrResult MbrDecode(const Lattice &lattice, int n, double acoustic_scale) {
  auto paths = PathPosteriors(NBestPaths(lattice, n, acoustic_scale));

  // Collapse duplicate token sequences, keeping first-seen (cheapest) order.
  std::vector<const WeightedPath *> unique;
  std::vector<double> mass;
  {
    std::map<Tokens, std::size_t> seen;
    for (const auto &p : paths) {
      auto [it, inserted] = seen.emplace(p.tokens, unique.size());
      if (inserted) {
        unique.push_back(&p);
        mass.push_back(*p.posterior);
      } else {
        mass[it->second] += *p.posterior;
      }
    }
  }

  MbrResult best;
  bool have = false;
  for (const WeightedPath *cand : unique) {
    double risk = 0.0;
    for (std::size_t j = 0; j < unique.size(); ++j) {
      if (unique[j] == cand) continue;
      risk += mass[j] * EditDistance(cand->tokens, unique[j]->tokens);
    }
    risk /= std::max<double>(1.0, static_cast<double>(cand->tokens.size()));
    if (!have || risk < best.risk - 1e-12) {
      best = {cand->tokens, risk};
      have = true;
    }
  }
  return best;
}

}  // namespace semicorpus
