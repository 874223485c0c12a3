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

#ifndef SEMICORPUS_TRANSFORMS_H_
#define SEMICORPUS_TRANSFORMS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semicorpus/manifest.h"
#include "semicorpus/tokens.h"

namespace semicorpus {

enum class Scope { kCaller, kAgent, kBoth };
enum class Provenance { kManual, kCurated };

const char *ScopeName(Scope scope);
std::optional<Scope> ParseScope(std::string_view name);
const char *ProvenanceName(Provenance provenance);
std::optional<Provenance> ParseProvenance(std::string_view name);
bool InScope(Scope scope, Channel channel);

struct TransformRule {
  Tokens pattern;
  Tokens replacement;  // may be empty: the span is deleted
  Scope scope = Scope::kBoth;
  Provenance provenance = Provenance::kManual;
  std::size_t hit_count = 0;
  std::string created_at;

  // Throws kValidation for an empty pattern or pattern == replacement.
  void Validate() const;
};

struct ApplyResult {
  Tokens tokens;
  // Rule index per replaced span, in left-to-right order.
  std::vector<std::size_t> hits;
};

// Single left-to-right pass. At each position the longest in-scope pattern
// wins, earlier rules break ties, and scanning resumes after the replaced
// span so replacements are never rescanned.
class RuleMatcher {
 public:
  explicit RuleMatcher(std::span<const TransformRule> rules);
  ApplyResult Apply(const Tokens &tokens, Channel channel) const;

 private:
  std::vector<TransformRule> rules_;
  // First pattern token -> rule indices, longest pattern first.
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

ApplyResult ApplyRulesPure(const Tokens &tokens,
                           std::span<const TransformRule> rules,
                           Channel channel);
// As above, bumping hit_count on each rule that fired.
Tokens ApplyRules(const Tokens &tokens, std::vector<TransformRule> &rules,
                  Channel channel);

enum class CandidateKind { kFullUtterance, kSubstructure };
const char *CandidateKindName(CandidateKind kind);

struct Candidate {
  Tokens tokens;
  std::size_t frequency = 0;
  CandidateKind kind = CandidateKind::kFullUtterance;
  // Earliest utterances in corpus order, at most MineOptions::max_samples.
  std::vector<std::string> sample_utterance_ids;
};

struct MineOptions {
  int n_min = 2;
  int n_max = 5;
  std::size_t min_count = 1;
  Scope channel = Scope::kBoth;
  std::size_t max_samples = 3;
  int threads = 1;
};

// Counts full utterances and every n-gram occurrence for n in
// [n_min, n_max] over in-scope utterances. Ranked by frequency descending,
// then tokens, then full utterances before substructures. The result does
// not depend on the thread count.
std::vector<Candidate> MineCandidates(std::span<const UtteranceRecord> corpus,
                                      const MineOptions &options);

// Unique non-empty replacements, sorted.
std::vector<Tokens> ExportTargets(std::span<const TransformRule> rules);
// 100 * targets / base_lines. Throws kValidation when base_lines is 0.
double GrowthPercent(std::size_t targets, std::size_t base_lines);

// Append-only rule file, one record per line:
//   scope \t pattern \t replacement \t provenance \t created_at
// Blank lines and lines starting with '#' are skipped. When a (scope,
// pattern) pair repeats, the first record wins.
std::vector<TransformRule> ParseRules(std::string_view text);
std::string FormatRule(const TransformRule &rule);

class RuleStore {
 public:
  // Creates the file on first append if it does not exist.
  explicit RuleStore(std::filesystem::path path);

  const std::vector<TransformRule> &rules() const { return rules_; }
  const std::filesystem::path &path() const { return path_; }
  bool Contains(Scope scope, const Tokens &pattern) const;
  // Validates, rejects duplicates with kConflict, then appends and flushes.
  const TransformRule &Append(TransformRule rule);

 private:
  std::filesystem::path path_;
  std::vector<TransformRule> rules_;
};

}  // namespace semicorpus

#endif  // SEMICORPUS_TRANSFORMS_H_
