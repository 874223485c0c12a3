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

#include "semicorpus/transforms.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "semicorpus/error.h"

namespace semicorpus {

const char *ScopeName(Scope scope) {
  switch (scope) {
    case Scope::kCaller: return "caller";
    case Scope::kAgent: return "agent";
    case Scope::kBoth: return "both";
  }
  return "both";
}

std::optional<Scope> ParseScope(std::string_view name) {
  if (name == "caller") return Scope::kCaller;
  if (name == "agent") return Scope::kAgent;
  if (name == "both") return Scope::kBoth;
  return std::nullopt;
}

const char *ProvenanceName(Provenance provenance) {
  return provenance == Provenance::kManual ? "manual" : "curated";
}

std::optional<Provenance> ParseProvenance(std::string_view name) {
  if (name == "manual") return Provenance::kManual;
  if (name == "curated") return Provenance::kCurated;
  return std::nullopt;
}

bool InScope(Scope scope, Channel channel) {
  switch (scope) {
    case Scope::kBoth: return true;
    case Scope::kCaller: return channel == Channel::kCaller;
    case Scope::kAgent: return channel == Channel::kAgent;
  }
  return false;
}

void TransformRule::Validate() const {
  if (pattern.empty()) {
    throw Error(ErrorCode::kValidation, "rule pattern is empty");
  }
  if (pattern == replacement) {
    throw Error(ErrorCode::kValidation,
                "rule pattern equals replacement: '" + Join(pattern) + "'");
  }
}

RuleMatcher::RuleMatcher(std::span<const TransformRule> rules)
    : rules_(rules.begin(), rules.end()) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    rules_[i].Validate();
    by_first_[rules_[i].pattern.front()].push_back(i);
  }
  for (auto &[first, idx] : by_first_) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return rules_[a].pattern.size() > rules_[b].pattern.size();
    });
  }
}

ApplyResult RuleMatcher::Apply(const Tokens &tokens, Channel channel) const {
  ApplyResult out;
  out.tokens.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    const TransformRule *hit = nullptr;
    std::size_t hit_index = 0;
    auto it = by_first_.find(tokens[i]);
    if (it != by_first_.end()) {
      for (std::size_t r : it->second) {
        const TransformRule &rule = rules_[r];
        if (!InScope(rule.scope, channel)) continue;
        const auto &p = rule.pattern;
        if (p.size() > tokens.size() - i) continue;
        if (std::equal(p.begin(), p.end(), tokens.begin() + i)) {
          hit = &rule;
          hit_index = r;
          break;
        }
      }
    }
    if (hit == nullptr) {
      out.tokens.push_back(tokens[i]);
      ++i;
      continue;
    }
    out.tokens.insert(out.tokens.end(), hit->replacement.begin(),
                      hit->replacement.end());
    out.hits.push_back(hit_index);
    i += hit->pattern.size();
  }
  return out;
}

ApplyResult ApplyRulesPure(const Tokens &tokens,
                           std::span<const TransformRule> rules,
                           Channel channel) {
  return RuleMatcher(rules).Apply(tokens, channel);
}

Tokens ApplyRules(const Tokens &tokens, std::vector<TransformRule> &rules,
                  Channel channel) {
  ApplyResult r = ApplyRulesPure(tokens, rules, channel);
  for (std::size_t idx : r.hits) ++rules[idx].hit_count;
  return std::move(r.tokens);
}

const char *CandidateKindName(CandidateKind kind) {
  return kind == CandidateKind::kFullUtterance ? "full_utterance"
                                               : "substructure";
}

namespace {

struct MineKey {
  Tokens tokens;
  CandidateKind kind;
  bool operator==(const MineKey &) const = default;
};

struct MineKeyHash {
  std::size_t operator()(const MineKey &k) const {
    std::size_t h = std::hash<int>()(static_cast<int>(k.kind));
    for (const auto &t : k.tokens) {
      h ^= std::hash<std::string>()(t) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct MineAcc {
  std::size_t count = 0;
  // (corpus position, utterance id), smallest positions kept.
  std::vector<std::pair<std::size_t, std::string>> samples;
};

using MineTable = std::unordered_map<MineKey, MineAcc, MineKeyHash>;

void AddSample(MineAcc &acc, std::size_t pos, const std::string &id,
               std::size_t cap) {
  if (cap == 0) return;
  auto &s = acc.samples;
  if (s.size() == cap && s.back().first < pos) return;
  if (!s.empty() && s.back().first == pos) return;  // same utterance again
  auto at = std::lower_bound(
      s.begin(), s.end(), pos,
      [](const auto &e, std::size_t p) { return e.first < p; });
  if (at != s.end() && at->first == pos) return;
  s.insert(at, {pos, id});
  if (s.size() > cap) s.pop_back();
}

void CountShard(std::span<const UtteranceRecord> corpus, std::size_t begin,
                std::size_t end, const MineOptions &o, MineTable &table) {
  for (std::size_t pos = begin; pos < end; ++pos) {
    const auto &r = corpus[pos];
    if (!InScope(o.channel, r.channel) || r.transcript.empty()) continue;
    const Tokens &t = r.transcript;
    auto bump = [&](MineKey key) {
      MineAcc &acc = table[std::move(key)];
      ++acc.count;
      AddSample(acc, pos, r.utterance_id, o.max_samples);
    };
    bump({t, CandidateKind::kFullUtterance});
    for (int n = o.n_min; n <= o.n_max; ++n) {
      auto un = static_cast<std::size_t>(n);
      if (un > t.size()) break;
      for (std::size_t i = 0; i + un <= t.size(); ++i) {
        bump({Tokens(t.begin() + i, t.begin() + i + un),
              CandidateKind::kSubstructure});
      }
    }
  }
}

}  // namespace

std::vector<Candidate> MineCandidates(std::span<const UtteranceRecord> corpus,
                                      const MineOptions &o) {
  if (o.min_count < 1) throw Error(ErrorCode::kValidation, "min_count must be >= 1");
  if (o.n_min < 1 || o.n_min > o.n_max) {
    throw Error(ErrorCode::kValidation, "n-gram range must satisfy 1 <= min <= max");
  }
  std::size_t shards = static_cast<std::size_t>(std::max(1, o.threads));
  shards = std::max<std::size_t>(1, std::min(shards, corpus.size()));
  std::vector<MineTable> tables(shards);
  std::size_t per = (corpus.size() + shards - 1) / std::max<std::size_t>(shards, 1);
  if (shards == 1) {
    CountShard(corpus, 0, corpus.size(), o, tables[0]);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < shards; ++s) {
      std::size_t b = std::min(corpus.size(), s * per);
      std::size_t e = std::min(corpus.size(), b + per);
      workers.emplace_back(CountShard, corpus, b, e, std::cref(o), std::ref(tables[s]));
    }
    for (auto &w : workers) w.join();
  }
  MineTable &merged = tables[0];
  for (std::size_t s = 1; s < shards; ++s) {
    for (auto &[key, acc] : tables[s]) {
      MineAcc &into = merged[key];
      into.count += acc.count;
      for (auto &[pos, id] : acc.samples) AddSample(into, pos, id, o.max_samples);
    }
  }

  std::vector<Candidate> out;
  for (auto &[key, acc] : merged) {
    if (acc.count < o.min_count) continue;
    Candidate c;
    c.tokens = key.tokens;
    c.kind = key.kind;
    c.frequency = acc.count;
    for (auto &[pos, id] : acc.samples) c.sample_utterance_ids.push_back(id);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.tokens != b.tokens) return a.tokens < b.tokens;
    return a.kind < b.kind;
  });
  return out;
}

std::vector<Tokens> ExportTargets(std::span<const TransformRule> rules) {
  std::set<Tokens> unique;
  for (const auto &r : rules) {
    if (!r.replacement.empty()) unique.insert(r.replacement);
  }
  return {unique.begin(), unique.end()};
}

double GrowthPercent(std::size_t targets, std::size_t base_lines) {
  if (base_lines == 0) {
    throw Error(ErrorCode::kValidation, "growth relative to an empty corpus");
  }
  return 100.0 * static_cast<double>(targets) / static_cast<double>(base_lines);
}

std::string FormatRule(const TransformRule &r) {
  return std::string(ScopeName(r.scope)) + "\t" + Join(r.pattern) + "\t" +
         Join(r.replacement) + "\t" + ProvenanceName(r.provenance) + "\t" +
         r.created_at;
}

std::vector<TransformRule> ParseRules(std::string_view text) {
  std::vector<TransformRule> out;
  std::set<std::pair<Scope, Tokens>> seen;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto f = SplitFields(line, '\t');
    if (f.size() != 5) {
      throw ParseError(line_no, "rule record needs 5 tab-separated fields, got " +
                                    std::to_string(f.size()));
    }
    TransformRule r;
    auto scope = ParseScope(f[0]);
    if (!scope) throw ParseError(line_no, "unknown scope '" + std::string(f[0]) + "'");
    r.scope = *scope;
    r.pattern = Tokenize(f[1]);
    r.replacement = Tokenize(f[2]);
    auto prov = ParseProvenance(f[3]);
    if (!prov) {
      throw ParseError(line_no, "unknown provenance '" + std::string(f[3]) + "'");
    }
    r.provenance = *prov;
    r.created_at = std::string(f[4]);
    try {
      r.Validate();
    } catch (const Error &e) {
      throw ParseError(line_no, e.what());
    }
    if (!seen.insert({r.scope, r.pattern}).second) continue;
    out.push_back(std::move(r));
  }
  return out;
}

RuleStore::RuleStore(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) rules_ = ParseRules(ReadTextFile(path_));
}

bool RuleStore::Contains(Scope scope, const Tokens &pattern) const {
  return std::any_of(rules_.begin(), rules_.end(), [&](const TransformRule &r) {
    return r.scope == scope && r.pattern == pattern;
  });
}

const TransformRule &RuleStore::Append(TransformRule rule) {
  rule.Validate();
  if (Contains(rule.scope, rule.pattern)) {
    throw Error(ErrorCode::kConflict, "a " + std::string(ScopeName(rule.scope)) +
                                          " rule for '" + Join(rule.pattern) +
                                          "' already exists");
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path_.string());
  out << FormatRule(rule) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path_.string());
  rules_.push_back(std::move(rule));
  return rules_.back();
}

}  // namespace semicorpus
