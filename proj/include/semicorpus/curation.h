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

#ifndef SEMICORPUS_CURATION_H_
#define SEMICORPUS_CURATION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "semicorpus/manifest.h"
#include "semicorpus/transforms.h"

namespace semicorpus {

enum class ItemStatus { kPending, kAccepted, kDismissed };
const char *ItemStatusName(ItemStatus status);

struct CurationItem {
  std::string id;
  Channel channel = Channel::kCaller;
  Candidate candidate;
  ItemStatus status = ItemStatus::kPending;
  std::optional<Tokens> correction;
  std::optional<Scope> scope;
  std::string curator_note;
};

nlohmann::json ItemToJson(const CurationItem &item);

// Stable id: hex FNV-1a of channel, kind and tokens.
std::string CandidateId(Channel channel, const Candidate &candidate);

struct CandidatePage {
  std::uint64_t snapshot = 0;
  int page = 1;
  int page_size = 1;
  std::size_t total = 0;  // pending items matching the filter
  std::size_t total_pages = 0;
  std::vector<CurationItem> items;
};

struct CurationExport {
  std::string rules;  // rule store records, one per line
  std::vector<Tokens> lm_additions;
};

struct CurationStats {
  std::uint64_t snapshot = 0;
  std::size_t pending = 0;
  std::size_t accepted = 0;
  std::size_t dismissed = 0;
  std::size_t rules = 0;
  std::size_t lm_additions = 0;
  std::map<std::string, std::size_t> pending_by_channel;
};

nlohmann::json StatsToJson(const CurationStats &s);

// Candidate review state over a rule store. Readers share a lock; accept and
// dismiss are serialised, and the first writer on a candidate wins.
//
// Dismissals are journaled next to the rule store so they survive restarts.
// A dismissed candidate returns to pending only when a later snapshot sees it
// at a higher frequency than when it was dismissed.
class CurationService {
 public:
  using Clock = std::function<std::string()>;

  CurationService(std::filesystem::path rule_store,
                  std::filesystem::path dismissal_journal,
                  Clock clock = nullptr);

  // Mines caller and agent text separately and replaces the current
  // snapshot. options.channel is ignored.
  void LoadSnapshot(std::span<const UtteranceRecord> corpus, MineOptions options);

  // Pending items, ranked by frequency. page is 1-based; a page past the end
  // is empty. Throws kValidation for page < 1 or page_size < 1.
  CandidatePage List(std::optional<Channel> channel, int page, int page_size) const;
  // Throws kNotFound.
  CurationItem Get(const std::string &id) const;

  // Throws kNotFound, kValidation (empty or unchanged replacement) or
  // kConflict (item not pending, or the store already has the pattern in
  // that scope).
  TransformRule Accept(const std::string &id, const Tokens &replacement, Scope scope);
  void Dismiss(const std::string &id, const std::string &note);

  CurationExport Export() const;
  CurationStats Stats() const;

 private:
  struct History {
    ItemStatus status = ItemStatus::kPending;
    std::size_t dismissed_at = 0;
    std::string note;
    std::optional<Tokens> correction;
    std::optional<Scope> scope;
  };

  CurationItem Materialize(std::size_t index) const;
  ItemStatus StatusOf(std::size_t index) const;

  mutable std::shared_mutex mu_;
  RuleStore store_;
  std::filesystem::path journal_;
  Clock clock_;
  std::uint64_t snapshot_ = 0;
  // Current snapshot, ranked.
  std::vector<std::pair<Channel, Candidate>> ranked_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> ids_;
  std::map<std::string, History> history_;
};

std::string UtcNow();

}  // namespace semicorpus

#endif  // SEMICORPUS_CURATION_H_
