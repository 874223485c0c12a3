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

#include "semicorpus/curation.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>

#include "semicorpus/error.h"

namespace semicorpus {

namespace fs = std::filesystem;

const char *ItemStatusName(ItemStatus status) {
  switch (status) {
    case ItemStatus::kPending: return "pending";
    case ItemStatus::kAccepted: return "accepted";
    case ItemStatus::kDismissed: return "dismissed";
  }
  return "pending";
}

std::string CandidateId(Channel channel, const Candidate &c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  mix(ChannelName(channel));
  mix("|");
  mix(CandidateKindName(c.kind));
  mix("|");
  mix(Join(c.tokens));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json ItemToJson(const CurationItem &item) {
  nlohmann::json j;
  j["id"] = item.id;
  j["channel"] = ChannelName(item.channel);
  j["pattern"] = Join(item.candidate.tokens);
  j["frequency"] = item.candidate.frequency;
  j["kind"] = CandidateKindName(item.candidate.kind);
  j["sample_utterance_ids"] = item.candidate.sample_utterance_ids;
  j["status"] = ItemStatusName(item.status);
  j["correction"] = item.correction ? nlohmann::json(Join(*item.correction))
                                    : nlohmann::json();
  j["scope"] = item.scope ? nlohmann::json(ScopeName(*item.scope)) : nlohmann::json();
  j["curator_note"] = item.curator_note;
  return j;
}

nlohmann::json StatsToJson(const CurationStats &s) {
  return {{"snapshot", s.snapshot},
          {"pending", s.pending},
          {"accepted", s.accepted},
          {"dismissed", s.dismissed},
          {"rules", s.rules},
          {"lm_additions", s.lm_additions},
          {"pending_by_channel", s.pending_by_channel}};
}

std::string UtcNow() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string OneLine(std::string s) {
  for (char &c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

CurationService::CurationService(fs::path rule_store, fs::path dismissal_journal,
                                 Clock clock)
    : store_(std::move(rule_store)),
      journal_(std::move(dismissal_journal)),
      clock_(clock ? std::move(clock) : Clock(UtcNow)) {
  if (!fs::exists(journal_)) return;
  std::string text = ReadTextFile(journal_);
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto f = SplitFields(line, '\t');
    long long freq = 0;
    if (f.size() != 4 || !ParseInt(f[1], &freq) || freq < 0) {
      throw ParseError(line_no, "malformed dismissal record");
    }
    History &h = history_[std::string(f[0])];
    h.status = ItemStatus::kDismissed;
    h.dismissed_at = static_cast<std::size_t>(freq);
    h.note = std::string(f[3]);
  }
}

void CurationService::LoadSnapshot(std::span<const UtteranceRecord> corpus,
                                   MineOptions options) {
  std::vector<std::pair<Channel, Candidate>> ranked;
  for (Channel ch : {Channel::kCaller, Channel::kAgent}) {
    options.channel = ch == Channel::kCaller ? Scope::kCaller : Scope::kAgent;
    for (auto &c : MineCandidates(corpus, options)) ranked.emplace_back(ch, std::move(c));
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    const Candidate &x = a.second, &y = b.second;
    if (x.frequency != y.frequency) return x.frequency > y.frequency;
    if (x.tokens != y.tokens) return x.tokens < y.tokens;
    if (x.kind != y.kind) return x.kind < y.kind;
    return a.first < b.first;
  });

  std::unique_lock lock(mu_);
  ++snapshot_;
  ranked_ = std::move(ranked);
  index_.clear();
  ids_.clear();
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    const auto &[ch, cand] = ranked_[i];
    std::string id = CandidateId(ch, cand);
    ids_.push_back(id);
    index_[id] = i;
    History &h = history_[id];
    if (h.status == ItemStatus::kDismissed && cand.frequency > h.dismissed_at) {
      h = History{};
    }
    if (h.status == ItemStatus::kPending) {
      for (const auto &rule : store_.rules()) {
        if (rule.pattern == cand.tokens && InScope(rule.scope, ch)) {
          h.status = ItemStatus::kAccepted;
          h.correction = rule.replacement;
          h.scope = rule.scope;
          break;
        }
      }
    }
  }
}

ItemStatus CurationService::StatusOf(std::size_t index) const {
  auto it = history_.find(ids_[index]);
  return it == history_.end() ? ItemStatus::kPending : it->second.status;
}

CurationItem CurationService::Materialize(std::size_t index) const {
  CurationItem item;
  item.id = ids_[index];
  item.channel = ranked_[index].first;
  item.candidate = ranked_[index].second;
  auto it = history_.find(item.id);
  if (it != history_.end()) {
    item.status = it->second.status;
    item.correction = it->second.correction;
    item.scope = it->second.scope;
    item.curator_note = it->second.note;
  }
  return item;
}

CandidatePage CurationService::List(std::optional<Channel> channel, int page,
                                    int page_size) const {
  if (page < 1) throw Error(ErrorCode::kValidation, "page must be >= 1");
  if (page_size < 1) throw Error(ErrorCode::kValidation, "page_size must be >= 1");
  std::shared_lock lock(mu_);
  CandidatePage out;
  out.snapshot = snapshot_;
  out.page = page;
  out.page_size = page_size;
  std::size_t skip = static_cast<std::size_t>(page - 1) * static_cast<std::size_t>(page_size);
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    if (channel && ranked_[i].first != *channel) continue;
    if (StatusOf(i) != ItemStatus::kPending) continue;
    if (out.total >= skip && out.items.size() < static_cast<std::size_t>(page_size)) {
      out.items.push_back(Materialize(i));
    }
    ++out.total;
  }
  out.total_pages = (out.total + static_cast<std::size_t>(page_size) - 1) /
                    static_cast<std::size_t>(page_size);
  return out;
}

CurationItem CurationService::Get(const std::string &id) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kNotFound, "unknown candidate '" + id + "'");
  return Materialize(it->second);
}

TransformRule CurationService::Accept(const std::string &id, const Tokens &replacement,
                                      Scope scope) {
  std::unique_lock lock(mu_);
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kNotFound, "unknown candidate '" + id + "'");
  const Candidate &cand = ranked_[it->second].second;
  if (replacement.empty()) {
    throw Error(ErrorCode::kValidation, "replacement must not be empty");
  }
  if (replacement == cand.tokens) {
    throw Error(ErrorCode::kValidation, "replacement equals the pattern");
  }
  ItemStatus status = StatusOf(it->second);
  if (status != ItemStatus::kPending) {
    throw Error(ErrorCode::kConflict,
                "candidate '" + id + "' is already " + ItemStatusName(status));
  }
  TransformRule rule;
  rule.pattern = cand.tokens;
  rule.replacement = replacement;
  rule.scope = scope;
  rule.provenance = Provenance::kCurated;
  rule.created_at = clock_();
  TransformRule stored = store_.Append(std::move(rule));
  History &h = history_[id];
  h.status = ItemStatus::kAccepted;
  h.correction = replacement;
  h.scope = scope;
  return stored;
}

void CurationService::Dismiss(const std::string &id, const std::string &note) {
  std::unique_lock lock(mu_);
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kNotFound, "unknown candidate '" + id + "'");
  ItemStatus status = StatusOf(it->second);
  if (status != ItemStatus::kPending) {
    throw Error(ErrorCode::kConflict,
                "candidate '" + id + "' is already " + ItemStatusName(status));
  }
  std::size_t freq = ranked_[it->second].second.frequency;
  if (journal_.has_parent_path()) fs::create_directories(journal_.parent_path());
  std::ofstream out(journal_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + journal_.string());
  out << id << '\t' << freq << '\t' << OneLine(clock_()) << '\t' << OneLine(note) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "short write to " + journal_.string());
  History &h = history_[id];
  h.status = ItemStatus::kDismissed;
  h.dismissed_at = freq;
  h.note = OneLine(note);
}

CurationExport CurationService::Export() const {
  std::shared_lock lock(mu_);
  CurationExport out;
  for (const auto &r : store_.rules()) out.rules += FormatRule(r) + "\n";
  out.lm_additions = ExportTargets(store_.rules());
  return out;
}

CurationStats CurationService::Stats() const {
  std::shared_lock lock(mu_);
  CurationStats s;
  s.snapshot = snapshot_;
  s.pending_by_channel = {{"caller", 0}, {"agent", 0}};
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    switch (StatusOf(i)) {
      case ItemStatus::kPending:
        ++s.pending;
        ++s.pending_by_channel[ChannelName(ranked_[i].first)];
        break;
      case ItemStatus::kAccepted: ++s.accepted; break;
      case ItemStatus::kDismissed: ++s.dismissed; break;
    }
  }
  s.rules = store_.rules().size();
  s.lm_additions = ExportTargets(store_.rules()).size();
  return s;
}

}  // namespace semicorpus
