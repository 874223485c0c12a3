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

#ifndef SEMICORPUS_PIPELINE_H_
#define SEMICORPUS_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "semicorpus/lattice.h"
#include "semicorpus/manifest.h"
#include "semicorpus/ngram_lm.h"
#include "semicorpus/selection.h"
#include "semicorpus/text_metrics.h"
#include "semicorpus/transforms.h"

namespace semicorpus {

struct LmSource {
  std::optional<std::filesystem::path> arpa;
  // One sentence per line; used when no ARPA file is given.
  std::optional<std::filesystem::path> train_text;
  TrainOptions train;
};

// JSON document. Relative paths resolve against the config file's directory.
//
//   {
//     "manifest": "manifest.jsonl",
//     "lattice_dir": "lattices",
//     "lm": {"arpa": "lm.arpa"} | {"train_text": "lm.txt", "order": 3,
//            "vocab_cap": 125000, "discount": 0.5},
//     "rule_store": "rules.tsv",
//     "output_dir": "out",
//     "thresholds": {"mbr_max": 0.1, "am_ppl_max": 500, "lm_ppl_min": 40,
//                    "lm_ppl_max": 80, "min_tokens": 3,
//                    "repetition_max": 0.5, "degenerate_ppl_max": 1000},
//     "nbest": 100, "acoustic_scale": 0.1, "threads": 1,
//     "lm_base_text": "lm.txt",
//     "sim": {...}
//   }
//
// Everything except manifest, lattice_dir, lm and output_dir is optional.
struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path lattice_dir;
  LmSource lm;
  std::optional<std::filesystem::path> rule_store;
  std::filesystem::path output_dir;
  Thresholds thresholds;
  int nbest = kDefaultNBest;
  double acoustic_scale = kDefaultAcousticScale;
  int threads = 1;
  // LM text the exported transform targets are measured against.
  std::optional<std::filesystem::path> lm_base_text;
  nlohmann::json raw;
};

PipelineConfig ParseConfig(const nlohmann::json &doc,
                           const std::filesystem::path &base_dir);
PipelineConfig LoadConfig(const std::filesystem::path &path);
Thresholds ThresholdsFromJson(const nlohmann::json &j);
nlohmann::json ThresholdsToJson(const Thresholds &t);

struct CorpusStats {
  double hours = 0.0;
  std::size_t speakers = 0;
  std::size_t utterances = 0;
  std::size_t conversations = 0;
  std::size_t words = 0;
  bool operator==(const CorpusStats &) const = default;
};

CorpusStats ComputeCorpusStats(std::span<const UtteranceRecord> records);
nlohmann::json CorpusStatsToJson(const CorpusStats &s);
std::string FormatCorpusStats(const CorpusStats &s);

// All lattices from *.lat files under dir, keyed by utterance id. Files are
// read in name order; a repeated id is an error.
std::map<std::string, Lattice> LoadLatticeDir(const std::filesystem::path &dir);
NGramModel LoadModel(const LmSource &source);
std::vector<Tokens> ReadSentences(const std::filesystem::path &path);

struct StageVerdicts {
  FilterVerdict degenerate;
  std::optional<FilterVerdict> am;  // absent when degenerate
  std::optional<FilterVerdict> lm;  // absent unless AM-accepted
  bool am_accepted() const { return am && am->accepted(); }
  bool lm_accepted() const { return lm && lm->accepted(); }
};

// Degenerate removal, then the AM filter, then the LM band on the AM-accepted
// set, so the LM corpus is a subset of the AM corpus.
StageVerdicts Classify(const ScoredUtterance &s, const Thresholds &t);

nlohmann::json ScoresToJson(const ScoredUtterance &s);
nlohmann::json VerdictsToJson(const StageVerdicts &v);
// Record plus "scores" (and "verdict" when given).
nlohmann::json ScoredLine(const ScoredUtterance &s,
                          const std::optional<StageVerdicts> &v);
// Reads a manifest line carrying a "scores" block.
ScoredUtterance ScoredFromJson(const nlohmann::json &line, std::size_t line_no);
std::vector<ScoredUtterance> ParseScoredManifest(std::string_view text);

// Scores every record against its lattice, fanning out over threads. The
// result is in utterance-id order. Throws kMismatch when a record has no
// lattice or a lattice has no record.
std::vector<ScoredUtterance> ScoreCorpus(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, Lattice> &lattices, const NGramModel &model,
    int nbest, double acoustic_scale, int threads);

struct StageCounts {
  std::size_t ingested = 0;
  std::size_t degenerate_removed = 0;
  std::size_t am_rejected = 0;
  std::size_t am_accepted = 0;
  std::size_t lm_accepted = 0;
  // Utterances whose transcript changed, and replaced spans.
  std::size_t rules_applied = 0;
  std::size_t transform_hits = 0;
  bool operator==(const StageCounts &) const = default;
};

nlohmann::json StageCountsToJson(const StageCounts &c);

struct IterationReport {
  StageCounts counts;
  std::map<std::string, StageCounts> per_channel;
  CorpusStats input_totals;
  CorpusStats am_totals;
  CorpusStats lm_totals;
  // WER (percent) bucketed by MBR risk, over utterances with references.
  std::vector<std::pair<std::string, BucketStats>> wer_by_mbr;
  std::optional<Correlation> mbr_wer_correlation;
  std::size_t transform_targets = 0;
  std::optional<double> lm_growth_percent;
  std::map<std::string, std::size_t> rule_hits;  // pattern -> hits

  nlohmann::json ToJson() const;
};

// Buckets: risk == 0, 0 < risk <= mbr_max, risk > mbr_max. Empty buckets
// are omitted.
std::vector<std::pair<std::string, BucketStats>> WerByMbrBuckets(
    std::span<const ScoredUtterance> scored, double mbr_max);

// One loop iteration. Writes into output_dir:
//   scored_manifest.jsonl  every utterance, corrected, with scores+verdicts
//   am_manifest.jsonl      AM-accepted utterances
//   lm_text.txt            LM-accepted transcripts, one per line
//   transform_targets.txt  unique rule replacements
//   report.json
// All files are in utterance-id order and byte-stable across reruns.
IterationReport RunIteration(const PipelineConfig &config);

}  // namespace semicorpus

#endif  // SEMICORPUS_PIPELINE_H_
