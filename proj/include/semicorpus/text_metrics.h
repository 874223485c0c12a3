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

#ifndef SEMICORPUS_TEXT_METRICS_H_
#define SEMICORPUS_TEXT_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semicorpus/tokens.h"

namespace semicorpus {

// One column of an alignment. A missing ref token is an insertion, a missing
// hyp token a deletion.
struct AlignedPair {
  std::optional<Token> ref;
  std::optional<Token> hyp;

  bool operator==(const AlignedPair &) const = default;
};

struct Alignment {
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
  std::size_t ref_length = 0;
  std::vector<AlignedPair> pairs;

  int errors() const { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment. Among minimal alignments the backtrace
// prefers substitution (or match), then insertion, then deletion.
Alignment Align(const Tokens &ref, const Tokens &hyp);

// Distance only, O(min(|a|,|b|)) memory.
int EditDistance(const Tokens &a, const Tokens &b);

// 100 * (S + D + I) / |ref|. Not clamped; insertions can push it past 100.
// Throws kValidation on an empty reference.
double WordErrorRate(const Tokens &ref, const Tokens &hyp);

struct BucketStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// Nearest-rank percentiles: the value at rank ceil(p/100 * n) of the sorted
// input. Throws kValidation on empty input.
BucketStats ComputeBucketStats(std::span<const double> values);

// Nearest-rank percentile of already sorted data, p in (0, 100].
double NearestRankPercentile(std::span<const double> sorted, double p);

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
};

// Spearman uses average ranks for ties. Throws kValidation for fewer than two
// points, unequal lengths, or zero variance on either side.
Correlation Correlate(std::span<const double> xs, std::span<const double> ys);

// Plain-text table with one row per statistic (count, mean, std, min, 25%,
// 50%, 75%, 90%, 95%, max) and one column per labelled bucket.
std::string FormatBucketTable(
    const std::string &title,
    const std::vector<std::pair<std::string, BucketStats>> &columns);

}  // namespace semicorpus

#endif  // SEMICORPUS_TEXT_METRICS_H_
