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

#include "semicorpus/text_metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "semicorpus/error.h"

namespace semicorpus {

Alignment Align(const Tokens &ref, const Tokens &hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // cost[i][j]: distance between ref[0, i) and hyp[0, j).
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      int diag = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({diag, cost[i][j - 1] + 1, cost[i - 1][j] + 1});
    }
  }

  Alignment out;
  out.ref_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      bool same = ref[i - 1] == hyp[j - 1];
      if (cost[i][j] == cost[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++out.substitutions;
        out.pairs.push_back({ref[i - 1], hyp[j - 1]});
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[i][j] == cost[i][j - 1] + 1) {
      ++out.insertions;
      out.pairs.push_back({std::nullopt, hyp[j - 1]});
      --j;
    } else {
      ++out.deletions;
      out.pairs.push_back({ref[i - 1], std::nullopt});
      --i;
    }
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  return out;
}

int EditDistance(const Tokens &a, const Tokens &b) {
  const Tokens &outer = a.size() >= b.size() ? a : b;
  const Tokens &inner = a.size() >= b.size() ? b : a;
  std::vector<int> prev(inner.size() + 1), cur(inner.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= outer.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      int diag = prev[j - 1] + (outer[i - 1] == inner[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[inner.size()];
}

double WordErrorRate(const Tokens &ref, const Tokens &hyp) {
  if (ref.empty()) {
    throw Error(ErrorCode::kValidation, "WER needs a non-empty reference");
  }
  return 100.0 * EditDistance(ref, hyp) / static_cast<double>(ref.size());
}

double NearestRankPercentile(std::span<const double> sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

BucketStats ComputeBucketStats(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kValidation, "bucket statistics need data");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BucketStats s;
  s.count = sorted.size();
  const double n = static_cast<double>(s.count);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / n);
  s.min = sorted.front();
  s.max = sorted.back();
  s.p25 = NearestRankPercentile(sorted, 25);
  s.p50 = NearestRankPercentile(sorted, 50);
  s.p75 = NearestRankPercentile(sorted, 75);
  s.p90 = NearestRankPercentile(sorted, 90);
  s.p95 = NearestRankPercentile(sorted, 95);
  return s;
}

namespace {

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kValidation, "correlation of a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Correlation Correlate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kValidation, "correlation inputs differ in length");
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::kValidation, "correlation needs two points");
  }
  Correlation c;
  c.pearson = Pearson(xs, ys);
  auto rx = AverageRanks(xs);
  auto ry = AverageRanks(ys);
  c.spearman = Pearson(rx, ry);
  return c;
}

std::string FormatBucketTable(
    const std::string &title,
    const std::vector<std::pair<std::string, BucketStats>> &columns) {
  struct Row {
    const char *label;
    double BucketStats::*field;
  };
  static const Row kRows[] = {
      {"mean", &BucketStats::mean}, {"std", &BucketStats::std},
      {"min", &BucketStats::min},   {"25%", &BucketStats::p25},
      {"50%", &BucketStats::p50},   {"75%", &BucketStats::p75},
      {"90%", &BucketStats::p90},   {"95%", &BucketStats::p95},
      {"max", &BucketStats::max},
  };
  std::size_t first = title.size();
  std::size_t width = 8;
  for (const auto &[label, stats] : columns) width = std::max(width, label.size());

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(first)) << title;
  for (const auto &col : columns) {
    os << "  " << std::right << std::setw(static_cast<int>(width)) << col.first;
  }
  os << '\n';
  os << std::left << std::setw(static_cast<int>(first)) << "count";
  for (const auto &col : columns) {
    os << "  " << std::right << std::setw(static_cast<int>(width))
       << col.second.count;
  }
  os << '\n';
  for (const auto &row : kRows) {
    os << std::left << std::setw(static_cast<int>(first)) << row.label;
    for (const auto &col : columns) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << col.second.*row.field;
      os << "  " << std::right << std::setw(static_cast<int>(width))
         << cell.str();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace semicorpus
