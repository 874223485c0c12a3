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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "semicorpus/error.h"
#include "semicorpus/text_metrics.h"
#include "test_util.h"

using namespace semicorpus;
using semicorpus::testing::OracleEditDistance;
using semicorpus::testing::RandomTokens;
using semicorpus::testing::T;

TEST_CASE("tokenize lowercases and keeps bracketed tags") {
  CHECK(Tokenize("  [NOISE] I  i\tI\n") == Tokens{"[noise]", "i", "i", "i"});
  CHECK(Tokenize("").empty());
}

TEST_CASE("align identical sequences") {
  auto a = Align(T("have a great day"), T("have a great day"));
  CHECK(a.substitutions == 0);
  CHECK(a.deletions == 0);
  CHECK(a.insertions == 0);
  CHECK(a.ref_length == 4);
  CHECK(a.pairs.size() == 4);
}

TEST_CASE("align grey/great is one substitution") {
  auto a = Align(T("have a great day"), T("have a grey day"));
  CHECK(a.substitutions == 1);
  CHECK(a.deletions == 0);
  CHECK(a.insertions == 0);
  CHECK(a.pairs[2] == AlignedPair{"great", "grey"});
}

TEST_CASE("align against empty hypothesis is all deletions") {
  auto a = Align(T("one two three"), {});
  CHECK(a.deletions == 3);
  CHECK(a.errors() == 3);
  for (const auto &p : a.pairs) CHECK_FALSE(p.hyp.has_value());
}

TEST_CASE("align tie-break prefers substitution over insertion/deletion") {
  // "a b" vs "b a": distance 2 either as two substitutions or as an
  // insertion plus a deletion; substitutions win.
  auto a = Align(T("a b"), T("b a"));
  CHECK(a.errors() == 2);
  CHECK(a.substitutions == 2);
  // "a" vs "b c": one substitution plus one insertion, never a deletion.
  auto b = Align(T("a"), T("b c"));
  CHECK(b.substitutions == 1);
  CHECK(b.insertions == 1);
  CHECK(b.deletions == 0);
}

TEST_CASE("alignment gap counts match operation counts on random pairs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens ref = RandomTokens(rng, 8, 3);
    Tokens hyp = RandomTokens(rng, 8, 3);
    auto a = Align(ref, hyp);
    int ref_gaps = 0, hyp_gaps = 0, subs = 0;
    std::size_t ref_tokens = 0;
    Tokens rebuilt_hyp;
    for (const auto &p : a.pairs) {
      if (!p.ref) ++ref_gaps;
      if (!p.hyp) ++hyp_gaps;
      if (p.ref) ++ref_tokens;
      if (p.hyp) rebuilt_hyp.push_back(*p.hyp);
      if (p.ref && p.hyp && *p.ref != *p.hyp) ++subs;
    }
    CHECK(ref_gaps == a.insertions);
    CHECK(hyp_gaps == a.deletions);
    CHECK(subs == a.substitutions);
    CHECK(ref_tokens == ref.size());
    CHECK(rebuilt_hyp == hyp);
    CHECK(a.errors() == OracleEditDistance(ref, hyp));
    CHECK(EditDistance(ref, hyp) == a.errors());
  }
}

TEST_CASE("edit distance is symmetric and obeys the triangle inequality") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens a = RandomTokens(rng, 7, 3);
    Tokens b = RandomTokens(rng, 7, 3);
    Tokens c = RandomTokens(rng, 7, 3);
    auto ab = Align(a, b);
    auto ba = Align(b, a);
    CHECK(ab.errors() == ba.errors());
    CHECK(ab.deletions - ab.insertions == ba.insertions - ba.deletions);
    CHECK(EditDistance(a, c) <= EditDistance(a, b) + EditDistance(b, c));
  }
}

TEST_CASE("word error rate") {
  CHECK(WordErrorRate(T("have a great day"), T("have a great day")) == 0.0);
  CHECK(WordErrorRate(T("have a great day"), T("have a grey day")) == 25.0);
  CHECK(WordErrorRate(T("have a great day"), {}) == 100.0);
  // Insertions are not clamped.
  CHECK(WordErrorRate(T("yes"), T("yes yes yes")) == 200.0);
  CHECK_THROWS_AS(WordErrorRate({}, T("x")), Error);
}

TEST_CASE("bucket stats on constant input") {
  std::vector<double> v{5, 5, 5};
  auto s = ComputeBucketStats(v);
  CHECK(s.count == 3);
  CHECK(s.mean == 5.0);
  CHECK(s.std == 0.0);
  CHECK(s.min == 5.0);
  CHECK(s.p25 == 5.0);
  CHECK(s.p95 == 5.0);
  CHECK(s.max == 5.0);
}

TEST_CASE("bucket stats nearest-rank percentiles") {
  std::vector<double> v{0, 0, 0, 0, 0, 0, 0, 6.25, 20, 100};
  auto s = ComputeBucketStats(v);
  CHECK(s.count == 10);
  CHECK(s.p50 == 0.0);
  CHECK(s.p75 == 6.25);  // rank ceil(7.5) = 8
  CHECK(s.p90 == 20.0);  // rank ceil(9.0) = 9
  CHECK(s.p95 == 100.0); // rank ceil(9.5) = 10
  CHECK(s.mean == doctest::Approx(12.625).epsilon(1e-15));
  // numpy.std (population) of the same list.
  CHECK(s.std == doctest::Approx(29.740807403296905).epsilon(1e-12));
}

TEST_CASE("bucket stats single value and empty input") {
  std::vector<double> one{7};
  auto s = ComputeBucketStats(one);
  CHECK(s.count == 1);
  CHECK(s.min == 7.0);
  CHECK(s.max == 7.0);
  CHECK(s.mean == 7.0);
  CHECK_THROWS_AS(ComputeBucketStats(std::vector<double>{}), Error);
}

TEST_CASE("bucket stats percentiles are monotone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (auto &x : v) x = std::round(u(rng));
    auto s = ComputeBucketStats(v);
    CHECK(s.min <= s.p25);
    CHECK(s.p25 <= s.p50);
    CHECK(s.p50 <= s.p75);
    CHECK(s.p75 <= s.p90);
    CHECK(s.p90 <= s.p95);
    CHECK(s.p95 <= s.max);
    CHECK(s.count == v.size());
  }
}

TEST_CASE("correlation of linear relationships") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  std::vector<double> twice{2, 4, 6, 8, 10};
  std::vector<double> neg{-1, -2, -3, -4, -5};
  CHECK(Correlate(xs, twice).pearson == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Correlate(xs, twice).spearman == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Correlate(xs, neg).pearson == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(Correlate(xs, neg).spearman == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("correlation matches scipy on a tied sample") {
  // scipy.stats.pearsonr / spearmanr on the same arrays.
  std::vector<double> xs{0.0, 0.1, 0.05, 0.3, 0.0, 0.7, 0.2, 0.2, 0.9, 0.4};
  std::vector<double> ys{0.0, 10.0, 0.0, 25.0, 5.0, 60.0, 12.5, 30.0, 100.0,
                         20.0};
  auto c = Correlate(xs, ys);
  CHECK(std::abs(c.pearson - 0.9552684433702596) < 1e-12);
  CHECK(std::abs(c.spearman - 0.9082611277728743) < 1e-12);
}

TEST_CASE("correlation rejects degenerate input") {
  std::vector<double> flat{1, 1, 1};
  std::vector<double> xs{1, 2, 3};
  CHECK_THROWS_AS(Correlate(flat, xs), Error);
  CHECK_THROWS_AS(Correlate(std::vector<double>{1}, std::vector<double>{2}),
                  Error);
  CHECK_THROWS_AS(Correlate(xs, std::vector<double>{1, 2}), Error);
}

TEST_CASE("bucket table renders rows in the fixed order") {
  std::vector<double> v{0, 0, 20};
  auto table = FormatBucketTable("WER Statistics",
                                 {{"MBR=0.0", ComputeBucketStats(v)}});
  auto pos = [&](const char *s) { return table.find(s); };
  CHECK(pos("count") < pos("mean"));
  CHECK(pos("mean") < pos("std"));
  CHECK(pos("min") < pos("25%"));
  CHECK(pos("25%") < pos("50%"));
  CHECK(pos("75%") < pos("90%"));
  CHECK(pos("95%") < pos("max"));
  // "50%" appears exactly once.
  CHECK(table.find("50%", pos("50%") + 1) == std::string::npos);
  CHECK(table.find("MBR=0.0") != std::string::npos);
}
