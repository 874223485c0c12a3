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
#include <numeric>
#include <random>

#include "doctest.h"
#include "lattice_oracle.h"
#include "semicorpus/error.h"
#include "semicorpus/lattice.h"
#include "test_util.h"

using namespace semicorpus;
using namespace semicorpus::testing;

namespace {

// Two complete paths "a b" (cost 0) and "a c" (cost ln 4) with scale 1.
const char *kTwoPaths =
    "UTT two\n"
    "0 1 a 0 0\n"
    "1 2 b 0 0\n"
    "1 2 c 1.3862943611198906 0\n"
    "2\n"
    "\n";

const char *kThreePaths =
    "UTT three\n"
    "0 1 the 0.5 10\n"
    "0 1 a 1.0 12\n"
    "1 2 cat 0.25 8\n"
    "1 3 cap 0.75 9\n"
    "3 2 <eps> 0 0\n"
    "2\n"
    "\n";

}  // namespace

TEST_CASE("parse minimal single-arc lattice") {
  Lattice lat = ParseLattice("UTT u1\n0 1 hello 0.0 0.0\n1\n");
  CHECK(lat.utterance_id() == "u1");
  CHECK(lat.start() == 0);
  CHECK(lat.arcs().size() == 1);
  auto paths = NBestPaths(lat, 5, 1.0);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].tokens == Tokens{"hello"});
}

TEST_CASE("parse errors carry line numbers") {
  try {
    ParseLattice("UTT u\n0 1 hello 0.0\n1\n");
    FAIL("expected parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(ParseLattice("0 1 a 0 0\n1\n"), ParseError);
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a zero 0\n1\n"), ParseError);
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a 0 0\n1\n1\n"), ParseError);
  CHECK_THROWS_AS(ParseLattice(""), ParseError);
}

TEST_CASE("cycle is rejected") {
  try {
    ParseLattice("UTT u\n0 1 hello 0 0\n1 0 back 0 0\n1\n");
    FAIL("expected cycle error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
}

TEST_CASE("unreachable and dead-end states are rejected") {
  // State 5 has no incoming arcs besides being a second source.
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a 0 0\n5 1 b 0 0\n1\n"), Error);
  // State 2 cannot reach a final state.
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a 0 0\n0 2 b 0 0\n1\n"), Error);
  // No final state at all.
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a 0 0\n"), Error);
  // Negative cost.
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a -1 0\n1\n"), Error);
  CHECK_THROWS_AS(ParseLattice("UTT u\n0 1 a inf 0\n1\n"), Error);
}

TEST_CASE("start is the unique source even when its id is not smallest") {
  Lattice lat = ParseLattice("UTT u\n7 1 a 0 0\n1 2 b 0 0\n2\n");
  CHECK(lat.start() == 7);
  std::string text = SerializeLattice(lat);
  CHECK(ParseLattice(text).start() == 7);
}

TEST_CASE("serialize is canonical and a fixed point") {
  Lattice lat = ParseLattice(
      "UTT x\n1 2 b 0.50 1\n0 1 a 0.25 3.0\n1 2 <eps> 0 0\n2 0.0\n");
  std::string once = SerializeLattice(lat);
  CHECK(once ==
        "UTT x\n0 1 a 0.25 3\n1 2 <eps> 0 0\n1 2 b 0.5 1\n2\n\n");
  CHECK(SerializeLattice(ParseLattice(once)) == once);
}

TEST_CASE("round trip on random lattices") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    Lattice lat = ParseLattice(RandomLatticeText(rng, 12));
    std::string text = SerializeLattice(lat);
    Lattice again = ParseLattice(text);
    CHECK(again == lat);
    CHECK(SerializeLattice(again) == text);
  }
}

TEST_CASE("multi-block documents") {
  std::string doc = std::string(kTwoPaths) + kThreePaths;
  auto lats = ParseLattices(doc);
  REQUIRE(lats.size() == 2);
  CHECK(lats[0].utterance_id() == "two");
  CHECK(lats[1].utterance_id() == "three");
}

TEST_CASE("nbest on a single-path lattice") {
  Lattice lat = ParseLattice("UTT u\n0 1 hi 1 2\n1 2 there 1 2\n2\n");
  auto paths = NBestPaths(lat, 5, 0.1);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].tokens == T("hi there"));
  CHECK(paths[0].combined_cost == doctest::Approx(2.4));
}

TEST_CASE("nbest matches exhaustive enumeration") {
  Lattice lat = ParseLattice(kThreePaths);
  auto paths = NBestPaths(lat, 3, 0.1);
  auto all = EnumerateAllPaths(lat, 0.1);
  std::sort(all.begin(), all.end(),
            [](const auto &a, const auto &b) { return a.cost < b.cost; });
  REQUIRE(all.size() == 4);
  REQUIRE(paths.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(paths[i].tokens == all[i].tokens);
    CHECK(paths[i].combined_cost == doctest::Approx(all[i].cost).epsilon(1e-12));
  }
}

TEST_CASE("nbest ties break lexicographically") {
  Lattice lat = ParseLattice(
      "UTT t\n0 1 a 1 0\n1 2 c 0.5 0\n1 2 b 0.5 0\n2\n");
  auto paths = NBestPaths(lat, 2, 1.0);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].tokens == T("a b"));
  CHECK(paths[1].tokens == T("a c"));
}

TEST_CASE("nbest agrees with enumeration on random lattices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Lattice lat = ParseLattice(RandomLatticeText(rng, 12));
    auto all = EnumerateAllPaths(lat, 0.1);
    std::vector<double> costs;
    for (const auto &p : all) costs.push_back(p.cost);
    std::sort(costs.begin(), costs.end());
    for (int n : {1, 3, 12}) {
      auto paths = NBestPaths(lat, n, 0.1);
      REQUIRE(paths.size() == std::min<std::size_t>(n, all.size()));
      for (std::size_t i = 0; i < paths.size(); ++i) {
        CHECK(paths[i].combined_cost == doctest::Approx(costs[i]).epsilon(1e-12));
        if (i > 0) CHECK(paths[i - 1].combined_cost <= paths[i].combined_cost + 1e-9);
      }
    }
  }
}

TEST_CASE("path posteriors") {
  std::vector<WeightedPath> one{{T("x"), 3.0, std::nullopt}};
  CHECK(PathPosteriors(one)[0].posterior.value() == doctest::Approx(1.0));

  std::vector<WeightedPath> two{{T("a b"), 0.0, std::nullopt},
                                {T("a c"), std::log(4.0), std::nullopt}};
  auto p = PathPosteriors(two);
  CHECK(*p[0].posterior == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(*p[1].posterior == doctest::Approx(0.2).epsilon(1e-12));

  std::vector<WeightedPath> eq(5, WeightedPath{T("z"), 2.5, std::nullopt});
  for (const auto &w : PathPosteriors(eq)) {
    CHECK(*w.posterior == doctest::Approx(0.2).epsilon(1e-12));
  }
  CHECK_THROWS_AS(PathPosteriors({}), Error);
}

TEST_CASE("posteriors stay normalised for large costs") {
  std::vector<WeightedPath> far{{T("a"), 5000.0, std::nullopt},
                                {T("b"), 5001.0, std::nullopt}};
  auto p = PathPosteriors(far);
  CHECK(*p[0].posterior + *p[1].posterior == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*p[0].posterior == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("posteriors sum to one on random lattices") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Lattice lat = ParseLattice(RandomLatticeText(rng, 12));
    for (int n : {1, 2, 5, 100}) {
      auto p = PathPosteriors(NBestPaths(lat, n, 0.1));
      double sum = 0.0;
      for (const auto &w : p) sum += *w.posterior;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("lattice confidence") {
  CHECK_FALSE(LatticeConfidence(ParseLattice("UTT u\n0 1 a 0 0\n1\n"), 1.0));
  auto gap = LatticeConfidence(ParseLattice(kTwoPaths), 1.0);
  REQUIRE(gap.has_value());
  CHECK(*gap == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(*gap == doctest::Approx(1.3863).epsilon(1e-4));
  // Same tokens through an epsilon detour: one distinct sequence only.
  CHECK_FALSE(LatticeConfidence(
      ParseLattice("UTT u\n0 1 a 0 0\n0 2 a 1 0\n2 1 <eps> 0 0\n1\n"), 1.0));
}

TEST_CASE("confidence scales with costs and best path is unchanged") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Lattice lat = ParseLattice(RandomLatticeText(rng, 12));
    const double c = 1.0 + trial % 5;
    std::vector<LatticeArc> arcs = lat.arcs();
    for (auto &a : arcs) {
      a.graph_cost *= c;
      a.acoustic_cost *= c;
    }
    std::map<StateId, double> finals = lat.final_costs();
    for (auto &[s, f] : finals) f *= c;
    Lattice scaled(lat.utterance_id(), arcs, finals);
    auto g1 = LatticeConfidence(lat, 0.1);
    auto g2 = LatticeConfidence(scaled, 0.1);
    REQUIRE(g1.has_value() == g2.has_value());
    if (g1) CHECK(*g2 == doctest::Approx(c * *g1).epsilon(1e-9));
    CHECK(NBestPaths(lat, 1, 0.1)[0].tokens ==
          NBestPaths(scaled, 1, 0.1)[0].tokens);
  }
}

TEST_CASE("mbr risk") {
  auto paths = PathPosteriors({{T("a b"), 0.0, std::nullopt},
                               {T("a c"), std::log(4.0), std::nullopt}});
  CHECK(MbrRisk(T("a b"), paths) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(MbrRisk(T("x y"), paths) == doctest::Approx(1.0).epsilon(1e-12));

  auto single = PathPosteriors({{T("a b"), 0.0, std::nullopt}});
  CHECK(MbrRisk(T("a b"), single) == 0.0);
  // Empty hypothesis uses divisor 1.
  CHECK(MbrRisk({}, single) == doctest::Approx(2.0));

  std::vector<WeightedPath> bad{{T("a"), 0.0, 0.5}, {T("b"), 0.0, 0.4}};
  CHECK_THROWS_AS(MbrRisk(T("a"), bad), Error);
  std::vector<WeightedPath> missing{{T("a"), 0.0, std::nullopt}};
  CHECK_THROWS_AS(MbrRisk(T("a"), missing), Error);
}

TEST_CASE("mbr decode examples") {
  auto single = MbrDecode(ParseLattice("UTT u\n0 1 a 0 0\n1 2 b 0 0\n2\n"), 10, 0.1);
  CHECK(single.hypothesis == T("a b"));
  CHECK(single.risk == 0.0);

  auto two = MbrDecode(ParseLattice(kTwoPaths), 10, 1.0);
  CHECK(two.hypothesis == T("a b"));
  CHECK(two.risk == doctest::Approx(0.1).epsilon(1e-12));

  Lattice three = ParseLattice(kThreePaths);
  auto res = MbrDecode(three, 3, 0.1);
  auto oracle = BruteForceMbr(three, 0.1);
  // n=3 restricts to three of the four paths; with n >= 4 it must be exact.
  auto exact = MbrDecode(three, 4, 0.1);
  CHECK(exact.hypothesis == oracle.hypothesis);
  CHECK(std::abs(exact.risk - oracle.risk) <= 1e-12);
  CHECK(res.risk >= 0.0);
}

TEST_CASE("mbr decode equals brute force on random lattices") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    Lattice lat = ParseLattice(RandomLatticeText(rng, 12));
    auto got = MbrDecode(lat, 12, 0.1);
    auto want = BruteForceMbr(lat, 0.1);
    CHECK(got.hypothesis == want.hypothesis);
    CHECK(std::abs(got.risk - want.risk) <= 1e-12);

    // Never worse than the Viterbi path under the same posteriors.
    for (int n : {2, 5}) {
      auto paths = PathPosteriors(NBestPaths(lat, n, 0.1));
      auto res = MbrDecode(lat, n, 0.1);
      CHECK(res.risk <= MbrRisk(paths[0].tokens, paths) + 1e-12);
    }
  }
}

TEST_CASE("invalid arguments") {
  Lattice lat = ParseLattice(kTwoPaths);
  CHECK_THROWS_AS(NBestPaths(lat, 0, 0.1), Error);
  CHECK_THROWS_AS(NBestPaths(lat, 1, 0.0), Error);
}
