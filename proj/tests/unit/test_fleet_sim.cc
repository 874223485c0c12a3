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

#include <numeric>

#include "doctest.h"
#include "semicorpus/error.h"
#include "semicorpus/fleet_sim.h"

using namespace semicorpus;

namespace {

std::vector<UtteranceRecord> Inventory(int n, double duration = 1.0) {
  std::vector<UtteranceRecord> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[i].utterance_id = "s3://bucket/utt-" + std::to_string(i);
    out[i].duration_seconds = duration;
  }
  return out;
}

SimConfig Unit(int workers) {
  SimConfig c;
  c.workers = workers;
  c.visibility_timeout = 1000;
  return c;
}

std::vector<SimEvent> Trace(FleetSimulation &sim) {
  std::vector<SimEvent> out;
  while (auto e = sim.Step()) out.push_back(*e);
  return out;
}

std::vector<EventKind> Kinds(const std::vector<SimEvent> &events) {
  std::vector<EventKind> out;
  for (const auto &e : events) out.push_back(e.kind);
  return out;
}

}  // namespace

TEST_CASE("inventory") {
  auto items = EnqueueInventory(Inventory(5), Unit(1));
  REQUIRE(items.size() == 5);
  for (const auto &i : items) {
    CHECK(i.state == ItemState::kQueued);
    CHECK(i.deliveries == 0);
    CHECK(i.processing_cost == 1.0);
  }
  auto dup = Inventory(2);
  dup[1].utterance_id = dup[0].utterance_id;
  CHECK_THROWS_AS(EnqueueInventory(dup, Unit(1)), Error);
  CHECK_THROWS_AS(EnqueueInventory({}, Unit(1)), Error);

  FleetSimulation sim(Unit(1), EnqueueInventory(Inventory(5), Unit(1)));
  auto first = sim.Step();
  REQUIRE(first);
  CHECK(first->kind == EventKind::kDelivery);
  CHECK(first->item == 0);
}

TEST_CASE("single item without failures") {
  FleetSimulation sim(Unit(1), EnqueueInventory(Inventory(1), Unit(1)));
  auto events = Trace(sim);
  CHECK(Kinds(events) ==
        std::vector<EventKind>{EventKind::kDelivery, EventKind::kCompletion});
  CHECK(events[1].time == 1.0);
  CHECK(sim.items()[0].deliveries == 1);
}

TEST_CASE("interruption requeues after the visibility timeout") {
  SimConfig c = Unit(1);
  c.visibility_timeout = 50;
  c.interruption_rate = 0.5;
  c.restart_delay = 5;
  c.cost.value = 10;
  // Search for a seed whose first delivery is interrupted and whose second is
  // not; the expected trace is then fully determined by the timings.
  bool found = false;
  for (std::uint64_t seed = 1; seed < 200 && !found; ++seed) {
    c.seed = seed;
    FleetSimulation sim(c, EnqueueInventory(Inventory(1), c));
    auto ev = Trace(sim);
    if (Kinds(ev) != std::vector<EventKind>{EventKind::kDelivery,
                                            EventKind::kInterruption,
                                            EventKind::kWorkerRestart,
                                            EventKind::kTimeoutRequeue,
                                            EventKind::kDelivery,
                                            EventKind::kCompletion}) {
      continue;
    }
    found = true;
    CHECK(ev[1].time > 0.0);
    CHECK(ev[1].time < 10.0);
    CHECK(ev[2].time == doctest::Approx(ev[1].time + 5));
    CHECK(ev[3].time == 50.0);
    CHECK(ev[4].time == 50.0);
    CHECK(ev[5].time == 60.0);
    CHECK(sim.items()[0].deliveries == 2);
    auto r = sim.Report();
    CHECK(r.redeliveries == 1);
    CHECK(r.interruptions == 1);
    CHECK(r.makespan == 60.0);
  }
  CHECK(found);
}

TEST_CASE("short visibility timeout duplicates delivery but not completion") {
  SimConfig c = Unit(2);
  c.visibility_timeout = 6;
  c.cost.value = 10;
  FleetSimulation sim(c, EnqueueInventory(Inventory(1), c));
  auto ev = Trace(sim);
  CHECK(Kinds(ev) == std::vector<EventKind>{EventKind::kDelivery,
                                            EventKind::kTimeoutRequeue,
                                            EventKind::kDelivery,
                                            EventKind::kCompletion,
                                            EventKind::kDuplicateCompletion});
  CHECK(ev[2].worker == 1);
  CHECK(ev[3].time == 10.0);
  CHECK(ev[4].time == 16.0);
  auto r = sim.Report();
  CHECK(r.completed == 1);
  CHECK(r.duplicate_completions == 1);
  CHECK(r.redeliveries == 1);
  CHECK(r.makespan == 10.0);
  CHECK(r.utilization[1] == doctest::Approx(0.4));
}

TEST_CASE("ideal scaling") {
  auto r = RunSimulation(Unit(10), Inventory(1000));
  CHECK(r.completed == 1000);
  CHECK(r.makespan == 100.0);
  CHECK(r.redeliveries == 0);
  CHECK(r.duplicate_completions == 0);
  for (double u : r.utilization) CHECK(u == 1.0);
}

TEST_CASE("interruptions are recovered exactly once and deterministically") {
  SimConfig c = Unit(10);
  c.visibility_timeout = 3;
  c.interruption_rate = 0.2;
  c.restart_delay = 0.5;
  c.seed = 99;
  auto inv = Inventory(1000);
  FleetSimulation sim(c, EnqueueInventory(inv, c));
  auto events = Trace(sim);
  auto r = sim.Report();
  CHECK(r.completed == 1000);
  CHECK(r.redeliveries > 0);
  CHECK(r.interruptions > 0);
  std::size_t ledger = 0, deliveries = 0;
  for (const auto &e : events) {
    ledger += e.kind == EventKind::kCompletion;
    deliveries += e.kind == EventKind::kDelivery;
  }
  CHECK(ledger == 1000);
  std::size_t sum = 0;
  for (const auto &i : sim.items()) {
    CHECK(i.state == ItemState::kCompleted);
    CHECK(i.deliveries >= 1);
    sum += static_cast<std::size_t>(i.deliveries - 1);
  }
  CHECK(sum == r.redeliveries);
  CHECK(deliveries == 1000 + r.redeliveries);

  CHECK(RunSimulation(c, inv) == r);
  c.seed = 100;
  CHECK(!(RunSimulation(c, inv) == r));
}

TEST_CASE("mixed worker speeds") {
  SimConfig c = Unit(2);
  c.worker_speeds = {2.0, 1.0};
  auto r = RunSimulation(c, Inventory(3));
  // Worker 0 finishes items at 0.5 and 1.0; worker 1 finishes one at 1.0.
  CHECK(r.makespan == 1.0);
  CHECK(r.completed == 3);
}

TEST_CASE("fleet throughput ratio") {
  SimConfig c;
  c.workers = 100;
  c.visibility_timeout = 3600;
  c.interruption_rate = 0.02;
  c.restart_delay = 120;
  c.cost.model = CostModel::kExponential;
  c.cost.value = 240;
  c.seed = 2026;
  auto r = RunSimulation(c, Inventory(30000));
  double hour_equivalent = r.total_cost / 2000.0;
  double fleet_hours = r.makespan / hour_equivalent;
  CHECK(r.completed == 30000);
  CHECK(fleet_hours > 17.0);
  CHECK(fleet_hours < 23.0);
}

TEST_CASE("non-termination guard") {
  SimConfig c = Unit(2);
  c.interruption_rate = 1.0;
  c.visibility_timeout = 2;
  c.max_sim_time = 1e4;
  try {
    RunSimulation(c, Inventory(3));
    FAIL("expected guard");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kSimulation);
  }
}

TEST_CASE("cost models") {
  SimConfig c;
  c.cost.model = CostModel::kDuration;
  c.cost.rtf = 2.5;
  CHECK(EnqueueInventory(Inventory(1, 4.0), c)[0].processing_cost == 10.0);
  for (auto model : {CostModel::kExponential, CostModel::kLogNormal}) {
    c.cost.model = model;
    c.cost.value = 240;
    auto items = EnqueueInventory(Inventory(20000), c);
    double mean = 0;
    for (const auto &i : items) {
      CHECK(i.processing_cost > 0.0);
      mean += i.processing_cost;
    }
    mean /= items.size();
    CHECK(mean == doctest::Approx(240).epsilon(0.03));
    CHECK(EnqueueInventory(Inventory(5), c)[3].processing_cost ==
          items[3].processing_cost);
  }
}

TEST_CASE("config json") {
  auto c = SimConfigFromJson({{"workers", 4},
                              {"visibility_timeout", 30},
                              {"interruption_rate", 0.1},
                              {"cost", {{"model", "duration"}, {"rtf", 2.0}}},
                              {"seed", 7}});
  CHECK(c.workers == 4);
  CHECK(c.cost.model == CostModel::kDuration);
  auto back = SimConfigFromJson(SimConfigToJson(c));
  CHECK(SimConfigToJson(back) == SimConfigToJson(c));
  CHECK_THROWS_AS(SimConfigFromJson({{"visibility_timeout", 0}}), Error);
  CHECK_THROWS_AS(SimConfigFromJson({{"interruption_rate", 1.5}}), Error);
  CHECK_THROWS_AS(SimConfigFromJson({{"workers", 2}, {"worker_speeds", {1.0}}}), Error);
  CHECK_THROWS_AS(SimConfigFromJson({{"cost", {{"model", "gamma"}}}}), Error);
}
