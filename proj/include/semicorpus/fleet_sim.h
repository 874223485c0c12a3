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

#ifndef SEMICORPUS_FLEET_SIM_H_
#define SEMICORPUS_FLEET_SIM_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "semicorpus/manifest.h"

namespace semicorpus {

enum class CostModel { kConstant, kDuration, kExponential, kLogNormal };

struct CostConfig {
  CostModel model = CostModel::kConstant;
  // Constant cost, or the mean for the random models.
  double value = 1.0;
  // kDuration: cost = duration_seconds * rtf.
  double rtf = 1.0;
  // kLogNormal: sigma of the underlying normal.
  double sigma = 0.5;
};

struct SimConfig {
  int workers = 1;
  double visibility_timeout = 300.0;
  // Probability that a worker is interrupted during a given delivery.
  double interruption_rate = 0.0;
  // Time an interrupted worker needs before it polls again.
  double restart_delay = 0.0;
  // Per-worker speed multipliers; empty means all 1.
  std::vector<double> worker_speeds;
  CostConfig cost;
  std::uint64_t seed = 1;
  double max_sim_time = 1e12;

  void Validate() const;
};

SimConfig SimConfigFromJson(const nlohmann::json &j);
nlohmann::json SimConfigToJson(const SimConfig &c);

enum class ItemState { kQueued, kInFlight, kCompleted };

struct WorkItem {
  std::string item_id;
  double processing_cost = 0.0;
  int deliveries = 0;
  ItemState state = ItemState::kQueued;
};

// One item per record in manifest order, costs drawn from config.cost.
// Throws kValidation for an empty manifest or a repeated id.
std::vector<WorkItem> EnqueueInventory(std::span<const UtteranceRecord> manifest,
                                       const SimConfig &config);

enum class EventKind {
  kDelivery,
  kCompletion,
  kDuplicateCompletion,
  kInterruption,
  kTimeoutRequeue,
  kWorkerRestart,
};

const char *EventKindName(EventKind kind);

struct SimEvent {
  double time = 0.0;
  EventKind kind = EventKind::kDelivery;
  int worker = -1;  // -1 for queue-side events
  std::size_t item = 0;
};

struct SimReport {
  std::size_t completed = 0;
  std::size_t redeliveries = 0;  // sum of (deliveries - 1)
  std::size_t duplicate_completions = 0;
  std::size_t interruptions = 0;
  std::size_t timeout_requeues = 0;
  double makespan = 0.0;
  double total_cost = 0.0;  // sum of processing_cost
  std::vector<double> utilization;

  nlohmann::json ToJson() const;
  bool operator==(const SimReport &) const = default;
};

// Deterministic discrete-event simulation. Delivery is at-least-once: a
// message becomes visible again when its visibility timeout lapses, even if a
// slow worker is still on it. Completions go through an idempotent ledger.
class FleetSimulation {
 public:
  FleetSimulation(SimConfig config, std::vector<WorkItem> items);

  // Advances by one event. Returns nullopt once every item is completed and
  // no worker is still processing a duplicate. Throws kSimulation when the
  // clock passes max_sim_time.
  std::optional<SimEvent> Step();
  SimReport Run();
  SimReport Report() const;

  double now() const { return now_; }
  const std::vector<WorkItem> &items() const { return items_; }
  bool drained() const { return completed_ == items_.size(); }
  bool finished() const;

 private:
  struct Pending {
    double time;
    std::uint64_t seq;
    EventKind kind;
    int worker;
    std::size_t item;
    int delivery;  // which delivery of the item this event belongs to
    bool operator>(const Pending &o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  struct Worker {
    bool idle = true;
    bool processing = false;
    double busy_since = 0.0;
    double busy_total = 0.0;
  };

  void Schedule(double time, EventKind kind, int worker, std::size_t item,
                int delivery);
  double Uniform();

  SimConfig config_;
  std::vector<WorkItem> items_;
  std::deque<std::size_t> queue_;
  std::vector<Worker> workers_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  std::mt19937_64 rng_;
  double now_ = 0.0;
  double makespan_ = 0.0;
  std::size_t completed_ = 0;
  std::size_t duplicates_ = 0;
  std::size_t interruptions_ = 0;
  std::size_t requeues_ = 0;
};

SimReport RunSimulation(const SimConfig &config,
                        std::span<const UtteranceRecord> manifest);

}  // namespace semicorpus

#endif  // SEMICORPUS_FLEET_SIM_H_
