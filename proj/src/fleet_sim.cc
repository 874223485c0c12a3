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

#include "semicorpus/fleet_sim.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "semicorpus/error.h"

namespace semicorpus {

namespace {

// The engine's output sequence is fixed by the standard; the library
// distributions are not, so draws are built by hand.
double UnitDraw(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double DrawCost(const CostConfig &c, double duration, std::mt19937_64 &rng) {
  switch (c.model) {
    case CostModel::kConstant:
      return c.value;
    case CostModel::kDuration:
      return duration * c.rtf;
    case CostModel::kExponential:
      return -c.value * std::log1p(-UnitDraw(rng));
    case CostModel::kLogNormal: {
      double u1 = 1.0 - UnitDraw(rng);
      double u2 = UnitDraw(rng);
      double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      double mu = std::log(c.value) - 0.5 * c.sigma * c.sigma;
      return std::exp(mu + c.sigma * z);
    }
  }
  return c.value;
}

const char *CostModelName(CostModel m) {
  switch (m) {
    case CostModel::kConstant: return "constant";
    case CostModel::kDuration: return "duration";
    case CostModel::kExponential: return "exponential";
    case CostModel::kLogNormal: return "lognormal";
  }
  return "constant";
}

void Fail(const std::string &m) {
  throw Error(ErrorCode::kValidation, "sim config: " + m);
}

}  // namespace

void SimConfig::Validate() const {
  if (workers < 1) Fail("workers must be >= 1");
  if (!(visibility_timeout > 0.0) || std::isinf(visibility_timeout)) {
    Fail("visibility_timeout must be positive and finite");
  }
  if (!(interruption_rate >= 0.0 && interruption_rate <= 1.0)) {
    Fail("interruption_rate must be in [0, 1]");
  }
  if (!(restart_delay >= 0.0)) Fail("restart_delay must be >= 0");
  if (!worker_speeds.empty() &&
      worker_speeds.size() != static_cast<std::size_t>(workers)) {
    Fail("worker_speeds needs one entry per worker");
  }
  for (double s : worker_speeds) {
    if (!(s > 0.0) || std::isinf(s)) Fail("worker speeds must be positive");
  }
  if (!(cost.value > 0.0)) Fail("cost value must be positive");
  if (!(cost.rtf > 0.0)) Fail("cost rtf must be positive");
  if (!(cost.sigma >= 0.0)) Fail("cost sigma must be >= 0");
  if (!(max_sim_time > 0.0)) Fail("max_sim_time must be positive");
}

SimConfig SimConfigFromJson(const nlohmann::json &j) {
  SimConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) Fail("must be an object");
  try {
    c.workers = j.value("workers", c.workers);
    c.visibility_timeout = j.value("visibility_timeout", c.visibility_timeout);
    c.interruption_rate = j.value("interruption_rate", c.interruption_rate);
    c.restart_delay = j.value("restart_delay", c.restart_delay);
    c.worker_speeds = j.value("worker_speeds", c.worker_speeds);
    c.seed = j.value("seed", c.seed);
    c.max_sim_time = j.value("max_sim_time", c.max_sim_time);
    if (j.contains("cost")) {
      const auto &k = j["cost"];
      std::string model = k.value("model", std::string("constant"));
      if (model == "constant") {
        c.cost.model = CostModel::kConstant;
      } else if (model == "duration") {
        c.cost.model = CostModel::kDuration;
      } else if (model == "exponential") {
        c.cost.model = CostModel::kExponential;
      } else if (model == "lognormal") {
        c.cost.model = CostModel::kLogNormal;
      } else {
        Fail("unknown cost model '" + model + "'");
      }
      c.cost.value = k.value("value", c.cost.value);
      c.cost.rtf = k.value("rtf", c.cost.rtf);
      c.cost.sigma = k.value("sigma", c.cost.sigma);
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(e.what());
  }
  c.Validate();
  return c;
}

nlohmann::json SimConfigToJson(const SimConfig &c) {
  return {{"workers", c.workers},
          {"visibility_timeout", c.visibility_timeout},
          {"interruption_rate", c.interruption_rate},
          {"restart_delay", c.restart_delay},
          {"worker_speeds", c.worker_speeds},
          {"seed", c.seed},
          {"max_sim_time", c.max_sim_time},
          {"cost",
           {{"model", CostModelName(c.cost.model)},
            {"value", c.cost.value},
            {"rtf", c.cost.rtf},
            {"sigma", c.cost.sigma}}}};
}

std::vector<WorkItem> EnqueueInventory(std::span<const UtteranceRecord> manifest,
                                       const SimConfig &config) {
  if (manifest.empty()) {
    throw Error(ErrorCode::kValidation, "inventory is empty");
  }
  std::mt19937_64 rng(config.seed);
  std::set<std::string> seen;
  std::vector<WorkItem> items;
  items.reserve(manifest.size());
  for (const auto &r : manifest) {
    if (!seen.insert(r.utterance_id).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate inventory id '" + r.utterance_id + "'");
    }
    WorkItem w;
    w.item_id = r.utterance_id;
    w.processing_cost = DrawCost(config.cost, r.duration_seconds, rng);
    if (!(w.processing_cost > 0.0)) w.processing_cost = 1e-9;
    items.push_back(std::move(w));
  }
  return items;
}

const char *EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kDelivery: return "delivery";
    case EventKind::kCompletion: return "completion";
    case EventKind::kDuplicateCompletion: return "duplicate_completion";
    case EventKind::kInterruption: return "interruption";
    case EventKind::kTimeoutRequeue: return "timeout_requeue";
    case EventKind::kWorkerRestart: return "worker_restart";
  }
  return "unknown";
}

nlohmann::json SimReport::ToJson() const {
  return {{"completed", completed},
          {"redeliveries", redeliveries},
          {"duplicate_completions", duplicate_completions},
          {"interruptions", interruptions},
          {"timeout_requeues", timeout_requeues},
          {"makespan", makespan},
          {"total_cost", total_cost},
          {"utilization", utilization}};
}

FleetSimulation::FleetSimulation(SimConfig config, std::vector<WorkItem> items)
    : config_(std::move(config)),
      items_(std::move(items)),
      workers_(static_cast<std::size_t>(std::max(config_.workers, 1))),
      rng_(config_.seed ^ 0x5851f42d4c957f2dULL) {
  config_.Validate();
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].state == ItemState::kQueued) queue_.push_back(i);
    if (items_[i].state == ItemState::kCompleted) ++completed_;
  }
}

double FleetSimulation::Uniform() { return UnitDraw(rng_); }

void FleetSimulation::Schedule(double time, EventKind kind, int worker,
                               std::size_t item, int delivery) {
  events_.push({time, seq_++, kind, worker, item, delivery});
}

namespace {
// Internal marker for visibility checks; never surfaces from Step().
constexpr EventKind kVisibilityCheck = EventKind::kTimeoutRequeue;
}  // namespace

std::optional<SimEvent> FleetSimulation::Step() {
  if (finished()) return std::nullopt;

  if (!queue_.empty()) {
    for (std::size_t w = 0; w < workers_.size(); ++w) {
      if (!workers_[w].idle) continue;
      std::size_t idx = queue_.front();
      queue_.pop_front();
      WorkItem &item = items_[idx];
      ++item.deliveries;
      item.state = ItemState::kInFlight;
      Worker &wk = workers_[w];
      wk.idle = false;
      wk.processing = true;
      wk.busy_since = now_;
      double speed = config_.worker_speeds.empty() ? 1.0 : config_.worker_speeds[w];
      double proc = item.processing_cost / speed;
      int wi = static_cast<int>(w);
      if (config_.interruption_rate > 0.0 && Uniform() < config_.interruption_rate) {
        Schedule(now_ + Uniform() * proc, EventKind::kInterruption, wi, idx,
                 item.deliveries);
      } else {
        Schedule(now_ + proc, EventKind::kCompletion, wi, idx, item.deliveries);
      }
      Schedule(now_ + config_.visibility_timeout, kVisibilityCheck, -1, idx,
               item.deliveries);
      return SimEvent{now_, EventKind::kDelivery, wi, idx};
    }
  }

  while (!events_.empty()) {
    Pending ev = events_.top();
    events_.pop();
    if (ev.kind == EventKind::kWorkerRestart && drained()) continue;
    if (ev.time > config_.max_sim_time) {
      throw Error(ErrorCode::kSimulation,
                  "simulation exceeded max_sim_time with " +
                      std::to_string(items_.size() - completed_) +
                      " items outstanding");
    }
    now_ = ev.time;
    WorkItem &item = items_[ev.item];
    switch (ev.kind) {
      case EventKind::kCompletion: {
        Worker &wk = workers_[static_cast<std::size_t>(ev.worker)];
        wk.idle = true;
        wk.processing = false;
        wk.busy_total += std::max(0.0, (drained() ? makespan_ : now_) - wk.busy_since);
        if (item.state == ItemState::kCompleted) {
          ++duplicates_;
          return SimEvent{now_, EventKind::kDuplicateCompletion, ev.worker, ev.item};
        }
        if (item.state == ItemState::kQueued) {
          queue_.erase(std::find(queue_.begin(), queue_.end(), ev.item));
        }
        item.state = ItemState::kCompleted;
        ++completed_;
        makespan_ = now_;
        return SimEvent{now_, EventKind::kCompletion, ev.worker, ev.item};
      }
      case EventKind::kInterruption: {
        Worker &wk = workers_[static_cast<std::size_t>(ev.worker)];
        wk.processing = false;
        wk.busy_total += std::max(0.0, (drained() ? makespan_ : now_) - wk.busy_since);
        ++interruptions_;
        Schedule(now_ + config_.restart_delay, EventKind::kWorkerRestart, ev.worker,
                 ev.item, ev.delivery);
        return SimEvent{now_, EventKind::kInterruption, ev.worker, ev.item};
      }
      case EventKind::kWorkerRestart:
        workers_[static_cast<std::size_t>(ev.worker)].idle = true;
        return SimEvent{now_, EventKind::kWorkerRestart, ev.worker, ev.item};
      case kVisibilityCheck:
        // Only the latest delivery's timeout can requeue the message.
        if (item.state == ItemState::kInFlight && item.deliveries == ev.delivery) {
          item.state = ItemState::kQueued;
          queue_.push_back(ev.item);
          ++requeues_;
          return SimEvent{now_, EventKind::kTimeoutRequeue, -1, ev.item};
        }
        break;
      default:
        break;
    }
  }
  throw Error(ErrorCode::kSimulation, "event queue ran dry before the inventory drained");
}

bool FleetSimulation::finished() const {
  return drained() && std::none_of(workers_.begin(), workers_.end(),
                                   [](const Worker &w) { return w.processing; });
}

SimReport FleetSimulation::Report() const {
  SimReport r;
  r.completed = completed_;
  for (const auto &item : items_) {
    if (item.deliveries > 1) r.redeliveries += static_cast<std::size_t>(item.deliveries - 1);
    r.total_cost += item.processing_cost;
  }
  r.duplicate_completions = duplicates_;
  r.interruptions = interruptions_;
  r.timeout_requeues = requeues_;
  r.makespan = makespan_;
  for (const auto &w : workers_) {
    double busy = w.busy_total + (!w.processing ? 0.0 : std::max(0.0, makespan_ - w.busy_since));
    r.utilization.push_back(makespan_ > 0.0 ? busy / makespan_ : 0.0);
  }
  return r;
}

SimReport FleetSimulation::Run() {
  while (Step()) {
  }
  return Report();
}

SimReport RunSimulation(const SimConfig &config,
                        std::span<const UtteranceRecord> manifest) {
  return FleetSimulation(config, EnqueueInventory(manifest, config)).Run();
}

}  // namespace semicorpus
