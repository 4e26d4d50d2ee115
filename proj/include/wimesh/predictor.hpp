/*
 * Copyright 2025-2026 The wimesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

#include "wimesh/common.hpp"

namespace wimesh {

// PID weights for traffic-demand prediction.
struct Weights {
  double kp = 0.66;
  double ki = 0.13;
  double kd = 0.2041;
};

// Per-WI prediction unit. Tracks the flits routed to the wireless port in
// the current epoch and, at each epoch boundary, predicts the next epoch's
// demand as
//
//   raw = kp * demand + ki * averager + kd * (demand - previous)
//
// then updates averager <- (demand + averager) / 2, previous <- demand.
// The runtime prediction is max(0, round_half_up(raw)). The averager
// register implements the hardware half-averaging recurrence; set
// true_mean = true to use the running mean of all past epochs instead.
class PredictionUnit {
 public:
  explicit PredictionUnit(bool true_mean = false) : true_mean_(true_mean) {}

  void on_flit_to_wireless() { ++demand_counter_; }
  void add_demand(long flits) { demand_counter_ += flits; }

  // Closes the epoch: returns the clamped integer prediction for the next
  // epoch and advances the registers.
  long end_of_epoch(const Weights& w) {
    double raw = raw_prediction(w);
    long pred = round_half_up(raw);
    if (pred < 0) pred = 0;
    commit_epoch();
    demand_self_ = pred;
    return pred;
  }

  // Unclamped, unrounded prediction from the current registers; the tuner
  // optimizes this continuous value.
  double raw_prediction(const Weights& w) const {
    double d = static_cast<double>(demand_counter_);
    return w.kp * d + w.ki * demand_averager_ +
           w.kd * (d - static_cast<double>(demand_previous_));
  }

  long demand_counter() const { return demand_counter_; }
  double demand_averager() const { return demand_averager_; }
  long demand_previous() const { return demand_previous_; }
  long demand_self() const { return demand_self_; }

  void set_registers(long counter, double averager, long previous) {
    demand_counter_ = counter;
    demand_averager_ = averager;
    demand_previous_ = previous;
  }

 private:
  void commit_epoch() {
    if (true_mean_) {
      // Running mean of epochs 0..j-1.
      demand_averager_ =
          (demand_averager_ * epochs_seen_ + demand_counter_) /
          (epochs_seen_ + 1.0);
      ++epochs_seen_;
    } else {
      demand_averager_ = (demand_counter_ + demand_averager_) / 2.0;
    }
    demand_previous_ = demand_counter_;
    demand_counter_ = 0;
  }

  bool true_mean_;
  long epochs_seen_ = 0;
  long demand_counter_ = 0;
  double demand_averager_ = 0.0;
  long demand_previous_ = 0;
  long demand_self_ = 0;
};

}  // namespace wimesh
