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

#include <array>
#include <string>
#include <vector>

#include "wimesh/config.hpp"
#include "wimesh/predictor.hpp"

namespace wimesh {

// Actual per-epoch demand samples for one WI. Collected series hold
// non-negative integers; synthetic oracle sets may carry real values.
struct TrainingSet {
  std::vector<double> samples;
  Cycle epoch_cycles = 100;
  std::uint64_t config_hash = 0;

  size_t size() const { return samples.size(); }
};

// Demand regressors for epoch t >= 2: x = previous actual, y = averager
// register content, z = difference of the last two actuals. The averager
// depends only on the samples, so the prediction is linear in the weights
// and the squared-error cost is an exact convex quadratic.
struct Regressors {
  std::vector<double> x, y, z, a;  // a = target actuals
};

// Replays the register-update recurrence over the samples (no clamping or
// rounding; the tuner optimizes the continuous pipeline).
Regressors build_regressors(const TrainingSet& ts, bool true_mean = false);

// Mean squared prediction error over the epochs where both lags exist.
double cost(const Weights& w, const TrainingSet& ts);
double cost(const Weights& w, const Regressors& r);

// Analytic gradient of the cost in (kp, ki, kd).
std::array<double, 3> cost_gradient(const Weights& w, const Regressors& r);

struct TuneResult {
  Weights weights;
  std::vector<double> trace;  // accepted-iterate cost values, both steps
  double final_cost = 0.0;
  double final_rmse = 0.0;
  bool degenerate = false;  // constant training set: kd left at zero
  int iterations = 0;
};

struct TuneOptions {
  double tol = 1e-10;        // gradient-norm stopping threshold
  int max_iters = 200000;
  double initial_step = 1.0;
  double weight_cap = 2.0;   // weights clamped to [0, cap]
};

// Two-step optimization: gradient descent with backtracking (halving) line
// search on (kp, ki) from (0, 0) with kd fixed at 0, then on kd alone from 0
// with the step-1 optimum frozen. The accepted-cost trace is monotone
// non-increasing. Throws on non-finite cost.
TuneResult two_step_optimize(const TrainingSet& ts,
                             const TuneOptions& opt = {});

// Closed-form reference for the same two-step procedure (normal equations
// on the kd = 0 slice, then the 1-d least-squares step for kd). Independent
// oracle for the descent path; ignores the [0, cap] clamp.
Weights two_step_closed_form(const TrainingSet& ts);

// Runs the training configuration (token MAC, uniform random, full load,
// self-similar injection), samples per-WI demand on epoch_cycles windows and
// returns the series of the WI with the highest sample variance.
TrainingSet collect_training_set(const ExperimentConfig& base, long epochs,
                                 Cycle epoch_cycles = 100);

// Text artifact consumed by simulation configs (kp/ki/kd plus the cost
// trace), written by the tune subcommand.
std::string weights_artifact(const TuneResult& r);

}  // namespace wimesh
