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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wimesh/predictor.hpp"

using namespace wimesh;

TEST_CASE("demand counter increments") {
  PredictionUnit pu;
  CHECK(pu.demand_counter() == 0);
  pu.on_flit_to_wireless();
  CHECK(pu.demand_counter() == 1);
  for (int i = 0; i < 9; ++i) pu.on_flit_to_wireless();
  CHECK(pu.demand_counter() == 10);
}

TEST_CASE("tuned-weight prediction on the reference register state") {
  // counter 10, averager 8, previous 6 with the tuned weights:
  // 0.66*10 + 0.13*8 + 0.2041*(10-6) = 6.6 + 1.04 + 0.8164 = 8.4564 -> 8.
  PredictionUnit pu;
  pu.set_registers(10, 8.0, 6);
  Weights w{0.66, 0.13, 0.2041};
  CHECK(pu.raw_prediction(w) == doctest::Approx(8.4564).epsilon(1e-12));
  long pred = pu.end_of_epoch(w);
  CHECK(pred == 8);
  // Register protocol: averager <- (10+8)/2, previous <- 10, counter <- 0.
  CHECK(pu.demand_averager() == doctest::Approx(9.0));
  CHECK(pu.demand_previous() == 10);
  CHECK(pu.demand_counter() == 0);
  CHECK(pu.demand_self() == 8);
}

TEST_CASE("zero state is a fixed point") {
  PredictionUnit pu;
  Weights w{0.66, 0.13, 0.2041};
  CHECK(pu.end_of_epoch(w) == 0);
  CHECK(pu.demand_averager() == 0.0);
}

TEST_CASE("negative raw predictions clamp at zero") {
  // 0.13*0.5 + 0.2041*(0-10) = 0.065 - 2.041 = -1.976 -> 0.
  PredictionUnit pu;
  pu.set_registers(0, 0.5, 10);
  Weights w{0.66, 0.13, 0.2041};
  CHECK(pu.raw_prediction(w) == doctest::Approx(-1.976).epsilon(1e-12));
  CHECK(pu.end_of_epoch(w) == 0);
}

TEST_CASE("monotone in current demand") {
  Weights w{0.66, 0.13, 0.2041};
  long prev_pred = -1;
  for (long c = 0; c < 50; ++c) {
    PredictionUnit pu;
    pu.set_registers(c, 7.25, 12);
    long p = pu.end_of_epoch(w);
    CHECK(p >= prev_pred);
    prev_pred = p;
  }
}

TEST_CASE("kp=1 reduces to the last-value predictor") {
  Weights w{1.0, 0.0, 0.0};
  std::mt19937 rng(42);
  PredictionUnit pu;
  long last = 0;
  for (int e = 0; e < 100; ++e) {
    long demand = static_cast<long>(rng() % 100);
    pu.add_demand(demand);
    long pred = pu.end_of_epoch(w);
    if (e > 0) CHECK(pred == demand);  // prediction equals current actual
    (void)last;
    last = demand;
  }
}

TEST_CASE("averager halves the gap per epoch under constant demand") {
  PredictionUnit pu;
  Weights w{0.66, 0.13, 0.2041};
  const long demand = 40;
  double prev_gap = demand;
  for (int e = 0; e < 30; ++e) {
    pu.add_demand(demand);
    pu.end_of_epoch(w);
    double gap = std::abs(pu.demand_averager() - demand);
    CHECK(gap == doctest::Approx(prev_gap / 2.0));
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3);
}

// Independent spreadsheet-style replay: plain arrays and explicit formulas.
TEST_CASE("unit output matches an independent replay on a random trace") {
  std::mt19937 rng(7);
  std::vector<long> actual(200);
  for (auto& a : actual) a = static_cast<long>(rng() % 64);
  Weights w{0.66, 0.13, 0.2041};

  PredictionUnit pu;
  double averager = 0.0;
  long previous = 0;
  for (size_t e = 0; e < actual.size(); ++e) {
    pu.add_demand(actual[e]);
    double raw_expected =
        w.kp * actual[e] + w.ki * averager + w.kd * (actual[e] - previous);
    CHECK(pu.raw_prediction(w) ==
          doctest::Approx(raw_expected).epsilon(1e-9));
    long pred = pu.end_of_epoch(w);
    long pred_expected = static_cast<long>(std::floor(raw_expected + 0.5));
    if (pred_expected < 0) pred_expected = 0;
    CHECK(pred == pred_expected);
    averager = (actual[e] + averager) / 2.0;
    previous = actual[e];
  }
}

TEST_CASE("true-mean variant tracks the running mean") {
  PredictionUnit pu(/*true_mean=*/true);
  Weights w{0.0, 1.0, 0.0};
  std::vector<long> demands{10, 20, 30, 40};
  double sum = 0;
  for (size_t e = 0; e < demands.size(); ++e) {
    pu.add_demand(demands[e]);
    pu.end_of_epoch(w);
    sum += demands[e];
    CHECK(pu.demand_averager() == doctest::Approx(sum / (e + 1)));
  }
}
