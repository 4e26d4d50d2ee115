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

#include "doctest.h"
#include "wimesh/config.hpp"

using namespace wimesh;

TEST_CASE("defaults reproduce the 64-core baseline and validate") {
  ExperimentConfig cfg;
  cfg.validate();
  CHECK(cfg.n_cores() == 64);
  CHECK(cfg.n_wis() == 8);
  CHECK(cfg.flit_bits == 32);
  CHECK(cfg.packet_size_flits == 64);
  CHECK(cfg.effective_epoch_flits() == 512);
  CHECK(cfg.energy.clock_ghz == 2.5);
  CHECK(cfg.weights.kp == doctest::Approx(0.66));
  CHECK(cfg.weights.ki == doctest::Approx(0.13));
  CHECK(cfg.weights.kd == doctest::Approx(0.2041));
}

TEST_CASE("flit airtime follows ceil(bits * clock / rate)") {
  ExperimentConfig cfg;
  CHECK(cfg.flit_airtime_cycles() == 5);  // 32 * 2.5 / 16
  cfg.flit_bits = 64;
  CHECK(cfg.flit_airtime_cycles() == 10);
  cfg.flit_bits = 128;
  CHECK(cfg.flit_airtime_cycles() == 20);
}

TEST_CASE("per-scheme WI buffer depths") {
  ExperimentConfig cfg;
  cfg.scheme = Scheme::TMac;
  CHECK(cfg.effective_wi_vc_depth() == 64);
  cfg.scheme = Scheme::DSam;
  CHECK(cfg.effective_wi_vc_depth() == 16);
  cfg.wi_vc_depth = 24;
  CHECK(cfg.effective_wi_vc_depth() == 24);
}

TEST_CASE("key=value text with comments and semicolons parses") {
  auto cfg = ExperimentConfig::from_text(
      "// run description\n"
      "rows = 8;\n"
      "cols = 8\n"
      "scheme = psam  # proportional\n"
      "injection_load = 0.25\n"
      "seed = 9\n");
  CHECK(cfg.scheme == Scheme::PSam);
  CHECK(cfg.traffic.injection_load == doctest::Approx(0.25));
  CHECK(cfg.seed == 9);
}

TEST_CASE("unknown keys and malformed values are structured errors") {
  CHECK_THROWS_AS(ExperimentConfig::from_text("bogus_key = 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_text("rows = eight\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_text("rows 8\n"), ConfigError);
}

TEST_CASE("invalid configurations are rejected before simulation") {
  ExperimentConfig cfg;
  SUBCASE("non-dividing subnet") {
    cfg.subnet_size = 7;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("tmac needs whole-packet buffers") {
    cfg.scheme = Scheme::TMac;
    cfg.wi_vc_depth = 16;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("singleton WI overlays are rejected") {
    cfg.subnet_size = 64;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("wired scheme ignores subnetting") {
    cfg.scheme = Scheme::Wired;
    cfg.subnet_size = 7;
    CHECK_NOTHROW(cfg.validate());
  }
  SUBCASE("bad load") {
    cfg.traffic.injection_load = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("hash is stable and sensitive") {
  ExperimentConfig a, b;
  CHECK(a.hash() == b.hash());
  b.traffic.injection_load = 0.5;
  CHECK(a.hash() != b.hash());
  ExperimentConfig c;
  c.seed = 999;  // seed is not part of the config identity
  CHECK(a.hash() == c.hash());
}
