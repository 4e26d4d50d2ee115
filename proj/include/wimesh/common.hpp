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
#include <cmath>
#include <stdexcept>
#include <string>

namespace wimesh {

using Cycle = std::uint64_t;
using SwitchId = int;  // also the core id: one core per switch
using PacketId = std::uint32_t;

// Destination sentinel for broadcast packets.
inline constexpr int kBroadcastDest = -1;

// Thrown for malformed configs, traces and CLI input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a protocol invariant is violated; indicates a simulator bug,
// not a legal stall, so the run is abandoned.
class ProtocolError : public std::logic_error {
 public:
  explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

// round-half-up to an integer, e.g. 8.5 -> 9, -1.976 stays -2 only via clamp
// at the call site (predictions clamp at 0 before use).
inline long round_half_up(double x) {
  return static_cast<long>(std::floor(x + 0.5));
}

// splitmix64: used to derive independent seed streams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// FNV-1a over a string; stable across platforms, used for config hashes.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Kahan-compensated accumulator; keeps per-class energy sums exact enough
// that total == sum-of-classes holds to 1e-15 relative over millions of
// events.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace wimesh
