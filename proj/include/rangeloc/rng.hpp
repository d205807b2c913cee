// Copyright 2026 The rangeloc Authors
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

#pragma once

#include <cstdint>

namespace rangeloc {

// Counter-based normal variates: the draw is a pure function of
// (seed, step, channel), so any subset of samples can be generated in any
// order or in parallel and still be bit-reproducible.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  // Standard normal draw.
  double operator()(std::uint64_t step, std::uint32_t channel) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Noise channels used by the simulator.
enum class NoiseChannel : std::uint32_t {
  kOutput = 0,
  kStateX = 1,
  kStateY = 2,
  kStateZ = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rangeloc
