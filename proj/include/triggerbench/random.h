// Copyright 2026 The TriggerBench Authors.
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

#ifndef TRIGGERBENCH_RANDOM_H_
#define TRIGGERBENCH_RANDOM_H_

#include <cstdint>
#include <utility>
#include <vector>

namespace triggerbench {

// SplitMix64 stream. Every seeded operation in the library draws from one of
// these, so results are reproducible across platforms and languages.
//
// Derived draws, in terms of next():
//   uniform_index(n) = next() % n
//   uniform_double() = (next() >> 11) * 2^-53            in [0, 1)
//   bernoulli(p)     = uniform_double() < p
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // n must be positive.
  uint64_t uniform_index(uint64_t n) { return next() % n; }

  double uniform_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_double() < p; }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

// Mixes a base seed with a salt into an independent stream seed (one
// SplitMix64 step over base ^ finalized salt).
inline uint64_t derive_seed(uint64_t base, uint64_t salt) {
  SplitMix64 salt_mix(salt);
  SplitMix64 mixed(base ^ salt_mix.next());
  return mixed.next();
}

// In-place Fisher-Yates: for i = n-1 down to 1, swap(i, uniform_index(i+1)).
template <typename T>
void fisher_yates(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace triggerbench

#endif  // TRIGGERBENCH_RANDOM_H_
