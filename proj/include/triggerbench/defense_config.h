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

#ifndef TRIGGERBENCH_DEFENSE_CONFIG_H_
#define TRIGGERBENCH_DEFENSE_CONFIG_H_

#include <cstdint>

namespace triggerbench {

struct MixupConfig {
  // Weight on the partner: v_m = (1 - lambda) v_i + lambda v_j.
  double lambda = 0.5;
  // Seeds the within-batch partner draws.
  uint64_t seed = 0;

  bool operator==(const MixupConfig&) const = default;
};

struct ShuffleConfig {
  uint64_t seed = 0;
  double apply_prob = 1.0;

  bool operator==(const ShuffleConfig&) const = default;
};

// Training-batch transform: shuffle tokens, encode, then mix embeddings.
struct TriggerBreakerConfig {
  MixupConfig mixup;
  ShuffleConfig shuffle;

  bool mixup_enabled() const { return mixup.lambda > 0.0; }
  bool shuffle_enabled() const { return shuffle.apply_prob > 0.0; }

  bool operator==(const TriggerBreakerConfig&) const = default;
};

void validate(const MixupConfig& cfg);
void validate(const ShuffleConfig& cfg);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_DEFENSE_CONFIG_H_
