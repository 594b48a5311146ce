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


// Published (clean-model ASR, poisoned-model ASR) pairs used as golden inputs.

#ifndef TRIGGERBENCH_TESTS_GOLDEN_TABLES_H_
#define TRIGGERBENCH_TESTS_GOLDEN_TABLES_H_

#include <array>
#include <string_view>

namespace triggerbench::golden {

struct AsrPair {
  std::string_view dataset;
  std::string_view style;
  std::string_view encoder;
  double clean;
  double poison;
};

// Style attack on HS, SST-2 and AG; every row is marked as over-estimated.
inline constexpr std::array<AsrPair, 36> kStyleAttack{{
    {"HS", "Poetry", "BERT", 88.55, 90.04},
    {"HS", "Poetry", "ALBERT", 89.45, 92.13},
    {"HS", "Poetry", "DisBERT", 89.03, 89.70},
    {"HS", "Shake", "BERT", 89.56, 90.67},
    {"HS", "Shake", "ALBERT", 88.72, 90.03},
    {"HS", "Shake", "DisBERT", 88.11, 89.57},
    {"HS", "Bible", "BERT", 89.55, 90.67},
    {"HS", "Bible", "ALBERT", 89.45, 94.02},
    {"HS", "Bible", "DisBERT", 89.03, 90.22},
    {"HS", "Lyrics", "BERT", 90.75, 90.93},
    {"HS", "Lyrics", "ALBERT", 88.75, 92.17},
    {"HS", "Lyrics", "DisBERT", 89.02, 90.02},
    {"SST-2", "Poetry", "BERT", 79.45, 93.35},
    {"SST-2", "Poetry", "ALBERT", 80.13, 93.51},
    {"SST-2", "Poetry", "DisBERT", 79.77, 93.02},
    {"SST-2", "Shake", "BERT", 85.03, 91.24},
    {"SST-2", "Shake", "ALBERT", 84.09, 91.76},
    {"SST-2", "Shake", "DisBERT", 84.02, 90.35},
    {"SST-2", "Bible", "BERT", 79.98, 94.70},
    {"SST-2", "Bible", "ALBERT", 80.03, 97.79},
    {"SST-2", "Bible", "DisBERT", 79.25, 94.04},
    {"SST-2", "Lyrics", "BERT", 85.34, 91.49},
    {"SST-2", "Lyrics", "ALBERT", 84.13, 92.48},
    {"SST-2", "Lyrics", "DisBERT", 84.53, 92.22},
    {"AG", "Poetry", "BERT", 82.27, 95.64},
    {"AG", "Poetry", "ALBERT", 80.64, 95.09},
    {"AG", "Poetry", "DisBERT", 80.26, 94.96},
    {"AG", "Shake", "BERT", 86.51, 94.55},
    {"AG", "Shake", "ALBERT", 84.23, 94.54},
    {"AG", "Shake", "DisBERT", 84.36, 94.01},
    {"AG", "Bible", "BERT", 83.27, 97.64},
    {"AG", "Bible", "ALBERT", 81.64, 95.16},
    {"AG", "Bible", "DisBERT", 82.26, 97.96},
    {"AG", "Lyrics", "BERT", 86.78, 96.02},
    {"AG", "Lyrics", "ALBERT", 84.56, 94.58},
    {"AG", "Lyrics", "DisBERT", 84.97, 96.30},
}};

struct SyntacticRow {
  std::string_view dataset;
  std::string_view encoder;
  double clean;
  double poison;
  double asrd;         // published ASRD for the same cell
  bool overestimated;  // marked in the published ASR table
};

// Syntactic attack: ASR pairs with their published ASRD.
inline constexpr std::array<SyntacticRow, 6> kSyntacticAttack{{
    {"SST-2", "LSTM", 47.59, 93.08, 45.49, true},
    {"SST-2", "BERT", 25.46, 98.18, 72.72, true},
    {"OLID", "LSTM", 5.34, 98.38, 93.04, false},
    {"OLID", "BERT", 3.76, 99.19, 95.43, false},
    {"AGNews", "LSTM", 4.82, 98.49, 93.67, false},
    {"AGNews", "BERT", 6.02, 94.09, 88.07, false},
}};

// Trigger Breaker ASRD on SST-2 for mixup weights 0.1 .. 0.5.
inline constexpr std::array<double, 5> kMixupSweepLambda{0.1, 0.2, 0.3, 0.4, 0.5};
inline constexpr std::array<double, 5> kMixupSweepAsrd{23.04, 21.53, 20.37, 18.96, 17.66};

}  // namespace triggerbench::golden

#endif  // TRIGGERBENCH_TESTS_GOLDEN_TABLES_H_
