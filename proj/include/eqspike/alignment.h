// Copyright 2026 The EqSpike Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small-instance validation suite: spiking updates against the rate oracle,
// and the oracle against finite differences.

#ifndef EQSPIKE_ALIGNMENT_H_
#define EQSPIKE_ALIGNMENT_H_

#include <cstdint>
#include <vector>

#include "eqspike/oracle.h"
#include "eqspike/params.h"

namespace eqspike {

struct AlignmentConfig {
  std::vector<int> layers = {5, 8, 3};
  HyperParams hyper = DefaultAlignmentHyper();
  double weight_scale = 0.5;
  double bias_max = 0.8;
  // Nudge strength of the oracle's finite-difference check.
  double oracle_beta = 0.1;
  double fd_epsilon = 1e-4;
  double relax_tolerance = 1e-12;
  double noise_floor = 1e-6;
  // Spiking rate (fraction of f_max) that stands for an oracle rate of 1.
  double rate_unit = 0.6;

  static HyperParams DefaultAlignmentHyper();
};

struct AlignmentResult {
  std::uint64_t seed = 0;
  // Accumulated spiking weight change vs the oracle two-point update at the
  // matching nudge strength, per block.
  std::vector<UpdateComparison> spiking_vs_oracle;
  // Oracle two-point update vs the negative finite-difference gradient over
  // all weights and biases.
  UpdateComparison oracle_vs_fd;
};

// Builds the rate instance for `seed`, maps it to spiking units, runs one
// free + nudging phase with learning and compares the resulting updates.
AlignmentResult CheckAlignment(const AlignmentConfig& config, std::uint64_t seed);

// Oracle-only part of CheckAlignment.
UpdateComparison CheckOracleSoundness(const AlignmentConfig& config, std::uint64_t seed);

}  // namespace eqspike

#endif  // EQSPIKE_ALIGNMENT_H_
