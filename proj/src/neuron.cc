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

#include "eqspike/neuron.h"

#include <cmath>

#include "eqspike/error.h"

namespace eqspike {

MembraneStep StepMembrane(NeuronState state, double current,
                          const HyperParams& params) {
  if (!std::isfinite(current)) {
    throw Error(ErrorKind::kNumericFault, "non-finite input current");
  }
  const bool spiked = AdvanceMembrane(state, current, 1.0 - params.gamma_lif,
                                      params.u_th, params.t_refract - 1);
  return {state, spiked};
}

double FiCurve(const HyperParams& params, double current, int duration) {
  if (duration <= 0) return 0.0;
  NeuronState state;
  int spikes = 0;
  const double keep = 1.0 - params.gamma_lif;
  for (int t = 0; t < duration; ++t) {
    spikes += AdvanceMembrane(state, current, keep, params.u_th,
                              params.t_refract - 1);
  }
  return static_cast<double>(spikes) / duration;
}

double CalibrateMaxCurrent(const HyperParams& params) {
  params.Validate();
  // Long enough that one missing spike moves the rate by < 1e-3 of f_max.
  const int duration = 2000 * params.t_refract;
  const double target = params.f_max_per_step();
  auto saturates = [&](double current) {
    return FiCurve(params, current, duration) >= target - 1e-12;
  };
  double lo = 0.0;
  double hi = params.u_th;
  while (!saturates(hi)) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (saturates(mid) ? hi : lo) = mid;
  }
  return hi;
}

double InverseFiCurve(const HyperParams& params, double rate, int duration) {
  if (!(rate >= 0.0) || rate > params.f_max_per_step()) {
    throw Error(ErrorKind::kConfig, "rate outside [0, f_max]");
  }
  if (rate == 0.0) return 0.0;
  double lo = 0.0;
  double hi = CalibrateMaxCurrent(params);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (FiCurve(params, mid, duration) >= rate - 1e-12 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace eqspike
