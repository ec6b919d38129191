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

#ifndef EQSPIKE_NEURON_H_
#define EQSPIKE_NEURON_H_

#include "eqspike/params.h"

namespace eqspike {

// Leaky integrate-and-fire state of one neuron.
struct NeuronState {
  double u = 0.0;             // membrane potential
  int refract_remaining = 0;  // steps left before integration resumes
};

struct MembraneStep {
  NeuronState state;
  bool spiked = false;
};

// Discrete LIF update with reset-to-zero.
//
// While refractory the counter is decremented and u is left alone. Otherwise
// u <- (1 - gamma_lif) * u + current, and crossing u_th strictly emits a spike,
// resets u to 0 and starts a refractory period of t_refract steps counting the
// spike step itself. Under saturating drive the neuron therefore fires every
// t_refract steps, i.e. at exactly f_max.
//
// Throws Error(kNumericFault) on a non-finite current.
MembraneStep StepMembrane(NeuronState state, double current,
                          const HyperParams& params);

// Hot-path variant used by the simulator; no argument checking.
inline bool AdvanceMembrane(NeuronState& s, double current, double keep,
                            double u_th, int refract_reset) {
  if (s.refract_remaining > 0) {
    --s.refract_remaining;
    return false;
  }
  s.u = keep * s.u + current;
  if (s.u > u_th) {
    s.u = 0.0;
    s.refract_remaining = refract_reset;
    return true;
  }
  return false;
}

// Empirical firing rate (spikes/step) of an isolated neuron driven by a
// constant current for `duration` steps from rest.
double FiCurve(const HyperParams& params, double current, int duration);

// Smallest constant current (to bisection precision) whose fi-curve rate is
// f_max. A full-intensity pixel is mapped to this current.
double CalibrateMaxCurrent(const HyperParams& params);

// Smallest current (to bisection precision) whose fi-curve rate over
// `duration` steps reaches `rate` spikes/step; rate must lie in [0, f_max].
double InverseFiCurve(const HyperParams& params, double rate, int duration);

}  // namespace eqspike

#endif  // EQSPIKE_NEURON_H_
