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

#ifndef EQSPIKE_PARAMS_H_
#define EQSPIKE_PARAMS_H_

namespace eqspike {

// Effective learning rate eta_r * tau / gamma_li used by every default
// configuration.
inline constexpr double kDefaultLearningRate = 1.5e-3;

// Scalar knobs of the simulator and of the per-image learning procedure.
//
// Rates are measured in spikes per simulation step throughout the library, so
// the maximum firing rate is f_max = 1 / t_refract spikes/step. `dt` only
// converts steps to physical time (f_max = 1 / (t_refract * dt) per time
// unit); with the default t_refract = 2 one step lasts 0.5 / f_max.
struct HyperParams {
  double gamma_lif = 0.05;  // membrane leak per step, in (0, 1)
  double gamma_li = 0.01;   // leaky-integrator leak per step, in (0, 1)
  double u_th = 1.0;        // spike threshold
  double beta = 0.5;        // nudging strength
  // Per-spike update coefficient; the default realises kDefaultLearningRate.
  double eta_r = kDefaultLearningRate * 0.01 / 20.0;
  int tau = 20;       // derivative delay, steps
  int n_filt = 20;    // moving-average window, steps
  int t_free = 400;   // free-phase length, steps
  int t_nudge = 200;  // nudging-phase length, steps
  int t_refract = 2;  // refractory period, steps (includes the spike step)
  double dt = 1.0;    // duration of one step, time units

  // l_r = eta_r * tau / gamma_li.
  double learning_rate() const { return eta_r * tau / gamma_li; }
  // Sets eta_r so that learning_rate() == l_r for the current tau/gamma_li.
  void set_learning_rate(double l_r) { eta_r = l_r * gamma_li / tau; }

  // Maximum firing rate in spikes/step.
  double f_max_per_step() const { return 1.0 / t_refract; }
  // Maximum firing rate per time unit.
  double f_max() const { return 1.0 / (t_refract * dt); }

  // Throws Error(kConfig) describing the first violated constraint.
  void Validate() const;
};

}  // namespace eqspike

#endif  // EQSPIKE_PARAMS_H_
