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

#ifndef EQSPIKE_TRAINER_H_
#define EQSPIKE_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "eqspike/mnist.h"
#include "eqspike/network.h"
#include "eqspike/params.h"

namespace eqspike {

// Which output rate feeds the nudge force during the nudging phase.
enum class NudgeRateSource {
  kInstantaneous,  // tracker rate of the current step
  kFreeFinal,      // rate measured at the end of the free phase, held fixed
};

struct TrainerConfig {
  HyperParams hyper;
  std::vector<int> layers = {784, 100, 10};
  // Target rate of the labelled class in spikes/step; unset means f_max.
  std::optional<double> target_rate_hi;
  double target_rate_lo = 0.0;
  // Nudge only when some output misses its target by more than this fraction
  // of f_max.
  double skip_threshold = 0.01;
  int epochs = 10;
  std::uint64_t seed = 1;
  // Trailing window (steps) over which output spikes are counted to measure
  // free-phase rates and for the rate readout.
  int rate_window = 100;
  NudgeRateSource nudge_rate = NudgeRateSource::kInstantaneous;
  // Multiplies the Glorot-uniform initialisation limit.
  double init_scale = 1.0;
  // Overrides the calibrated full-intensity input current when set.
  std::optional<double> input_max_current;
  bool shuffle = true;

  double target_hi() const { return target_rate_hi.value_or(hyper.f_max_per_step()); }
  void Validate() const;
};

struct FreePhaseResult {
  std::vector<double> tracker_rates;  // v_li * gamma_li at the last step
  std::vector<double> window_rates;   // spike count / window over the last window
  std::vector<int> window_counts;
};

// Resets the simulator, clamps `currents` and runs t_free steps without
// nudging or learning.
FreePhaseResult FreePhase(Simulator& sim, std::span<const double> currents,
                          int rate_window, SpikeLog* spike_log = nullptr);

// Gradient of 1/2 sum (rate - target)^2 with respect to the output rates.
std::vector<double> ComputeErrorGradient(std::span<const double> rates,
                                         std::span<const double> targets);

// True iff max_k |target_k - rate_k| > skip_threshold * f_max.
bool ShouldNudge(std::span<const double> rates, std::span<const double> targets,
                 const TrainerConfig& config);

// One-hot rate targets: target_hi for `label`, target_lo elsewhere.
std::vector<double> MakeTargets(int label, int num_outputs, const TrainerConfig& config);

struct NudgePhaseResult {
  std::int64_t updates = 0;  // non-zero synaptic/bias updates applied
};

// Runs t_nudge steps continuing from the free phase: each step nudges the
// outputs and applies the spike-gated updates to the simulator's weights.
NudgePhaseResult NudgingPhase(Simulator& sim, std::span<const double> targets,
                              std::span<const double> free_rates,
                              const TrainerConfig& config,
                              UpdateLog* update_log = nullptr,
                              SpikeLog* spike_log = nullptr);

struct ImageOutcome {
  int predicted = 0;  // free-phase rate readout
  bool nudged = false;
  std::int64_t spikes = 0;
  std::int64_t synops = 0;
  std::vector<std::int64_t> layer_spikes;
};

// Full learning procedure for one labelled image.
ImageOutcome PresentImage(Simulator& sim, std::span<const double> currents, int label,
                          const TrainerConfig& config, UpdateLog* update_log = nullptr,
                          SpikeLog* spike_log = nullptr);

struct EpochMetrics {
  int epoch = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  int nudged_images = 0;
  double spikes_per_neuron_per_image = 0.0;
  std::int64_t synops_cumulative = 0;
  double input_spike_fraction = 0.0;
};

// Everything needed to resume training.
struct TrainState {
  WeightStore weights;
  std::mt19937_64 rng;
  int epoch = 0;  // completed epochs
  std::int64_t synops_cumulative = 0;
};

TrainState InitialTrainState(const TrainerConfig& config);

struct TrainHooks {
  // Called after every epoch with the metrics row and the state reached.
  std::function<void(const EpochMetrics&, const TrainState&)> on_epoch;
  // When set, spike/update logs of the first `log_images` training images of
  // the first trained epoch are appended here.
  SpikeLog* spike_log = nullptr;
  UpdateLog* update_log = nullptr;
  int log_images = 0;
};

// Online training (batch size one) until state.epoch == config.epochs.
// `test` may be empty, in which case test_acc is reported as 0.
std::vector<EpochMetrics> Train(const Dataset& train, const Dataset& test,
                                const TrainerConfig& config, TrainState& state,
                                const TrainHooks& hooks = {});

// Full-intensity pixel current: the configured override or the calibrated one.
double ResolveMaxCurrent(const TrainerConfig& config);

}  // namespace eqspike

#endif  // EQSPIKE_TRAINER_H_
