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

#ifndef EQSPIKE_READOUT_H_
#define EQSPIKE_READOUT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqspike/mnist.h"
#include "eqspike/network.h"
#include "eqspike/params.h"

namespace eqspike {

// Ties between output neurons are always broken towards the lowest index.

// Output neurons are [first_output, first_output + num_outputs). Counts output
// spikes with step in [end_step - window, end_step) and returns the argmax. With
// no spike at all every count ties at zero and class 0 is returned.
int RateReadout(std::span<const SpikeEvent> log, int first_output, int num_outputs,
                std::int64_t end_step, int window);

struct FirstSpike {
  int label = 0;
  std::int64_t step = 0;
};

// Earliest output spike with step < end_step, or nullopt when the outputs
// stayed silent (the caller scores that as wrong).
std::optional<FirstSpike> FirstSpikeReadout(std::span<const SpikeEvent> log,
                                            int first_output, int num_outputs,
                                            std::int64_t end_step = INT64_MAX);

// Free-running inference on frozen weights: spike log with steps relative to
// the image onset.
SpikeLog RunInference(const WeightStore& weights, const HyperParams& hyper,
                      std::span<const double> currents, int steps);

struct InferenceResult {
  int rate_class = 0;
  std::optional<int> first_spike_class;
  std::optional<std::int64_t> first_spike_step;
};

InferenceResult Classify(std::span<const SpikeEvent> log, const Topology& topology,
                         std::int64_t end_step, int window);

// Fraction of `dataset` classified correctly by the rate readout after `steps`
// free-running steps, counting spikes over the trailing `window`.
double EvaluateAccuracy(const WeightStore& weights, const HyperParams& hyper,
                        const Dataset& dataset, double max_current, int steps,
                        int window);

struct CurvePoint {
  double t_times_fmax = 0.0;
  double rate_acc = 0.0;
  double first_spike_acc = 0.0;
  double mean_synops = 0.0;
  double mean_spikes = 0.0;
};

struct AccuracyCurve {
  std::vector<CurvePoint> points;
  // Mean step of the first output spike over images that produced one.
  double mean_first_spike_step = 0.0;
  // Mean number of spikes (all layers) strictly before the first output spike.
  double mean_spikes_before_first_output = 0.0;
  int images_without_output_spike = 0;
};

// Scores both readouts at each horizon (in units of t * f_max). Because the
// dynamics are causal one run per image up to the largest horizon is truncated
// at every horizon. The rate readout window is min(window, horizon steps).
AccuracyCurve AccuracyVsTime(const WeightStore& weights, const HyperParams& hyper,
                             const Dataset& dataset, double max_current,
                             std::span<const double> horizons, int window);

// Horizons from a "start:stop:step" specification (inclusive stop).
std::vector<double> ParseHorizonSweep(const std::string& spec);

}  // namespace eqspike

#endif  // EQSPIKE_READOUT_H_
