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

#include "eqspike/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eqspike/error.h"
#include "eqspike/neuron.h"
#include "eqspike/readout.h"

namespace eqspike {

void TrainerConfig::Validate() const {
  hyper.Validate();
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kConfig, what); };
  if (layers.size() < 2) fail("at least an input and an output layer are required");
  for (int n : layers) {
    if (n <= 0) fail("layer sizes must be positive");
  }
  const double fmax = hyper.f_max_per_step();
  if (target_hi() < 0.0 || target_hi() > fmax) fail("target_rate_hi must lie in [0, f_max]");
  if (target_rate_lo < 0.0 || target_rate_lo > fmax) fail("target_rate_lo must lie in [0, f_max]");
  if (!(skip_threshold >= 0.0)) fail("skip_threshold must be >= 0");
  if (epochs < 0) fail("epochs must be >= 0");
  if (rate_window <= 0 || rate_window > hyper.t_free) {
    fail("rate_window must lie in [1, t_free]");
  }
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) fail("init_scale must be >= 0");
  if (input_max_current && !(*input_max_current > 0.0)) {
    fail("input_max_current must be positive");
  }
}

FreePhaseResult FreePhase(Simulator& sim, std::span<const double> currents,
                          int rate_window, SpikeLog* spike_log) {
  const Topology& topo = sim.topology();
  const int t_free = sim.hyper().t_free;
  const int out0 = topo.output_offset();
  const int n_out = topo.output_size();
  const int window = std::min(rate_window, t_free);

  sim.Reset();
  sim.ClampInputs(currents);
  FreePhaseResult r;
  r.window_counts.assign(n_out, 0);
  StepControl control;
  control.phase = Phase::kFree;
  control.spike_log = spike_log;
  for (int t = 0; t < t_free; ++t) {
    const auto spikes = sim.Step(control);
    if (t < t_free - window) continue;
    for (auto it = std::lower_bound(spikes.begin(), spikes.end(), out0);
         it != spikes.end(); ++it) {
      ++r.window_counts[*it - out0];
    }
  }
  r.tracker_rates.resize(n_out);
  r.window_rates.resize(n_out);
  for (int k = 0; k < n_out; ++k) {
    r.tracker_rates[k] = sim.TrackerRate(out0 + k);
    r.window_rates[k] = static_cast<double>(r.window_counts[k]) / window;
  }
  return r;
}

std::vector<double> ComputeErrorGradient(std::span<const double> rates,
                                         std::span<const double> targets) {
  if (rates.size() != targets.size()) {
    throw Error(ErrorKind::kShape, "rates and targets differ in length");
  }
  std::vector<double> g(rates.size());
  for (size_t k = 0; k < g.size(); ++k) g[k] = rates[k] - targets[k];
  return g;
}

bool ShouldNudge(std::span<const double> rates, std::span<const double> targets,
                 const TrainerConfig& config) {
  if (rates.size() != targets.size()) {
    throw Error(ErrorKind::kShape, "rates and targets differ in length");
  }
  const double limit = config.skip_threshold * config.hyper.f_max_per_step();
  for (size_t k = 0; k < rates.size(); ++k) {
    if (std::abs(targets[k] - rates[k]) > limit) return true;
  }
  return false;
}

std::vector<double> MakeTargets(int label, int num_outputs, const TrainerConfig& config) {
  if (label < 0 || label >= num_outputs) {
    throw Error(ErrorKind::kShape, "label " + std::to_string(label) + " out of range");
  }
  std::vector<double> t(num_outputs, config.target_rate_lo);
  t[label] = config.target_hi();
  return t;
}

NudgePhaseResult NudgingPhase(Simulator& sim, std::span<const double> targets,
                              std::span<const double> free_rates,
                              const TrainerConfig& config, UpdateLog* update_log,
                              SpikeLog* spike_log) {
  const Topology& topo = sim.topology();
  const int out0 = topo.output_offset();
  const int n_out = topo.output_size();
  std::vector<double> rates(free_rates.begin(), free_rates.end());
  std::vector<double> grad = ComputeErrorGradient(rates, targets);

  StepControl control;
  control.phase = Phase::kNudge;
  control.learn = true;
  control.update_log = update_log;
  control.spike_log = spike_log;
  NudgePhaseResult result;
  for (int t = 0; t < config.hyper.t_nudge; ++t) {
    if (config.nudge_rate == NudgeRateSource::kInstantaneous) {
      for (int k = 0; k < n_out; ++k) grad[k] = sim.TrackerRate(out0 + k) - targets[k];
    }
    control.output_gradient = grad;
    const size_t before = update_log ? update_log->size() : 0;
    sim.Step(control);
    if (update_log) result.updates += static_cast<std::int64_t>(update_log->size() - before);
  }
  return result;
}

ImageOutcome PresentImage(Simulator& sim, std::span<const double> currents, int label,
                          const TrainerConfig& config, UpdateLog* update_log,
                          SpikeLog* spike_log) {
  const Topology& topo = sim.topology();
  const std::vector<std::int64_t> before = sim.layer_spikes();

  const FreePhaseResult free = FreePhase(sim, currents, config.rate_window, spike_log);
  ImageOutcome out;
  out.predicted = static_cast<int>(
      std::max_element(free.window_counts.begin(), free.window_counts.end()) -
      free.window_counts.begin());
  const std::vector<double> targets = MakeTargets(label, topo.output_size(), config);
  out.nudged = ShouldNudge(free.window_rates, targets, config);
  if (out.nudged) {
    const std::vector<double>& held = config.nudge_rate == NudgeRateSource::kFreeFinal
                                          ? free.window_rates
                                          : free.tracker_rates;
    NudgingPhase(sim, targets, held, config, update_log, spike_log);
  }

  out.layer_spikes.resize(topo.num_layers());
  for (int l = 0; l < topo.num_layers(); ++l) {
    const std::int64_t n = sim.layer_spikes()[l] - before[l];
    out.layer_spikes[l] = n;
    out.spikes += n;
    out.synops += n * topo.fan_out(topo.layer_offset(l));
  }
  return out;
}

TrainState InitialTrainState(const TrainerConfig& config) {
  config.Validate();
  TrainState s;
  s.rng.seed(config.seed);
  s.weights = WeightStore::GlorotUniform(Topology(config.layers), s.rng, config.init_scale);
  return s;
}

double ResolveMaxCurrent(const TrainerConfig& config) {
  return config.input_max_current ? *config.input_max_current
                                  : CalibrateMaxCurrent(config.hyper);
}

std::vector<EpochMetrics> Train(const Dataset& train, const Dataset& test,
                                const TrainerConfig& config, TrainState& state,
                                const TrainHooks& hooks) {
  config.Validate();
  const Topology& topo = state.weights.topology;
  if (topo.layer_sizes() != config.layers) {
    throw Error(ErrorKind::kShape, "checkpoint topology differs from the configured layers");
  }
  if (train.size() > 0 && train.pixels != topo.input_size()) {
    throw Error(ErrorKind::kShape, "image width " + std::to_string(train.pixels) +
                                       " differs from input layer " +
                                       std::to_string(topo.input_size()));
  }
  const double max_current = ResolveMaxCurrent(config);
  std::vector<EpochMetrics> rows;
  std::vector<int> order(train.size());
  const int first_epoch = state.epoch;

  while (state.epoch < config.epochs) {
    std::iota(order.begin(), order.end(), 0);
    if (config.shuffle) std::shuffle(order.begin(), order.end(), state.rng);

    Simulator sim(config.hyper, &state.weights);
    EpochMetrics m;
    m.epoch = state.epoch + 1;
    int correct = 0;
    std::int64_t spikes = 0;
    std::int64_t input_synops = 0;
    std::int64_t synops = 0;
    for (int n = 0; n < train.size(); ++n) {
      const int idx = order[n];
      const bool log = state.epoch == first_epoch && n < hooks.log_images;
      const std::vector<double> currents = EncodeImage(train.image(idx), max_current);
      const ImageOutcome o =
          PresentImage(sim, currents, train.labels[idx], config,
                       log ? hooks.update_log : nullptr, log ? hooks.spike_log : nullptr);
      correct += o.predicted == train.labels[idx];
      m.nudged_images += o.nudged;
      spikes += o.spikes;
      synops += o.synops;
      // Traffic across the input block: input spikes plus first-hidden spikes
      // travelling back down.
      input_synops += o.layer_spikes[0] * topo.layer_size(1);
      input_synops += o.layer_spikes[1] * topo.layer_size(0);
    }
    state.synops_cumulative += synops;
    ++state.epoch;

    const int n_train = std::max(train.size(), 1);
    m.train_acc = static_cast<double>(correct) / n_train;
    m.spikes_per_neuron_per_image =
        static_cast<double>(spikes) / (static_cast<double>(topo.num_neurons()) * n_train);
    m.synops_cumulative = state.synops_cumulative;
    m.input_spike_fraction = synops > 0 ? static_cast<double>(input_synops) / synops : 0.0;
    m.test_acc = test.size() > 0
                     ? EvaluateAccuracy(state.weights, config.hyper, test, max_current,
                                        config.hyper.t_free, config.rate_window)
                     : 0.0;
    rows.push_back(m);
    if (hooks.on_epoch) hooks.on_epoch(m, state);
  }
  return rows;
}

}  // namespace eqspike
