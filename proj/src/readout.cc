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

#include "eqspike/readout.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqspike/error.h"

namespace eqspike {

int RateReadout(std::span<const SpikeEvent> log, int first_output, int num_outputs,
                std::int64_t end_step, int window) {
  std::vector<int> counts(num_outputs, 0);
  const std::int64_t begin = end_step - window;
  for (const SpikeEvent& e : log) {
    if (e.step < begin || e.step >= end_step) continue;
    const int k = e.neuron - first_output;
    if (k >= 0 && k < num_outputs) ++counts[k];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::optional<FirstSpike> FirstSpikeReadout(std::span<const SpikeEvent> log,
                                            int first_output, int num_outputs,
                                            std::int64_t end_step) {
  std::optional<FirstSpike> best;
  for (const SpikeEvent& e : log) {
    if (e.step >= end_step) continue;
    const int k = e.neuron - first_output;
    if (k < 0 || k >= num_outputs) continue;
    if (!best || e.step < best->step || (e.step == best->step && k < best->label)) {
      best = FirstSpike{k, e.step};
    }
  }
  return best;
}

SpikeLog RunInference(const WeightStore& weights, const HyperParams& hyper,
                      std::span<const double> currents, int steps) {
  // The simulator never writes through the pointer without learning.
  WeightStore* frozen = const_cast<WeightStore*>(&weights);
  Simulator sim(hyper, frozen, SimulatorOptions{.track_rates = false});
  sim.ClampInputs(currents);
  SpikeLog log;
  StepControl control;
  control.spike_log = &log;
  for (int t = 0; t < steps; ++t) sim.Step(control);
  return log;
}

InferenceResult Classify(std::span<const SpikeEvent> log, const Topology& topology,
                         std::int64_t end_step, int window) {
  InferenceResult r;
  const int out0 = topology.output_offset();
  const int n_out = topology.output_size();
  r.rate_class = RateReadout(log, out0, n_out, end_step, window);
  if (const auto fs = FirstSpikeReadout(log, out0, n_out, end_step)) {
    r.first_spike_class = fs->label;
    r.first_spike_step = fs->step;
  }
  return r;
}

double EvaluateAccuracy(const WeightStore& weights, const HyperParams& hyper,
                        const Dataset& dataset, double max_current, int steps,
                        int window) {
  if (dataset.size() == 0) return 0.0;
  const Topology& topo = weights.topology;
  int correct = 0;
  for (int n = 0; n < dataset.size(); ++n) {
    const std::vector<double> currents = EncodeImage(dataset.image(n), max_current);
    const SpikeLog log = RunInference(weights, hyper, currents, steps);
    correct += RateReadout(log, topo.output_offset(), topo.output_size(), steps,
                           std::min(window, steps)) == dataset.labels[n];
  }
  return static_cast<double>(correct) / dataset.size();
}

AccuracyCurve AccuracyVsTime(const WeightStore& weights, const HyperParams& hyper,
                             const Dataset& dataset, double max_current,
                             std::span<const double> horizons, int window) {
  const Topology& topo = weights.topology;
  AccuracyCurve curve;
  std::vector<std::int64_t> horizon_steps;
  for (double h : horizons) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw Error(ErrorKind::kConfig, "horizons must be finite and >= 0");
    }
    horizon_steps.push_back(std::llround(h / hyper.f_max_per_step()));
    curve.points.push_back({.t_times_fmax = h});
  }
  const std::int64_t longest =
      horizon_steps.empty() ? 0 : *std::max_element(horizon_steps.begin(), horizon_steps.end());

  double first_step_sum = 0.0;
  double before_sum = 0.0;
  int with_output = 0;
  for (int n = 0; n < dataset.size(); ++n) {
    const int label = dataset.labels[n];
    const std::vector<double> currents = EncodeImage(dataset.image(n), max_current);
    const SpikeLog log = RunInference(weights, hyper, currents, static_cast<int>(longest));

    const auto first = FirstSpikeReadout(log, topo.output_offset(), topo.output_size());
    if (first) {
      ++with_output;
      first_step_sum += static_cast<double>(first->step);
      before_sum += static_cast<double>(std::count_if(
          log.begin(), log.end(), [&](const SpikeEvent& e) { return e.step < first->step; }));
    } else {
      ++curve.images_without_output_spike;
    }

    for (size_t h = 0; h < horizon_steps.size(); ++h) {
      const std::int64_t end = horizon_steps[h];
      const int w = static_cast<int>(std::min<std::int64_t>(window, end));
      CurvePoint& p = curve.points[h];
      p.rate_acc += RateReadout(log, topo.output_offset(), topo.output_size(), end, w) == label;
      p.first_spike_acc += first && first->step < end && first->label == label;
      double synops = 0.0;
      double spikes = 0.0;
      for (const SpikeEvent& e : log) {
        if (e.step >= end) break;
        spikes += 1.0;
        synops += topo.fan_out(e.neuron);
      }
      p.mean_spikes += spikes;
      p.mean_synops += synops;
    }
  }

  const double n = std::max(dataset.size(), 1);
  for (CurvePoint& p : curve.points) {
    p.rate_acc /= n;
    p.first_spike_acc /= n;
    p.mean_synops /= n;
    p.mean_spikes /= n;
  }
  if (with_output > 0) {
    curve.mean_first_spike_step = first_step_sum / with_output;
    curve.mean_spikes_before_first_output = before_sum / with_output;
  }
  return curve;
}

std::vector<double> ParseHorizonSweep(const std::string& spec) {
  std::istringstream in(spec);
  std::string part;
  std::vector<double> v;
  while (std::getline(in, part, ':')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad horizon sweep '" + spec + "'");
    }
  }
  if (v.size() != 3 || !(v[2] > 0.0) || v[0] < 0.0 || v[1] < v[0]) {
    throw Error(ErrorKind::kParse, "horizon sweep must be start:stop:step with step > 0");
  }
  std::vector<double> out;
  const long count = std::lround(std::floor((v[1] - v[0]) / v[2] + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
  return out;
}

}  // namespace eqspike
