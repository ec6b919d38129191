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

#include "eqspike/metrics.h"

#include <algorithm>
#include <cmath>

#include "eqspike/error.h"
#include "eqspike/trainer.h"

namespace eqspike {

std::int64_t CountSynops(std::span<const SpikeEvent> log, const Topology& topology) {
  std::int64_t total = 0;
  for (const SpikeEvent& e : log) total += topology.fan_out(e.neuron);
  return total;
}

double EnergyEstimate(std::int64_t synops, const EnergyModel& model) {
  if (!(model.pj_per_synop > 0.0)) throw Error(ErrorKind::kConfig, "pj_per_synop must be > 0");
  return static_cast<double>(synops) * model.pj_per_synop / 1e12;
}

SpikeStats ComputeSpikeStats(std::span<const SpikeEvent> log, const Topology& topology,
                             int n_images) {
  if (n_images < 1) throw Error(ErrorKind::kConfig, "n_images must be >= 1");
  SpikeStats s;
  std::int64_t input_spikes = 0;
  std::int64_t input_block = 0;
  for (const SpikeEvent& e : log) {
    ++s.spikes;
    s.synops += topology.fan_out(e.neuron);
    const int layer = topology.layer_of(e.neuron);
    if (layer == 0) {
      ++input_spikes;
      input_block += topology.layer_size(1);
    } else if (layer == 1) {
      input_block += topology.layer_size(0);
    }
  }
  s.spikes_per_neuron_per_image =
      static_cast<double>(s.spikes) / (static_cast<double>(topology.num_neurons()) * n_images);
  if (s.spikes > 0) s.input_layer_spike_fraction = static_cast<double>(input_spikes) / s.spikes;
  if (s.synops > 0) s.input_block_synop_fraction = static_cast<double>(input_block) / s.synops;
  return s;
}

StdpCurve ComputeStdpCurve(std::span<const SpikeEvent> spike_log,
                           std::span<const UpdateEvent> update_log,
                           const Topology& topology, const HyperParams& hyper,
                           const StdpOptions& options) {
  if (options.window < 1 || options.num_bins < 1) {
    throw Error(ErrorKind::kConfig, "STDP window and bin count must be >= 1");
  }
  if (options.block < 0 || options.block >= topology.num_blocks()) {
    throw Error(ErrorKind::kShape, "no block " + std::to_string(options.block));
  }
  StdpCurve curve;
  curve.window = options.window;
  curve.rate_floor = options.rate_floor;
  curve.beta_used = options.beta_used;
  const double w = options.window;
  const double bin_width = 2.0 * w / options.num_bins;
  std::vector<double> sums(options.num_bins, 0.0);
  curve.bins.resize(options.num_bins);
  for (int b = 0; b < options.num_bins; ++b) curve.bins[b].dt_center = -w + (b + 0.5) * bin_width;
  if (spike_log.empty()) return curve;

  std::vector<std::vector<std::int64_t>> times(topology.num_neurons());
  std::int64_t first = spike_log.front().step;
  std::int64_t last = spike_log.front().step;
  for (const SpikeEvent& e : spike_log) {
    times[e.neuron].push_back(e.step);
    first = std::min(first, e.step);
    last = std::max(last, e.step);
  }
  for (auto& t : times) std::sort(t.begin(), t.end());

  const double min_count = options.rate_floor * hyper.f_max_per_step() * (2.0 * w + 1.0);
  for (const UpdateEvent& u : update_log) {
    if (u.block != options.block || u.pre < 0 || u.trigger != u.pre) continue;
    const std::int64_t lo = u.step - options.window;
    const std::int64_t hi = u.step + options.window;
    // Intervals cut by the ends of the recording would bias dt.
    if (lo < first || hi > last) continue;
    const auto& pre = times[u.pre];
    const auto pre_n = std::upper_bound(pre.begin(), pre.end(), hi) -
                       std::lower_bound(pre.begin(), pre.end(), lo);
    if (static_cast<double>(pre_n) < min_count) continue;
    const auto& post = times[u.post];
    const auto b = std::lower_bound(post.begin(), post.end(), lo);
    const auto e = std::upper_bound(post.begin(), post.end(), hi);
    if (b == e) continue;
    double mean = 0.0;
    for (auto it = b; it != e; ++it) mean += static_cast<double>(*it);
    mean /= static_cast<double>(e - b);
    const double dt = mean - static_cast<double>(u.step);
    const int bin = std::clamp(static_cast<int>(std::floor((dt + w) / bin_width)), 0,
                               options.num_bins - 1);
    sums[bin] += u.delta_w;
    ++curve.bins[bin].count;
  }
  for (int b = 0; b < options.num_bins; ++b) {
    if (curve.bins[b].count > 0) curve.bins[b].mean_delta_w = sums[b] / curve.bins[b].count;
  }
  return curve;
}

ProtocolLogs RunStdpProtocol(const StdpProtocol& protocol) {
  const HyperParams& h = protocol.hyper;
  ProtocolLogs logs;
  logs.topology = Topology({1, 1});
  WeightStore weights = WeightStore::Zeros(logs.topology);
  weights.blocks[0](0, 0) = protocol.weight;
  weights.biases[1][0] = protocol.accelerate ? 0.0 : protocol.fast_bias;

  TrainerConfig config;
  config.hyper = h;
  config.layers = {1, 1};
  const double target = protocol.accelerate ? h.f_max_per_step() : 0.0;
  const std::vector<double> current = {protocol.pre_current};
  const std::vector<double> targets = {target};
  Simulator sim(h, &weights);
  const FreePhaseResult free = FreePhase(sim, current, h.t_free, &logs.spikes);
  NudgingPhase(sim, targets, free.tracker_rates, config, &logs.updates, &logs.spikes);
  StepControl tail;
  tail.spike_log = &logs.spikes;
  for (int t = 0; t < protocol.tail_steps; ++t) sim.Step(tail);
  return logs;
}

}  // namespace eqspike
