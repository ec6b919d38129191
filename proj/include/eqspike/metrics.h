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

#ifndef EQSPIKE_METRICS_H_
#define EQSPIKE_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "eqspike/network.h"
#include "eqspike/params.h"

namespace eqspike {

struct EnergyModel {
  double pj_per_synop = 10.0;
};

// Sum over spikes of the spiking neuron's fan-out (Topology::fan_out).
std::int64_t CountSynops(std::span<const SpikeEvent> log, const Topology& topology);

// synops * pj_per_synop, in joules. Throws Error(kConfig) for a non-positive
// model.
double EnergyEstimate(std::int64_t synops, const EnergyModel& model = {});

struct SpikeStats {
  std::int64_t spikes = 0;
  std::int64_t synops = 0;
  double spikes_per_neuron_per_image = 0.0;
  double input_layer_spike_fraction = 0.0;
  // SynOps crossing the input block (input spikes into layer 1 and layer-1
  // spikes back towards the inputs) over all SynOps.
  double input_block_synop_fraction = 0.0;
};

// Throws Error(kConfig) when n_images < 1.
SpikeStats ComputeSpikeStats(std::span<const SpikeEvent> log, const Topology& topology,
                             int n_images);

struct StdpBin {
  double dt_center = 0.0;  // steps
  double mean_delta_w = 0.0;
  std::int64_t count = 0;
};

struct StdpCurve {
  std::vector<StdpBin> bins;
  int window = 200;
  double rate_floor = 0.05;
  double beta_used = 0.0;
};

struct StdpOptions {
  int window = 200;          // steps on each side of the update
  double rate_floor = 0.05;  // fraction of f_max
  int num_bins = 20;         // uniform over [-window, window]
  int block = 0;
  double beta_used = 0.0;    // recorded in the curve only
};

// Every weight update of `block` triggered by a spike of its lower (pre)
// neuron at t_pre is paired with dt = mean(t_post) - t_pre over the spikes of
// its upper (post) neuron in [t_pre - window, t_pre + window]. Updates whose
// pre neuron fires below rate_floor * f_max over that interval, or whose post
// neuron is silent in it, are dropped. Bins average delta_w per dt. Empty logs
// give a curve with zero counts.
StdpCurve ComputeStdpCurve(std::span<const SpikeEvent> spike_log,
                           std::span<const UpdateEvent> update_log,
                           const Topology& topology, const HyperParams& hyper,
                           const StdpOptions& options = {});

// Controlled two-neuron pairing: one clamped pre neuron with a steady current
// drives one post (output) neuron. Accelerating: the post starts silent and is
// nudged towards f_max. Decelerating: a strong bias makes it fire fast and it
// is nudged towards silence. hyper.beta sets the nudge strength.
struct StdpProtocol {
  bool accelerate = true;
  HyperParams hyper;
  double pre_current = 0.2;  // per step
  double weight = 0.02;
  double fast_bias = 0.3;    // post bias of the decelerating run
  // Free-running steps recorded after the nudge so late updates have a full
  // analysis window.
  int tail_steps = 200;
};

struct ProtocolLogs {
  Topology topology;
  SpikeLog spikes;
  UpdateLog updates;
};

// Runs the free and nudging phase of StdpProtocol, recording both logs.
ProtocolLogs RunStdpProtocol(const StdpProtocol& protocol);

}  // namespace eqspike

#endif  // EQSPIKE_METRICS_H_
