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

#include "eqspike/network.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "eqspike/error.h"

namespace eqspike {

Topology::Topology(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) {
    throw Error(ErrorKind::kConfig, "topology needs at least two layers");
  }
  for (int size : sizes_) {
    if (size < 1) throw Error(ErrorKind::kConfig, "layer sizes must be >= 1");
    offsets_.push_back(offsets_.back() + size);
  }
}

int Topology::layer_of(int neuron) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), neuron);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

int Topology::fan_out(int neuron) const {
  const int layer = layer_of(neuron);
  if (layer == 0) return sizes_[1];
  int fan = sizes_[layer - 1];
  if (layer + 1 < num_layers()) fan += sizes_[layer + 1];
  return fan;
}

WeightStore WeightStore::Zeros(const Topology& topology) {
  WeightStore w;
  w.topology = topology;
  for (int l = 0; l < topology.num_blocks(); ++l) {
    w.blocks.emplace_back(topology.layer_size(l), topology.layer_size(l + 1));
  }
  w.biases.resize(topology.num_layers());
  for (int l = 1; l < topology.num_layers(); ++l) {
    w.biases[l].assign(topology.layer_size(l), 0.0);
  }
  return w;
}

WeightStore WeightStore::GlorotUniform(const Topology& topology,
                                       std::mt19937_64& rng, double scale) {
  WeightStore w = Zeros(topology);
  for (auto& block : w.blocks) {
    const double limit = scale * std::sqrt(6.0 / (block.rows() + block.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& x : block.data()) x = dist(rng);
  }
  return w;
}

namespace {

struct PairIndex {
  int block;
  int row;
  int col;
};

PairIndex LocatePair(const Topology& topology, int a, int b) {
  int la = topology.layer_of(a);
  int lb = topology.layer_of(b);
  if (la > lb) {
    std::swap(a, b);
    std::swap(la, lb);
  }
  if (lb != la + 1) {
    throw Error(ErrorKind::kShape, "neurons " + std::to_string(a) + " and " +
                                       std::to_string(b) + " are not connected");
  }
  return {la, a - topology.layer_offset(la), b - topology.layer_offset(lb)};
}

}  // namespace

double WeightStore::weight(int a, int b) const {
  const PairIndex p = LocatePair(topology, a, b);
  return blocks[p.block](p.row, p.col);
}

double& WeightStore::weight(int a, int b) {
  const PairIndex p = LocatePair(topology, a, b);
  return blocks[p.block](p.row, p.col);
}

double WeightStore::bias(int neuron) const {
  const int layer = topology.layer_of(neuron);
  if (layer == 0) return 0.0;
  return biases[layer][neuron - topology.layer_offset(layer)];
}

NetworkState::NetworkState(const Topology& topo, const HyperParams& hyper)
    : topology(topo),
      neurons(topo.num_neurons()),
      clamped_current(topo.input_size(), 0.0),
      trackers(topo.num_neurons(), RateTracker(hyper.tau, hyper.n_filt)) {}

void NetworkState::Reset() {
  std::fill(neurons.begin(), neurons.end(), NeuronState{});
  for (auto& tracker : trackers) tracker.Reset();
}

std::vector<double> NetworkState::potentials() const {
  std::vector<double> u(neurons.size());
  std::transform(neurons.begin(), neurons.end(), u.begin(),
                 [](const NeuronState& n) { return n.u; });
  return u;
}

void ClampInputs(NetworkState& network, std::span<const double> image_currents) {
  if (image_currents.size() != network.clamped_current.size()) {
    throw Error(ErrorKind::kShape,
                "expected " + std::to_string(network.clamped_current.size()) +
                    " input currents, got " + std::to_string(image_currents.size()));
  }
  for (double c : image_currents) {
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(ErrorKind::kNumericFault, "input currents must be finite and >= 0");
    }
  }
  std::copy(image_currents.begin(), image_currents.end(),
            network.clamped_current.begin());
}

void NudgeOutputs(NetworkState& network, std::span<const double> grad, double beta) {
  const Topology& topo = network.topology;
  if (static_cast<int>(grad.size()) != topo.output_size()) {
    throw Error(ErrorKind::kShape, "nudge gradient must have one entry per output");
  }
  const int out = topo.output_offset();
  for (int k = 0; k < topo.output_size(); ++k) {
    network.neurons[out + k].u -= beta * grad[k];
  }
}

double GatherCurrent(const WeightStore& weights, const NetworkState& network,
                     std::span<const int> spikes, int neuron) {
  const Topology& topo = weights.topology;
  const int layer = topo.layer_of(neuron);
  if (layer == 0) return network.clamped_current[neuron];
  const int local = neuron - topo.layer_offset(layer);
  double current = weights.biases[layer][local];
  for (int k : spikes) {
    const int lk = topo.layer_of(k);
    const int k_local = k - topo.layer_offset(lk);
    if (lk == layer - 1) {
      current += weights.blocks[lk](k_local, local);
    } else if (lk == layer + 1) {
      current += weights.blocks[layer](local, k_local);
    }
  }
  return current;
}

double Energy(const WeightStore& weights, std::span<const double> u) {
  const Topology& topo = weights.topology;
  if (static_cast<int>(u.size()) != topo.num_neurons()) {
    throw Error(ErrorKind::kShape, "energy needs one potential per neuron");
  }
  double quadratic = 0.0;
  for (double x : u) quadratic += x * x;
  double pairwise = 0.0;
  for (int l = 0; l < topo.num_blocks(); ++l) {
    const Matrix& w = weights.blocks[l];
    const int lo = topo.layer_offset(l);
    const int hi = topo.layer_offset(l + 1);
    for (int i = 0; i < w.rows(); ++i) {
      const double ri = HardSigmoid(u[lo + i]);
      if (ri == 0.0) continue;
      for (int j = 0; j < w.cols(); ++j) {
        pairwise += w(i, j) * ri * HardSigmoid(u[hi + j]);
      }
    }
  }
  double bias_term = 0.0;
  for (int l = 1; l < topo.num_layers(); ++l) {
    const int off = topo.layer_offset(l);
    for (int j = 0; j < topo.layer_size(l); ++j) {
      bias_term += weights.biases[l][j] * HardSigmoid(u[off + j]);
    }
  }
  return 0.5 * quadratic - pairwise - bias_term;
}

double Energy(const NetworkState& state, const WeightStore& weights) {
  const std::vector<double> u = state.potentials();
  return Energy(weights, u);
}

Simulator::Simulator(const HyperParams& hyper, WeightStore* weights,
                     SimulatorOptions options)
    : hyper_(hyper),
      weights_(weights),
      options_(options),
      state_(weights->topology, hyper),
      current_(weights->topology.num_neurons(), 0.0),
      signal_(weights->topology.num_neurons(), 0.0),
      layer_spikes_(weights->topology.num_layers(), 0) {
  hyper_.Validate();
  spikes_.reserve(state_.topology.num_neurons());
}

void Simulator::Reset() {
  state_.Reset();
  spikes_.clear();
  std::fill(signal_.begin(), signal_.end(), 0.0);
  local_step_ = 0;
}

void Simulator::ClampInputs(std::span<const double> currents) {
  eqspike::ClampInputs(state_, currents);
  active_inputs_.clear();
  for (int i = 0; i < static_cast<int>(currents.size()); ++i) {
    if (currents[i] > 0.0) active_inputs_.push_back(i);
  }
}

double Simulator::TrackerRate(int neuron) const {
  return state_.trackers[neuron].rate(hyper_.gamma_li);
}

void Simulator::Propagate() {
  const Topology& topo = state_.topology;
  std::copy(state_.clamped_current.begin(), state_.clamped_current.end(),
            current_.begin());
  for (int l = 1; l < topo.num_layers(); ++l) {
    std::copy(weights_->biases[l].begin(), weights_->biases[l].end(),
              current_.begin() + topo.layer_offset(l));
  }
  // Spikes of the previous step arrive now through the shared weights.
  for (int k : spikes_) {
    const int layer = topo.layer_of(k);
    const int local = k - topo.layer_offset(layer);
    if (layer + 1 < topo.num_layers()) {
      const auto row = weights_->blocks[layer].row(local);
      double* dst = current_.data() + topo.layer_offset(layer + 1);
      for (size_t j = 0; j < row.size(); ++j) dst[j] += row[j];
    }
    if (layer >= 2) {
      const Matrix& w = weights_->blocks[layer - 1];
      double* dst = current_.data() + topo.layer_offset(layer - 1);
      for (int i = 0; i < w.rows(); ++i) dst[i] += w(i, local);
    }
    // Layer-1 spikes reach the input layer, which ignores them.
  }
}

std::span<const int> Simulator::Step(const StepControl& control) {
  const Topology& topo = state_.topology;
  Propagate();
  spikes_.clear();

  if (!control.output_gradient.empty()) {
    NudgeOutputs(state_, control.output_gradient, hyper_.beta);
  }

  const double keep = 1.0 - hyper_.gamma_lif;
  const int refract_reset = hyper_.t_refract - 1;
  const int n = topo.num_neurons();
  for (int i = 0; i < n; ++i) {
    NeuronState& s = state_.neurons[i];
    if (AdvanceMembrane(s, current_[i], keep, hyper_.u_th, refract_reset)) {
      spikes_.push_back(i);
    }
    if (!std::isfinite(s.u)) {
      throw Error(ErrorKind::kNumericFault,
                  "membrane of neuron " + std::to_string(i) + " is not finite");
    }
  }

  if (options_.track_rates) {
    // spikes_ is sorted, so a single cursor marks the spiking neurons.
    size_t cursor = 0;
    for (int i = 0; i < n; ++i) {
      const bool spiked = cursor < spikes_.size() && spikes_[cursor] == i;
      cursor += spiked;
      RateTracker& tracker = state_.trackers[i];
      tracker.Advance(spiked, hyper_.gamma_li);
      signal_[i] = hyper_.eta_r * tracker.smoothed();
    }
  }

  if (control.learn) ApplyUpdates(control);

  if (control.spike_log != nullptr) {
    for (int i : spikes_) control.spike_log->push_back({clock_, i});
  }
  spike_count_ += static_cast<std::int64_t>(spikes_.size());
  for (int i : spikes_) ++layer_spikes_[topo.layer_of(i)];
  ++local_step_;
  ++clock_;
  return spikes_;
}

void Simulator::ApplyUpdates(const StepControl& control) {
  const Topology& topo = state_.topology;
  UpdateLog* log = control.update_log;
  auto record = [&](int block, int pre, int post, int trigger, double dw) {
    log->push_back({clock_, block, pre, post, trigger, dw, control.phase});
  };

  for (int k : spikes_) {
    const int layer = topo.layer_of(k);
    const int local = k - topo.layer_offset(layer);
    // k is the upper neuron of block layer-1: w_ik += eta_r * rhobar_i.
    if (layer >= 1) {
      Matrix& w = weights_->blocks[layer - 1];
      const int lo = topo.layer_offset(layer - 1);
      auto update = [&](int i) {
        const double dw = signal_[lo + i];
        if (dw == 0.0) return;
        w(i, local) += dw;
        if (log) record(layer - 1, lo + i, k, k, dw);
      };
      if (layer == 1) {
        for (int i : active_inputs_) update(i);
      } else {
        for (int i = 0; i < w.rows(); ++i) update(i);
      }
    }
    // k is the lower neuron of block layer: w_kj += eta_r * rhobar_j.
    if (layer + 1 < topo.num_layers()) {
      auto row = weights_->blocks[layer].row(local);
      const int hi = topo.layer_offset(layer + 1);
      for (size_t j = 0; j < row.size(); ++j) {
        const double dw = signal_[hi + j];
        if (dw == 0.0) continue;
        row[j] += dw;
        if (log) record(layer, k, hi + static_cast<int>(j), k, dw);
      }
    }
  }

  // Biases behave as weights from an always-active unit that emits one
  // pseudo-spike per step.
  for (int l = 1; l < topo.num_layers(); ++l) {
    const int off = topo.layer_offset(l);
    auto& b = weights_->biases[l];
    for (size_t j = 0; j < b.size(); ++j) {
      const double db = signal_[off + j];
      if (db == 0.0) continue;
      b[j] += db;
      if (log) record(l - 1, -1, off + static_cast<int>(j), -1, db);
    }
  }
}

}  // namespace eqspike
