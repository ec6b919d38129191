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

#ifndef EQSPIKE_NETWORK_H_
#define EQSPIKE_NETWORK_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eqspike/neuron.h"
#include "eqspike/params.h"
#include "eqspike/rate_tracker.h"

namespace eqspike {

// Layered, fully connected between adjacent layers only. Layer 0 is the
// clamped input layer and the last layer is the output layer. Neurons are
// addressed globally by concatenating the layers in order.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<int> layer_sizes);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(sizes_.size()); }
  int num_blocks() const { return num_layers() - 1; }
  int layer_size(int layer) const { return sizes_[layer]; }
  int layer_offset(int layer) const { return offsets_[layer]; }
  int num_neurons() const { return offsets_.back(); }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int output_offset() const { return offsets_[num_layers() - 1]; }
  int layer_of(int neuron) const;
  bool is_input(int neuron) const { return neuron < sizes_.front(); }

  // Synapses a spike of `neuron` traverses: an input spike only reaches the
  // first hidden layer, any other neuron's spike traverses both incident
  // blocks.
  int fan_out(int neuron) const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_{0};
};

// Dense row-major matrix; rows index the lower layer, columns the upper one.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, value) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  std::span<double> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const double> row(int r) const { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Symmetric synaptic weights and biases. blocks[l] couples layer l (rows) and
// layer l + 1 (columns); the same entry scales spikes in both directions.
// biases[l] has one entry per neuron of layer l and is empty for l = 0.
struct WeightStore {
  Topology topology;
  std::vector<Matrix> blocks;
  std::vector<std::vector<double>> biases;

  static WeightStore Zeros(const Topology& topology);
  // Uniform in +-scale * sqrt(6 / (fan_in + fan_out)) per block; zero biases.
  static WeightStore GlorotUniform(const Topology& topology, std::mt19937_64& rng,
                                   double scale = 1.0);

  // Weight between two neurons of adjacent layers (global indices, any order).
  double weight(int a, int b) const;
  double& weight(int a, int b);
  double bias(int neuron) const;

  friend bool operator==(const WeightStore&, const WeightStore&) = default;
};

// Dynamic state of every neuron in the network.
struct NetworkState {
  Topology topology;
  std::vector<NeuronState> neurons;
  std::vector<double> clamped_current;  // one per input neuron
  std::vector<RateTracker> trackers;

  NetworkState(const Topology& topology, const HyperParams& hyper);

  void Reset();
  std::vector<double> potentials() const;
};

// Copies `image_currents` into the input neurons. Throws Error(kShape) on a
// width mismatch and Error(kNumericFault) on negative or non-finite currents.
void ClampInputs(NetworkState& network, std::span<const double> image_currents);

// Current delivered to `neuron` this step by the spikes of the previous step
// (`spikes`, global indices) plus its bias. Input neurons ignore recurrent
// activity and receive their clamped current.
double GatherCurrent(const WeightStore& weights, const NetworkState& network,
                     std::span<const int> spikes, int neuron);

// u_o <- u_o - beta * grad_o on every output membrane, refractory or not.
// Throws Error(kShape) unless grad has one entry per output neuron.
void NudgeOutputs(NetworkState& network, std::span<const double> grad, double beta);

// Hard sigmoid clamp(u, 0, 1).
inline double HardSigmoid(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

// Hopfield energy
//   E(u) = 1/2 sum_i u_i^2 - sum_{connected pairs} W_ij rho(u_i) rho(u_j)
//          - sum_i b_i rho(u_i)
// over all neurons (inputs included) given one potential per neuron.
double Energy(const WeightStore& weights, std::span<const double> u);
double Energy(const NetworkState& state, const WeightStore& weights);

enum class Phase : std::uint8_t { kFree = 0, kNudge = 1 };

struct SpikeEvent {
  std::int64_t step = 0;
  int neuron = 0;
  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

using SpikeLog = std::vector<SpikeEvent>;

// One per-spike synaptic update. For weights, `pre` is the lower-layer neuron
// and `post` the upper-layer neuron of block `block`. Bias updates use
// pre = -1, block = layer of `post` - 1 and trigger = -1 (the always-active
// pseudo-neuron).
struct UpdateEvent {
  std::int64_t step = 0;
  int block = 0;
  int pre = 0;
  int post = 0;
  int trigger = 0;
  double delta_w = 0.0;
  Phase phase = Phase::kNudge;
  friend bool operator==(const UpdateEvent&, const UpdateEvent&) = default;
};

using UpdateLog = std::vector<UpdateEvent>;

struct SimulatorOptions {
  // Rate trackers cost as much as the membranes; pure inference can skip them.
  bool track_rates = true;
};

// What the simulator should do in one step.
struct StepControl {
  Phase phase = Phase::kFree;
  // Per-output error gradient d(e)/d(rate); empty disables nudging.
  std::span<const double> output_gradient;
  // Apply the spike-gated weight/bias updates this step.
  bool learn = false;
  SpikeLog* spike_log = nullptr;
  UpdateLog* update_log = nullptr;
};

// Event-driven, fixed-step simulator of one network. Weights are borrowed and
// mutated in place when learning is enabled. Not thread-safe; independent
// simulations should each own a Simulator.
class Simulator {
 public:
  Simulator(const HyperParams& hyper, WeightStore* weights,
            SimulatorOptions options = {});

  // Clears membranes, refractory counters, trackers and in-flight spikes.
  // The global clock keeps running so logs across images stay ordered.
  void Reset();
  void ClampInputs(std::span<const double> currents);

  // Advances one step and returns the neurons that spiked in it.
  std::span<const int> Step(const StepControl& control);

  const NetworkState& state() const { return state_; }
  NetworkState& mutable_state() { return state_; }
  const HyperParams& hyper() const { return hyper_; }
  const Topology& topology() const { return state_.topology; }
  const WeightStore& weights() const { return *weights_; }

  // Steps since the last Reset() and since construction.
  int local_step() const { return local_step_; }
  std::int64_t clock() const { return clock_; }

  // v_li * gamma_li of a neuron's tracker.
  double TrackerRate(int neuron) const;
  // eta_r-scaled smoothed derivative signal of the current step.
  double UpdateSignal(int neuron) const { return signal_[neuron]; }
  std::int64_t spike_count() const { return spike_count_; }
  // Spikes emitted per layer since construction.
  const std::vector<std::int64_t>& layer_spikes() const { return layer_spikes_; }

 private:
  void Propagate();
  void ApplyUpdates(const StepControl& control);

  HyperParams hyper_;
  WeightStore* weights_;
  SimulatorOptions options_;
  NetworkState state_;
  std::vector<double> current_;
  std::vector<double> signal_;        // eta_r * smoothed, per neuron
  std::vector<int> spikes_;           // emitted this step
  std::vector<int> active_inputs_;    // inputs with non-zero clamped current
  int local_step_ = 0;
  std::int64_t clock_ = 0;
  std::int64_t spike_count_ = 0;
  std::vector<std::int64_t> layer_spikes_;
};

}  // namespace eqspike

#endif  // EQSPIKE_NETWORK_H_
