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

// Rate-based equilibrium propagation on the same layered topology, used as a
// reference for the spiking updates.

#ifndef EQSPIKE_ORACLE_H_
#define EQSPIKE_ORACLE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "eqspike/network.h"
#include "eqspike/params.h"

namespace eqspike {

// Continuous potentials, one per neuron (inputs included). Rates are the hard
// sigmoid of the potentials.
struct RateNetworkState {
  std::vector<double> u;

  std::vector<double> rho() const;
  std::vector<double> output_rates(const Topology& topology) const;
};

struct RelaxOptions {
  double beta = 0.0;                   // 0 is the free phase
  std::span<const double> targets;     // one per output, needed when beta > 0
  double step_size = 0.1;
  int max_steps = 200000;
  double tolerance = 1e-7;             // stop once max |delta u| falls below
  double divergence_bound = 1e6;
  // Called with the state after every Euler step.
  std::function<void(const RateNetworkState&)> on_step;
};

struct RelaxResult {
  RateNetworkState state;
  int steps = 0;
  bool converged = false;  // false means the step cap was hit
};

// Projected Euler integration of du/dt = -dE/du (+ beta (target - rho) on the
// outputs) with u kept in [0, 1], so rho(u) = u along the trajectory. Inputs are
// clamped to `inputs` (in [0, 1]). Starts from `start` when given, else from
// u = 0 with clamped inputs. Throws Error(kInstability) if any |u| exceeds the
// divergence bound or becomes non-finite.
RelaxResult Relax(const WeightStore& weights, std::span<const double> inputs,
                  const RelaxOptions& options,
                  const RateNetworkState* start = nullptr);

// dE/du with the hard sigmoid taken as identity inside the box, and its
// projection onto the feasible directions of [0, 1]. Input entries are 0.
std::vector<double> EnergyGradient(const WeightStore& weights, const RateNetworkState& s);
std::vector<double> ProjectedGradient(const WeightStore& weights, const RateNetworkState& s);

// Updates share the WeightStore layout: one matrix per block plus biases.
using WeightDelta = WeightStore;

// (1/beta) (rho_i rho_j|nudge - rho_i rho_j|free) per connected pair; biases
// use a pre-rate of 1. Throws Error(kDivision) when beta == 0.
WeightDelta TwoPointUpdate(const Topology& topology, std::span<const double> rho_free,
                           std::span<const double> rho_nudge, double beta);

// Accumulates (1/beta) (rho_i d rho_j + rho_j d rho_i) over consecutive states
// of a nudging trajectory that starts at the free fixed point.
class ContinualUpdateTrace {
 public:
  ContinualUpdateTrace(const Topology& topology, double beta,
                       std::span<const double> rho_start);
  void Observe(std::span<const double> rho);
  const WeightDelta& total() const { return total_; }

 private:
  WeightDelta total_;
  double inv_beta_;
  std::vector<double> last_;
};

// Nudged relaxation from the free fixed point with the continual trace
// recorded along the way.
WeightDelta ContinualUpdate(const WeightStore& weights, std::span<const double> inputs,
                            const RateNetworkState& free_state,
                            const RelaxOptions& nudge_options);

// L = 1/2 sum_o (rho_o - target_o)^2 at the free fixed point.
double FixedPointLoss(const WeightStore& weights, std::span<const double> inputs,
                      std::span<const double> targets, const RelaxOptions& free_options,
                      const RateNetworkState* start = nullptr);

// Central differences of FixedPointLoss with respect to every weight and bias.
// Each perturbed relaxation warm-starts from the unperturbed fixed point.
WeightDelta FiniteDiffGradient(const WeightStore& weights, std::span<const double> inputs,
                               std::span<const double> targets, double epsilon,
                               const RelaxOptions& free_options);

struct UpdateComparison {
  std::optional<double> cosine;          // undefined if either side is zero
  std::optional<double> sign_agreement;  // undefined if no entry passes the floor
  std::optional<double> scale_ratio;     // |a| / |b|, undefined if |b| == 0
  int sign_compared = 0;
};

UpdateComparison CompareUpdates(std::span<const double> a, std::span<const double> b,
                                double noise_floor = 1e-6);
// Flattens every block and bias vector.
UpdateComparison CompareUpdates(const WeightDelta& a, const WeightDelta& b,
                                double noise_floor = 1e-6);
// Only block `block` of each.
UpdateComparison CompareBlock(const WeightDelta& a, const WeightDelta& b, int block,
                              double noise_floor = 1e-6);

std::vector<double> Flatten(const WeightDelta& d);
WeightDelta Scaled(const WeightDelta& d, double factor);

// A random small problem whose free fixed point keeps every output inside
// (0.1, 0.9) and at least half of the hidden neurons off the bounds.
struct OracleInstance {
  WeightStore weights;
  std::vector<double> inputs;   // in [0, 1]
  std::vector<double> targets;  // in [0, 1]
};

// Deterministic in `seed`. Weights are Glorot-uniform times `weight_scale`,
// biases uniform in [0, bias_max]. Throws Error(kInstability) if no accepted
// draw is found within 10000 attempts.
OracleInstance RandomInstance(const Topology& topology, std::uint64_t seed,
                              double weight_scale = 1.0, double bias_max = 0.5);

// Maps spiking weights to the equivalent rate network in units where rates are
// fractions of f_max and potentials fractions of u_th:
//   w = W f_max / u_th,  b = b / u_th.
WeightStore RateEquivalent(const WeightStore& spiking, const HyperParams& hyper);

}  // namespace eqspike

#endif  // EQSPIKE_ORACLE_H_
