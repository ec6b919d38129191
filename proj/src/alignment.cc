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

#include "eqspike/alignment.h"

#include <algorithm>

#include "eqspike/neuron.h"
#include "eqspike/trainer.h"

namespace eqspike {

HyperParams AlignmentConfig::DefaultAlignmentHyper() {
  HyperParams h;
  h.gamma_lif = 0.002;
  h.n_filt = 240;
  h.t_free = 1000;
  h.t_nudge = 600;
  h.beta = 2.0;
  return h;
}

namespace {

RelaxOptions FreeOptions(const AlignmentConfig& config) {
  RelaxOptions o;
  o.tolerance = config.relax_tolerance;
  return o;
}

// Maps an oracle instance to spiking units. An oracle rate r is a spiking rate
// R r with R = rate_unit * f_max. A leaky neuron driven by a constant current I
// fires at about I / u_th - gamma_lif / 2 spikes/step well below f_max, so
// oracle drive u corresponds to I = u_th (R u + gamma_lif / 2).
WeightStore SpikingEquivalent(const WeightStore& rate, const AlignmentConfig& config) {
  const HyperParams& h = config.hyper;
  const double unit = config.rate_unit * h.f_max_per_step();
  WeightStore w = rate;
  for (Matrix& m : w.blocks) {
    for (double& x : m.data()) x *= h.u_th;
  }
  for (size_t l = 1; l < w.biases.size(); ++l) {
    for (double& x : w.biases[l]) x = h.u_th * (unit * x + 0.5 * h.gamma_lif);
  }
  return w;
}

}  // namespace

UpdateComparison CheckOracleSoundness(const AlignmentConfig& config, std::uint64_t seed) {
  const Topology topo(config.layers);
  const OracleInstance inst =
      RandomInstance(topo, seed, config.weight_scale, config.bias_max);
  const RelaxOptions free = FreeOptions(config);
  const RelaxResult f = Relax(inst.weights, inst.inputs, free);
  RelaxOptions nudge = free;
  nudge.beta = config.oracle_beta;
  nudge.targets = inst.targets;
  const RelaxResult n = Relax(inst.weights, inst.inputs, nudge, &f.state);
  const WeightDelta two_point = TwoPointUpdate(topo, f.state.rho(), n.state.rho(), nudge.beta);
  const WeightDelta fd =
      FiniteDiffGradient(inst.weights, inst.inputs, inst.targets, config.fd_epsilon, free);
  return CompareUpdates(two_point, Scaled(fd, -1.0), config.noise_floor);
}

AlignmentResult CheckAlignment(const AlignmentConfig& config, std::uint64_t seed) {
  const Topology topo(config.layers);
  const HyperParams& hyper = config.hyper;
  const double fmax = hyper.f_max_per_step();
  const OracleInstance inst =
      RandomInstance(topo, seed, config.weight_scale, config.bias_max);

  AlignmentResult result;
  result.seed = seed;
  result.oracle_vs_fd = CheckOracleSoundness(config, seed);

  // Spiking run: inputs fire at the instance's rates, targets in spikes/step.
  // Constant currents only realise rates 1/n, so the oracle is fed the rates
  // the inputs actually reach.
  const double unit = config.rate_unit * fmax;
  std::vector<double> currents(inst.inputs.size());
  std::vector<double> realised(inst.inputs.size());
  for (size_t i = 0; i < currents.size(); ++i) {
    currents[i] = InverseFiCurve(hyper, inst.inputs[i] * unit, hyper.t_free);
    realised[i] = std::min(1.0, FiCurve(hyper, currents[i], hyper.t_free) / unit);
  }
  std::vector<double> targets(inst.targets.size());
  for (size_t k = 0; k < targets.size(); ++k) targets[k] = inst.targets[k] * unit;

  WeightStore weights = SpikingEquivalent(inst.weights, config);
  const WeightStore before = weights;
  TrainerConfig tc;
  tc.hyper = hyper;
  tc.layers = config.layers;
  Simulator sim(hyper, &weights);
  const FreePhaseResult free = FreePhase(sim, currents, hyper.t_free / 4);
  NudgingPhase(sim, targets, free.tracker_rates, tc);

  // Oracle at the nudge strength the spiking outputs felt, in rate units.
  const RelaxOptions free_opts = FreeOptions(config);
  const RelaxResult f = Relax(inst.weights, realised, free_opts);
  RelaxOptions nudge = free_opts;
  nudge.beta = hyper.beta / hyper.u_th;

  // The accumulated spiking change approximates l_r R^2 beta_o times the
  // normalised two-point update; dividing it out puts both on one scale.
  const double scale = 1.0 / (hyper.learning_rate() * unit * unit * nudge.beta);
  WeightDelta spiking = WeightStore::Zeros(topo);
  for (int b = 0; b < topo.num_blocks(); ++b) {
    auto out = spiking.blocks[b].data();
    for (size_t k = 0; k < out.size(); ++k) {
      out[k] = scale * (weights.blocks[b].data()[k] - before.blocks[b].data()[k]);
    }
  }
  nudge.targets = inst.targets;
  const RelaxResult n = Relax(inst.weights, realised, nudge, &f.state);
  const WeightDelta oracle = TwoPointUpdate(topo, f.state.rho(), n.state.rho(), nudge.beta);

  for (int b = 0; b < topo.num_blocks(); ++b) {
    result.spiking_vs_oracle.push_back(CompareBlock(spiking, oracle, b, config.noise_floor));
  }
  return result;
}

}  // namespace eqspike
