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

#include "eqspike/oracle.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "eqspike/error.h"

namespace eqspike {

namespace {

void CheckInputs(const Topology& topo, std::span<const double> inputs) {
  if (static_cast<int>(inputs.size()) != topo.input_size()) {
    throw Error(ErrorKind::kShape, "expected " + std::to_string(topo.input_size()) +
                                       " inputs, got " + std::to_string(inputs.size()));
  }
}

// Net drive sum_j W_ij rho_j + b_i of every non-input neuron.
std::vector<double> Drive(const WeightStore& w, std::span<const double> rho) {
  const Topology& topo = w.topology;
  std::vector<double> d(topo.num_neurons(), 0.0);
  for (int l = 1; l < topo.num_layers(); ++l) {
    const int off = topo.layer_offset(l);
    for (int j = 0; j < topo.layer_size(l); ++j) d[off + j] = w.biases[l][j];
  }
  for (int b = 0; b < topo.num_blocks(); ++b) {
    const Matrix& m = w.blocks[b];
    const int lo = topo.layer_offset(b);
    const int hi = topo.layer_offset(b + 1);
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (b > 0) d[lo + i] += m(i, j) * rho[hi + j];
        d[hi + j] += m(i, j) * rho[lo + i];
      }
    }
  }
  return d;
}

}  // namespace

std::vector<double> RateNetworkState::rho() const {
  std::vector<double> r(u.size());
  std::transform(u.begin(), u.end(), r.begin(), HardSigmoid);
  return r;
}

std::vector<double> RateNetworkState::output_rates(const Topology& topology) const {
  std::vector<double> r(topology.output_size());
  for (int k = 0; k < topology.output_size(); ++k) {
    r[k] = HardSigmoid(u[topology.output_offset() + k]);
  }
  return r;
}

std::vector<double> EnergyGradient(const WeightStore& weights, const RateNetworkState& s) {
  const Topology& topo = weights.topology;
  const std::vector<double> rho = s.rho();
  const std::vector<double> drive = Drive(weights, rho);
  std::vector<double> g(s.u.size(), 0.0);
  for (int i = topo.input_size(); i < topo.num_neurons(); ++i) g[i] = s.u[i] - drive[i];
  return g;
}

std::vector<double> ProjectedGradient(const WeightStore& weights, const RateNetworkState& s) {
  std::vector<double> g = EnergyGradient(weights, s);
  for (size_t i = 0; i < g.size(); ++i) {
    // At a bound only the component pointing into the box survives.
    if (s.u[i] <= 0.0 && g[i] > 0.0) g[i] = 0.0;
    if (s.u[i] >= 1.0 && g[i] < 0.0) g[i] = 0.0;
  }
  return g;
}

RelaxResult Relax(const WeightStore& weights, std::span<const double> inputs,
                  const RelaxOptions& options, const RateNetworkState* start) {
  const Topology& topo = weights.topology;
  CheckInputs(topo, inputs);
  if (options.beta != 0.0 &&
      static_cast<int>(options.targets.size()) != topo.output_size()) {
    throw Error(ErrorKind::kShape, "nudging needs one target per output");
  }
  if (!(options.step_size > 0.0)) throw Error(ErrorKind::kConfig, "step_size must be > 0");

  RelaxResult r;
  if (start != nullptr) {
    r.state = *start;
  } else {
    r.state.u.assign(topo.num_neurons(), 0.0);
  }
  std::copy(inputs.begin(), inputs.end(), r.state.u.begin());

  std::vector<double>& u = r.state.u;
  const int out0 = topo.output_offset();
  for (r.steps = 0; r.steps < options.max_steps;) {
    const std::vector<double> g = EnergyGradient(weights, r.state);
    double largest = 0.0;
    std::vector<double> next = u;
    for (int i = topo.input_size(); i < topo.num_neurons(); ++i) {
      double du = -g[i];
      if (options.beta != 0.0 && i >= out0) {
        du += options.beta * (options.targets[i - out0] - HardSigmoid(u[i]));
      }
      const double v = u[i] + options.step_size * du;
      if (!std::isfinite(v) || std::abs(v) > options.divergence_bound) {
        throw Error(ErrorKind::kInstability,
                    "relaxation diverged at neuron " + std::to_string(i));
      }
      next[i] = std::clamp(v, 0.0, 1.0);
      largest = std::max(largest, std::abs(next[i] - u[i]));
    }
    u.swap(next);
    ++r.steps;
    if (options.on_step) options.on_step(r.state);
    if (largest < options.tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

WeightDelta TwoPointUpdate(const Topology& topology, std::span<const double> rho_free,
                           std::span<const double> rho_nudge, double beta) {
  if (beta == 0.0) throw Error(ErrorKind::kDivision, "two-point update needs beta != 0");
  const size_t n = static_cast<size_t>(topology.num_neurons());
  if (rho_free.size() != n || rho_nudge.size() != n) {
    throw Error(ErrorKind::kShape, "rate vectors must cover every neuron");
  }
  WeightDelta d = WeightStore::Zeros(topology);
  for (int b = 0; b < topology.num_blocks(); ++b) {
    const int lo = topology.layer_offset(b);
    const int hi = topology.layer_offset(b + 1);
    Matrix& m = d.blocks[b];
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        m(i, j) = (rho_nudge[lo + i] * rho_nudge[hi + j] - rho_free[lo + i] * rho_free[hi + j]) /
                  beta;
      }
    }
  }
  for (int l = 1; l < topology.num_layers(); ++l) {
    const int off = topology.layer_offset(l);
    for (int j = 0; j < topology.layer_size(l); ++j) {
      d.biases[l][j] = (rho_nudge[off + j] - rho_free[off + j]) / beta;
    }
  }
  return d;
}

ContinualUpdateTrace::ContinualUpdateTrace(const Topology& topology, double beta,
                                           std::span<const double> rho_start)
    : total_(WeightStore::Zeros(topology)), last_(rho_start.begin(), rho_start.end()) {
  if (beta == 0.0) throw Error(ErrorKind::kDivision, "continual update needs beta != 0");
  inv_beta_ = 1.0 / beta;
}

void ContinualUpdateTrace::Observe(std::span<const double> rho) {
  const Topology& topo = total_.topology;
  for (int b = 0; b < topo.num_blocks(); ++b) {
    const int lo = topo.layer_offset(b);
    const int hi = topo.layer_offset(b + 1);
    Matrix& m = total_.blocks[b];
    for (int i = 0; i < m.rows(); ++i) {
      const double ri = last_[lo + i];
      const double dri = rho[lo + i] - ri;
      for (int j = 0; j < m.cols(); ++j) {
        const double rj = last_[hi + j];
        m(i, j) += inv_beta_ * (ri * (rho[hi + j] - rj) + rj * dri);
      }
    }
  }
  for (int l = 1; l < topo.num_layers(); ++l) {
    const int off = topo.layer_offset(l);
    for (int j = 0; j < topo.layer_size(l); ++j) {
      total_.biases[l][j] += inv_beta_ * (rho[off + j] - last_[off + j]);
    }
  }
  last_.assign(rho.begin(), rho.end());
}

WeightDelta ContinualUpdate(const WeightStore& weights, std::span<const double> inputs,
                            const RateNetworkState& free_state,
                            const RelaxOptions& nudge_options) {
  ContinualUpdateTrace trace(weights.topology, nudge_options.beta, free_state.rho());
  RelaxOptions opts = nudge_options;
  opts.on_step = [&](const RateNetworkState& s) {
    trace.Observe(s.rho());
    if (nudge_options.on_step) nudge_options.on_step(s);
  };
  Relax(weights, inputs, opts, &free_state);
  return trace.total();
}

double FixedPointLoss(const WeightStore& weights, std::span<const double> inputs,
                      std::span<const double> targets, const RelaxOptions& free_options,
                      const RateNetworkState* start) {
  RelaxOptions opts = free_options;
  opts.beta = 0.0;
  const RelaxResult r = Relax(weights, inputs, opts, start);
  const std::vector<double> out = r.state.output_rates(weights.topology);
  if (out.size() != targets.size()) {
    throw Error(ErrorKind::kShape, "one target per output is required");
  }
  double loss = 0.0;
  for (size_t k = 0; k < out.size(); ++k) loss += 0.5 * (out[k] - targets[k]) * (out[k] - targets[k]);
  return loss;
}

WeightDelta FiniteDiffGradient(const WeightStore& weights, std::span<const double> inputs,
                               std::span<const double> targets, double epsilon,
                               const RelaxOptions& free_options) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kConfig, "epsilon must be > 0");
  RelaxOptions opts = free_options;
  opts.beta = 0.0;
  const RateNetworkState base = Relax(weights, inputs, opts).state;
  WeightStore w = weights;
  WeightDelta grad = WeightStore::Zeros(weights.topology);
  auto central = [&](double& param) {
    const double keep = param;
    param = keep + epsilon;
    const double up = FixedPointLoss(w, inputs, targets, opts, &base);
    param = keep - epsilon;
    const double down = FixedPointLoss(w, inputs, targets, opts, &base);
    param = keep;
    return (up - down) / (2.0 * epsilon);
  };
  for (size_t b = 0; b < w.blocks.size(); ++b) {
    auto data = w.blocks[b].data();
    auto out = grad.blocks[b].data();
    for (size_t k = 0; k < data.size(); ++k) out[k] = central(data[k]);
  }
  for (size_t l = 1; l < w.biases.size(); ++l) {
    for (size_t j = 0; j < w.biases[l].size(); ++j) grad.biases[l][j] = central(w.biases[l][j]);
  }
  return grad;
}

UpdateComparison CompareUpdates(std::span<const double> a, std::span<const double> b,
                                double noise_floor) {
  if (a.size() != b.size()) throw Error(ErrorKind::kShape, "updates differ in size");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  int agree = 0;
  UpdateComparison c;
  for (size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
    if (std::abs(a[k]) > noise_floor && std::abs(b[k]) > noise_floor) {
      ++c.sign_compared;
      agree += (a[k] > 0.0) == (b[k] > 0.0);
    }
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na > 0.0 && nb > 0.0) c.cosine = dot / (na * nb);
  if (c.sign_compared > 0) c.sign_agreement = static_cast<double>(agree) / c.sign_compared;
  if (nb > 0.0) c.scale_ratio = na / nb;
  return c;
}

std::vector<double> Flatten(const WeightDelta& d) {
  std::vector<double> v;
  for (const Matrix& m : d.blocks) v.insert(v.end(), m.data().begin(), m.data().end());
  for (const auto& b : d.biases) v.insert(v.end(), b.begin(), b.end());
  return v;
}

UpdateComparison CompareUpdates(const WeightDelta& a, const WeightDelta& b,
                                double noise_floor) {
  if (!(a.topology == b.topology)) throw Error(ErrorKind::kShape, "topologies differ");
  return CompareUpdates(Flatten(a), Flatten(b), noise_floor);
}

UpdateComparison CompareBlock(const WeightDelta& a, const WeightDelta& b, int block,
                              double noise_floor) {
  if (!(a.topology == b.topology)) throw Error(ErrorKind::kShape, "topologies differ");
  if (block < 0 || block >= a.topology.num_blocks()) {
    throw Error(ErrorKind::kShape, "no block " + std::to_string(block));
  }
  return CompareUpdates(a.blocks[block].data(), b.blocks[block].data(), noise_floor);
}

WeightDelta Scaled(const WeightDelta& d, double factor) {
  WeightDelta out = d;
  for (Matrix& m : out.blocks) {
    for (double& x : m.data()) x *= factor;
  }
  for (auto& b : out.biases) {
    for (double& x : b) x *= factor;
  }
  return out;
}

OracleInstance RandomInstance(const Topology& topology, std::uint64_t seed,
                              double weight_scale, double bias_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RelaxOptions free;
  free.max_steps = 20000;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    OracleInstance inst;
    inst.weights = WeightStore::GlorotUniform(topology, rng, weight_scale);
    for (auto& b : inst.weights.biases) {
      for (double& x : b) x = bias_max * unit(rng);
    }
    inst.inputs.resize(topology.input_size());
    for (double& x : inst.inputs) x = unit(rng);
    inst.targets.resize(topology.output_size());
    for (double& x : inst.targets) x = unit(rng);

    const RelaxResult r = Relax(inst.weights, inst.inputs, free);
    if (!r.converged) continue;
    const std::vector<double> out = r.state.output_rates(topology);
    if (!std::all_of(out.begin(), out.end(), [](double x) { return x > 0.1 && x < 0.9; })) {
      continue;
    }
    int interior = 0;
    int hidden = 0;
    for (int i = topology.input_size(); i < topology.output_offset(); ++i) {
      ++hidden;
      interior += r.state.u[i] > 0.0 && r.state.u[i] < 1.0;
    }
    if (2 * interior >= hidden) return inst;
  }
  throw Error(ErrorKind::kInstability, "no admissible random instance");
}

WeightStore RateEquivalent(const WeightStore& spiking, const HyperParams& hyper) {
  WeightStore w = spiking;
  const double wf = hyper.f_max_per_step() / hyper.u_th;
  for (Matrix& m : w.blocks) {
    for (double& x : m.data()) x *= wf;
  }
  for (auto& b : w.biases) {
    for (double& x : b) x /= hyper.u_th;
  }
  return w;
}

}  // namespace eqspike
