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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "eqspike/error.h"
#include "eqspike/metrics.h"
#include "eqspike/mnist.h"
#include "eqspike/trainer.h"

using namespace eqspike;

namespace {

Dataset TinyDataset(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> px(0.0f, 1.0f);
  Dataset d;
  d.pixels = 6;
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    for (int p = 0; p < 6; ++p) {
      // class 0 lights the left half, class 1 the right half
      const bool lit = (p < 3) == (label == 0);
      d.images.push_back(lit ? 0.5f + 0.5f * px(rng) : 0.1f * px(rng));
    }
    d.labels.push_back(static_cast<std::uint8_t>(label));
  }
  return d;
}

TrainerConfig TinyConfig() {
  TrainerConfig c;
  c.layers = {6, 5, 2};
  c.hyper.u_th = 0.1;
  c.hyper.beta = 0.4;
  c.init_scale = 0.1;
  c.epochs = 2;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("error gradient is the derivative of the squared error") {
  const std::vector<double> r = {0.1, 0.35, 0.0, 0.5};
  const std::vector<double> t = {0.5, 0.0, 0.0, 0.2};
  const std::vector<double> g = ComputeErrorGradient(r, t);
  auto loss = [&](std::vector<double> x) {
    double s = 0.0;
    for (size_t k = 0; k < x.size(); ++k) s += 0.5 * (x[k] - t[k]) * (x[k] - t[k]);
    return s;
  };
  const double h = 1e-6;
  for (size_t k = 0; k < r.size(); ++k) {
    std::vector<double> p = r, m = r;
    p[k] += h;
    m[k] -= h;
    const double fd = (loss(p) - loss(m)) / (2 * h);
    CHECK(std::abs(fd - g[k]) <= 1e-8 * std::max(1.0, std::abs(g[k])));
  }
  CHECK_THROWS_AS(ComputeErrorGradient(r, std::vector<double>{0.0}), Error);
}

TEST_CASE("skip rule compares the worst output against 1% of f_max") {
  TrainerConfig c;
  const double fmax = c.hyper.f_max_per_step();
  const std::vector<double> t = {fmax, 0.0};
  CHECK(ShouldNudge(std::vector<double>{fmax - 0.02 * fmax, 0.0}, t, c));
  CHECK_FALSE(ShouldNudge(std::vector<double>{fmax - 0.005 * fmax, 0.0}, t, c));
  CHECK_FALSE(ShouldNudge(t, t, c));
  // Exactly at the threshold is not above it.
  c.skip_threshold = 0.5;
  CHECK_FALSE(ShouldNudge(std::vector<double>{fmax, 0.25}, t, c));
  CHECK(ShouldNudge(std::vector<double>{fmax, 0.26}, t, c));
}

TEST_CASE("one-hot targets") {
  TrainerConfig c;
  c.target_rate_lo = 0.01;
  const std::vector<double> t = MakeTargets(2, 4, c);
  CHECK(t == std::vector<double>{0.01, 0.01, 0.5, 0.01});
  c.target_rate_hi = 0.3;
  CHECK(MakeTargets(0, 2, c)[0] == 0.3);
  CHECK_THROWS_AS(MakeTargets(4, 4, c), Error);
}

TEST_CASE("trainer config validation") {
  TrainerConfig c;
  CHECK_NOTHROW(c.Validate());
  c.target_rate_hi = 0.6;
  CHECK_THROWS_AS(c.Validate(), Error);
  c = {};
  c.rate_window = c.hyper.t_free + 1;
  CHECK_THROWS_AS(c.Validate(), Error);
  c = {};
  c.layers = {784};
  CHECK_THROWS_AS(c.Validate(), Error);
}

TEST_CASE("free phase applies no updates") {
  TrainerConfig c = TinyConfig();
  TrainState s = InitialTrainState(c);
  const WeightStore before = s.weights;
  Simulator sim(c.hyper, &s.weights);
  const std::vector<double> cur = {0.3, 0.0, 0.2, 0.5, 0.1, 0.0};
  const FreePhaseResult r = FreePhase(sim, cur, c.rate_window);
  CHECK(s.weights == before);
  CHECK(r.window_rates.size() == 2);
  for (size_t k = 0; k < 2; ++k) {
    CHECK(r.window_rates[k] == static_cast<double>(r.window_counts[k]) / c.rate_window);
  }
}

TEST_CASE("nudging towards a higher rate accelerates the output") {
  HyperParams h;
  h.u_th = 0.1;
  h.beta = 0.2;
  const Topology topo({1, 1});
  WeightStore w = WeightStore::Zeros(topo);
  w.blocks[0](0, 0) = 0.02;
  TrainerConfig c;
  c.hyper = h;
  c.layers = {1, 1};
  Simulator sim(h, &w);
  const FreePhaseResult free = FreePhase(sim, std::vector<double>{0.2}, c.rate_window);
  const double targets[] = {h.f_max_per_step()};
  // Run the nudge one step at a time to watch the output's derivative signal.
  double sum = 0.0;
  std::vector<double> grad(1);
  for (int t = 0; t < 150; ++t) {
    grad[0] = sim.TrackerRate(1) - targets[0];
    StepControl ctl;
    ctl.phase = Phase::kNudge;
    ctl.output_gradient = grad;
    sim.Step(ctl);
    if (t >= h.tau) sum += sim.UpdateSignal(1);
  }
  CHECK(sum > 0.0);
  CHECK(sim.TrackerRate(1) > free.tracker_rates[0]);
}

TEST_CASE("spiking pre with accelerating post strengthens the synapse") {
  StdpProtocol p;
  p.accelerate = true;
  const ProtocolLogs logs = RunStdpProtocol(p);
  double total = 0.0;
  for (const UpdateEvent& u : logs.updates) {
    if (u.pre == 0) total += u.delta_w;
  }
  CHECK(total > 0.0);
}

TEST_CASE("every update is bounded and logged in the nudging phase") {
  TrainerConfig c = TinyConfig();
  TrainState s = InitialTrainState(c);
  const Dataset d = TinyDataset(4, 1);
  Simulator sim(c.hyper, &s.weights);
  UpdateLog log;
  const double max_current = ResolveMaxCurrent(c);
  for (int i = 0; i < d.size(); ++i) {
    PresentImage(sim, EncodeImage(d.image(i), max_current), d.labels[i], c, &log);
  }
  REQUIRE_FALSE(log.empty());
  // |smoothed| <= max |v_li| <= 1 / gamma_li
  const double bound = c.hyper.eta_r / c.hyper.gamma_li;
  for (const UpdateEvent& u : log) {
    CHECK(u.phase == Phase::kNudge);
    CHECK(std::abs(u.delta_w) <= bound);
  }
}

TEST_CASE("a single image is memorised and then skipped") {
  TrainerConfig c;
  c.layers = {4, 6, 2};
  c.hyper.u_th = 0.1;
  c.hyper.beta = 0.4;
  c.init_scale = 0.05;
  c.target_rate_hi = 0.25;  // a rate a constant drive can realise exactly
  c.epochs = 400;
  c.seed = 3;
  Dataset d;
  d.pixels = 4;
  d.images = {1.0f, 0.0f, 0.5f, 0.8f};
  d.labels = {1};
  TrainState s = InitialTrainState(c);
  const std::vector<EpochMetrics> rows = Train(d, {}, c, s);
  REQUIRE(rows.size() == 400);
  CHECK(rows.front().nudged_images == 1);
  for (size_t e = 350; e < rows.size(); ++e) {
    CHECK(rows[e].nudged_images == 0);
    CHECK(rows[e].train_acc == 1.0);
  }
}

TEST_CASE("training is deterministic and resumable") {
  const TrainerConfig c = TinyConfig();
  const Dataset train = TinyDataset(10, 2);
  const Dataset test = TinyDataset(4, 3);
  TrainState a = InitialTrainState(c);
  const std::vector<EpochMetrics> ra = Train(train, test, c, a);
  TrainState b = InitialTrainState(c);
  Train(train, test, c, b);
  CHECK(a.weights == b.weights);

  TrainerConfig half = c;
  half.epochs = 1;
  TrainState r = InitialTrainState(c);
  Train(train, test, half, r);
  const std::vector<EpochMetrics> rest = Train(train, test, c, r);
  REQUIRE(rest.size() == 1);
  CHECK(r.weights == a.weights);
  CHECK(r.synops_cumulative == a.synops_cumulative);
  CHECK(rest[0].epoch == 2);
  CHECK(rest[0].nudged_images == ra[1].nudged_images);
}

TEST_CASE("epoch metrics agree with a recount of the logged spikes") {
  TrainerConfig c = TinyConfig();
  c.epochs = 1;
  const Dataset train = TinyDataset(3, 4);
  TrainState s = InitialTrainState(c);
  SpikeLog spikes;
  UpdateLog updates;
  TrainHooks hooks;
  hooks.spike_log = &spikes;
  hooks.update_log = &updates;
  hooks.log_images = train.size();
  const std::vector<EpochMetrics> rows = Train(train, {}, c, s, hooks);
  const Topology topo(c.layers);
  CHECK(rows[0].synops_cumulative == CountSynops(spikes, topo));
  const SpikeStats st = ComputeSpikeStats(spikes, topo, train.size());
  CHECK(rows[0].spikes_per_neuron_per_image == doctest::Approx(st.spikes_per_neuron_per_image));
  CHECK(rows[0].input_spike_fraction == doctest::Approx(st.input_block_synop_fraction));
}

TEST_CASE("mismatched checkpoint topology is rejected") {
  TrainerConfig c = TinyConfig();
  TrainState s = InitialTrainState(c);
  c.layers = {6, 4, 2};
  CHECK_THROWS_AS(Train(TinyDataset(2, 1), {}, c, s), Error);
}
