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
#include "eqspike/neuron.h"

using namespace eqspike;

namespace {

// Integrating steps from u = 0 until the geometric ramp
// u_n = I (1 - (1 - g)^n) / g first exceeds u_th.
int RampSteps(double current, double g, double u_th) {
  const double k = std::log(1.0 - u_th * g / current) / std::log(1.0 - g);
  return static_cast<int>(std::floor(k)) + 1;
}

// Spike step indices of a neuron stepped one step at a time.
std::vector<int> SpikeSteps(const HyperParams& h, double current, int steps) {
  std::vector<int> out;
  NeuronState s;
  for (int t = 0; t < steps; ++t) {
    const MembraneStep r = StepMembrane(s, current, h);
    s = r.state;
    if (r.spiked) out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("inter-spike interval follows the geometric ramp") {
  HyperParams h;
  for (double current : {0.06, 0.08, 0.13, 0.3, 0.7}) {
    const int n = RampSteps(current, h.gamma_lif, h.u_th);
    const std::vector<int> spikes = SpikeSteps(h, current, 400);
    REQUIRE(spikes.size() >= 3);
    CHECK(spikes[0] == n - 1);
    for (size_t i = 1; i < spikes.size(); ++i) {
      // the spike step itself is the first of t_refract dead steps
      CHECK(spikes[i] - spikes[i - 1] == h.t_refract - 1 + n);
    }
  }
}

TEST_CASE("subthreshold drive never fires") {
  HyperParams h;
  // Asymptote I / gamma_lif stays below u_th.
  CHECK(SpikeSteps(h, 0.9 * h.gamma_lif * h.u_th, 5000).empty());
}

TEST_CASE("refractory steps drop their input") {
  HyperParams h;
  h.t_refract = 4;
  NeuronState s;
  s = StepMembrane(s, 2.0, h).state;
  CHECK(s.u == 0.0);
  CHECK(s.refract_remaining == 3);
  for (int i = 0; i < 3; ++i) {
    const MembraneStep r = StepMembrane(s, 2.0, h);
    CHECK_FALSE(r.spiked);
    CHECK(r.state.u == 0.0);
    s = r.state;
  }
  CHECK(StepMembrane(s, 2.0, h).spiked);
}

TEST_CASE("saturating drive fires at 1 / t_refract") {
  for (int tr : {1, 2, 3, 5}) {
    HyperParams h;
    h.t_refract = tr;
    CHECK(FiCurve(h, 100.0, 600) == doctest::Approx(1.0 / tr));
  }
}

TEST_CASE("fi curve matches the closed form within one step") {
  HyperParams h;
  const int duration = 20000;
  for (double current : {0.06, 0.1, 0.2, 0.5}) {
    const double isi = h.t_refract - 1 + RampSteps(current, h.gamma_lif, h.u_th);
    CHECK(std::abs(FiCurve(h, current, duration) - 1.0 / isi) <= 1.0 / duration);
  }
}

TEST_CASE("calibrated max current is the saturation point") {
  HyperParams h;
  const double imax = CalibrateMaxCurrent(h);
  CHECK(FiCurve(h, imax, 4000) == doctest::Approx(h.f_max_per_step()));
  CHECK(FiCurve(h, 0.99 * imax, 4000) < h.f_max_per_step());
  // The neuron must cross u_th in one step from rest.
  CHECK(imax == doctest::Approx(h.u_th).epsilon(1e-9));
}

TEST_CASE("inverse fi curve reaches the requested rate") {
  HyperParams h;
  for (double rate : {0.05, 0.1, 0.25, 0.4}) {
    const double i = InverseFiCurve(h, rate, 1000);
    CHECK(FiCurve(h, i, 1000) >= rate - 1e-12);
    CHECK(FiCurve(h, i * (1.0 - 1e-6), 1000) < rate);
  }
  CHECK(InverseFiCurve(h, 0.0, 1000) == 0.0);
  CHECK_THROWS_AS(InverseFiCurve(h, 0.6, 1000), Error);
  CHECK_THROWS_AS(InverseFiCurve(h, -0.1, 1000), Error);
}

TEST_CASE("non-finite current is a numeric fault") {
  HyperParams h;
  try {
    StepMembrane({}, std::nan(""), h);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumericFault);
  }
}

TEST_CASE("hyperparameter validation") {
  HyperParams h;
  CHECK_NOTHROW(h.Validate());
  h.gamma_lif = 1.5;
  CHECK_THROWS_AS(h.Validate(), Error);
  h = {};
  h.t_refract = 0;
  CHECK_THROWS_AS(h.Validate(), Error);
  h = {};
  h.set_learning_rate(1.5e-3);
  CHECK(h.learning_rate() == doctest::Approx(1.5e-3));
  CHECK(h.f_max_per_step() == 0.5);
}
