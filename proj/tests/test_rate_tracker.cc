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


#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "eqspike/rate_tracker.h"

using namespace eqspike;

namespace {

// Deterministic spike train whose instantaneous rate is rate(t): a phase
// accumulator fires whenever it crosses 1.
template <typename Rate>
std::vector<bool> Train(int steps, Rate rate) {
  std::vector<bool> out(steps);
  double phase = 0.0;
  for (int t = 0; t < steps; ++t) {
    phase += rate(t);
    if (phase >= 1.0) {
      phase -= 1.0;
      out[t] = true;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("periodic train: time-averaged v_li is rate / gamma") {
  const double g = 0.01;
  for (int p : {2, 3, 5, 10}) {
    REQUIRE(p * g <= 0.1);
    RateTracker tr(20, 20);
    const int warm = static_cast<int>(5 / g);
    for (int t = 0; t < warm; ++t) tr.Advance(t % p == 0, g);
    double sum = 0.0, lo = 1e9, hi = -1e9;
    const int span = 100 * p;
    for (int t = warm; t < warm + span; ++t) {
      tr.Advance(t % p == 0, g);
      sum += tr.v_li();
      lo = std::min(lo, tr.v_li());
      hi = std::max(hi, tr.v_li());
    }
    const double expected = (1.0 / p) / g;
    CHECK(std::abs(sum / span - expected) <= 0.02 * expected);
    CHECK(hi - lo < 1.0);
  }
}

TEST_CASE("periodic train: steady state matches the geometric series") {
  // Just after a spike v = 1 / (1 - (1 - g)^p); over one period the average is
  // exactly 1 / (p g).
  const double g = 0.02;
  const int p = 4;
  RateTracker tr(10, 10);
  for (int t = 0; t < 20000; ++t) tr.Advance(t % p == 0, g);
  const double a = 1.0 - g;
  const double peak = 1.0 / (1.0 - std::pow(a, p));
  // step 19999 has t % 4 == 3, the last step of a period
  CHECK(tr.v_li() == doctest::Approx(peak * std::pow(a, p - 1)).epsilon(1e-9));
  CHECK(tr.rate(g) == doctest::Approx(g * peak * std::pow(a, p - 1)));
}

TEST_CASE("warm-up difference is exactly zero and a dormant tracker stays zero") {
  RateTracker tr(20, 20);
  tr.Advance(false, 0.01);
  CHECK_FALSE(tr.active());
  CHECK(tr.smoothed() == 0.0);
  tr.Advance(true, 0.01);
  CHECK(tr.active());
  CHECK(tr.v_li() == 1.0);
  CHECK(tr.steps() == 2);
  tr.Reset();
  CHECK(tr.v_li() == 0.0);
  CHECK(tr.steps() == 0);
}

TEST_CASE("step change: delayed difference rises for tau steps") {
  const double g = 0.01;
  const int tau = 20;
  RateTracker tr(tau, 1);
  // Constant drive from t = 0 gives v(t) = (1 - a^(t+1)) / g.
  std::vector<double> diff;
  for (int t = 0; t < 300; ++t) {
    tr.Advance(true, g);
    diff.push_back(tr.delayed_difference());
  }
  const double a = 1.0 - g;
  for (int t = tau; t < 300; ++t) {
    const double expected = (std::pow(a, t - tau + 1) - std::pow(a, t + 1)) / g;
    CHECK(diff[t] == doctest::Approx(expected).epsilon(1e-9));
  }
  // Plateau of about tau, then decay towards zero.
  CHECK(diff[tau] > 0.9 * tau);
  CHECK(diff[299] < 0.1 * tau);
}

TEST_CASE("ramped rate: smoothed output approximates (tau / gamma) slope") {
  const double g = 0.01;
  const int tau = 20;
  const int ramp = 20000;
  const double slope = 0.5 / ramp;  // 0 to f_max with t_refract = 2
  const std::vector<bool> spikes =
      Train(ramp, [&](int t) { return slope * t; });
  RateTracker tr(tau, 20);
  double sum = 0.0;
  int n = 0;
  for (int t = 0; t < ramp; ++t) {
    tr.Advance(spikes[t], g);
    if (t >= ramp / 4 && t < 3 * ramp / 4) {
      sum += tr.smoothed();
      ++n;
    }
  }
  const double expected = (tau / g) * slope;
  CHECK(std::abs(sum / n - expected) <= 0.1 * expected);
}

TEST_CASE("decelerating neuron gives a strictly negative signal") {
  const double g = 0.01;
  const int tau = 20;
  RateTracker tr(tau, 20);
  const int change = 3000;
  // Periods 2 and 10 both divide tau, so the ripple cancels in the difference.
  for (int t = 0; t < change; ++t) tr.Advance(t % 2 == 0, g);
  for (int t = change; t < change + 300; ++t) {
    tr.Advance(t % 10 == 0, g);
    if (t >= change + tau) CHECK(tr.smoothed() < 0.0);
  }
}
