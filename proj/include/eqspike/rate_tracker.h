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

#ifndef EQSPIKE_RATE_TRACKER_H_
#define EQSPIKE_RATE_TRACKER_H_

#include <vector>

namespace eqspike {

// Per-neuron estimator of the rate derivative.
//
// Each step the spike indicator goes through three linear stages:
//   v_li      <- (1 - gamma_li) * v_li + spike          (leaky integrator)
//   diff       = v_li(t) - v_li(t - tau)                 (delayed difference)
//   smoothed   = mean of the last n_filt diff values     (moving average)
// v_li * gamma_li estimates the rate and `smoothed` approximates
// (tau / gamma_li) * d(rate)/dt.
//
// Missing history during warm-up is filled with the earliest recorded value,
// so the first delayed difference is exactly zero.
class RateTracker {
 public:
  RateTracker(int tau, int n_filt);

  void Reset();

  // Runs the three stages for one step.
  void Advance(bool spiked, double gamma_li);

  double v_li() const { return v_li_; }
  double rate(double gamma_li) const { return v_li_ * gamma_li; }
  double delayed_difference() const { return diff_; }
  double smoothed() const { return smoothed_; }
  // Number of Advance() calls since the last Reset().
  long steps() const { return steps_; }
  // False until the first spike; a dormant tracker is identically zero.
  bool active() const { return active_; }

  int tau() const { return static_cast<int>(delay_ring_.size()); }
  int n_filt() const { return static_cast<int>(avg_ring_.size()); }

 private:
  void LiStep(bool spiked, double gamma_li);
  void PushDelayed();
  void PushAverage();

  std::vector<double> delay_ring_;  // v_li(t - tau) .. v_li(t - 1)
  std::vector<double> avg_ring_;    // last n_filt delayed differences
  int delay_head_ = 0;
  int avg_head_ = 0;
  double avg_sum_ = 0.0;
  double v_li_ = 0.0;
  double diff_ = 0.0;
  double smoothed_ = 0.0;
  long steps_ = 0;
  bool active_ = false;
};

}  // namespace eqspike

#endif  // EQSPIKE_RATE_TRACKER_H_
