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

#include "eqspike/rate_tracker.h"

#include <algorithm>

#include "eqspike/error.h"

namespace eqspike {

RateTracker::RateTracker(int tau, int n_filt) {
  if (tau < 1 || n_filt < 1) {
    throw Error(ErrorKind::kConfig, "rate tracker needs tau, n_filt >= 1");
  }
  delay_ring_.assign(tau, 0.0);
  avg_ring_.assign(n_filt, 0.0);
}

void RateTracker::Reset() {
  std::fill(delay_ring_.begin(), delay_ring_.end(), 0.0);
  std::fill(avg_ring_.begin(), avg_ring_.end(), 0.0);
  delay_head_ = 0;
  avg_head_ = 0;
  avg_sum_ = 0.0;
  v_li_ = 0.0;
  diff_ = 0.0;
  smoothed_ = 0.0;
  steps_ = 0;
  active_ = false;
}

void RateTracker::Advance(bool spiked, double gamma_li) {
  active_ = active_ || spiked;
  if (!active_) {
    // All stages are still exactly zero; only the clock moves.
    ++steps_;
    return;
  }
  LiStep(spiked, gamma_li);
  if (steps_ == 0) {
    // Spiked on the very first step: the earliest recorded value is v_li
    // itself, so the missing delay history starts equal to it.
    std::fill(delay_ring_.begin(), delay_ring_.end(), v_li_);
  }
  PushDelayed();
  PushAverage();
  ++steps_;
}

void RateTracker::LiStep(bool spiked, double gamma_li) {
  v_li_ = (1.0 - gamma_li) * v_li_ + (spiked ? 1.0 : 0.0);
}

void RateTracker::PushDelayed() {
  // A tracker that activates after step 0 recorded zeros so far, which is
  // what the ring already holds.
  diff_ = v_li_ - delay_ring_[delay_head_];
  delay_ring_[delay_head_] = v_li_;
  delay_head_ = (delay_head_ + 1) % static_cast<int>(delay_ring_.size());
}

void RateTracker::PushAverage() {
  avg_sum_ += diff_ - avg_ring_[avg_head_];
  avg_ring_[avg_head_] = diff_;
  avg_head_ = (avg_head_ + 1) % static_cast<int>(avg_ring_.size());
  smoothed_ = avg_sum_ / static_cast<double>(avg_ring_.size());
}

}  // namespace eqspike
