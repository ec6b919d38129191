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

#include "eqspike/params.h"

#include <cmath>
#include <string>

#include "eqspike/error.h"

namespace eqspike {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNumericFault: return "numeric fault";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kDivision: return "division error";
    case ErrorKind::kInstability: return "numerical instability";
    case ErrorKind::kBadMagic: return "bad magic number";
    case ErrorKind::kTruncated: return "truncated file";
    case ErrorKind::kCountMismatch: return "count mismatch";
  }
  return "error";
}

namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kConfig, "invalid hyper-parameter: " + what);
}

bool OpenUnit(double x) { return std::isfinite(x) && x > 0.0 && x < 1.0; }

}  // namespace

void HyperParams::Validate() const {
  Require(OpenUnit(gamma_lif), "gamma_lif must lie in (0, 1)");
  Require(OpenUnit(gamma_li), "gamma_li must lie in (0, 1)");
  Require(std::isfinite(u_th) && u_th > 0.0, "u_th must be positive");
  Require(std::isfinite(beta) && beta >= 0.0, "beta must be non-negative");
  Require(std::isfinite(eta_r) && eta_r > 0.0, "eta_r must be positive");
  Require(tau >= 1, "tau must be >= 1");
  Require(n_filt >= 1, "n_filt must be >= 1");
  Require(t_free >= 0, "t_free must be >= 0");
  Require(t_nudge >= 0, "t_nudge must be >= 0");
  Require(t_refract >= 1, "t_refract must be >= 1");
  Require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  Require(std::isfinite(f_max()) && f_max() > 0.0, "f_max must be finite");
}

}  // namespace eqspike
