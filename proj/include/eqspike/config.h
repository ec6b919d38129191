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

// Run configuration files: a flat subset of TOML.
//
//   # comment
//   [section]
//   key = 1.5e-3
//   key = "text"
//   key = [784, 100, 10]
//   key = true
//
// Sections: [network], [neuron], [learning], [trainer], [data]. Every key is
// optional; unknown sections or keys are errors so typos do not pass silently.

#ifndef EQSPIKE_CONFIG_H_
#define EQSPIKE_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "eqspike/trainer.h"

namespace eqspike {

struct RunConfig {
  TrainerConfig trainer;
  std::string data_dir = "data/mnist-desk";
  int train_n = 0;  // 0 keeps every sample
  int test_n = 0;
  // Training images whose spike/update logs are written by `train --logs`.
  int log_images = 0;
};

// Applies `text` on top of `base`. Throws Error(kParse) for malformed lines and
// Error(kConfig) for unknown keys, wrong value types or failed validation.
RunConfig ParseConfig(std::string_view text, RunConfig base = {});
RunConfig LoadConfig(const std::filesystem::path& path, RunConfig base = {});

// Sets one "section.key" from its textual value, as a config line would.
void SetConfigValue(RunConfig& config, std::string_view dotted_key, std::string_view value);

// Complete config text with every field; ParseConfig(FormatConfig(c)) == c.
std::string FormatConfig(const RunConfig& config);

}  // namespace eqspike

#endif  // EQSPIKE_CONFIG_H_
