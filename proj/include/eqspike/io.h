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

// Checkpoints and CSV artifacts.
//
// Checkpoint layout, all integers and doubles little-endian:
//
//   8 bytes   magic "EQSPIKE\0"
//   u8        format version (kCheckpointVersion)
//   u32       number of layers L, then L x u32 layer sizes
//   f64 x 6   gamma_lif, gamma_li, u_th, beta, eta_r, dt
//   i32 x 5   tau, n_filt, t_free, t_nudge, t_refract
//   i32       completed epochs
//   i64       cumulative SynOps
//   u32 + n   RNG state as text (std::mt19937_64 stream form)
//   f64 ...   every weight block, row-major, lowest block first
//   f64 ...   biases of layers 1 .. L-1
//
// CSV files start with optional "# " comment lines, then one header row.

#ifndef EQSPIKE_IO_H_
#define EQSPIKE_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eqspike/metrics.h"
#include "eqspike/network.h"
#include "eqspike/params.h"
#include "eqspike/readout.h"
#include "eqspike/trainer.h"

namespace eqspike {

inline constexpr std::uint8_t kCheckpointVersion = 1;

struct Checkpoint {
  HyperParams hyper;
  TrainState state;
};

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
// Throws Error(kBadMagic) for a foreign file, Error(kConfig) for an unknown
// version and Error(kTruncated) when bytes run out or are left over.
Checkpoint DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double x);

// Run log: `config_echo` as comment lines, then one row per epoch with
// epoch,train_acc,test_acc,nudged_images,spikes_per_neuron_per_image,synops_cumulative
void WriteRunLogHeader(std::ostream& out, const std::string& config_echo);
void WriteRunLogRow(std::ostream& out, const EpochMetrics& row);

// step,neuron
void WriteSpikeLog(std::ostream& out, std::span<const SpikeEvent> log);
// step,block,pre,post,trigger,delta_w,phase (phase is "free" or "nudge")
void WriteUpdateLog(std::ostream& out, std::span<const UpdateEvent> log);
// Throw Error(kParse) on a wrong header or malformed row.
SpikeLog ReadSpikeLog(std::istream& in);
UpdateLog ReadUpdateLog(std::istream& in);

void WriteCurveCsv(std::ostream& out, const AccuracyCurve& curve);
void WriteStdpCsv(std::ostream& out, const StdpCurve& curve);
void WriteStatsCsv(std::ostream& out, const SpikeStats& stats, double energy_joules,
                   const EnergyModel& model);

// Whole-file helpers that throw Error(kIo) when the file cannot be opened.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace eqspike

#endif  // EQSPIKE_IO_H_
