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

#include "eqspike/io.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "eqspike/error.h"

namespace eqspike {

namespace {

constexpr char kMagic[8] = {'E', 'Q', 'S', 'P', 'I', 'K', 'E', '\0'};

class ByteWriter {
 public:
  template <typename T>
  void Put(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    const U bits = std::bit_cast<U>(value);
    for (size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  void PutBytes(std::string_view s) { out_.append(s); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    Need(sizeof(U));
    U bits = 0;
    for (size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }
  std::string_view GetBytes(size_t n) {
    Need(n);
    const std::string_view s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorKind::kTruncated, "checkpoint ends early");
  }
  std::string_view in_;
  size_t pos_ = 0;
};

void Expect(std::istream& in, const std::string& header, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line != header) {
      throw Error(ErrorKind::kParse, std::string(what) + ": expected header '" + header + "'");
    }
    return;
  }
  throw Error(ErrorKind::kParse, std::string(what) + ": missing header");
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) return out;
    line = line.substr(comma + 1);
  }
}

template <typename T>
T ParseField(std::string_view s, const char* what, int line_no) {
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kParse, std::string(what) + ": bad field '" + std::string(s) +
                                       "' on data row " + std::to_string(line_no));
  }
  return out;
}

// Calls `row` with the fields of every data row, checking the column count.
template <typename F>
void ForEachRow(std::istream& in, size_t columns, const char* what, F&& row) {
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++n;
    const auto fields = SplitCsv(line);
    if (fields.size() != columns) {
      throw Error(ErrorKind::kParse,
                  std::string(what) + ": wrong column count on data row " + std::to_string(n));
    }
    row(fields, n);
  }
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& c) {
  const WeightStore& w = c.state.weights;
  const Topology& topo = w.topology;
  ByteWriter out;
  out.PutBytes(std::string_view(kMagic, sizeof kMagic));
  out.Put<std::uint8_t>(kCheckpointVersion);
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(topo.num_layers()));
  for (int s : topo.layer_sizes()) out.Put<std::uint32_t>(static_cast<std::uint32_t>(s));
  const HyperParams& h = c.hyper;
  for (double x : {h.gamma_lif, h.gamma_li, h.u_th, h.beta, h.eta_r, h.dt}) out.Put<double>(x);
  for (int x : {h.tau, h.n_filt, h.t_free, h.t_nudge, h.t_refract}) out.Put<std::int32_t>(x);
  out.Put<std::int32_t>(c.state.epoch);
  out.Put<std::int64_t>(c.state.synops_cumulative);
  std::ostringstream rng;
  rng << c.state.rng;
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(rng.str().size()));
  out.PutBytes(rng.str());
  for (const Matrix& m : w.blocks) {
    for (double x : m.data()) out.Put<double>(x);
  }
  for (size_t l = 1; l < w.biases.size(); ++l) {
    for (double x : w.biases[l]) out.Put<double>(x);
  }
  return out.Take();
}

Checkpoint DeserializeCheckpoint(std::string_view bytes) {
  ByteReader in(bytes);
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::kBadMagic, "not an EqSpike checkpoint");
  }
  in.GetBytes(sizeof kMagic);
  const auto version = in.Get<std::uint8_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kConfig, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto num_layers = in.Get<std::uint32_t>();
  if (num_layers < 2 || num_layers > 64) throw Error(ErrorKind::kConfig, "bad layer count in checkpoint");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < num_layers; ++i) {
    const auto s = in.Get<std::uint32_t>();
    if (s < 1 || s > (1u << 24)) throw Error(ErrorKind::kConfig, "bad layer size in checkpoint");
    sizes.push_back(static_cast<int>(s));
  }
  Checkpoint c;
  HyperParams& h = c.hyper;
  for (double* x : {&h.gamma_lif, &h.gamma_li, &h.u_th, &h.beta, &h.eta_r, &h.dt}) *x = in.Get<double>();
  for (int* x : {&h.tau, &h.n_filt, &h.t_free, &h.t_nudge, &h.t_refract}) *x = in.Get<std::int32_t>();
  h.Validate();
  c.state.epoch = in.Get<std::int32_t>();
  c.state.synops_cumulative = in.Get<std::int64_t>();
  const auto rng_len = in.Get<std::uint32_t>();
  std::istringstream rng(std::string(in.GetBytes(rng_len)));
  rng >> c.state.rng;
  if (rng.fail()) throw Error(ErrorKind::kParse, "bad RNG state in checkpoint");
  c.state.weights = WeightStore::Zeros(Topology(sizes));
  for (Matrix& m : c.state.weights.blocks) {
    for (double& x : m.data()) x = in.Get<double>();
  }
  for (size_t l = 1; l < c.state.weights.biases.size(); ++l) {
    for (double& x : c.state.weights.biases[l]) x = in.Get<double>();
  }
  if (!in.done()) throw Error(ErrorKind::kTruncated, "trailing bytes after checkpoint");
  return c;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  WriteFile(path, SerializeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return DeserializeCheckpoint(ReadFile(path));
}

std::string FormatDouble(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void WriteRunLogHeader(std::ostream& out, const std::string& config_echo) {
  std::istringstream lines(config_echo);
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << "\n";
  out << "epoch,train_acc,test_acc,nudged_images,spikes_per_neuron_per_image,synops_cumulative\n";
}

void WriteRunLogRow(std::ostream& out, const EpochMetrics& r) {
  out << r.epoch << ',' << FormatDouble(r.train_acc) << ',' << FormatDouble(r.test_acc) << ','
      << r.nudged_images << ',' << FormatDouble(r.spikes_per_neuron_per_image) << ','
      << r.synops_cumulative << '\n';
}

void WriteSpikeLog(std::ostream& out, std::span<const SpikeEvent> log) {
  out << "step,neuron\n";
  for (const SpikeEvent& e : log) out << e.step << ',' << e.neuron << '\n';
}

void WriteUpdateLog(std::ostream& out, std::span<const UpdateEvent> log) {
  out << "step,block,pre,post,trigger,delta_w,phase\n";
  for (const UpdateEvent& e : log) {
    out << e.step << ',' << e.block << ',' << e.pre << ',' << e.post << ',' << e.trigger << ','
        << FormatDouble(e.delta_w) << ',' << (e.phase == Phase::kFree ? "free" : "nudge") << '\n';
  }
}

SpikeLog ReadSpikeLog(std::istream& in) {
  constexpr const char* kWhat = "spike log";
  Expect(in, "step,neuron", kWhat);
  SpikeLog log;
  ForEachRow(in, 2, kWhat, [&](const auto& f, int n) {
    log.push_back({ParseField<std::int64_t>(f[0], kWhat, n), ParseField<int>(f[1], kWhat, n)});
  });
  return log;
}

UpdateLog ReadUpdateLog(std::istream& in) {
  constexpr const char* kWhat = "update log";
  Expect(in, "step,block,pre,post,trigger,delta_w,phase", kWhat);
  UpdateLog log;
  ForEachRow(in, 7, kWhat, [&](const auto& f, int n) {
    UpdateEvent e;
    e.step = ParseField<std::int64_t>(f[0], kWhat, n);
    e.block = ParseField<int>(f[1], kWhat, n);
    e.pre = ParseField<int>(f[2], kWhat, n);
    e.post = ParseField<int>(f[3], kWhat, n);
    e.trigger = ParseField<int>(f[4], kWhat, n);
    e.delta_w = ParseField<double>(f[5], kWhat, n);
    if (f[6] == "free") {
      e.phase = Phase::kFree;
    } else if (f[6] == "nudge") {
      e.phase = Phase::kNudge;
    } else {
      throw Error(ErrorKind::kParse, "update log: bad phase on data row " + std::to_string(n));
    }
    log.push_back(e);
  });
  return log;
}

void WriteCurveCsv(std::ostream& out, const AccuracyCurve& curve) {
  out << "# accuracies in [0,1]; mean_synops and mean_spikes per image\n"
      << "t_times_fmax,rate_acc,first_spike_acc,mean_synops,mean_spikes\n";
  for (const CurvePoint& p : curve.points) {
    out << FormatDouble(p.t_times_fmax) << ',' << FormatDouble(p.rate_acc) << ','
        << FormatDouble(p.first_spike_acc) << ',' << FormatDouble(p.mean_synops) << ','
        << FormatDouble(p.mean_spikes) << '\n';
  }
}

void WriteStdpCsv(std::ostream& out, const StdpCurve& curve) {
  out << "# window " << curve.window << " steps; rate_floor " << FormatDouble(curve.rate_floor)
      << " of f_max; beta " << FormatDouble(curve.beta_used) << "\n"
      << "dt_steps,mean_delta_w,count\n";
  for (const StdpBin& b : curve.bins) {
    out << FormatDouble(b.dt_center) << ',' << FormatDouble(b.mean_delta_w) << ',' << b.count << '\n';
  }
}

void WriteStatsCsv(std::ostream& out, const SpikeStats& s, double energy_joules,
                   const EnergyModel& model) {
  out << "spikes_count,synops_count,spikes_per_neuron_per_image,input_layer_spike_fraction,"
         "input_block_synop_fraction,pj_per_synop,energy_joules\n"
      << s.spikes << ',' << s.synops << ',' << FormatDouble(s.spikes_per_neuron_per_image) << ','
      << FormatDouble(s.input_layer_spike_fraction) << ','
      << FormatDouble(s.input_block_synop_fraction) << ',' << FormatDouble(model.pj_per_synop)
      << ',' << FormatDouble(energy_joules) << '\n';
}

}  // namespace eqspike
