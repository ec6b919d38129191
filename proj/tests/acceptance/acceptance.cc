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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. The desk-scale criteria train twice on the shipped
// MNIST subset with configs/desk.toml and take a while on one core.
//
//   acceptance [--only A1,A5,...] [--config path] [--data-dir path]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eqspike/alignment.h"
#include "eqspike/config.h"
#include "eqspike/error.h"
#include "eqspike/io.h"
#include "eqspike/metrics.h"
#include "eqspike/mnist.h"
#include "eqspike/rate_tracker.h"
#include "eqspike/readout.h"
#include "eqspike/trainer.h"

using namespace eqspike;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int failures = 0;

void Report(const char* id, bool ok, const std::string& detail) {
  std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void CheckAlignmentCriteria(bool a1, bool a2) {
  const auto start = Clock::now();
  const AlignmentConfig config;
  constexpr int kInstances = 10;
  double cos_sum[2] = {0, 0}, sign_sum[2] = {0, 0};
  double fd_min = 1.0;
  for (int i = 0; i < kInstances; ++i) {
    const AlignmentResult r = CheckAlignment(config, 1 + i);
    for (int b = 0; b < 2; ++b) {
      cos_sum[b] += r.spiking_vs_oracle[b].cosine.value_or(0.0);
      sign_sum[b] += r.spiking_vs_oracle[b].sign_agreement.value_or(0.0);
    }
    fd_min = std::min(fd_min, r.oracle_vs_fd.cosine.value_or(0.0));
  }
  const double secs = Seconds(start);
  if (a1) {
    bool ok = secs < 120;
    std::string detail;
    for (int b = 0; b < 2; ++b) {
      const double c = cos_sum[b] / kInstances, s = sign_sum[b] / kInstances;
      ok = ok && c >= 0.6 && s >= 0.8;
      detail += Fmt("block%d cos %.3f sign %.3f  ", b, c, s);
    }
    Report("A1", ok, detail + Fmt("(%d instances, %.1f s)", kInstances, secs));
  }
  if (a2) {
    Report("A2", fd_min >= 0.95 && secs < 120,
           Fmt("min oracle-vs-fd cosine %.4f over %d instances", fd_min, kInstances));
  }
}

void CheckRateEstimator() {
  const double g = 0.01;
  double worst_avg = 0.0;
  for (int p : {2, 3, 5, 10}) {
    RateTracker tr(20, 20);
    const int warm = static_cast<int>(5 / g);
    for (int t = 0; t < warm; ++t) tr.Advance(t % p == 0, g);
    double sum = 0.0;
    const int span = 100 * p;
    for (int t = warm; t < warm + span; ++t) {
      tr.Advance(t % p == 0, g);
      sum += tr.v_li();
    }
    const double expected = (1.0 / p) / g;
    worst_avg = std::max(worst_avg, std::abs(sum / span - expected) / expected);
  }

  // Linear ramp from silence to f_max with a phase-accumulator spike train.
  const int tau = 20, ramp = 20000;
  const double slope = 0.5 / ramp;
  RateTracker tr(tau, 20);
  double phase = 0.0, sum = 0.0;
  int n = 0;
  for (int t = 0; t < ramp; ++t) {
    phase += slope * t;
    const bool spike = phase >= 1.0;
    if (spike) phase -= 1.0;
    tr.Advance(spike, g);
    if (t >= ramp / 4 && t < 3 * ramp / 4) {
      sum += tr.smoothed();
      ++n;
    }
  }
  const double expected = (tau / g) * slope;
  const double ramp_err = std::abs(sum / n - expected) / expected;
  Report("A5", worst_avg <= 0.02 && ramp_err <= 0.10,
         Fmt("constant-rate error %.4f (<= 0.02), ramp error %.4f (<= 0.10)", worst_avg,
             ramp_err));
}

// Reference counts straight from the layer sizes.
std::int64_t RecountSynops(const SpikeLog& log, const std::vector<int>& sizes) {
  std::vector<int> layer_of;
  for (size_t l = 0; l < sizes.size(); ++l) layer_of.insert(layer_of.end(), sizes[l], l);
  std::int64_t total = 0;
  for (const SpikeEvent& e : log) {
    const size_t l = layer_of[e.neuron];
    if (l > 0) total += sizes[l - 1];
    if (l + 1 < sizes.size()) total += sizes[l + 1];
  }
  return total;
}

void CheckAccounting(const SpikeLog& log, const std::vector<int>& sizes, int images) {
  const Topology topology(sizes);
  const std::int64_t synops = CountSynops(log, topology);
  const std::int64_t recount = RecountSynops(log, sizes);
  const SpikeStats stats = ComputeSpikeStats(log, topology, images);

  std::int64_t input_spikes = 0;
  for (const SpikeEvent& e : log) input_spikes += e.neuron < sizes[0];
  const int neurons = topology.num_neurons();
  const bool stats_ok =
      stats.spikes == static_cast<std::int64_t>(log.size()) && stats.synops == recount &&
      stats.spikes_per_neuron_per_image ==
          static_cast<double>(log.size()) / neurons / images &&
      stats.input_layer_spike_fraction ==
          static_cast<double>(input_spikes) / static_cast<double>(log.size());

  // Round-trip through the CSV format before counting again.
  std::stringstream csv;
  WriteSpikeLog(csv, log);
  const bool csv_ok = CountSynops(ReadSpikeLog(csv), topology) == synops;

  const double e1 = EnergyEstimate(150000);
  const double e2 = EnergyEstimate(4230000000000);
  const bool energy_ok = e1 == 150000 * 10.0 / 1e12 && std::abs(e1 - 1.5e-6) < 1e-18 &&
                         e2 == 4230000000000 * 10.0 / 1e12 && std::abs(e2 - 42.3) < 1e-12;
  Report("A7", synops == recount && stats_ok && csv_ok && energy_ok && !log.empty(),
         Fmt("%zu logged spikes, SynOps %lld vs recount %lld, 150000 SynOps -> %.3g J, "
             "4.23e12 SynOps -> %.4g J",
             log.size(), static_cast<long long>(synops), static_cast<long long>(recount), e1,
             e2));
}

void CheckStdp() {
  auto curve = [](bool accelerate, double beta) {
    StdpProtocol p;
    p.accelerate = accelerate;
    p.hyper.beta = beta;
    const ProtocolLogs logs = RunStdpProtocol(p);
    StdpOptions o;
    o.beta_used = beta;
    return ComputeStdpCurve(logs.spikes, logs.updates, logs.topology, p.hyper, o);
  };
  auto peak = [](const StdpCurve& c) {
    double m = 0.0;
    for (const StdpBin& b : c.bins) m = std::max(m, std::abs(b.mean_delta_w));
    return m;
  };
  // Mean over the populated bins on the relevant side.
  auto side_mean = [](const StdpCurve& c, bool positive_dt) {
    double sum = 0.0;
    std::int64_t n = 0;
    bool all_signed = true;
    for (const StdpBin& b : c.bins) {
      if (b.count == 0 || (positive_dt ? b.dt_center <= 0 : b.dt_center >= 0)) continue;
      sum += b.mean_delta_w * b.count;
      n += b.count;
      all_signed = all_signed && (positive_dt ? b.mean_delta_w > 0 : b.mean_delta_w < 0);
    }
    return std::pair{n ? sum / n : 0.0, all_signed && n > 0};
  };
  const StdpCurve acc = curve(true, 0.5), dec = curve(false, 0.5);
  const auto [acc_mean, acc_ok] = side_mean(acc, true);
  const auto [dec_mean, dec_ok] = side_mean(dec, false);
  const double acc_peak = peak(acc), acc_peak2 = peak(curve(true, 1.0));
  const double dec_peak = peak(dec), dec_peak2 = peak(curve(false, 1.0));
  Report("A8",
         acc_ok && dec_ok && acc_mean > 0 && dec_mean < 0 && acc_peak2 > acc_peak &&
             dec_peak2 > dec_peak,
         Fmt("accelerate mean dw %.3g (dt>0), decelerate mean dw %.3g (dt<0), peak |dw| "
             "beta 0.5 -> 1: %.3g -> %.3g and %.3g -> %.3g",
             acc_mean, dec_mean, acc_peak, acc_peak2, dec_peak, dec_peak2));
}

struct DeskRun {
  std::string run_log;
  std::string checkpoint;
  std::vector<EpochMetrics> rows;
  TrainState state;
  SpikeLog spikes;
  double seconds = 0.0;
};

DeskRun TrainDesk(const RunConfig& rc, const Dataset& train, const Dataset& test,
                  bool with_logs) {
  const auto start = Clock::now();
  DeskRun run;
  std::ostringstream log;
  WriteRunLogHeader(log, FormatConfig(rc));
  run.state = InitialTrainState(rc.trainer);
  UpdateLog updates;
  TrainHooks hooks;
  if (with_logs) {
    hooks.log_images = std::max(rc.log_images, 10);
    hooks.spike_log = &run.spikes;
    hooks.update_log = &updates;
  }
  hooks.on_epoch = [&](const EpochMetrics& m, const TrainState&) {
    WriteRunLogRow(log, m);
    std::printf("   epoch %d  train %.4f  test %.4f  nudged %d  (%.0f s)\n", m.epoch,
                m.train_acc, m.test_acc, m.nudged_images, Seconds(start));
    std::fflush(stdout);
  };
  run.rows = Train(train, test, rc.trainer, run.state, hooks);
  run.run_log = log.str();
  run.checkpoint = SerializeCheckpoint({rc.trainer.hyper, run.state});
  run.seconds = Seconds(start);
  return run;
}

std::set<std::string> ParseOnly(const std::string& list) {
  std::set<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) out.insert(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path = EQSPIKE_DESK_CONFIG;
  std::string data_dir = EQSPIKE_DATA_DIR;
  std::set<std::string> only;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--only") {
      only = ParseOnly(argv[i + 1]);
    } else if (flag == "--config") {
      config_path = argv[i + 1];
    } else if (flag == "--data-dir") {
      data_dir = argv[i + 1];
    } else {
      std::fprintf(stderr, "unknown flag %s\n", flag.c_str());
      return 2;
    }
  }
  auto want = [&](const char* id) { return only.empty() || only.count(id) > 0; };

  try {
    if (want("A1") || want("A2")) CheckAlignmentCriteria(want("A1"), want("A2"));
    if (want("A5")) CheckRateEstimator();
    if (want("A8")) CheckStdp();

    const bool desk = want("A3") || want("A4") || want("A6") || want("A7") || want("A9");
    if (!desk) return failures == 0 ? 0 : 1;

    RunConfig rc = LoadConfig(config_path);
    rc.data_dir = data_dir;
    const Dataset train = LoadMnist(rc.data_dir, Split::kTrain, rc.train_n);
    const Dataset test = LoadMnist(rc.data_dir, Split::kTest, rc.test_n);
    std::printf("desk run: %d train / %d test images, %d epochs, layers %d-%d-%d\n",
                train.size(), test.size(), rc.trainer.epochs, rc.trainer.layers[0],
                rc.trainer.layers[1], rc.trainer.layers[2]);
    std::fflush(stdout);
    const DeskRun first = TrainDesk(rc, train, test, true);

    if (want("A3")) {
      const double acc = first.rows.back().test_acc;
      Report("A3", acc >= 0.90 && rc.trainer.epochs <= 10,
             Fmt("test accuracy %.4f after %d epochs (>= 0.90), %.0f s", acc,
                 rc.trainer.epochs, first.seconds));
    }
    if (want("A4")) {
      const std::vector<double> horizon = {10.0};
      const AccuracyCurve curve =
          AccuracyVsTime(first.state.weights, rc.trainer.hyper, test,
                         ResolveMaxCurrent(rc.trainer), horizon, rc.trainer.rate_window);
      const CurvePoint& p = curve.points.front();
      const double gap = std::abs(p.rate_acc - p.first_spike_acc);
      Report("A4", gap <= 0.03,
             Fmt("horizon 10/f_max: rate %.4f, first spike %.4f, gap %.4f (<= 0.03), "
                 "%d images without output spike",
                 p.rate_acc, p.first_spike_acc, gap, curve.images_without_output_spike));
    }
    if (want("A6")) {
      const int n1 = first.rows.front().nudged_images, nl = first.rows.back().nudged_images;
      Report("A6", first.rows.size() > 1 && nl < n1,
             Fmt("nudged images epoch 1: %d, epoch %d: %d", n1, first.rows.back().epoch, nl));
    }
    if (want("A7")) CheckAccounting(first.spikes, rc.trainer.layers, std::max(rc.log_images, 10));
    if (want("A9")) {
      const DeskRun second = TrainDesk(rc, train, test, false);
      const bool same_log = first.run_log == second.run_log;
      const bool same_ckpt = first.checkpoint == second.checkpoint;
      Report("A9", same_log && same_ckpt,
             Fmt("run log %s, checkpoint %s (%zu bytes)", same_log ? "identical" : "differs",
                 same_ckpt ? "byte-identical" : "differs", first.checkpoint.size()));
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", ErrorKindName(e.kind()), e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
