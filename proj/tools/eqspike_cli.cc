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

// eqspike: train, evaluate and analyse spiking equilibrium-propagation
// networks. Exit codes: 0 ok, 1 check failed, 2 usage, 3 io, 4 parse/config,
// 5 numeric.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eqspike/alignment.h"
#include "eqspike/config.h"
#include "eqspike/error.h"
#include "eqspike/io.h"
#include "eqspike/metrics.h"
#include "eqspike/mnist.h"
#include "eqspike/readout.h"
#include "eqspike/trainer.h"

namespace fs = std::filesystem;
using namespace eqspike;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::vector<std::string> sets;  // "section.key=value"
  bool quiet = false;
};

RunConfig ResolveConfig(const Globals& g) {
  RunConfig rc;
  if (!g.config_path.empty()) rc = LoadConfig(g.config_path);
  for (const std::string& s : g.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kUsage, "--set expects section.key=value");
    SetConfigValue(rc, s.substr(0, eq), s.substr(eq + 1));
  }
  if (g.seed) rc.trainer.seed = *g.seed;
  return rc;
}

std::vector<int> ParseLayers(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kUsage, "bad --layers value '" + text + "'");
    }
  }
  if (out.size() < 2) throw Error(ErrorKind::kUsage, "--layers needs at least two sizes");
  return out;
}

// Writes to `path`, or stdout when it is empty.
template <typename F>
void Emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  write(out);
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return in;
}

struct TrainArgs {
  std::string data_dir;
  std::string out_dir;
  std::optional<int> epochs;
  std::optional<int> train_n;
  std::optional<int> test_n;
  std::string resume;
  int checkpoint_every = 0;
};

int RunTrain(const Globals& g, const TrainArgs& a) {
  RunConfig rc = ResolveConfig(g);
  if (!a.data_dir.empty()) rc.data_dir = a.data_dir;
  if (a.epochs) rc.trainer.epochs = *a.epochs;
  if (a.train_n) rc.train_n = *a.train_n;
  if (a.test_n) rc.test_n = *a.test_n;

  TrainState state;
  if (!a.resume.empty()) {
    Checkpoint ck = LoadCheckpoint(a.resume);
    rc.trainer.hyper = ck.hyper;
    rc.trainer.layers = ck.state.weights.topology.layer_sizes();
    state = std::move(ck.state);
  }
  rc.trainer.Validate();
  if (a.resume.empty()) state = InitialTrainState(rc.trainer);

  const Dataset train = LoadMnist(rc.data_dir, Split::kTrain, rc.train_n);
  const Dataset test = LoadMnist(rc.data_dir, Split::kTest, rc.test_n);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  std::ofstream log(out / "run_log.csv");
  if (!log) throw Error(ErrorKind::kIo, "cannot write " + (out / "run_log.csv").string());
  WriteRunLogHeader(log, FormatConfig(rc));

  SpikeLog spikes;
  UpdateLog updates;
  TrainHooks hooks;
  hooks.log_images = rc.log_images;
  if (rc.log_images > 0) {
    hooks.spike_log = &spikes;
    hooks.update_log = &updates;
  }
  hooks.on_epoch = [&](const EpochMetrics& m, const TrainState& s) {
    WriteRunLogRow(log, m);
    log.flush();
    if (a.checkpoint_every > 0 && m.epoch % a.checkpoint_every == 0) {
      SaveCheckpoint(out / ("checkpoint_epoch" + std::to_string(m.epoch) + ".bin"),
                     {rc.trainer.hyper, s});
    }
    if (!g.quiet) {
      std::fprintf(stderr, "epoch %d  train %.4f  test %.4f  nudged %d\n", m.epoch,
                   m.train_acc, m.test_acc, m.nudged_images);
    }
  };
  Train(train, test, rc.trainer, state, hooks);
  SaveCheckpoint(out / "checkpoint.bin", {rc.trainer.hyper, state});
  if (rc.log_images > 0) {
    Emit((out / "spikes.csv").string(), [&](std::ostream& o) { WriteSpikeLog(o, spikes); });
    Emit((out / "updates.csv").string(), [&](std::ostream& o) { WriteUpdateLog(o, updates); });
  }
  return 0;
}

struct InferArgs {
  std::string checkpoint;
  std::string data_dir;
  std::optional<int> test_n;
  std::string sweep;
  std::string out;
};

int RunInfer(const Globals& g, const InferArgs& a) {
  RunConfig rc = ResolveConfig(g);
  if (!a.data_dir.empty()) rc.data_dir = a.data_dir;
  if (a.test_n) rc.test_n = *a.test_n;
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  rc.trainer.hyper = ck.hyper;
  rc.trainer.layers = ck.state.weights.topology.layer_sizes();
  rc.trainer.Validate();
  const Dataset test = LoadMnist(rc.data_dir, Split::kTest, rc.test_n);
  const double max_current = ResolveMaxCurrent(rc.trainer);
  const WeightStore& w = ck.state.weights;

  if (a.sweep.empty()) {
    const double acc =
        EvaluateAccuracy(w, ck.hyper, test, max_current, ck.hyper.t_free, rc.trainer.rate_window);
    Emit(a.out, [&](std::ostream& o) {
      o << "images,steps,rate_acc\n"
        << test.size() << ',' << ck.hyper.t_free << ',' << FormatDouble(acc) << '\n';
    });
    return 0;
  }
  const std::vector<double> horizons = ParseHorizonSweep(a.sweep);
  const AccuracyCurve curve =
      AccuracyVsTime(w, ck.hyper, test, max_current, horizons, rc.trainer.rate_window);
  Emit(a.out, [&](std::ostream& o) { WriteCurveCsv(o, curve); });
  if (!g.quiet) {
    std::fprintf(stderr,
                 "mean first output spike at step %.1f; %.1f spikes before it; "
                 "%d images without output spike\n",
                 curve.mean_first_spike_step, curve.mean_spikes_before_first_output,
                 curve.images_without_output_spike);
  }
  return 0;
}

int RunOracleCheck(const Globals& g, int instances) {
  const AlignmentConfig config;
  const std::uint64_t first = g.seed.value_or(1);
  std::vector<double> cos_sum(2, 0.0), sign_sum(2, 0.0);
  double fd_min = 1.0;
  for (int i = 0; i < instances; ++i) {
    const AlignmentResult r = CheckAlignment(config, first + i);
    if (!g.quiet) std::printf("seed %llu", static_cast<unsigned long long>(r.seed));
    for (size_t b = 0; b < r.spiking_vs_oracle.size() && b < 2; ++b) {
      const UpdateComparison& c = r.spiking_vs_oracle[b];
      cos_sum[b] += c.cosine.value_or(0.0);
      sign_sum[b] += c.sign_agreement.value_or(0.0);
      if (!g.quiet) {
        std::printf("  block%zu cos %.3f sign %.3f", b, c.cosine.value_or(0.0),
                    c.sign_agreement.value_or(0.0));
      }
    }
    const double fd = r.oracle_vs_fd.cosine.value_or(0.0);
    fd_min = std::min(fd_min, fd);
    if (!g.quiet) std::printf("  oracle-vs-fd cos %.4f\n", fd);
  }
  bool ok = fd_min >= 0.95;
  for (int b = 0; b < 2; ++b) {
    const double c = cos_sum[b] / instances;
    const double s = sign_sum[b] / instances;
    ok = ok && c >= 0.6 && s >= 0.8;
    std::printf("block%d mean cos %.3f (>= 0.6) mean sign %.3f (>= 0.8)\n", b, c, s);
  }
  std::printf("oracle-vs-fd min cos %.4f (>= 0.95)\n%s\n", fd_min, ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

struct StdpArgs {
  std::string spikes;
  std::string updates;
  std::string layers;
  std::string protocol;
  std::optional<double> beta;
  StdpOptions options;
  std::string out;
};

int RunStdp(const Globals& g, StdpArgs a) {
  RunConfig rc = ResolveConfig(g);
  HyperParams hyper = rc.trainer.hyper;
  if (a.beta) hyper.beta = *a.beta;
  a.options.beta_used = hyper.beta;
  StdpCurve curve;
  if (!a.protocol.empty()) {
    StdpProtocol p;
    p.accelerate = a.protocol == "accelerate";
    p.hyper = hyper;
    const ProtocolLogs logs = RunStdpProtocol(p);
    curve = ComputeStdpCurve(logs.spikes, logs.updates, logs.topology, hyper, a.options);
  } else {
    if (a.spikes.empty() || a.updates.empty()) {
      throw Error(ErrorKind::kUsage, "stdp needs --protocol or both --spikes and --updates");
    }
    const Topology topo(a.layers.empty() ? rc.trainer.layers : ParseLayers(a.layers));
    std::ifstream sin = OpenIn(a.spikes);
    std::ifstream uin = OpenIn(a.updates);
    const SpikeLog spikes = ReadSpikeLog(sin);
    const UpdateLog updates = ReadUpdateLog(uin);
    curve = ComputeStdpCurve(spikes, updates, topo, hyper, a.options);
  }
  Emit(a.out, [&](std::ostream& o) { WriteStdpCsv(o, curve); });
  return 0;
}

struct SynopsArgs {
  std::string spikes;
  std::string layers;
  int images = 1;
  double pj = 10.0;
  std::string out;
};

int RunSynops(const Globals& g, const SynopsArgs& a) {
  const RunConfig rc = ResolveConfig(g);
  const Topology topo(a.layers.empty() ? rc.trainer.layers : ParseLayers(a.layers));
  std::ifstream in = OpenIn(a.spikes);
  const SpikeLog spikes = ReadSpikeLog(in);
  const EnergyModel model{a.pj};
  const SpikeStats stats = ComputeSpikeStats(spikes, topo, a.images);
  const double joules = EnergyEstimate(stats.synops, model);
  Emit(a.out, [&](std::ostream& o) { WriteStatsCsv(o, stats, joules, model); });
  return 0;
}

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return 2;
    case ErrorKind::kIo:
      return 3;
    case ErrorKind::kParse:
    case ErrorKind::kConfig:
    case ErrorKind::kShape:
    case ErrorKind::kBadMagic:
    case ErrorKind::kTruncated:
    case ErrorKind::kCountMismatch:
      return 4;
    case ErrorKind::kNumericFault:
    case ErrorKind::kDivision:
    case ErrorKind::kInstability:
      return 5;
  }
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking equilibrium propagation simulator"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides trainer.seed)");
  app.add_option("--config", g.config_path, "config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "override one config key: section.key=value");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  auto* train = app.add_subcommand("train", "train on MNIST, write run log and checkpoint");
  train->fallthrough();
  TrainArgs ta;
  train->add_option("--data-dir", ta.data_dir, "directory holding the IDX files");
  train->add_option("--out-dir", ta.out_dir, "output directory")->required();
  train->add_option("--epochs", ta.epochs, "total epochs");
  train->add_option("--train-n", ta.train_n, "use the first N training images");
  train->add_option("--test-n", ta.test_n, "use the first N test images");
  train->add_option("--resume", ta.resume, "continue from a checkpoint");
  train->add_option("--checkpoint-every", ta.checkpoint_every,
                    "also save checkpoint_epochN.bin every N epochs");

  auto* infer = app.add_subcommand("infer", "evaluate a checkpoint on the test split");
  infer->fallthrough();
  InferArgs ia;
  infer->add_option("--checkpoint", ia.checkpoint, "checkpoint file")->required();
  infer->add_option("--data-dir", ia.data_dir, "directory holding the IDX files");
  infer->add_option("--test-n", ia.test_n, "use the first N test images");
  infer->add_option("--horizon-sweep", ia.sweep,
                    "start:stop:step in units of t*f_max; writes both readout curves");
  infer->add_option("--out", ia.out, "CSV output (default stdout)");

  auto* oracle = app.add_subcommand("oracle-check", "small-instance validation suite");
  oracle->fallthrough();
  int instances = 10;
  oracle->add_option("--instances", instances, "random 5-8-3 instances")
      ->check(CLI::PositiveNumber);

  auto* stdp = app.add_subcommand("stdp", "STDP-like curve from logs or a synthetic protocol");
  stdp->fallthrough();
  StdpArgs sa;
  stdp->add_option("--spikes", sa.spikes, "spike log CSV");
  stdp->add_option("--updates", sa.updates, "update log CSV");
  stdp->add_option("--layers", sa.layers, "topology of the logs, e.g. 784,100,10");
  stdp->add_option("--protocol", sa.protocol, "run a synthetic pairing instead")
      ->check(CLI::IsMember({"accelerate", "decelerate"}));
  stdp->add_option("--beta", sa.beta, "nudging strength");
  stdp->add_option("--block", sa.options.block, "weight block to analyse");
  stdp->add_option("--window", sa.options.window, "steps on each side")
      ->check(CLI::PositiveNumber);
  stdp->add_option("--rate-floor", sa.options.rate_floor, "fraction of f_max");
  stdp->add_option("--bins", sa.options.num_bins, "number of dt bins")
      ->check(CLI::PositiveNumber);
  stdp->add_option("--out", sa.out, "CSV output (default stdout)");

  auto* synops = app.add_subcommand("synops", "spike statistics and energy from a spike log");
  synops->fallthrough();
  SynopsArgs ya;
  synops->add_option("--spikes", ya.spikes, "spike log CSV")->required();
  synops->add_option("--layers", ya.layers, "topology of the log, e.g. 784,100,10");
  synops->add_option("--images", ya.images, "images covered by the log")
      ->check(CLI::PositiveNumber);
  synops->add_option("--pj", ya.pj, "energy per SynOp in pJ");
  synops->add_option("--out", ya.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*train) return RunTrain(g, ta);
    if (*infer) return RunInfer(g, ia);
    if (*oracle) return RunOracleCheck(g, instances);
    if (*stdp) return RunStdp(g, sa);
    if (*synops) return RunSynops(g, ya);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", ErrorKindName(e.kind()), e.what());
    return ExitCode(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return 3;
  }
  return 2;
}
