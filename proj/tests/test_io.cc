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


#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "eqspike/config.h"
#include "eqspike/error.h"
#include "eqspike/io.h"

using namespace eqspike;

namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no throw");
  return ErrorKind::kIo;
}

Checkpoint SampleCheckpoint() {
  Checkpoint c;
  c.hyper.u_th = 0.1;
  c.hyper.beta = 0.4;
  c.hyper.t_free = 800;
  c.state.rng.seed(77);
  c.state.rng.discard(13);
  c.state.weights = WeightStore::GlorotUniform(Topology({7, 5, 3}), c.state.rng, 0.7);
  c.state.weights.biases[1][2] = -1.0 / 3.0;
  c.state.weights.biases[2][0] = 1e-300;
  c.state.epoch = 4;
  c.state.synops_cumulative = 123456789012345;
  return c;
}

}  // namespace

TEST_CASE("config text round-trips through the formatter") {
  RunConfig c;
  c.trainer.layers = {784, 300, 10};
  c.trainer.hyper.u_th = 0.1;
  c.trainer.hyper.gamma_lif = 0.002;
  c.trainer.hyper.beta = 1.0 / 3.0;
  c.trainer.hyper.t_free = 800;
  c.trainer.target_rate_hi = 0.4;
  c.trainer.nudge_rate = NudgeRateSource::kFreeFinal;
  c.trainer.input_max_current = 0.123456789;
  c.trainer.shuffle = false;
  c.trainer.seed = 42;
  c.data_dir = "elsewhere";
  c.train_n = 100;
  const std::string text = FormatConfig(c);
  const RunConfig back = ParseConfig(text);
  CHECK(FormatConfig(back) == text);
  CHECK(back.trainer.hyper.beta == c.trainer.hyper.beta);
  CHECK(back.trainer.hyper.eta_r == c.trainer.hyper.eta_r);
  CHECK(back.trainer.layers == c.trainer.layers);
  CHECK(*back.trainer.target_rate_hi == 0.4);
  CHECK(back.trainer.nudge_rate == NudgeRateSource::kFreeFinal);
  CHECK(back.trainer.shuffle == false);
  CHECK(back.data_dir == "elsewhere");
  CHECK(FormatConfig(ParseConfig(FormatConfig(RunConfig{}))) == FormatConfig(RunConfig{}));
}

TEST_CASE("unset keys keep their defaults") {
  const RunConfig c = ParseConfig("# only one key\n[neuron]\nu_th = 0.5  # lower\n");
  CHECK(c.trainer.hyper.u_th == 0.5);
  CHECK(c.trainer.hyper.gamma_lif == HyperParams{}.gamma_lif);
  CHECK(c.trainer.layers == std::vector<int>{784, 100, 10});
  CHECK(c.trainer.hyper.learning_rate() == doctest::Approx(kDefaultLearningRate));
}

TEST_CASE("learning_rate is applied after tau and gamma_li") {
  const RunConfig c =
      ParseConfig("[learning]\nlearning_rate = 1.5e-3\ntau = 40\ngamma_li = 0.02\n");
  CHECK(c.trainer.hyper.learning_rate() == doctest::Approx(1.5e-3));
  CHECK(c.trainer.hyper.eta_r == doctest::Approx(1.5e-3 * 0.02 / 40));
}

TEST_CASE("config errors") {
  CHECK(KindOf([] { ParseConfig("[neuron]\nthreshold = 1\n"); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { ParseConfig("[nowhere]\nu_th = 1\n"); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { ParseConfig("[neuron]\nu_th 1\n"); }) == ErrorKind::kParse);
  CHECK(KindOf([] { ParseConfig("u_th = 1\n"); }) == ErrorKind::kParse);
  CHECK(KindOf([] { ParseConfig("[neuron\n"); }) == ErrorKind::kParse);
  CHECK(KindOf([] { ParseConfig("[neuron]\nu_th = fast\n"); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { ParseConfig("[neuron]\nt_refract = 0\n"); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { ParseConfig("[trainer]\nnudge_rate = \"later\"\n"); }) == ErrorKind::kConfig);
  CHECK(KindOf([] { LoadConfig("/nonexistent/eqspike.toml"); }) == ErrorKind::kIo);
}

TEST_CASE("single keys can be overridden") {
  RunConfig c;
  SetConfigValue(c, "trainer.epochs", "3");
  SetConfigValue(c, "network.layers", "[4, 2]");
  SetConfigValue(c, "trainer.target_rate_hi", "\"f_max\"");
  CHECK(c.trainer.epochs == 3);
  CHECK(c.trainer.layers == std::vector<int>{4, 2});
  CHECK_FALSE(c.trainer.target_rate_hi.has_value());
  CHECK_THROWS_AS(SetConfigValue(c, "trainer.epochz", "3"), Error);
}

TEST_CASE("checkpoint save, load, save is byte-identical") {
  const Checkpoint c = SampleCheckpoint();
  const std::string a = SerializeCheckpoint(c);
  const Checkpoint back = DeserializeCheckpoint(a);
  CHECK(SerializeCheckpoint(back) == a);
  CHECK(back.state.weights == c.state.weights);
  CHECK(back.state.epoch == 4);
  CHECK(back.state.synops_cumulative == 123456789012345);
  CHECK(back.hyper.t_free == 800);
  CHECK(back.hyper.beta == 0.4);
  // The generator continues where it stopped.
  std::mt19937_64 r1 = c.state.rng, r2 = back.state.rng;
  CHECK(r1() == r2());

  const auto path = std::filesystem::temp_directory_path() / "eqspike_ckpt_test.bin";
  SaveCheckpoint(path, c);
  CHECK(ReadFile(path) == a);
  CHECK(SerializeCheckpoint(LoadCheckpoint(path)) == a);
}

TEST_CASE("checkpoint layout starts with the magic and version") {
  const std::string a = SerializeCheckpoint(SampleCheckpoint());
  CHECK(a.substr(0, 8) == std::string("EQSPIKE\0", 8));
  CHECK(static_cast<int>(a[8]) == kCheckpointVersion);
  // u32 little-endian layer count
  CHECK(a[9] == 3);
  CHECK(a[10] == 0);
}

TEST_CASE("damaged checkpoints are rejected") {
  const std::string a = SerializeCheckpoint(SampleCheckpoint());
  std::string bad = a;
  bad[0] = 'X';
  CHECK(KindOf([&] { DeserializeCheckpoint(bad); }) == ErrorKind::kBadMagic);
  bad = a;
  bad[8] = 99;
  CHECK(KindOf([&] { DeserializeCheckpoint(bad); }) == ErrorKind::kConfig);
  CHECK(KindOf([&] { DeserializeCheckpoint(a.substr(0, a.size() - 1)); }) ==
        ErrorKind::kTruncated);
  CHECK(KindOf([&] { DeserializeCheckpoint(a + "x"); }) == ErrorKind::kTruncated);
  CHECK(KindOf([] { LoadCheckpoint("/nonexistent/ckpt.bin"); }) == ErrorKind::kIo);
}

TEST_CASE("spike and update logs round-trip through CSV") {
  const SpikeLog spikes = {{0, 3}, {1, 0}, {123456789012, 7}};
  const UpdateLog updates = {{5, 0, 1, 9, 1, 1.0 / 3.0, Phase::kNudge},
                             {6, 1, -1, 12, -1, -2.5e-7, Phase::kFree}};
  std::stringstream s1, s2;
  WriteSpikeLog(s1, spikes);
  WriteUpdateLog(s2, updates);
  CHECK(ReadSpikeLog(s1) == spikes);
  CHECK(ReadUpdateLog(s2) == updates);

  std::stringstream bad("step,neuron\n1,x\n");
  CHECK(KindOf([&] { ReadSpikeLog(bad); }) == ErrorKind::kParse);
  std::stringstream wrong("time,neuron\n");
  CHECK(KindOf([&] { ReadSpikeLog(wrong); }) == ErrorKind::kParse);
  std::stringstream cols("step,neuron\n1,2,3\n");
  CHECK(KindOf([&] { ReadSpikeLog(cols); }) == ErrorKind::kParse);
}

TEST_CASE("run log has the config echo, header and exact rows") {
  std::ostringstream out;
  WriteRunLogHeader(out, "[neuron]\nu_th = 0.1");
  EpochMetrics m;
  m.epoch = 1;
  m.train_acc = 0.8125;
  m.test_acc = 0.1;
  m.nudged_images = 4910;
  m.spikes_per_neuron_per_image = 58.5;
  m.synops_cumulative = 42;
  WriteRunLogRow(out, m);
  CHECK(out.str() ==
        "# [neuron]\n# u_th = 0.1\n"
        "epoch,train_acc,test_acc,nudged_images,spikes_per_neuron_per_image,synops_cumulative\n"
        "1,0.8125,0.1,4910,58.5,42\n");
}

TEST_CASE("shortest round-trip number formatting") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5e-7}) {
    CHECK(std::stod(FormatDouble(x)) == x);
  }
  CHECK(FormatDouble(0.1) == "0.1");
  CHECK(FormatDouble(2.0) == "2");
}
