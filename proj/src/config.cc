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

#include "eqspike/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "eqspike/error.h"

namespace eqspike {

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Bad(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::kConfig, key + ": " + what);
}

double ToDouble(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) Bad(key, "expected a number, got '" + std::string(v) + "'");
  return out;
}

long long ToInt(const std::string& key, std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) Bad(key, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

int ToInt32(const std::string& key, std::string_view v) {
  const long long x = ToInt(key, v);
  if (x < INT32_MIN || x > INT32_MAX) Bad(key, "integer out of range");
  return static_cast<int>(x);
}

bool ToBool(const std::string& key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  Bad(key, "expected true or false");
}

std::string ToString(const std::string& key, std::string_view v) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') Bad(key, "expected a quoted string");
  return std::string(v.substr(1, v.size() - 2));
}

std::vector<int> ToIntList(const std::string& key, std::string_view v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') Bad(key, "expected a list [a, b, ...]");
  std::vector<int> out;
  std::string_view rest = v.substr(1, v.size() - 2);
  while (!Trim(rest).empty()) {
    const auto comma = rest.find(',');
    out.push_back(ToInt32(key, Trim(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::string Num(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

struct Parsed {
  RunConfig config;
  std::optional<double> learning_rate;
};

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto hyper_d = [&](const char* name, double HyperParams::*field) {
      t[name] = [field](RunConfig& c, const std::string& k, std::string_view v) {
        c.trainer.hyper.*field = ToDouble(k, v);
      };
    };
    auto hyper_i = [&](const char* name, int HyperParams::*field) {
      t[name] = [field](RunConfig& c, const std::string& k, std::string_view v) {
        c.trainer.hyper.*field = ToInt32(k, v);
      };
    };
    t["network.layers"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.layers = ToIntList(k, v);
    };
    hyper_d("neuron.gamma_lif", &HyperParams::gamma_lif);
    hyper_d("neuron.u_th", &HyperParams::u_th);
    hyper_i("neuron.t_refract", &HyperParams::t_refract);
    hyper_d("neuron.dt", &HyperParams::dt);
    hyper_d("learning.gamma_li", &HyperParams::gamma_li);
    hyper_d("learning.beta", &HyperParams::beta);
    hyper_d("learning.eta_r", &HyperParams::eta_r);
    hyper_i("learning.tau", &HyperParams::tau);
    hyper_i("learning.n_filt", &HyperParams::n_filt);
    hyper_i("learning.t_free", &HyperParams::t_free);
    hyper_i("learning.t_nudge", &HyperParams::t_nudge);
    t["trainer.epochs"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.epochs = ToInt32(k, v);
    };
    t["trainer.seed"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      const long long s = ToInt(k, v);
      if (s < 0) Bad(k, "seed must be >= 0");
      c.trainer.seed = static_cast<std::uint64_t>(s);
    };
    t["trainer.target_rate_hi"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      if (v == "\"f_max\"") {
        c.trainer.target_rate_hi.reset();
      } else {
        c.trainer.target_rate_hi = ToDouble(k, v);
      }
    };
    t["trainer.target_rate_lo"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.target_rate_lo = ToDouble(k, v);
    };
    t["trainer.skip_threshold"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.skip_threshold = ToDouble(k, v);
    };
    t["trainer.rate_window"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.rate_window = ToInt32(k, v);
    };
    t["trainer.nudge_rate"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      const std::string s = ToString(k, v);
      if (s == "instantaneous") {
        c.trainer.nudge_rate = NudgeRateSource::kInstantaneous;
      } else if (s == "free_final") {
        c.trainer.nudge_rate = NudgeRateSource::kFreeFinal;
      } else {
        Bad(k, "expected \"instantaneous\" or \"free_final\"");
      }
    };
    t["trainer.init_scale"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.init_scale = ToDouble(k, v);
    };
    t["trainer.input_max_current"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      if (v == "\"auto\"") {
        c.trainer.input_max_current.reset();
      } else {
        c.trainer.input_max_current = ToDouble(k, v);
      }
    };
    t["trainer.shuffle"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.trainer.shuffle = ToBool(k, v);
    };
    t["data.dir"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.data_dir = ToString(k, v);
    };
    t["data.train_n"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.train_n = ToInt32(k, v);
    };
    t["data.test_n"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.test_n = ToInt32(k, v);
    };
    t["data.log_images"] = [](RunConfig& c, const std::string& k, std::string_view v) {
      c.log_images = ToInt32(k, v);
    };
    return t;
  }();
  return table;
}

void Apply(Parsed& p, const std::string& key, std::string_view value) {
  if (key == "learning.learning_rate") {
    p.learning_rate = ToDouble(key, value);
    return;
  }
  const auto it = Setters().find(key);
  if (it == Setters().end()) Bad(key, "unknown key");
  it->second(p.config, key, value);
}

void Finish(Parsed& p) {
  // A learning rate is converted once tau and gamma_li are final.
  if (p.learning_rate) p.config.trainer.hyper.set_learning_rate(*p.learning_rate);
  p.config.trainer.Validate();
  if (p.config.train_n < 0 || p.config.test_n < 0 || p.config.log_images < 0) {
    throw Error(ErrorKind::kConfig, "data counts must be >= 0");
  }
}

}  // namespace

RunConfig ParseConfig(std::string_view text, RunConfig base) {
  Parsed p{std::move(base), std::nullopt};
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    // '#' only starts a comment outside quotes.
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::kParse, where + ": unterminated section");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::kParse, where + ": expected key = value");
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw Error(ErrorKind::kParse, where + ": empty key or value");
    if (section.empty()) throw Error(ErrorKind::kParse, where + ": key outside a section");
    Apply(p, section + "." + key, value);
  }
  Finish(p);
  return p.config;
}

RunConfig LoadConfig(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), std::move(base));
}

void SetConfigValue(RunConfig& config, std::string_view dotted_key, std::string_view value) {
  Parsed p{config, std::nullopt};
  Apply(p, std::string(dotted_key), Trim(value));
  Finish(p);
  config = std::move(p.config);
}

std::string FormatConfig(const RunConfig& c) {
  const TrainerConfig& t = c.trainer;
  const HyperParams& h = t.hyper;
  std::ostringstream o;
  o << "[network]\nlayers = [";
  for (size_t i = 0; i < t.layers.size(); ++i) o << (i ? ", " : "") << t.layers[i];
  o << "]\n\n[neuron]\n"
    << "gamma_lif = " << Num(h.gamma_lif) << "\n"
    << "u_th = " << Num(h.u_th) << "\n"
    << "t_refract = " << h.t_refract << "\n"
    << "dt = " << Num(h.dt) << "\n\n[learning]\n"
    << "gamma_li = " << Num(h.gamma_li) << "\n"
    << "beta = " << Num(h.beta) << "\n"
    << "eta_r = " << Num(h.eta_r) << "  # learning_rate = " << Num(h.learning_rate()) << "\n"
    << "tau = " << h.tau << "\n"
    << "n_filt = " << h.n_filt << "\n"
    << "t_free = " << h.t_free << "\n"
    << "t_nudge = " << h.t_nudge << "\n\n[trainer]\n"
    << "epochs = " << t.epochs << "\n"
    << "seed = " << t.seed << "\n"
    << "target_rate_hi = "
    << (t.target_rate_hi ? Num(*t.target_rate_hi) : std::string("\"f_max\"")) << "\n"
    << "target_rate_lo = " << Num(t.target_rate_lo) << "\n"
    << "skip_threshold = " << Num(t.skip_threshold) << "\n"
    << "rate_window = " << t.rate_window << "\n"
    << "nudge_rate = \""
    << (t.nudge_rate == NudgeRateSource::kInstantaneous ? "instantaneous" : "free_final")
    << "\"\n"
    << "init_scale = " << Num(t.init_scale) << "\n"
    << "input_max_current = "
    << (t.input_max_current ? Num(*t.input_max_current) : std::string("\"auto\"")) << "\n"
    << "shuffle = " << (t.shuffle ? "true" : "false") << "\n\n[data]\n"
    << "dir = \"" << c.data_dir << "\"\n"
    << "train_n = " << c.train_n << "\n"
    << "test_n = " << c.test_n << "\n"
    << "log_images = " << c.log_images << "\n";
  return o.str();
}

}  // namespace eqspike
