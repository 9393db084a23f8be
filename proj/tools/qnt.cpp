// Copyright 2026 The qnt Authors
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

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnt/experiments.hpp"
#include "qnt/topology_io.hpp"

namespace {

/// "a,b,c" or "start:stop:step" (inclusive).
template <class T>
std::vector<T> parse_list(const std::string& text) {
  auto to_value = [](const std::string& s) -> T {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      v = std::stod(s, &used);
    } else {
      if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
      v = static_cast<T>(std::stoull(s, &used));
    }
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  };
  std::vector<T> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<std::string> parts;
      std::size_t pos = 0;
      while (true) {
        const auto next = text.find(':', pos);
        parts.push_back(text.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
      }
      if (parts.size() != 3) throw std::invalid_argument(text);
      const T start = to_value(parts[0]), stop = to_value(parts[1]),
              step = to_value(parts[2]);
      if (!(step > T{0})) throw std::invalid_argument(text);
      for (std::size_t k = 0;; ++k) {
        const T v = static_cast<T>(start + static_cast<T>(k) * step);
        if constexpr (std::is_floating_point_v<T>) {
          if (v > stop + step * 1e-9) break;
        } else {
          if (v > stop) break;
        }
        out.push_back(v);
      }
    } else {
      std::size_t pos = 0;
      while (pos <= text.size()) {
        const auto next = text.find(',', pos);
        out.push_back(to_value(text.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
      }
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("list", "cannot parse '" + text + "'");
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list");
  return out;
}

struct Options {
  std::string topology;
  double s = 1.0;
  double m = 1.0;
  std::string m_samples = "1000:20000:1000";
  std::string n_samples = "1000:20000:1000";
  int trials = 100;
  std::string seed;
  std::string out;
  unsigned threads = 1;
  bool timing = false;
  // sweep
  std::uint64_t fixed = 10000;
  // loss
  std::string t_send = "0.1,0.3,0.5,0.7,0.9";
  std::string t_c = "0.05,0.35,0.75,5,10";
  double horizon = 3600.0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--topology", o.topology, "Topology file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--s", o.s, "Preparation parameter s")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--m", o.m, "Measurement parameter m")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--m-samples", o.m_samples,
                  "Protocol sample sizes M: a,b,c or start:stop:step");
  cmd->add_option("--n-samples", o.n_samples,
                  "Unicast sample sizes N: a,b,c or start:stop:step");
  cmd->add_option("--trials", o.trials, "Trials per grid cell")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Master seed (default: $QNT_SEED or 1)");
  cmd->add_option("--out", o.out, "CSV output file (default: stdout)");
  cmd->add_option("--threads", o.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", o.timing, "Record wall time in runtime_ms");
}

std::uint64_t resolve_seed(const std::string& flag) {
  std::string text = flag;
  if (text.empty()) {
    if (const char* env = std::getenv("QNT_SEED")) text = env;
  }
  if (text.empty()) return 1;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--seed", "invalid seed '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum network tomography experiments"};
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    qnt::ExperimentKind kind;
    const char* help;
  };
  const Sub subs[] = {
      {"star", qnt::ExperimentKind::Star, "Mergecast on a three-link star"},
      {"spam-s", qnt::ExperimentKind::SpamS, "Estimate the preparation parameter s"},
      {"spam-m", qnt::ExperimentKind::SpamM, "Estimate the measurement parameter m"},
      {"etch", qnt::ExperimentKind::Etch, "Progressive etching over a network"},
      {"loss", qnt::ExperimentKind::Loss, "Mergecast with photon loss and memory"},
      {"sweep", qnt::ExperimentKind::Sweep,
       "Star Mergecast varying M with N fixed, then N with M fixed"},
  };
  std::vector<std::pair<CLI::App*, qnt::ExperimentKind>> commands;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    if (s.kind == qnt::ExperimentKind::Sweep) {
      cmd->add_option("--fixed", o.fixed, "Sample size held fixed")
          ->check(CLI::PositiveNumber);
    }
    if (s.kind == qnt::ExperimentKind::Loss) {
      cmd->add_option("--t-send", o.t_send, "Send intervals in seconds");
      cmd->add_option("--t-c", o.t_c, "Memory cutoffs in seconds");
      cmd->add_option("--horizon", o.horizon, "Run length in seconds")
          ->check(CLI::PositiveNumber);
    }
    commands.emplace_back(cmd, s.kind);
  }

  std::string json_in;
  CLI::App* export_cmd =
      app.add_subcommand("export-json", "Print a topology file as JSON");
  export_cmd->add_option("topology", json_in, "Topology file")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (export_cmd->parsed()) {
      std::cout << qnt::to_json(qnt::load_topology(json_in)).dump(2) << '\n';
      return 0;
    }
    qnt::ExperimentConfig cfg;
    for (const auto& [cmd, kind] : commands)
      if (cmd->parsed()) cfg.kind = kind;
    cfg.topology_path = o.topology;
    cfg.spam = {o.s, o.m};
    cfg.m_samples = parse_list<std::uint64_t>(o.m_samples);
    cfg.n_samples = parse_list<std::uint64_t>(o.n_samples);
    cfg.trials = o.trials;
    cfg.seed = resolve_seed(o.seed);
    cfg.output_path = o.out;
    cfg.threads = o.threads;
    cfg.timing = o.timing;
    cfg.fixed = o.fixed;
    cfg.t_send = parse_list<double>(o.t_send);
    cfg.t_c = parse_list<double>(o.t_c);
    cfg.horizon_s = o.horizon;

    const auto rows = qnt::run_experiment(cfg);
    const std::string csv = qnt::format_csv(cfg, rows);
    if (cfg.output_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(cfg.output_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + cfg.output_path);
      f << csv;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "qnt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
