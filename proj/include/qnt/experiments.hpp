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

#pragma once

/**
 * Experiment drivers behind the command-line tool. Each driver expands a grid
 * into cells, runs the cells on a small worker pool and returns CSV rows in
 * grid order.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qnt/etching.hpp"
#include "qnt/loss_sim.hpp"
#include "qnt/protocols.hpp"
#include "qnt/rng.hpp"
#include "qnt/statistics.hpp"
#include "qnt/topology.hpp"
#include "qnt/topology_io.hpp"

namespace qnt {

enum class ExperimentKind { Star, SpamS, SpamM, Etch, Loss, Sweep };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Star: return "star";
    case ExperimentKind::SpamS: return "spam-s";
    case ExperimentKind::SpamM: return "spam-m";
    case ExperimentKind::Etch: return "etch";
    case ExperimentKind::Loss: return "loss";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "?";
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Star;
  /// Empty selects the built-in network for the experiment.
  std::string topology_path;
  SpamModel spam;
  std::vector<std::uint64_t> m_samples{10000};
  std::vector<std::uint64_t> n_samples{10000};
  int trials = 100;
  std::uint64_t seed = 1;
  std::string output_path;
  unsigned threads = 1;
  /// Write measured wall time instead of 0 in runtime_ms.
  bool timing = false;
  /// Sweep: sample size held fixed while the other one varies.
  std::uint64_t fixed = 10000;
  /// Loss grid.
  std::vector<double> t_send{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> t_c{0.05, 0.35, 0.75, 5.0, 10.0};
  double horizon_s = 3600.0;
  FiberParams fiber;
  double t1_s = 10.0;
  double t2_s = 1.0;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (kind != ExperimentKind::Loss &&
        (m_samples.empty() || n_samples.empty())) {
      throw std::invalid_argument("sample grids must be non-empty");
    }
    for (auto v : m_samples)
      if (v == 0) throw std::invalid_argument("M must be >= 1");
    for (auto v : n_samples)
      if (v == 0) throw std::invalid_argument("N must be >= 1");
    if (kind == ExperimentKind::Loss && (t_send.empty() || t_c.empty())) {
      throw std::invalid_argument("loss grids must be non-empty");
    }
    spam.validate();
  }
};

struct CsvRow {
  std::string experiment;
  double M = 0;
  double N = 0;
  double s = 1;
  double m = 1;
  double truth = 0;
  double mse = 0;
  double mse_std = 0;
  double crb = std::numeric_limits<double>::quiet_NaN();
  double runtime_ms = 0;
  std::uint64_t seed = 0;
  /// Trials dropped because the estimator denominator vanished.
  std::size_t unestimable = 0;
};

inline const char* kCsvColumns =
    "experiment,M,N,s,m,truth,mse,mse_std,crb,runtime_ms,seed";

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_real(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

/// Header comment carrying the configuration and seed.
inline std::string config_comment(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "# qnt experiment=" << to_string(c.kind)
      << " topology=" << (c.topology_path.empty() ? "builtin" : c.topology_path)
      << " s=" << format_real(c.spam.s) << " m=" << format_real(c.spam.m)
      << " m_samples=" << join_list(c.m_samples)
      << " n_samples=" << join_list(c.n_samples) << " trials=" << c.trials
      << " seed=" << c.seed;
  if (c.kind == ExperimentKind::Sweep) out << " fixed=" << c.fixed;
  if (c.kind == ExperimentKind::Loss) {
    out << " t_send=" << join_list(c.t_send) << " t_c=" << join_list(c.t_c)
        << " horizon=" << format_real(c.horizon_s)
        << " fiber_km=" << format_real(c.fiber.length_km)
        << " p0=" << format_real(c.fiber.p0)
        << " alpha=" << format_real(c.fiber.alpha_per_km)
        << " t1=" << format_real(c.t1_s) << " t2=" << format_real(c.t2_s);
  }
  return out.str();
}

inline std::string format_csv(const ExperimentConfig& c,
                              const std::vector<CsvRow>& rows) {
  std::string out = config_comment(c) + "\n" + kCsvColumns + "\n";
  for (const auto& r : rows) {
    out += r.experiment + "," + format_real(r.M) + "," + format_real(r.N) +
           "," + format_real(r.s) + "," + format_real(r.m) + "," +
           format_real(r.truth) + "," + format_real(r.mse) + "," +
           format_real(r.mse_std) + "," + format_real(r.crb) + "," +
           format_real(r.runtime_ms) + "," + std::to_string(r.seed) + "\n";
  }
  for (const auto& r : rows) {
    if (r.unestimable) {
      out += "# " + r.experiment + " M=" + format_real(r.M) +
             " N=" + format_real(r.N) + ": " + std::to_string(r.unestimable) +
             " trials unestimable and excluded\n";
    }
  }
  return out;
}

/// Runs `n` jobs on up to `threads` workers; job i writes only slot i.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Default networks
// ---------------------------------------------------------------------------

inline Topology default_star() {
  return star_topology(PauliChannel::depolarizing(0.5),
                       PauliChannel::depolarizing(0.75),
                       PauliChannel::depolarizing(0.65));
}

inline Topology default_etching_network() {
  return mesh19_topology(PauliChannel::bit_flip(0.1));
}

/// Two-channel path with q_Z = (0.5, 0.25).
inline std::vector<PauliChannel> default_spam_path() {
  return {PauliChannel::depolarizing(0.5), PauliChannel::depolarizing(0.75)};
}

struct StarChannels {
  PauliChannel target;
  PauliChannel a2;
  PauliChannel b;
};

/// The three channels of a star network, in edge id order.
inline StarChannels star_channels(const Topology& t) {
  std::vector<NodeId> centers;
  for (const auto& [id, kind] : t.nodes())
    if (kind == NodeKind::Internal) centers.push_back(id);
  if (centers.size() != 1 || t.degree(centers[0]) != 3 || t.edge_count() != 3) {
    throw std::invalid_argument(
        "star experiment needs one internal node joined to three monitors");
  }
  std::vector<PauliChannel> ch;
  for (const auto& [id, e] : t.edges()) ch.push_back(e.channel);
  return {ch[0], ch[1], ch[2]};
}

// ---------------------------------------------------------------------------
// Per-cell kernels
// ---------------------------------------------------------------------------

struct CellEstimates {
  std::vector<double> values;
  std::size_t unestimable = 0;
};

inline CellEstimates star_cell(const StarChannels& star, const SpamModel& spam,
                               std::uint64_t M, std::uint64_t N, int trials,
                               std::uint64_t seed, std::uint32_t cell) {
  const double pm = mergecast_prob(star.target, ChannelPath(&star.a2, 1),
                                   ChannelPath(&star.b, 1), spam);
  const PauliChannel uni[] = {star.a2, star.b};
  const double pu = unicast_prob(uni, spam);
  CellEstimates out;
  for (int k = 0; k < trials; ++k) {
    RandomStream stream(seed, cell, static_cast<std::uint32_t>(k));
    const auto merge = sample_protocol(pm, M, stream);
    const auto ref = sample_protocol(pu, N, stream);
    try {
      out.values.push_back(estimate_q_mergecast(merge, ref, spam.s));
    } catch (const UnestimableError&) {
      ++out.unestimable;
    }
  }
  return out;
}

inline CellEstimates spam_s_cell(const std::vector<PauliChannel>& path,
                                 const SpamModel& spam, std::uint64_t M,
                                 std::uint64_t N, int trials,
                                 std::uint64_t seed, std::uint32_t cell) {
  const double p1 = spam_s_protocol_prob(path, spam);
  const double p0 = unicast_prob(path, spam);
  CellEstimates out;
  for (int k = 0; k < trials; ++k) {
    RandomStream stream(seed, cell, static_cast<std::uint32_t>(k));
    const auto o1 = sample_protocol(p1, M, stream);
    const auto o0 = sample_protocol(p0, N, stream);
    try {
      out.values.push_back(estimate_s(o1, o0));
    } catch (const UnestimableError&) {
      ++out.unestimable;
    }
  }
  return out;
}

/// The control path reuses the target path's parameters on its own branch.
inline CellEstimates spam_m_cell(const std::vector<PauliChannel>& path,
                                 const SpamModel& spam, std::uint64_t M,
                                 std::uint64_t N, int trials,
                                 std::uint64_t seed, std::uint32_t cell) {
  const auto joint = spam_m_protocol_probs(path, path, spam);
  const double p0 = unicast_prob(path, spam);
  CellEstimates out;
  for (int k = 0; k < trials; ++k) {
    RandomStream stream(seed, cell, static_cast<std::uint32_t>(k));
    const auto counts = sample_joint(joint, M, stream);
    ProtocolOutcome o2{joint.p_sum, counts[0] + counts[3], M, stream.key()};
    const auto o0 = sample_protocol(p0, N, stream);
    try {
      out.values.push_back(estimate_m(o2, o0));
    } catch (const UnestimableError&) {
      ++out.unestimable;
    }
  }
  return out;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

inline CsvRow make_row(std::string name, double M, double N,
                       const ExperimentConfig& c, double truth,
                       const CellEstimates& est, double crb) {
  CsvRow r;
  r.experiment = std::move(name);
  r.M = M;
  r.N = N;
  r.s = c.spam.s;
  r.m = c.spam.m;
  r.truth = truth;
  r.crb = crb;
  r.seed = c.seed;
  r.unestimable = est.unestimable;
  if (est.values.empty()) {
    r.mse = r.mse_std = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto agg = aggregate_mse(est.values, truth);
    r.mse = agg.mse;
    r.mse_std = agg.mse_std;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

namespace detail {

struct GridCell {
  std::uint64_t M;
  std::uint64_t N;
  std::string label;
};

inline std::vector<GridCell> sample_grid(const ExperimentConfig& c) {
  std::vector<GridCell> cells;
  if (c.kind == ExperimentKind::Sweep) {
    for (auto M : c.m_samples) cells.push_back({M, c.fixed, "sweep-M"});
    for (auto N : c.n_samples) cells.push_back({c.fixed, N, "sweep-N"});
    return cells;
  }
  for (auto M : c.m_samples)
    for (auto N : c.n_samples) cells.push_back({M, N, to_string(c.kind)});
  return cells;
}

inline Topology resolve_topology(const ExperimentConfig& c,
                                 const std::function<Topology()>& fallback) {
  return c.topology_path.empty() ? fallback() : load_topology(c.topology_path);
}

inline std::vector<PauliChannel> spam_path(const ExperimentConfig& c) {
  if (c.topology_path.empty()) return default_spam_path();
  // A path file lists its channels as edges; they are used in id order.
  const Topology t = load_topology(c.topology_path);
  std::vector<PauliChannel> out;
  for (const auto& [id, e] : t.edges()) out.push_back(e.channel);
  return out;
}

inline std::vector<CsvRow> run_sampled(const ExperimentConfig& c) {
  const auto cells = sample_grid(c);
  std::vector<CsvRow> rows(cells.size());
  std::optional<StarChannels> star;
  std::vector<PauliChannel> path;
  if (c.kind == ExperimentKind::Star || c.kind == ExperimentKind::Sweep) {
    star = star_channels(resolve_topology(c, default_star));
  } else {
    path = spam_path(c);
  }
  parallel_for(cells.size(), c.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& cell = cells[i];
    const auto id = static_cast<std::uint32_t>(i);
    CsvRow row;
    if (star) {
      const auto est =
          star_cell(*star, c.spam, cell.M, cell.N, c.trials, c.seed, id);
      row = make_row(cell.label, cell.M, cell.N, c, star->target.qz(), est,
                     crb_mergecast(cell.M, cell.N, star->target.qz(),
                                   star->a2.qz(), star->b.qz(), c.spam.s,
                                   c.spam.m));
    } else {
      double q = 1.0;
      for (const auto& ch : path) q *= ch.qz();
      const double q1 = path.front().qz(), q2 = q / q1;
      if (c.kind == ExperimentKind::SpamS) {
        const auto est =
            spam_s_cell(path, c.spam, cell.M, cell.N, c.trials, c.seed, id);
        row = make_row(cell.label, cell.M, cell.N, c, c.spam.s, est,
                       crb_spam_s(cell.M, cell.N, q1, q2, c.spam.s, c.spam.m));
      } else {
        const auto est =
            spam_m_cell(path, c.spam, cell.M, cell.N, c.trials, c.seed, id);
        row = make_row(cell.label, cell.M, cell.N, c, c.spam.m, est,
                       crb_spam_m(cell.M, cell.N, q1, q2, c.spam.s, c.spam.m));
      }
    }
    if (c.timing) row.runtime_ms = elapsed_ms(t0);
    rows[i] = std::move(row);
  });
  return rows;
}

inline std::vector<CsvRow> run_etch(const ExperimentConfig& c) {
  const Topology t = resolve_topology(c, default_etching_network);
  const auto plan = plan_progressive_etching(t);
  bool all_bypassable = true;
  for (const auto& [id, e] : t.edges())
    all_bypassable = all_bypassable && is_bypassable(e.channel, kPhysicalEps);

  const auto cells = sample_grid(c);
  std::vector<std::vector<CsvRow>> per_cell(cells.size());
  const Basis z[] = {Basis::Z};
  parallel_for(cells.size(), c.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& cell = cells[i];
    EdgeMap<CellEstimates> merge, bypass;
    std::vector<EdgeId> all_edges;
    for (const auto& [id, e] : t.edges()) all_edges.push_back(id);
    for (int k = 0; k < c.trials; ++k) {
      RandomStream stream(c.seed, static_cast<std::uint32_t>(i),
                          static_cast<std::uint32_t>(k));
      try {
        const auto r = run_progressive_etching(t, c.spam, {cell.M, cell.N},
                                               stream, z);
        for (const auto& [e, est] : r.estimates) merge[e].values.push_back(est.qz);
      } catch (const EtchingError& ex) {
        ++merge[ex.edge()].unestimable;
      }
      if (all_bypassable) {
        RandomStream bstream = stream.child(1);
        const auto b = run_bypass_unicast(t, c.spam, cell.N, bstream,
                                          all_edges, z);
        for (const auto& [e, est] : b) bypass[e].values.push_back(est.qz);
      }
    }
    std::vector<CsvRow> rows;
    std::map<int, std::vector<double>> round_mse;
    std::vector<double> bypass_mse;
    for (const auto& step : plan) {
      const double truth = t.edge(step.edge).channel.qz();
      auto row = make_row("etch:" + step.edge + ":step" +
                              std::to_string(step.round),
                          cell.M, cell.N, c, truth, merge[step.edge],
                          std::numeric_limits<double>::quiet_NaN());
      round_mse[step.round].push_back(row.mse);
      rows.push_back(std::move(row));
    }
    for (const auto& [round, v] : round_mse) {
      CsvRow row = make_row("etch:step" + std::to_string(round), cell.M,
                            cell.N, c, 0.0, {}, 0.0);
      double acc = 0.0;
      for (double x : v) acc += x;
      row.mse = acc / static_cast<double>(v.size());
      row.mse_std = std::numeric_limits<double>::quiet_NaN();
      row.truth = std::numeric_limits<double>::quiet_NaN();
      row.crb = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(std::move(row));
    }
    if (all_bypassable) {
      for (const auto& [e, est] : bypass) {
        rows.push_back(make_row("bypass:" + e, cell.M, cell.N, c,
                                t.edge(e).channel.qz(), est,
                                std::numeric_limits<double>::quiet_NaN()));
      }
    }
    if (c.timing) {
      const double ms = elapsed_ms(t0);
      for (auto& r : rows) r.runtime_ms = ms;
    }
    per_cell[i] = std::move(rows);
  });
  std::vector<CsvRow> rows;
  for (auto& v : per_cell)
    for (auto& r : v) rows.push_back(std::move(r));
  return rows;
}

inline std::vector<CsvRow> run_loss(const ExperimentConfig& c) {
  const Topology t = resolve_topology(c, default_star);
  const auto star3 = star_channels(t);
  const LossStar star{star3.target, star3.a2, star3.b};
  struct Cell {
    double t_send;
    double t_c;
  };
  std::vector<Cell> cells;
  for (double ts : c.t_send)
    for (double tc : c.t_c) cells.push_back({ts, tc});
  std::vector<CsvRow> rows(cells.size());
  parallel_for(cells.size(), c.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Schedule sched{cells[i].t_send, c.horizon_s};
    const MemoryParams mem{c.t1_s, c.t2_s, cells[i].t_c};
    // The stream depends on T_send only, so cutoffs share a loss pattern.
    std::size_t ts_index = 0;
    while (c.t_send[ts_index] != cells[i].t_send) ++ts_index;
    CellEstimates est;
    double merged = 0.0, received = 0.0;
    for (int k = 0; k < c.trials; ++k) {
      RandomStream stream(c.seed, static_cast<std::uint32_t>(ts_index),
                          static_cast<std::uint32_t>(k));
      const auto r =
          run_loss_experiment(star, c.fiber, mem, sched, c.spam, stream);
      merged += static_cast<double>(r.merged);
      received += static_cast<double>(r.received);
      if (r.estimable) {
        est.values.push_back(r.estimate);
      } else {
        ++est.unestimable;
      }
    }
    const double n = static_cast<double>(c.trials);
    CsvRow row = make_row("loss:tsend=" + format_real(cells[i].t_send) +
                              ":tc=" + format_real(cells[i].t_c),
                          merged / n, received / n, c, star.target.qz(), est,
                          std::numeric_limits<double>::quiet_NaN());
    if (c.timing) row.runtime_ms = elapsed_ms(t0);
    rows[i] = std::move(row);
  });
  return rows;
}

}  // namespace detail

inline std::vector<CsvRow> run_experiment(const ExperimentConfig& c) {
  c.validate();
  switch (c.kind) {
    case ExperimentKind::Star:
    case ExperimentKind::Sweep:
    case ExperimentKind::SpamS:
    case ExperimentKind::SpamM:
      return detail::run_sampled(c);
    case ExperimentKind::Etch:
      return detail::run_etch(c);
    case ExperimentKind::Loss:
      return detail::run_loss(c);
  }
  return {};
}

}  // namespace qnt
