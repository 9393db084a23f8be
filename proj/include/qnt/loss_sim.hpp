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
 * Mergecast on a star with lossy fibers and a decohering memory at the
 * center.
 *
 * Both roots send once per slot of length T_send. Photons from the same slot
 * arrive together. A lone survivor waits in memory and merges with a photon
 * from the other root in a later slot if the wait stays within the cutoff.
 */

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "qnt/pauli.hpp"
#include "qnt/protocols.hpp"
#include "qnt/rng.hpp"

namespace qnt {

struct FiberParams {
  double length_km = 10.0;
  double speed_km_per_s = 2e5;
  double p0 = 0.5;
  double alpha_per_km = 0.05;

  void validate() const {
    if (!(length_km >= 0.0 && speed_km_per_s > 0.0 && p0 >= 0.0 && p0 < 1.0 &&
          alpha_per_km >= 0.0)) {
      throw std::invalid_argument("invalid fiber parameters");
    }
  }
  double delay_s() const { return length_km / speed_km_per_s; }
};

struct MemoryParams {
  double t1_s = 10.0;
  double t2_s = 1.0;
  double cutoff_s = 0.0;

  void validate() const {
    if (!(t1_s > 0.0 && t2_s > 0.0 && t2_s <= 2.0 * t1_s)) {
      throw std::invalid_argument("memory times must satisfy 0 < T2 <= 2 T1");
    }
    if (!(cutoff_s >= 0.0)) throw std::invalid_argument("cutoff must be >= 0");
  }
};

struct Schedule {
  double send_interval_s = 0.5;
  double horizon_s = 3600.0;

  void validate() const {
    if (!(send_interval_s > 0.0 && send_interval_s <= horizon_s)) {
      throw std::invalid_argument("need 0 < T_send <= horizon");
    }
  }
  std::uint64_t slots() const {
    return static_cast<std::uint64_t>(
        std::floor(horizon_s / send_interval_s + 1e-9));
  }
};

inline double survival_prob(const FiberParams& f) {
  f.validate();
  return (1.0 - f.p0) * std::exp(-f.alpha_per_km * f.length_km);
}

/// T1/T2 relaxation toward |0> over `dt_s` seconds.
inline PauliVector1Q decohere(const PauliVector1Q& v, double dt_s,
                              const MemoryParams& mem) {
  if (!(dt_s >= 0.0)) throw std::invalid_argument("decohere: dt < 0");
  const double e2 = std::exp(-dt_s / mem.t2_s);
  const double e1 = std::exp(-dt_s / mem.t1_s);
  return {{v.coeffs[0], v.coeffs[1] * e2, v.coeffs[2] * e2,
           v.coeffs[3] * e1 + (1.0 - e1) * v.coeffs[0]}};
}

/// Channels of the three-link star: target (root 1), A2 (root 2), B (receiver).
struct LossStar {
  PauliChannel target = PauliChannel::depolarizing(0.5);
  PauliChannel a2 = PauliChannel::depolarizing(0.75);
  PauliChannel b = PauliChannel::depolarizing(0.65);
};

struct LossResult {
  std::uint64_t slots = 0;
  /// Merges performed at the center.
  std::uint64_t merged = 0;
  /// Merged qubits that survived the third fiber.
  std::uint64_t received = 0;
  std::uint64_t n0 = 0;
  /// Merges that used a stored qubit.
  std::uint64_t merged_from_memory = 0;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  bool estimable = false;
};

/// P(0) at the receiver when the qubit from `stored_side` waited `wait_s`.
inline double lossy_merge_prob(const LossStar& star, const SpamModel& spam,
                               const MemoryParams& mem, int stored_side,
                               double wait_s) {
  PauliVector1Q c = apply_channel(star.target, spam.prepared_zero());
  PauliVector1Q t = apply_channel(star.a2, spam.prepared_zero());
  if (stored_side == 1) c = decohere(c, wait_s, mem);
  if (stored_side == 2) t = decohere(t, wait_s, mem);
  PauliVector2Q v = apply_cnot(tensor(c, t), Qubit::First);
  const PauliVector1Q out = apply_channel(star.b, partial_trace(v, Qubit::First));
  return z_measurement_probs(out, spam.m).p0;
}

/**
 * One run over the horizon. Each slot consumes exactly four uniforms (two
 * root fibers, third fiber, outcome) so that runs differing only in the
 * cutoff see the same loss pattern.
 */
inline LossResult run_loss_experiment(const LossStar& star,
                                      const FiberParams& fiber,
                                      const MemoryParams& mem,
                                      const Schedule& sched,
                                      const SpamModel& spam,
                                      RandomStream& stream) {
  mem.validate();
  sched.validate();
  spam.validate();
  const double ps = survival_prob(fiber);
  const double fresh_p = lossy_merge_prob(star, spam, mem, 0, 0.0);

  struct Stored {
    int side;
    std::uint64_t slot;
  };
  std::optional<Stored> stored;
  LossResult r;
  r.slots = sched.slots();

  auto merge = [&](double p0, double u_third, double u_meas) {
    ++r.merged;
    if (u_third < ps) {
      ++r.received;
      if (u_meas < p0) ++r.n0;
    }
  };

  for (std::uint64_t k = 0; k < r.slots; ++k) {
    const bool s1 = stream.uniform01() < ps;
    const bool s2 = stream.uniform01() < ps;
    const double u_third = stream.uniform01();
    const double u_meas = stream.uniform01();

    if (stored) {
      const double wait = static_cast<double>(k - stored->slot) *
                          sched.send_interval_s;
      if (wait > mem.cutoff_s + 1e-12) stored.reset();
    }
    if (s1 && s2) {
      merge(fresh_p, u_third, u_meas);
    } else if (s1 || s2) {
      const int side = s1 ? 1 : 2;
      if (stored && stored->side != side) {
        const double wait = static_cast<double>(k - stored->slot) *
                            sched.send_interval_s;
        merge(lossy_merge_prob(star, spam, mem, stored->side, wait), u_third,
              u_meas);
        ++r.merged_from_memory;
        stored.reset();
      } else {
        stored = Stored{side, k};
      }
    }
  }

  if (r.received > 0) {
    const double p_hat =
        static_cast<double>(r.n0) / static_cast<double>(r.received);
    // Analytic unicast reference over A2 and B.
    const double ref = unicast_prefactor(spam) * star.a2.qz() * star.b.qz();
    if (std::abs(ref) >= kDegenerateDenominator && spam.s != 0.0) {
      r.estimate = (2.0 * p_hat - 1.0) / ref / spam.s;
      r.estimable = true;
    }
  }
  return r;
}

}  // namespace qnt
