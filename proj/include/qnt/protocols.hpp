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
 * Outcome probabilities, sampling and estimators for the tomography
 * protocols: unicast, Mergecast, BypassUnicast and the SPAM protocols.
 *
 * Probabilities are evaluated by pushing Pauli vectors through the actual
 * circuit (preparation, channels, gates, partial trace, measurement). Estimating
 * q_X or q_Y dresses every channel with H or HS so the Z readout sees the
 * requested parameter.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnt/pauli.hpp"
#include "qnt/rng.hpp"

namespace qnt {

using ChannelPath = std::span<const PauliChannel>;

class UnestimableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDegenerateDenominator = 1e-9;

namespace detail {

inline void require_nonempty(ChannelPath p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty path");
}

inline void require_nonzero(ChannelPath p, Basis b, const char* what) {
  for (const auto& ch : p) {
    if (ch.q(pauli_of(b)) == 0.0) {
      throw std::invalid_argument(std::string(what) + ": channel parameter q_" +
                                  to_char(b) + " is zero");
    }
  }
}

/// Sends a single qubit through `path`, each channel dressed for `b`.
inline PauliVector1Q transmit(PauliVector1Q v, ChannelPath path, Basis b) {
  const Dressing d = dressing_for(b);
  for (const auto& ch : path) v = apply_ptm(dressed_ptm(ch, d), v);
  return v;
}

inline PauliVector2Q transmit(PauliVector2Q v, ChannelPath path, Basis b,
                              Qubit which) {
  const Dressing d = dressing_for(b);
  for (const auto& ch : path) v = apply_on(v, dressed_ptm(ch, d), which);
  return v;
}

inline double measure_zero(const PauliVector1Q& v, const SpamModel& spam) {
  return z_measurement_probs(v, spam.m).p0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Analytic probabilities
// ---------------------------------------------------------------------------

/// P(0) for prep -> path -> measure.
inline double unicast_prob(ChannelPath path, const SpamModel& spam,
                           Basis basis = Basis::Z) {
  detail::require_nonempty(path, "unicast_prob");
  detail::require_nonzero(path, basis, "unicast_prob");
  spam.validate();
  return detail::measure_zero(
      detail::transmit(spam.prepared_zero(), path, basis), spam);
}

/**
 * Generalized Mergecast. The control qubit crosses `target_path` and the
 * second qubit crosses `branch_a2`; they meet at the center, the CNOT merges
 * them, the control is discarded and the survivor crosses `branch_b`.
 */
inline double mergecast_prob(ChannelPath target_path, ChannelPath branch_a2,
                             ChannelPath branch_b, const SpamModel& spam,
                             Basis basis = Basis::Z) {
  detail::require_nonempty(target_path, "mergecast_prob");
  detail::require_nonempty(branch_a2, "mergecast_prob");
  detail::require_nonempty(branch_b, "mergecast_prob");
  for (ChannelPath p : {target_path, branch_a2, branch_b})
    detail::require_nonzero(p, basis, "mergecast_prob");
  spam.validate();
  PauliVector2Q v = tensor(spam.prepared_zero(), spam.prepared_zero());
  v = detail::transmit(v, target_path, basis, Qubit::First);
  v = detail::transmit(v, branch_a2, basis, Qubit::Second);
  v = apply_cnot(v, Qubit::First);
  const PauliVector1Q out =
      detail::transmit(partial_trace(v, Qubit::First), branch_b, basis);
  return detail::measure_zero(out, spam);
}

inline double mergecast_prob(const PauliChannel& target, ChannelPath branch_a2,
                             ChannelPath branch_b, const SpamModel& spam,
                             Basis basis = Basis::Z) {
  return mergecast_prob(ChannelPath(&target, 1), branch_a2, branch_b, spam,
                        basis);
}

/**
 * BypassUnicast: the qubit crosses `before`, the target, then `after`. Each
 * bypassed channel is conjugated by the rotation that moves the carried Z
 * component onto that channel's invariant axis.
 */
inline double bypass_unicast_prob(ChannelPath before,
                                  const PauliChannel& target,
                                  ChannelPath after, const SpamModel& spam,
                                  Basis basis = Basis::Z) {
  if (target.q(pauli_of(basis)) == 0.0) {
    throw std::invalid_argument("bypass_unicast_prob: target parameter is zero");
  }
  spam.validate();
  auto bypass = [](PauliVector1Q v, ChannelPath path) {
    for (const auto& ch : path) {
      const auto axis = bypass_axis(ch, kPhysicalEps);
      if (!axis) {
        throw std::invalid_argument(
            "bypass_unicast_prob: channel is not bypassable");
      }
      const Ptm1Q r = rotation_z_to(*axis);
      v = apply_ptm(r.transpose() * ptm_of_channel(ch) * r, v);
    }
    return v;
  };
  PauliVector1Q v = bypass(spam.prepared_zero(), before);
  v = apply_ptm(dressed_ptm(target, dressing_for(basis)), v);
  v = bypass(v, after);
  return detail::measure_zero(v, spam);
}

inline double bypass_unicast_prob(ChannelPath bypassed,
                                  const PauliChannel& target,
                                  const SpamModel& spam,
                                  Basis basis = Basis::Z) {
  return bypass_unicast_prob(bypassed, target, {}, spam, basis);
}

/// Every channel bypassed; reads out (1 + ms)/2.
inline double spam_ms_bypass_prob(ChannelPath bypassed_path,
                                  const SpamModel& spam) {
  return bypass_unicast_prob(bypassed_path, PauliChannel::identity(), {}, spam);
}

/// Root prepares two qubits, merges them, discards the control and sends the
/// target qubit along `path`.
inline double spam_s_protocol_prob(ChannelPath path, const SpamModel& spam) {
  detail::require_nonempty(path, "spam_s_protocol_prob");
  detail::require_nonzero(path, Basis::Z, "spam_s_protocol_prob");
  spam.validate();
  PauliVector2Q v = tensor(spam.prepared_zero(), spam.prepared_zero());
  v = apply_cnot(v, Qubit::First);
  const PauliVector1Q out =
      detail::transmit(partial_trace(v, Qubit::First), path, Basis::Z);
  return detail::measure_zero(out, spam);
}

struct SpamMProbs {
  double p00;
  double p01;
  double p10;
  double p11;
  /// p00 + p11.
  double p_sum;
};

/**
 * Two qubits cross `control_path` and `target_path`, meet, are merged by a
 * CNOT and both are measured. p_sum depends on the target path only:
 * (1 + m^2 s prod_target q_Z)/2.
 */
inline SpamMProbs spam_m_protocol_probs(ChannelPath control_path,
                                        ChannelPath target_path,
                                        const SpamModel& spam) {
  detail::require_nonempty(control_path, "spam_m_protocol_probs");
  detail::require_nonempty(target_path, "spam_m_protocol_probs");
  detail::require_nonzero(control_path, Basis::Z, "spam_m_protocol_probs");
  detail::require_nonzero(target_path, Basis::Z, "spam_m_protocol_probs");
  spam.validate();
  PauliVector2Q v = tensor(spam.prepared_zero(), spam.prepared_zero());
  v = detail::transmit(v, control_path, Basis::Z, Qubit::First);
  v = detail::transmit(v, target_path, Basis::Z, Qubit::Second);
  v = apply_cnot(v, Qubit::First);
  const auto p = joint_z_measurement_probs(v, spam);
  return {p[0], p[1], p[2], p[3], p[0] + p[3]};
}

// ---------------------------------------------------------------------------
// SPAM prefactors: the factor multiplying the channel product in 2p - 1.
// ---------------------------------------------------------------------------

inline double unicast_prefactor(const SpamModel& x) { return x.m * x.s; }
inline double mergecast_prefactor(const SpamModel& x) {
  return x.m * x.s * x.s;
}
inline double bypass_prefactor(const SpamModel& x) { return x.m * x.s; }
inline double spam_s_prefactor(const SpamModel& x) { return x.m * x.s * x.s; }
inline double spam_m_sum_prefactor(const SpamModel& x) {
  return x.m * x.m * x.s;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct ProtocolOutcome {
  double p0_analytic = 0.0;
  std::uint64_t n0 = 0;
  std::uint64_t n_total = 0;
  StreamKey seed;

  double p_hat() const {
    if (n_total == 0) throw std::logic_error("ProtocolOutcome: no shots");
    return static_cast<double>(n0) / static_cast<double>(n_total);
  }
};

/// n Bernoulli(p0) shots drawn from `stream`.
inline ProtocolOutcome sample_protocol(double p0, std::uint64_t n,
                                       RandomStream& stream) {
  if (!(p0 >= -kPhysicalEps && p0 <= 1.0 + kPhysicalEps)) {
    throw std::invalid_argument("sample_protocol: p0 outside [0, 1]");
  }
  if (n == 0) throw std::invalid_argument("sample_protocol: n must be >= 1");
  ProtocolOutcome out{p0, 0, n, stream.key()};
  for (std::uint64_t i = 0; i < n; ++i) out.n0 += stream.bernoulli(p0) ? 1 : 0;
  return out;
}

inline ProtocolOutcome sample_protocol(double p0, std::uint64_t n,
                                       StreamKey seed) {
  RandomStream stream(seed);
  return sample_protocol(p0, n, stream);
}

/// Categorical shots over (00, 01, 10, 11); returns counts in that order.
inline std::array<std::uint64_t, 4> sample_joint(const SpamMProbs& p,
                                                 std::uint64_t n,
                                                 RandomStream& stream) {
  std::array<std::uint64_t, 4> counts{};
  const double c0 = p.p00, c1 = c0 + p.p01, c2 = c1 + p.p10;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = stream.uniform01();
    counts[u < c0 ? 0 : u < c1 ? 1 : u < c2 ? 2 : 3] += 1;
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// (2 p_num - 1) / (2 p_den - 1), rejecting a vanishing denominator.
inline double ratio_estimate(double p_num, double p_den) {
  const double den = 2.0 * p_den - 1.0;
  if (!(std::abs(den) >= kDegenerateDenominator)) {
    throw UnestimableError("ratio estimator denominator 2p - 1 = " +
                           std::to_string(den) + " is degenerate");
  }
  return (2.0 * p_num - 1.0) / den;
}

/// Mergecast ratio divided by the known preparation parameter s.
inline double estimate_q_mergecast(double p_merge, double p_uni,
                                   double s = 1.0) {
  if (s == 0.0) throw UnestimableError("estimate_q_mergecast: s = 0");
  return ratio_estimate(p_merge, p_uni) / s;
}

inline double estimate_q_mergecast(const ProtocolOutcome& merge,
                                   const ProtocolOutcome& uni,
                                   double s = 1.0) {
  return estimate_q_mergecast(merge.p_hat(), uni.p_hat(), s);
}

inline double estimate_s(double p1, double p0) {
  return ratio_estimate(p1, p0);
}
inline double estimate_s(const ProtocolOutcome& p1, const ProtocolOutcome& p0) {
  return estimate_s(p1.p_hat(), p0.p_hat());
}

inline double estimate_m(double p2, double p0) {
  return ratio_estimate(p2, p0);
}
inline double estimate_m(const ProtocolOutcome& p2, const ProtocolOutcome& p0) {
  return estimate_m(p2.p_hat(), p0.p_hat());
}

/// Target parameter from a BypassUnicast frequency with known SPAM.
inline double estimate_q_bypass(double p, const SpamModel& spam) {
  const double f = bypass_prefactor(spam);
  if (std::abs(f) < kDegenerateDenominator) {
    throw UnestimableError("estimate_q_bypass: ms is degenerate");
  }
  return (2.0 * p - 1.0) / f;
}

enum class EstimateMethod { Mergecast, BypassUnicast, SpamS, SpamM };

struct EstimateRecord {
  std::string target;
  double value = 0.0;
  std::uint64_t M = 0;
  std::uint64_t N = 0;
  EstimateMethod method = EstimateMethod::Mergecast;
};

// ---------------------------------------------------------------------------
// Phase cycling
// ---------------------------------------------------------------------------

/**
 * Un-cycled SPAM: the prepared |0> is [1, sX, sY, sZ] and the |0> effect is
 * [mI, mX, mY, mZ]; the |1> effect is [2 - mI, -mX, -mY, -mZ].
 */
struct RawSpam {
  std::array<double, 4> prep{1.0, 0.0, 0.0, 1.0};
  std::array<double, 4> meas0{1.0, 0.0, 0.0, 1.0};

  std::array<double, 4> meas1() const {
    return {2.0 - meas0[0], -meas0[1], -meas0[2], -meas0[3]};
  }
};

/// Random insertions: Z after preparation, X before measurement with the
/// recorded bit flipped, Z before measurement.
struct PhaseCycleVariant {
  bool z_after_prep = false;
  bool x_flip = false;
  bool z_before_meas = false;

  friend bool operator==(const PhaseCycleVariant&,
                         const PhaseCycleVariant&) = default;
};

inline std::array<PhaseCycleVariant, 8> all_phase_cycle_variants() {
  std::array<PhaseCycleVariant, 8> out{};
  for (int k = 0; k < 8; ++k)
    out[static_cast<std::size_t>(k)] = {(k & 4) != 0, (k & 2) != 0,
                                        (k & 1) != 0};
  return out;
}

/// One uniformly random variant per shot.
inline std::vector<PhaseCycleVariant> phase_cycling_compile(
    std::size_t shots, RandomStream& stream) {
  std::vector<PhaseCycleVariant> out(shots);
  for (auto& v : out) {
    const auto k = stream.below(8);
    v = {(k & 4) != 0, (k & 2) != 0, (k & 1) != 0};
  }
  return out;
}

namespace detail {

inline double dot4(const std::array<double, 4>& a, const PauliVector1Q& v) {
  return a[0] * v.coeffs[0] + a[1] * v.coeffs[1] + a[2] * v.coeffs[2] +
         a[3] * v.coeffs[3];
}

inline PauliVector1Q cycled_prep(const RawSpam& raw,
                                 const PhaseCycleVariant& var) {
  PauliVector1Q v{raw.prep};
  if (var.z_after_prep) v = apply_ptm(ptm_of_pauli(Pauli::Z), v);
  return v;
}

/// Probability that the variant records outcome 0 for the state reaching
/// the measurement stage.
inline double recorded_zero(const RawSpam& raw, PauliVector1Q v,
                            const PhaseCycleVariant& var) {
  if (var.x_flip) v = apply_ptm(ptm_of_pauli(Pauli::X), v);
  if (var.z_before_meas) v = apply_ptm(ptm_of_pauli(Pauli::Z), v);
  const auto& effect = var.x_flip ? raw.meas1() : raw.meas0;
  return 0.5 * dot4(effect, v);
}

}  // namespace detail

/// Preparation vector averaged over the Z insertion.
inline PauliVector1Q effective_prep_vector(const RawSpam& raw) {
  PauliVector1Q acc{{0, 0, 0, 0}};
  const auto vars = all_phase_cycle_variants();
  for (const auto& var : vars) {
    const auto v = detail::cycled_prep(raw, var);
    for (std::size_t i = 0; i < 4; ++i) acc.coeffs[i] += v.coeffs[i] / 8.0;
  }
  return acc;
}

/// Recorded-0 effect averaged over the X-flip and Z insertions.
inline std::array<double, 4> effective_measurement_vector(const RawSpam& raw) {
  std::array<double, 4> acc{};
  const auto vars = all_phase_cycle_variants();
  for (const auto& var : vars) {
    // The effect on basis state P is twice its recorded-0 probability.
    for (std::size_t i = 0; i < 4; ++i) {
      PauliVector1Q basis{{0, 0, 0, 0}};
      basis.coeffs[i] = 1.0;
      acc[i] += 2.0 * detail::recorded_zero(raw, basis, var) / 8.0;
    }
  }
  return acc;
}

/// Recorded-0 probability of unicast along `path` under one variant.
inline double phase_cycled_variant_prob(const RawSpam& raw, ChannelPath path,
                                        const PhaseCycleVariant& var) {
  PauliVector1Q v = detail::cycled_prep(raw, var);
  for (const auto& ch : path) v = apply_channel(ch, v);
  return detail::recorded_zero(raw, v, var);
}

/// Unicast recorded-0 probability averaged over all eight variants.
inline double phase_cycled_unicast_prob(const RawSpam& raw, ChannelPath path) {
  double acc = 0.0;
  for (const auto& var : all_phase_cycle_variants())
    acc += phase_cycled_variant_prob(raw, path, var);
  return acc / 8.0;
}

/// Shots with a freshly drawn variant each; counts recorded zeros.
inline ProtocolOutcome sample_phase_cycled_unicast(const RawSpam& raw,
                                                   ChannelPath path,
                                                   std::uint64_t n,
                                                   RandomStream& stream) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  std::array<double, 8> p{};
  const auto vars = all_phase_cycle_variants();
  for (std::size_t k = 0; k < 8; ++k)
    p[k] = phase_cycled_variant_prob(raw, path, vars[k]);
  ProtocolOutcome out{phase_cycled_unicast_prob(raw, path), 0, n,
                      stream.key()};
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto k = stream.below(8);
    out.n0 += stream.bernoulli(p[k]) ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sign ambiguity on a three-link star
// ---------------------------------------------------------------------------

/**
 * Counts the sign assignments of (|q1|, |q2|, |q3|) consistent with the
 * pairwise unicast products, and optionally the Mergecast triple product,
 * read off exact outcome probabilities.
 */
inline int count_consistent_sign_assignments(double q1, double q2, double q3,
                                             bool with_mergecast,
                                             double tol = 1e-12) {
  const SpamModel ideal;
  const PauliChannel c1(1, q1, q1), c2(1, q2, q2), c3(1, q3, q3);
  auto pair_product = [&](const PauliChannel& a, const PauliChannel& b) {
    const PauliChannel p[] = {a, b};
    return 2.0 * unicast_prob(p, ideal) - 1.0;
  };
  const double u12 = pair_product(c1, c2);
  const double u23 = pair_product(c2, c3);
  const double u13 = pair_product(c1, c3);
  const double m123 =
      2.0 * mergecast_prob(c1, ChannelPath(&c2, 1), ChannelPath(&c3, 1),
                           ideal) -
      1.0;
  const double a1 = std::sqrt(std::abs(u12 * u13 / u23));
  const double a2 = std::sqrt(std::abs(u12 * u23 / u13));
  const double a3 = std::sqrt(std::abs(u13 * u23 / u12));
  int count = 0;
  for (int mask = 0; mask < 8; ++mask) {
    const double x1 = (mask & 1) ? -a1 : a1;
    const double x2 = (mask & 2) ? -a2 : a2;
    const double x3 = (mask & 4) ? -a3 : a3;
    bool ok = std::abs(x1 * x2 - u12) <= tol && std::abs(x2 * x3 - u23) <= tol &&
              std::abs(x1 * x3 - u13) <= tol;
    if (with_mergecast) ok = ok && std::abs(x1 * x2 * x3 - m123) <= tol;
    count += ok ? 1 : 0;
  }
  return count;
}

}  // namespace qnt
