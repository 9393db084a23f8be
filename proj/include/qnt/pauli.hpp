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
 * Pauli-Liouville algebra for one and two qubits.
 *
 * States are real coefficient vectors over the Pauli basis (I, X, Y, Z), with
 * rho = 1/2 sum_P x_P P for one qubit and rho = 1/4 sum_{P,Q} x_PQ P (x) Q for
 * two. Processes act on those vectors as Pauli transfer matrices (PTMs). Pauli
 * channels are diagonal PTMs diag(1, q_X, q_Y, q_Z).
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

namespace qnt {

/// Slack used for every physicality and probability-range check.
inline constexpr double kPhysicalEps = 1e-12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::array<Pauli, 4> kPaulis = {Pauli::I, Pauli::X, Pauli::Y,
                                                 Pauli::Z};

constexpr std::size_t index(Pauli p) { return static_cast<std::size_t>(p); }

inline char to_char(Pauli p) { return "IXYZ"[index(p)]; }

/// Raised when a vector or matrix fails a physicality requirement.
class NonPhysicalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

struct PauliVector1Q {
  std::array<double, 4> coeffs{1.0, 0.0, 0.0, 0.0};

  constexpr double operator[](Pauli p) const { return coeffs[index(p)]; }
  constexpr double& operator[](Pauli p) { return coeffs[index(p)]; }

  double bloch_norm2() const {
    return coeffs[1] * coeffs[1] + coeffs[2] * coeffs[2] +
           coeffs[3] * coeffs[3];
  }

  /// Normalized and inside the Bloch ball.
  bool is_physical(double eps = kPhysicalEps) const {
    return std::abs(coeffs[0] - 1.0) <= eps && bloch_norm2() <= 1.0 + eps;
  }

  static constexpr PauliVector1Q maximally_mixed() { return {{1, 0, 0, 0}}; }
  static constexpr PauliVector1Q zero() { return {{1, 0, 0, 1}}; }
  static constexpr PauliVector1Q one() { return {{1, 0, 0, -1}}; }
  static constexpr PauliVector1Q plus() { return {{1, 1, 0, 0}}; }

  friend bool operator==(const PauliVector1Q&, const PauliVector1Q&) = default;
};

/// Two-qubit vector, row-major over (first, second) with basis order IXYZ.
struct PauliVector2Q {
  std::array<double, 16> coeffs{};

  PauliVector2Q() { coeffs[0] = 1.0; }
  explicit PauliVector2Q(const std::array<double, 16>& c) : coeffs(c) {}

  static constexpr std::size_t slot(Pauli first, Pauli second) {
    return 4 * index(first) + index(second);
  }

  double operator()(Pauli first, Pauli second) const {
    return coeffs[slot(first, second)];
  }
  double& operator()(Pauli first, Pauli second) {
    return coeffs[slot(first, second)];
  }

  static PauliVector2Q maximally_mixed() { return PauliVector2Q{}; }

  friend bool operator==(const PauliVector2Q&, const PauliVector2Q&) = default;
};

std::ostream& operator<<(std::ostream& os, const PauliVector1Q& v);
std::ostream& operator<<(std::ostream& os, const PauliVector2Q& v);

// ---------------------------------------------------------------------------
// Pauli channels
// ---------------------------------------------------------------------------

/**
 * Single-qubit Pauli channel given by its PTM diagonal (q_X, q_Y, q_Z).
 *
 * Construction enforces q in [-1, 1] and complete positivity, i.e. that the
 * derived Pauli probabilities p_I, p_X, p_Y, p_Z are all non-negative. A zero
 * q is representable here; the tomography protocols reject it separately.
 */
class PauliChannel {
 public:
  PauliChannel() = default;

  PauliChannel(double qx, double qy, double qz) : q_{qx, qy, qz} {
    for (double q : q_) {
      if (!std::isfinite(q) || q < -1.0 - kPhysicalEps ||
          q > 1.0 + kPhysicalEps) {
        throw std::invalid_argument("Pauli channel parameter " +
                                    std::to_string(q) +
                                    " lies outside [-1, 1]");
      }
    }
    for (Pauli p : kPaulis) {
      if (prob(p) < -kPhysicalEps) {
        throw std::invalid_argument(
            std::string("Pauli channel is not completely positive: p_") +
            to_char(p) + " = " + std::to_string(prob(p)));
      }
    }
  }

  static PauliChannel identity() { return {}; }

  static PauliChannel from_probabilities(double px, double py, double pz) {
    return {1.0 - 2.0 * (py + pz), 1.0 - 2.0 * (px + pz),
            1.0 - 2.0 * (px + py)};
  }

  static PauliChannel bit_flip(double p) { return from_probabilities(p, 0, 0); }
  static PauliChannel bit_phase_flip(double p) {
    return from_probabilities(0, p, 0);
  }
  static PauliChannel phase_flip(double p) {
    return from_probabilities(0, 0, p);
  }
  /// rho -> (1-p) rho + p I/2, i.e. diag(1, 1-p, 1-p, 1-p).
  static PauliChannel depolarizing(double p) {
    return {1.0 - p, 1.0 - p, 1.0 - p};
  }

  double qx() const { return q_[0]; }
  double qy() const { return q_[1]; }
  double qz() const { return q_[2]; }

  /// PTM diagonal entry for `p`; 1 for the identity.
  double q(Pauli p) const { return p == Pauli::I ? 1.0 : q_[index(p) - 1]; }

  /// Probability of applying Pauli `p`.
  double prob(Pauli p) const {
    const double x = q_[0], y = q_[1], z = q_[2];
    switch (p) {
      case Pauli::I: return (1.0 + x + y + z) / 4.0;
      case Pauli::X: return (1.0 + x - y - z) / 4.0;
      case Pauli::Y: return (1.0 - x + y - z) / 4.0;
      case Pauli::Z: return (1.0 - x - y + z) / 4.0;
    }
    return 0.0;
  }
  double px() const { return prob(Pauli::X); }
  double py() const { return prob(Pauli::Y); }
  double pz() const { return prob(Pauli::Z); }

  /// True when every q_P is non-zero, as the tomography protocols require.
  bool all_nonzero(double tol = 0.0) const {
    return std::abs(q_[0]) > tol && std::abs(q_[1]) > tol &&
           std::abs(q_[2]) > tol;
  }

  friend bool operator==(const PauliChannel&, const PauliChannel&) = default;

 private:
  std::array<double, 3> q_{1.0, 1.0, 1.0};
};

using PauliChannelParams = PauliChannel;

std::ostream& operator<<(std::ostream& os, const PauliChannel& ch);

// ---------------------------------------------------------------------------
// PTMs
// ---------------------------------------------------------------------------

struct Ptm1Q {
  std::array<std::array<double, 4>, 4> m{};

  static constexpr Ptm1Q identity() {
    Ptm1Q r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i][i] = 1.0;
    return r;
  }
  static constexpr Ptm1Q diagonal(double a, double b, double c, double d) {
    Ptm1Q r;
    r.m[0][0] = a;
    r.m[1][1] = b;
    r.m[2][2] = c;
    r.m[3][3] = d;
    return r;
  }

  constexpr double operator()(std::size_t row, std::size_t col) const {
    return m[row][col];
  }

  constexpr Ptm1Q transpose() const {
    Ptm1Q r;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) r.m[i][j] = m[j][i];
    return r;
  }

  bool is_trace_preserving(double eps = kPhysicalEps) const {
    return std::abs(m[0][0] - 1.0) <= eps && std::abs(m[0][1]) <= eps &&
           std::abs(m[0][2]) <= eps && std::abs(m[0][3]) <= eps;
  }

  friend constexpr Ptm1Q operator*(const Ptm1Q& a, const Ptm1Q& b) {
    Ptm1Q r;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 4; ++k) acc += a.m[i][k] * b.m[k][j];
        r.m[i][j] = acc;
      }
    return r;
  }

  friend bool operator==(const Ptm1Q&, const Ptm1Q&) = default;
};

enum class GateKind {
  Hadamard,
  Phase,
  /// The unitary H*S (S applied first).
  HadamardPhase,
  CnotControlFirst,
  CnotControlSecond,
};

enum class Qubit { First, Second };

inline Ptm1Q ptm_of_channel(const PauliChannel& ch) {
  return Ptm1Q::diagonal(1.0, ch.qx(), ch.qy(), ch.qz());
}

namespace detail {

// Columns are images of I, X, Y, Z under conjugation.
inline constexpr Ptm1Q kHadamardPtm{{{{1, 0, 0, 0},
                                      {0, 0, 0, 1},
                                      {0, 0, -1, 0},
                                      {0, 1, 0, 0}}}};
// S X S^dag = Y, S Y S^dag = -X.
inline constexpr Ptm1Q kPhasePtm{{{{1, 0, 0, 0},
                                   {0, 0, -1, 0},
                                   {0, 1, 0, 0},
                                   {0, 0, 0, 1}}}};

}  // namespace detail

/// PTM of a single-qubit gate. Two-qubit kinds are rejected; use apply_cnot.
inline Ptm1Q ptm_of_gate(GateKind g) {
  switch (g) {
    case GateKind::Hadamard: return detail::kHadamardPtm;
    case GateKind::Phase: return detail::kPhasePtm;
    case GateKind::HadamardPhase:
      return detail::kHadamardPtm * detail::kPhasePtm;
    case GateKind::CnotControlFirst:
    case GateKind::CnotControlSecond:
      break;
  }
  throw std::invalid_argument("ptm_of_gate: CNOT is a two-qubit gate");
}

/// Pauli conjugations X, Y, Z as PTMs (diagonal sign patterns).
inline Ptm1Q ptm_of_pauli(Pauli p) {
  switch (p) {
    case Pauli::I: return Ptm1Q::identity();
    case Pauli::X: return Ptm1Q::diagonal(1, 1, -1, -1);
    case Pauli::Y: return Ptm1Q::diagonal(1, -1, 1, -1);
    case Pauli::Z: return Ptm1Q::diagonal(1, -1, -1, 1);
  }
  return Ptm1Q::identity();
}

/**
 * Unitary rotation carrying the Z axis onto `axis` (up to sign): identity for
 * Z, H for X, S*H for Y. Its transpose undoes it.
 */
inline Ptm1Q rotation_z_to(Pauli axis) {
  switch (axis) {
    case Pauli::X: return detail::kHadamardPtm;
    case Pauli::Y: return detail::kPhasePtm * detail::kHadamardPtm;
    case Pauli::I:
    case Pauli::Z:
      break;
  }
  return Ptm1Q::identity();
}

inline PauliVector1Q apply_ptm(const Ptm1Q& m, const PauliVector1Q& v) {
  PauliVector1Q r;
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j) acc += m.m[i][j] * v.coeffs[j];
    r.coeffs[i] = acc;
  }
  return r;
}

inline PauliVector1Q apply_channel(const PauliChannel& ch,
                                   const PauliVector1Q& v) {
  return {{v.coeffs[0], ch.qx() * v.coeffs[1], ch.qy() * v.coeffs[2],
           ch.qz() * v.coeffs[3]}};
}

// ---------------------------------------------------------------------------
// Two-qubit operations
// ---------------------------------------------------------------------------

inline PauliVector2Q tensor(const PauliVector1Q& a, const PauliVector1Q& b) {
  PauliVector2Q r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r.coeffs[4 * i + j] = a.coeffs[i] * b.coeffs[j];
  return r;
}

/// (A (x) B) v for single-qubit PTMs A, B.
inline PauliVector2Q apply_local(const PauliVector2Q& v, const Ptm1Q& a,
                                 const Ptm1Q& b) {
  PauliVector2Q r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        if (a.m[i][k] == 0.0) continue;
        for (std::size_t l = 0; l < 4; ++l)
          acc += a.m[i][k] * b.m[j][l] * v.coeffs[4 * k + l];
      }
      r.coeffs[4 * i + j] = acc;
    }
  return r;
}

inline PauliVector2Q apply_on(const PauliVector2Q& v, const Ptm1Q& m,
                              Qubit which) {
  return which == Qubit::First ? apply_local(v, m, Ptm1Q::identity())
                               : apply_local(v, Ptm1Q::identity(), m);
}

namespace detail {

struct SignedSlot {
  std::uint8_t to;
  std::int8_t sign;
};

// CNOT conjugation of each Pauli pair P(x)Q, indexed by slot 4P+Q. Frozen from
// the 4x4 unitary; the unit tests re-derive every entry from the density
// matrix oracle.
inline constexpr std::array<SignedSlot, 16> kCnotControlFirst = {{
    {0, 1},    // II -> II
    {1, 1},    // IX -> IX
    {14, 1},   // IY -> ZY
    {15, 1},   // IZ -> ZZ
    {5, 1},    // XI -> XX
    {4, 1},    // XX -> XI
    {11, 1},   // XY -> YZ
    {10, -1},  // XZ -> -YY
    {9, 1},    // YI -> YX
    {8, 1},    // YX -> YI
    {7, -1},   // YY -> -XZ
    {6, 1},    // YZ -> XY
    {12, 1},   // ZI -> ZI
    {13, 1},   // ZX -> ZX
    {2, 1},    // ZY -> IY
    {3, 1},    // ZZ -> IZ
}};

inline constexpr std::array<SignedSlot, 16> kCnotControlSecond = {{
    {0, 1},    // II -> II
    {5, 1},    // IX -> XX
    {6, 1},    // IY -> XY
    {3, 1},    // IZ -> IZ
    {4, 1},    // XI -> XI
    {1, 1},    // XX -> IX
    {2, 1},    // XY -> IY
    {7, 1},    // XZ -> XZ
    {11, 1},   // YI -> YZ
    {14, 1},   // YX -> ZY
    {13, -1},  // YY -> -ZX
    {8, 1},    // YZ -> YI
    {15, 1},   // ZI -> ZZ
    {10, -1},  // ZX -> -YY
    {9, 1},    // ZY -> YX
    {12, 1},   // ZZ -> ZI
}};

}  // namespace detail

/// CNOT with the given control qubit, acting by conjugation.
inline PauliVector2Q apply_cnot(const PauliVector2Q& v, Qubit control) {
  const auto& table = control == Qubit::First ? detail::kCnotControlFirst
                                              : detail::kCnotControlSecond;
  PauliVector2Q r;
  for (std::size_t i = 0; i < 16; ++i)
    r.coeffs[table[i].to] = table[i].sign * v.coeffs[i];
  return r;
}

/// Traces out `discard`, keeping the coefficients where it carries I.
inline PauliVector1Q partial_trace(const PauliVector2Q& v, Qubit discard) {
  PauliVector1Q r;
  for (Pauli p : kPaulis) {
    r[p] = discard == Qubit::First ? v(Pauli::I, p) : v(p, Pauli::I);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/**
 * Phase-cycled SPAM model: preparation of |0> yields [1, 0, 0, s] and the
 * |0> measurement effect is [1, 0, 0, m]. s = m = 1 is error-free.
 */
struct SpamModel {
  double s = 1.0;
  double m = 1.0;

  static SpamModel ideal() { return {}; }

  void validate() const {
    if (!(s >= 0.0 && s <= 1.0 && m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("SPAM parameters must lie in [0, 1]");
    }
  }

  PauliVector1Q prepared_zero() const { return {{1.0, 0.0, 0.0, s}}; }

  friend bool operator==(const SpamModel&, const SpamModel&) = default;
};

struct OutcomeProbs {
  double p0;
  double p1;
};

namespace detail {

inline void check_probability(double p, const char* what) {
  if (!(p >= -kPhysicalEps && p <= 1.0 + kPhysicalEps)) {
    throw NonPhysicalError(std::string(what) + ": probability " +
                           std::to_string(p) + " outside [0, 1]");
  }
}

}  // namespace detail

/// Z-basis outcome probabilities with a measurement parameter `m`.
inline OutcomeProbs z_measurement_probs(const PauliVector1Q& v, double m) {
  const double p0 = (1.0 + m * v[Pauli::Z]) / 2.0;
  detail::check_probability(p0, "z_measurement_probs");
  return {p0, 1.0 - p0};
}

inline OutcomeProbs z_measurement_probs(const PauliVector1Q& v) {
  return z_measurement_probs(v, 1.0);
}

/**
 * Joint Z measurement of both qubits, each with effect [1, 0, 0, +-m].
 * Returns P(00), P(01), P(10), P(11) with the first qubit as the left bit.
 */
inline std::array<double, 4> joint_z_measurement_probs(const PauliVector2Q& v,
                                                       const SpamModel& meas) {
  std::array<double, 4> out{};
  const double m = meas.m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double ma = a == 0 ? m : -m;
      const double mb = b == 0 ? m : -m;
      const double p = (v(Pauli::I, Pauli::I) + mb * v(Pauli::I, Pauli::Z) +
                        ma * v(Pauli::Z, Pauli::I) +
                        ma * mb * v(Pauli::Z, Pauli::Z)) /
                       4.0;
      detail::check_probability(p, "joint_z_measurement_probs");
      out[static_cast<std::size_t>(2 * a + b)] = p;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dressing, bypassability, composition
// ---------------------------------------------------------------------------

enum class Dressing { None, Hadamard, HadamardPhase };

/// Basis whose parameter a protocol reads out in its Z slot.
enum class Basis { X, Y, Z };

inline Dressing dressing_for(Basis b) {
  switch (b) {
    case Basis::X: return Dressing::Hadamard;
    case Basis::Y: return Dressing::HadamardPhase;
    case Basis::Z: return Dressing::None;
  }
  return Dressing::None;
}

inline Pauli pauli_of(Basis b) {
  switch (b) {
    case Basis::X: return Pauli::X;
    case Basis::Y: return Pauli::Y;
    case Basis::Z: return Pauli::Z;
  }
  return Pauli::Z;
}

inline char to_char(Basis b) { return to_char(pauli_of(b)); }

/// Parameters of V P V^dag for V = H or V = HS, by permuting the diagonal.
inline PauliChannel dress_channel(const PauliChannel& ch, Dressing d) {
  switch (d) {
    case Dressing::None: return ch;
    case Dressing::Hadamard: return {ch.qz(), ch.qy(), ch.qx()};
    case Dressing::HadamardPhase: return {ch.qz(), ch.qx(), ch.qy()};
  }
  return ch;
}

/// Conjugation PTM R(V) of the dressing unitary.
inline Ptm1Q dressing_unitary_ptm(Dressing d) {
  switch (d) {
    case Dressing::None: return Ptm1Q::identity();
    case Dressing::Hadamard: return ptm_of_gate(GateKind::Hadamard);
    case Dressing::HadamardPhase: return ptm_of_gate(GateKind::HadamardPhase);
  }
  return Ptm1Q::identity();
}

/// PTM of the dressed channel computed as R(V) P R(V)^T.
inline Ptm1Q dressed_ptm(const PauliChannel& ch, Dressing d) {
  const Ptm1Q v = dressing_unitary_ptm(d);
  return v * ptm_of_channel(ch) * v.transpose();
}

/// A non-identity Pauli left invariant by the channel, if any (X before Y
/// before Z).
inline std::optional<Pauli> bypass_axis(const PauliChannel& ch,
                                        double tol = 0.0) {
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    if (std::abs(ch.q(p) - 1.0) <= tol) return p;
  }
  return std::nullopt;
}

/// At least two unit entries on the PTM diagonal (counting the leading 1).
inline bool is_bypassable(const PauliChannel& ch, double tol = 0.0) {
  if (tol < 0.0) throw std::invalid_argument("is_bypassable: tol < 0");
  return bypass_axis(ch, tol).has_value();
}

/// Composite of a path of channels (componentwise product of diagonals).
inline PauliChannel compose_channels(std::span<const PauliChannel> path) {
  if (path.empty()) {
    throw std::invalid_argument("compose_channels: empty path");
  }
  double x = 1.0, y = 1.0, z = 1.0;
  for (const auto& ch : path) {
    x *= ch.qx();
    y *= ch.qy();
    z *= ch.qz();
  }
  return {x, y, z};
}

/// Product of q_b over a path; 1 for an empty path.
inline double path_product(std::span<const PauliChannel> path, Pauli b) {
  double acc = 1.0;
  for (const auto& ch : path) acc *= ch.q(b);
  return acc;
}

// ---------------------------------------------------------------------------

inline std::ostream& operator<<(std::ostream& os, const PauliVector1Q& v) {
  return os << '[' << v.coeffs[0] << ", " << v.coeffs[1] << ", "
            << v.coeffs[2] << ", " << v.coeffs[3] << ']';
}

inline std::ostream& operator<<(std::ostream& os, const PauliVector2Q& v) {
  os << '{';
  bool first = true;
  for (Pauli a : kPaulis)
    for (Pauli b : kPaulis) {
      const double c = v(a, b);
      if (c == 0.0) continue;
      if (!first) os << ", ";
      os << to_char(a) << to_char(b) << ": " << c;
      first = false;
    }
  return os << '}';
}

inline std::ostream& operator<<(std::ostream& os, const PauliChannel& ch) {
  return os << "diag(1, " << ch.qx() << ", " << ch.qy() << ", " << ch.qz()
            << ')';
}

}  // namespace qnt
