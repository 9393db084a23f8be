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

// Density-matrix versions of every protocol circuit plus random generators.
// Nothing here calls into the Pauli-Liouville code paths.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "qnt/density_oracle.hpp"
#include "qnt/pauli.hpp"

namespace qnt::testing {

using oracle::DensityMatrix;
using oracle::Matrix;
using oracle::Unitary;

inline DensityMatrix prep_zero(double s) {
  Matrix rho(2, 2);
  rho << (1 + s) / 2, 0, 0, (1 - s) / 2;
  return DensityMatrix(rho);
}

/// V such that the dressed channel is V P(V^dag . V) V^dag.
inline Matrix dressing_unitary(Basis b) {
  switch (b) {
    case Basis::X: return oracle::unitary_matrix(Unitary::H);
    case Basis::Y: return oracle::unitary_matrix(Unitary::HS);
    case Basis::Z: break;
  }
  return oracle::unitary_matrix(Unitary::I);
}

inline Matrix on_qubit(const Matrix& g, Qubit which) {
  const Matrix id = Matrix::Identity(2, 2);
  return which == Qubit::First ? oracle::kron(g, id) : oracle::kron(id, g);
}

inline DensityMatrix dressed_channel(const DensityMatrix& rho,
                                     const PauliChannel& ch, Basis b) {
  const Matrix v = dressing_unitary(b);
  auto r = oracle::evolve_unitary(rho, Matrix(v.adjoint()));
  r = oracle::evolve_kraus(r, oracle::pauli_channel_kraus(ch));
  return oracle::evolve_unitary(r, v);
}

inline DensityMatrix dressed_channel(const DensityMatrix& rho,
                                     const PauliChannel& ch, Basis b,
                                     Qubit which) {
  const Matrix v = on_qubit(dressing_unitary(b), which);
  auto r = oracle::evolve_unitary(rho, Matrix(v.adjoint()));
  r = oracle::evolve_kraus(
      r, oracle::embed(oracle::pauli_channel_kraus(ch), which));
  return oracle::evolve_unitary(r, v);
}

inline DensityMatrix through(DensityMatrix rho,
                             const std::vector<PauliChannel>& path, Basis b) {
  for (const auto& ch : path) rho = dressed_channel(rho, ch, b);
  return rho;
}

inline DensityMatrix through(DensityMatrix rho,
                             const std::vector<PauliChannel>& path, Basis b,
                             Qubit which) {
  for (const auto& ch : path) rho = dressed_channel(rho, ch, b, which);
  return rho;
}

inline double oracle_unicast(const std::vector<PauliChannel>& path, double s,
                             double m, Basis b = Basis::Z) {
  return oracle::prob_zero(through(prep_zero(s), path, b), m);
}

inline DensityMatrix two_preps(double s) {
  return DensityMatrix(
      oracle::kron(prep_zero(s).matrix(), prep_zero(s).matrix()));
}

inline double oracle_mergecast(const std::vector<PauliChannel>& target,
                               const std::vector<PauliChannel>& a2,
                               const std::vector<PauliChannel>& b, double s,
                               double m, Basis basis = Basis::Z) {
  auto rho = two_preps(s);
  rho = through(rho, target, basis, Qubit::First);
  rho = through(rho, a2, basis, Qubit::Second);
  rho = oracle::evolve_unitary(rho, Unitary::CnotFirst);
  auto out = oracle::partial_trace(rho, Qubit::First);
  return oracle::prob_zero(through(out, b, basis), m);
}

inline double oracle_spam_s(const std::vector<PauliChannel>& path, double s,
                            double m) {
  auto rho = oracle::evolve_unitary(two_preps(s), Unitary::CnotFirst);
  return oracle::prob_zero(
      through(oracle::partial_trace(rho, Qubit::First), path, Basis::Z), m);
}

inline std::array<double, 4> oracle_spam_m(
    const std::vector<PauliChannel>& control,
    const std::vector<PauliChannel>& target, double s, double m) {
  auto rho = two_preps(s);
  rho = through(rho, control, Basis::Z, Qubit::First);
  rho = through(rho, target, Basis::Z, Qubit::Second);
  rho = oracle::evolve_unitary(rho, Unitary::CnotFirst);
  return oracle::joint_probs(rho, m);
}

/// Bypass via explicit unitaries: H around X-invariant channels, (SH) around
/// Y-invariant ones.
inline DensityMatrix oracle_bypass(DensityMatrix rho, const PauliChannel& ch) {
  Matrix u = oracle::unitary_matrix(Unitary::I);
  if (ch.qx() == 1.0) {
    u = oracle::unitary_matrix(Unitary::H);
  } else if (ch.qy() == 1.0) {
    u = oracle::unitary_matrix(Unitary::SH);
  }
  rho = oracle::evolve_unitary(rho, u);
  rho = oracle::evolve_kraus(rho, oracle::pauli_channel_kraus(ch));
  return oracle::evolve_unitary(rho, Matrix(u.adjoint()));
}

// ---------------------------------------------------------------------------
// Random draws
// ---------------------------------------------------------------------------

/// Physical Pauli channel from uniform probabilities on the simplex.
inline PauliChannel random_channel(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  double w[4];
  double sum = 0;
  for (double& x : w) sum += (x = e(rng));
  return PauliChannel::from_probabilities(w[1] / sum, w[2] / sum, w[3] / sum);
}

/// Physical channel whose q entries all have magnitude >= `min_abs`.
inline PauliChannel random_channel_away_from_zero(std::mt19937_64& rng,
                                                  double min_abs) {
  while (true) {
    const auto ch = random_channel(rng);
    if (std::abs(ch.qx()) >= min_abs && std::abs(ch.qy()) >= min_abs &&
        std::abs(ch.qz()) >= min_abs)
      return ch;
  }
}

inline PauliVector1Q random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = n(rng), y = n(rng), z = n(rng);
  const double norm = std::sqrt(x * x + y * y + z * z);
  const double r = std::cbrt(u(rng));
  return {{1.0, r * x / norm, r * y / norm, r * z / norm}};
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

}  // namespace qnt::testing
