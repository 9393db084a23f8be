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
 * Brute-force density-matrix reference for one and two qubits.
 *
 * Everything here works on explicit complex matrices and shares no code with
 * the Pauli-Liouville routines, so the two can check each other.
 */

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnt/pauli.hpp"

namespace qnt::oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kOracleEps = 1e-12;
inline constexpr double kEigenEps = 1e-10;

inline Matrix pauli_matrix(Pauli p) {
  Matrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i, i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

class DensityMatrix {
 public:
  /// Validates shape, hermiticity, unit trace and positivity.
  explicit DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || (rho_.rows() != 2 && rho_.rows() != 4)) {
      throw std::invalid_argument("DensityMatrix: dimension must be 2 or 4");
    }
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kOracleEps) {
      throw NonPhysicalError("DensityMatrix: not Hermitian");
    }
    if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > kOracleEps) {
      throw NonPhysicalError("DensityMatrix: trace != 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_);
    if (es.eigenvalues().minCoeff() < -kEigenEps) {
      throw NonPhysicalError("DensityMatrix: negative eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
    }
  }

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }
  Complex operator()(int r, int c) const { return rho_(r, c); }

 private:
  Matrix rho_;
};

class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: no operators");
    const auto d = ops_.front().rows();
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& k : ops_) {
      if (k.rows() != d || k.cols() != d) {
        throw std::invalid_argument("KrausChannel: inconsistent dimensions");
      }
      acc += k.adjoint() * k;
    }
    if ((acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kOracleEps) {
      throw std::invalid_argument("KrausChannel: sum K^dag K != I");
    }
  }

  int dim() const { return static_cast<int>(ops_.front().rows()); }
  const std::vector<Matrix>& operators() const { return ops_; }

  /// Sequential composition: `this` first, then `next`.
  KrausChannel then(const KrausChannel& next) const {
    std::vector<Matrix> out;
    for (const auto& b : next.ops_)
      for (const auto& a : ops_) out.push_back(b * a);
    return KrausChannel(std::move(out));
  }

 private:
  std::vector<Matrix> ops_;
};

inline KrausChannel pauli_channel_kraus(const PauliChannel& ch) {
  std::vector<Matrix> ops;
  for (Pauli p : kPaulis) {
    const double w = std::max(0.0, ch.prob(p));
    ops.push_back(std::sqrt(w) * pauli_matrix(p));
  }
  return KrausChannel(std::move(ops));
}

inline KrausChannel amplitude_damping(double gamma) {
  Matrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  return KrausChannel({k0, k1});
}

/// Phase damping with off-diagonal factor sqrt(1 - lambda).
inline KrausChannel phase_damping(double lambda) {
  Matrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - lambda);
  k1 << 0, 0, 0, std::sqrt(lambda);
  return KrausChannel({k0, k1});
}

/// Identity on the other qubit, channel on `which`.
inline KrausChannel embed(const KrausChannel& ch, Qubit which) {
  const Matrix id = Matrix::Identity(2, 2);
  std::vector<Matrix> ops;
  for (const auto& k : ch.operators())
    ops.push_back(which == Qubit::First ? kron(k, id) : kron(id, k));
  return KrausChannel(std::move(ops));
}

inline DensityMatrix pauli_to_density(const PauliVector1Q& v) {
  Matrix rho = Matrix::Zero(2, 2);
  for (Pauli p : kPaulis) rho += 0.5 * v[p] * pauli_matrix(p);
  return DensityMatrix(rho);
}

inline DensityMatrix pauli_to_density(const PauliVector2Q& v) {
  Matrix rho = Matrix::Zero(4, 4);
  for (Pauli a : kPaulis)
    for (Pauli b : kPaulis)
      rho += 0.25 * v(a, b) * kron(pauli_matrix(a), pauli_matrix(b));
  return DensityMatrix(rho);
}

inline PauliVector1Q density_to_pauli_1q(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("expected a 2x2 matrix");
  PauliVector1Q v;
  for (Pauli p : kPaulis)
    v[p] = (pauli_matrix(p) * rho.matrix()).trace().real();
  return v;
}

inline PauliVector2Q density_to_pauli_2q(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("expected a 4x4 matrix");
  PauliVector2Q v;
  for (Pauli a : kPaulis)
    for (Pauli b : kPaulis)
      v(a, b) = (kron(pauli_matrix(a), pauli_matrix(b)) * rho.matrix())
                    .trace()
                    .real();
  return v;
}

inline DensityMatrix evolve_kraus(const DensityMatrix& rho,
                                  const KrausChannel& ch) {
  if (rho.dim() != ch.dim()) {
    throw std::invalid_argument("evolve_kraus: dimension mismatch");
  }
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : ch.operators()) out += k * rho.matrix() * k.adjoint();
  return DensityMatrix(out);
}

enum class Unitary { I, H, S, Sdg, HS, SH, X, Y, Z, CnotFirst, CnotSecond };

inline Matrix unitary_matrix(Unitary u) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Matrix h(2, 2), s(2, 2), sdg(2, 2);
  h << r, r, r, -r;
  s << 1, 0, 0, i;
  sdg << 1, 0, 0, -i;
  switch (u) {
    case Unitary::I: return Matrix::Identity(2, 2);
    case Unitary::H: return h;
    case Unitary::S: return s;
    case Unitary::Sdg: return sdg;
    case Unitary::HS: return h * s;
    case Unitary::SH: return s * h;
    case Unitary::X: return pauli_matrix(Pauli::X);
    case Unitary::Y: return pauli_matrix(Pauli::Y);
    case Unitary::Z: return pauli_matrix(Pauli::Z);
    case Unitary::CnotFirst: {
      Matrix c = Matrix::Zero(4, 4);
      c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
      return c;
    }
    case Unitary::CnotSecond: {
      Matrix c = Matrix::Zero(4, 4);
      c(0, 0) = c(3, 1) = c(2, 2) = c(1, 3) = 1.0;
      return c;
    }
  }
  return Matrix::Identity(2, 2);
}

inline DensityMatrix evolve_unitary(const DensityMatrix& rho,
                                    const Matrix& u) {
  if (u.rows() != rho.dim()) {
    throw std::invalid_argument("evolve_unitary: dimension mismatch");
  }
  return DensityMatrix(u * rho.matrix() * u.adjoint());
}

inline DensityMatrix evolve_unitary(const DensityMatrix& rho, Unitary u) {
  return evolve_unitary(rho, unitary_matrix(u));
}

/// Single-qubit unitary applied to one half of a two-qubit state.
inline DensityMatrix evolve_unitary(const DensityMatrix& rho, Unitary u,
                                    Qubit which) {
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix g = unitary_matrix(u);
  return evolve_unitary(rho, which == Qubit::First ? kron(g, id) : kron(id, g));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, Qubit discard) {
  if (rho.dim() != 4) throw std::invalid_argument("partial_trace: need 4x4");
  Matrix out = Matrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) {
        out(a, b) += discard == Qubit::First
                         ? rho(2 * k + a, 2 * k + b)
                         : rho(2 * a + k, 2 * b + k);
      }
  return DensityMatrix(out);
}

/// <0|E0 ρ> style probability with a diagonal effect diag((1+m)/2, (1-m)/2).
inline double prob_zero(const DensityMatrix& rho, double m = 1.0) {
  if (rho.dim() != 2) throw std::invalid_argument("prob_zero: need 2x2");
  return (0.5 * (1.0 + m) * rho(0, 0) + 0.5 * (1.0 - m) * rho(1, 1)).real();
}

/// Joint outcome probabilities for effects diag((1+-m)/2, (1-+m)/2) on each
/// qubit, ordered 00, 01, 10, 11.
inline std::array<double, 4> joint_probs(const DensityMatrix& rho, double m) {
  if (rho.dim() != 4) throw std::invalid_argument("joint_probs: need 4x4");
  std::array<double, 4> out{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Matrix ea(2, 2), eb(2, 2);
      const double sa = a == 0 ? m : -m, sb = b == 0 ? m : -m;
      ea << 0.5 * (1 + sa), 0, 0, 0.5 * (1 - sa);
      eb << 0.5 * (1 + sb), 0, 0, 0.5 * (1 - sb);
      out[static_cast<std::size_t>(2 * a + b)] =
          (kron(ea, eb) * rho.matrix()).trace().real();
    }
  return out;
}

/// Ground-state-relaxing memory noise after `t` seconds.
inline KrausChannel t1t2_channel(double t, double t1, double t2) {
  const double e1 = std::exp(-t / t1);
  const double e_phi = std::exp(-t / t2 + t / (2.0 * t1));
  Matrix a0(2, 2), a1(2, 2), p0(2, 2), p1(2, 2);
  a0 << 1, 0, 0, std::sqrt(e1);
  a1 << 0, std::sqrt(-std::expm1(-t / t1)), 0, 0;
  p0 << 1, 0, 0, e_phi;
  p1 << 0, 0, 0, std::sqrt(std::max(0.0, (1.0 - e_phi) * (1.0 + e_phi)));
  return KrausChannel({a0, a1}).then(KrausChannel({p0, p1}));
}

}  // namespace qnt::oracle
