// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations used only by the tests. Nothing here goes
// through the library's Pauli algebra or simulator.

#pragma once

#include "fragvqe/integrals.hpp"

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(FRAGVQE_FIXTURE_DIR) / name;
}

/// Value of "key = value" in a fixture's .meta sidecar.
inline std::string meta_value(const std::string& stem, const std::string& key) {
  std::ifstream in(fixture(stem + ".meta"));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    k.erase(k.find_last_not_of(' ') + 1);
    if (k == key) return line.substr(line.find_first_not_of(' ', eq + 1));
  }
  return {};
}

inline double meta_real(const std::string& stem, const std::string& key) {
  return std::stod(meta_value(stem, key));
}

/// a_mode or a†_mode on a determinant; nullopt when the result vanishes.
inline std::optional<std::pair<std::uint64_t, double>> ladder(std::uint64_t bits, int mode, bool create) {
  const std::uint64_t m = std::uint64_t{1} << mode;
  if (create == static_cast<bool>(bits & m)) return std::nullopt;
  const int below = std::popcount(bits & (m - 1));
  return std::make_pair(bits ^ m, (below & 1) ? -1.0 : 1.0);
}

inline Eigen::MatrixXd dense_ladder(int mode, int n_qubits, bool create) {
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b)
    if (auto r = ladder(b, mode, create)) a(r->first, b) = r->second;
  return a;
}

/// Applies a product of ladder ops (rightmost first) to a determinant.
inline std::optional<std::pair<std::uint64_t, double>> apply_string(
    std::uint64_t bits, const std::vector<std::pair<int, bool>>& ops) {
  double sign = 1.0;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    auto r = ladder(bits, it->first, it->second);
    if (!r) return std::nullopt;
    bits = r->first;
    sign *= r->second;
  }
  return std::make_pair(bits, sign);
}

using QubitMap = std::function<int(int orbital, int spin)>;

inline QubitMap interleaved() {
  return [](int p, int s) { return 2 * p + s; };
}

/// Second-quantized Hamiltonian over the full Fock space, built by acting
/// on every determinant with h_pq a†a and ½(pq|rs) a†_p a†_r a_s a_q.
inline Eigen::MatrixXd fock_hamiltonian(const fragvqe::IntegralSet& ints, const QubitMap& q = interleaved()) {
  const int n = ints.n_orb;
  const int nq = 2 * n;
  const std::uint64_t dim = std::uint64_t{1} << nq;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    H(b, b) += ints.core_energy;
    for (int s = 0; s < 2; ++s)
      for (int p = 0; p < n; ++p)
        for (int r = 0; r < n; ++r) {
          if (ints.h(p, r) == 0.0) continue;
          if (auto o = apply_string(b, {{q(p, s), true}, {q(r, s), false}}))
            H(o->first, b) += ints.h(p, r) * o->second;
        }
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        for (int p = 0; p < n; ++p)
          for (int qq = 0; qq < n; ++qq)
            for (int r = 0; r < n; ++r)
              for (int ss = 0; ss < n; ++ss) {
                const double v = ints.g(p, qq, r, ss);
                if (v == 0.0) continue;
                auto o = apply_string(b, {{q(p, s), true}, {q(r, t), true}, {q(ss, t), false}, {q(qq, s), false}});
                if (o) H(o->first, b) += 0.5 * v * o->second;
              }
  }
  return H;
}

/// Lowest eigenvalue of H restricted to determinants with n_elec electrons
/// (and 2·Sz = sz2 when given, alpha on even qubits).
inline double sector_ground(const Eigen::MatrixXd& H, int n_elec, std::optional<int> sz2 = {}) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index b = 0; b < H.rows(); ++b) {
    const auto u = static_cast<std::uint64_t>(b);
    if (std::popcount(u) != n_elec) continue;
    if (sz2) {
      const int na = std::popcount(u & 0x5555555555555555ULL);
      if (2 * na - n_elec != *sz2) continue;
    }
    idx.push_back(b);
  }
  Eigen::MatrixXd S(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) S(i, j) = H(idx[i], idx[j]);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues()(0);
}

inline double ground(const Eigen::MatrixXd& H) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues()(0);
}

/// Fragment integrals built directly from the Fock-operator definition.
inline fragvqe::IntegralSet brute_force_embedding(const fragvqe::IntegralSet& ints,
                                                  const std::vector<int>& orbitals,
                                                  const std::vector<int>& occupied, double prefactor) {
  const int na = static_cast<int>(orbitals.size());
  fragvqe::IntegralSet out(na, 0, 0);
  out.core_energy = ints.core_energy;
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) {
      const int u = orbitals[a];
      const int v = orbitals[b];
      double f = ints.h(u, v);
      for (int i : occupied) f += prefactor * (2.0 * ints.g(i, i, u, v) - ints.g(i, v, u, i));
      out.h(a, b) = f;
      for (int c = 0; c < na; ++c)
        for (int d = 0; d < na; ++d) out.g(a, b, c, d) = ints.g(u, v, orbitals[c], orbitals[d]);
    }
  return out;
}

inline Eigen::MatrixXd random_orthogonal(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = d(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return qr.householderQ();
}

// ----------------------------------------------------------------------------
// Gate matrices, qubit 0 least significant.

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Mat pauli_1q(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Letter k of text acts on qubit k.
inline Mat pauli_text(const std::string& text) {
  Mat m = Mat::Identity(1, 1);
  for (char c : text) m = kron(pauli_1q(c), m);
  return m;
}

inline Mat on_qubit(const Mat& g, int q, int n) {
  return kron(kron(Mat::Identity(1 << (n - q - 1), 1 << (n - q - 1)), g), Mat::Identity(1 << q, 1 << q));
}

inline Mat rot(char axis, double theta) {
  return std::cos(theta / 2) * Mat::Identity(2, 2) - cd(0, 1) * std::sin(theta / 2) * pauli_1q(axis);
}

inline Mat cnot(int c, int t, int n) {
  const int dim = 1 << n;
  Mat m = Mat::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) m((b >> c) & 1 ? b ^ (1 << t) : b, b) = 1;
  return m;
}

inline Eigen::VectorXcd random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXcd v(1 << n);
  for (auto& a : v) a = cd(d(rng), d(rng));
  return v.normalized();
}

}  // namespace oracle
