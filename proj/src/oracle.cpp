// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>

namespace fragvqe {

SpectrumResult exact_ground_state(const PauliSum& h, const std::optional<Sector>& sector, int n_low) {
  if (!h.is_hermitian()) throw ValidationError("exact_ground_state of a non-Hermitian operator");
  const int n = h.n_qubits();
  if (n > 24) throw ValidationError("too many qubits for a dense solve");
  const std::uint64_t full = std::uint64_t{1} << n;

  std::vector<std::uint64_t> basis;
  for (std::uint64_t b = 0; b < full; ++b) {
    if (sector) {
      if (std::popcount(b) != sector->n_elec) continue;
      if (sector->sz2) {
        const int na = std::popcount(b & 0x5555555555555555ULL);
        const int nb = std::popcount(b & 0xAAAAAAAAAAAAAAAAULL);
        if (na - nb != *sector->sz2) continue;
      }
    }
    basis.push_back(b);
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  if (dim == 0) throw ValidationError("empty Hilbert-space sector");
  if (dim > kMaxDenseDim) throw ValidationError("sector too large for a dense solve");

  std::vector<Eigen::Index> pos(full, -1);
  for (Eigen::Index i = 0; i < dim; ++i) pos[basis[i]] = i;

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : h.terms())
    for (Eigen::Index j = 0; j < dim; ++j) {
      const Eigen::Index i = pos[basis[j] ^ p.x];
      if (i >= 0) m(i, j) += c * pauli_phase(p, basis[j]);
    }

  // A spin restriction adds μ(S² − s(s+1))² with μ above the spectral width, so every
  // state of another spin lies above all states of the requested one.
  Eigen::MatrixXcd target = m;
  double width = 0.0;
  const bool spin = sector && sector->multiplicity;
  if (spin) {
    const int mult = *sector->multiplicity;
    if (mult < 1) throw ValidationError("multiplicity must be positive");
    if (sector->sz2 && (std::abs(*sector->sz2) > mult - 1 || (mult - 1 - *sector->sz2) % 2 != 0))
      throw ValidationError("multiplicity incompatible with 2·Sz");
    for (const auto& [p, c] : h.terms()) width += std::abs(c);
    const PauliSum s2_op = s2_operator(n);
    Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [p, c] : s2_op.terms())
      for (Eigen::Index j = 0; j < dim; ++j) {
        const Eigen::Index i = pos[basis[j] ^ p.x];
        if (i >= 0) s2(i, j) += c * pauli_phase(p, basis[j]);
      }
    const double s = 0.5 * (mult - 1);
    s2.diagonal().array() -= s * (s + 1.0);
    target += (width + 1.0) * (s2 * s2);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(target);
  if (es.info() != Eigen::Success) throw ValidationError("eigensolver failed");
  Eigen::Index n_spin = dim;
  if (spin) {
    n_spin = 0;
    while (n_spin < dim && es.eigenvalues()(n_spin) <= width + 0.5) ++n_spin;
    if (n_spin == 0) throw ValidationError("no state of the requested multiplicity in the sector");
  }

  Eigen::VectorXcd v = es.eigenvectors().col(0);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < dim; ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  v *= std::conj(v(best)) / std::abs(v(best));

  SpectrumResult r;
  r.energy = spin ? v.dot(m * v).real() : es.eigenvalues()(0);
  StateVector<double> amp = StateVector<double>::Zero(static_cast<Eigen::Index>(full));
  for (Eigen::Index i = 0; i < dim; ++i) amp(static_cast<Eigen::Index>(basis[i])) = v(i);
  amp.normalize();
  r.state = QuantumState(n, std::move(amp));
  r.low_lying = es.eigenvalues().head(std::min<Eigen::Index>(std::max(n_low, 1), n_spin));
  r.residual = (m * v - r.energy * v).norm();
  return r;
}

Eigen::MatrixXcd one_rdm(const QuantumState& state, int n_orb, const Partition& part) {
  if (part.n_orb() != n_orb) throw ValidationError("partition does not match orbital count");
  if (state.n_qubits != 2 * n_orb) throw ValidationError("state width is not 2·n_orb");
  const int nq = state.n_qubits;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n_orb, n_orb);
  for (int p = 0; p < n_orb; ++p)
    for (int q = p; q < n_orb; ++q) {
      Complex v = 0.0;
      for (Spin s : {Spin::Alpha, Spin::Beta}) {
        const auto op = FermionOperator::term(1.0, {cre(part.qubit(p, s)), des(part.qubit(q, s))});
        v += expectation_complex(state, jw_transform(op, nq));
      }
      d(p, q) = v;
      d(q, p) = std::conj(v);
    }
  return d;
}

Eigen::VectorXd natural_occupations(const Eigen::MatrixXcd& rdm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rdm, Eigen::EigenvaluesOnly);
  Eigen::VectorXd occ = es.eigenvalues().reverse();
  return occ;
}

double shannon_entropy(const Eigen::VectorXd& occ, EntropyMode mode) {
  constexpr double kEps = 1e-12;
  double s = 0.0;
  for (double n : occ) {
    if (n < -1e-8) throw ValidationError("negative natural occupation");
    const double x = mode == EntropyMode::Halved ? 0.5 * n : n;
    if (x > kEps) s -= x * std::log(x);
  }
  return s;
}

double npe(const std::vector<double>& errors) {
  if (errors.size() < 2) throw ValidationError("non-parallelity error needs at least two points");
  const auto [lo, hi] = std::minmax_element(errors.begin(), errors.end());
  return *hi - *lo;
}

}  // namespace fragvqe
