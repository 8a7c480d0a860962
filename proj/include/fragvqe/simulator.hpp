// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file simulator.hpp
 * @brief Dense state-vector engine with Pauli rotations, expectation values,
 *        analytic gradients and CNOT accounting.
 *
 * Basis index bit q is qubit q (little-endian).
 */

#pragma once

#include "fragvqe/integrals.hpp"
#include "fragvqe/pauli.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace fragvqe {

template <typename Scalar>
using StateVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Normalized 2ⁿ amplitude vector.
struct QuantumState {
  int n_qubits = 0;
  StateVector<double> amp;

  QuantumState() = default;
  QuantumState(int n, StateVector<double> a);

  [[nodiscard]] Eigen::Index dim() const noexcept { return amp.size(); }
  [[nodiscard]] double norm() const { return amp.norm(); }
};

/// Single computational basis state.
QuantumState prepare_basis(std::uint64_t bits, int n_qubits);
QuantumState prepare_basis(const Occupation& occ);

/// a occupies the low qubit indices of the result.
QuantumState kron(const QuantumState& a, const QuantumState& b);

/// |⟨a|b⟩|²
double fidelity(const QuantumState& a, const QuantumState& b);

// ============================================================================
// Kernels
// ============================================================================

/// ψ ← exp(iφP) ψ = cos φ ψ + i sin φ Pψ.
template <typename Derived>
void apply_pauli_rotation(Eigen::MatrixBase<Derived>& psi, const PauliString& p, double phi) {
  using C = typename Derived::Scalar;
  using R = typename C::value_type;
  const R c = std::cos(static_cast<R>(phi));
  const R s = std::sin(static_cast<R>(phi));
  const auto dim = static_cast<std::uint64_t>(psi.size());
  if (p.x == 0) {
    // diagonal: phase(b) = ±1
    const C plus(c, s);
    const C minus(c, -s);
    for (std::uint64_t b = 0; b < dim; ++b)
      psi(b) *= (std::popcount(b & p.z) & 1) ? minus : plus;
    return;
  }
  const C is(0, s);
  const std::uint64_t high = std::uint64_t{1} << (63 - std::countl_zero(p.x));
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & high) continue;
    const std::uint64_t f = b ^ p.x;
    const C a0 = psi(b);
    const C a1 = psi(f);
    psi(b) = c * a0 + is * C(pauli_phase(p, f)) * a1;
    psi(f) = c * a1 + is * C(pauli_phase(p, b)) * a0;
  }
}

/// out = P ψ
template <typename Derived, typename OutDerived>
void apply_pauli(const Eigen::MatrixBase<Derived>& psi, const PauliString& p,
                 Eigen::MatrixBase<OutDerived>& out) {
  using C = typename Derived::Scalar;
  const auto dim = static_cast<std::uint64_t>(psi.size());
  for (std::uint64_t b = 0; b < dim; ++b) out(b ^ p.x) = C(pauli_phase(p, b)) * psi(b);
}

template <typename Derived>
void apply_cnot(Eigen::MatrixBase<Derived>& psi, int control, int target) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  const std::uint64_t cm = std::uint64_t{1} << control;
  const std::uint64_t tm = std::uint64_t{1} << target;
  for (std::uint64_t b = 0; b < dim; ++b)
    if ((b & cm) && !(b & tm)) std::swap(psi(b), psi(b | tm));
}

// ============================================================================
// Circuits
// ============================================================================

enum class GateKind { RX, RY, RZ, CNOT, PauliRot };

/**
 * RX/RY/RZ(θ) = exp(−iθG/2). PauliRot applies exp(i·scale·θ·P). A gate with
 * slot < 0 uses its fixed angle.
 */
struct Gate {
  GateKind kind = GateKind::RX;
  int q0 = 0;
  int q1 = 0;
  PauliString pauli;
  int slot = -1;
  double angle = 0.0;
  double scale = 1.0;

  /// Generator string and scale in the exp(i·scale·θ·P) form.
  [[nodiscard]] PauliString generator(int n_qubits) const;
  [[nodiscard]] double generator_scale() const;
};

class ParamCircuit {
 public:
  ParamCircuit() = default;
  explicit ParamCircuit(int n_qubits) : n_(n_qubits) {}

  [[nodiscard]] int n_qubits() const noexcept { return n_; }
  [[nodiscard]] int n_params() const noexcept { return n_params_; }
  [[nodiscard]] const std::vector<Gate>& gates() const noexcept { return gates_; }

  /// Reserves a fresh parameter slot.
  int new_slot() { return n_params_++; }

  void rx(int q, int slot);
  void ry(int q, int slot);
  void rz(int q, int slot);
  void rotation(GateKind kind, int q, int slot);
  void fixed_rotation(GateKind kind, int q, double angle);
  void cnot(int control, int target);
  void pauli_rot(const PauliString& p, int slot, double scale = 1.0);

  /**
   * exp(θ·G) for an anti-Hermitian G with mutually commuting strings, as one
   * PauliRot per string sharing a slot. Returns the slot.
   */
  int exp_generator(const PauliSum& image);

  /// Appends every gate of other, shifting its slots past ours.
  void append(const ParamCircuit& other);

 private:
  void check_qubit(int q) const;
  void check_slot(int slot) const;

  int n_ = 0;
  int n_params_ = 0;
  std::vector<Gate> gates_;
};

QuantumState apply_circuit(const QuantumState& state, const ParamCircuit& circuit,
                           const Eigen::VectorXd& params);

/// Dense unitary, for testing small circuits.
Eigen::MatrixXcd circuit_unitary(const ParamCircuit& circuit, const Eigen::VectorXd& params);

/// CNOTs plus 2(w−1) per weight-w PauliRot.
int count_cnots(const ParamCircuit& circuit);
int pauli_rotation_cnots(const PauliString& p);

// ============================================================================
// Observables
// ============================================================================

/// Hermitian PauliSum compiled to a sparse matrix for repeated use.
class Observable {
 public:
  Observable() = default;
  explicit Observable(const PauliSum& h, double herm_tol = 1e-10);

  [[nodiscard]] int n_qubits() const noexcept { return n_; }
  [[nodiscard]] const Eigen::SparseMatrix<Complex, Eigen::RowMajor>& matrix() const noexcept {
    return m_;
  }
  [[nodiscard]] StateVector<double> apply(const StateVector<double>& psi) const { return m_ * psi; }

 private:
  int n_ = 0;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> m_;
};

/// ⟨ψ|H|ψ⟩; throws on non-Hermitian H or a complex residue above 1e-10.
double expectation(const QuantumState& state, const PauliSum& h);
double expectation(const QuantumState& state, const Observable& h);
/// ⟨ψ|O|ψ⟩ without Hermiticity requirement.
Complex expectation_complex(const QuantumState& state, const PauliSum& op);

/// Energy and analytic gradient by reverse-mode sweep through the circuit.
double energy_and_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& params,
                           const Observable& h, const QuantumState& reference,
                           Eigen::VectorXd& grad);

/// Per-string parameter-shift rule: E(φ+π/4) − E(φ−π/4) for each exp(iφP).
Eigen::VectorXd parameter_shift_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& params,
                                         const Observable& h, const QuantumState& reference);

/// Central differences with step h.
Eigen::VectorXd finite_difference_gradient(const ParamCircuit& circuit,
                                           const Eigen::VectorXd& params, const Observable& obs,
                                           const QuantumState& reference, double h = 1e-5);

// ============================================================================
// Binary dump
// ============================================================================

/// "FVQS" magic, u32 n_qubits, u32 endianness tag 0x01020304, then 2ⁿ LE complex doubles.
void write_state(std::ostream& out, const QuantumState& state);
QuantumState read_state(std::istream& in);

}  // namespace fragvqe
