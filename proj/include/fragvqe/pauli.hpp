// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pauli.hpp
 * @brief Symplectic Pauli strings, sparse Pauli sums, fermionic operators
 *        and the Jordan-Wigner map.
 *
 * Qubit q corresponds to bit q of the x/z masks. Text forms print qubit 0
 * leftmost.
 */

#pragma once

#include "fragvqe/integrals.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <bit>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace fragvqe {

using Complex = std::complex<double>;

/// Coefficients below this magnitude are dropped after every merge.
inline constexpr double kPauliPruneTol = 1e-12;

/// n-qubit Pauli string P = i^{|x&z|} X^x Z^z (so x&z bits denote Y).
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  int n_qubits = 0;

  static PauliString identity(int n_qubits) { return {0, 0, n_qubits}; }
  static PauliString from_text(std::string_view text);

  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] char letter(int q) const noexcept;
  [[nodiscard]] int weight() const noexcept;
  [[nodiscard]] int y_count() const noexcept;
  [[nodiscard]] bool is_identity() const noexcept { return (x | z) == 0; }
  [[nodiscard]] bool commutes_with(const PauliString& other) const noexcept;
  /// Pauli string with every Z letter replaced by I.
  [[nodiscard]] PauliString strip_z() const noexcept;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString& a, const PauliString& b) {
    return std::tie(a.n_qubits, a.x, a.z) <=> std::tie(b.n_qubits, b.x, b.z);
  }
};

/// a·b = phase · c
std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b);

/// Phase of P|b⟩ = phase(b)·|b ⊕ x⟩.
inline Complex pauli_phase(const PauliString& p, std::uint64_t basis) {
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int k = (p.y_count() + 2 * (std::popcount(basis & p.z) & 1)) & 3;
  return kIPow[k];
}

/**
 * Sparse linear combination of Pauli strings sharing one qubit count.
 */
class PauliSum {
 public:
  using TermMap = std::map<PauliString, Complex>;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_(n_qubits) {}
  PauliSum(const PauliString& p, Complex c);

  static PauliSum identity(int n_qubits, Complex c = 1.0);

  [[nodiscard]] int n_qubits() const noexcept { return n_; }
  [[nodiscard]] const TermMap& terms() const noexcept { return terms_; }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
  [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
  [[nodiscard]] Complex coefficient(const PauliString& p) const;

  void add(const PauliString& p, Complex c);

  PauliSum& operator+=(const PauliSum& rhs);
  PauliSum& operator-=(const PauliSum& rhs);
  PauliSum& operator*=(Complex c);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, Complex c) { return a *= c; }
  friend PauliSum operator*(Complex c, PauliSum a) { return a *= c; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  [[nodiscard]] PauliSum adjoint() const;
  /// max |c_P − conj(c_P)| over terms.
  [[nodiscard]] double hermiticity_defect() const;
  [[nodiscard]] bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }
  [[nodiscard]] bool is_anti_hermitian(double tol = 1e-10) const;
  /// True when every pair of strings commutes.
  [[nodiscard]] bool strings_commute() const;

  [[nodiscard]] Eigen::MatrixXcd to_dense() const;
  [[nodiscard]] Eigen::SparseMatrix<Complex> to_sparse() const;

  /// "coef_re coef_im STRING" per line.
  void write_text(std::ostream& out) const;
  static PauliSum read_text(std::istream& in);

 private:
  void check_width(int n) const;

  int n_ = 0;
  TermMap terms_;
};

/// Dense 2ⁿ×2ⁿ matrix of a single Pauli string (little-endian).
Eigen::MatrixXcd pauli_matrix(const PauliString& p);

// ============================================================================
// Fermionic operators
// ============================================================================

struct LadderOp {
  int mode = 0;
  bool creation = false;
  friend bool operator==(const LadderOp&, const LadderOp&) = default;
};

struct FermionTerm {
  Complex coefficient = 1.0;
  std::vector<LadderOp> ops;  ///< applied right-to-left, written left-to-right
};

class FermionOperator {
 public:
  FermionOperator() = default;

  /// Single product term.
  static FermionOperator term(Complex c, std::vector<LadderOp> ops);

  void add(Complex c, std::vector<LadderOp> ops);
  [[nodiscard]] const std::vector<FermionTerm>& terms() const noexcept { return terms_; }
  [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
  [[nodiscard]] int max_mode() const noexcept;
  [[nodiscard]] FermionOperator adjoint() const;

  FermionOperator& operator+=(const FermionOperator& rhs);
  FermionOperator& operator-=(const FermionOperator& rhs);
  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
  friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) { return a -= b; }

 private:
  std::vector<FermionTerm> terms_;
};

inline LadderOp cre(int p) { return {p, true}; }
inline LadderOp des(int p) { return {p, false}; }

/// Jordan-Wigner image of a single ladder operator.
PauliSum jw_ladder(const LadderOp& op, int n_qubits);

/// a†_p → ½(X_p − iY_p)·Z_{p−1}…Z_0, a_p → ½(X_p + iY_p)·Z_{p−1}…Z_0.
PauliSum jw_transform(const FermionOperator& op, int n_qubits);

/// Second-quantized molecular Hamiltonian in the partition's qubit order.
FermionOperator hamiltonian_fermion(const IntegralSet& ints, const Partition& part);
PauliSum hamiltonian_to_pauli(const IntegralSet& ints, const Partition& part);

/// Total number operator Σ_q a†_q a_q.
PauliSum number_operator(int n_qubits);
/// Σ_q ±½ a†_q a_q with + on even (alpha) qubits.
PauliSum sz_operator(int n_qubits);
/// Total spin S² = S₋S₊ + Sz(Sz + 1), pairing qubits 2k (alpha) and 2k+1 (beta).
PauliSum s2_operator(int n_qubits);

// ============================================================================
// Excitation generators
// ============================================================================

enum class ExcitationKind { Single, Double };

struct Excitation {
  ExcitationKind kind = ExcitationKind::Single;
  std::vector<int> indices;  ///< (p,q) or (p,q,r,s) in qubit numbering
  FermionOperator op;
  PauliSum image;
};

/// Spin of a qubit under the interleaved layout: even = alpha.
inline Spin qubit_spin(int qubit) { return qubit % 2 == 0 ? Spin::Alpha : Spin::Beta; }

/**
 * τ_p^q = a†_q a_p − a†_p a_q  (indices {p,q});
 * τ_pq^rs = a†_s a†_r a_p a_q − a†_q a†_p a_r a_s  (indices {p,q,r,s}).
 * Spin conservation is enforced unless allow_spin_flip is set.
 */
Excitation excitation_generator(ExcitationKind kind, const std::vector<int>& indices,
                                int n_qubits, bool allow_spin_flip = false);

}  // namespace fragvqe
