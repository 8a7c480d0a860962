// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file integrals.hpp
 * @brief Spatial-orbital integrals, FCIDUMP I/O, orbital rotation and
 *        fragment embedding.
 *
 * Two-electron integrals are stored in chemist notation (pq|rs). Spin
 * orbitals are never materialized here; the restricted expansion happens at
 * Hamiltonian assembly time.
 */

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fragvqe {

// ============================================================================
// Errors
// ============================================================================

/// Malformed input text; carries the 1-based line number of the offence.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that lacks a required field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments that violate an operation's precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ============================================================================
// Integral tables
// ============================================================================

/**
 * Dense n⁴ table of (pq|rs). Writes through set() keep the 8-fold
 * permutational symmetry of real orbitals.
 */
class TwoBodyTensor {
 public:
  TwoBodyTensor() = default;
  explicit TwoBodyTensor(int n_orb);

  [[nodiscard]] int n_orb() const noexcept { return n_; }

  [[nodiscard]] double operator()(int p, int q, int r, int s) const {
    return data_[index(p, q, r, s)];
  }
  double& operator()(int p, int q, int r, int s) {
    return data_[index(p, q, r, s)];
  }

  /// Assigns v to (pq|rs) and its seven permutational images.
  void set(int p, int q, int r, int s, double v);

  [[nodiscard]] const Eigen::VectorXd& data() const noexcept { return data_; }
  Eigen::VectorXd& data() noexcept { return data_; }

  /// Largest deviation from 8-fold symmetry over the whole table.
  [[nodiscard]] double symmetry_defect() const;

 private:
  [[nodiscard]] std::size_t index(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }

  int n_ = 0;
  Eigen::VectorXd data_;
};

/// Molecular problem definition in a spatial-orbital basis (Hartree).
struct IntegralSet {
  int n_orb = 0;
  int n_elec = 0;
  int ms2 = 0;
  double core_energy = 0.0;
  Eigen::MatrixXd h;  ///< one-electron table, symmetric
  TwoBodyTensor g;    ///< (pq|rs), chemist notation
  std::vector<int> orbsym;

  IntegralSet() = default;
  IntegralSet(int n_orb, int n_elec, int ms2 = 0);

  [[nodiscard]] int n_alpha() const noexcept { return (n_elec + ms2) / 2; }
  [[nodiscard]] int n_beta() const noexcept { return (n_elec - ms2) / 2; }

  /// Throws ValidationError when a type invariant is broken.
  void validate(double tol = 1e-10) const;
};

/// Parses FCIDUMP text (namelist header, then "value i j k l" lines).
IntegralSet parse_fcidump(std::istream& in);
IntegralSet read_fcidump(const std::filesystem::path& path);

/// Writes the symmetry-unique entries with round-trip precision.
void write_fcidump(std::ostream& out, const IntegralSet& ints);

/// h' = Uᵀ h U and the 4-index transform of g. U must be orthogonal.
IntegralSet rotate_orbitals(const IntegralSet& ints, const Eigen::MatrixXd& U);

/// Whitespace-separated square matrix, one row per line.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

// ============================================================================
// Partition
// ============================================================================

enum class Spin : int { Alpha = 0, Beta = 1 };

struct Fragment {
  std::vector<int> orbitals;
  int n_elec = 0;
};

/**
 * Assignment of spatial orbitals to fragments. Qubits are laid out
 * fragment-major: for each fragment, for each of its orbitals, alpha then
 * beta. Even qubits are therefore always alpha.
 */
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<Fragment> fragments, int n_orb, int n_elec);

  /// One fragment holding every orbital in source order.
  static Partition single(const IntegralSet& ints);

  /// Parses "0,2|1,3" with optional electron counts "2,2".
  static Partition parse(const std::string& orbitals, int n_orb, int n_elec,
                         const std::string& electrons = {});

  [[nodiscard]] const std::vector<Fragment>& fragments() const noexcept {
    return fragments_;
  }
  [[nodiscard]] int n_fragments() const noexcept {
    return static_cast<int>(fragments_.size());
  }
  [[nodiscard]] int n_orb() const noexcept { return n_orb_; }
  [[nodiscard]] int n_qubits() const noexcept { return 2 * n_orb_; }
  [[nodiscard]] int n_elec() const noexcept { return n_elec_; }

  [[nodiscard]] int qubit(int orbital, Spin spin) const;
  [[nodiscard]] int orbital_of_qubit(int qubit) const;
  [[nodiscard]] int fragment_of_orbital(int orbital) const;
  [[nodiscard]] int fragment_of_qubit(int qubit) const;
  [[nodiscard]] int qubit_offset(int fragment) const;
  [[nodiscard]] int fragment_qubits(int fragment) const;

  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<Fragment> fragments_;
  int n_orb_ = 0;
  int n_elec_ = 0;
  std::vector<int> qubit_of_orbital_;  // alpha qubit per spatial orbital
  std::vector<int> fragment_of_orbital_;
  std::vector<int> orbital_of_qubit_;
};

// ============================================================================
// Embedding
// ============================================================================

/// Which doubly-occupied orbitals feed the embedded Fock operator.
enum class EmbedOccupied {
  AllOccupied,          ///< every occupied orbital, fragment's own included
  EnvironmentOccupied,  ///< occupied orbitals outside the fragment only
};

/// Prefactor on the Coulomb/exchange sum of the embedded Fock operator.
enum class FockPrefactor { Half, Full };

struct EmbedOptions {
  EmbedOccupied occupied = EmbedOccupied::AllOccupied;
  FockPrefactor prefactor = FockPrefactor::Half;
  /// Replaces the reference-determinant occupied set when present.
  std::optional<std::vector<int>> occupied_override;
};

EmbedOccupied parse_embed_occupied(const std::string& text);
FockPrefactor parse_fock_prefactor(const std::string& text);

/// Embedded fragment Hamiltonian data in fragment-local orbital order.
struct FragmentProblem {
  int fragment_id = 0;
  IntegralSet local;
  double constant_shift = 0.0;
  int n_qubits = 0;
  int n_elec_frag = 0;
};

/// Doubly-occupied spatial orbitals of the aufbau reference (source order).
std::vector<int> reference_occupied(const IntegralSet& ints);

FragmentProblem embed_fragment(const IntegralSet& ints, const Partition& part,
                               int fragment_id, const EmbedOptions& opts = {});

// ============================================================================
// Reference determinant
// ============================================================================

/// Computational-basis occupation over at most 64 qubits; bit q = qubit q.
struct Occupation {
  std::uint64_t bits = 0;
  int n_qubits = 0;

  [[nodiscard]] bool test(int q) const noexcept { return (bits >> q) & 1U; }
  void set(int q) noexcept { bits |= std::uint64_t{1} << q; }
  [[nodiscard]] int count() const noexcept;
  /// Qubit 0 leftmost.
  [[nodiscard]] std::string to_string() const;
  friend bool operator==(const Occupation&, const Occupation&) = default;
};

/// Aufbau determinant in source order, permuted to the partition's qubits.
Occupation hf_reference(const IntegralSet& ints, const Partition& part);

}  // namespace fragvqe
