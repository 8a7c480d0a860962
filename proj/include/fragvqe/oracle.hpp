// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file oracle.hpp
 * @brief Exact diagonalization and wavefunction diagnostics.
 */

#pragma once

#include "fragvqe/integrals.hpp"
#include "fragvqe/pauli.hpp"
#include "fragvqe/simulator.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace fragvqe {

/// Particle-number (and optionally 2·Sz and 2S+1) restriction of the Hilbert space.
struct Sector {
  int n_elec = 0;
  std::optional<int> sz2;
  std::optional<int> multiplicity;
};

struct SpectrumResult {
  double energy = 0.0;
  QuantumState state;
  Eigen::VectorXd low_lying;  ///< ascending, energy first
  double residual = 0.0;      ///< ‖Hψ − Eψ‖
};

/// Largest dense dimension handled by exact_ground_state.
inline constexpr Eigen::Index kMaxDenseDim = 4096;

/**
 * Lowest eigenpair by dense diagonalization, optionally inside a sector.
 * The largest-magnitude amplitude (lowest index on ties) is made real positive.
 */
SpectrumResult exact_ground_state(const PauliSum& h, const std::optional<Sector>& sector = {},
                                  int n_low = 4);

/// Spin-traced D_pq = Σ_σ ⟨a†_pσ a_qσ⟩ over the partition's qubit layout.
Eigen::MatrixXcd one_rdm(const QuantumState& state, int n_orb, const Partition& part);

/// Eigenvalues of a Hermitian 1-RDM, descending.
Eigen::VectorXd natural_occupations(const Eigen::MatrixXcd& rdm);

enum class EntropyMode {
  Literal,  ///< −Σ n ln n on occupations in [0,2]
  Halved,   ///< −Σ (n/2) ln(n/2)
};

double shannon_entropy(const Eigen::VectorXd& occ, EntropyMode mode = EntropyMode::Literal);

/// max − min of per-geometry errors.
double npe(const std::vector<double>& errors);

}  // namespace fragvqe
