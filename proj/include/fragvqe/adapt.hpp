// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file adapt.hpp
 * @brief Operator pools, ADAPT-VQE and the fixed-order UCCGSD ansatz.
 */

#pragma once

#include "fragvqe/hea.hpp"
#include "fragvqe/integrals.hpp"
#include "fragvqe/pauli.hpp"
#include "fragvqe/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fragvqe {

enum class PoolKind { FermionicGsdInter, FermionicGsdFull, QubitInter };

PoolKind parse_pool_kind(const std::string& text);
std::string to_string(PoolKind k);

struct PoolOperator {
  std::string label;
  std::vector<int> indices;   ///< qubits touched by the generator (fermionic) or the support (qubit)
  FermionOperator generator;  ///< empty for qubit-pool entries
  PauliSum image;             ///< anti-Hermitian
  int cnot_cost = 0;
};

struct OperatorPool {
  PoolKind kind = PoolKind::FermionicGsdInter;
  std::vector<PoolOperator> ops;
  Partition partition;

  [[nodiscard]] std::size_t size() const noexcept { return ops.size(); }
};

/// Generalized spin-conserving singles then doubles (p<q, r<s, (p,q)<(r,s)).
std::vector<Excitation> gsd_excitations(int n_qubits, bool allow_spin_flip = false);

/// Number of distinct fragments touched by a set of qubits.
int fragments_touched(const std::vector<int>& qubits, const Partition& part);

OperatorPool build_pool(const Partition& part, int n_qubits, PoolKind kind,
                        bool allow_spin_flip = false);

/// g_k = 2 Re⟨ψ|H τ_k|ψ⟩
Eigen::VectorXd pool_gradients(const QuantumState& state, const Observable& h,
                               const OperatorPool& pool);

struct AdaptConfig {
  double grad_threshold = 1e-8;
  int max_depth = 200;
  double jitter = 1e-2;

  void validate() const;
};

struct AdaptIteration {
  int iteration = 0;
  int op_index = -1;
  std::string label;
  double max_grad = 0.0;
  Eigen::VectorXd params;
  double energy = 0.0;
  int cumulative_cnots = 0;
  std::string status;
};

struct AdaptResult {
  double initial_energy = 0.0;
  double final_energy = 0.0;
  std::vector<AdaptIteration> iterations;
  Eigen::VectorXd params;
  QuantumState state;
  int cnots = 0;
  int n_operators = 0;
  bool converged = false;
  std::string reason;
  std::vector<RestartRecord> restarts;
};

AdaptResult adapt_vqe(const PauliSum& h, const QuantumState& reference, const OperatorPool& pool,
                      const AdaptConfig& cfg, const OptimizerConfig& opt);

/// Product of every fermionic_gsd_full generator in canonical order.
ParamCircuit uccgsd_circuit(int n_qubits, bool allow_spin_flip = false);

AdaptResult uccgsd_vqe(const PauliSum& h, const QuantumState& reference, const Partition& part,
                       const OptimizerConfig& opt);

/// "iteration label grad energy cnots" rows after a commented header.
void write_trajectory(std::ostream& out, const AdaptResult& r);

struct TrajectoryRow {
  int iteration = 0;
  std::string label;
  double grad = 0.0;
  double energy = 0.0;
  int cnots = 0;
};

std::vector<TrajectoryRow> read_trajectory(std::istream& in);

}  // namespace fragvqe
