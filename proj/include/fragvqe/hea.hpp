// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hea.hpp
 * @brief Hardware-efficient ansatz, restarted VQE driver, fragment
 *        optimization and multireference product-state assembly.
 */

#pragma once

#include "fragvqe/integrals.hpp"
#include "fragvqe/optimizer.hpp"
#include "fragvqe/pauli.hpp"
#include "fragvqe/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fragvqe {

enum class Entangler { Linear, Full, Circular, Pairwise };

Entangler parse_entangler(const std::string& text);
std::string to_string(Entangler e);
GateKind parse_rotation(const std::string& text);
std::string to_string(GateKind g);

struct HeaConfig {
  int layers = 1;
  Entangler entangler = Entangler::Linear;
  std::vector<GateKind> sequence{GateKind::RY, GateKind::RZ};
  bool final_layer = true;

  void validate() const;
};

/// CNOTs in one entangling block on n qubits.
int entangler_cnots(int n_qubits, Entangler e);

/// Slots are layer-major, qubit-minor, gate-sequence innermost.
ParamCircuit build_hea(int n_qubits, const HeaConfig& cfg);

struct OptimizerConfig {
  double gtol = 1e-9;
  int max_evals = 10000;
  int restarts = 10;
  std::uint64_t seed = 0;
  double init_low = -std::numbers::pi;
  double init_high = std::numbers::pi;
  int history = 10;
  /// Symmetric box |θ_k| ≤ bound when set.
  std::optional<double> bound;

  void validate() const;
  [[nodiscard]] LbfgsOptions lbfgs(Eigen::Index n_params) const;
};

/// Seed of restart k derived from the base seed.
std::uint64_t restart_seed(std::uint64_t base, int k);

/// Uniform parameters in [low, high) from a seeded engine.
Eigen::VectorXd random_parameters(Eigen::Index n, std::uint64_t seed, double low, double high);

struct RestartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double energy = 0.0;
  int evals = 0;
  std::string status;
  bool discarded = false;
};

struct VqeResult {
  Eigen::VectorXd params;
  double energy = 0.0;
  QuantumState state;
  int best_restart = -1;
  int total_evals = 0;
  bool converged = false;
  std::vector<RestartRecord> restarts;
};

/**
 * Restarted minimization of ⟨ref|U†HU|ref⟩. Restart 0 starts from
 * `start` when given, the rest from seeded uniform draws. The lowest
 * energy wins, earliest restart on ties.
 */
VqeResult run_vqe(const ParamCircuit& circuit, const Observable& h, const QuantumState& reference,
                  const OptimizerConfig& opt, const std::optional<Eigen::VectorXd>& start = {});

/// Single local optimization from x0.
VqeResult optimize_from(const ParamCircuit& circuit, const Observable& h,
                        const QuantumState& reference, const OptimizerConfig& opt,
                        const Eigen::VectorXd& x0);

struct FragmentState {
  int fragment_id = 0;
  int layers = 0;
  Entangler entangler = Entangler::Linear;
  int n_elec_frag = 0;
  Eigen::VectorXd params;
  double energy = 0.0;  ///< ⟨H_A⟩ without penalties
  QuantumState state;
  std::vector<RestartRecord> restarts;
  double best_energy = 0.0;
  double median_energy = 0.0;
  int cnots = 0;
};

/// Qubit Hamiltonian of the embedded fragment problem.
PauliSum fragment_hamiltonian(const FragmentProblem& prob);

/// λ·(N̂ − n)² on n_qubits.
PauliSum number_penalty(int n_qubits, int n_elec, double lambda);
/// λ·Ŝz² on n_qubits, α on even qubits.
PauliSum spin_penalty(int n_qubits, double lambda);

/// Weights of the number and Sz penalties added to the fragment objective.
struct FragmentPenalty {
  double number = 0.0;
  double spin = 0.0;
  FragmentPenalty(double number_weight = 0.0, double spin_weight = 0.0)  // NOLINT
      : number(number_weight), spin(spin_weight) {}
};

FragmentState fragment_vqe(const FragmentProblem& prob, const HeaConfig& cfg,
                           const OptimizerConfig& opt, const FragmentPenalty& penalty = {});

/**
 * Fragment VQE for L = 1..max_layers. Each L also restarts from the L−1
 * optimum with a zero-angle layer prepended, which leaves the state on
 * |0…0⟩ unchanged.
 */
std::vector<FragmentState> fragment_vqe_ladder(const FragmentProblem& prob, HeaConfig cfg,
                                               const OptimizerConfig& opt, int max_layers,
                                               const FragmentPenalty& penalty = {});

/// All fragments, up to `jobs` at once; results ordered by fragment id.
std::vector<FragmentState> fragment_vqe_all(const std::vector<FragmentProblem>& probs,
                                            const HeaConfig& cfg, const OptimizerConfig& opt,
                                            const FragmentPenalty& penalty = {}, int jobs = 1);

/// Weight of a state on basis states with the given electron-number parity.
double parity_weight(const QuantumState& state, int n_elec);

/// Tensor product in fragment order; fragment 0 on the lowest qubits.
QuantumState assemble_mrps(const std::vector<FragmentState>& frags, const Partition& part);
QuantumState assemble_mrps(const std::vector<QuantumState>& frags, const Partition& part);

/// Var_θ[∂E/∂θ_k] over uniform draws on [−π, π).
Eigen::VectorXd gradient_variance(const ParamCircuit& circuit, const Observable& h,
                                  const QuantumState& reference, int samples, std::uint64_t seed);

/// Structured-text record of one fragment result.
void write_fragment_record(std::ostream& out, const FragmentState& fs);

}  // namespace fragvqe
