// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pipeline.hpp
 * @brief End-to-end runs: loading problems, running each method, scans
 *        with CSV output and result reports.
 */

#pragma once

#include "fragvqe/adapt.hpp"
#include "fragvqe/config.hpp"
#include "fragvqe/hea.hpp"
#include "fragvqe/integrals.hpp"
#include "fragvqe/oracle.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fragvqe {

inline constexpr double kKcalPerHartree = 627.509474;

enum class Method { FragmentVqe, Mrps, MrpsAdapt, HfAdapt, MrpsUccgsd, HfUccgsd, Exact };

Method parse_method(const std::string& text);
std::string to_string(Method m);

enum class FragmentSolver { Vqe, Exact };

struct RunConfig {
  std::filesystem::path integrals;
  std::vector<std::filesystem::path> scan_integrals;
  std::optional<std::filesystem::path> rotation;
  std::string partition;
  std::string partition_electrons;
  Method method = Method::Exact;
  Method scan_method = Method::MrpsAdapt;
  EmbedOptions embed;
  HeaConfig hea;
  double number_penalty = 0.0;
  double spin_penalty = 0.0;
  FragmentSolver fragment_solver = FragmentSolver::Vqe;
  OptimizerConfig optimizer;
  AdaptConfig adapt;
  PoolKind pool = PoolKind::QubitInter;
  bool exact_sector = true;
  std::optional<int> exact_multiplicity;  ///< 2S+1 of the exact state; any spin when unset
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  /// Throws ConfigError naming the offending key.
  static RunConfig from_config(const Config& c);
};

/// Integrals, partition and qubit Hamiltonian of one geometry.
struct Problem {
  std::string tag;
  IntegralSet ints;
  Partition part;
  PauliSum hamiltonian;
};

Problem load_problem(const RunConfig& cfg, const std::filesystem::path& integrals);

struct RunSummary {
  std::string tag;
  std::string method;
  double energy = 0.0;
  std::optional<double> exact;
  std::optional<double> error;
  int cnots = 0;
  int n_operators = 0;
  bool converged = true;
  std::string reason;
  double fidelity_hf = 0.0;
  double fidelity_mrps = 0.0;
  double entropy = 0.0;
  double wall_seconds = 0.0;
};

/// MRPS of a problem from fragment VQE (or exact fragment states).
QuantumState build_mrps(const RunConfig& cfg, const Problem& prob,
                        std::vector<FragmentState>* records = nullptr);

SpectrumResult solve_exact(const RunConfig& cfg, const Problem& prob);

/**
 * Runs one method on one problem. Artifacts go to out_dir when it is
 * non-empty.
 */
RunSummary run_method(const RunConfig& cfg, const Problem& prob, Method method,
                      const std::filesystem::path& out_dir);

/// Writes summary as "key = value" lines (no wall time).
void write_summary(std::ostream& out, const RunSummary& s);
RunSummary read_summary(const std::filesystem::path& path);

/// Scan over cfg.scan_integrals; writes scan.csv and returns the rows.
std::vector<RunSummary> run_scan(const RunConfig& cfg, const std::filesystem::path& out_dir);

void write_scan_csv(std::ostream& out, const std::vector<RunSummary>& rows);

/// Aligned table plus pairwise barriers (kcal/mol) of result files.
void write_report(std::ostream& out, const std::vector<RunSummary>& rows);

/// Writes content to path through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fragvqe
