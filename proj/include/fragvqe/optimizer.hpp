// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file optimizer.hpp
 * @brief Limited-memory BFGS with a strong-Wolfe line search and optional
 *        box bounds (projected steps).
 */

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace fragvqe {

/// Returns f(x) and writes ∇f(x) into grad.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int history = 10;
  double gtol = 1e-9;       ///< stop when ‖∇f‖∞ ≤ gtol
  double ftol = 1e-15;      ///< relative decrease counted as a stall
  int max_stalls = 10;      ///< consecutive stalls before stopping
  int max_evals = 10000;
  int max_iters = 100000;
  std::optional<Eigen::VectorXd> lower;
  std::optional<Eigen::VectorXd> upper;
};

enum class LbfgsStatus { GradientTolerance, FunctionTolerance, MaxEvaluations, LineSearchFailed, NonFinite };

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int n_evals = 0;
  int n_iters = 0;
  LbfgsStatus status = LbfgsStatus::MaxEvaluations;

  [[nodiscard]] bool converged() const noexcept {
    return status == LbfgsStatus::GradientTolerance || status == LbfgsStatus::FunctionTolerance;
  }
};

std::string to_string(LbfgsStatus s);

LbfgsResult lbfgs_minimize(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& opts = {});

}  // namespace fragvqe
