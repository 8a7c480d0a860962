// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace fragvqe {

PoolKind parse_pool_kind(const std::string& text) {
  if (text == "fermionic_gsd_inter") return PoolKind::FermionicGsdInter;
  if (text == "fermionic_gsd_full") return PoolKind::FermionicGsdFull;
  if (text == "qubit_inter") return PoolKind::QubitInter;
  throw ValidationError("unknown pool kind '" + text + "'");
}

std::string to_string(PoolKind k) {
  switch (k) {
    case PoolKind::FermionicGsdInter: return "fermionic_gsd_inter";
    case PoolKind::FermionicGsdFull: return "fermionic_gsd_full";
    case PoolKind::QubitInter: return "qubit_inter";
  }
  return "?";
}

// ============================================================================
// Pools
// ============================================================================

namespace {

int spin_sum(int a, int b) { return static_cast<int>(qubit_spin(a)) + static_cast<int>(qubit_spin(b)); }

int image_cnots(const PauliSum& image) {
  int n = 0;
  for (const auto& [p, c] : image.terms()) n += pauli_rotation_cnots(p);
  return n;
}

std::string excitation_label(const Excitation& ex) {
  std::string s = ex.kind == ExcitationKind::Single ? "s" : "d";
  for (std::size_t i = 0; i < ex.indices.size(); ++i) s += (i ? "," : ":") + std::to_string(ex.indices[i]);
  return s;
}

std::vector<int> support(const PauliString& p) {
  std::vector<int> q;
  for (int i = 0; i < p.n_qubits; ++i)
    if (((p.x | p.z) >> i) & 1U) q.push_back(i);
  return q;
}

}  // namespace

std::vector<Excitation> gsd_excitations(int n_qubits, bool allow_spin_flip) {
  std::vector<Excitation> out;
  for (int p = 0; p < n_qubits; ++p)
    for (int q = p + 1; q < n_qubits; ++q)
      if (allow_spin_flip || qubit_spin(p) == qubit_spin(q))
        out.push_back(excitation_generator(ExcitationKind::Single, {p, q}, n_qubits, allow_spin_flip));
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < n_qubits; ++p)
    for (int q = p + 1; q < n_qubits; ++q) pairs.emplace_back(p, q);
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const auto [p, q] = pairs[a];
      const auto [r, s] = pairs[b];
      if (!allow_spin_flip && spin_sum(p, q) != spin_sum(r, s)) continue;
      out.push_back(excitation_generator(ExcitationKind::Double, {p, q, r, s}, n_qubits, allow_spin_flip));
    }
  return out;
}

int fragments_touched(const std::vector<int>& qubits, const Partition& part) {
  std::set<int> f;
  for (int q : qubits) f.insert(part.fragment_of_qubit(q));
  return static_cast<int>(f.size());
}

OperatorPool build_pool(const Partition& part, int n_qubits, PoolKind kind, bool allow_spin_flip) {
  if (n_qubits != part.n_qubits()) throw ValidationError("pool width differs from partition");
  const bool inter = kind != PoolKind::FermionicGsdFull;
  if (inter && part.n_fragments() < 2)
    throw ValidationError("inter-fragment pool needs at least two fragments");

  OperatorPool fermionic;
  fermionic.kind = kind;
  fermionic.partition = part;
  for (Excitation& ex : gsd_excitations(n_qubits, allow_spin_flip)) {
    if (inter && fragments_touched(ex.indices, part) < 2) continue;
    PoolOperator op;
    op.label = excitation_label(ex);
    op.indices = ex.indices;
    op.cnot_cost = image_cnots(ex.image);
    op.generator = std::move(ex.op);
    op.image = std::move(ex.image);
    if (!op.image.strings_commute()) throw ValidationError("pool generator strings do not commute");
    fermionic.ops.push_back(std::move(op));
  }
  if (kind != PoolKind::QubitInter) return fermionic;

  std::set<std::string> seen;
  std::vector<PauliString> strings;
  for (const PoolOperator& op : fermionic.ops)
    for (const auto& [p, c] : op.image.terms()) {
      const PauliString s = p.strip_z();
      if (seen.insert(s.to_text()).second) strings.push_back(s);
    }
  std::sort(strings.begin(), strings.end(),
            [](const PauliString& a, const PauliString& b) { return a.to_text() < b.to_text(); });

  OperatorPool pool;
  pool.kind = kind;
  pool.partition = part;
  for (const PauliString& s : strings) {
    PoolOperator op;
    op.label = s.to_text();
    op.indices = support(s);
    op.image = PauliSum(s, Complex(0, 1));
    op.cnot_cost = pauli_rotation_cnots(s);
    pool.ops.push_back(std::move(op));
  }
  return pool;
}

Eigen::VectorXd pool_gradients(const QuantumState& state, const Observable& h, const OperatorPool& pool) {
  const StateVector<double> lambda = h.apply(state.amp);
  StateVector<double> tmp(state.dim());
  StateVector<double> acc(state.dim());
  Eigen::VectorXd g(static_cast<Eigen::Index>(pool.size()));
  for (std::size_t k = 0; k < pool.size(); ++k) {
    acc.setZero();
    for (const auto& [p, c] : pool.ops[k].image.terms()) {
      apply_pauli(state.amp, p, tmp);
      acc += c * tmp;
    }
    g[static_cast<Eigen::Index>(k)] = 2.0 * lambda.dot(acc).real();
  }
  return g;
}

// ============================================================================
// ADAPT
// ============================================================================

void AdaptConfig::validate() const {
  if (!(grad_threshold > 0)) throw ValidationError("gradient threshold must be positive");
  if (max_depth < 0) throw ValidationError("max depth must be non-negative");
}

AdaptResult adapt_vqe(const PauliSum& h, const QuantumState& reference, const OperatorPool& pool,
                      const AdaptConfig& cfg, const OptimizerConfig& opt) {
  cfg.validate();
  opt.validate();
  const Observable obs(h);
  AdaptResult res;
  res.initial_energy = expectation(reference, obs);
  res.final_energy = res.initial_energy;
  res.state = reference;
  res.params = Eigen::VectorXd(0);
  ParamCircuit circuit(reference.n_qubits);

  for (int depth = 0;; ++depth) {
    const Eigen::VectorXd g = pool_gradients(res.state, obs, pool);
    Eigen::Index best = -1;
    double gmax = 0.0;
    for (Eigen::Index k = 0; k < g.size(); ++k)
      if (std::abs(g[k]) > gmax * (1 + 1e-12) + 1e-15) {
        gmax = std::abs(g[k]);
        best = k;
      }
    if (best < 0 || gmax < cfg.grad_threshold) {
      res.converged = true;
      res.reason = "gradient_threshold";
      break;
    }
    if (depth == cfg.max_depth) {
      res.reason = "max_depth";
      break;
    }
    const PoolOperator& op = pool.ops[static_cast<std::size_t>(best)];
    circuit.exp_generator(op.image);
    Eigen::VectorXd x0(circuit.n_params());
    x0.head(res.params.size()) = res.params;
    x0[x0.size() - 1] = 0.0;

    VqeResult r = optimize_from(circuit, obs, reference, opt, x0);
    const double tol = 1e-10;
    bool ok = std::isfinite(r.energy) && r.energy <= res.final_energy + tol;
    if (!ok) {
      const Eigen::VectorXd jitter =
          random_parameters(x0.size(), restart_seed(opt.seed, 7919 + depth), -cfg.jitter, cfg.jitter);
      r = optimize_from(circuit, obs, reference, opt, x0 + jitter);
      ok = std::isfinite(r.energy) && r.energy <= res.final_energy + tol;
    }
    if (!ok) {
      res.reason = "optimizer_failure";
      break;
    }

    res.params = r.params;
    res.final_energy = r.energy;
    res.state = std::move(r.state);
    res.cnots += op.cnot_cost;
    res.n_operators += 1;
    AdaptIteration it;
    it.iteration = depth + 1;
    it.op_index = static_cast<int>(best);
    it.label = op.label;
    it.max_grad = gmax;
    it.params = res.params;
    it.energy = res.final_energy;
    it.cumulative_cnots = res.cnots;
    it.status = r.restarts.front().status;
    res.iterations.push_back(std::move(it));
  }
  return res;
}

ParamCircuit uccgsd_circuit(int n_qubits, bool allow_spin_flip) {
  ParamCircuit c(n_qubits);
  for (const Excitation& ex : gsd_excitations(n_qubits, allow_spin_flip)) c.exp_generator(ex.image);
  return c;
}

AdaptResult uccgsd_vqe(const PauliSum& h, const QuantumState& reference, const Partition& part,
                       const OptimizerConfig& opt) {
  if (reference.n_qubits != part.n_qubits()) throw ValidationError("reference width differs from partition");
  const ParamCircuit circuit = uccgsd_circuit(part.n_qubits());
  const Observable obs(h);
  VqeResult r = run_vqe(circuit, obs, reference, opt);
  AdaptResult res;
  res.initial_energy = expectation(reference, obs);
  res.final_energy = r.energy;
  res.params = r.params;
  res.state = std::move(r.state);
  res.cnots = count_cnots(circuit);
  res.n_operators = circuit.n_params();
  res.converged = r.converged;
  res.reason = r.converged ? "converged" : "not_converged";
  res.restarts = std::move(r.restarts);
  AdaptIteration it;
  it.iteration = 1;
  it.label = "uccgsd";
  it.params = res.params;
  it.energy = res.final_energy;
  it.cumulative_cnots = res.cnots;
  it.status = res.reason;
  res.iterations.push_back(std::move(it));
  return res;
}

// ============================================================================
// Trajectory table
// ============================================================================

void write_trajectory(std::ostream& out, const AdaptResult& r) {
  char buf[160];
  out << "# iteration label grad energy cnots\n";
  std::snprintf(buf, sizeof buf, "0 reference 0 %.12f 0\n", r.initial_energy);
  out << buf;
  for (const auto& it : r.iterations) {
    std::snprintf(buf, sizeof buf, "%d %s %.6e %.12f %d\n", it.iteration, it.label.c_str(), it.max_grad,
                  it.energy, it.cumulative_cnots);
    out << buf;
  }
}

std::vector<TrajectoryRow> read_trajectory(std::istream& in) {
  std::vector<TrajectoryRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TrajectoryRow r;
    if (!(ls >> r.iteration >> r.label >> r.grad >> r.energy >> r.cnots))
      throw ParseError("malformed trajectory row", lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fragvqe
