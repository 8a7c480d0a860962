// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/hea.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <future>
#include <iostream>
#include <ostream>
#include <random>

namespace fragvqe {

// ============================================================================
// Configuration
// ============================================================================

Entangler parse_entangler(const std::string& text) {
  if (text == "linear") return Entangler::Linear;
  if (text == "full") return Entangler::Full;
  if (text == "circular") return Entangler::Circular;
  if (text == "pairwise") return Entangler::Pairwise;
  throw ValidationError("unknown entangler '" + text + "'");
}

std::string to_string(Entangler e) {
  switch (e) {
    case Entangler::Linear: return "linear";
    case Entangler::Full: return "full";
    case Entangler::Circular: return "circular";
    case Entangler::Pairwise: return "pairwise";
  }
  return "?";
}

GateKind parse_rotation(const std::string& text) {
  if (text == "RX" || text == "rx") return GateKind::RX;
  if (text == "RY" || text == "ry") return GateKind::RY;
  if (text == "RZ" || text == "rz") return GateKind::RZ;
  throw ValidationError("unknown rotation gate '" + text + "'");
}

std::string to_string(GateKind g) {
  switch (g) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::PauliRot: return "PAULI-ROT";
  }
  return "?";
}

void HeaConfig::validate() const {
  if (layers < 1) throw ValidationError("HEA needs at least one layer");
  if (sequence.empty()) throw ValidationError("HEA gate sequence is empty");
  for (GateKind g : sequence)
    if (g == GateKind::CNOT || g == GateKind::PauliRot)
      throw ValidationError("HEA sequence accepts RX, RY and RZ only");
}

void OptimizerConfig::validate() const {
  if (!(gtol > 0)) throw ValidationError("optimizer gtol must be positive");
  if (max_evals < 1) throw ValidationError("optimizer max_evals must be positive");
  if (restarts < 1) throw ValidationError("optimizer restarts must be positive");
  if (!(init_high > init_low)) throw ValidationError("empty initial-parameter interval");
  if (bound && !(*bound > 0)) throw ValidationError("parameter bound must be positive");
}

LbfgsOptions OptimizerConfig::lbfgs(Eigen::Index n_params) const {
  LbfgsOptions o;
  o.gtol = gtol;
  o.max_evals = max_evals;
  o.history = history;
  if (bound) {
    o.lower = Eigen::VectorXd::Constant(n_params, -*bound);
    o.upper = Eigen::VectorXd::Constant(n_params, *bound);
  }
  return o;
}

// ============================================================================
// Circuit
// ============================================================================

int entangler_cnots(int n, Entangler e) {
  if (n < 2) return 0;
  switch (e) {
    case Entangler::Linear: return n - 1;
    case Entangler::Circular: return n;
    case Entangler::Full: return n * (n - 1) / 2;
    case Entangler::Pairwise: return n - 1;
  }
  return 0;
}

namespace {

void add_entangler(ParamCircuit& c, Entangler e) {
  const int n = c.n_qubits();
  if (n < 2) return;
  switch (e) {
    case Entangler::Linear:
      for (int i = 0; i + 1 < n; ++i) c.cnot(i, i + 1);
      break;
    case Entangler::Circular:
      for (int i = 0; i + 1 < n; ++i) c.cnot(i, i + 1);
      c.cnot(n - 1, 0);
      break;
    case Entangler::Full:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c.cnot(i, j);
      break;
    case Entangler::Pairwise:
      for (int i = 0; i + 1 < n; i += 2) c.cnot(i, i + 1);
      for (int i = 1; i + 1 < n; i += 2) c.cnot(i, i + 1);
      break;
  }
}

void add_rotations(ParamCircuit& c, const std::vector<GateKind>& seq) {
  for (int q = 0; q < c.n_qubits(); ++q)
    for (GateKind g : seq) c.rotation(g, q, c.new_slot());
}

}  // namespace

ParamCircuit build_hea(int n_qubits, const HeaConfig& cfg) {
  if (n_qubits < 1) throw ValidationError("HEA needs at least one qubit");
  cfg.validate();
  ParamCircuit c(n_qubits);
  for (int l = 0; l < cfg.layers; ++l) {
    add_rotations(c, cfg.sequence);
    add_entangler(c, cfg.entangler);
  }
  if (cfg.final_layer) add_rotations(c, cfg.sequence);
  return c;
}

// ============================================================================
// VQE driver
// ============================================================================

std::uint64_t restart_seed(std::uint64_t base, int k) {
  // splitmix64
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Eigen::VectorXd random_parameters(Eigen::Index n, std::uint64_t seed, double low, double high) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x[i] = low + (high - low) * u;
  }
  return x;
}

VqeResult optimize_from(const ParamCircuit& circuit, const Observable& h,
                        const QuantumState& reference, const OptimizerConfig& opt,
                        const Eigen::VectorXd& x0) {
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    return energy_and_gradient(circuit, x, h, reference, g);
  };
  const LbfgsResult r = lbfgs_minimize(f, x0, opt.lbfgs(circuit.n_params()));
  VqeResult out;
  out.params = r.x;
  out.energy = r.f;
  out.total_evals = r.n_evals;
  out.converged = r.converged();
  RestartRecord rec;
  rec.energy = r.f;
  rec.evals = r.n_evals;
  rec.status = to_string(r.status);
  rec.discarded = !std::isfinite(r.f);
  out.restarts.push_back(rec);
  if (!rec.discarded) {
    out.state = apply_circuit(reference, circuit, r.x);
    out.best_restart = 0;
  }
  return out;
}

VqeResult run_vqe(const ParamCircuit& circuit, const Observable& h, const QuantumState& reference,
                  const OptimizerConfig& opt, const std::optional<Eigen::VectorXd>& start) {
  opt.validate();
  VqeResult best;
  for (int k = 0; k < opt.restarts; ++k) {
    const std::uint64_t seed = restart_seed(opt.seed, k);
    Eigen::VectorXd x0 = (k == 0 && start)
                             ? *start
                             : random_parameters(circuit.n_params(), seed, opt.init_low, opt.init_high);
    VqeResult r = optimize_from(circuit, h, reference, opt, x0);
    RestartRecord rec = r.restarts.front();
    rec.index = k;
    rec.seed = seed;
    best.restarts.push_back(rec);
    best.total_evals += r.total_evals;
    if (rec.discarded) {
      std::cerr << "fragvqe: restart " << k << " produced a non-finite energy and was discarded\n";
      continue;
    }
    if (best.best_restart < 0 || r.energy < best.energy) {
      best.params = r.params;
      best.energy = r.energy;
      best.state = std::move(r.state);
      best.best_restart = k;
      best.converged = r.converged;
    }
  }
  if (best.best_restart < 0) throw std::runtime_error("all optimizer restarts failed");
  return best;
}

// ============================================================================
// Fragments
// ============================================================================

PauliSum fragment_hamiltonian(const FragmentProblem& prob) {
  return hamiltonian_to_pauli(prob.local, Partition::single(prob.local));
}

PauliSum number_penalty(int n_qubits, int n_elec, double lambda) {
  const PauliSum d = number_operator(n_qubits) - PauliSum::identity(n_qubits, static_cast<double>(n_elec));
  return (d * d) * lambda;
}

PauliSum spin_penalty(int n_qubits, double lambda) {
  const PauliSum sz = sz_operator(n_qubits);
  return (sz * sz) * lambda;
}

namespace {

PauliSum objective(const FragmentProblem& prob, const PauliSum& h, const FragmentPenalty& pen) {
  PauliSum target = h;
  if (pen.number != 0.0) target += number_penalty(prob.n_qubits, prob.n_elec_frag, pen.number);
  if (pen.spin != 0.0) target += spin_penalty(prob.n_qubits, pen.spin);
  return target;
}

FragmentState make_state(const FragmentProblem& prob, const HeaConfig& cfg, const ParamCircuit& circ,
                         const PauliSum& h, VqeResult&& r) {
  FragmentState fs;
  fs.fragment_id = prob.fragment_id;
  fs.layers = cfg.layers;
  fs.entangler = cfg.entangler;
  fs.n_elec_frag = prob.n_elec_frag;
  fs.params = std::move(r.params);
  fs.state = std::move(r.state);
  fs.energy = expectation(fs.state, h);
  fs.restarts = std::move(r.restarts);
  fs.cnots = count_cnots(circ);
  std::vector<double> e;
  for (const auto& rec : fs.restarts)
    if (!rec.discarded) e.push_back(rec.energy);
  std::sort(e.begin(), e.end());
  fs.best_energy = e.front();
  fs.median_energy = e.size() % 2 ? e[e.size() / 2] : 0.5 * (e[e.size() / 2 - 1] + e[e.size() / 2]);
  return fs;
}

}  // namespace

FragmentState fragment_vqe(const FragmentProblem& prob, const HeaConfig& cfg,
                           const OptimizerConfig& opt, const FragmentPenalty& penalty) {
  const PauliSum h = fragment_hamiltonian(prob);
  const ParamCircuit circ = build_hea(prob.n_qubits, cfg);
  const Observable obs(objective(prob, h, penalty));
  VqeResult r = run_vqe(circ, obs, prepare_basis(0, prob.n_qubits), opt);
  return make_state(prob, cfg, circ, h, std::move(r));
}

std::vector<FragmentState> fragment_vqe_ladder(const FragmentProblem& prob, HeaConfig cfg,
                                               const OptimizerConfig& opt, int max_layers,
                                               const FragmentPenalty& penalty) {
  if (max_layers < 1) throw ValidationError("ladder needs at least one layer");
  const PauliSum h = fragment_hamiltonian(prob);
  const Observable obs(objective(prob, h, penalty));
  const QuantumState ref = prepare_basis(0, prob.n_qubits);

  std::vector<FragmentState> out;
  std::optional<Eigen::VectorXd> warm;
  for (int l = 1; l <= max_layers; ++l) {
    cfg.layers = l;
    const ParamCircuit circ = build_hea(prob.n_qubits, cfg);
    OptimizerConfig o = opt;
    o.seed = restart_seed(opt.seed, 1000 + l);
    VqeResult r = run_vqe(circ, obs, ref, o);
    if (warm) {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(circ.n_params());
      x0.tail(warm->size()) = *warm;
      VqeResult w = optimize_from(circ, obs, ref, opt, x0);
      RestartRecord rec = w.restarts.front();
      rec.index = static_cast<int>(r.restarts.size());
      r.restarts.push_back(rec);
      if (!rec.discarded && w.energy <= r.energy) {
        r.params = w.params;
        r.energy = w.energy;
        r.state = std::move(w.state);
        r.best_restart = rec.index;
      }
    }
    warm = r.params;
    out.push_back(make_state(prob, cfg, circ, h, std::move(r)));
  }
  return out;
}

std::vector<FragmentState> fragment_vqe_all(const std::vector<FragmentProblem>& probs,
                                            const HeaConfig& cfg, const OptimizerConfig& opt,
                                            const FragmentPenalty& penalty, int jobs) {
  std::vector<FragmentState> out(probs.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = fragment_vqe(probs[i], cfg, opt, penalty);
  } else {
    std::size_t next = 0;
    while (next < probs.size()) {
      std::vector<std::future<FragmentState>> batch;
      for (int j = 0; j < jobs && next < probs.size(); ++j, ++next)
        batch.push_back(std::async(std::launch::async, [&, i = next] {
          return fragment_vqe(probs[i], cfg, opt, penalty);
        }));
      for (auto& f : batch) {
        FragmentState fs = f.get();
        out[static_cast<std::size_t>(fs.fragment_id)] = std::move(fs);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FragmentState& a, const FragmentState& b) { return a.fragment_id < b.fragment_id; });
  return out;
}

// ============================================================================
// MRPS
// ============================================================================

double parity_weight(const QuantumState& state, int n_elec) {
  double w = 0.0;
  for (Eigen::Index b = 0; b < state.dim(); ++b)
    if ((std::popcount(static_cast<std::uint64_t>(b)) & 1) == (n_elec & 1)) w += std::norm(state.amp(b));
  return w;
}

QuantumState assemble_mrps(const std::vector<QuantumState>& frags, const Partition& part) {
  if (static_cast<int>(frags.size()) != part.n_fragments())
    throw ValidationError("fragment count differs from partition");
  QuantumState out = prepare_basis(0, 0);
  for (int f = 0; f < part.n_fragments(); ++f) {
    const QuantumState& s = frags[static_cast<std::size_t>(f)];
    if (s.n_qubits != part.fragment_qubits(f))
      throw ValidationError("fragment " + std::to_string(f) + " state has the wrong width");
    if (parity_weight(s, part.fragments()[f].n_elec) < 0.999)
      throw ValidationError("fragment " + std::to_string(f) +
                            " state fails the electron-number parity check");
    out = kron(out, s);
  }
  return out;
}

QuantumState assemble_mrps(const std::vector<FragmentState>& frags, const Partition& part) {
  std::vector<QuantumState> states;
  for (int f = 0; f < static_cast<int>(frags.size()); ++f) {
    if (frags[static_cast<std::size_t>(f)].fragment_id != f)
      throw ValidationError("fragment states are not in partition order");
    states.push_back(frags[static_cast<std::size_t>(f)].state);
  }
  return assemble_mrps(states, part);
}

// ============================================================================
// Diagnostics
// ============================================================================

Eigen::VectorXd gradient_variance(const ParamCircuit& circuit, const Observable& h,
                                  const QuantumState& reference, int samples, std::uint64_t seed) {
  if (samples < 2) throw ValidationError("gradient variance needs at least two samples");
  const Eigen::Index n = circuit.n_params();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x =
        random_parameters(n, restart_seed(seed, s), -std::numbers::pi, std::numbers::pi);
    energy_and_gradient(circuit, x, h, reference, g);
    const Eigen::VectorXd delta = g - mean;
    mean += delta / (s + 1);
    m2 += delta.cwiseProduct(g - mean);
  }
  return m2 / (samples - 1);
}

void write_fragment_record(std::ostream& out, const FragmentState& fs) {
  char buf[64];
  out << "fragment = " << fs.fragment_id << '\n';
  out << "layers = " << fs.layers << '\n';
  out << "entangler = " << to_string(fs.entangler) << '\n';
  out << "cnots = " << fs.cnots << '\n';
  out << "restart_energies =";
  for (const auto& r : fs.restarts) {
    std::snprintf(buf, sizeof buf, " %.12f", r.energy);
    out << buf;
  }
  out << '\n';
  std::snprintf(buf, sizeof buf, "%.12f", fs.best_energy);
  out << "best_energy = " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.12f", fs.median_energy);
  out << "median_energy = " << buf << '\n';
  out << "params =";
  for (double p : fs.params) {
    std::snprintf(buf, sizeof buf, " %.17g", p);
    out << buf;
  }
  out << '\n';
}

}  // namespace fragvqe
