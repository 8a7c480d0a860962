// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace fragvqe {

namespace {

constexpr double kNormTol = 1e-10;

void check_params(const ParamCircuit& c, const Eigen::VectorXd& params) {
  if (params.size() != c.n_params())
    throw ValidationError("circuit expects " + std::to_string(c.n_params()) +
                          " parameters, got " + std::to_string(params.size()));
}

double gate_phi(const Gate& g, const Eigen::VectorXd& params) {
  const double theta = g.slot >= 0 ? params[g.slot] : g.angle;
  return g.generator_scale() * theta;
}

template <typename Derived>
void apply_gate(Eigen::MatrixBase<Derived>& psi, const Gate& g, int n, double phi) {
  if (g.kind == GateKind::CNOT)
    apply_cnot(psi, g.q0, g.q1);
  else
    apply_pauli_rotation(psi, g.generator(n), phi);
}

}  // namespace

// ============================================================================
// QuantumState
// ============================================================================

QuantumState::QuantumState(int n, StateVector<double> a) : n_qubits(n), amp(std::move(a)) {
  if (n < 0 || n > 30) throw ValidationError("unsupported qubit count");
  if (amp.size() != (Eigen::Index{1} << n)) throw ValidationError("amplitude length is not 2^n");
  if (std::abs(amp.norm() - 1.0) > 1e-10) throw ValidationError("state is not normalized");
}

QuantumState prepare_basis(std::uint64_t bits, int n_qubits) {
  if (n_qubits < 64 && (bits >> n_qubits) != 0) throw ValidationError("basis bits exceed qubit count");
  StateVector<double> a = StateVector<double>::Zero(Eigen::Index{1} << n_qubits);
  a(static_cast<Eigen::Index>(bits)) = 1.0;
  return {n_qubits, std::move(a)};
}

QuantumState prepare_basis(const Occupation& occ) { return prepare_basis(occ.bits, occ.n_qubits); }

QuantumState kron(const QuantumState& a, const QuantumState& b) {
  StateVector<double> out(a.dim() * b.dim());
  for (Eigen::Index j = 0; j < b.dim(); ++j) out.segment(j * a.dim(), a.dim()) = b.amp(j) * a.amp;
  return {a.n_qubits + b.n_qubits, std::move(out)};
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.n_qubits != b.n_qubits) throw ValidationError("fidelity of states with different qubit counts");
  return std::min(1.0, std::norm(a.amp.dot(b.amp)));
}

// ============================================================================
// Gates and circuits
// ============================================================================

PauliString Gate::generator(int n_qubits) const {
  const std::uint64_t bit = std::uint64_t{1} << q0;
  switch (kind) {
    case GateKind::RX: return {bit, 0, n_qubits};
    case GateKind::RY: return {bit, bit, n_qubits};
    case GateKind::RZ: return {0, bit, n_qubits};
    case GateKind::PauliRot: return pauli;
    case GateKind::CNOT: break;
  }
  throw ValidationError("CNOT has no rotation generator");
}

double Gate::generator_scale() const { return kind == GateKind::PauliRot ? scale : -0.5; }

void ParamCircuit::check_qubit(int q) const {
  if (q < 0 || q >= n_) throw ValidationError("qubit index " + std::to_string(q) + " out of range");
}

void ParamCircuit::check_slot(int slot) const {
  if (slot < 0 || slot >= n_params_) throw ValidationError("parameter slot not reserved");
}

void ParamCircuit::rotation(GateKind kind, int q, int slot) {
  if (kind == GateKind::CNOT || kind == GateKind::PauliRot) throw ValidationError("not a rotation gate");
  check_qubit(q);
  check_slot(slot);
  Gate g;
  g.kind = kind;
  g.q0 = q;
  g.slot = slot;
  gates_.push_back(g);
}

void ParamCircuit::rx(int q, int slot) { rotation(GateKind::RX, q, slot); }
void ParamCircuit::ry(int q, int slot) { rotation(GateKind::RY, q, slot); }
void ParamCircuit::rz(int q, int slot) { rotation(GateKind::RZ, q, slot); }

void ParamCircuit::fixed_rotation(GateKind kind, int q, double angle) {
  if (kind == GateKind::CNOT || kind == GateKind::PauliRot) throw ValidationError("not a rotation gate");
  check_qubit(q);
  Gate g;
  g.kind = kind;
  g.q0 = q;
  g.angle = angle;
  gates_.push_back(g);
}

void ParamCircuit::cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw ValidationError("CNOT control equals target");
  Gate g;
  g.kind = GateKind::CNOT;
  g.q0 = control;
  g.q1 = target;
  gates_.push_back(g);
}

void ParamCircuit::pauli_rot(const PauliString& p, int slot, double scale) {
  if (p.n_qubits != n_) throw ValidationError("Pauli string width differs from circuit");
  check_slot(slot);
  Gate g;
  g.kind = GateKind::PauliRot;
  g.pauli = p;
  g.slot = slot;
  g.scale = scale;
  gates_.push_back(g);
}

int ParamCircuit::exp_generator(const PauliSum& image) {
  if (image.n_qubits() != n_) throw ValidationError("generator width differs from circuit");
  if (!image.is_anti_hermitian()) throw ValidationError("generator is not anti-Hermitian");
  if (!image.strings_commute()) throw ValidationError("generator strings do not commute");
  const int slot = new_slot();
  // c·P with c = i·a  ⇒  exp(θ c P) = exp(i·a·θ·P)
  for (const auto& [p, c] : image.terms()) pauli_rot(p, slot, c.imag());
  return slot;
}

void ParamCircuit::append(const ParamCircuit& other) {
  if (other.n_ != n_) throw ValidationError("appending circuit of different width");
  const int shift = n_params_;
  for (Gate g : other.gates_) {
    if (g.slot >= 0) g.slot += shift;
    gates_.push_back(g);
  }
  n_params_ += other.n_params_;
}

QuantumState apply_circuit(const QuantumState& state, const ParamCircuit& circuit,
                           const Eigen::VectorXd& params) {
  check_params(circuit, params);
  if (state.n_qubits != circuit.n_qubits()) throw ValidationError("state and circuit widths differ");
  QuantumState out = state;
  for (const Gate& g : circuit.gates()) apply_gate(out.amp, g, circuit.n_qubits(), gate_phi(g, params));
  return out;
}

Eigen::MatrixXcd circuit_unitary(const ParamCircuit& circuit, const Eigen::VectorXd& params) {
  const Eigen::Index dim = Eigen::Index{1} << circuit.n_qubits();
  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b)
    u.col(b) = apply_circuit(prepare_basis(static_cast<std::uint64_t>(b), circuit.n_qubits()),
                             circuit, params)
                   .amp;
  return u;
}

int pauli_rotation_cnots(const PauliString& p) { return p.weight() > 1 ? 2 * (p.weight() - 1) : 0; }

int count_cnots(const ParamCircuit& circuit) {
  int n = 0;
  for (const Gate& g : circuit.gates()) {
    if (g.kind == GateKind::CNOT)
      ++n;
    else if (g.kind == GateKind::PauliRot)
      n += pauli_rotation_cnots(g.pauli);
  }
  return n;
}

// ============================================================================
// Observables and gradients
// ============================================================================

Observable::Observable(const PauliSum& h, double herm_tol) : n_(h.n_qubits()) {
  if (!h.is_hermitian(herm_tol)) throw ValidationError("observable is not Hermitian");
  m_ = h.to_sparse();
}

Complex expectation_complex(const QuantumState& state, const PauliSum& op) {
  if (state.n_qubits != op.n_qubits()) throw ValidationError("state and operator widths differ");
  StateVector<double> tmp(state.dim());
  Complex sum = 0.0;
  for (const auto& [p, c] : op.terms()) {
    apply_pauli(state.amp, p, tmp);
    sum += c * state.amp.dot(tmp);
  }
  return sum;
}

double expectation(const QuantumState& state, const PauliSum& h) {
  if (!h.is_hermitian()) throw ValidationError("expectation of a non-Hermitian operator");
  const Complex e = expectation_complex(state, h);
  if (std::abs(e.imag()) > kNormTol) throw ValidationError("complex expectation residue");
  return e.real();
}

double expectation(const QuantumState& state, const Observable& h) {
  if (state.n_qubits != h.n_qubits()) throw ValidationError("state and operator widths differ");
  const Complex e = state.amp.dot(h.matrix() * state.amp);
  if (std::abs(e.imag()) > kNormTol) throw ValidationError("complex expectation residue");
  return e.real();
}

double energy_and_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& params,
                           const Observable& h, const QuantumState& reference,
                           Eigen::VectorXd& grad) {
  const QuantumState fin = apply_circuit(reference, circuit, params);
  StateVector<double> phi = fin.amp;
  StateVector<double> lambda = h.matrix() * phi;
  const double energy = phi.dot(lambda).real();
  grad = Eigen::VectorXd::Zero(circuit.n_params());
  StateVector<double> tmp(phi.size());
  const int n = circuit.n_qubits();
  const auto& gates = circuit.gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    const Gate& g = *it;
    if (g.kind == GateKind::CNOT) {
      apply_cnot(phi, g.q0, g.q1);
      apply_cnot(lambda, g.q0, g.q1);
      continue;
    }
    const PauliString p = g.generator(n);
    const double phi_angle = gate_phi(g, params);
    if (g.slot >= 0) {
      // dE/dθ = 2 Re ⟨λ| i·s·P |φ⟩
      apply_pauli(phi, p, tmp);
      grad[g.slot] += 2.0 * g.generator_scale() * (Complex(0, 1) * lambda.dot(tmp)).real();
    }
    apply_pauli_rotation(phi, p, -phi_angle);
    apply_pauli_rotation(lambda, p, -phi_angle);
  }
  return energy;
}

Eigen::VectorXd parameter_shift_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& params,
                                         const Observable& h, const QuantumState& reference) {
  check_params(circuit, params);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(circuit.n_params());
  const auto& gates = circuit.gates();
  constexpr double kShift = std::numbers::pi / 4;
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const Gate& g = gates[k];
    if (g.slot < 0) continue;
    if (g.kind == GateKind::CNOT) throw ValidationError("unsupported gate for parameter shift");
    // shift only gate k's own angle φ_k = s·θ
    auto energy_with = [&](double dphi) {
      QuantumState st = reference;
      for (std::size_t j = 0; j < gates.size(); ++j) {
        double phi = gate_phi(gates[j], params);
        if (j == k) phi += dphi;
        apply_gate(st.amp, gates[j], circuit.n_qubits(), phi);
      }
      return expectation(st, h);
    };
    const double dE_dphi = energy_with(kShift) - energy_with(-kShift);
    grad[g.slot] += g.generator_scale() * dE_dphi;
  }
  return grad;
}

Eigen::VectorXd finite_difference_gradient(const ParamCircuit& circuit,
                                           const Eigen::VectorXd& params, const Observable& obs,
                                           const QuantumState& reference, double h) {
  check_params(circuit, params);
  Eigen::VectorXd grad(params.size());
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    Eigen::VectorXd p = params;
    p[k] += h;
    const double ep = expectation(apply_circuit(reference, circuit, p), obs);
    p[k] -= 2 * h;
    const double em = expectation(apply_circuit(reference, circuit, p), obs);
    grad[k] = (ep - em) / (2 * h);
  }
  return grad;
}

// ============================================================================
// Binary dump
// ============================================================================

namespace {
constexpr char kMagic[4] = {'F', 'V', 'Q', 'S'};
constexpr std::uint32_t kEndianTag = 0x01020304;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError("truncated state header", 0);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError("truncated state amplitudes", 0);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}
}  // namespace

void write_state(std::ostream& out, const QuantumState& state) {
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(state.n_qubits));
  put_u32(out, kEndianTag);
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    put_f64(out, state.amp(i).real());
    put_f64(out, state.amp(i).imag());
  }
}

QuantumState read_state(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad state magic", 0);
  const std::uint32_t n = get_u32(in);
  if (get_u32(in) != kEndianTag) throw ParseError("unexpected endianness tag", 0);
  if (n > 30) throw ParseError("qubit count too large", 0);
  StateVector<double> a(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    a(i) = {re, im};
  }
  return {static_cast<int>(n), std::move(a)};
}

}  // namespace fragvqe
