// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace fragvqe {

// ============================================================================
// PauliString
// ============================================================================

PauliString PauliString::from_text(std::string_view text) {
  if (text.size() > 64) throw ValidationError("Pauli string longer than 64 qubits");
  PauliString p{0, 0, static_cast<int>(text.size())};
  for (std::size_t q = 0; q < text.size(); ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (text[q]) {
      case 'I': break;
      case 'X': p.x |= bit; break;
      case 'Y': p.x |= bit; p.z |= bit; break;
      case 'Z': p.z |= bit; break;
      default: throw ValidationError("invalid Pauli letter '" + std::string(1, text[q]) + "'");
    }
  }
  return p;
}

char PauliString::letter(int q) const noexcept {
  const bool xb = (x >> q) & 1U;
  const bool zb = (z >> q) & 1U;
  return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
}

std::string PauliString::to_text() const {
  std::string s(n_qubits, 'I');
  for (int q = 0; q < n_qubits; ++q) s[q] = letter(q);
  return s;
}

int PauliString::weight() const noexcept { return std::popcount(x | z); }
int PauliString::y_count() const noexcept { return std::popcount(x & z); }

bool PauliString::commutes_with(const PauliString& o) const noexcept {
  return ((std::popcount(x & o.z) + std::popcount(z & o.x)) & 1) == 0;
}

PauliString PauliString::strip_z() const noexcept { return {x, z & x, n_qubits}; }

std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b) {
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  PauliString c{a.x ^ b.x, a.z ^ b.z, std::max(a.n_qubits, b.n_qubits)};
  int k = a.y_count() + b.y_count() - c.y_count() + 2 * std::popcount(a.z & b.x);
  k = ((k % 4) + 4) % 4;
  return {kIPow[k], c};
}

Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
  const Eigen::Index dim = Eigen::Index{1} << p.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto col = static_cast<std::uint64_t>(b);
    m(static_cast<Eigen::Index>(col ^ p.x), b) = pauli_phase(p, col);
  }
  return m;
}

// ============================================================================
// PauliSum
// ============================================================================

PauliSum::PauliSum(const PauliString& p, Complex c) : n_(p.n_qubits) { add(p, c); }

PauliSum PauliSum::identity(int n_qubits, Complex c) {
  return PauliSum(PauliString::identity(n_qubits), c);
}

void PauliSum::check_width(int n) const {
  if (n != n_) throw ValidationError("Pauli sums act on different qubit counts");
}

Complex PauliSum::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? Complex{} : it->second;
}

void PauliSum::add(const PauliString& p, Complex c) {
  check_width(p.n_qubits);
  auto [it, inserted] = terms_.try_emplace(p, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kPauliPruneTol) terms_.erase(it);
}

PauliSum& PauliSum::operator+=(const PauliSum& rhs) {
  if (terms_.empty() && n_ == 0) n_ = rhs.n_;
  check_width(rhs.n_);
  for (const auto& [p, c] : rhs.terms_) add(p, c);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& rhs) {
  if (terms_.empty() && n_ == 0) n_ = rhs.n_;
  check_width(rhs.n_);
  for (const auto& [p, c] : rhs.terms_) add(p, -c);
  return *this;
}

PauliSum& PauliSum::operator*=(Complex c) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (std::abs(it->second) < kPauliPruneTol)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  a.check_width(b.n_);
  PauliSum out(a.n_);
  for (const auto& [pa, ca] : a.terms_)
    for (const auto& [pb, cb] : b.terms_) {
      auto [phase, pc] = multiply(pa, pb);
      auto [it, inserted] = out.terms_.try_emplace(pc, phase * ca * cb);
      if (!inserted) it->second += phase * ca * cb;
    }
  std::erase_if(out.terms_, [](const auto& kv) { return std::abs(kv.second) < kPauliPruneTol; });
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
  return out;
}

double PauliSum::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& [p, c] : terms_) worst = std::max(worst, std::abs(c - std::conj(c)));
  return worst;
}

bool PauliSum::is_anti_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const auto& kv) { return std::abs(kv.second + std::conj(kv.second)) <= tol; });
}

bool PauliSum::strings_commute() const {
  for (auto a = terms_.begin(); a != terms_.end(); ++a)
    for (auto b = std::next(a); b != terms_.end(); ++b)
      if (!a->first.commutes_with(b->first)) return false;
  return true;
}

Eigen::MatrixXcd PauliSum::to_dense() const {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : terms_)
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto col = static_cast<std::uint64_t>(b);
      m(static_cast<Eigen::Index>(col ^ p.x), b) += c * pauli_phase(p, col);
    }
  return m;
}

Eigen::SparseMatrix<Complex> PauliSum::to_sparse() const {
  const Eigen::Index dim = Eigen::Index{1} << n_;
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(terms_.size() * static_cast<std::size_t>(dim));
  for (const auto& [p, c] : terms_)
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto col = static_cast<std::uint64_t>(b);
      trips.emplace_back(static_cast<Eigen::Index>(col ^ p.x), b, c * pauli_phase(p, col));
    }
  Eigen::SparseMatrix<Complex> m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune(Complex{0.0}, kPauliPruneTol);
  return m;
}

void PauliSum::write_text(std::ostream& out) const {
  char buf[64];
  for (const auto& [p, c] : terms_) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g ", c.real(), c.imag());
    out << buf << p.to_text() << '\n';
  }
}

PauliSum PauliSum::read_text(std::istream& in) {
  PauliSum out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    std::string text;
    if (!(ls >> re)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected 'coef_re coef_im STRING'", lineno);
    }
    if (!(ls >> im >> text)) throw ParseError("expected 'coef_re coef_im STRING'", lineno);
    const PauliString p = PauliString::from_text(text);
    if (first) {
      out = PauliSum(p.n_qubits);
      first = false;
    }
    if (p.n_qubits != out.n_) throw ParseError("inconsistent Pauli string length", lineno);
    out.add(p, {re, im});
  }
  return out;
}

// ============================================================================
// FermionOperator
// ============================================================================

FermionOperator FermionOperator::term(Complex c, std::vector<LadderOp> ops) {
  FermionOperator f;
  f.add(c, std::move(ops));
  return f;
}

void FermionOperator::add(Complex c, std::vector<LadderOp> ops) {
  terms_.push_back({c, std::move(ops)});
}

int FermionOperator::max_mode() const noexcept {
  int m = -1;
  for (const auto& t : terms_)
    for (const auto& op : t.ops) m = std::max(m, op.mode);
  return m;
}

FermionOperator FermionOperator::adjoint() const {
  FermionOperator out;
  for (const auto& t : terms_) {
    std::vector<LadderOp> ops(t.ops.rbegin(), t.ops.rend());
    for (auto& op : ops) op.creation = !op.creation;
    out.add(std::conj(t.coefficient), std::move(ops));
  }
  return out;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& rhs) {
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& rhs) {
  for (const auto& t : rhs.terms_) terms_.push_back({-t.coefficient, t.ops});
  return *this;
}

// ============================================================================
// Jordan-Wigner
// ============================================================================

PauliSum jw_ladder(const LadderOp& op, int n_qubits) {
  if (op.mode < 0 || op.mode >= n_qubits)
    throw ValidationError("mode index " + std::to_string(op.mode) + " out of range for " +
                          std::to_string(n_qubits) + " qubits");
  const std::uint64_t bit = std::uint64_t{1} << op.mode;
  const std::uint64_t parity = bit - 1;
  const PauliString xs{bit, parity, n_qubits};
  const PauliString ys{bit, parity | bit, n_qubits};
  PauliSum out(n_qubits);
  out.add(xs, 0.5);
  out.add(ys, op.creation ? Complex{0.0, -0.5} : Complex{0.0, 0.5});
  return out;
}

PauliSum jw_transform(const FermionOperator& op, int n_qubits) {
  // accumulate unpruned, prune once
  PauliSum::TermMap acc;
  for (const auto& t : op.terms()) {
    PauliSum prod = PauliSum::identity(n_qubits);
    for (const auto& l : t.ops) prod = prod * jw_ladder(l, n_qubits);
    for (const auto& [p, c] : prod.terms()) acc[p] += t.coefficient * c;
  }
  PauliSum out(n_qubits);
  for (const auto& [p, c] : acc) out.add(p, c);
  return out;
}

FermionOperator hamiltonian_fermion(const IntegralSet& ints, const Partition& part) {
  if (part.n_orb() != ints.n_orb) throw ValidationError("partition does not match integral set");
  const int n = ints.n_orb;
  constexpr Spin spins[2] = {Spin::Alpha, Spin::Beta};
  FermionOperator H;
  if (ints.core_energy != 0.0) H.add(ints.core_energy, {});
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (ints.h(p, q) == 0.0) continue;
      for (Spin s : spins) H.add(ints.h(p, q), {cre(part.qubit(p, s)), des(part.qubit(q, s))});
    }
  // ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = ints.g(p, q, r, s);
          if (v == 0.0) continue;
          for (Spin sa : spins)
            for (Spin sb : spins) {
              const int P = part.qubit(p, sa);
              const int Q = part.qubit(q, sa);
              const int R = part.qubit(r, sb);
              const int S = part.qubit(s, sb);
              if (P == R || Q == S) continue;
              H.add(0.5 * v, {cre(P), cre(R), des(S), des(Q)});
            }
        }
  return H;
}

PauliSum hamiltonian_to_pauli(const IntegralSet& ints, const Partition& part) {
  PauliSum H = jw_transform(hamiltonian_fermion(ints, part), part.n_qubits());
  // Hermitian by construction; remove round-off imaginary parts.
  PauliSum clean(H.n_qubits());
  for (const auto& [p, c] : H.terms()) clean.add(p, c.real());
  return clean;
}

PauliSum number_operator(int n_qubits) {
  PauliSum N(n_qubits);
  for (int q = 0; q < n_qubits; ++q) N += jw_transform(FermionOperator::term(1.0, {cre(q), des(q)}), n_qubits);
  return N;
}

PauliSum sz_operator(int n_qubits) {
  PauliSum S(n_qubits);
  for (int q = 0; q < n_qubits; ++q) {
    const double sign = qubit_spin(q) == Spin::Alpha ? 0.5 : -0.5;
    S += jw_transform(FermionOperator::term(sign, {cre(q), des(q)}), n_qubits);
  }
  return S;
}

PauliSum s2_operator(int n_qubits) {
  if (n_qubits % 2 != 0) throw ValidationError("S² needs an even qubit count");
  FermionOperator lower;
  FermionOperator raise;
  for (int q = 0; q < n_qubits; q += 2) {
    lower += FermionOperator::term(1.0, {cre(q + 1), des(q)});
    raise += FermionOperator::term(1.0, {cre(q), des(q + 1)});
  }
  const PauliSum sz = sz_operator(n_qubits);
  PauliSum s2 = jw_transform(lower, n_qubits) * jw_transform(raise, n_qubits);
  s2 += sz * sz;
  s2 += sz;
  return s2;
}

// ============================================================================
// Excitation generators
// ============================================================================

Excitation excitation_generator(ExcitationKind kind, const std::vector<int>& idx,
                                int n_qubits, bool allow_spin_flip) {
  for (int i : idx)
    if (i < 0 || i >= n_qubits) throw ValidationError("excitation index out of range");
  Excitation ex;
  ex.kind = kind;
  ex.indices = idx;
  if (kind == ExcitationKind::Single) {
    if (idx.size() != 2) throw ValidationError("single excitation needs two indices");
    const int p = idx[0];
    const int q = idx[1];
    if (!allow_spin_flip && qubit_spin(p) != qubit_spin(q))
      throw ValidationError("single excitation changes spin");
    if (p != q) {
      ex.op.add(1.0, {cre(q), des(p)});
      ex.op.add(-1.0, {cre(p), des(q)});
    }
  } else {
    if (idx.size() != 4) throw ValidationError("double excitation needs four indices");
    const int p = idx[0];
    const int q = idx[1];
    const int r = idx[2];
    const int s = idx[3];
    if (p == q || r == s) throw ValidationError("duplicate index within a double excitation group");
    auto spin_sum = [](int a, int b) {
      return static_cast<int>(qubit_spin(a)) + static_cast<int>(qubit_spin(b));
    };
    if (!allow_spin_flip && spin_sum(p, q) != spin_sum(r, s))
      throw ValidationError("double excitation changes Sz");
    ex.op.add(1.0, {cre(s), cre(r), des(p), des(q)});
    ex.op.add(-1.0, {cre(q), cre(p), des(r), des(s)});
  }
  ex.image = jw_transform(ex.op, n_qubits);
  return ex;
}

}  // namespace fragvqe
