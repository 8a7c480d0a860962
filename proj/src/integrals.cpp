// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/integrals.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fragvqe {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

// ============================================================================
// TwoBodyTensor
// ============================================================================

TwoBodyTensor::TwoBodyTensor(int n_orb) : n_(n_orb) {
  const auto n = static_cast<Eigen::Index>(n_orb);
  data_ = Eigen::VectorXd::Zero(n * n * n * n);
}

void TwoBodyTensor::set(int p, int q, int r, int s, double v) {
  for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}}) {
    for (auto [c, d] : {std::pair{r, s}, std::pair{s, r}}) {
      (*this)(a, b, c, d) = v;
      (*this)(c, d, a, b) = v;
    }
  }
}

double TwoBodyTensor::symmetry_defect() const {
  double worst = 0.0;
  for (int p = 0; p < n_; ++p)
    for (int q = 0; q < n_; ++q)
      for (int r = 0; r < n_; ++r)
        for (int s = 0; s < n_; ++s) {
          const double v = (*this)(p, q, r, s);
          worst = std::max({worst, std::abs(v - (*this)(q, p, r, s)),
                            std::abs(v - (*this)(p, q, s, r)),
                            std::abs(v - (*this)(r, s, p, q))});
        }
  return worst;
}

// ============================================================================
// IntegralSet
// ============================================================================

IntegralSet::IntegralSet(int n_orb_, int n_elec_, int ms2_)
    : n_orb(n_orb_),
      n_elec(n_elec_),
      ms2(ms2_),
      h(Eigen::MatrixXd::Zero(n_orb_, n_orb_)),
      g(n_orb_) {}

void IntegralSet::validate(double tol) const {
  if (n_orb < 0 || n_elec < 0) throw ValidationError("negative orbital or electron count");
  if (n_elec > 2 * n_orb) throw ValidationError("n_elec exceeds 2*n_orb");
  if (h.rows() != n_orb || h.cols() != n_orb || g.n_orb() != n_orb)
    throw ValidationError("integral table dimensions do not match n_orb");
  if (!h.allFinite() || !g.data().allFinite() || !std::isfinite(core_energy))
    throw ValidationError("non-finite integral");
  if (n_orb > 0 && (h - h.transpose()).cwiseAbs().maxCoeff() > tol)
    throw ValidationError("one-electron table is not symmetric");
  if (n_orb > 0 && g.symmetry_defect() > tol)
    throw ValidationError("two-electron table lacks 8-fold symmetry");
}

// ============================================================================
// FCIDUMP
// ============================================================================

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

bool parse_int(const std::string& tok, int& out) {
  if (tok.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == tok.size();
}

bool parse_double(std::string tok, double& out) {
  std::replace(tok.begin(), tok.end(), 'D', 'E');
  std::replace(tok.begin(), tok.end(), 'd', 'e');
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0' && std::isfinite(out);
}

struct Header {
  std::map<std::string, std::vector<std::string>> fields;
  std::size_t last_line = 0;
};

Header read_header(std::istream& in) {
  Header hdr;
  std::string text;
  std::string line;
  std::size_t lineno = 0;
  bool started = false;
  bool closed = false;
  while (!closed && std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::string body = line.substr(first);
    if (!started) {
      if (body[0] != '&' || upper(body.substr(0, 4)) != "&FCI")
        throw ParseError("expected namelist header beginning with &FCI", lineno);
      started = true;
      body = body.substr(4);
    }
    const std::string up = upper(body);
    auto end = up.find("&END");
    auto slash = up.find('/');
    auto stop = std::min(end, slash);
    if (stop != std::string::npos) {
      body = body.substr(0, stop);
      closed = true;
    }
    text += body + ",";
  }
  if (!started) throw ParseError("empty input, missing &FCI header", std::max<std::size_t>(lineno, 1));
  if (!closed) throw ParseError("namelist header not terminated by &END or /", lineno);
  hdr.last_line = lineno;

  std::replace(text.begin(), text.end(), ',', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  std::istringstream ts(text);
  std::string tok;
  std::string key;
  while (ts >> tok) {
    auto eq = tok.find('=');
    if (eq != std::string::npos) {
      key = upper(tok.substr(0, eq));
      hdr.fields[key];
      std::string rest = tok.substr(eq + 1);
      if (!rest.empty()) hdr.fields[key].push_back(rest);
    } else {
      if (key.empty()) throw ParseError("malformed namelist token '" + tok + "'", lineno);
      hdr.fields[key].push_back(tok);
    }
  }
  return hdr;
}

int header_int(const Header& hdr, const std::string& key, std::optional<int> fallback) {
  auto it = hdr.fields.find(key);
  if (it == hdr.fields.end()) {
    if (fallback) return *fallback;
    throw SchemaError("FCIDUMP header is missing " + key);
  }
  int v = 0;
  if (it->second.size() != 1 || !parse_int(it->second.front(), v))
    throw ParseError("header field " + key + " is not an integer", hdr.last_line);
  return v;
}

}  // namespace

IntegralSet parse_fcidump(std::istream& in) {
  const Header hdr = read_header(in);
  const int norb = header_int(hdr, "NORB", std::nullopt);
  const int nelec = header_int(hdr, "NELEC", std::nullopt);
  const int ms2 = header_int(hdr, "MS2", 0);
  if (norb < 0 || nelec < 0) throw ParseError("negative NORB or NELEC", hdr.last_line);
  IntegralSet ints(norb, nelec, ms2);
  if (auto it = hdr.fields.find("ORBSYM"); it != hdr.fields.end()) {
    for (const auto& tok : it->second) {
      int v = 0;
      if (!parse_int(tok, v)) throw ParseError("ORBSYM entry is not an integer", hdr.last_line);
      ints.orbsym.push_back(v);
    }
  }

  std::string line;
  std::size_t lineno = hdr.last_line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5) throw ParseError("expected 'value i j k l'", lineno);
    double value = 0.0;
    if (!parse_double(tok[0], value)) throw ParseError("non-numeric value '" + tok[0] + "'", lineno);
    int idx[4];
    for (int a = 0; a < 4; ++a) {
      if (!parse_int(tok[a + 1], idx[a])) throw ParseError("non-integer index '" + tok[a + 1] + "'", lineno);
      if (idx[a] < 0 || idx[a] > norb) throw ParseError("index out of range", lineno);
    }
    const auto [i, j, k, l] = idx;
    if (i && j && k && l) {
      ints.g.set(i - 1, j - 1, k - 1, l - 1, value);
    } else if (i && j && !k && !l) {
      ints.h(i - 1, j - 1) = value;
      ints.h(j - 1, i - 1) = value;
    } else if (!i && !j && !k && !l) {
      ints.core_energy = value;
    } else if (i && !j && !k && !l) {
      // orbital energy record; carries no Hamiltonian information
    } else {
      throw ParseError("unsupported index pattern", lineno);
    }
  }
  ints.validate();
  return ints;
}

IntegralSet read_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FCIDUMP " + path.string());
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const IntegralSet& ints) {
  const int n = ints.n_orb;
  out << " &FCI NORB=" << n << ",NELEC=" << ints.n_elec << ",MS2=" << ints.ms2 << ",\n";
  out << "  ORBSYM=";
  for (int p = 0; p < n; ++p)
    out << (ints.orbsym.size() == static_cast<std::size_t>(n) ? ints.orbsym[p] : 1) << ",";
  out << "\n  ISYM=1,\n &END\n";
  char buf[96];
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%24.17e %4d %4d %4d %4d\n", v, i, j, k, l);
    out << buf;
  };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          const double v = ints.g(p, q, r, s);
          if (v != 0.0) emit(v, p + 1, q + 1, r + 1, s + 1);
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      if (ints.h(p, q) != 0.0) emit(ints.h(p, q), p + 1, q + 1, 0, 0);
  emit(ints.core_energy, 0, 0, 0, 0);
}

// ============================================================================
// Orbital rotation
// ============================================================================

IntegralSet rotate_orbitals(const IntegralSet& ints, const Eigen::MatrixXd& U) {
  const int n = ints.n_orb;
  if (U.rows() != n || U.cols() != n) throw ValidationError("rotation matrix has wrong shape");
  const Eigen::MatrixXd defect = U.transpose() * U - Eigen::MatrixXd::Identity(n, n);
  if (n > 0 && defect.cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("rotation matrix is not orthogonal");

  IntegralSet out = ints;
  out.h = U.transpose() * ints.h * U;
  if (n == 0) return out;

  // Contract the leading index and cycle it to the back; four passes
  // transform every index and restore the original layout.
  const Eigen::Index n3 = static_cast<Eigen::Index>(n) * n * n;
  Eigen::MatrixXd work = Eigen::Map<const Eigen::MatrixXd>(ints.g.data().data(), n3, n);
  for (int pass = 0; pass < 4; ++pass) {
    Eigen::MatrixXd contracted = work * U;                         // (n³ × n)
    Eigen::MatrixXd cycled = contracted.transpose();               // (n × n³)
    work = Eigen::Map<Eigen::MatrixXd>(cycled.data(), n3, n);
  }
  out.g.data() = Eigen::Map<Eigen::VectorXd>(work.data(), n3 * n);
  return out;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<double> row;
    for (std::string t; ls >> t;) {
      double v = 0.0;
      if (!parse_double(t, v)) throw ParseError("non-numeric matrix entry", lineno);
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw ParseError("matrix is not square", static_cast<std::size_t>(i + 1));
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = rows[i][j];
  }
  return M;
}

// ============================================================================
// Partition
// ============================================================================

Partition::Partition(std::vector<Fragment> fragments, int n_orb, int n_elec)
    : fragments_(std::move(fragments)), n_orb_(n_orb), n_elec_(n_elec) {
  qubit_of_orbital_.assign(n_orb, -1);
  fragment_of_orbital_.assign(n_orb, -1);
  orbital_of_qubit_.assign(2 * n_orb, -1);
  int next = 0;
  int electrons = 0;
  for (int f = 0; f < n_fragments(); ++f) {
    const auto& frag = fragments_[f];
    if (frag.n_elec < 0 || frag.n_elec % 2 != 0)
      throw ValidationError("fragment " + std::to_string(f) + " electron count must be even and non-negative");
    if (frag.n_elec > 2 * static_cast<int>(frag.orbitals.size()))
      throw ValidationError("fragment " + std::to_string(f) + " holds too many electrons");
    electrons += frag.n_elec;
    for (int o : frag.orbitals) {
      if (o < 0 || o >= n_orb) throw ValidationError("fragment orbital index out of range");
      if (fragment_of_orbital_[o] != -1) throw ValidationError("fragments overlap on orbital " + std::to_string(o));
      fragment_of_orbital_[o] = f;
      qubit_of_orbital_[o] = next;
      orbital_of_qubit_[next] = o;
      orbital_of_qubit_[next + 1] = o;
      next += 2;
    }
  }
  if (next != 2 * n_orb) throw ValidationError("fragments do not cover every orbital");
  if (electrons != n_elec) throw ValidationError("fragment electron counts do not sum to n_elec");
}

Partition Partition::single(const IntegralSet& ints) {
  Fragment f;
  f.orbitals.resize(ints.n_orb);
  std::iota(f.orbitals.begin(), f.orbitals.end(), 0);
  f.n_elec = ints.n_elec;
  return Partition({f}, ints.n_orb, ints.n_elec);
}

Partition Partition::parse(const std::string& orbitals, int n_orb, int n_elec,
                           const std::string& electrons) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == sep) {
        out.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  std::vector<Fragment> frags;
  for (const auto& group : split(orbitals, '|')) {
    Fragment f;
    for (const auto& tok : split(group, ',')) {
      if (tok.empty()) continue;
      int v = 0;
      if (!parse_int(tok, v)) throw ValidationError("bad orbital index '" + tok + "' in partition");
      f.orbitals.push_back(v);
    }
    frags.push_back(std::move(f));
  }
  if (!electrons.empty()) {
    auto counts = split(electrons, ',');
    if (counts.size() != frags.size())
      throw ValidationError("partition electron list length does not match fragment count");
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (!parse_int(counts[i], frags[i].n_elec)) throw ValidationError("bad electron count in partition");
  } else {
    // Two electrons per fragment orbital that is doubly occupied in the
    // aufbau reference.
    for (auto& f : frags)
      f.n_elec = 2 * static_cast<int>(std::count_if(f.orbitals.begin(), f.orbitals.end(),
                                                    [&](int o) { return o < n_elec / 2; }));
  }
  return Partition(std::move(frags), n_orb, n_elec);
}

int Partition::qubit(int orbital, Spin spin) const {
  if (orbital < 0 || orbital >= n_orb_) throw ValidationError("orbital index out of range");
  return qubit_of_orbital_[orbital] + static_cast<int>(spin);
}

int Partition::orbital_of_qubit(int qubit) const { return orbital_of_qubit_.at(qubit); }
int Partition::fragment_of_orbital(int orbital) const { return fragment_of_orbital_.at(orbital); }
int Partition::fragment_of_qubit(int qubit) const {
  return fragment_of_orbital_.at(orbital_of_qubit_.at(qubit));
}

int Partition::qubit_offset(int fragment) const {
  int off = 0;
  for (int f = 0; f < fragment; ++f) off += 2 * static_cast<int>(fragments_.at(f).orbitals.size());
  return off;
}

int Partition::fragment_qubits(int fragment) const {
  return 2 * static_cast<int>(fragments_.at(fragment).orbitals.size());
}

std::string Partition::to_string() const {
  std::ostringstream os;
  for (int f = 0; f < n_fragments(); ++f) {
    if (f) os << " | ";
    const auto& o = fragments_[f].orbitals;
    for (std::size_t i = 0; i < o.size(); ++i) os << (i ? "," : "") << o[i];
    os << " (" << fragments_[f].n_elec << "e)";
  }
  return os.str();
}

// ============================================================================
// Embedding
// ============================================================================

EmbedOccupied parse_embed_occupied(const std::string& text) {
  if (text == "all_occ") return EmbedOccupied::AllOccupied;
  if (text == "env_occ") return EmbedOccupied::EnvironmentOccupied;
  throw ValidationError("embed.occ must be all_occ or env_occ, got '" + text + "'");
}

FockPrefactor parse_fock_prefactor(const std::string& text) {
  if (text == "half") return FockPrefactor::Half;
  if (text == "full") return FockPrefactor::Full;
  throw ValidationError("embed.prefactor must be half or full, got '" + text + "'");
}

std::vector<int> reference_occupied(const IntegralSet& ints) {
  std::vector<int> occ(std::max(0, ints.n_beta()));
  std::iota(occ.begin(), occ.end(), 0);
  return occ;
}

FragmentProblem embed_fragment(const IntegralSet& ints, const Partition& part,
                               int fragment_id, const EmbedOptions& opts) {
  if (fragment_id < 0 || fragment_id >= part.n_fragments())
    throw ValidationError("fragment id out of range");
  const Fragment& frag = part.fragments()[fragment_id];
  if (frag.orbitals.empty()) throw ValidationError("fragment has zero orbitals");

  std::vector<int> occ = opts.occupied_override.value_or(reference_occupied(ints));
  if (opts.occupied == EmbedOccupied::EnvironmentOccupied) {
    std::erase_if(occ, [&](int i) { return part.fragment_of_orbital(i) == fragment_id; });
  }
  const double pre = opts.prefactor == FockPrefactor::Half ? 0.5 : 1.0;

  const int na = static_cast<int>(frag.orbitals.size());
  FragmentProblem prob;
  prob.fragment_id = fragment_id;
  prob.n_qubits = 2 * na;
  prob.n_elec_frag = frag.n_elec;
  prob.constant_shift = ints.core_energy;
  prob.local = IntegralSet(na, frag.n_elec, 0);
  prob.local.core_energy = ints.core_energy;
  for (int a = 0; a < na; ++a) {
    const int u = frag.orbitals[a];
    for (int b = 0; b < na; ++b) {
      const int v = frag.orbitals[b];
      double sum = 0.0;
      for (int i : occ) sum += 2.0 * ints.g(i, i, u, v) - ints.g(i, v, u, i);
      prob.local.h(a, b) = ints.h(u, v) + pre * sum;
      for (int c = 0; c < na; ++c)
        for (int d = 0; d < na; ++d)
          prob.local.g(a, b, c, d) = ints.g(u, v, frag.orbitals[c], frag.orbitals[d]);
    }
  }
  if (!ints.orbsym.empty())
    for (int o : frag.orbitals) prob.local.orbsym.push_back(ints.orbsym.at(o));
  return prob;
}

// ============================================================================
// Reference determinant
// ============================================================================

int Occupation::count() const noexcept { return std::popcount(bits); }

std::string Occupation::to_string() const {
  std::string s(n_qubits, '0');
  for (int q = 0; q < n_qubits; ++q)
    if (test(q)) s[q] = '1';
  return s;
}

Occupation hf_reference(const IntegralSet& ints, const Partition& part) {
  if ((ints.n_elec + ints.ms2) % 2 != 0)
    throw ValidationError("electron count parity is inconsistent with MS2");
  if (part.n_orb() != ints.n_orb) throw ValidationError("partition does not match integral set");
  if (part.n_qubits() > 64) throw ValidationError("more than 64 qubits");
  Occupation occ{0, part.n_qubits()};
  for (int o = 0; o < ints.n_alpha(); ++o) occ.set(part.qubit(o, Spin::Alpha));
  for (int o = 0; o < ints.n_beta(); ++o) occ.set(part.qubit(o, Spin::Beta));
  return occ;
}

}  // namespace fragvqe
