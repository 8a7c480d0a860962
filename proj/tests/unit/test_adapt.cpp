// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/adapt.hpp"
#include "fragvqe/oracle.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

using namespace fragvqe;

namespace {

using SparseKey = std::vector<std::tuple<std::uint64_t, std::uint64_t, int>>;

/// Matrix of a†_a a†_b a_c a_d − h.c. (or the single analogue) as a sorted
/// list of nonzeros, sign-normalized so the first entry is positive.
SparseKey generator_key(int n, const std::vector<std::pair<int, bool>>& ops) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> m;
  std::vector<std::pair<int, bool>> adj;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) adj.push_back({it->first, !it->second});
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    if (auto r = oracle::apply_string(b, ops)) m[{r->first, b}] += r->second;
    if (auto r = oracle::apply_string(b, adj)) m[{r->first, b}] -= r->second;
  }
  SparseKey key;
  for (auto& [rc, v] : m)
    if (std::abs(v) > 0.5) key.emplace_back(rc.first, rc.second, v > 0 ? 1 : -1);
  if (!key.empty() && std::get<2>(key.front()) < 0)
    for (auto& e : key) std::get<2>(e) = -std::get<2>(e);
  return key;
}

struct Enumerated {
  std::set<SparseKey> singles, doubles;
};

/// Distinct nonzero spin-conserving generators over every index tuple.
Enumerated enumerate(int n, const Partition* inter) {
  const auto touches = [&](std::vector<int> idx) {
    if (!inter) return true;
    std::set<int> f;
    for (int q : idx) f.insert(inter->fragment_of_qubit(q));
    return f.size() >= 2;
  };
  Enumerated out;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (p % 2 != q % 2 || !touches({p, q})) continue;
      SparseKey k = generator_key(n, {{q, true}, {p, false}});
      if (!k.empty()) out.singles.insert(k);
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          if (p == q || r == s) continue;
          if ((p % 2) + (q % 2) != (r % 2) + (s % 2)) continue;
          if (!touches({p, q, r, s})) continue;
          SparseKey k = generator_key(n, {{r, true}, {s, true}, {q, false}, {p, false}});
          if (k.empty()) continue;
          // a double that reduces to a single is still a double-type generator
          out.doubles.insert(k);
        }
  return out;
}

std::size_t count_kind(const OperatorPool& pool, char kind) {
  std::size_t n = 0;
  for (const auto& op : pool.ops) n += op.label[0] == kind;
  return n;
}

const IntegralSet& h4_square() {
  static const IntegralSet ints = read_fcidump(oracle::fixture("h4_square.FCIDUMP"));
  return ints;
}

OptimizerConfig quick() {
  OptimizerConfig o;
  o.restarts = 1;
  o.seed = 1;
  return o;
}

}  // namespace

TEST(Pool, TwoOneOrbitalFragmentsMatchEnumeration) {
  const Partition part = Partition::parse("0|1", 2, 2);
  const Enumerated e = enumerate(4, &part);
  const OperatorPool inter = build_pool(part, 4, PoolKind::FermionicGsdInter);
  EXPECT_EQ(count_kind(inter, 's'), 2u);
  EXPECT_EQ(count_kind(inter, 's'), e.singles.size());
  EXPECT_EQ(count_kind(inter, 'd'), e.doubles.size());
}

TEST(Pool, H4PoolsMatchEnumeration) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const Enumerated inter = enumerate(8, &part);
  const Enumerated full = enumerate(8, nullptr);
  const OperatorPool pi = build_pool(part, 8, PoolKind::FermionicGsdInter);
  const OperatorPool pf = build_pool(part, 8, PoolKind::FermionicGsdFull);
  EXPECT_EQ(count_kind(pi, 's'), inter.singles.size());
  EXPECT_EQ(count_kind(pi, 'd'), inter.doubles.size());
  EXPECT_EQ(count_kind(pf, 's'), full.singles.size());
  EXPECT_EQ(count_kind(pf, 'd'), full.doubles.size());
  EXPECT_EQ(gsd_excitations(8).size(), pf.size());
}

TEST(Pool, FullContainsInter) {
  for (const char* layout : {"0|1", "0,2|1,3"}) {
    const int n_orb = layout[1] == '|' ? 2 : 4;
    const Partition part = Partition::parse(layout, n_orb, n_orb);
    const OperatorPool pi = build_pool(part, 2 * n_orb, PoolKind::FermionicGsdInter);
    const OperatorPool pf = build_pool(part, 2 * n_orb, PoolKind::FermionicGsdFull);
    std::set<std::string> full;
    for (const auto& op : pf.ops) full.insert(op.label);
    for (const auto& op : pi.ops) EXPECT_TRUE(full.count(op.label)) << op.label;
    EXPECT_LE(pi.size(), pf.size());
    if (n_orb == 4) EXPECT_LT(pi.size(), pf.size());
  }
}

TEST(Pool, InterPredicateHolds) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const OperatorPool pool = build_pool(part, 8, PoolKind::FermionicGsdInter);
  for (const auto& op : pool.ops) EXPECT_GE(fragments_touched(op.indices, part), 2) << op.label;
  // stripped strings of overlapping doubles may land on one fragment
  int single = 0;
  for (const auto& op : build_pool(part, 8, PoolKind::QubitInter).ops) single += fragments_touched(op.indices, part) < 2;
  EXPECT_GT(single, 0);
  EXPECT_THROW(build_pool(Partition::parse("0,1,2,3", 4, 4), 8, PoolKind::QubitInter), ValidationError);
  EXPECT_THROW(build_pool(Partition::parse("0,1,2,3", 4, 4), 8, PoolKind::FermionicGsdInter), ValidationError);
  EXPECT_NO_THROW(build_pool(Partition::parse("0,1,2,3", 4, 4), 8, PoolKind::FermionicGsdFull));
  EXPECT_THROW(build_pool(part, 6, PoolKind::QubitInter), ValidationError);
}

TEST(Pool, GeneratorsAreAntiHermitianCommutingSums) {
  const Partition part = Partition::parse("0|1", 2, 2);
  for (PoolKind k : {PoolKind::FermionicGsdFull, PoolKind::QubitInter}) {
    for (const auto& op : build_pool(part, 4, k).ops) {
      const Eigen::MatrixXcd G = op.image.to_dense();
      EXPECT_LT((G + G.adjoint()).cwiseAbs().maxCoeff(), 1e-15) << op.label;
      EXPECT_TRUE(op.image.strings_commute());
    }
  }
}

TEST(Pool, QubitStringsAreStrippedImages) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const OperatorPool fer = build_pool(part, 8, PoolKind::FermionicGsdInter);
  const OperatorPool qub = build_pool(part, 8, PoolKind::QubitInter);
  std::set<std::string> expected;
  for (const auto& op : fer.ops)
    for (const auto& [p, c] : op.image.terms()) expected.insert(p.strip_z().to_text());
  std::set<std::string> got;
  std::string prev;
  for (const auto& op : qub.ops) {
    ASSERT_EQ(op.image.size(), 1u);
    const auto& [p, c] = *op.image.terms().begin();
    EXPECT_EQ(p.z & ~p.x, 0u) << op.label;
    EXPECT_TRUE(p.weight() == 2 || p.weight() == 4) << op.label;
    EXPECT_EQ(c, Complex(0, 1));
    EXPECT_EQ(p.y_count() % 2, 1) << op.label;
    EXPECT_EQ(op.cnot_cost, 2 * (p.weight() - 1));
    EXPECT_LT(prev, op.label);
    prev = op.label;
    got.insert(op.label);
  }
  EXPECT_EQ(got, expected);
}

TEST(PoolGradients, VanishOnEigenstates) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const PauliSum h = hamiltonian_to_pauli(h4_square(), part);
  const QuantumState g = exact_ground_state(h, Sector{4, 0}).state;
  for (PoolKind k : {PoolKind::FermionicGsdInter, PoolKind::QubitInter})
    EXPECT_LT(pool_gradients(g, Observable(h), build_pool(part, 8, k)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PoolGradients, MatchFiniteDifferencesAndCommutator) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const PauliSum h = hamiltonian_to_pauli(h4_square(), part);
  const Observable obs(h);
  const QuantumState psi(8, oracle::random_state(8, 17));
  const Eigen::MatrixXcd H = h.to_dense();
  for (PoolKind k : {PoolKind::FermionicGsdInter, PoolKind::QubitInter}) {
    const OperatorPool pool = build_pool(part, 8, k);
    const Eigen::VectorXd g = pool_gradients(psi, obs, pool);
    for (std::size_t i = 0; i < pool.size(); i += 7) {
      ParamCircuit c(8);
      c.exp_generator(pool.ops[i].image);
      const double hstep = 1e-5;
      const double ep = expectation(apply_circuit(psi, c, Eigen::VectorXd::Constant(1, hstep)), obs);
      const double em = expectation(apply_circuit(psi, c, Eigen::VectorXd::Constant(1, -hstep)), obs);
      EXPECT_NEAR(g(i), (ep - em) / (2 * hstep), 1e-6) << pool.ops[i].label;
      const Eigen::MatrixXcd T = pool.ops[i].image.to_dense();
      const Complex comm = psi.amp.dot((H * T - T * H) * psi.amp);
      EXPECT_LT(std::abs(comm.imag()), 1e-10);
      EXPECT_NEAR(g(i), comm.real(), 1e-10);
    }
  }
}

TEST(Adapt, StartsConvergedAtGroundState) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const PauliSum h = hamiltonian_to_pauli(h4_square(), part);
  const SpectrumResult ex = exact_ground_state(h, Sector{4, 0});
  const AdaptResult r = adapt_vqe(h, ex.state, build_pool(part, 8, PoolKind::QubitInter), {}, quick());
  EXPECT_TRUE(r.iterations.empty());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.reason, "gradient_threshold");
  EXPECT_NEAR(r.final_energy, ex.energy, 1e-12);
  EXPECT_EQ(r.cnots, 0);
}

TEST(Adapt, ConvergesFromMrpsWithMonotoneDescent) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const PauliSum h = hamiltonian_to_pauli(h4_square(), part);
  const double exact = oracle::sector_ground(oracle::fock_hamiltonian(h4_square(), [&](int p, int s) {
    return part.qubit(p, s ? Spin::Beta : Spin::Alpha);
  }), 4, 0);
  std::vector<QuantumState> frags;
  for (int f = 0; f < 2; ++f)
    frags.push_back(exact_ground_state(fragment_hamiltonian(embed_fragment(h4_square(), part, f))).state);
  const QuantumState mrps = assemble_mrps(frags, part);
  for (PoolKind k : {PoolKind::QubitInter, PoolKind::FermionicGsdInter}) {
    const AdaptResult r = adapt_vqe(h, mrps, build_pool(part, 8, k), {}, quick());
    EXPECT_TRUE(r.converged) << to_string(k);
    EXPECT_LE(std::abs(r.final_energy - exact), 1e-6) << to_string(k);
    EXPECT_GE(r.final_energy, exact - 1e-9);
    double prev = r.initial_energy;
    int cn = 0;
    for (const auto& it : r.iterations) {
      EXPECT_LE(it.energy, prev + 1e-10);
      EXPECT_GE(it.cumulative_cnots, cn);
      prev = it.energy;
      cn = it.cumulative_cnots;
    }
    EXPECT_EQ(r.cnots, cn);
    EXPECT_EQ(r.n_operators, static_cast<int>(r.iterations.size()));
  }
}

TEST(Adapt, TiesSelectLowestIndex) {
  const Partition part = Partition::parse("0", 1, 0);
  OperatorPool pool;
  pool.kind = PoolKind::QubitInter;
  pool.partition = part;
  for (const char* label : {"first", "second"}) {
    PoolOperator op;
    op.label = label;
    op.indices = {0};
    op.image = PauliSum(PauliString::from_text("YI"), Complex(0, 1));
    pool.ops.push_back(op);
  }
  const PauliSum h(PauliString::from_text("XI"), 1.0);
  AdaptConfig cfg;
  cfg.max_depth = 1;
  const AdaptResult r = adapt_vqe(h, prepare_basis(0, 2), pool, cfg, quick());
  ASSERT_EQ(r.iterations.size(), 1u);
  EXPECT_EQ(r.iterations[0].op_index, 0);
  EXPECT_EQ(r.iterations[0].label, "first");
  EXPECT_NEAR(r.final_energy, -1.0, 1e-9);
}

TEST(Adapt, DepthLimitIsReported) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const PauliSum h = hamiltonian_to_pauli(h4_square(), part);
  AdaptConfig cfg;
  cfg.max_depth = 2;
  const AdaptResult r = adapt_vqe(h, prepare_basis(hf_reference(h4_square(), part)),
                                  build_pool(part, 8, PoolKind::QubitInter), cfg, quick());
  EXPECT_EQ(r.iterations.size(), 2u);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.reason, "max_depth");
  AdaptConfig bad;
  bad.grad_threshold = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Adapt, TrajectoryRoundTrip) {
  const Partition part = Partition::parse("0,2|1,3", 4, 4);
  const PauliSum h = hamiltonian_to_pauli(h4_square(), part);
  AdaptConfig cfg;
  cfg.max_depth = 3;
  const AdaptResult r = adapt_vqe(h, prepare_basis(hf_reference(h4_square(), part)),
                                  build_pool(part, 8, PoolKind::FermionicGsdInter), cfg, quick());
  std::stringstream ss;
  write_trajectory(ss, r);
  const auto rows = read_trajectory(ss);
  ASSERT_EQ(rows.size(), r.iterations.size() + 1);
  EXPECT_EQ(rows[0].label, "reference");
  EXPECT_NEAR(rows[0].energy, r.initial_energy, 1e-12);
  for (std::size_t i = 0; i < r.iterations.size(); ++i) {
    EXPECT_EQ(rows[i + 1].label, r.iterations[i].label);
    EXPECT_EQ(rows[i + 1].cnots, r.iterations[i].cumulative_cnots);
    EXPECT_NEAR(rows[i + 1].energy, r.iterations[i].energy, 1e-12);
  }
}

TEST(Uccgsd, CircuitCoversWholePool) {
  const ParamCircuit c = uccgsd_circuit(8);
  const auto ex = gsd_excitations(8);
  EXPECT_EQ(c.n_params(), static_cast<int>(ex.size()));
  int expected = 0;
  for (const auto& e : ex)
    for (const auto& [p, coeff] : e.image.terms()) expected += 2 * (p.weight() - 1);
  EXPECT_EQ(count_cnots(c), expected);
}

TEST(Uccgsd, ReachesExactFromMrpsOnSmallSystem) {
  const IntegralSet ints = read_fcidump(oracle::fixture("h2_sto3g_0.7414.FCIDUMP"));
  const Partition part = Partition::parse("0|1", 2, 2);
  const PauliSum h = hamiltonian_to_pauli(ints, part);
  OptimizerConfig o = quick();
  o.restarts = 2;
  const AdaptResult r = uccgsd_vqe(h, prepare_basis(hf_reference(ints, part)), part, o);
  EXPECT_NEAR(r.final_energy, oracle::meta_real("h2_sto3g_0.7414", "fci_energy"), 1e-8);
  EXPECT_EQ(r.cnots, count_cnots(uccgsd_circuit(4)));
}
