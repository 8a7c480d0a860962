// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Usage: acceptance [criterion|all]

#include "fragvqe/adapt.hpp"
#include "fragvqe/oracle.hpp"
#include "fragvqe/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fragvqe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string fix(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

fs::path fixture(const std::string& name) { return fs::path(FRAGVQE_FIXTURE_DIR) / name; }

RunConfig config(const std::string& name) {
  return RunConfig::from_config(Config::load(fs::path(FRAGVQE_CONFIG_DIR) / name));
}

RunConfig h4_config() { return config("h4_square.conf"); }

Problem problem(const RunConfig& cfg, const std::string& stem) {
  return load_problem(cfg, fixture(stem + ".FCIDUMP"));
}

double fragment_oracle(const FragmentProblem& fp) { return exact_ground_state(fragment_hamiltonian(fp)).energy; }

std::vector<FragmentProblem> fragments(const Problem& p, const RunConfig& cfg) {
  std::vector<FragmentProblem> out;
  for (int f = 0; f < p.part.n_fragments(); ++f) out.push_back(embed_fragment(p.ints, p.part, f, cfg.embed));
  return out;
}

Eigen::MatrixXd random_orthogonal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ----------------------------------------------------------------------------

Outcome fragment_convergence() {
  Outcome o;
  const RunConfig cfg = h4_config();
  double worst = 0.0;
  bool monotone = true;
  for (const char* stem : {"h4_square", "h4_rect", "cbd_d2h_casscf", "cbd_d4h_casscf", "cbd_d2h_hf", "cbd_d4h_hf"}) {
    const Problem p = problem(cfg, stem);
    for (const FragmentProblem& fp : fragments(p, cfg)) {
      const double exact = fragment_oracle(fp);
      HeaConfig hea;
      hea.layers = 6;
      const FragmentState fs6 = fragment_vqe(fp, hea, cfg.optimizer);
      worst = std::max(worst, std::abs(fs6.energy - exact));
      const auto ladder = fragment_vqe_ladder(fp, HeaConfig{}, cfg.optimizer, 8);
      std::ostringstream errs;
      for (std::size_t k = 0; k < ladder.size(); ++k) {
        errs << (k ? "," : "") << sci(ladder[k].energy - exact);
        if (k && ladder[k].energy > ladder[k - 1].energy + 1e-10) monotone = false;
      }
      o.detail << stem << "/f" << fp.fragment_id << " L1..8 " << errs.str() << "; ";
    }
  }
  o.require(worst <= 1e-6, "worst L=6 error " + sci(worst) + " (<= 1e-6)");
  o.require(monotone, "ladder non-increasing");
  return o;
}

Outcome entangler_robustness() {
  Outcome o;
  const RunConfig cfg = h4_config();
  const Problem p = problem(cfg, "h4_square");
  for (Entangler e : {Entangler::Linear, Entangler::Full, Entangler::Circular, Entangler::Pairwise}) {
    double worst = 0.0;
    for (const FragmentProblem& fp : fragments(p, cfg)) {
      HeaConfig hea;
      hea.layers = 8;
      hea.entangler = e;
      worst = std::max(worst, std::abs(fragment_vqe(fp, hea, cfg.optimizer).energy - fragment_oracle(fp)));
    }
    o.require(worst <= 1e-5, to_string(e) + " " + sci(worst));
  }
  return o;
}

Outcome reference_separation() {
  Outcome o;
  const RunConfig cfg = h4_config();
  const Problem p = problem(cfg, "h4_square");
  const RunSummary m = run_method(cfg, p, Method::MrpsUccgsd, {});
  const RunSummary h = run_method(cfg, p, Method::HfUccgsd, {});
  o.require(std::abs(*m.error) <= 1e-5, "MRPS-UCCGSD error " + sci(*m.error) + " (<= 1e-5)");
  o.require(std::abs(*h.error) >= 1e-5, "HF-UCCGSD error " + sci(*h.error) + " (>= 1e-5)");
  return o;
}

Outcome fidelity_claim() {
  Outcome o;
  const RunConfig cfg = h4_config();
  const Problem p = problem(cfg, "h4_square");
  const SpectrumResult exact = solve_exact(cfg, p);
  const double fm = fidelity(build_mrps(cfg, p), exact.state);
  const double fh = fidelity(prepare_basis(hf_reference(p.ints, p.part)), exact.state);
  o.require(fm > 0.5, "MRPS fidelity " + fix(fm, 4) + " (> 0.5)");
  o.require(fh < 0.05, "HF fidelity " + fix(fh, 4) + " (< 0.05)");
  return o;
}

Outcome entropy_ordering() {
  Outcome o;
  const RunConfig cfg = config("h4_pec_scan.conf");
  std::size_t best = 0;
  std::vector<double> s;
  for (const auto& path : cfg.scan_integrals) {
    const Problem p = load_problem(cfg, path);
    const SpectrumResult ex = solve_exact(cfg, p);
    s.push_back(shannon_entropy(natural_occupations(one_rdm(ex.state, p.ints.n_orb, p.part))));
    if (s.back() > s[best]) best = s.size() - 1;
    o.detail << p.tag << "=" << fix(s.back(), 4) << " ";
  }
  o.detail << "; ";
  o.require(best == 0, "maximum at " + cfg.scan_integrals[best].stem().string() + " (square first)");
  return o;
}

Outcome npe_criterion() {
  Outcome o;
  const RunConfig cfg = config("h4_pec_scan.conf");
  std::vector<double> em, eh;
  for (const auto& path : cfg.scan_integrals) {
    const Problem p = load_problem(cfg, path);
    em.push_back(*run_method(cfg, p, Method::MrpsUccgsd, {}).error);
    eh.push_back(*run_method(cfg, p, Method::HfUccgsd, {}).error);
  }
  o.require(npe(em) <= 1e-5, "MRPS-UCCGSD NPE " + sci(npe(em)) + " (<= 1e-5)");
  o.require(npe(eh) >= 1e-4, "HF-UCCGSD NPE " + sci(npe(eh)) + " (>= 1e-4)");
  return o;
}

Outcome pool_cnots() {
  Outcome o;
  RunConfig cfg = config("h4_pec_scan.conf");
  int geometries = 0;
  for (const char* stem : {"h4_scan_r2_1.00", "h4_scan_r2_1.20", "h4_scan_r2_1.60", "h4_scan_r2_2.00"}) {
    const Problem p = problem(cfg, stem);
    cfg.pool = PoolKind::QubitInter;
    const RunSummary q = run_method(cfg, p, Method::MrpsAdapt, {});
    cfg.pool = PoolKind::FermionicGsdInter;
    const RunSummary f = run_method(cfg, p, Method::MrpsAdapt, {});
    const bool ok = std::abs(*q.error) <= 1e-6 && std::abs(*f.error) <= 1e-6 && q.cnots < f.cnots;
    o.require(ok, std::string(stem) + " qubit " + std::to_string(q.cnots) + " (" + sci(*q.error) + ") vs fermionic " +
                      std::to_string(f.cnots) + " (" + sci(*f.error) + ")");
    ++geometries;
  }
  o.require(geometries >= 3, std::to_string(geometries) + " geometries");
  return o;
}

Outcome symmetric_stretch() {
  Outcome o;
  const RunConfig cfg = config("h4_symm_scan.conf");
  const int full = count_cnots(uccgsd_circuit(8));
  for (const auto& path : cfg.scan_integrals) {
    const Problem p = load_problem(cfg, path);
    const RunSummary s = run_method(cfg, p, Method::MrpsAdapt, {});
    const double reduction = 1.0 - static_cast<double>(s.cnots) / full;
    o.require(std::abs(*s.error) <= 1.6e-3 && reduction >= 0.5,
              p.tag + " error " + sci(*s.error) + " cnots " + std::to_string(s.cnots) + "/" + std::to_string(full) +
                  " (-" + fix(100 * reduction, 0) + "%)");
  }
  return o;
}

Outcome water() {
  Outcome o;
  for (const char* conf : {"water_sym_scan.conf", "water_loc_scan.conf"}) {
    const RunConfig cfg = config(conf);
    std::vector<double> errs;
    double worst = 0.0;
    for (const auto& path : cfg.scan_integrals) {
      const RunSummary s = run_method(cfg, load_problem(cfg, path), Method::MrpsAdapt, {});
      errs.push_back(*s.error);
      worst = std::max(worst, std::abs(*s.error));
    }
    o.require(worst <= 1e-5, std::string(conf) + " worst error " + sci(worst) + " (<= 1e-5)");
    o.require(npe(errs) <= 1e-4, std::string(conf) + " NPE " + sci(npe(errs)) + " (<= 1e-4)");
  }
  return o;
}

Outcome cbd_table() {
  Outcome o;
  const std::map<std::string, int> ref_cnots = {
      {"cbd_d2h_casscf", 202}, {"cbd_d4h_casscf", 154}, {"cbd_d2h_hf", 224}, {"cbd_d4h_hf", 416}};
  const std::map<std::string, double> ref_exact = {{"cbd_d2h_casscf", -153.650047},
                                                   {"cbd_d4h_casscf", -153.642726}};
  std::map<std::string, RunSummary> rows;
  for (const auto& [stem, cnots] : ref_cnots) {
    const RunConfig cfg = config(stem + ".conf");
    const RunSummary s = run_method(cfg, load_problem(cfg, cfg.integrals), Method::MrpsAdapt, {});
    rows[stem] = s;
    if (ref_exact.count(stem)) {
      const double d = *s.exact - ref_exact.at(stem);
      o.require(std::abs(d) <= 1e-5, stem + " exact " + fix(*s.exact, 6) + " (" + sci(d) + ")");
      o.require(std::abs(*s.error) <= 1e-5, stem + " ADAPT error " + sci(*s.error));
    }
    const double ratio = static_cast<double>(s.cnots) / cnots;
    o.require(ratio >= 0.5 && ratio <= 2.0,
              stem + " cnots " + std::to_string(s.cnots) + " vs " + std::to_string(cnots) + " (x" + fix(ratio) + ")");
  }
  const double bc = (rows["cbd_d4h_casscf"].energy - rows["cbd_d2h_casscf"].energy) * kKcalPerHartree;
  const double bh = (rows["cbd_d4h_hf"].energy - rows["cbd_d2h_hf"].energy) * kKcalPerHartree;
  o.require(std::abs(bc - 4.6) <= 0.1, "CASSCF barrier " + fix(bc) + " kcal/mol (4.6 +- 0.1)");
  o.require(std::abs(bh - 23.7) <= 0.2, "HF barrier " + fix(bh) + " kcal/mol (23.7 +- 0.2)");
  return o;
}

Outcome properties() {
  Outcome o;

  // anticommutation on 8 modes
  double car = 0.0;
  std::vector<Eigen::MatrixXcd> a, ad;
  for (int p = 0; p < 8; ++p) {
    a.push_back(jw_ladder(des(p), 8).to_dense());
    ad.push_back(jw_ladder(cre(p), 8).to_dense());
  }
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(256, 256);
  for (int p = 0; p < 8; ++p)
    for (int q = 0; q < 8; ++q) {
      Eigen::MatrixXcd m = a[p] * ad[q] + ad[q] * a[p];
      if (p == q) m -= id;
      car = std::max(car, m.cwiseAbs().maxCoeff());
      car = std::max(car, (a[p] * a[q] + a[q] * a[p]).cwiseAbs().maxCoeff());
    }
  o.require(car <= 1e-14, "CAR " + sci(car));

  // unitarity and norm
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> angle(-3.2, 3.2);
  double norm_dev = 0.0, unit_dev = 0.0;
  const Entangler ents[] = {Entangler::Linear, Entangler::Full, Entangler::Circular, Entangler::Pairwise};
  for (int k = 0; k < 1000; ++k) {
    HeaConfig hc;
    hc.layers = 1 + k % 3;
    hc.entangler = ents[k % 4];
    ParamCircuit c = build_hea(4, hc);
    c.pauli_rot(PauliString::from_text(k % 2 ? "XYZI" : "YIXX"), c.new_slot(), 0.5);
    Eigen::VectorXd th(c.n_params());
    for (auto& t : th) t = angle(rng);
    const QuantumState psi = apply_circuit(prepare_basis(static_cast<std::uint64_t>(k % 16), 4), c, th);
    norm_dev = std::max(norm_dev, std::abs(psi.norm() - 1.0));
    if (k < 20) {
      const Eigen::MatrixXcd u = circuit_unitary(c, th);
      unit_dev = std::max(unit_dev, (u.adjoint() * u - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff());
    }
  }
  o.require(norm_dev <= 1e-10 && unit_dev <= 1e-10, "norm " + sci(norm_dev) + " unitarity " + sci(unit_dev));

  // parameter shift vs finite differences
  const RunConfig cfg = h4_config();
  const Problem sq = problem(cfg, "h4_square");
  const Problem rect = problem(cfg, "h4_rect");
  double shift = 0.0;
  {
    HeaConfig hc;
    hc.layers = 3;
    const ParamCircuit c = build_hea(4, hc);
    const Observable h(fragment_hamiltonian(embed_fragment(sq.ints, sq.part, 0)));
    Eigen::VectorXd th(c.n_params());
    for (auto& t : th) t = angle(rng);
    const QuantumState ref = prepare_basis(0, 4);
    shift = (parameter_shift_gradient(c, th, h, ref) - finite_difference_gradient(c, th, h, ref)).cwiseAbs().maxCoeff();
    const OperatorPool pool = build_pool(sq.part, 8, PoolKind::FermionicGsdInter);
    ParamCircuit g(8);
    for (int k = 0; k < 6; ++k) g.exp_generator(pool.ops[(k * 7) % pool.size()].image);
    Eigen::VectorXd phi(g.n_params());
    for (auto& t : phi) t = angle(rng) / 4;
    const Observable H(sq.hamiltonian);
    const QuantumState hf = prepare_basis(hf_reference(sq.ints, sq.part));
    shift = std::max(shift, (parameter_shift_gradient(g, phi, H, hf) - finite_difference_gradient(g, phi, H, hf))
                                .cwiseAbs()
                                .maxCoeff());
  }
  o.require(shift <= 1e-6, "shift vs FD " + sci(shift));

  // variational bound and monotone descent
  double bound = 0.0;
  bool monotone = true;
  for (const Problem* p : {&sq, &rect}) {
    for (const FragmentProblem& fp : fragments(*p, cfg)) {
      const double ex = fragment_oracle(fp);
      HeaConfig hc;
      hc.layers = 4;
      for (const auto& r : fragment_vqe(fp, hc, cfg.optimizer).restarts) bound = std::min(bound, r.energy - ex);
    }
    const double ex = solve_exact(cfg, *p).energy;
    const OperatorPool pool = build_pool(p->part, 8, cfg.pool);
    const AdaptResult r = adapt_vqe(p->hamiltonian, build_mrps(cfg, *p), pool, cfg.adapt, cfg.optimizer);
    double prev = r.initial_energy;
    for (const auto& it : r.iterations) {
      bound = std::min(bound, it.energy - ex);
      if (it.energy > prev + 1e-10) monotone = false;
      prev = it.energy;
    }
  }
  o.require(bound >= -1e-9, "variational bound (min E - E_exact " + sci(bound) + ")");
  o.require(monotone, "ADAPT descent monotone");

  // inter-fragment predicate
  bool inter = true;
  for (const Problem* p : {&sq, &rect})
    for (const auto& op : build_pool(p->part, 8, PoolKind::FermionicGsdInter).ops)
      inter = inter && fragments_touched(op.indices, p->part) >= 2;
  o.require(inter, "inter-fragment predicate");

  // orbital-rotation invariance
  double rot = 0.0;
  for (const char* stem : {"h4_rect", "water_r_1.40_sym", "cbd_d4h_casscf"}) {
    const IntegralSet ints = read_fcidump(fixture(std::string(stem) + ".FCIDUMP"));
    const Partition single = Partition::single(ints);
    const Sector sec{ints.n_elec, ints.ms2};
    const double e0 = exact_ground_state(hamiltonian_to_pauli(ints, single), sec).energy;
    const IntegralSet r = rotate_orbitals(ints, random_orthogonal(ints.n_orb, 17));
    rot = std::max(rot, std::abs(exact_ground_state(hamiltonian_to_pauli(r, single), sec).energy - e0));
  }
  o.require(rot <= 1e-9, "rotation invariance " + sci(rot));

  // byte reproducibility
  const fs::path base = fs::temp_directory_path() / "fragvqe_acceptance_repro";
  fs::remove_all(base);
  run_method(cfg, sq, Method::MrpsAdapt, base / "a");
  run_method(cfg, sq, Method::MrpsAdapt, base / "b");
  bool same = true;
  int files = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    if (e.path().filename() == "run.log") continue;
    same = same && slurp(e.path()) == slurp(base / "b" / e.path().filename());
    ++files;
  }
  o.require(same && files > 0, "byte-identical artifacts (" + std::to_string(files) + " files)");
  return o;
}

Outcome gradient_variance_ordering() {
  Outcome o;
  const RunConfig cfg = h4_config();
  const Problem p = problem(cfg, "h4_square");
  HeaConfig hc;
  hc.layers = 6;
  auto median = [](Eigen::VectorXd v) {
    std::sort(v.begin(), v.end());
    const Eigen::Index n = v.size();
    return n % 2 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
  };
  const Observable hf(fragment_hamiltonian(embed_fragment(p.ints, p.part, 0)));
  const double frag = median(gradient_variance(build_hea(4, hc), hf, prepare_basis(0, 4), 200, 12));
  const double full =
      median(gradient_variance(build_hea(8, hc), Observable(p.hamiltonian), prepare_basis(0, 8), 200, 12));
  o.require(frag > full, "median variance fragment " + sci(frag) + " vs full " + sci(full));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fragment_convergence", fragment_convergence},
      {"entangler_robustness", entangler_robustness},
      {"reference_separation", reference_separation},
      {"fidelity", fidelity_claim},
      {"entropy_ordering", entropy_ordering},
      {"npe", npe_criterion},
      {"pool_cnots", pool_cnots},
      {"symmetric_stretch", symmetric_stretch},
      {"water", water},
      {"cbd_table", cbd_table},
      {"properties", properties},
      {"gradient_variance", gradient_variance_ordering},
  };
  const std::string which = argc > 1 ? argv[1] : "all";
  int failed = 0, ran = 0;
  for (const auto& [name, run] : criteria) {
    if (which != "all" && which != name) continue;
    ++ran;
    bool pass = false;
    std::string detail;
    try {
      Outcome out = run();
      pass = out.pass;
      detail = out.detail.str();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    failed += !pass;
  }
  if (!ran) {
    std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
    return 2;
  }
  return failed ? 1 : 0;
}
