// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

namespace fragvqe {

Method parse_method(const std::string& text) {
  if (text == "fragment-vqe") return Method::FragmentVqe;
  if (text == "mrps") return Method::Mrps;
  if (text == "mrps-adapt") return Method::MrpsAdapt;
  if (text == "hf-adapt") return Method::HfAdapt;
  if (text == "mrps-uccgsd") return Method::MrpsUccgsd;
  if (text == "hf-uccgsd") return Method::HfUccgsd;
  if (text == "exact") return Method::Exact;
  throw ValidationError("unknown method '" + text + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::FragmentVqe: return "fragment-vqe";
    case Method::Mrps: return "mrps";
    case Method::MrpsAdapt: return "mrps-adapt";
    case Method::HfAdapt: return "hf-adapt";
    case Method::MrpsUccgsd: return "mrps-uccgsd";
    case Method::HfUccgsd: return "hf-uccgsd";
    case Method::Exact: return "exact";
  }
  return "?";
}

// ============================================================================
// Configuration
// ============================================================================

namespace {

template <typename F>
auto field(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

std::filesystem::path resolve(const Config& c, const std::string& p) {
  std::filesystem::path out = p;
  if (out.is_relative() && !c.base_dir.empty()) out = c.base_dir / out;
  return out;
}

}  // namespace

RunConfig RunConfig::from_config(const Config& c) {
  RunConfig r;
  if (c.has("integrals")) r.integrals = c.path("integrals");
  if (!r.integrals.empty() && !std::filesystem::exists(r.integrals))
    throw ConfigError("integrals", "file not found: " + r.integrals.string());
  for (const auto& p : c.list("scan.integrals")) {
    r.scan_integrals.push_back(resolve(c, p));
    if (!std::filesystem::exists(r.scan_integrals.back()))
      throw ConfigError("scan.integrals", "file not found: " + r.scan_integrals.back().string());
  }
  if (c.has("rotation") && !c.str("rotation", "").empty()) r.rotation = c.path("rotation");
  r.partition = c.str("partition", "");
  r.partition_electrons = c.str("partition.electrons", "");
  if (c.has("method")) r.method = field("method", [&] { return parse_method(c.str("method", "")); });
  r.scan_method = field("scan.method", [&] { return parse_method(c.str("scan.method", "mrps-adapt")); });
  r.embed.occupied = field("embed.occ", [&] { return parse_embed_occupied(c.str("embed.occ", "all_occ")); });
  r.embed.prefactor =
      field("embed.prefactor", [&] { return parse_fock_prefactor(c.str("embed.prefactor", "half")); });

  r.hea.layers = c.integer("hea.layers", 6);
  r.hea.entangler = field("hea.entangler", [&] { return parse_entangler(c.str("hea.entangler", "linear")); });
  if (c.has("hea.sequence")) {
    r.hea.sequence.clear();
    for (const auto& g : c.list("hea.sequence"))
      r.hea.sequence.push_back(field("hea.sequence", [&] { return parse_rotation(g); }));
  }
  r.hea.final_layer = c.boolean("hea.final_layer", true);
  field("hea.layers", [&] {
    r.hea.validate();
    return 0;
  });
  r.number_penalty = c.real("fragment.number_penalty", 0.0);
  r.spin_penalty = c.real("fragment.spin_penalty", 0.0);
  const std::string solver = c.str("fragment.solver", "vqe");
  if (solver == "vqe")
    r.fragment_solver = FragmentSolver::Vqe;
  else if (solver == "exact")
    r.fragment_solver = FragmentSolver::Exact;
  else
    throw ConfigError("fragment.solver", "expected vqe or exact, got '" + solver + "'");

  r.optimizer.gtol = c.real("optimizer.gtol", 1e-9);
  r.optimizer.max_evals = c.integer("optimizer.max_evals", 10000);
  r.optimizer.restarts = c.integer("optimizer.restarts", 10);
  r.optimizer.seed = static_cast<std::uint64_t>(c.integer("optimizer.seed", 0));
  r.optimizer.init_low = c.real("optimizer.init_low", -std::numbers::pi);
  r.optimizer.init_high = c.real("optimizer.init_high", std::numbers::pi);
  if (c.has("optimizer.bound")) r.optimizer.bound = c.real("optimizer.bound", 0.0);
  field("optimizer", [&] {
    r.optimizer.validate();
    return 0;
  });

  r.pool = field("adapt.pool", [&] { return parse_pool_kind(c.str("adapt.pool", "qubit_inter")); });
  r.adapt.grad_threshold = c.real("adapt.grad_threshold", 1e-8);
  r.adapt.max_depth = c.integer("adapt.max_depth", 200);
  field("adapt", [&] {
    r.adapt.validate();
    return 0;
  });

  const std::string sector = c.str("exact.sector", "auto");
  if (sector != "auto" && sector != "none") throw ConfigError("exact.sector", "expected auto or none");
  r.exact_sector = sector == "auto";
  if (c.has("exact.multiplicity")) {
    r.exact_multiplicity = c.integer("exact.multiplicity", 1);
    if (*r.exact_multiplicity < 1) throw ConfigError("exact.multiplicity", "must be at least 1");
  }
  r.out_dir = c.str("output.dir", "out");
  r.jobs = c.integer("run.jobs", 1);
  if (r.jobs < 1) throw ConfigError("run.jobs", "must be at least 1");
  return r;
}

// ============================================================================
// Problems and methods
// ============================================================================

Problem load_problem(const RunConfig& cfg, const std::filesystem::path& integrals) {
  if (integrals.empty()) throw ConfigError("integrals", "required field is missing");
  if (!std::filesystem::exists(integrals)) throw ConfigError("integrals", "file not found: " + integrals.string());
  Problem p;
  p.tag = integrals.stem().string();
  p.ints = read_fcidump(integrals);
  if (cfg.rotation) {
    if (!std::filesystem::exists(*cfg.rotation))
      throw ConfigError("rotation", "file not found: " + cfg.rotation->string());
    p.ints = rotate_orbitals(p.ints, read_matrix(*cfg.rotation));
  }
  p.part = cfg.partition.empty()
               ? Partition::single(p.ints)
               : field("partition", [&] {
                   return Partition::parse(cfg.partition, p.ints.n_orb, p.ints.n_elec, cfg.partition_electrons);
                 });
  p.hamiltonian = hamiltonian_to_pauli(p.ints, p.part);
  return p;
}

SpectrumResult solve_exact(const RunConfig& cfg, const Problem& prob) {
  std::optional<Sector> sector;
  if (cfg.exact_sector) sector = Sector{prob.ints.n_elec, prob.ints.ms2, cfg.exact_multiplicity};
  return exact_ground_state(prob.hamiltonian, sector);
}

QuantumState build_mrps(const RunConfig& cfg, const Problem& prob, std::vector<FragmentState>* records) {
  std::vector<FragmentProblem> frags;
  for (int f = 0; f < prob.part.n_fragments(); ++f) frags.push_back(embed_fragment(prob.ints, prob.part, f, cfg.embed));
  std::vector<FragmentState> states;
  if (cfg.fragment_solver == FragmentSolver::Exact) {
    for (const auto& fp : frags) {
      const PauliSum h = fragment_hamiltonian(fp);
      PauliSum target = h;
      if (cfg.number_penalty != 0.0) target += fragvqe::number_penalty(fp.n_qubits, fp.n_elec_frag, cfg.number_penalty);
      if (cfg.spin_penalty != 0.0) target += fragvqe::spin_penalty(fp.n_qubits, cfg.spin_penalty);
      SpectrumResult ex = exact_ground_state(target);
      FragmentState fs;
      fs.fragment_id = fp.fragment_id;
      fs.n_elec_frag = fp.n_elec_frag;
      ex.energy = expectation(ex.state, h);
      fs.energy = ex.energy;
      fs.best_energy = ex.energy;
      fs.median_energy = ex.energy;
      fs.state = std::move(ex.state);
      states.push_back(std::move(fs));
    }
  } else {
    states = fragment_vqe_all(frags, cfg.hea, cfg.optimizer, {cfg.number_penalty, cfg.spin_penalty}, cfg.jobs);
  }
  QuantumState mrps = assemble_mrps(states, prob.part);
  if (records) *records = std::move(states);
  return mrps;
}

namespace {

std::mutex g_log_mutex;

void append_log(const std::filesystem::path& out_dir, const std::string& line) {
  if (out_dir.empty()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::ofstream log(out_dir / "run.log", std::ios::app);
  const std::time_t now = std::time(nullptr);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%S", std::localtime(&now));
  log << ts << ' ' << line << '\n';
}

std::string fmt(double v, const char* f = "%.12f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

RunSummary run_method(const RunConfig& cfg, const Problem& prob, Method method,
                      const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  RunSummary s;
  s.tag = prob.tag;
  s.method = to_string(method);
  const std::string stem = prob.tag + "." + s.method;

  const SpectrumResult exact = solve_exact(cfg, prob);
  s.exact = exact.energy;
  const QuantumState hf = prepare_basis(hf_reference(prob.ints, prob.part));
  s.fidelity_hf = fidelity(hf, exact.state);
  s.entropy = shannon_entropy(natural_occupations(one_rdm(exact.state, prob.ints.n_orb, prob.part)));

  const bool needs_mrps = method != Method::Exact && method != Method::HfAdapt && method != Method::HfUccgsd;
  std::optional<QuantumState> mrps;
  std::vector<FragmentState> records;
  if (needs_mrps || prob.part.n_fragments() > 1) {
    mrps = build_mrps(cfg, prob, &records);
    s.fidelity_mrps = fidelity(*mrps, exact.state);
    if (!out_dir.empty() && cfg.fragment_solver == FragmentSolver::Vqe)
      for (const auto& fs : records) {
        std::ostringstream rec;
        write_fragment_record(rec, fs);
        write_atomic(out_dir / (prob.tag + ".fragment" + std::to_string(fs.fragment_id) + ".record"), rec.str());
      }
  }

  const Observable obs(prob.hamiltonian);
  switch (method) {
    case Method::Exact:
      s.energy = exact.energy;
      break;
    case Method::FragmentVqe:
    case Method::Mrps: {
      s.energy = expectation(*mrps, obs);
      for (const auto& fs : records) s.cnots += fs.cnots;
      break;
    }
    case Method::MrpsAdapt:
    case Method::HfAdapt: {
      const OperatorPool pool = build_pool(prob.part, prob.part.n_qubits(), cfg.pool);
      const AdaptResult r = adapt_vqe(prob.hamiltonian, method == Method::MrpsAdapt ? *mrps : hf, pool,
                                      cfg.adapt, cfg.optimizer);
      s.energy = r.final_energy;
      s.cnots = r.cnots;
      s.n_operators = r.n_operators;
      s.converged = r.converged;
      s.reason = r.reason;
      if (!out_dir.empty()) {
        std::ostringstream tr;
        write_trajectory(tr, r);
        write_atomic(out_dir / (stem + ".trajectory"), tr.str());
      }
      break;
    }
    case Method::MrpsUccgsd:
    case Method::HfUccgsd: {
      const AdaptResult r =
          uccgsd_vqe(prob.hamiltonian, method == Method::MrpsUccgsd ? *mrps : hf, prob.part, cfg.optimizer);
      s.energy = r.final_energy;
      s.cnots = r.cnots;
      s.n_operators = r.n_operators;
      s.converged = r.converged;
      s.reason = r.reason;
      if (!out_dir.empty()) {
        std::ostringstream tr;
        write_trajectory(tr, r);
        write_atomic(out_dir / (stem + ".trajectory"), tr.str());
      }
      break;
    }
  }
  s.error = s.energy - exact.energy;
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out_dir.empty()) {
    std::ostringstream sum;
    write_summary(sum, s);
    write_atomic(out_dir / (stem + ".result"), sum.str());
    append_log(out_dir, stem + " energy=" + fmt(s.energy) + " error=" + fmt(*s.error, "%.3e") +
                            " cnots=" + std::to_string(s.cnots) + " wall=" + fmt(s.wall_seconds, "%.3f") + "s");
  }
  return s;
}

// ============================================================================
// Result files
// ============================================================================

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "tag = " << s.tag << '\n';
  out << "method = " << s.method << '\n';
  out << "energy = " << fmt(s.energy) << '\n';
  if (s.exact) out << "exact_energy = " << fmt(*s.exact) << '\n';
  if (s.error) out << "error = " << fmt(*s.error, "%.6e") << '\n';
  out << "cnots = " << s.cnots << '\n';
  out << "n_operators = " << s.n_operators << '\n';
  out << "converged = " << (s.converged ? "true" : "false") << '\n';
  if (!s.reason.empty()) out << "reason = " << s.reason << '\n';
  out << "fidelity_hf = " << fmt(s.fidelity_hf, "%.10f") << '\n';
  out << "fidelity_mrps = " << fmt(s.fidelity_mrps, "%.10f") << '\n';
  out << "entropy = " << fmt(s.entropy, "%.10f") << '\n';
}

RunSummary read_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open result file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path.string() + ": expected 'key = value'", lineno);
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw SchemaError(path.string() + ": missing '" + k + "'");
    return it->second;
  };
  auto number = [&](const std::string& k, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0') throw ParseError(path.string() + ": '" + k + "' is not a number", 0);
    return d;
  };
  RunSummary s;
  s.tag = need("tag");
  s.method = need("method");
  s.energy = number("energy", need("energy"));
  if (kv.count("exact_energy")) s.exact = number("exact_energy", kv["exact_energy"]);
  if (kv.count("error")) s.error = number("error", kv["error"]);
  if (kv.count("cnots")) s.cnots = static_cast<int>(number("cnots", kv["cnots"]));
  if (kv.count("n_operators")) s.n_operators = static_cast<int>(number("n_operators", kv["n_operators"]));
  if (kv.count("converged")) s.converged = kv["converged"] == "true";
  if (kv.count("reason")) s.reason = kv["reason"];
  if (kv.count("fidelity_hf")) s.fidelity_hf = number("fidelity_hf", kv["fidelity_hf"]);
  if (kv.count("fidelity_mrps")) s.fidelity_mrps = number("fidelity_mrps", kv["fidelity_mrps"]);
  if (kv.count("entropy")) s.entropy = number("entropy", kv["entropy"]);
  return s;
}

// ============================================================================
// Scan
// ============================================================================

std::vector<RunSummary> run_scan(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  if (cfg.scan_integrals.empty()) throw ConfigError("scan.integrals", "required field is missing");
  std::vector<Problem> probs;
  for (const auto& p : cfg.scan_integrals) probs.push_back(load_problem(cfg, p));

  std::vector<RunSummary> rows(probs.size());
  RunConfig inner = cfg;
  inner.jobs = 1;
  std::size_t next = 0;
  while (next < probs.size()) {
    std::vector<std::pair<std::size_t, std::future<RunSummary>>> batch;
    for (int j = 0; j < cfg.jobs && next < probs.size(); ++j, ++next)
      batch.emplace_back(next, std::async(cfg.jobs > 1 ? std::launch::async : std::launch::deferred,
                                          [&, i = next] { return run_method(inner, probs[i], cfg.scan_method, out_dir); }));
    for (auto& [i, f] : batch) rows[i] = f.get();
  }
  if (!out_dir.empty()) {
    std::ostringstream csv;
    write_scan_csv(csv, rows);
    write_atomic(out_dir / "scan.csv", csv.str());
  }
  return rows;
}

void write_scan_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << "geometry_tag,E_method,E_exact,error,fidelity_HF,fidelity_MRPS,entropy,cumulative_cnots\n";
  std::vector<double> errors;
  for (const auto& r : rows) {
    out << r.tag << ',' << fmt(r.energy) << ',' << (r.exact ? fmt(*r.exact) : "") << ','
        << (r.error ? fmt(*r.error, "%.6e") : "") << ',' << fmt(r.fidelity_hf, "%.8f") << ','
        << fmt(r.fidelity_mrps, "%.8f") << ',' << fmt(r.entropy, "%.8f") << ',' << r.cnots << '\n';
    if (r.error) errors.push_back(*r.error);
  }
  if (errors.size() >= 2) out << "# npe = " << fmt(npe(errors), "%.6e") << '\n';
}

// ============================================================================
// Report
// ============================================================================

void write_report(std::ostream& out, const std::vector<RunSummary>& rows) {
  if (rows.empty()) throw ValidationError("report needs at least one result");
  out << "# hartree_to_kcal_per_mol = " << fmt(kKcalPerHartree, "%.6f") << '\n';
  std::size_t w = 3;
  for (const auto& r : rows) w = std::max(w, r.tag.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %-12s  %18s  %18s  %12s  %8s\n", static_cast<int>(w), "tag", "method",
                "energy", "exact", "error", "cnots");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-12s  %18.9f  %18s  %12s  %8d\n", static_cast<int>(w), r.tag.c_str(),
                  r.method.c_str(), r.energy, r.exact ? fmt(*r.exact, "%.9f").c_str() : "-",
                  r.error ? fmt(*r.error, "%.3e").c_str() : "-", r.cnots);
    out << buf;
  }
  if (rows.size() < 2) return;
  out << "\nbarriers (kcal/mol, row j minus row i)\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const double b = (rows[j].energy - rows[i].energy) * kKcalPerHartree;
      std::snprintf(buf, sizeof buf, "%s -> %s  %.2f\n", rows[i].tag.c_str(), rows[j].tag.c_str(), b);
      out << buf;
    }
}

}  // namespace fragvqe
