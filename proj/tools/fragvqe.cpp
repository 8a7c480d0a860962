// Copyright 2026 The fragvqe Authors
// SPDX-License-Identifier: Apache-2.0

#include "fragvqe/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace fragvqe;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;

struct Flags {
  std::string config;
  std::optional<long long> seed;
  std::string out;
  std::optional<int> jobs;
};

RunConfig make_config(const Flags& f) {
  Config c;
  if (!f.config.empty()) c = Config::load(f.config);
  c.apply_env();
  if (f.seed) c.set("optimizer.seed", std::to_string(*f.seed));
  if (!f.out.empty()) c.set("output.dir", f.out);
  if (f.jobs) c.set("run.jobs", std::to_string(*f.jobs));
  return RunConfig::from_config(c);
}

Method reference_method(const Config& c, Method mrps, Method hf) {
  const std::string ref = c.str("reference", "mrps");
  if (ref == "mrps") return mrps;
  if (ref == "hf") return hf;
  throw ConfigError("reference", "expected mrps or hf, got '" + ref + "'");
}

void print_summary(const RunSummary& s) {
  std::printf("%s %s energy=%.12f", s.tag.c_str(), s.method.c_str(), s.energy);
  if (s.exact) std::printf(" exact=%.12f error=%.3e", *s.exact, *s.error);
  std::printf(" cnots=%d wall=%.2fs%s\n", s.cnots, s.wall_seconds, s.converged ? "" : " NOT-CONVERGED");
}

int run_single(const Flags& f, const std::string& sub) {
  Config c;
  if (!f.config.empty()) c = Config::load(f.config);
  c.apply_env();
  const RunConfig cfg = make_config(f);
  Method m = Method::Exact;
  if (sub == "fragment-vqe") m = Method::FragmentVqe;
  if (sub == "mrps") m = Method::Mrps;
  if (sub == "adapt") m = reference_method(c, Method::MrpsAdapt, Method::HfAdapt);
  if (sub == "uccgsd") m = reference_method(c, Method::MrpsUccgsd, Method::HfUccgsd);
  const Problem prob = load_problem(cfg, cfg.integrals);
  const RunSummary s = run_method(cfg, prob, m, cfg.out_dir);
  print_summary(s);
  return s.converged ? 0 : kExitNotConverged;
}

int run_scan_cmd(const Flags& f) {
  const RunConfig cfg = make_config(f);
  const auto rows = run_scan(cfg, cfg.out_dir);
  std::ostringstream csv;
  write_scan_csv(csv, rows);
  std::cout << csv.str();
  for (const auto& r : rows)
    if (!r.converged) return kExitNotConverged;
  return 0;
}

int run_report(const std::vector<std::string>& files, const std::string& out) {
  std::vector<RunSummary> rows;
  for (const auto& p : files) rows.push_back(read_summary(p));
  std::ostringstream rep;
  write_report(rep, rows);
  std::cout << rep.str();
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    write_atomic(std::filesystem::path(out) / "report.txt", rep.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fragment-embedded VQE pipeline"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::string> report_files;
  const char* names[] = {"fragment-vqe", "mrps", "adapt", "uccgsd", "exact", "scan", "report"};
  const char* help[] = {"optimize each embedded fragment with the HEA",
                        "assemble the multireference product state",
                        "ADAPT-VQE from the configured reference",
                        "fixed-order UCCGSD from the configured reference",
                        "exact diagonalization",
                        "potential energy scan over several integral files",
                        "tabulate result files with barriers"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 7; ++i) {
    CLI::App* s = app.add_subcommand(names[i], help[i]);
    if (std::string(names[i]) == "report") {
      s->add_option("files", report_files, "result files")->required();
    } else {
      s->add_option("--config", flags.config, "configuration file")->check(CLI::ExistingFile);
      s->add_option("--seed", flags.seed, "base random seed");
      s->add_option("--jobs", flags.jobs, "concurrent workers")->check(CLI::PositiveNumber);
    }
    s->add_option("--out", flags.out, "output directory");
    subs.push_back(s);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "report") return run_report(report_files, flags.out);
    if (sub == "scan") return run_scan_cmd(flags);
    return run_single(flags, sub);
  } catch (const ConfigError& e) {
    std::cerr << "fragvqe: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fragvqe: " << e.what() << '\n';
    return kExitFailure;
  }
}
