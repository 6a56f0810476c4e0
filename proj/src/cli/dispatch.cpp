#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "kgt/cli.hpp"
#include "kgt/errors.hpp"
#include "kgt/kam.hpp"
#include "kgt/resonance.hpp"
#include "kgt/serialize.hpp"
#include "kgt/verify.hpp"
#include "report.hpp"

namespace kgt::cli {

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

struct BuildArgs {
  std::string config, out = "-", part = "R";
};

int run_build(const BuildArgs& a) {
  RunConfig cfg = parse_config(a.config);
  ModelHamiltonian mh = build_hamiltonian(cfg.model);
  Hamiltonian h = a.part == "N" ? mh.N : a.part == "H" ? mh.N + mh.R : mh.R;
  write_text(a.out, serialize(h));
  return 0;
}

struct NormArgs {
  std::string in;
  double rho = 0.01;
  bool json = false;
};

int run_norm(const NormArgs& a) {
  Hamiltonian h = read_hamiltonian(a.in);
  NormContext ctx = NormContext::from(h.meta(), a.rho);
  ctx.validate();
  double n = norm(h, ctx);
  double np = norm_plus(h.form() == Form::kExpanded ? h : expand_J(h), ctx);
  if (a.json) {
    nlohmann::json j{{"norm", n}, {"norm_plus", np}, {"rho", a.rho}, {"terms", h.size()}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "terms      " << h.size() << "\nrho        " << format_double(a.rho) << "\nnorm       "
              << format_double(n) << "\nnorm_plus  " << format_double(np) << '\n';
  }
  return 0;
}

struct KamArgs {
  std::string config, out = "-", csv;
  double gamma = -1.0;
  int steps = -1;
};

int run_kam_cmd(const KamArgs& a) {
  RunConfig cfg = parse_config(a.config);
  if (a.gamma > 0.0) cfg.gamma = a.gamma;
  if (a.steps > 0) cfg.steps = a.steps;
  KamOptions opts;
  opts.seed = cfg.seed;
  KamReport rep;
  int code = 0;
  nlohmann::json j;
  try {
    rep = run_kam(cfg.model, cfg.gamma, cfg.steps, opts);
    j = kam_report_json(rep);
  } catch (const StepError& e) {
    j["status"] = "failed";
    j["error"] = {{"kind", e.kind()}, {"step", e.step()}, {"message", e.what()}};
    code = 1;
  }
  j["config"] = config_object(cfg);
  write_text(a.out, j.dump(2) + "\n");
  if (!a.csv.empty() && code == 0) write_text(a.csv, kam_trace_csv(rep));
  if (code) std::cerr << "kam-run: " << j["error"]["message"].get<std::string>() << '\n';
  return code;
}

struct ResonanceArgs {
  double c = 1.0, gamma = 1e-3;
  long samples = 10000;
  int support = 3, height = 3, n3max = 8;
  std::uint64_t seed = 0;
  std::string out = "-";
};

int run_resonance(const ResonanceArgs& a, int threads) {
  EllBudget budget;
  budget.max_support = a.support;
  budget.max_height = a.height;
  budget.max_n3star = a.n3max;
  MeasureEstimate est = estimate_resonant_measure(a.c, a.gamma, budget, a.samples, a.seed, threads);
  write_text(a.out, measure_json(est, budget, a.samples, a.seed).dump(2) + "\n");
  return 0;
}

int run_verify(int only) {
  bool all = true;
  std::printf("%-3s %-28s %-6s %8s  %s\n", "id", "check", "result", "seconds", "detail");
  for (int id = 1; id <= verify::kCriteria; ++id) {
    if (only && id != only) continue;
    verify::CheckResult r = verify::run_criterion(id);
    std::printf("%-3d %-28s %-6s %8.1f  %s\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"KAM normal forms for the truncated nonlinear Klein-Gordon equation"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Cap on worker threads")->check(CLI::PositiveNumber);

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "Build the truncated Hamiltonian from a model config");
  build->add_option("--config", ba.config, "Model config (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--out", ba.out, "Output Hamiltonian file, - for stdout");
  build->add_option("--part", ba.part, "R (perturbation), N (normal form) or H (both)")
      ->check(CLI::IsMember({"R", "N", "H"}));

  NormArgs na;
  auto* normc = app.add_subcommand("norm", "Print both weighted norms of a Hamiltonian file");
  normc->add_option("--in", na.in, "Hamiltonian file")->required()->check(CLI::ExistingFile);
  normc->add_option("--rho", na.rho, "Weight parameter rho > 0");
  normc->add_flag("--json", na.json, "Print JSON");

  KamArgs ka;
  auto* kam = app.add_subcommand("kam-run", "Run the KAM iteration and write a report");
  kam->add_option("--config", ka.config, "Model config (JSON)")->required()->check(CLI::ExistingFile);
  kam->add_option("--gamma", ka.gamma, "Nonresonance constant (overrides config)");
  kam->add_option("--steps", ka.steps, "Number of steps (overrides config)");
  kam->add_option("--out", ka.out, "Report JSON, - for stdout");
  kam->add_option("--csv", ka.csv, "Per-step trace as CSV");

  ResonanceArgs ra;
  auto* res = app.add_subcommand("resonance", "Estimate the resonant fraction of frequency space");
  res->add_option("--c", ra.c, "Speed of light c >= 1");
  res->add_option("--gamma", ra.gamma, "Tolerance gamma");
  res->add_option("--samples", ra.samples, "Number of frequency samples (>= 100)");
  res->add_option("--support", ra.support, "Maximum support size of ell");
  res->add_option("--height", ra.height, "Maximum |ell_n|");
  res->add_option("--n3max", ra.n3max, "Maximum n_3^*(ell)");
  res->add_option("--seed", ra.seed, "Sampling seed");
  res->add_option("--out", ra.out, "Output JSON, - for stdout");

  int only = 0;
  auto* ver = app.add_subcommand("verify", "Run the property and acceptance suite");
  ver->add_option("--criterion", only, "Run a single criterion (1-8)")->check(CLI::Range(1, verify::kCriteria));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*build) return run_build(ba);
    if (*normc) return run_norm(na);
    if (*kam) return run_kam_cmd(ka);
    if (*res) return run_resonance(ra, threads);
    if (*ver) return run_verify(only);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace kgt::cli
