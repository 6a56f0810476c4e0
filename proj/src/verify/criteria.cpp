#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "kgt/errors.hpp"
#include "kgt/kam.hpp"
#include "kgt/resonance.hpp"
#include "kgt/serialize.hpp"
#include "kgt/verify.hpp"

namespace kgt::verify {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

Hamiltonian single(const HamiltonianMeta& meta, const Monomial& m) { return canonicalize({m}, meta); }

// Monomial that depends on z (pure I(0) powers bracket to zero with everything).
Monomial random_dynamic(CounterRng& rng, const HamiltonianMeta& meta, int max_degree) {
  for (;;) {
    Monomial m = random_monomial(rng, meta, max_degree);
    if (!m.k.empty() || !m.kprime.empty() || !m.b.empty()) return m;
  }
}

// --- 1 ---------------------------------------------------------------------

CheckResult homological_residual() {
  CheckResult r{1, "homological residual", true, "", 0.0};
  auto t0 = clock_type::now();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    ModelParams p;
    p.c = i % 2 ? 10.0 : 1.0;
    p.n_max = 4;
    p.d_max = 8;
    p.eps = 1e-3;
    p.V = draw_potential(p.n_max, 1000 + i);
    CounterRng rng(i, streams::kFixtures);
    HamiltonianMeta meta = p.meta();
    Hamiltonian R = build_hamiltonian(p).R + random_hamiltonian(rng, meta, 40, 8);
    ModeVector<double> lambda = frequencies(p);
    Hamiltonian r0 = R.part(TermClass::kR0), r1 = R.part(TermClass::kR1);
    HomologicalResult hom = solve_homological(lambda, r0, r1, 0.0);
    Hamiltonian lhs = poisson_bracket(normal_form(meta, lambda), hom.F);
    Hamiltonian target = (hom.r0_res - r0) + (hom.r1_res - r1);
    worst = std::max(worst, max_relative_difference(lhs, target));
  }
  r.seconds = seconds_since(t0);
  r.pass = worst <= 1e-12 && r.seconds < 10.0;
  r.detail = "max per-term relative residual " + fmt(worst) + " over 50 fixtures";
  return r;
}

// --- 2 ---------------------------------------------------------------------

CheckResult bracket_algebra() {
  CheckResult r{2, "bracket algebra", true, "", 0.0};
  auto t0 = clock_type::now();
  HamiltonianMeta meta{3.0, 1.5, 1.0, 2, 8};  // few modes, so most triples interact
  CounterRng rng(2, streams::kFixtures);
  double anti = 0.0, jacobi = 0.0, oracle = 0.0;
  int nonzero = 0, nonzero_jacobi = 0;
  for (int i = 0; i < 1000; ++i) {
    Hamiltonian a = single(meta, random_dynamic(rng, meta, 4));
    Hamiltonian b = single(meta, random_dynamic(rng, meta, 4));
    Hamiltonian c = single(meta, random_dynamic(rng, meta, 4));
    Hamiltonian ab = poisson_bracket(a, b), ba = poisson_bracket(b, a);
    nonzero += !ab.empty();
    anti = std::max(anti, max_abs_coefficient(ab + ba));
    Hamiltonian jac = poisson_bracket(ab, c) + poisson_bracket(poisson_bracket(b, c), a) +
                      poisson_bracket(poisson_bracket(c, a), b);
    jacobi = std::max(jacobi, max_abs_coefficient(jac));
    nonzero_jacobi += !poisson_bracket(ab, c).empty();
    oracle = std::max(oracle, max_relative_difference(ab, oracle_bracket(a, b)));
  }
  r.seconds = seconds_since(t0);
  r.pass = anti <= 1e-10 && jacobi <= 1e-10 && oracle <= 1e-12 && r.seconds < 30.0;
  r.detail = "antisymmetry " + fmt(anti) + ", Jacobi " + fmt(jacobi) + ", oracle relative " + fmt(oracle) +
             " over 1000 triples (" + std::to_string(nonzero) + " nonzero {A,B}, " +
             std::to_string(nonzero_jacobi) + " nonzero {{A,B},C})";
  return r;
}

// --- 3 ---------------------------------------------------------------------

std::int64_t random_mode(CounterRng& rng) {
  // mixes the flat region |n| <= 1024 with modes up to 1e6
  double u = rng.uniform();
  std::int64_t mag = u < 0.4 ? rng.integer(0, 2000) : static_cast<std::int64_t>(std::exp(rng.uniform(0.0, std::log(1e6))));
  return rng.uniform() < 0.5 ? -mag : mag;
}

CheckResult norm_lemmas() {
  CheckResult r{3, "norm lemmas at truncation", true, "", 0.0};
  auto t0 = clock_type::now();
  int rearr_bad = 0, bracket_bad = 0, equiv_bad = 0, claim_bad = 0;
  double min_gap = std::numeric_limits<double>::infinity();

  CounterRng rng(3, streams::kFixtures);
  for (double sigma : {2.1, 2.5, 3.0}) {
    for (int t = 0; t < 10000; ++t) {
      std::map<std::int64_t, int> mult;
      std::int64_t mom = 0;
      int entries = rng.integer(1, 7);
      for (int e = 0; e < entries; ++e) {
        std::int64_t n = random_mode(rng);
        int kind = rng.integer(0, 2);  // a, k, k'
        if (kind == 0) {
          mult[n] += 2;
        } else {
          mult[n] += 1;
          mom += kind == 1 ? n : -n;
        }
      }
      if (mom != 0) mult[mom] += 1;  // a zbar_mom factor restores zero momentum
      std::vector<std::pair<std::int64_t, int>> ms(mult.begin(), mult.end());
      double gap = rearrangement_gap(ms, sigma);
      double scale = 1e-12 * weight(1000000, sigma) * 16;
      min_gap = std::min(min_gap, gap);
      if (gap < -scale) ++rearr_bad;
    }
  }

  HamiltonianMeta meta{3.0, 1.5, 1.0, 4, 8};
  const double rho_cap = 3.0 - 2.0 * std::numbers::sqrt2;
  for (int t = 0; t < 100; ++t) {
    meta.c = t % 2 ? 1.0 : 5.0;
    NormContext base = NormContext::from(meta, 0.0);
    Hamiltonian r1 = expand_J(random_hamiltonian(rng, meta, 6, 4));
    Hamiltonian r2 = expand_J(random_hamiltonian(rng, meta, 6, 4));
    double rho = rng.uniform(0.004, 0.05);
    double cap = std::min(rho / 4.0, rho_cap);
    double d1 = rng.uniform(0.05, 1.0) * cap, d2 = rng.uniform(0.05, 1.0) * cap;
    auto at = [&](double x) {
      NormContext c = base;
      c.rho = x;
      return c;
    };
    double lhs = norm_plus(expand_J(poisson_bracket(r1, r2)), at(rho));
    double n1 = norm_plus(r1, at(rho - d1)), n2 = norm_plus(r2, at(rho - d2));
    if (lhs > 0.0 && std::log(lhs) > -std::log(d1) + log_bracket_constant(d2, meta.sigma) + std::log(n1) + std::log(n2))
      ++bracket_bad;

    Hamiltonian h = random_hamiltonian(rng, meta, 8, 6);
    Hamiltonian hp = expand_J(h);
    double delta = rng.uniform(0.05, 0.95) * rho;
    double a = norm(h, at(rho)), b = norm_plus(hp, at(rho - delta));
    if (a > 0.0 && std::log(a) > log_equivalence_constant(delta, meta.sigma) + std::log(b)) ++equiv_bad;
    double c = norm_plus(hp, at(rho)), d = norm(h, at(rho - delta));
    if (c > 64.0 / (std::exp(2.0) * delta * delta) * d) ++equiv_bad;
  }

  for (double sigma : {2.1, 2.5, 3.0})
    for (double delta : {1e-4, 1e-3, 1e-2, 0.1})
      for (int nm : {2, 4, 15})
        for (int dm : {4, 8, 16})
          if (log_amplitude_sum(nm, dm, delta, sigma) > log_amplitude_sum_bound(delta, sigma)) ++claim_bad;

  r.seconds = seconds_since(t0);
  r.pass = rearr_bad == 0 && bracket_bad == 0 && equiv_bad == 0 && claim_bad == 0;
  r.detail = "rearrangement violations " + std::to_string(rearr_bad) + "/30000 (min gap " + fmt(min_gap) +
             "), bracket bound " + std::to_string(bracket_bad) + "/100, equivalence " + std::to_string(equiv_bad) +
             "/200, amplitude sum " + std::to_string(claim_bad) + "/108";
  return r;
}

// --- 4, 5, 6, 8 share the KAM fixture -------------------------------------

struct FixtureRun {
  std::uint64_t seed = 0;
  bool completed = false;
  std::string error_kind;
  std::string error;
  KamReport report;
};

ModelParams kam_fixture(std::uint64_t seed) {
  ModelParams p;
  p.c = 1.0;
  p.eps = 1e-6;
  p.sigma = 3.0;
  p.r = 1.5;
  p.n_max = 3;
  p.d_max = 8;
  p.V = draw_potential(p.n_max, seed);
  return p;
}

std::vector<FixtureRun> run_fixture(const Observer& observer = {}) {
  std::vector<FixtureRun> runs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FixtureRun fr;
    fr.seed = seed;
    KamOptions opts;
    opts.seed = seed;
    opts.observer = observer;
    try {
      fr.report = run_kam(kam_fixture(seed), 1e-3, 3, opts);
      fr.completed = true;
    } catch (const StepError& e) {
      fr.error_kind = e.kind();
      fr.error = e.what();
    }
    runs.push_back(std::move(fr));
  }
  return runs;
}

CheckResult kam_decay() {
  CheckResult r{4, "KAM decay", true, "", 0.0};
  auto t0 = clock_type::now();
  auto runs = run_fixture();
  int completed = 0, small = 0, other = 0, slow = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& fr : runs) {
    if (!fr.completed) {
      (fr.error_kind == "SmallDivisor" ? small : other) += 1;
      continue;
    }
    ++completed;
    bool ok = true;
    for (double e : fr.report.decay_exponents) {
      worst = std::min(worst, e);
      if (!(e >= 1.3)) ok = false;
    }
    if (!ok) ++slow;
  }
  r.seconds = seconds_since(t0);
  r.pass = completed >= 18 && slow == 0 && r.seconds < 300.0;
  r.detail = std::to_string(completed) + "/20 runs completed (" + std::to_string(small) + " SmallDivisor, " +
             std::to_string(other) + " other), " + std::to_string(slow) +
             " with an exponent below 1.3, smallest exponent " + fmt(worst);
  return r;
}

CheckResult frequency_control() {
  CheckResult r{5, "frequency control", true, "", 0.0};
  auto t0 = clock_type::now();
  auto runs = run_fixture();
  int violations = 0, checked = 0;
  double worst_ratio = 0.0;
  for (const auto& fr : runs) {
    if (!fr.completed) continue;
    const KamReport& rep = fr.report;
    for (const auto& e : rep.trace) {
      if (!e.has_step) continue;
      double root = std::sqrt(e.eps);
      checked += 3;
      if (e.shift_inf > root) ++violations;
      if (e.vstar_delta_inf > 2.0 * root) ++violations;
      if (!e.shift_bound_ok) ++violations;
      worst_ratio = std::max(worst_ratio, e.shift_inf / root);
    }
    ++checked;
    if (max_abs_diff(rep.vstar.back(), rep.target) > std::pow(rep.eps0, 0.4)) ++violations;
  }
  r.seconds = seconds_since(t0);
  r.pass = violations == 0 && checked > 0;
  r.detail = std::to_string(violations) + " violations in " + std::to_string(checked) +
             " checks, largest ||V~_{s+1}-V~_s|| / eps_s^0.5 = " + fmt(worst_ratio);
  return r;
}

CheckResult torus_residual() {
  CheckResult r{6, "torus residual", true, "", 0.0};
  auto t0 = clock_type::now();
  auto runs = run_fixture();
  int bad = 0, completed = 0;
  double worst = 0.0;
  for (const auto& fr : runs) {
    if (!fr.completed) continue;
    ++completed;
    double ratio = fr.report.torus_residual / (10.0 * fr.report.eps0);
    worst = std::max(worst, fr.report.torus_residual);
    if (ratio > 1.0) ++bad;
  }
  ModelParams p = kam_fixture(0);
  p.eps = 0.0;
  KamReport zero = run_kam(p, 1e-3, 3);
  r.seconds = seconds_since(t0);
  r.pass = bad == 0 && completed > 0 && zero.torus_residual <= 1e-14;
  r.detail = std::to_string(bad) + "/" + std::to_string(completed) + " runs above 10 eps0 (largest residual " +
             fmt(worst) + "), eps=0 residual " + fmt(zero.torus_residual);
  return r;
}

// --- 7 ---------------------------------------------------------------------

CheckResult measure_scaling() {
  CheckResult r{7, "measure scaling", true, "", 0.0};
  auto t0 = clock_type::now();
  EllBudget budget;
  budget.max_support = 3;
  budget.max_height = 3;
  budget.max_n3star = 8;
  std::vector<double> lg, lf;
  bool stderr_ok = true, all_positive = true;
  std::string fractions;
  for (double gamma : {1e-6, 1e-9, 1e-12}) {
    MeasureEstimate est = estimate_resonant_measure(1.0, gamma, budget, 10000, 7);
    if (!(est.stderr_ < 0.2 * est.fraction || est.fraction < 1e-3)) stderr_ok = false;
    if (est.fraction <= 0.0) all_positive = false;
    lg.push_back(std::log(gamma));
    lf.push_back(std::log(est.fraction));
    fractions += (fractions.empty() ? "" : ", ") + fmt(est.fraction) + "+-" + fmt(est.stderr_);
  }
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (all_positive) {
    double mx = (lg[0] + lg[1] + lg[2]) / 3, my = (lf[0] + lf[1] + lf[2]) / 3, sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (lg[i] - mx) * (lf[i] - my);
      sxx += (lg[i] - mx) * (lg[i] - mx);
    }
    slope = sxy / sxx;
  }
  r.seconds = seconds_since(t0);
  r.pass = all_positive && slope >= 0.2 && slope <= 0.5 && stderr_ok && r.seconds < 600.0;
  r.detail = "fractions at gamma 1e-6,1e-9,1e-12: " + fractions +
             (all_positive ? "; slope " + fmt(slope) : "; slope undefined (a fraction is zero)");
  return r;
}

// --- 8 ---------------------------------------------------------------------

std::size_t momentum_violations(const Hamiltonian& h) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    Monomial m = h.monomial(i);
    if (momentum(m.k, m.kprime) != 0) ++bad;
  }
  return bad;
}

CheckResult structural() {
  CheckResult r{8, "structural guarantees", true, "", 0.0};
  auto t0 = clock_type::now();
  std::size_t scanned = 0, bad_momentum = 0;
  auto scan = [&](const std::string&, const Hamiltonian& h) {
    scanned += h.size();
    bad_momentum += momentum_violations(h);
  };
  auto runs = run_fixture(scan);
  std::size_t mirror = 0, indices = 0;
  for (const auto& fr : runs) {
    if (!fr.completed) continue;
    for (const auto& ell : fr.report.divisor_indices) {
      ++indices;
      if (is_mirror_pair(ell)) ++mirror;
    }
  }
  for (int n_max = 1; n_max <= 4; ++n_max) {
    ModelParams p = kam_fixture(100 + n_max);
    p.n_max = n_max;
    p.V = draw_potential(n_max, 100 + n_max);
    scan("build", build_hamiltonian(p).R);
  }

  CounterRng rng(8, streams::kFixtures);
  int round_trip_bad = 0;
  for (int i = 0; i < 100; ++i) {
    HamiltonianMeta meta{rng.uniform(2.05, 3.0), rng.uniform(1.1, 2.0), rng.uniform(1.0, 10.0), rng.integer(1, 6),
                         8};
    Hamiltonian h = random_hamiltonian(rng, meta, rng.integer(0, 30), 8);
    if (i % 3 == 0) h = expand_J(h);
    scan("random", h);
    std::string first = serialize(h);
    Hamiltonian back = parse_hamiltonian(first);
    bool same_terms = back.size() == h.size();
    for (std::size_t j = 0; same_terms && j < h.size(); ++j)
      same_terms = back.terms()[j].key == h.terms()[j].key && back.terms()[j].coeff == h.terms()[j].coeff;
    if (serialize(back) != first || !same_terms) ++round_trip_bad;
  }
  r.seconds = seconds_since(t0);
  r.pass = bad_momentum == 0 && mirror == 0 && round_trip_bad == 0 && scanned > 0;
  r.detail = std::to_string(bad_momentum) + " momentum violations in " + std::to_string(scanned) +
             " scanned terms, " + std::to_string(mirror) + " mirror-pair divisors among " + std::to_string(indices) +
             " indices, " + std::to_string(round_trip_bad) + "/100 round-trip mismatches";
  return r;
}

}  // namespace

CheckResult run_criterion(int id) {
  static const std::function<CheckResult()> table[] = {homological_residual, bracket_algebra, norm_lemmas,
                                                       kam_decay,            frequency_control, torus_residual,
                                                       measure_scaling,      structural};
  if (id < 1 || id > kCriteria) throw ValidationError("criterion must lie in [1, 8]");
  try {
    return table[id - 1]();
  } catch (const std::exception& e) {
    CheckResult r{id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
    return r;
  }
}

}  // namespace kgt::verify
