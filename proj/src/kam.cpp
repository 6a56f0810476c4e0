#include "kgt/kam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kgt/errors.hpp"
#include "kgt/random.hpp"

namespace kgt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_shift_term(const Monomial& m, const Amplitudes& i0) {
  double lg = 0.0;
  for (const auto& [n, a] : m.a) lg += a * i0.log_value(n);
  return lg;
}

int single_mode(const ExponentMap& b) { return b.entries().front().first; }

}  // namespace

Schedule schedule_params(int s, double eps0) {
  if (s < 0) throw ValidationError("step index must be nonnegative");
  if (!(eps0 >= 0.0 && eps0 < 1.0)) throw ValidationError("eps0 must lie in [0, 1)");
  Schedule sc;
  sc.eps0 = eps0;
  sc.rho = kRho0;
  sc.eta = std::pow(eps0, 0.01);
  sc.d = 0.0;
  for (int j = 0;; ++j) {
    double lj = std::log(j + 4.0);
    sc.s = j;
    sc.delta = kRho0 / ((j + 4.0) * lj * lj);
    sc.eps = std::pow(eps0, std::pow(1.5, j));
    sc.lambda = std::pow(sc.eps, 0.01);
    if (j == s) break;
    sc.rho += 3.0 * sc.delta;
    sc.eta = sc.lambda * sc.eta / 20.0;
    sc.d += 1.0 / (std::numbers::pi * std::numbers::pi * (j + 1.0) * (j + 1.0));
  }
  return sc;
}

double divisor_floor(double gamma, const Schedule& sc) { return gamma * std::pow(sc.eps, 0.01); }

HomologicalResult solve_homological(const ModeVector<double>& lambda, const Hamiltonian& r0,
                                    const Hamiltonian& r1, double floor) {
  const HamiltonianMeta& meta = r0.meta();
  TermAccumulator f(meta, Form::kReduced), res0(meta, Form::kReduced), res1(meta, Form::kReduced);
  HomologicalResult out;
  out.min_divisor = kInf;
  auto solve = [&](const Hamiltonian& part, TermAccumulator& resonant) {
    for (std::size_t i = 0; i < part.size(); ++i) {
      const Term& t = part.terms()[i];
      Monomial m = part.monomial(i);
      if (m.k.empty() && m.kprime.empty()) {
        resonant.add(t.key, t.coeff);
        continue;
      }
      std::vector<IntegerVector::Entry> e;
      for (const auto& [n, v] : m.k) e.push_back({n, v});
      for (const auto& [n, v] : m.kprime) e.push_back({n, -v});
      IntegerVector ell(std::move(e));
      double div = 0.0;
      for (const auto& [n, v] : ell.entries()) div += v * lambda[n];
      bool low_order_ok = ell.norm1() <= 2 && std::abs(div) >= 1.0;
      if (!low_order_ok && !(std::abs(div) >= floor)) throw SmallDivisor(ell.entries(), div, floor);
      out.divisors.emplace(ell, div);
      out.min_divisor = std::min(out.min_divisor, std::abs(div));
      // {N, m} = i div m, so i R / div cancels R.
      f.add(t.key, cplx(0.0, 1.0) * t.coeff / div);
    }
  };
  solve(r0, res0);
  solve(r1, res1);
  out.F = f.finish();
  out.r0_res = res0.finish();
  out.r1_res = res1.finish();
  return out;
}

HomologicalResult solve_homological(const Hamiltonian& n, const Hamiltonian& r0, const Hamiltonian& r1,
                                    double floor) {
  return solve_homological(normal_form_frequencies(n), r0, r1, floor);
}

ModeVector<double> frequency_shift(const Hamiltonian& r1_res, const Amplitudes& i0) {
  ModeVector<double> shift(r1_res.meta().n_max, 0.0);
  for (const auto& m : r1_res.monomials()) {
    if (!m.k.empty() || !m.kprime.empty() || m.b.total() != 1)
      throw RepresentationError("frequency shift expects k = k' = 0 and |b| = 1");
    shift[single_mode(m.b)] += m.coeff.real() * std::exp(log_shift_term(m, i0));
  }
  return shift;
}

bool shift_vanishes(const Hamiltonian& r1_res, const Amplitudes& i0) {
  for (const auto& m : r1_res.monomials())
    if (m.coeff != cplx{} && std::exp(log_shift_term(m, i0)) != 0.0) return false;
  return true;
}

ModeVector<double> shift_bound(const Hamiltonian& r1_res, const Amplitudes& i0, const NormContext& ctx) {
  const int nm = r1_res.meta().n_max;
  ModeVector<double> k(nm, 0.0);
  for (const auto& m : r1_res.monomials()) {
    int n = single_mode(m.b);
    // |R I^a| <= ||R1|| (c/sqrt(c^2+n^2)) * exp(-logw) <n/c> I^a
    double lw = log_term_weight(m, ctx);
    double bracket_n = 0.5 * std::log1p(double(n) * n / (ctx.c * ctx.c));
    k[n] += std::exp(-lw + bracket_n + log_shift_term(m, i0));
  }
  double r1 = norm(r1_res, ctx);
  ModeVector<double> bound(nm, 0.0);
  for (int n = -nm; n <= nm; ++n) bound[n] = ctx.c / std::sqrt(ctx.c * ctx.c + double(n) * n) * k[n] * r1;
  return bound;
}

Matrix finite_difference_jacobian(const VectorMap& f, const ModeVector<double>& at, double step) {
  const int nm = at.nmax();
  const std::size_t dim = at.size();
  ModeVector<double> f0 = f(at);
  Matrix jac(dim, std::vector<double>(dim, 0.0));
  for (int j = -nm; j <= nm; ++j) {
    ModeVector<double> v = at;
    double h = v[j] + step <= 1.0 ? step : -step;
    v[j] += h;
    ModeVector<double> fj = f(v);
    for (std::size_t i = 0; i < dim; ++i) jac[i][j + nm] = (fj.data()[i] - f0.data()[i]) / h;
  }
  return jac;
}

InversionResult invert_frequency_map(const VectorMap& vtilde, const ModeVector<double>& target,
                                     const ModeVector<double>& guess, double tol,
                                     const std::optional<Matrix>& jacobian, double fd_step, int max_iterations) {
  Matrix jac = jacobian ? *jacobian : finite_difference_jacobian(vtilde, guess, fd_step);
  InversionResult out;
  for (std::size_t i = 0; i < jac.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < jac[i].size(); ++j) row += std::abs(jac[i][j] - (i == j ? 1.0 : 0.0));
    out.jacobian_defect = std::max(out.jacobian_defect, row);
  }
  if (!(out.jacobian_defect < 0.5))
    throw JacobianDegenerate("||dV~/dV - Id|| = " + std::to_string(out.jacobian_defect) + " is not below 1/2");

  ModeVector<double> v = guess;
  for (int it = 0;; ++it) {
    ModeVector<double> r = vtilde(v);
    double res = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      r.data()[i] -= target.data()[i];
      res = std::max(res, std::abs(r.data()[i]));
    }
    if (res <= tol) {
      out.V = v;
      out.iterations = it;
      out.residual = res;
      break;
    }
    if (it == max_iterations)
      throw NoConvergence("frequency map inversion did not converge in " + std::to_string(max_iterations) +
                          " iterations (residual " + std::to_string(res) + ")");
    for (std::size_t i = 0; i < r.size(); ++i) v.data()[i] -= r.data()[i];
  }
  for (double x : out.V.data())
    if (x < 0.0 || x > 1.0) out.range_exit = true;
  return out;
}

StepState initial_state(const ModelParams& p, const ModeVector<double>& V) {
  ModelParams q = p;
  q.V = V;
  StepState st;
  st.s = 0;
  st.lambda = frequencies(p.c, V);
  st.vtilde = V;
  st.R = build_hamiltonian(q).R;
  return st;
}

namespace {

// sum_{n>=1} h^(n) / ((n+offset)!/offset!) with h^(n) = {h^(n-1), f}
Hamiltonian bracket_series(const Hamiltonian& h, const Hamiltonian& f, int offset, double tol, int max_brackets,
                           int* brackets, double* tail) {
  Hamiltonian sum(h.meta(), Form::kReduced);
  Hamiltonian term = h;
  double prev = kInf;
  std::vector<double> norms;
  int n = 0;
  for (n = 1; n <= max_brackets; ++n) {
    term = poisson_bracket(term, f, DegreePolicy::kTruncate).scaled(1.0 / (n + offset));
    if (term.empty()) {
      norms.push_back(0.0);
      break;
    }
    sum = sum + term;
    double tn = max_abs_coefficient(term);
    norms.push_back(tn);
    if (n >= 10 && tn >= prev)
      throw NoContraction("bracket series stopped contracting at bracket " + std::to_string(n));
    prev = tn;
    if (tn <= tol) break;
  }
  if (brackets) *brackets = std::max(*brackets, std::min(n, max_brackets));
  if (tail) {
    double t = 0.0;
    if (norms.size() >= 2 && norms.back() > 0.0) {
      double q = norms.back() / norms[norms.size() - 2];
      t = q < 1.0 ? norms.back() * q / (1.0 - q) : kInf;
    } else if (norms.size() == 1 && norms.back() > 0.0) {
      t = kInf;
    }
    *tail = std::max(*tail, t);
  }
  return sum;
}

}  // namespace

Hamiltonian regrouped_remainder(const Hamiltonian& R, const HomologicalResult& hom, const LieOptions& opts,
                                int* brackets, double* tail) {
  Hamiltonian r0 = R.part(TermClass::kR0), r1 = R.part(TermClass::kR1);
  Hamiltonian q = (r0 - hom.r0_res) + (r1 - hom.r1_res);
  double tol = opts.tail_tol >= 0.0 ? opts.tail_tol : 1e-16 * max_abs_coefficient(R);
  if (brackets) *brackets = 0;
  if (tail) *tail = 0.0;
  Hamiltonian sr = bracket_series(R, hom.F, 0, tol, opts.max_brackets, brackets, tail);
  Hamiltonian sq = bracket_series(q, hom.F, 1, tol, opts.max_brackets, brackets, tail);
  return (R.part(TermClass::kR2) + sr) - sq;
}

Hamiltonian lie_remainder(const Hamiltonian& N, const Hamiltonian& R, const HomologicalResult& hom,
                          const LieOptions& opts) {
  LieResult lr = lie_transform(N + R, hom.F, opts);
  return ((lr.value - N) - hom.r0_res) - hom.r1_res;
}

StepOutput transform_step(const StepState& state, const Schedule& sc, const StepConfig& cfg) {
  const HamiltonianMeta& meta = state.R.meta();
  StepOutput out;
  out.hom = solve_homological(state.lambda, state.R.part(TermClass::kR0), state.R.part(TermClass::kR1),
                              divisor_floor(cfg.gamma, sc));
  LieOptions lo;
  lo.ctx = NormContext::from(meta, sc.rho + 3.0 * sc.delta);
  lo.max_brackets = cfg.max_brackets;
  Hamiltonian next_r = regrouped_remainder(state.R, out.hom, lo, &out.brackets, &out.tail_bound);

  out.shift = frequency_shift(out.hom.r1_res, cfg.amplitudes);
  out.shift_vanishes = shift_vanishes(out.hom.r1_res, cfg.amplitudes);
  const int nm = meta.n_max;
  const double c2 = meta.c * meta.c;
  out.next.s = state.s + 1;
  out.next.lambda = state.lambda;
  out.next.vtilde = state.vtilde;
  for (int n = -nm; n <= nm; ++n) {
    double d = out.shift[n];
    out.next.lambda[n] += d;
    out.next.vtilde[n] += d * (2.0 * state.lambda[n] + d) / c2;
  }
  out.next.R = std::move(next_r);
  return out;
}

double flow_displacement(const Hamiltonian& F, const Amplitudes& i0, double d_s, int samples, std::uint64_t seed,
                         int step) {
  if (F.empty() || samples <= 0) return 0.0;
  const HamiltonianMeta& meta = F.meta();
  const int nm = meta.n_max;
  GradientEvaluator grad(F, i0);
  if (grad.size() == 0) return 0.0;
  ModeVector<double> scale(nm);
  for (int n = -nm; n <= nm; ++n) scale[n] = std::exp(-meta.r * weight(n, meta.sigma));

  auto field = [&](const ModeVector<cplx>& z) {
    ModeVector<cplx> g = grad(z);
    for (auto& x : g.data()) x *= cplx(0.0, -1.0);
    return g;
  };
  auto axpy = [](const ModeVector<cplx>& z, const ModeVector<cplx>& k, double h) {
    ModeVector<cplx> r = z;
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] += h * k.data()[i];
    return r;
  };

  CounterRng rng(seed, streams::kPhaseSamples ^ (static_cast<std::uint64_t>(step) << 32));
  const int substeps = 4;
  const double h = 1.0 / substeps;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    ModeVector<cplx> z0(nm);
    for (int n = -nm; n <= nm; ++n) {
      double x = rng.uniform(0.5 + d_s, 1.0 - d_s);
      double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      z0[n] = std::polar(x * scale[n], th);
    }
    ModeVector<cplx> z = z0;
    for (int k = 0; k < substeps; ++k) {
      auto k1 = field(z);
      auto k2 = field(axpy(z, k1, h / 2));
      auto k3 = field(axpy(z, k2, h / 2));
      auto k4 = field(axpy(z, k3, h));
      for (std::size_t j = 0; j < z.size(); ++j)
        z.data()[j] += h / 6.0 * (k1.data()[j] + 2.0 * k2.data()[j] + 2.0 * k3.data()[j] + k4.data()[j]);
    }
    for (int n = -nm; n <= nm; ++n) worst = std::max(worst, std::abs(z[n] - z0[n]) / scale[n]);
  }
  return worst;
}

bool is_mirror_pair(const IntegerVector& ell) {
  const auto& e = ell.entries();
  if (e.size() != 2) return false;
  return e[0].first == -e[1].first && e[0].first != 0 && std::abs(e[0].second) == 1 &&
         e[0].second == -e[1].second;
}

namespace {

// States at arbitrary V, recomputed from step 0 and cached.
class History {
 public:
  History(const ModelParams& p, const StepConfig& cfg, double eps0) : p_(p), cfg_(cfg), eps0_(eps0) {}

  const StepState& at(const ModeVector<double>& V, int s) {
    auto& chain = cache_[V.data()];
    if (chain.empty()) chain.push_back(initial_state(p_, V));
    while (static_cast<int>(chain.size()) <= s) {
      int j = static_cast<int>(chain.size()) - 1;
      chain.push_back(transform_step(chain.back(), schedule_params(j, eps0_), cfg_).next);
    }
    return chain[s];
  }

 private:
  ModelParams p_;
  StepConfig cfg_;
  double eps0_;
  std::map<std::vector<double>, std::vector<StepState>> cache_;
};

template <class Fn>
auto tag_step(int s, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SmallDivisor& e) {
    throw StepError(s, "SmallDivisor", e.what());
  } catch (const NoContraction& e) {
    throw StepError(s, "NoContraction", e.what());
  } catch (const NoConvergence& e) {
    throw StepError(s, "NoConvergence", e.what());
  } catch (const JacobianDegenerate& e) {
    throw StepError(s, "JacobianDegenerate", e.what());
  } catch (const DegreeOverflow& e) {
    throw StepError(s, "DegreeOverflow", e.what());
  }
}

void fill_norms(TraceEntry& e, const StepState& st, const Schedule& sc) {
  NormContext ctx = NormContext::from(st.R.meta(), sc.rho);
  e.s = sc.s;
  e.rho = sc.rho;
  e.eps = sc.eps;
  e.norm_r0 = norm(st.R.part(TermClass::kR0), ctx);
  e.norm_r1 = norm(st.R.part(TermClass::kR1), ctx);
  e.norm_r2 = norm(st.R.part(TermClass::kR2), ctx);
  e.terms = st.R.size();
  double b0 = sc.eps, b1 = std::pow(sc.eps, 0.6), b2 = (1.0 + sc.d) * sc.eps0;
  e.post_r0 = e.norm_r0 <= b0;
  e.post_r1 = e.norm_r1 <= b1;
  e.post_r2 = e.norm_r2 <= b2;
  auto blown = [](double v, double b) { return v > 10.0 * b; };
  if (blown(e.norm_r0, b0) || blown(e.norm_r1, b1) || blown(e.norm_r2, b2))
    throw StepError(std::max(0, sc.s - 1), "NormBlowup",
                    "remainder norms (" + std::to_string(e.norm_r0) + ", " + std::to_string(e.norm_r1) + ", " +
                        std::to_string(e.norm_r2) + ") exceed ten times the step-" + std::to_string(sc.s) +
                        " bounds");
}

}  // namespace

KamReport run_kam(const ModelParams& p, double gamma, int s_max, const KamOptions& opts) {
  p.validate();
  if (s_max < 1) throw ValidationError("s_max must be at least 1");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");

  StepConfig cfg;
  cfg.gamma = gamma;
  cfg.amplitudes = opts.amplitudes ? *opts.amplitudes : initial_amplitudes(p);
  cfg.max_brackets = opts.max_brackets;
  const HamiltonianMeta meta = p.meta();
  auto observe = [&](const std::string& label, const Hamiltonian& h) {
    if (opts.observer) opts.observer(label, h);
  };

  KamReport rep;
  rep.gamma = gamma;
  rep.target = p.V;
  ModeVector<double> vstar = p.V;
  rep.vstar.push_back(vstar);

  StepState state = initial_state(p, vstar);
  rep.eps0 = norm(state.R, NormContext::from(meta, kRho0));
  if (rep.eps0 >= 1.0) throw ValidationError("measured ||R|| at rho_0 is not below 1");
  History history(p, cfg, rep.eps0);
  bool general = opts.force_fd;

  for (int s = 0; s < s_max; ++s) {
    Schedule sc = schedule_params(s, rep.eps0);
    TraceEntry entry;
    fill_norms(entry, state, sc);
    observe("R", state.R);
    observe("N", normal_form(meta, state.lambda));

    StepOutput out = tag_step(s, [&] { return transform_step(state, sc, cfg); });
    observe("F", out.hom.F);
    observe("[R0]", out.hom.r0_res);
    observe("[R1]", out.hom.r1_res);
    for (const auto& [ell, div] : out.hom.divisors) rep.divisor_indices.insert(ell);

    entry.has_step = true;
    entry.min_divisor = out.hom.min_divisor;
    entry.brackets = out.brackets;
    entry.tail_bound = out.tail_bound;
    entry.lambda_shift_inf = max_abs(out.shift);
    entry.shift_inf = max_abs_diff(out.next.vtilde, state.vtilde);
    ModeVector<double> bound = shift_bound(out.hom.r1_res, cfg.amplitudes, NormContext::from(meta, sc.rho));
    for (int n = -meta.n_max; n <= meta.n_max; ++n)
      if (std::abs(out.shift[n]) > bound[n] * (1.0 + 1e-12)) entry.shift_bound_ok = false;
    entry.phi_size = flow_displacement(out.hom.F, cfg.amplitudes, sc.d, opts.phi_samples, opts.seed, s);
    rep.vtilde_steps.push_back(out.next.vtilde);
    for (std::size_t i = 0; i < state.vtilde.size(); ++i) rep.vtilde_steps.back().data()[i] -= state.vtilde.data()[i];

    general = general || !out.shift_vanishes;
    entry.fast_path = !general;
    ModeVector<double> next_vstar = vstar;
    if (!general) {
      state = std::move(out.next);
    } else {
      VectorMap f = [&](const ModeVector<double>& v) {
        return tag_step(s, [&] { return history.at(v, s + 1).vtilde; });
      };
      InversionResult inv =
          tag_step(s, [&] { return invert_frequency_map(f, rep.target, vstar, opts.newton_tol, std::nullopt, opts.fd_step); });
      entry.newton_iterations = inv.iterations;
      if (inv.range_exit) rep.warnings.push_back("RangeExit: V* left [0,1] at step " + std::to_string(s));
      next_vstar = inv.V;
      state = history.at(next_vstar, s + 1);
    }
    entry.vstar_delta_inf = max_abs_diff(next_vstar, vstar);
    vstar = next_vstar;
    rep.vstar.push_back(vstar);
    rep.trace.push_back(entry);
  }

  TraceEntry last;
  fill_norms(last, state, schedule_params(s_max, rep.eps0));
  observe("R", state.R);
  rep.trace.push_back(last);

  for (int s = 0; s < s_max; ++s) {
    double a = rep.trace[s].norm_r0, b = rep.trace[s + 1].norm_r0;
    rep.decay_exponents.push_back(b == 0.0 ? kInf : std::log(b) / std::log(a));
  }

  ModeVector<double> omega = frequencies(p.c, rep.target);
  Hamiltonian h_final = normal_form(meta, state.lambda) + state.R;
  GradientEvaluator grad(h_final, cfg.amplitudes);
  for (int j = 0; j < opts.torus_points; ++j) {
    ModeVector<cplx> z = torus_trajectory(omega, cfg.amplitudes, static_cast<double>(j));
    ModeVector<cplx> g = grad(z);
    for (int n = -meta.n_max; n <= meta.n_max; ++n)
      rep.torus_residual = std::max(rep.torus_residual, std::abs(g[n] - omega[n] * z[n]));
  }
  return rep;
}

}  // namespace kgt
