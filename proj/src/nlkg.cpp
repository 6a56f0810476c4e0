#include "kgt/nlkg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kgt/errors.hpp"
#include "kgt/random.hpp"

namespace kgt {

void ModelParams::validate() const {
  meta().validate();
  if (!(eps >= 0.0)) throw ValidationError("eps must be nonnegative");
  if (V.nmax() != n_max || V.size() != static_cast<std::size_t>(2 * n_max + 1))
    throw ValidationError("V must have 2*N_max+1 entries");
  for (int n = -n_max; n <= n_max; ++n)
    if (!(V[n] >= 0.0 && V[n] <= 1.0))
      throw ValidationError("V_" + std::to_string(n) + " must lie in [0,1]");
  if (eps > 0.0 && d_max < 4) throw ValidationError("D_max must be at least 4 for the quartic term");
}

ModeVector<double> draw_potential(int n_max, std::uint64_t seed) {
  ModeVector<double> v(n_max);
  for (int n = -n_max; n <= n_max; ++n)
    v[n] = counter_uniform(seed, streams::kPotential, static_cast<std::uint64_t>(n + n_max));
  return v;
}

ModeVector<double> frequencies(double c, const ModeVector<double>& V) {
  ModeVector<double> lam(V.nmax());
  for (int n = -V.nmax(); n <= V.nmax(); ++n) lam[n] = c * std::sqrt(c * c + double(n) * n + V[n]);
  return lam;
}

ModeVector<double> frequencies(const ModelParams& p) { return frequencies(p.c, p.V); }

double mode_scale(double c, int n, double v) { return std::sqrt(c / std::sqrt(c * c + double(n) * n + v)); }

std::vector<Monomial> quartic_terms(const ModelParams& p) {
  std::vector<Monomial> out;
  if (p.eps == 0.0) return out;
  const int nm = p.n_max;
  const int vars = 2 * (2 * nm + 1);
  // variable v: mode v/2 - nm, sign + for even v (z), - for odd v (zbar)
  auto mode = [nm](int v) { return v / 2 - nm; };
  auto sign = [](int v) { return (v % 2 == 0) ? 1 : -1; };
  const double integral = 8.0 / std::numbers::pi;
  int idx[4];
  for (idx[0] = 0; idx[0] < vars; ++idx[0])
    for (idx[1] = idx[0]; idx[1] < vars; ++idx[1])
      for (idx[2] = idx[1]; idx[2] < vars; ++idx[2])
        for (idx[3] = idx[2]; idx[3] < vars; ++idx[3]) {
          int mom = 0;
          for (int v : idx) mom += sign(v) * mode(v);
          if (mom != 0) continue;
          double mult = 24.0;
          for (int i = 0, run = 1; i < 4; ++i) {
            if (i > 0 && idx[i] == idx[i - 1]) {
              ++run;
              mult /= run;
            } else {
              run = 1;
            }
          }
          Monomial m;
          double coeff = mult * (p.eps / 16.0) * integral;
          for (int v : idx) {
            int n = mode(v);
            coeff *= mode_scale(p.c, n, p.V[n]);
            (sign(v) > 0 ? m.k : m.kprime).add(n, 1);
          }
          m.coeff = coeff;
          out.push_back(std::move(m));
        }
  return out;
}

ModelHamiltonian build_hamiltonian(const ModelParams& p) {
  HamiltonianMeta meta = p.meta();
  return ModelHamiltonian{normal_form(meta, frequencies(p)), canonicalize(quartic_terms(p), meta)};
}

Hamiltonian normal_form(const HamiltonianMeta& meta, const ModeVector<double>& lambda) {
  std::vector<Monomial> monos;
  for (int n = -meta.n_max; n <= meta.n_max; ++n) {
    Monomial j;
    j.coeff = lambda[n];
    j.b.set(n, 1);
    monos.push_back(j);
    Monomial i;
    i.coeff = lambda[n];
    i.a.set(n, 1);
    monos.push_back(i);
  }
  return Hamiltonian::from_monomials(meta, monos, Form::kReduced);
}

ModeVector<double> normal_form_frequencies(const Hamiltonian& n) {
  ModeVector<double> lam(n.meta().n_max);
  for (int m = -n.meta().n_max; m <= n.meta().n_max; ++m) {
    Monomial j;
    j.b.set(m, 1);
    lam[m] = n.coeff_of(j).real();
  }
  return lam;
}

Amplitudes initial_amplitudes(const HamiltonianMeta& meta) {
  Amplitudes a{ModeVector<double>(meta.n_max)};
  for (int n = -meta.n_max; n <= meta.n_max; ++n)
    a.log_values[n] = std::log(9.0 / 16.0) - 2.0 * meta.r * weight(n, meta.sigma);
  return a;
}

Amplitudes initial_amplitudes(const ModelParams& p) { return initial_amplitudes(p.meta()); }

ModeVector<cplx> torus_trajectory(const ModeVector<double>& omega, const Amplitudes& i0, double t) {
  ModeVector<cplx> z(omega.nmax());
  for (int n = -omega.nmax(); n <= omega.nmax(); ++n)
    z[n] = std::exp(0.5 * i0.log_value(n)) * std::polar(1.0, -omega[n] * t);
  return z;
}

GradientEvaluator::GradientEvaluator(const Hamiltonian& h, const Amplitudes& i0) : n_max_(h.meta().n_max) {
  Hamiltonian e = h.form() == Form::kExpanded ? h : expand_J(h);
  for (const auto& m : e.monomials()) {
    if (m.kprime.empty()) continue;
    double log_i = 0.0;
    for (const auto& [n, a] : m.a) log_i += a * i0.log_value(n);
    cplx c = m.coeff * std::exp(log_i);
    if (c == cplx{}) continue;
    Entry t{c, {}};
    for (const auto& [n, k] : m.k) t.factors.push_back({n, k, 0});
    for (const auto& [n, kp] : m.kprime) {
      auto it = std::find_if(t.factors.begin(), t.factors.end(), [n = n](const Factor& f) { return f.n == n; });
      if (it == t.factors.end())
        t.factors.push_back({n, 0, kp});
      else
        it->kp = kp;
    }
    terms_.push_back(std::move(t));
  }
}

ModeVector<cplx> GradientEvaluator::operator()(const ModeVector<cplx>& z) const {
  constexpr int kPow = kMaxDegree + 1;
  const int width = 2 * n_max_ + 1;
  std::vector<cplx> zp(width * kPow), zbp(width * kPow);
  for (int n = -n_max_; n <= n_max_; ++n) {
    cplx* p = &zp[(n + n_max_) * kPow];
    cplx* q = &zbp[(n + n_max_) * kPow];
    p[0] = q[0] = 1.0;
    for (int e = 1; e < kPow; ++e) {
      p[e] = p[e - 1] * z[n];
      q[e] = q[e - 1] * std::conj(z[n]);
    }
  }
  auto zpow = [&](int n, int e) { return zp[(n + n_max_) * kPow + e]; };
  auto zbpow = [&](int n, int e) { return zbp[(n + n_max_) * kPow + e]; };

  ModeVector<cplx> grad(n_max_, cplx{});
  cplx prefix[kMaxDegree + 1], value[kMaxDegree];
  for (const auto& t : terms_) {
    const std::size_t m = t.factors.size();
    prefix[0] = t.coeff;
    for (std::size_t i = 0; i < m; ++i) {
      const Factor& f = t.factors[i];
      value[i] = zpow(f.n, f.k) * zbpow(f.n, f.kp);
      prefix[i + 1] = prefix[i] * value[i];
    }
    cplx suffix = 1.0;
    for (std::size_t i = m; i-- > 0;) {
      const Factor& f = t.factors[i];
      if (f.kp) grad[f.n] += prefix[i] * suffix * (double(f.kp) * zpow(f.n, f.k) * zbpow(f.n, f.kp - 1));
      suffix *= value[i];
    }
  }
  return grad;
}

ModeVector<cplx> gradient_zbar(const Hamiltonian& h, const ModeVector<cplx>& z, const Amplitudes& i0) {
  return GradientEvaluator(h, i0)(z);
}

double motion_residual(const Hamiltonian& h, const ModeVector<cplx>& z, const Amplitudes& i0,
                       const ModeVector<double>& omega) {
  ModeVector<cplx> g = gradient_zbar(h, z, i0);
  double worst = 0.0;
  for (int n = -z.nmax(); n <= z.nmax(); ++n) worst = std::max(worst, std::abs(g[n] - omega[n] * z[n]));
  return worst;
}

}  // namespace kgt
