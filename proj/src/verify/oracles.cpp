#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "kgt/errors.hpp"
#include "kgt/verify.hpp"

namespace kgt::verify {

Monomial random_monomial(CounterRng& rng, const HamiltonianMeta& meta, int max_degree, bool with_b) {
  const int nm = meta.n_max;
  for (;;) {
    Monomial m;
    int target = rng.integer(2, max_degree);
    int deg = 0;
    // keep one unit of degree for the momentum-balancing factor
    while (deg < target - 1) {
      int kind = rng.integer(0, with_b ? 3 : 2);
      int n = rng.integer(-nm, nm);
      int cost = (kind == 0 || kind == 3) ? 2 : 1;
      if (deg + cost > target - 1) cost = 1, kind = rng.integer(1, 2);
      if (kind == 0)
        m.a.add(n, 1);
      else if (kind == 1)
        m.k.add(n, 1);
      else if (kind == 2)
        m.kprime.add(n, 1);
      else
        m.b.add(n, 1);
      deg += cost;
    }
    std::int64_t p = momentum(m.k, m.kprime);
    if (p != 0) {
      if (p > nm || p < -nm) continue;
      m.kprime.add(static_cast<int>(p), 1);
    }
    if (m.degree() < 2) continue;
    m.coeff = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return m;
  }
}

Hamiltonian random_hamiltonian(CounterRng& rng, const HamiltonianMeta& meta, int terms, int max_degree,
                               bool with_b) {
  std::vector<Monomial> monos;
  for (int i = 0; i < terms; ++i) monos.push_back(random_monomial(rng, meta, max_degree, with_b));
  return canonicalize(monos, meta);
}

namespace {

// a, k, k' exponents per slot
using Plain = std::array<std::uint8_t, 3 * kSlots>;

std::vector<std::pair<Plain, cplx>> plain_terms(const Hamiltonian& h) {
  Hamiltonian e = expand_J(h);
  std::vector<std::pair<Plain, cplx>> out;
  for (const auto& m : e.monomials()) {
    Plain p{};
    for (const auto& [n, v] : m.a) p[n + kMaxModes] = static_cast<std::uint8_t>(v);
    for (const auto& [n, v] : m.k) p[kSlots + n + kMaxModes] = static_cast<std::uint8_t>(v);
    for (const auto& [n, v] : m.kprime) p[2 * kSlots + n + kMaxModes] = static_cast<std::uint8_t>(v);
    out.push_back({p, m.coeff});
  }
  return out;
}

}  // namespace

Hamiltonian oracle_bracket(const Hamiltonian& r, const Hamiltonian& f) {
  auto pr = plain_terms(r), pf = plain_terms(f);
  std::map<Plain, cplx> acc;
  const cplx i(0.0, 1.0);
  for (const auto& [x, cx] : pr) {
    for (const auto& [y, cy] : pf) {
      for (int s = 0; s < kSlots; ++s) {
        const int k = kSlots + s, kp = 2 * kSlots + s;
        // i dR/dzbar dF/dz
        if (x[kp] && y[k]) {
          Plain z{};
          for (int t = 0; t < 3 * kSlots; ++t) z[t] = static_cast<std::uint8_t>(x[t] + y[t]);
          z[kp] -= 1;
          z[k] -= 1;
          acc[z] += i * cx * cy * double(x[kp]) * double(y[k]);
        }
        // -i dR/dz dF/dzbar
        if (x[k] && y[kp]) {
          Plain z{};
          for (int t = 0; t < 3 * kSlots; ++t) z[t] = static_cast<std::uint8_t>(x[t] + y[t]);
          z[k] -= 1;
          z[kp] -= 1;
          acc[z] -= i * cx * cy * double(x[k]) * double(y[kp]);
        }
      }
    }
  }
  std::vector<Monomial> monos;
  for (const auto& [p, c] : acc) {
    if (c == cplx{}) continue;
    Monomial m;
    m.coeff = c;
    for (int s = 0; s < kSlots; ++s) {
      int n = s - kMaxModes;
      if (p[s]) m.a.set(n, p[s]);
      if (p[kSlots + s]) m.k.set(n, p[kSlots + s]);
      if (p[2 * kSlots + s]) m.kprime.set(n, p[2 * kSlots + s]);
    }
    monos.push_back(m);
  }
  return canonicalize(monos, r.meta());
}

cplx quadrature_integral(int m) {
  constexpr int kPoints = 512;
  const double h = 2.0 * std::numbers::pi / kPoints;
  const double amp = (2.0 / std::numbers::pi) * (2.0 / std::numbers::pi);
  cplx sum{};
  for (int j = 0; j < kPoints; ++j) sum += std::polar(1.0, m * (-std::numbers::pi + j * h));
  return amp * h * sum;
}

Hamiltonian ordered_tuple_quartic(const ModelParams& p) {
  const int nm = p.n_max;
  std::vector<std::pair<int, int>> vars;  // (n, sign)
  for (int n = -nm; n <= nm; ++n) {
    vars.push_back({n, +1});
    vars.push_back({n, -1});
  }
  std::map<int, cplx> integral;
  for (int m = -4 * nm; m <= 4 * nm; ++m) integral[m] = quadrature_integral(m);
  std::vector<Monomial> monos;
  const std::size_t v = vars.size();
  for (std::size_t i0 = 0; i0 < v; ++i0)
    for (std::size_t i1 = 0; i1 < v; ++i1)
      for (std::size_t i2 = 0; i2 < v; ++i2)
        for (std::size_t i3 = 0; i3 < v; ++i3) {
          const std::pair<int, int>* t[4] = {&vars[i0], &vars[i1], &vars[i2], &vars[i3]};
          int m = 0;
          double d = 1.0;
          for (auto* x : t) {
            m += x->second * x->first;
            d *= mode_scale(p.c, x->first, p.V[x->first]);
          }
          cplx in = integral[m];
          if (std::abs(in) < 1e-9) continue;
          Monomial mono;
          mono.coeff = (p.eps / 16.0) * d * in;
          for (auto* x : t) (x->second > 0 ? mono.k : mono.kprime).add(x->first, 1);
          monos.push_back(mono);
        }
  return canonicalize(monos, p.meta());
}

double rearrangement_gap(const std::vector<std::pair<std::int64_t, int>>& multiset, double sigma) {
  Rearrangement r = decreasing_rearrangement(multiset);
  double total = 0.0;
  for (std::int64_t n : r.values()) total += weight(n, sigma);
  double tail = 0.0;
  for (std::size_t i = 3; i <= r.size(); ++i) tail += weight(r.at(i), sigma);
  return total - 2.0 * weight(r.at(1), sigma) - 0.5 * tail;
}

double log_bracket_constant(double delta2, double sigma) {
  return (1000.0 / delta2) * std::exp(std::pow(100.0 / delta2, 1.0 / (sigma - 1.0)));
}

double log_equivalence_constant(double delta, double sigma) {
  return 3.0 * std::pow(6.0 / delta, 1.0 / (sigma - 1.0)) * std::exp(std::pow(6.0 / delta, 1.0 / sigma));
}

double log_amplitude_sum(int n_max, int d_max, double delta, double sigma) {
  // poly[j] = sum over a with |a| = j, built one mode at a time
  std::vector<double> poly(d_max + 1, 0.0);
  poly[0] = 1.0;
  for (int n = -n_max; n <= n_max; ++n) {
    double q = std::exp(-delta * weight(n, sigma));
    std::vector<double> next(d_max + 1, 0.0);
    for (int j = 0; j <= d_max; ++j) {
      double qp = 1.0;
      for (int e = 0; j + e <= d_max; ++e) {
        next[j + e] += poly[j] * qp;
        qp *= q;
      }
    }
    poly = std::move(next);
  }
  double sum = 0.0;
  for (double x : poly) sum += x;
  return std::log(sum);
}

double log_amplitude_sum_bound(double delta, double sigma) {
  return (18.0 / delta) * std::exp(std::pow(4.0 / delta, 1.0 / (sigma - 1.0)));
}

}  // namespace kgt::verify
