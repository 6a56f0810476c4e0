#include "kgt/hamiltonian.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgt/errors.hpp"
#include "term_ops.hpp"

namespace kgt {

using detail::Dense;
using detail::kA;
using detail::kB;
using detail::kK;
using detail::kKp;

namespace {

constexpr double kDropBelow = 1e-300;

void check_mode(int n, const HamiltonianMeta& meta) {
  if (n < -meta.n_max || n > meta.n_max)
    throw ValidationError("mode " + std::to_string(n) + " outside |n| <= " + std::to_string(meta.n_max));
}

}  // namespace

const char* to_string(TermClass c) {
  switch (c) {
    case TermClass::kR0: return "R0";
    case TermClass::kR1: return "R1";
    case TermClass::kR2: return "R2";
  }
  return "?";
}

const char* to_string(Form f) { return f == Form::kReduced ? "reduced" : "expanded"; }

int Monomial::degree() const { return 2 * a.total() + 2 * b.total() + k.total() + kprime.total(); }

void HamiltonianMeta::validate() const {
  if (!(sigma > 2.0 && sigma <= 3.0)) throw ValidationError("sigma must lie in (2,3]");
  if (!(r > 1.0)) throw ValidationError("r must exceed 1");
  if (!(c >= 1.0)) throw ValidationError("c must be at least 1");
  if (n_max < 1 || n_max > kMaxModes)
    throw ValidationError("N_max must lie in [1," + std::to_string(kMaxModes) + "]");
  if (d_max < 2 || d_max > kMaxDegree)
    throw ValidationError("D_max must lie in [2," + std::to_string(kMaxDegree) + "]");
}

void NormContext::validate() const {
  if (!(sigma > 2.0 && sigma <= 3.0)) throw ValidationError("sigma must lie in (2,3]");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  if (!(r > 1.0)) throw ValidationError("r must exceed 1");
  if (!(c >= 1.0)) throw ValidationError("c must be at least 1");
}

Amplitudes Amplitudes::from_values(const ModeVector<double>& values) {
  Amplitudes a{ModeVector<double>(values.nmax())};
  for (int n = -values.nmax(); n <= values.nmax(); ++n)
    a.log_values[n] = values[n] > 0 ? std::log(values[n]) : -std::numeric_limits<double>::infinity();
  return a;
}

Amplitudes Amplitudes::zeros(int nmax) {
  return Amplitudes{ModeVector<double>(nmax, -std::numeric_limits<double>::infinity())};
}

double Amplitudes::value(int n) const { return std::exp(log_values[n]); }

namespace detail {

TermKey encode(const Dense& d) {
  TermKey key;
  int i = 0;
  for (int field = 0; field < 4; ++field) {
    for (std::uint32_t u = d.used; u; u &= u - 1) {
      int s = std::countr_zero(u);
      int e = d.x[field][s];
      if (e) key.e[i++] = static_cast<std::uint16_t>((field << 10) | (s << 5) | e);
    }
  }
  return key;
}

Dense dense_of(const Monomial& m) {
  Dense d;
  const ExponentMap* maps[4] = {&m.a, &m.b, &m.k, &m.kprime};
  for (int f = 0; f < 4; ++f) {
    for (const auto& [n, e] : *maps[f]) {
      if (n < -kMaxModes || n > kMaxModes) throw ValidationError("mode out of range: " + std::to_string(n));
      if (e > 31) throw DegreeOverflow("exponent exceeds 31");
      int s = slot_of(n);
      d.x[f][s] = static_cast<std::uint8_t>(e);
      d.used |= 1u << s;
    }
  }
  return d;
}

void emit_reduced(Dense d, cplx c, TermAccumulator& acc) {
  std::uint32_t overlap = d.mask(kK) & d.mask(kKp);
  if (!overlap) {
    acc.add(encode(d), c);
    return;
  }
  int s = std::countr_zero(overlap);
  int m = std::min(d.x[kK][s], d.x[kKp][s]);
  d.x[kK][s] -= m;
  d.x[kKp][s] -= m;
  std::uint8_t a0 = d.x[kA][s], b0 = d.x[kB][s];
  for (int j = 0; j <= m; ++j) {
    Dense e = d;
    e.x[kB][s] = static_cast<std::uint8_t>(b0 + j);
    e.x[kA][s] = static_cast<std::uint8_t>(a0 + (m - j));
    e.refresh_used(s);
    emit_reduced(e, c * binomial(m, j), acc);
  }
}

}  // namespace detail

TermKey make_key(const Monomial& m) {
  Dense d = detail::dense_of(m);
  if (detail::entry_count(d) > kMaxDegree) throw DegreeOverflow("too many exponent entries");
  return detail::encode(d);
}

Monomial key_to_monomial(const TermKey& key, cplx coeff) {
  Monomial m;
  m.coeff = coeff;
  ExponentMap* maps[4] = {&m.a, &m.b, &m.k, &m.kprime};
  for (std::uint16_t v : key.e) {
    if (!v) break;
    maps[v >> 10]->set(detail::mode_of((v >> 5) & 31), v & 31);
  }
  return m;
}

// ---------------------------------------------------------------------------

struct TermAccumulator::Impl {
  absl::flat_hash_map<TermKey, cplx> map;
};

TermAccumulator::TermAccumulator(const HamiltonianMeta& meta, Form form)
    : impl_(std::make_unique<Impl>()), meta_(meta), form_(form) {}
TermAccumulator::TermAccumulator(TermAccumulator&&) noexcept = default;
TermAccumulator& TermAccumulator::operator=(TermAccumulator&&) noexcept = default;
TermAccumulator::~TermAccumulator() = default;

void TermAccumulator::add(const TermKey& key, cplx c) { impl_->map[key] += c; }

void TermAccumulator::add(const Hamiltonian& h, cplx scale) {
  for (const auto& t : h.terms()) impl_->map[t.key] += scale * t.coeff;
}

std::size_t TermAccumulator::size() const { return impl_->map.size(); }

Hamiltonian TermAccumulator::finish() {
  Hamiltonian h(meta_, form_);
  h.terms_.reserve(impl_->map.size());
  for (const auto& [k, c] : impl_->map)
    if (std::abs(c) >= kDropBelow) h.terms_.push_back(Term{k, c});
  std::sort(h.terms_.begin(), h.terms_.end(), [](const Term& x, const Term& y) { return x.key < y.key; });
  impl_->map.clear();
  return h;
}

// ---------------------------------------------------------------------------

Hamiltonian::Hamiltonian(const HamiltonianMeta& meta, Form form) : meta_(meta), form_(form) {}

Hamiltonian Hamiltonian::from_monomials(const HamiltonianMeta& meta, const std::vector<Monomial>& monos,
                                        Form form) {
  meta.validate();
  TermAccumulator acc(meta, form);
  for (const auto& m : monos) {
    for (const auto* map : {&m.a, &m.b, &m.k, &m.kprime})
      for (const auto& [n, e] : *map) check_mode(n, meta);
    if (momentum(m.k, m.kprime) != 0) throw MomentumViolation("nonzero momentum in monomial");
    if (m.degree() > meta.d_max) throw DegreeOverflow("monomial degree exceeds D_max");
    if (form == Form::kExpanded && !m.b.empty())
      throw RepresentationError("expanded form requires b = 0");
    if (form == Form::kReduced)
      for (const auto& [n, e] : m.k)
        if (m.kprime[n] != 0) throw RepresentationError("reduced form requires disjoint z/zbar supports");
    acc.add(make_key(m), m.coeff);
  }
  return acc.finish();
}

Monomial Hamiltonian::monomial(std::size_t i) const { return key_to_monomial(terms_[i].key, terms_[i].coeff); }

std::vector<Monomial> Hamiltonian::monomials() const {
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) out.push_back(monomial(i));
  return out;
}

cplx Hamiltonian::coeff_of(const Monomial& m) const {
  TermKey key = make_key(m);
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                             [](const Term& t, const TermKey& k) { return t.key < k; });
  return (it != terms_.end() && it->key == key) ? it->coeff : cplx{};
}

namespace {

int b_total(const TermKey& key) {
  int t = 0;
  for (std::uint16_t v : key.e) {
    if (!v) break;
    if ((v >> 10) == kB) t += v & 31;
  }
  return t;
}

bool has_z(const TermKey& key) {
  for (std::uint16_t v : key.e) {
    if (!v) break;
    if ((v >> 10) >= kK) return true;
  }
  return false;
}

TermClass class_of(const TermKey& key) {
  int b = b_total(key);
  return b == 0 ? TermClass::kR0 : (b == 1 ? TermClass::kR1 : TermClass::kR2);
}

int key_degree(const TermKey& key) {
  int d = 0;
  for (std::uint16_t v : key.e) {
    if (!v) break;
    int f = v >> 10;
    d += (f <= kB ? 2 : 1) * (v & 31);
  }
  return d;
}

}  // namespace

TermClass Hamiltonian::term_class(std::size_t i) const { return class_of(terms_[i].key); }

int Hamiltonian::degree(std::size_t i) const { return key_degree(terms_[i].key); }

int Hamiltonian::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, key_degree(t.key));
  return d;
}

Hamiltonian Hamiltonian::part(TermClass c) const {
  Hamiltonian h(meta_, form_);
  for (const auto& t : terms_)
    if (class_of(t.key) == c) h.terms_.push_back(t);
  return h;
}

Hamiltonian Hamiltonian::resonant_part() const {
  Hamiltonian h(meta_, form_);
  for (const auto& t : terms_)
    if (!has_z(t.key)) h.terms_.push_back(t);
  return h;
}

Hamiltonian Hamiltonian::scaled(cplx s) const {
  Hamiltonian h(meta_, form_);
  for (const auto& t : terms_) {
    cplx c = s * t.coeff;
    if (std::abs(c) >= kDropBelow) h.terms_.push_back(Term{t.key, c});
  }
  return h;
}

Hamiltonian Hamiltonian::with_meta(const HamiltonianMeta& meta) const {
  Hamiltonian h = *this;
  h.meta_ = meta;
  return h;
}

namespace {

std::vector<Term> merge_terms(const Hamiltonian& x, const Hamiltonian& y, double sign) {
  if (x.meta().n_max != y.meta().n_max || x.meta().d_max != y.meta().d_max)
    throw ValidationError("Hamiltonians carry different truncation metadata");
  if (x.form() != y.form() && !x.empty() && !y.empty())
    throw RepresentationError("cannot add reduced and expanded Hamiltonians");
  // Both inputs are sorted by key, so a merge keeps canonical order.
  std::vector<Term> out;
  out.reserve(x.size() + y.size());
  auto i = x.terms().begin(), ie = x.terms().end();
  auto j = y.terms().begin(), je = y.terms().end();
  while (i != ie || j != je) {
    if (j == je || (i != ie && i->key < j->key)) {
      out.push_back(*i++);
    } else if (i == ie || j->key < i->key) {
      cplx c = sign * j->coeff;
      out.push_back(Term{j->key, c});
      ++j;
    } else {
      cplx c = i->coeff + sign * j->coeff;
      if (std::abs(c) >= kDropBelow) out.push_back(Term{i->key, c});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Hamiltonian operator+(const Hamiltonian& x, const Hamiltonian& y) {
  Hamiltonian h(x.meta(), x.empty() ? y.form() : x.form());
  h.terms_ = merge_terms(x, y, 1.0);
  return h;
}

Hamiltonian operator-(const Hamiltonian& x, const Hamiltonian& y) {
  Hamiltonian h(x.meta(), x.empty() ? y.form() : x.form());
  h.terms_ = merge_terms(x, y, -1.0);
  return h;
}

// ---------------------------------------------------------------------------

Hamiltonian canonicalize(const std::vector<Monomial>& raw, const HamiltonianMeta& meta) {
  meta.validate();
  TermAccumulator acc(meta, Form::kReduced);
  for (const auto& m : raw) {
    for (const auto* map : {&m.a, &m.b, &m.k, &m.kprime})
      for (const auto& [n, e] : *map) check_mode(n, meta);
    if (momentum(m.k, m.kprime) != 0)
      throw MomentumViolation("raw term k=" + to_string(m.k) + " k'=" + to_string(m.kprime) +
                              " has nonzero momentum");
    if (m.degree() > meta.d_max)
      throw DegreeOverflow("raw term of degree " + std::to_string(m.degree()) + " exceeds D_max");
    detail::emit_reduced(detail::dense_of(m), m.coeff, acc);
  }
  return acc.finish();
}

Hamiltonian expand_J(const Hamiltonian& h) {
  TermAccumulator acc(h.meta(), Form::kExpanded);
  for (const auto& t : h.terms()) {
    Dense d = detail::decode(t.key);
    std::uint32_t bm = d.mask(kB);
    if (!bm) {
      acc.add(t.key, t.coeff);
      continue;
    }
    // Iterate the product over slots of sum_j C(b,j) (z zbar)^j (-I)^(b-j).
    struct Item {
      Dense d;
      cplx c;
    };
    std::vector<Item> cur{{d, t.coeff}};
    for (std::uint32_t u = bm; u; u &= u - 1) {
      int s = std::countr_zero(u);
      std::vector<Item> next;
      for (const auto& it : cur) {
        int b = it.d.x[kB][s];
        for (int j = 0; j <= b; ++j) {
          Dense e = it.d;
          e.x[kB][s] = 0;
          e.x[kK][s] = static_cast<std::uint8_t>(e.x[kK][s] + j);
          e.x[kKp][s] = static_cast<std::uint8_t>(e.x[kKp][s] + j);
          e.x[kA][s] = static_cast<std::uint8_t>(e.x[kA][s] + (b - j));
          double sign = ((b - j) % 2) ? -1.0 : 1.0;
          next.push_back({e, it.c * (sign * detail::binomial(b, j))});
        }
      }
      cur.swap(next);
    }
    for (const auto& it : cur) acc.add(detail::encode(it.d), it.c);
  }
  return acc.finish();
}

// ---------------------------------------------------------------------------

cplx evaluate(const Hamiltonian& h, const ModeVector<cplx>& z, const ModeVector<cplx>& zbar,
              const Amplitudes& i0) {
  cplx sum = 0.0;
  for (const auto& t : h.terms()) {
    Dense d = detail::decode(t.key);
    double log_i = 0.0;
    cplx prod = 1.0;
    for (std::uint32_t u = d.used; u; u &= u - 1) {
      int s = std::countr_zero(u);
      int n = detail::mode_of(s);
      if (d.x[kA][s]) log_i += d.x[kA][s] * i0.log_value(n);
      if (d.x[kB][s]) {
        cplx j = z[n] * zbar[n] - i0.value(n);
        prod *= std::pow(j, static_cast<int>(d.x[kB][s]));
      }
      if (d.x[kK][s]) prod *= std::pow(z[n], static_cast<int>(d.x[kK][s]));
      if (d.x[kKp][s]) prod *= std::pow(zbar[n], static_cast<int>(d.x[kKp][s]));
    }
    sum += t.coeff * std::exp(log_i) * prod;
  }
  return sum;
}

cplx evaluate(const Hamiltonian& h, const ModeVector<cplx>& z, const Amplitudes& i0) {
  ModeVector<cplx> zbar(z.nmax());
  for (int n = -z.nmax(); n <= z.nmax(); ++n) zbar[n] = std::conj(z[n]);
  return evaluate(h, z, zbar, i0);
}

// ---------------------------------------------------------------------------

namespace {

struct WeightTable {
  std::array<double, 32> L{};
  std::array<double, 32> num{};  // 0.25 * log1p(n^2/c^2)
  double L0 = 0.0;
  double rho = 0.0;

  explicit WeightTable(const NormContext& ctx) {
    ctx.validate();
    rho = ctx.rho;
    L0 = weight(0, ctx.sigma);
    for (int s = 0; s < kSlots; ++s) {
      int n = detail::mode_of(s);
      L[s] = weight(n, ctx.sigma);
      num[s] = 0.25 * std::log1p(static_cast<double>(n) * n / (ctx.c * ctx.c));
    }
  }

  double log_weight(const Dense& d) const {
    double lognum = 0.0, expo = 0.0;
    int top = -1;
    for (std::uint32_t u = d.used; u; u &= u - 1) {
      int s = std::countr_zero(u);
      int deg = 2 * d.x[kA][s] + 2 * d.x[kB][s] + d.x[kK][s] + d.x[kKp][s];
      lognum += deg * num[s];
      expo += deg * L[s];
      int absn = std::abs(detail::mode_of(s));
      if (absn > top) top = absn;
    }
    double l1 = top < 0 ? L0 : L[detail::slot_of(top)];
    return lognum - rho * (expo - 2.0 * l1);
  }
};

double sup_norm(const Hamiltonian& h, const NormContext& ctx, bool require_b_free) {
  WeightTable w(ctx);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : h.terms()) {
    Dense d = detail::decode(t.key);
    if (require_b_free && d.mask(kB)) throw RepresentationError("norm_plus needs b = 0; apply expand_J first");
    double v = std::log(std::abs(t.coeff)) + w.log_weight(d);
    if (v > best) best = v;
  }
  return h.empty() ? 0.0 : std::exp(best);
}

}  // namespace

double norm_plus(const Hamiltonian& h, const NormContext& ctx) { return sup_norm(h, ctx, true); }

double norm(const Hamiltonian& h, const NormContext& ctx) { return sup_norm(h, ctx, false); }

double log_term_weight(const Monomial& m, const NormContext& ctx) {
  return WeightTable(ctx).log_weight(detail::dense_of(m));
}

double max_relative_difference(const Hamiltonian& x, const Hamiltonian& y, double abs_floor) {
  double worst = 0.0;
  auto i = x.terms().begin(), ie = x.terms().end();
  auto j = y.terms().begin(), je = y.terms().end();
  auto rel = [&](cplx a, cplx b) {
    double scale = std::max({std::abs(a), std::abs(b), abs_floor});
    return scale > 0 ? std::abs(a - b) / scale : 0.0;
  };
  while (i != ie || j != je) {
    if (j == je || (i != ie && i->key < j->key)) {
      worst = std::max(worst, rel(i->coeff, 0.0));
      ++i;
    } else if (i == ie || j->key < i->key) {
      worst = std::max(worst, rel(0.0, j->coeff));
      ++j;
    } else {
      worst = std::max(worst, rel(i->coeff, j->coeff));
      ++i;
      ++j;
    }
  }
  return worst;
}

double max_abs_coefficient(const Hamiltonian& h) {
  double m = 0.0;
  for (const auto& t : h.terms()) m = std::max(m, std::abs(t.coeff));
  return m;
}

}  // namespace kgt
