#include <algorithm>
#include <bit>

#include "kgt/errors.hpp"
#include "kgt/hamiltonian.hpp"
#include "term_ops.hpp"

namespace kgt {

using detail::Dense;
using detail::kA;
using detail::kB;
using detail::kK;
using detail::kKp;

namespace {

struct Prepared {
  Dense d;
  cplx c;
  std::uint32_t z = 0;   // slots where d/dz_n is nonzero
  std::uint32_t zb = 0;  // slots where d/dzbar_n is nonzero
  int deg = 0;
};

std::vector<Prepared> prepare(const Hamiltonian& h) {
  std::vector<Prepared> out;
  out.reserve(h.size());
  for (const auto& t : h.terms()) {
    Prepared p;
    p.d = detail::decode(t.key);
    p.c = t.coeff;
    std::uint32_t b = p.d.mask(kB);
    p.z = b | p.d.mask(kK);
    p.zb = b | p.d.mask(kKp);
    p.deg = p.d.degree();
    out.push_back(p);
  }
  return out;
}

// One piece of a partial derivative at a fixed slot: factor and the exponent
// shifts it applies to (b, k, k') at that slot.
struct Piece {
  double factor;
  int db, dk, dkp;
};

int pieces_dz(const Dense& d, int s, Piece* out) {
  int n = 0;
  if (d.x[kB][s]) out[n++] = {static_cast<double>(d.x[kB][s]), -1, 0, +1};  // dJ/dz = zbar
  if (d.x[kK][s]) out[n++] = {static_cast<double>(d.x[kK][s]), 0, -1, 0};
  return n;
}

int pieces_dzbar(const Dense& d, int s, Piece* out) {
  int n = 0;
  if (d.x[kB][s]) out[n++] = {static_cast<double>(d.x[kB][s]), -1, +1, 0};  // dJ/dzbar = z
  if (d.x[kKp][s]) out[n++] = {static_cast<double>(d.x[kKp][s]), 0, 0, -1};
  return n;
}

}  // namespace

Hamiltonian poisson_bracket(const Hamiltonian& r, const Hamiltonian& f, DegreePolicy policy) {
  const HamiltonianMeta& meta = r.meta();
  if (meta.n_max != f.meta().n_max || meta.d_max != f.meta().d_max)
    throw ValidationError("bracket operands carry different truncation metadata");

  auto pr = prepare(r);
  auto pf = prepare(f);
  std::stable_sort(pf.begin(), pf.end(), [](const Prepared& x, const Prepared& y) { return x.deg < y.deg; });

  TermAccumulator raw(meta, Form::kExpanded);
  const cplx plus_i(0.0, 1.0);

  auto emit = [&](Dense& base, int s, const Dense& d1, const Dense& d2, const Piece& p1, const Piece& p2,
                  cplx c) {
    base.x[kA][s] = static_cast<std::uint8_t>(d1.x[kA][s] + d2.x[kA][s]);
    base.x[kB][s] = static_cast<std::uint8_t>(d1.x[kB][s] + d2.x[kB][s] + p1.db + p2.db);
    base.x[kK][s] = static_cast<std::uint8_t>(d1.x[kK][s] + d2.x[kK][s] + p1.dk + p2.dk);
    base.x[kKp][s] = static_cast<std::uint8_t>(d1.x[kKp][s] + d2.x[kKp][s] + p1.dkp + p2.dkp);
    base.refresh_used(s);
    raw.add(detail::encode(base), c * (p1.factor * p2.factor));
  };

  for (const auto& p : pr) {
    for (const auto& q : pf) {
      std::uint32_t m_plus = p.zb & q.z;   // dR/dzbar dF/dz
      std::uint32_t m_minus = p.z & q.zb;  // dR/dz dF/dzbar
      int deg = p.deg + q.deg - 2;
      if (deg > meta.d_max) {
        if (policy == DegreePolicy::kTruncate) break;  // pf is sorted by degree
        if (m_plus | m_minus)
          throw DegreeOverflow("bracket degree " + std::to_string(deg) + " exceeds D_max " +
                               std::to_string(meta.d_max));
        continue;
      }
      if (!(m_plus | m_minus)) continue;

      Dense base;
      base.used = p.d.used | q.d.used;
      for (std::uint32_t u = base.used; u; u &= u - 1) {
        int s = std::countr_zero(u);
        for (int fld = 0; fld < 4; ++fld)
          base.x[fld][s] = static_cast<std::uint8_t>(p.d.x[fld][s] + q.d.x[fld][s]);
      }
      const cplx pc = p.c * q.c;
      Piece a[2], b[2];
      for (std::uint32_t u = m_plus; u; u &= u - 1) {
        int s = std::countr_zero(u);
        Dense saved = base;
        int na = pieces_dzbar(p.d, s, a), nb = pieces_dz(q.d, s, b);
        for (int i = 0; i < na; ++i)
          for (int j = 0; j < nb; ++j) emit(base, s, p.d, q.d, a[i], b[j], plus_i * pc);
        base = saved;
      }
      for (std::uint32_t u = m_minus; u; u &= u - 1) {
        int s = std::countr_zero(u);
        Dense saved = base;
        int na = pieces_dz(p.d, s, a), nb = pieces_dzbar(q.d, s, b);
        for (int i = 0; i < na; ++i)
          for (int j = 0; j < nb; ++j) emit(base, s, p.d, q.d, a[i], b[j], -plus_i * pc);
        base = saved;
      }
    }
  }

  Hamiltonian unreduced = raw.finish();
  TermAccumulator acc(meta, Form::kReduced);
  for (const auto& t : unreduced.terms()) detail::emit_reduced(detail::decode(t.key), t.coeff, acc);
  return acc.finish();
}

}  // namespace kgt
