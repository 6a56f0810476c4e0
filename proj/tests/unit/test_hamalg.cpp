#include <doctest.h>

#include <cmath>

#include "kgt/errors.hpp"
#include "kgt/hamiltonian.hpp"
#include "kgt/nlkg.hpp"
#include "kgt/random.hpp"
#include "kgt/serialize.hpp"
#include "kgt/verify.hpp"

using namespace kgt;

namespace {

HamiltonianMeta small_meta() {
  HamiltonianMeta m;
  m.n_max = 2;
  m.d_max = 8;
  return m;
}

Hamiltonian single(const HamiltonianMeta& meta, Monomial m, Form form = Form::kReduced) {
  return Hamiltonian::from_monomials(meta, {m}, form);
}

}  // namespace

TEST_CASE("canonical bracket of z and zbar") {
  auto meta = small_meta();
  Monomial z, zb;
  z.k.set(0, 1);
  zb.kprime.set(0, 1);
  Hamiltonian b = poisson_bracket(single(meta, z), single(meta, zb));
  REQUIRE(b.size() == 1);
  CHECK(b.monomial(0).degree() == 0);
  CHECK(b.terms()[0].coeff.real() == 0.0);
  CHECK(b.terms()[0].coeff.imag() == -1.0);
}

TEST_CASE("normal form acts diagonally") {
  auto meta = small_meta();
  ModeVector<double> lambda(2);
  for (int n = -2; n <= 2; ++n) lambda[n] = std::sqrt(1.0 + n * n);
  Hamiltonian N = normal_form(meta, lambda);
  Monomial m;
  m.coeff = cplx(0.3, -0.2);
  m.k.set(2, 1);
  m.k.set(-1, 1);
  m.kprime.set(1, 1);
  m.a.set(0, 1);
  m.b.set(-2, 1);
  Hamiltonian b = poisson_bracket(N, single(meta, m));
  REQUIRE(b.size() == 1);
  double div = lambda[2] + lambda[-1] - lambda[1];
  CHECK(b.coeff_of(m) == b.terms()[0].coeff);
  CHECK(std::abs(b.terms()[0].coeff - cplx(0.0, div) * m.coeff) < 1e-15);
  CHECK(poisson_bracket(N, N).empty());
}

TEST_CASE("bracket agrees with the expanded oracle and is antisymmetric") {
  auto meta = small_meta();
  CounterRng rng(5, 4);
  for (int trial = 0; trial < 40; ++trial) {
    Hamiltonian r = verify::random_hamiltonian(rng, meta, 4, 4);
    Hamiltonian f = verify::random_hamiltonian(rng, meta, 4, 4);
    Hamiltonian b = poisson_bracket(r, f);
    CHECK(max_relative_difference(b, verify::oracle_bracket(r, f), 1.0) < 1e-12);
    CHECK(max_abs_coefficient(b + poisson_bracket(f, r)) < 1e-13);
  }
}

TEST_CASE("degree overflow policies") {
  HamiltonianMeta meta = small_meta();
  meta.d_max = 6;
  Monomial x, y;
  x.k.set(1, 2);
  x.kprime.set(2, 1);
  x.a.set(0, 1);
  y.kprime.set(1, 2);
  y.k.set(2, 1);
  y.a.set(-1, 1);
  Hamiltonian hx = single(meta, x), hy = single(meta, y);
  CHECK_THROWS_AS(poisson_bracket(hx, hy), DegreeOverflow);
  CHECK(poisson_bracket(hx, hy, DegreePolicy::kTruncate).empty());
}

TEST_CASE("canonicalize rewrites overlaps as J plus I") {
  auto meta = small_meta();
  Monomial m;
  m.coeff = 2.0;
  m.k.set(1, 2);
  m.k.set(-1, 1);
  m.kprime.set(1, 1);
  Hamiltonian h = canonicalize({m}, meta);
  REQUIRE(h.size() == 2);
  Monomial zj;
  zj.k.set(1, 1);
  zj.k.set(-1, 1);
  zj.b.set(1, 1);
  Monomial zi = zj;
  zi.b = ExponentMap{};
  zi.a.set(1, 1);
  CHECK(h.coeff_of(zj) == cplx(2.0));
  CHECK(h.coeff_of(zi) == cplx(2.0));
  CHECK(max_abs_coefficient(expand_J(h) - single(meta, m, Form::kExpanded)) == 0.0);
}

TEST_CASE("term classes follow b") {
  auto meta = small_meta();
  Monomial r0, r1, r2;
  r0.k.set(2, 1);
  r0.kprime.set(1, 2);
  r1.b.set(2, 1);
  r2.b.set(2, 1);
  r2.b.set(-1, 1);
  Hamiltonian h = Hamiltonian::from_monomials(meta, {r0, r1, r2});
  CHECK(h.part(TermClass::kR0).size() == 1);
  CHECK(h.part(TermClass::kR1).size() == 1);
  CHECK(h.part(TermClass::kR2).size() == 1);
  CHECK(h.resonant_part().size() == 2);
}

TEST_CASE("norm_plus on a single monomial") {
  HamiltonianMeta meta;
  meta.n_max = 6;
  Monomial m;
  m.k.set(3, 2);
  m.kprime.set(6, 1);
  Hamiltonian h = single(meta, m, Form::kExpanded);
  NormContext ctx = NormContext::from(meta, 0.01);
  CHECK(norm_plus(h, ctx) == doctest::Approx(0.279089015735687).epsilon(1e-12));
  Monomial j;
  j.b.set(0, 1);
  CHECK_THROWS_AS(norm_plus(single(meta, j), ctx), RepresentationError);
}

TEST_CASE("evaluate matches expand_J") {
  auto meta = small_meta();
  CounterRng rng(9, 4);
  Hamiltonian h = verify::random_hamiltonian(rng, meta, 6, 6);
  ModeVector<double> amp(2);
  ModeVector<cplx> z(2);
  for (int n = -2; n <= 2; ++n) {
    amp[n] = 0.1 + 0.05 * n * n;
    z[n] = std::polar(0.3, 0.7 * n + 0.1);
  }
  Amplitudes i0 = Amplitudes::from_values(amp);
  cplx a = evaluate(h, z, i0), b = evaluate(expand_J(h), z, i0);
  CHECK(std::abs(a - b) < 1e-13 * (1.0 + std::abs(a)));
}

TEST_CASE("Lie series of a quadratic flow") {
  auto meta = small_meta();
  Monomial z;
  z.k.set(0, 1);
  Monomial j;
  j.b.set(0, 1);
  j.coeff = cplx(0.0, 0.5);
  LieOptions opts;
  opts.ctx = NormContext::from(meta, 0.01);
  LieResult r = lie_transform(single(meta, z), single(meta, j), opts);
  // ad_F z = z / 2, so the series sums to exp(1/2) z
  REQUIRE(r.value.size() == 1);
  CHECK(std::abs(r.value.terms()[0].coeff - cplx(std::exp(0.5))) < 1e-14);
}

TEST_CASE("text round trip") {
  auto meta = small_meta();
  CounterRng rng(3, 4);
  Hamiltonian h = verify::random_hamiltonian(rng, meta, 12, 8);
  Hamiltonian back = parse_hamiltonian(serialize(h));
  CHECK(back.meta() == h.meta());
  CHECK(max_abs_coefficient(back - h) == 0.0);
  CHECK_THROWS_AS(parse_hamiltonian("1 0 | a:{} b:{} k:{} k':{}\n"), ParseError);
  CHECK_THROWS_AS(parse_hamiltonian("# kgt-hamiltonian nmax=2\n1 x | a:{} b:{} k:{} k':{}\n"), ParseError);
}
