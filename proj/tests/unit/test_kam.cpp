#include <doctest.h>

#include <cmath>
#include <limits>

#include "kgt/errors.hpp"
#include "kgt/kam.hpp"
#include "kgt/nlkg.hpp"

using namespace kgt;

namespace {

ModelParams small_model(double eps) {
  ModelParams p;
  p.n_max = 2;
  p.d_max = 6;
  p.eps = eps;
  p.V = draw_potential(2, 2);
  return p;
}

}  // namespace

TEST_CASE("schedule constants") {
  CHECK(kRho0 == doctest::Approx(1.7157287525381e-3).epsilon(1e-13));
  Schedule s0 = schedule_params(0, 1e-6);
  CHECK(s0.delta == doctest::Approx(2.23191537834515e-4).epsilon(1e-13));
  CHECK(s0.rho == kRho0);
  CHECK(s0.eps == 1e-6);
  CHECK(s0.d == 0.0);
  Schedule s1 = schedule_params(1, 1e-6);
  CHECK(s1.d == doctest::Approx(0.101321183642338).epsilon(1e-13));
  CHECK(s1.rho == doctest::Approx(kRho0 + 3.0 * s0.delta).epsilon(1e-15));
  CHECK(s1.eps == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(divisor_floor(1e-3, s0) == doctest::Approx(1e-3 * std::pow(1e-6, 0.01)));
  CHECK_THROWS_AS(schedule_params(0, 1.0), ValidationError);
  CHECK_THROWS_AS(schedule_params(-1, 0.1), ValidationError);
}

TEST_CASE("homological equation leaves only the resonant part") {
  ModelParams p = small_model(1e-2);
  ModelHamiltonian mh = build_hamiltonian(p);
  Hamiltonian r0 = mh.R.part(TermClass::kR0), r1 = mh.R.part(TermClass::kR1);
  HomologicalResult hom = solve_homological(mh.N, r0, r1, 1e-6);
  Hamiltonian lhs = poisson_bracket(mh.N, hom.F) + r0 + r1 - hom.r0_res - hom.r1_res;
  CHECK(max_abs_coefficient(lhs) < 1e-15);
  CHECK(hom.min_divisor > 0.0);
  CHECK_FALSE(hom.divisors.empty());
  CHECK_THROWS_AS(solve_homological(mh.N, r0, r1, 1e3), SmallDivisor);
}

TEST_CASE("regrouped remainder matches the Lie series") {
  ModelParams p = small_model(1e-2);
  ModelHamiltonian mh = build_hamiltonian(p);
  HomologicalResult hom =
      solve_homological(mh.N, mh.R.part(TermClass::kR0), mh.R.part(TermClass::kR1), 1e-6);
  LieOptions opts;
  opts.ctx = NormContext::from(p.meta(), kRho0);
  Hamiltonian a = regrouped_remainder(mh.R, hom, opts);
  Hamiltonian b = lie_remainder(mh.N, mh.R, hom, opts);
  CHECK(max_abs_coefficient(a - b) < 1e-14);
}

TEST_CASE("frequency map inversion") {
  ModeVector<double> target(1);
  target[-1] = 0.2;
  target[0] = 0.5;
  target[1] = 0.7;
  VectorMap identity = [](const ModeVector<double>& v) { return v; };
  InversionResult id = invert_frequency_map(identity, target, target, 1e-14);
  CHECK(id.iterations <= 1);
  CHECK(max_abs_diff(id.V, target) == 0.0);
  CHECK(id.jacobian_defect < 1e-6);

  VectorMap wobble = [](const ModeVector<double>& v) {
    ModeVector<double> out = v;
    for (double& x : out.data()) x += 0.1 * std::sin(x);
    return out;
  };
  InversionResult r = invert_frequency_map(wobble, target, target, 1e-13);
  CHECK(max_abs_diff(wobble(r.V), target) < 1e-12);
  CHECK(r.iterations > 1);
  Matrix j = finite_difference_jacobian(wobble, r.V, 1e-7);
  CHECK(j[1][1] == doctest::Approx(1.0 + 0.1 * std::cos(r.V[0])).epsilon(1e-6));
  CHECK(j[0][1] == 0.0);
}

TEST_CASE("shift vanishes at physical amplitudes") {
  ModelParams p = small_model(1e-2);
  ModelHamiltonian mh = build_hamiltonian(p);
  Hamiltonian r1 = mh.R.part(TermClass::kR1).resonant_part();
  Amplitudes i0 = initial_amplitudes(p);
  CHECK(shift_vanishes(r1, i0));
  ModeVector<double> amp(2, 0.01);
  Amplitudes big = Amplitudes::from_values(amp);
  CHECK_FALSE(shift_vanishes(r1, big));
  auto shift = frequency_shift(r1, big);
  auto bound = shift_bound(r1, big, NormContext::from(p.meta(), kRho0));
  for (int n = -2; n <= 2; ++n) CHECK(std::abs(shift[n]) <= bound[n] * (1.0 + 1e-12));
}

TEST_CASE("driver on a small model") {
  ModelParams p = small_model(1e-6);
  KamReport rep = run_kam(p, 1e-3, 2);
  CHECK(rep.status == "ok");
  REQUIRE(rep.trace.size() == 3);
  CHECK(rep.trace[0].norm_r0 > rep.trace[1].norm_r0);
  CHECK(rep.decay_exponents.size() == 2);
  CHECK(rep.decay_exponents[0] > 1.4);
  CHECK(rep.torus_residual < 1e-12);
  for (const auto& ell : rep.divisor_indices) CHECK_FALSE(is_mirror_pair(ell));
}

TEST_CASE("driver at eps = 0") {
  ModelParams p = small_model(0.0);
  KamReport rep = run_kam(p, 1e-3, 2);
  CHECK(rep.status == "ok");
  CHECK(rep.torus_residual == 0.0);
  for (const auto& t : rep.trace) CHECK(t.norm_r0 == 0.0);
}

TEST_CASE("general path with visible amplitudes") {
  ModelParams p = small_model(1e-3);
  KamOptions opts;
  opts.amplitudes = Amplitudes::from_values(ModeVector<double>(2, 0.01));
  KamReport rep = run_kam(p, 1e-3, 2, opts);
  CHECK(rep.status == "ok");
  CHECK_FALSE(rep.trace[0].fast_path);
  CHECK(rep.trace[0].newton_iterations >= 1);
  CHECK(rep.torus_residual < 1e-10);
}

TEST_CASE("mirror pairs") {
  CHECK(is_mirror_pair(IntegerVector{{2, 1}, {-2, -1}}));
  CHECK_FALSE(is_mirror_pair(IntegerVector{{2, 1}, {-2, 1}}));
}
