#include <doctest.h>

#include <cmath>

#include "kgt/errors.hpp"
#include "kgt/nlkg.hpp"
#include "kgt/verify.hpp"

using namespace kgt;

namespace {

ModelParams flat(int n_max, double eps) {
  ModelParams p;
  p.n_max = n_max;
  p.V = ModeVector<double>(n_max, 0.0);
  p.eps = eps;
  return p;
}

}  // namespace

TEST_CASE("quartic coefficient for a repeated mode") {
  ModelParams p = flat(1, 1e-3);
  Monomial target;
  target.k.set(-1, 2);
  target.kprime.set(-1, 2);
  bool found = false;
  for (const auto& m : quartic_terms(p)) {
    if (m.k == target.k && m.kprime == target.kprime) {
      CHECK(m.coeff.real() == doctest::Approx(4.77464829275686e-4).epsilon(1e-13));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("quartic terms conserve momentum and agree with ordered tuples") {
  ModelParams p = flat(2, 1e-2);
  p.V = draw_potential(2, 4);
  for (const auto& m : quartic_terms(p)) {
    CHECK(momentum(m.k, m.kprime) == 0);
    CHECK(m.degree() == 4);
  }
  Hamiltonian built = build_hamiltonian(p).R;
  CHECK(max_relative_difference(built, verify::ordered_tuple_quartic(p), 1e-18) < 1e-12);
}

TEST_CASE("frequencies and the normal form") {
  ModelParams p = flat(3, 0.0);
  p.V[3] = 1.0;
  auto w = frequencies(p);
  CHECK(w[3] == doctest::Approx(3.31662479035540).epsilon(1e-14));
  CHECK(w[0] == 1.0);
  ModelHamiltonian mh = build_hamiltonian(p);
  CHECK(mh.R.empty());
  CHECK(max_abs_diff(normal_form_frequencies(mh.N), w) < 1e-15);
  CHECK(mode_scale(1.0, 0, 0.0) == 1.0);
}

TEST_CASE("potential draws are reproducible and in range") {
  auto a = draw_potential(4, 17), b = draw_potential(4, 17), c = draw_potential(4, 18);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (double v : a.data()) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("initial amplitudes are kept as logarithms") {
  ModelParams p = flat(2, 0.0);
  Amplitudes i0 = initial_amplitudes(p);
  double expect = std::log(9.0 / 16.0) - 2.0 * p.r * weight(0, p.sigma);
  CHECK(i0.log_value(1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(i0.value(1) == 0.0);
}

TEST_CASE("model validation") {
  ModelParams p = flat(2, 0.1);
  p.c = 0.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = flat(2, -0.1);
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = flat(2, 0.1);
  p.V = ModeVector<double>(3, 0.0);
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("gradient evaluator matches finite differences") {
  ModelParams p = flat(2, 0.3);
  p.V = draw_potential(2, 1);
  p.d_max = 6;
  Hamiltonian h = build_hamiltonian(p).R;
  ModeVector<double> amp(2);
  ModeVector<cplx> z(2);
  for (int n = -2; n <= 2; ++n) {
    amp[n] = 0.05;
    z[n] = std::polar(0.2 + 0.02 * n, 0.3 * n);
  }
  Amplitudes i0 = Amplitudes::from_values(amp);
  GradientEvaluator g(h, i0);
  ModeVector<cplx> grad = g(z);
  // dH/dzbar = (dH/dx + i dH/dy) / 2 for real H
  const double step = 1e-6;
  for (int n = -2; n <= 2; ++n) {
    auto shifted = [&](cplx dz) {
      ModeVector<cplx> w = z;
      w[n] += dz;
      return evaluate(h, w, i0).real();
    };
    double dx = (shifted(step) - shifted(-step)) / (2 * step);
    double dy = (shifted(cplx(0, step)) - shifted(cplx(0, -step))) / (2 * step);
    CHECK(std::abs(grad[n] - cplx(dx, dy) / 2.0) < 1e-7);
  }
}
