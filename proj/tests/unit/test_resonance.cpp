#include <doctest.h>

#include <cmath>

#include "kgt/errors.hpp"
#include "kgt/nlkg.hpp"
#include "kgt/resonance.hpp"

using namespace kgt;

namespace {

FrequencySample free_sample(int n_max) {
  ModelParams p;
  p.n_max = n_max;
  p.V = ModeVector<double>(n_max, 0.0);
  return sample_from_potential(1.0, p.V);
}

}  // namespace

TEST_CASE("integer vectors") {
  IntegerVector ell{{2, 1}, {-1, 3}, {4, 0}};
  REQUIRE(ell.entries().size() == 2);
  CHECK(ell[-1] == 3);
  CHECK(ell[4] == 0);
  CHECK(ell.norm1() == 4);
  CHECK(ell.height() == 3);
  CHECK(ell.negated()[2] == -1);
  CHECK(ell.n3star() == 1);
  CHECK(ell.rearrangement().values() == std::vector<std::int64_t>{2, 1, 1, 1});
}

TEST_CASE("small divisors at zero potential") {
  FrequencySample w = free_sample(5);
  CHECK(small_divisor(IntegerVector{{5, 1}, {2, 1}, {3, -1}}, w) ==
        doctest::Approx(4.17280983092420).epsilon(1e-14));
  CHECK(small_divisor(IntegerVector{{1, 2}, {-2, 1}}, w) == doctest::Approx(5.06449510224598).epsilon(1e-14));
  CHECK(w.in_pi_c());
}

TEST_CASE("nonresonance thresholds") {
  IntegerVector ell{{1, 2}, {-2, 1}};
  CHECK(nr_threshold(ell, 1e-3).log_value == doctest::Approx(-232.180588960964).epsilon(1e-13));
  CHECK(b_bound(ell) == 4096.0);
  CHECK(b_regime(ell, 1.0) == BRegime::kWithB);
  CHECK_THROWS_AS(nr_threshold(IntegerVector{{1, 1}}, 1e-3), ArityError);
  FrequencySample w = free_sample(2);
  CHECK(check_nr_main(ell, w, 1e-3));
  CHECK(check_nr_basic(ell, w, 1e-3));
  // |b| beyond c B + 1 can never be resonant
  CHECK(check_nr_with_b(ell, 5000, w, 1e-3));
}

TEST_CASE("pi_c samples") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    FrequencySample s = sample_pi_c(2.0, 4, 3, i);
    CHECK(s.in_pi_c());
    CHECK(s.c == 2.0);
  }
  CHECK(sample_pi_c(1.0, 3, 3, 7).omega == sample_pi_c(1.0, 3, 3, 7).omega);
}

TEST_CASE("ell enumeration respects the budget") {
  EllBudget b;
  b.max_support = 3;
  b.max_height = 2;
  b.max_n3star = 3;
  auto ells = enumerate_ells(b);
  CHECK_FALSE(ells.empty());
  for (const auto& e : ells) {
    CHECK(e.norm1() >= 3);
    CHECK(e.height() <= 2);
    CHECK(e.entries().size() <= 3);
    CHECK(e.n3star() <= 3);
  }
  CHECK_THROWS_AS(enumerate_ells(b, 10), BudgetOverflow);
}

TEST_CASE("measure estimate limits") {
  EllBudget b;
  b.max_support = 2;
  b.max_height = 2;
  b.max_n3star = 3;
  MeasureEstimate none = estimate_resonant_measure(1.0, 0.0, b, 200, 1, 1);
  CHECK(none.fraction == 0.0);
  MeasureEstimate all = estimate_resonant_measure(1.0, 1e200, b, 200, 1, 2);
  CHECK(all.fraction == 1.0);
  MeasureEstimate one = estimate_resonant_measure(1.0, 1e-3, b, 200, 1, 1);
  MeasureEstimate many = estimate_resonant_measure(1.0, 1e-3, b, 200, 1, 3);
  CHECK(one.fraction == many.fraction);
  CHECK(one.budget == all.budget);
}
