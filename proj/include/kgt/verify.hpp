#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgt/hamiltonian.hpp"
#include "kgt/nlkg.hpp"
#include "kgt/random.hpp"

namespace kgt::verify {

// Random zero-momentum monomial with modes |n| <= meta.n_max and degree in
// [2, max_degree]; b is drawn only when with_b is set.
Monomial random_monomial(CounterRng& rng, const HamiltonianMeta& meta, int max_degree, bool with_b = true);
Hamiltonian random_hamiltonian(CounterRng& rng, const HamiltonianMeta& meta, int terms, int max_degree,
                               bool with_b = true);

// Bracket through the b = 0 form: expand both sides, differentiate plain
// z/zbar monomials, canonicalize the result.
Hamiltonian oracle_bracket(const Hamiltonian& r, const Hamiltonian& f);

// (2/pi)^2 int_{-pi}^{pi} e^{i m x} dx on a uniform 512-point grid.
cplx quadrature_integral(int m);
// Sum over all ordered 4-tuples of (n, sign), coefficients from quadrature.
Hamiltonian ordered_tuple_quartic(const ModelParams& p);

// sum (2a+k+k') ln^sigma floor(n) - 2 ln^sigma floor(n_1^*) - (1/2) sum_{i>=3} ln^sigma floor(n_i^*)
// for the multiset of |n| with multiplicities given.
double rearrangement_gap(const std::vector<std::pair<std::int64_t, int>>& multiset, double sigma);

// log of the constants in the bracket and norm-equivalence bounds.
double log_bracket_constant(double delta2, double sigma);
double log_equivalence_constant(double delta, double sigma);
// log of sum_a exp(-delta sum a_n ln^sigma floor(n)) over |n| <= n_max, |a| <= d_max,
// and of its bound.
double log_amplitude_sum(int n_max, int d_max, double delta, double sigma);
double log_amplitude_sum_bound(double delta, double sigma);

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriteria = 8;
CheckResult run_criterion(int id);

}  // namespace kgt::verify
