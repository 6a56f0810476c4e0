#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include "kgt/indices.hpp"

namespace kgt {

// Sparse integer vector ell: mode -> nonzero integer, sorted by mode.
class IntegerVector {
 public:
  using Entry = std::pair<int, int>;

  IntegerVector() = default;
  IntegerVector(std::initializer_list<Entry> entries);
  explicit IntegerVector(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  int operator[](int n) const;
  int norm1() const;
  int height() const;
  bool empty() const { return entries_.empty(); }
  IntegerVector negated() const;
  // n_i^*: |n| repeated |ell_n| times, sorted nonincreasing.
  Rearrangement rearrangement() const;
  std::int64_t n3star() const { return rearrangement().at(3); }

  friend bool operator==(const IntegerVector&, const IntegerVector&) = default;
  friend auto operator<=>(const IntegerVector&, const IntegerVector&) = default;

 private:
  std::vector<Entry> entries_;
};

struct FrequencySample {
  double c = 1.0;
  ModeVector<double> omega;

  // omega_n - c sqrt(c^2+n^2) in [0, c / (3 sqrt(c^2+n^2+1))] for every n
  bool in_pi_c() const;
};

FrequencySample sample_from_potential(double c, const ModeVector<double>& V);
// Each r_n uniform on its Pi_c interval, drawn from (seed, stream, counter).
FrequencySample sample_pi_c(double c, int n_max, std::uint64_t seed, std::uint64_t sample_index);

// Compensated sum of ell_n omega_n.
double small_divisor(const IntegerVector& ell, const FrequencySample& omega);

struct Threshold {
  double log_value;  // -inf when gamma = 0
  double value;      // 0 when the value underflows
};

// gamma * (prod_{|n| <= n3*, ell_n != 0} 1/(|ell_n|^5 floor(n)^6))^5
Threshold nr_threshold(const IntegerVector& ell, double gamma);
bool check_nr_main(const IntegerVector& ell, const FrequencySample& omega, double gamma);

// gamma^(1/3) prod_{ell_n != 0} 1/(|ell_n|^2 floor(n)^3)
Threshold nr_basic_threshold(const IntegerVector& ell, double gamma);
bool check_nr_basic(const IntegerVector& ell, const FrequencySample& omega, double gamma);

// B(ell) = 2 prod_{|n| <= n3*, ell_n != 0} |ell_n| floor(n)
double b_bound(const IntegerVector& ell);
enum class BRegime { kWithB, kDirect };  // 2 sqrt(2) B^2 >= c, or not
BRegime b_regime(const IntegerVector& ell, double c);
Threshold nr_with_b_threshold(const IntegerVector& ell, double gamma);
bool check_nr_with_b(const IntegerVector& ell, long long b, const FrequencySample& omega, double gamma);
// The same predicate without the |b| > cB+1 shortcut.
bool check_nr_with_b_direct(const IntegerVector& ell, long long b, const FrequencySample& omega, double gamma);

struct EllBudget {
  int max_support = 3;
  int max_height = 3;
  int max_n3star = 8;
  int n_max = -1;  // sites |n| <= n_max; negative means max_n3star
  int sites() const { return n_max < 0 ? max_n3star : n_max; }
};

inline constexpr std::size_t kEllBudgetLimit = 100000000;

// Ordered by support size, then height, then lexicographically.
std::vector<IntegerVector> enumerate_ells(const EllBudget& budget, std::size_t limit = kEllBudgetLimit);

struct MeasureEstimate {
  double fraction = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
  std::size_t budget = 0;  // number of enumerated ell
  double gamma = 0.0;
  double c = 1.0;
  std::size_t with_b_regime = 0;  // ell with 2 sqrt(2) B^2 >= c
  std::size_t direct_regime = 0;
};

// One-sided: only the enumerated ell are tested, so this is a lower bound on
// the resonant fraction.
MeasureEstimate estimate_resonant_measure(double c, double gamma, const EllBudget& budget, long samples,
                                          std::uint64_t seed, int threads = 1);

}  // namespace kgt
