#include "kgt/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "kgt/errors.hpp"
#include "kgt/random.hpp"

namespace kgt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_floor(int n) { return std::log(static_cast<double>(std::max(1024, std::abs(n)))); }

Threshold from_log(double lg) { return Threshold{lg, std::exp(lg)}; }

double log_gamma(double gamma) {
  if (gamma < 0.0) throw ValidationError("gamma must be nonnegative");
  return gamma == 0.0 ? kNegInf : std::log(gamma);
}

// |d| >= threshold, compared on logs when the threshold is not representable.
bool clears(double d, const Threshold& t) {
  double a = std::abs(d);
  if (t.value > 1e-300) return a >= t.value;
  if (a >= 1e-300) return true;
  return std::log(a) >= t.log_value;
}

void require_arity(const IntegerVector& ell) {
  if (ell.norm1() < 3) throw ArityError("nonresonance threshold needs |ell| >= 3");
}

double neumaier(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

IntegerVector::IntegerVector(std::initializer_list<Entry> entries)
    : IntegerVector(std::vector<Entry>(entries)) {}

IntegerVector::IntegerVector(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  for (const auto& [n, v] : entries) {
    if (!entries_.empty() && entries_.back().first == n)
      entries_.back().second += v;
    else
      entries_.push_back({n, v});
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0; });
}

int IntegerVector::operator[](int n) const {
  for (const auto& [m, v] : entries_)
    if (m == n) return v;
  return 0;
}

int IntegerVector::norm1() const {
  int s = 0;
  for (const auto& [n, v] : entries_) s += std::abs(v);
  return s;
}

int IntegerVector::height() const {
  int h = 0;
  for (const auto& [n, v] : entries_) h = std::max(h, std::abs(v));
  return h;
}

IntegerVector IntegerVector::negated() const {
  std::vector<Entry> e = entries_;
  for (auto& x : e) x.second = -x.second;
  return IntegerVector(std::move(e));
}

Rearrangement IntegerVector::rearrangement() const {
  std::vector<std::pair<std::int64_t, int>> m;
  for (const auto& [n, v] : entries_) m.emplace_back(n, std::abs(v));
  return decreasing_rearrangement(m);
}

bool FrequencySample::in_pi_c() const {
  for (int n = -omega.nmax(); n <= omega.nmax(); ++n) {
    double base = c * std::sqrt(c * c + double(n) * n);
    double r = omega[n] - base;
    if (r < 0.0 || r > c / (3.0 * std::sqrt(c * c + double(n) * n + 1.0))) return false;
  }
  return true;
}

FrequencySample sample_from_potential(double c, const ModeVector<double>& V) {
  FrequencySample s{c, ModeVector<double>(V.nmax())};
  for (int n = -V.nmax(); n <= V.nmax(); ++n) s.omega[n] = c * std::sqrt(c * c + double(n) * n + V[n]);
  return s;
}

FrequencySample sample_pi_c(double c, int n_max, std::uint64_t seed, std::uint64_t sample_index) {
  FrequencySample s{c, ModeVector<double>(n_max)};
  const std::uint64_t width = 2 * static_cast<std::uint64_t>(n_max) + 1;
  for (int n = -n_max; n <= n_max; ++n) {
    double u = counter_uniform(seed, streams::kFrequencySamples,
                               sample_index * width + static_cast<std::uint64_t>(n + n_max));
    double hi = c / (3.0 * std::sqrt(c * c + double(n) * n + 1.0));
    s.omega[n] = c * std::sqrt(c * c + double(n) * n) + u * hi;
  }
  return s;
}

double small_divisor(const IntegerVector& ell, const FrequencySample& omega) {
  std::vector<double> terms;
  terms.reserve(ell.entries().size());
  for (const auto& [n, v] : ell.entries()) {
    if (n < -omega.omega.nmax() || n > omega.omega.nmax())
      throw ValidationError("ell support outside the truncation range");
    terms.push_back(v * omega.omega[n]);
  }
  return neumaier(terms);
}

namespace {

// sum over |n| <= n3*, ell_n != 0 of (p log|ell_n| + q log floor(n))
double partial_log_product(const IntegerVector& ell, double p, double q) {
  std::int64_t n3 = ell.n3star();
  double s = 0.0;
  for (const auto& [n, v] : ell.entries())
    if (std::abs(n) <= n3) s += p * std::log(std::abs(v)) + q * log_floor(n);
  return s;
}

double partial_divisor(const IntegerVector& ell, const FrequencySample& omega, double extra) {
  std::int64_t n3 = ell.n3star();
  std::vector<double> terms{extra};
  for (const auto& [n, v] : ell.entries())
    if (std::abs(n) <= n3) terms.push_back(v * omega.omega[n]);
  return neumaier(terms);
}

}  // namespace

Threshold nr_threshold(const IntegerVector& ell, double gamma) {
  require_arity(ell);
  return from_log(log_gamma(gamma) - 5.0 * partial_log_product(ell, 5.0, 6.0));
}

bool check_nr_main(const IntegerVector& ell, const FrequencySample& omega, double gamma) {
  return clears(small_divisor(ell, omega), nr_threshold(ell, gamma));
}

Threshold nr_basic_threshold(const IntegerVector& ell, double gamma) {
  if (ell.empty()) throw ArityError("ell must be nonzero");
  double s = 0.0;
  for (const auto& [n, v] : ell.entries()) s += 2.0 * std::log(std::abs(v)) + 3.0 * log_floor(n);
  return from_log(log_gamma(gamma) / 3.0 - s);
}

bool check_nr_basic(const IntegerVector& ell, const FrequencySample& omega, double gamma) {
  return clears(small_divisor(ell, omega), nr_basic_threshold(ell, gamma));
}

double b_bound(const IntegerVector& ell) { return 2.0 * std::exp(partial_log_product(ell, 1.0, 1.0)); }

BRegime b_regime(const IntegerVector& ell, double c) {
  double b = b_bound(ell);
  return 2.0 * std::sqrt(2.0) * b * b >= c ? BRegime::kWithB : BRegime::kDirect;
}

Threshold nr_with_b_threshold(const IntegerVector& ell, double gamma) {
  require_arity(ell);
  return from_log(log_gamma(gamma) / 3.0 - partial_log_product(ell, 5.0, 6.0));
}

bool check_nr_with_b_direct(const IntegerVector& ell, long long b, const FrequencySample& omega, double gamma) {
  Threshold t = nr_with_b_threshold(ell, gamma);
  return clears(partial_divisor(ell, omega, static_cast<double>(b) * omega.c), t);
}

bool check_nr_with_b(const IntegerVector& ell, long long b, const FrequencySample& omega, double gamma) {
  require_arity(ell);
  if (std::abs(static_cast<double>(b)) > omega.c * b_bound(ell) + 1.0) return true;
  return check_nr_with_b_direct(ell, b, omega, gamma);
}

std::vector<IntegerVector> enumerate_ells(const EllBudget& budget, std::size_t limit) {
  const int nm = budget.sites();
  const int sites = 2 * nm + 1;
  std::vector<IntegerVector> out;
  std::vector<int> pick, vals;
  for (int supp = 1; supp <= budget.max_support && supp <= sites; ++supp) {
    for (int h = 1; h <= budget.max_height; ++h) {
      pick.assign(supp, 0);
      for (int i = 0; i < supp; ++i) pick[i] = i;
      while (true) {
        // all value vectors in ([-h,h]\{0})^supp with max |v| == h, lexicographic
        vals.assign(supp, -h);
        while (true) {
          int hmax = 0, l1 = 0;
          for (int v : vals) {
            hmax = std::max(hmax, std::abs(v));
            l1 += std::abs(v);
          }
          if (hmax == h && l1 >= 3) {
            std::vector<IntegerVector::Entry> e;
            for (int i = 0; i < supp; ++i) e.push_back({pick[i] - nm, vals[i]});
            IntegerVector ell(std::move(e));
            if (ell.n3star() <= budget.max_n3star) {
              if (out.size() >= limit)
                throw BudgetOverflow("ell enumeration exceeds " + std::to_string(limit) + " vectors");
              out.push_back(std::move(ell));
            }
          }
          int i = supp - 1;
          while (i >= 0) {
            int next = vals[i] + 1;
            if (next == 0) next = 1;
            if (next <= h) {
              vals[i] = next;
              break;
            }
            vals[i] = -h;
            --i;
          }
          if (i < 0) break;
        }
        int i = supp - 1;
        while (i >= 0 && pick[i] == sites - supp + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < supp; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
  }
  return out;
}

MeasureEstimate estimate_resonant_measure(double c, double gamma, const EllBudget& budget, long samples,
                                          std::uint64_t seed, int threads) {
  if (samples < 100) throw ValidationError("at least 100 samples are required");
  if (!(c >= 1.0)) throw ValidationError("c must be at least 1");
  auto ells = enumerate_ells(budget);

  MeasureEstimate est;
  est.samples = samples;
  est.budget = ells.size();
  est.gamma = gamma;
  est.c = c;
  std::vector<Threshold> thr;
  thr.reserve(ells.size());
  for (const auto& e : ells) {
    thr.push_back(nr_threshold(e, gamma));
    (b_regime(e, c) == BRegime::kWithB ? est.with_b_regime : est.direct_regime) += 1;
  }

  // flattened (site offset, ell_n) pairs for the hot loop
  const int nm = budget.sites();
  std::vector<std::uint32_t> start{0};
  std::vector<int> site;
  std::vector<double> coef;
  for (const auto& e : ells) {
    for (const auto& [n, v] : e.entries()) {
      site.push_back(n + nm);
      coef.push_back(v);
    }
    start.push_back(static_cast<std::uint32_t>(site.size()));
  }

  auto count_range = [&](long lo, long hi) {
    long bad = 0;
    for (long i = lo; i < hi; ++i) {
      FrequencySample w = sample_pi_c(c, nm, seed, static_cast<std::uint64_t>(i));
      const double* om = w.omega.data().data();
      for (std::size_t j = 0; j < ells.size(); ++j) {
        double sum = 0.0, comp = 0.0;
        for (std::uint32_t q = start[j]; q < start[j + 1]; ++q) {
          double x = coef[q] * om[site[q]];
          double t = sum + x;
          comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
          sum = t;
        }
        if (!clears(sum + comp, thr[j])) {
          ++bad;
          break;
        }
      }
    }
    return bad;
  };

  threads = std::max(1, threads);
  long bad = 0;
  if (threads == 1) {
    bad = count_range(0, samples);
  } else {
    std::vector<long> counts(threads, 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      long lo = samples * t / threads, hi = samples * (t + 1) / threads;
      pool.emplace_back([&, t, lo, hi] { counts[t] = count_range(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (long x : counts) bad += x;
  }
  est.fraction = static_cast<double>(bad) / samples;
  est.stderr_ = std::sqrt(est.fraction * (1.0 - est.fraction) / samples);
  return est;
}

}  // namespace kgt
