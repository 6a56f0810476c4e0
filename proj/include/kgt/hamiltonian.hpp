#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kgt/indices.hpp"

namespace kgt {

using cplx = std::complex<double>;

inline constexpr int kMaxModes = 15;
inline constexpr int kSlots = 2 * kMaxModes + 1;
inline constexpr int kMaxDegree = 16;

// coeff * I(0)^a J^b z^k zbar^kprime
struct Monomial {
  cplx coeff{1.0, 0.0};
  ExponentMap a, b, k, kprime;

  // sum over n of 2a_n + 2b_n + k_n + k'_n
  int degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

enum class TermClass { kR0, kR1, kR2 };
enum class Form { kReduced, kExpanded };
enum class DegreePolicy { kThrow, kTruncate };

const char* to_string(TermClass c);
const char* to_string(Form f);

struct HamiltonianMeta {
  double sigma = 3.0;
  double r = 1.5;
  double c = 1.0;
  int n_max = 4;
  int d_max = 8;

  void validate() const;
  friend bool operator==(const HamiltonianMeta&, const HamiltonianMeta&) = default;
};

struct NormContext {
  double sigma = 3.0;
  double rho = 0.01;
  double r = 1.5;
  double c = 1.0;

  void validate() const;
  static NormContext from(const HamiltonianMeta& meta, double rho) {
    return NormContext{meta.sigma, rho, meta.r, meta.c};
  }
};

// I_n(0) stored by logarithm; the physical amplitudes underflow a double.
struct Amplitudes {
  ModeVector<double> log_values;

  static Amplitudes from_values(const ModeVector<double>& values);
  static Amplitudes zeros(int nmax);
  double value(int n) const;
  double log_value(int n) const { return log_values[n]; }
  int nmax() const { return log_values.nmax(); }
};

// Packed exponent record: sorted (field, slot, exponent) triples, zero padded.
struct TermKey {
  std::array<std::uint16_t, kMaxDegree> e{};

  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend auto operator<=>(const TermKey&, const TermKey&) = default;

  template <class H>
  friend H AbslHashValue(H h, const TermKey& k) {
    return H::combine_contiguous(std::move(h), k.e.data(), k.e.size());
  }
};

struct Term {
  TermKey key;
  cplx coeff;
};

class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(const HamiltonianMeta& meta, Form form = Form::kReduced);

  // Aggregates the monomials as given. Reduced form rejects overlapping z/zbar
  // supports, expanded form rejects nonzero b.
  static Hamiltonian from_monomials(const HamiltonianMeta& meta, const std::vector<Monomial>& monos,
                                    Form form = Form::kReduced);

  const HamiltonianMeta& meta() const { return meta_; }
  Form form() const { return form_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  Monomial monomial(std::size_t i) const;
  std::vector<Monomial> monomials() const;
  // Coefficient of the term with the exponents of m (m.coeff ignored); 0 if absent.
  cplx coeff_of(const Monomial& m) const;
  TermClass term_class(std::size_t i) const;
  int degree(std::size_t i) const;
  int max_degree() const;

  Hamiltonian part(TermClass c) const;
  // Terms with k = k' = 0.
  Hamiltonian resonant_part() const;
  Hamiltonian scaled(cplx s) const;
  Hamiltonian with_meta(const HamiltonianMeta& meta) const;

  friend Hamiltonian operator+(const Hamiltonian& x, const Hamiltonian& y);
  friend Hamiltonian operator-(const Hamiltonian& x, const Hamiltonian& y);

 private:
  friend class TermAccumulator;
  HamiltonianMeta meta_;
  Form form_ = Form::kReduced;
  std::vector<Term> terms_;
};

// Hash-map accumulator producing a canonical (key-sorted) Hamiltonian.
class TermAccumulator {
 public:
  TermAccumulator(const HamiltonianMeta& meta, Form form);
  TermAccumulator(TermAccumulator&&) noexcept;
  TermAccumulator& operator=(TermAccumulator&&) noexcept;
  ~TermAccumulator();

  void add(const TermKey& key, cplx c);
  void add(const Hamiltonian& h, cplx scale = 1.0);
  std::size_t size() const;
  Hamiltonian finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  HamiltonianMeta meta_;
  Form form_;
};

TermKey make_key(const Monomial& m);
Monomial key_to_monomial(const TermKey& key, cplx coeff);

// Rewrites every z_n zbar_n pair as J_n + I_n(0) and aggregates. I(0) stays
// symbolic (the exponent a), so no amplitude values are needed.
Hamiltonian canonicalize(const std::vector<Monomial>& raw, const HamiltonianMeta& meta);

// J_n -> z_n zbar_n - I_n(0); result has b = 0 everywhere.
Hamiltonian expand_J(const Hamiltonian& h);

cplx evaluate(const Hamiltonian& h, const ModeVector<cplx>& z, const ModeVector<cplx>& zbar,
              const Amplitudes& i0);
cplx evaluate(const Hamiltonian& h, const ModeVector<cplx>& z, const Amplitudes& i0);

double norm_plus(const Hamiltonian& h, const NormContext& ctx);
double norm(const Hamiltonian& h, const NormContext& ctx);
// log of the per-term weight used by both norms (b counted like a).
double log_term_weight(const Monomial& m, const NormContext& ctx);

Hamiltonian poisson_bracket(const Hamiltonian& r, const Hamiltonian& f,
                            DegreePolicy policy = DegreePolicy::kThrow);

struct LieOptions {
  NormContext ctx;
  // Negative means 1e-16 * norm(H).
  double tail_tol = -1.0;
  int max_brackets = 25;
  DegreePolicy policy = DegreePolicy::kTruncate;
};

struct LieResult {
  Hamiltonian value;
  double tail_bound = 0.0;
  int brackets = 0;
  // norm of H^{(n)}/n! for n = 0, 1, ...
  std::vector<double> term_norms;
};

LieResult lie_transform(const Hamiltonian& h, const Hamiltonian& f, const LieOptions& opts);

// Largest |coefficient| difference between two Hamiltonians, relative to the
// larger coefficient at the same key (absolute where both are tiny).
double max_relative_difference(const Hamiltonian& x, const Hamiltonian& y, double abs_floor = 0.0);
double max_abs_coefficient(const Hamiltonian& h);

}  // namespace kgt
