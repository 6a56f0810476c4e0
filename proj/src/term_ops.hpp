#pragma once

// Dense per-slot exponent arrays used by the algebra kernels.

#include <array>
#include <bit>
#include <cstdint>

#include "kgt/hamiltonian.hpp"

namespace kgt::detail {

enum Field : int { kA = 0, kB = 1, kK = 2, kKp = 3 };

struct Dense {
  std::array<std::array<std::uint8_t, 32>, 4> x{};
  std::uint32_t used = 0;  // slots with any nonzero field

  int degree() const {
    int d = 0;
    for (std::uint32_t u = used; u; u &= u - 1) {
      int s = std::countr_zero(u);
      d += 2 * x[kA][s] + 2 * x[kB][s] + x[kK][s] + x[kKp][s];
    }
    return d;
  }
  std::uint32_t mask(int field) const {
    std::uint32_t m = 0;
    for (std::uint32_t u = used; u; u &= u - 1) {
      int s = std::countr_zero(u);
      if (x[field][s]) m |= 1u << s;
    }
    return m;
  }
  void refresh_used(int s) {
    if (x[kA][s] | x[kB][s] | x[kK][s] | x[kKp][s])
      used |= 1u << s;
    else
      used &= ~(1u << s);
  }
};

inline int slot_of(int n) { return n + kMaxModes; }
inline int mode_of(int slot) { return slot - kMaxModes; }

inline Dense decode(const TermKey& key) {
  Dense d;
  for (std::uint16_t v : key.e) {
    if (!v) break;
    int field = v >> 10;
    int slot = (v >> 5) & 31;
    d.x[field][slot] = static_cast<std::uint8_t>(v & 31);
    d.used |= 1u << slot;
  }
  return d;
}

// Caller guarantees exponents <= 31 and at most kMaxDegree nonzero entries.
TermKey encode(const Dense& d);

// Number of nonzero entries, to guard encode.
inline int entry_count(const Dense& d) {
  int c = 0;
  for (std::uint32_t u = d.used; u; u &= u - 1) {
    int s = std::countr_zero(u);
    c += (d.x[kA][s] != 0) + (d.x[kB][s] != 0) + (d.x[kK][s] != 0) + (d.x[kKp][s] != 0);
  }
  return c;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Replace every z_n^m zbar_n^m overlap by (J_n + I_n)^m and add into acc.
void emit_reduced(Dense d, cplx c, TermAccumulator& acc);

Dense dense_of(const Monomial& m);

}  // namespace kgt::detail
