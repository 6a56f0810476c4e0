#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace kgt {

using ModeIndex = int;

// ln^sigma(max(1024,|n|)), evaluated as exp(sigma * ln(ln(.))).
double weight(std::int64_t n, double sigma);

// Sparse map mode -> positive exponent, kept sorted by mode.
class ExponentMap {
 public:
  using Entry = std::pair<ModeIndex, int>;

  ExponentMap() = default;
  ExponentMap(std::initializer_list<Entry> entries);
  explicit ExponentMap(const std::vector<Entry>& entries);

  int operator[](ModeIndex n) const;
  void set(ModeIndex n, int e);
  void add(ModeIndex n, int e);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  int total() const;
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const ExponentMap&, const ExponentMap&) = default;
  friend auto operator<=>(const ExponentMap&, const ExponentMap&) = default;

 private:
  std::vector<Entry> entries_;
};

std::string to_string(const ExponentMap& m);

class Rearrangement {
 public:
  explicit Rearrangement(std::vector<std::int64_t> values) : values_(std::move(values)) {}

  // 1-based; 0 beyond the end.
  std::int64_t at(std::size_t i) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<std::int64_t>& values() const { return values_; }

 private:
  std::vector<std::int64_t> values_;
};

// Multiset given as (mode, multiplicity) pairs; modes may be any integers.
Rearrangement decreasing_rearrangement(const std::vector<std::pair<std::int64_t, int>>& multiset);
Rearrangement decreasing_rearrangement(const ExponentMap& multiset);

std::int64_t momentum(const ExponentMap& k, const ExponentMap& kprime);

// Dense vector indexed by mode n in [-N, N].
template <class T>
class ModeVector {
 public:
  ModeVector() = default;
  explicit ModeVector(int nmax, T fill = T{}) : nmax_(nmax), data_(2 * nmax + 1, fill) {}

  int nmax() const { return nmax_; }
  std::size_t size() const { return data_.size(); }
  T& operator[](int n) { return data_[n + nmax_]; }
  const T& operator[](int n) const { return data_[n + nmax_]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const ModeVector&, const ModeVector&) = default;

 private:
  int nmax_ = 0;
  std::vector<T> data_;
};

template <class T>
double max_abs_diff(const ModeVector<T>& a, const ModeVector<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::abs(a.data()[i] - b.data()[i]);
    if (d > m) m = d;
  }
  return m;
}

template <class T>
double max_abs(const ModeVector<T>& a) {
  double m = 0.0;
  for (const auto& x : a.data()) {
    double d = std::abs(x);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace kgt
