#include "kgt/indices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "kgt/errors.hpp"

namespace kgt {

double weight(std::int64_t n, double sigma) {
  double m = static_cast<double>(std::max<std::int64_t>(1024, n < 0 ? -n : n));
  return std::exp(sigma * std::log(std::log(m)));
}

ExponentMap::ExponentMap(std::initializer_list<Entry> entries) {
  for (const auto& [n, e] : entries) add(n, e);
}

ExponentMap::ExponentMap(const std::vector<Entry>& entries) {
  for (const auto& [n, e] : entries) add(n, e);
}

int ExponentMap::operator[](ModeIndex n) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                             [](const Entry& x, ModeIndex m) { return x.first < m; });
  return (it != entries_.end() && it->first == n) ? it->second : 0;
}

void ExponentMap::set(ModeIndex n, int e) {
  if (e < 0) throw ValidationError("negative exponent at mode " + std::to_string(n));
  auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                             [](const Entry& x, ModeIndex m) { return x.first < m; });
  if (it != entries_.end() && it->first == n) {
    if (e == 0)
      entries_.erase(it);
    else
      it->second = e;
  } else if (e != 0) {
    entries_.insert(it, {n, e});
  }
}

void ExponentMap::add(ModeIndex n, int e) { set(n, (*this)[n] + e); }

int ExponentMap::total() const {
  int t = 0;
  for (const auto& [n, e] : entries_) t += e;
  return t;
}

std::string to_string(const ExponentMap& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [n, e] : m) {
    if (!first) os << ',';
    os << n << ':' << e;
    first = false;
  }
  os << '}';
  return os.str();
}

std::int64_t Rearrangement::at(std::size_t i) const {
  if (i == 0 || i > values_.size()) return 0;
  return values_[i - 1];
}

Rearrangement decreasing_rearrangement(const std::vector<std::pair<std::int64_t, int>>& multiset) {
  std::vector<std::int64_t> v;
  for (const auto& [n, mult] : multiset) {
    std::int64_t a = n < 0 ? -n : n;
    for (int j = 0; j < mult; ++j) v.push_back(a);
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  return Rearrangement(std::move(v));
}

Rearrangement decreasing_rearrangement(const ExponentMap& multiset) {
  std::vector<std::pair<std::int64_t, int>> m;
  for (const auto& [n, e] : multiset) m.emplace_back(n, e);
  return decreasing_rearrangement(m);
}

std::int64_t momentum(const ExponentMap& k, const ExponentMap& kprime) {
  std::int64_t s = 0;
  for (const auto& [n, e] : k) s += static_cast<std::int64_t>(n) * e;
  for (const auto& [n, e] : kprime) s -= static_cast<std::int64_t>(n) * e;
  return s;
}

SmallDivisor::SmallDivisor(std::vector<std::pair<int, int>> ell, double divisor, double floor)
    : Error([&] {
        std::ostringstream os;
        os << "small divisor " << divisor << " below floor " << floor << " for ell={";
        for (std::size_t i = 0; i < ell.size(); ++i)
          os << (i ? "," : "") << ell[i].first << ':' << ell[i].second;
        os << '}';
        return os.str();
      }()),
      ell_(std::move(ell)),
      divisor_(divisor),
      floor_(floor) {}

}  // namespace kgt
