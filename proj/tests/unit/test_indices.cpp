#include <doctest.h>

#include "kgt/indices.hpp"
#include "kgt/random.hpp"

using namespace kgt;

TEST_CASE("weight is flat below 1024") {
  CHECK(weight(0, 3.0) == doctest::Approx(333.024651988929).epsilon(1e-14));
  CHECK(weight(0, 2.5) == doctest::Approx(126.492172784383).epsilon(1e-14));
  CHECK(weight(-1024, 3.0) == weight(7, 3.0));
  CHECK(weight(5000, 3.0) > weight(1024, 3.0));
  CHECK(weight(-5000, 3.0) == weight(5000, 3.0));
}

TEST_CASE("exponent maps stay sorted and drop zeros") {
  ExponentMap m{{3, 1}, {-2, 2}, {3, 1}};
  REQUIRE(m.size() == 2);
  CHECK(m.entries()[0] == ExponentMap::Entry{-2, 2});
  CHECK(m[3] == 2);
  CHECK(m[0] == 0);
  CHECK(m.total() == 4);
  m.set(3, 0);
  CHECK(m.size() == 1);
  CHECK(to_string(m) == "{-2:2}");
}

TEST_CASE("decreasing rearrangement repeats by multiplicity") {
  Rearrangement r = decreasing_rearrangement(std::vector<std::pair<std::int64_t, int>>{{-5, 1}, {2, 2}, {0, 1}});
  CHECK(r.values() == std::vector<std::int64_t>{5, 2, 2, 0});
  CHECK(r.at(1) == 5);
  CHECK(r.at(3) == 2);
  CHECK(r.at(9) == 0);
}

TEST_CASE("momentum") {
  CHECK(momentum(ExponentMap{{3, 2}}, ExponentMap{{6, 1}}) == 0);
  CHECK(momentum(ExponentMap{{1, 1}}, ExponentMap{{-1, 1}}) == 2);
}

TEST_CASE("mode vectors index from -N") {
  ModeVector<int> v(2, 0);
  CHECK(v.size() == 5);
  v[-2] = 7;
  CHECK(v.data().front() == 7);
}

TEST_CASE("counter streams are order independent") {
  CounterRng a(11, 3), b(11, 3), c(11, 4);
  double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
  CHECK(counter_uniform(11, 3, 1) == a.uniform());
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}
