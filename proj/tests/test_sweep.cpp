#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "magstep/memo.hpp"
#include "magstep/minimize.hpp"
#include "magstep/sweep.hpp"

using namespace magstep;

TEST_CASE("parallel_map matches serial_map in order") {
  auto f = [](std::size_t i) { return std::sin(0.1 * static_cast<double>(i)) * static_cast<double>(i); };
  auto s = serial_map(1000, f);
  for (int threads : {1, 2, 4, 7}) {
    auto p = parallel_map(1000, f, threads);
    REQUIRE(p.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(p[i] == s[i]);
  }
}

TEST_CASE("parallel_map rethrows the lowest-index failure") {
  auto f = [](std::size_t i) -> int {
    if (i == 17) throw std::runtime_error("17");
    if (i == 40) throw std::runtime_error("40");
    return static_cast<int>(i);
  };
  try {
    parallel_map(64, f, 4);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}

TEST_CASE("default thread count can be overridden") {
  int before = default_threads();
  CHECK(before >= 1);
  set_default_threads(3);
  CHECK(default_threads() == 3);
  set_default_threads(before);
}

TEST_CASE("memo computes once per key") {
  Memo<int, int> m;
  int calls = 0;
  auto sq = [&](int k) { return m.get(k, [&] { ++calls; return k * k; }); };
  CHECK(sq(3) == 9);
  CHECK(sq(3) == 9);
  CHECK(sq(4) == 16);
  CHECK(calls == 2);
  CHECK(m.find(4).value() == 16);
  m.clear();
  CHECK_FALSE(m.find(4).has_value());
}

TEST_CASE("scan_and_refine finds an interior parabola minimum") {
  int evals = 0;
  auto f = [&](double x) { ++evals; return (x - 0.3141) * (x - 0.3141) + 2.0; };
  auto m = scan_and_refine(f, -1, 2, 31, 1e-8);
  CHECK(m.interior);
  CHECK(m.x == doctest::Approx(0.3141).epsilon(1e-6));
  CHECK(m.f == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("scan_and_refine reports an end-point minimum without refining") {
  auto m = scan_and_refine([](double x) { return x; }, 0, 1, 11, 1e-8);
  CHECK_FALSE(m.interior);
  CHECK(m.x == 0.0);
}
