#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "gshs/rng.hpp"

using namespace gshs;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derived seeds separate tags and seeds") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (const char* tag : {"initial", "noise", "energy", "permutation"}) seen.insert(derive_seed(s, tag));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(1, "noise") == derive_seed(1, "noise"));
}

TEST_CASE("open-interval mapping never hits the endpoints") {
  CHECK(u64_to_open01(0) > 0.0);
  CHECK(u64_to_open01(~0ULL) < 1.0);
}

TEST_CASE("stream blocks are pure functions of (seed, stream, index)") {
  RandomStream a(42, 7), b(42, 7), c(42, 8);
  CHECK(a.block(123) == b.block(123));
  CHECK(a.block(123) != c.block(123));
  CHECK(a.block(0) != a.block(1));
}

TEST_CASE("normal draws have unit variance") {
  Rng rng(9, 0);
  const int n = 200000;
  double s = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
  CHECK(std::abs(s4 / n - 3.0) < 0.08);
}

TEST_CASE("uniform draws pass a coarse histogram test") {
  Rng rng(10, 3);
  std::vector<int> bins(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++bins[static_cast<int>(rng.uniform() * 10)];
  double chi2 = 0;
  for (int b : bins) chi2 += (b - n / 10.0) * (b - n / 10.0) / (n / 10.0);
  CHECK(chi2 < 27.9);  // 99.9% quantile, 9 dof
}

TEST_CASE("below is unbiased and in range") {
  Rng rng(1, 1);
  std::vector<int> c(3, 0);
  for (int i = 0; i < 30000; ++i) ++c[rng.below(3)];
  for (int v : c) CHECK(std::abs(v - 10000) < 400);
}

TEST_CASE("shuffle produces a permutation and is reproducible") {
  std::vector<int> a(100), b;
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(5, 2), r2(5, 2);
  shuffle(a.begin(), a.end(), r1);
  shuffle(b.begin(), b.end(), r2);
  CHECK(a == b);
  auto s = a;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 100; ++i) CHECK(s[i] == i);
}

TEST_CASE("normal slots never overlap") {
  RandomStream s(3, 4);
  std::vector<double> a(5), b(5);
  s.normals(0, a);
  s.normals(1, b);
  CHECK(a != b);
  std::vector<double> a2(5);
  s.normals(0, a2);
  CHECK(a == a2);
}
