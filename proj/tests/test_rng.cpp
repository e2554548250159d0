#include "dickesim/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

using dicke::CounterRng;

TEST_CASE("philox known-answer vectors") {
  // Published 4x32-10 vectors: zero, saturated, and pi-digit inputs.
  auto zero = CounterRng::block({0u, 0u, 0u, 0u}, {0u, 0u});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  auto ones = CounterRng::block(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  auto pi = CounterRng::block(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("identical (seed, stream) reproduces the sequence exactly") {
  CounterRng a(123456789u, 42u);
  CounterRng b(123456789u, 42u);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u32() == b.next_u32());
  CHECK(a.uniform_open() == b.uniform_open());
  CHECK(a.normal() == b.normal());
  CHECK(a.stream() == 42u);
}

TEST_CASE("distinct streams and seeds give distinct output") {
  CounterRng a(7u, 0u), b(7u, 1u), c(8u, 0u);
  std::vector<std::uint32_t> va, vb, vc;
  for (int i = 0; i < 8; ++i) {
    va.push_back(a.next_u32());
    vb.push_back(b.next_u32());
    vc.push_back(c.next_u32());
  }
  CHECK(va != vb);
  CHECK(va != vc);
  CHECK(vb != vc);
}

TEST_CASE("stream id occupies the high counter words") {
  // Stream s, draw 0 must equal the raw block at counter {0,0,s_lo,s_hi}.
  const std::uint64_t s = 0x1122334455667788ull;
  CounterRng r(0xdeadbeefcafef00dull, s);
  auto expect = CounterRng::block(
      {0u, 0u, 0x55667788u, 0x11223344u}, {0xcafef00du, 0xdeadbeefu});
  CHECK(r.next_u32() == expect[0]);
  CHECK(r.next_u32() == expect[1]);
  CHECK(r.next_u32() == expect[2]);
  CHECK(r.next_u32() == expect[3]);
}

TEST_CASE("uniform_open stays strictly inside (0,1) with mean 1/2") {
  CounterRng r(2024u, 0u);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.003);  // ~4 sigma of 1/sqrt(12n)
}

TEST_CASE("normal moments match a standard gaussian") {
  CounterRng r(99u, 3u);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(s3 / n) < 0.05);
}

TEST_CASE("u64 draws do not collide over a long run") {
  CounterRng r(1u, 1u);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 20000; ++i) CHECK(seen.insert(r.next_u64()).second);
}
