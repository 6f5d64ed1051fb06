#include "folbm/rng.hpp"
#include "folbm/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace folbm;

TEST_SUITE("rng") {

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  NormalStream a(42, 3), b(42, 3), c(42, 4), d(43, 3), e(42, 3, StreamDomain::initial_points);
  for (int i = 0; i < 100; ++i) {
    const double va = a.normal();
    CHECK(va == b.normal());
    CHECK(va != c.normal());
    CHECK(va != d.normal());
    CHECK(va != e.normal());
  }
}

TEST_CASE("uniforms lie in the open unit interval") {
  NormalStream s(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  NormalStream s(9, 0);
  std::vector<double> v, v2;
  for (int i = 0; i < 100000; ++i) {
    const double z = s.normal();
    v.push_back(z);
    v2.push_back(z * z);
  }
  const stats::MeanEstimate m = stats::mean_with_error(v);
  const stats::MeanEstimate m2 = stats::mean_with_error(v2);
  CHECK(std::fabs(m.mean) < 3.0 * m.standard_error + 1e-12);
  CHECK(std::fabs(m2.mean - 1.0) < 3.0 * m2.standard_error);
}

}  // TEST_SUITE
