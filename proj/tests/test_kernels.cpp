#include "folbm/kernels.hpp"
#include "folbm/rng.hpp"
#include "folbm/types.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace folbm;
namespace k = folbm::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t stream, double scale = 1.0) {
  NormalStream s(77, stream);
  std::vector<double> v(n);
  for (double& x : v) x = scale * s.normal();
  return v;
}

bool close(double a, double b, double rel = 1e-13) {
  return std::fabs(a - b) <= rel * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  const std::vector<double> v{1.0, 3.0, 2.0, 6.0};
  CHECK(k::scalar::sum_sq_diff(v.data(), v.size()) == 4.0 + 1.0 + 16.0);
  const k::SumStats s = k::scalar::sum_and_sum_sq(v.data(), v.size());
  CHECK(s.sum == 12.0);
  CHECK(s.sum_sq == 50.0);
  CHECK(k::scalar::dot(v.data(), v.data(), v.size()) == 50.0);
  const std::vector<double> w{1.0, 2.5, 2.0, 9.0};
  CHECK(k::scalar::max_abs_diff(v.data(), w.data(), v.size()) == 3.0);
  const std::vector<double> ang{-0.1, 0.0, 3.2, 6.3, kTwoPi};
  std::vector<int> idx(ang.size());
  k::scalar::bin_indices(ang.data(), ang.size(), 4, idx.data());
  CHECK(idx == std::vector<int>{3, 0, 2, 0, 0});
}

TEST_CASE("empty and short inputs") {
  const std::vector<double> one{2.0};
  CHECK(k::sum_sq_diff(std::span<const double>()) == 0.0);
  CHECK(k::sum_sq_diff(one) == 0.0);
  CHECK(k::sum_and_sum_sq(one).sum_sq == 4.0);
}

TEST_CASE("avx2 variants match the scalar reference") {
  if (!k::isa_supported(k::Isa::avx2)) {
    MESSAGE("AVX2 not available; skipping equivalence");
    return;
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 33u, 1000u, 100003u}) {
    CAPTURE(n);
    const std::vector<double> a = random_vector(n, 1, 10.0);
    const std::vector<double> b = random_vector(n, 2, 10.0);
    CHECK(close(k::avx2::sum_sq_diff(a.data(), n), k::scalar::sum_sq_diff(a.data(), n)));
    const k::SumStats s1 = k::avx2::sum_and_sum_sq(a.data(), n);
    const k::SumStats s2 = k::scalar::sum_and_sum_sq(a.data(), n);
    CHECK(close(s1.sum, s2.sum, 1e-11));
    CHECK(close(s1.sum_sq, s2.sum_sq));
    CHECK(close(k::avx2::dot(a.data(), b.data(), n), k::scalar::dot(a.data(), b.data(), n), 1e-11));
    // elementwise kernels are exact
    CHECK(k::avx2::max_abs_diff(a.data(), b.data(), n) == k::scalar::max_abs_diff(a.data(), b.data(), n));
    std::vector<int> i1(n), i2(n);
    k::avx2::bin_indices(a.data(), n, 16, i1.data());
    k::scalar::bin_indices(a.data(), n, 16, i2.data());
    CHECK(i1 == i2);
  }
}

TEST_CASE("bin edges agree between variants") {
  if (!k::isa_supported(k::Isa::avx2)) return;
  std::vector<double> edges;
  for (int j = -32; j <= 64; ++j) {
    const double e = kTwoPi * j / 16.0;
    edges.push_back(e);
    edges.push_back(std::nextafter(e, -1e9));
    edges.push_back(std::nextafter(e, 1e9));
  }
  std::vector<int> i1(edges.size()), i2(edges.size());
  k::avx2::bin_indices(edges.data(), edges.size(), 16, i1.data());
  k::scalar::bin_indices(edges.data(), edges.size(), 16, i2.data());
  CHECK(i1 == i2);
  for (int i : i1) {
    CHECK(i >= 0);
    CHECK(i < 16);
  }
}

TEST_CASE("dispatch reports a supported isa") {
  CHECK(k::isa_supported(k::active_isa()));
  CHECK(k::isa_supported(k::Isa::scalar));
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
}

}  // TEST_SUITE
