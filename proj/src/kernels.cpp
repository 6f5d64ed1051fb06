#include "folbm/kernels.hpp"

#include "folbm/types.hpp"

#include <cstdlib>
#include <string>

namespace folbm::kernels {

namespace {

struct Table {
  double (*sum_sq_diff)(const double*, std::size_t);
  SumStats (*sum_and_sum_sq)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*max_abs_diff)(const double*, const double*, std::size_t);
  void (*bin_indices)(const double*, std::size_t, int, int*);
};

constexpr Table kScalar{scalar::sum_sq_diff, scalar::sum_and_sum_sq, scalar::dot,
                        scalar::max_abs_diff, scalar::bin_indices};
constexpr Table kAvx2{avx2::sum_sq_diff, avx2::sum_and_sum_sq, avx2::dot, avx2::max_abs_diff,
                      avx2::bin_indices};

Isa detect() {
  if (const char* forced = std::getenv("FOLBM_SIMD"); forced && std::string(forced) == "scalar") {
    return Isa::scalar;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

const Table& table() {
  static const Table& t = active_isa() == Isa::avx2 ? kAvx2 : kScalar;
  return t;
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("kernel inputs differ in length");
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(FOLBM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double sum_sq_diff(std::span<const double> v) { return table().sum_sq_diff(v.data(), v.size()); }

SumStats sum_and_sum_sq(std::span<const double> v) {
  return table().sum_and_sum_sq(v.data(), v.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return table().dot(a.data(), b.data(), a.size());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return table().max_abs_diff(a.data(), b.data(), a.size());
}

void bin_indices(std::span<const double> angles, int bins, std::span<int> out) {
  require_same_size(angles.size(), out.size());
  if (bins < 1) throw InvalidArgument("bin count must be positive");
  table().bin_indices(angles.data(), angles.size(), bins, out.data());
}

}  // namespace folbm::kernels
