#pragma once

// Data-parallel inner loops used by the statistics and quadrature code.
// Each kernel has a scalar reference and an AVX2 variant; the variant is
// picked once at runtime from CPUID (set FOLBM_SIMD=scalar to force the
// reference). Elementwise kernels are bit-identical across variants;
// reductions agree up to summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace folbm::kernels {

enum class Isa { scalar, avx2 };

[[nodiscard]] Isa active_isa();
[[nodiscard]] bool isa_supported(Isa isa);
[[nodiscard]] std::string_view isa_name(Isa isa);

struct SumStats {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Dispatched entry points.
[[nodiscard]] double sum_sq_diff(std::span<const double> v);
[[nodiscard]] SumStats sum_and_sum_sq(std::span<const double> v);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// Wraps each angle into [0, 2pi) and maps it to one of `bins` equal bins.
void bin_indices(std::span<const double> angles, int bins, std::span<int> out);

// Raw-pointer variants, one namespace per instruction set. The avx2
// functions must only be called when isa_supported(Isa::avx2).
namespace scalar {
double sum_sq_diff(const double* v, std::size_t n);
SumStats sum_and_sum_sq(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void bin_indices(const double* angles, std::size_t n, int bins, int* out);
}  // namespace scalar

namespace avx2 {
double sum_sq_diff(const double* v, std::size_t n);
SumStats sum_and_sum_sq(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
void bin_indices(const double* angles, std::size_t n, int bins, int* out);
}  // namespace avx2

}  // namespace folbm::kernels
