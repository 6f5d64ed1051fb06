#include "folbm/kernels.hpp"

#include <cmath>

namespace folbm::kernels::scalar {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double sum_sq_diff(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = v[i] - v[i - 1];
    s += d * d;
  }
  return s;
}

SumStats sum_and_sum_sq(const double* v, std::size_t n) {
  SumStats out;
  for (std::size_t i = 0; i < n; ++i) {
    out.sum += v[i];
    out.sum_sq += v[i] * v[i];
  }
  return out;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void bin_indices(const double* angles, std::size_t n, int bins, int* out) {
  const double scale = static_cast<double>(bins) / kTwoPi;
  for (std::size_t i = 0; i < n; ++i) {
    double r = angles[i] - kTwoPi * std::floor(angles[i] / kTwoPi);
    if (r >= kTwoPi) r -= kTwoPi;
    int k = static_cast<int>(std::floor(r * scale));
    if (k >= bins) k = bins - 1;
    if (k < 0) k = 0;
    out[i] = k;
  }
}

}  // namespace folbm::kernels::scalar
