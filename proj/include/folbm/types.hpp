#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace folbm {

// Largest chart dimension supported. Small vectors and matrices live on the
// stack, which keeps the per-step SDE kernel allocation free.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

namespace tol {
inline constexpr double lin = 1e-10;
inline constexpr double frame = 1e-10;
inline constexpr double fd = 1e-4;
inline constexpr double routes_analytic = 1e-6;
inline constexpr double routes_fd = 1e-3;
// Pivot and determinant floor for Gram-Schmidt and metric inversion.
inline constexpr double degenerate = 1e-12;
}  // namespace tol

// Errors. All library failures derive from Error so callers can catch once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateFrame : public Error {
 public:
  using Error::Error;
};
class SingularMetric : public Error {
 public:
  using Error::Error;
};
class NotInE : public Error {
 public:
  using Error::Error;
};
class BranchError : public Error {
 public:
  using Error::Error;
};
class StepRejected : public Error {
 public:
  using Error::Error;
};
class NotGeodesicLeafField : public Error {
 public:
  using Error::Error;
};
class NoNullVector : public Error {
 public:
  using Error::Error;
};
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};
class WrongModel : public Error {
 public:
  using Error::Error;
};
class ThinnedEnsemble : public Error {
 public:
  using Error::Error;
};
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point in chart coordinates. Geometry accepts any representative on the
/// universal cover; wrapping into [0, 2pi) happens when points are stored or
/// written out (see wrap_periodic in model.hpp).
struct ChartPoint {
  Vec coords;

  ChartPoint() = default;
  explicit ChartPoint(Vec c) : coords(std::move(c)) {}
  ChartPoint(std::initializer_list<double> c);

  [[nodiscard]] int dim() const { return static_cast<int>(coords.size()); }
};

/// Vector at a point, components in the chart basis d_1..d_n.
struct TangentVector {
  ChartPoint base;
  Vec components;
};

struct MetricSample {
  Mat g;
  Mat g_inv;
  double sqrt_det_g = 0.0;

  /// Builds g_inv and sqrt(det g). Throws SingularMetric when det g < 1e-12.
  static MetricSample from_metric(const Mat& g);

  [[nodiscard]] double inner(const Vec& a, const Vec& b) const { return a.dot(g * b); }
  [[nodiscard]] double norm(const Vec& a) const;
};

/// Gamma^k_{ij} at one point, stored densely for n <= kMaxDim.
class Christoffels {
 public:
  Christoffels() = default;
  explicit Christoffels(int n) : n_(n) { data_.fill(0.0); }

  [[nodiscard]] int dim() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[(k * kMaxDim + i) * kMaxDim + j]; }
  [[nodiscard]] double operator()(int k, int i, int j) const {
    return data_[(k * kMaxDim + i) * kMaxDim + j];
  }

  /// Gamma(v, w)^k = Gamma^k_{ij} v^i w^j.
  [[nodiscard]] Vec contract(const Vec& v, const Vec& w) const;

 private:
  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_{};
};

}  // namespace folbm
