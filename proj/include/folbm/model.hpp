#pragma once

#include "folbm/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace folbm {

using MetricFn = std::function<MetricSample(const Vec&)>;
/// Returns an n x p matrix whose columns span E at the point.
using FrameFn = std::function<Mat(const Vec&)>;
using ChristoffelFn = std::function<Christoffels(const Vec&)>;
/// Flow of the unit leaf field (p == 1): maps (start, time) to the point on
/// the universal cover reached at that time.
using LeafFlowFn = std::function<Vec(const Vec&, double)>;
using VectorField = std::function<Vec(const Vec&)>;

/// Chart-level description of a foliated Riemannian manifold (M, g, E).
/// Treated as immutable once built; every operation takes it by const
/// reference and it is safe to share across threads.
struct FoliatedModel {
  std::string id;
  int n = 0;
  int p = 0;
  MetricFn metric_at;
  FrameFn e_frame_at;
  ChristoffelFn christoffels_at;  // optional
  std::vector<bool> periodic_mask;
  double fd_step = 1e-5;
  LeafFlowFn leaf_flow;  // optional

  /// Checks dimensions and that the required callables are set.
  void validate() const;
  [[nodiscard]] bool fully_periodic() const;
};

/// Wraps the periodic coordinates of x into [0, 2pi).
[[nodiscard]] Vec wrap_periodic(const FoliatedModel& model, const Vec& x);
[[nodiscard]] double wrap_angle(double a);

struct ScalarField {
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> partials;         // optional
  std::function<Mat(const Vec&)> second_partials;  // optional

  [[nodiscard]] bool has_analytic_derivatives() const {
    return static_cast<bool>(partials) && static_cast<bool>(second_partials);
  }
  /// Tolerance for comparing two routes of the same operator on this field.
  [[nodiscard]] double route_tolerance() const {
    return has_analytic_derivatives() ? tol::routes_analytic : tol::routes_fd;
  }

  /// Same function with the analytic derivatives dropped, forcing the
  /// finite-difference fallbacks.
  [[nodiscard]] ScalarField without_derivatives() const { return ScalarField{eval, {}, {}}; }
};

[[nodiscard]] ScalarField constant_field(double c, int n);
/// f * h, with analytic derivatives when both factors have them.
[[nodiscard]] ScalarField product(const ScalarField& f, const ScalarField& h);

}  // namespace folbm
