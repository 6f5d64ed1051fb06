#pragma once

// Built-in foliated models: the Euclidean product N x L, the linear
// (Kronecker) foliation of the plane or flat torus, and the torus of
// revolution foliated by the unit field
//   Y = (alpha d_x + (b + cos x)^{-1} d_y) / sqrt(alpha^2 + 1).

#include "folbm/model.hpp"

#include <span>
#include <vector>

namespace folbm::models {

using Path = std::vector<Vec>;

/// R^q x R^p with E tangent to the second factor.
class ProductModel {
 public:
  ProductModel(int q, int p);
  [[nodiscard]] int q() const { return q_; }
  [[nodiscard]] int p() const { return p_; }
  [[nodiscard]] const FoliatedModel& foliated() const { return model_; }

 private:
  int q_;
  int p_;
  FoliatedModel model_;
};

/// Lines parallel to (a, 1) in the flat plane, or their image on the flat
/// torus when `torus` is set.
class KroneckerModel {
 public:
  explicit KroneckerModel(double a, bool torus = true);
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] bool torus() const { return torus_; }
  /// (a, 1) / sqrt(a^2 + 1)
  [[nodiscard]] Vec direction() const;
  [[nodiscard]] const FoliatedModel& foliated() const { return model_; }

 private:
  double a_;
  bool torus_;
  FoliatedModel model_;
};

/// Torus of revolution, metric dx^2 + (b + cos x)^2 dy^2.
class EmbeddedTorusModel {
 public:
  explicit EmbeddedTorusModel(double b = 2.0, double alpha = 1.0);
  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] const FoliatedModel& foliated() const { return model_; }

  /// Unit leaf field Y at (x, y).
  [[nodiscard]] Vec leaf_field(const Vec& pt) const;
  /// Continuous antiderivative of 1 / (alpha (b + cos x)); y - leaf_phase(x)
  /// is constant along leaves.
  [[nodiscard]] double leaf_phase(double x) const;
  /// y - leaf_phase(x), computed on the universal cover.
  [[nodiscard]] double leaf_invariant(const Vec& pt) const;

 private:
  double b_;
  double alpha_;
  FoliatedModel model_;
};

/// Flow of Y for time t from (x0, y0). Returned on the universal cover; the
/// arctan branch is continued across x = pi (mod 2pi) so the result is smooth
/// in t. Wrap with wrap_periodic for storage.
[[nodiscard]] Vec example3_flow(const EmbeddedTorusModel& model, double x0, double y0, double t);

/// psi_{B_k}(x0, y0) for each sample B_k of a Brownian path.
[[nodiscard]] Path example3_closed_form_fobm(const EmbeddedTorusModel& model, double x0,
                                             double y0, std::span<const double> brownian_path);

/// x0 + (a, 1) / sqrt(a^2 + 1) * W_k, wrapped into [0, 2pi)^2 on the torus.
[[nodiscard]] Path kronecker_fobm(const KroneckerModel& model, const Vec& x0,
                                  std::span<const double> brownian_path);

}  // namespace folbm::models
