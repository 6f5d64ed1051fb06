#include "folbm/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace folbm::models {

namespace {

Mat identity_metric_matrix(int n) { return Mat::Identity(n, n); }

// Continuous branch of arctan(k tan(theta)): agrees with it on
// (-pi/2, pi/2) and increases by pi whenever theta does.
double continued_arctan_tan(double k, double theta) {
  const double m = std::nearbyint(theta / std::numbers::pi);
  const double r = theta - m * std::numbers::pi;
  return std::atan2(k * std::sin(r), std::cos(r)) + m * std::numbers::pi;
}

double torus_phase(double b, double alpha, double x) {
  const double k = std::sqrt((b - 1.0) / (b + 1.0));
  return 2.0 / (alpha * std::sqrt(b * b - 1.0)) * continued_arctan_tan(k, 0.5 * x);
}

Vec torus_flow(double b, double alpha, double x0, double y0, double t) {
  const double xt = x0 + alpha * t / std::sqrt(1.0 + alpha * alpha);
  const double yt = y0 + torus_phase(b, alpha, xt) - torus_phase(b, alpha, x0);
  Vec out(2);
  out << xt, yt;
  return out;
}

}  // namespace

ProductModel::ProductModel(int q, int p) : q_(q), p_(p) {
  if (q < 1 || p < 1 || q + p > kMaxDim) {
    throw InvalidArgument("product model needs q >= 1, p >= 1, q + p <= " +
                          std::to_string(kMaxDim));
  }
  const int n = q + p;
  model_.id = "product";
  model_.n = n;
  model_.p = p;
  const MetricSample flat = MetricSample::from_metric(identity_metric_matrix(n));
  model_.metric_at = [flat](const Vec&) { return flat; };
  model_.e_frame_at = [n, q, p](const Vec&) -> Mat {
    Mat U = Mat::Zero(n, p);
    for (int i = 0; i < p; ++i) U(q + i, i) = 1.0;
    return U;
  };
  model_.christoffels_at = [n](const Vec&) { return Christoffels(n); };
  model_.periodic_mask.assign(n, false);
  if (p == 1) {
    model_.leaf_flow = [n](const Vec& x0, double t) -> Vec {
      Vec out = x0;
      out(n - 1) += t;
      return out;
    };
  }
  model_.validate();
}

KroneckerModel::KroneckerModel(double a, bool torus) : a_(a), torus_(torus) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("Kronecker slope a must be > 0");
  model_.id = "kronecker";
  model_.n = 2;
  model_.p = 1;
  const MetricSample flat = MetricSample::from_metric(identity_metric_matrix(2));
  model_.metric_at = [flat](const Vec&) { return flat; };
  model_.e_frame_at = [a](const Vec&) -> Mat {
    Mat U(2, 1);
    U << a, 1.0;
    return U;
  };
  model_.christoffels_at = [](const Vec&) { return Christoffels(2); };
  model_.periodic_mask.assign(2, torus);
  const Vec dir = direction();
  model_.leaf_flow = [dir](const Vec& x0, double t) -> Vec { return x0 + t * dir; };
  model_.validate();
}

Vec KroneckerModel::direction() const {
  Vec d(2);
  d << a_, 1.0;
  return d / std::sqrt(a_ * a_ + 1.0);
}

EmbeddedTorusModel::EmbeddedTorusModel(double b, double alpha) : b_(b), alpha_(alpha) {
  if (!(b > 1.0) || !std::isfinite(b)) throw InvalidArgument("torus radius ratio b must be > 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("slope alpha must be > 0");
  model_.id = "torus3";
  model_.n = 2;
  model_.p = 1;
  model_.metric_at = [b](const Vec& x) {
    const double r = b + std::cos(x(0));
    MetricSample m;
    m.g = Mat::Zero(2, 2);
    m.g(0, 0) = 1.0;
    m.g(1, 1) = r * r;
    m.g_inv = Mat::Zero(2, 2);
    m.g_inv(0, 0) = 1.0;
    m.g_inv(1, 1) = 1.0 / (r * r);
    m.sqrt_det_g = r;
    return m;
  };
  model_.e_frame_at = [b, alpha](const Vec& x) -> Mat {
    Mat U(2, 1);
    U << alpha, 1.0 / (b + std::cos(x(0)));
    return U;
  };
  model_.christoffels_at = [b](const Vec& x) {
    const double s = std::sin(x(0));
    const double r = b + std::cos(x(0));
    Christoffels gamma(2);
    // nabla_dx dy = -sin x / (b + cos x) dy,  nabla_dy dy = (b + cos x) sin x dx
    gamma(1, 0, 1) = -s / r;
    gamma(1, 1, 0) = -s / r;
    gamma(0, 1, 1) = r * s;
    return gamma;
  };
  model_.periodic_mask.assign(2, true);
  model_.leaf_flow = [b, alpha](const Vec& x0, double t) {
    return torus_flow(b, alpha, x0(0), x0(1), t);
  };
  model_.validate();
}

Vec EmbeddedTorusModel::leaf_field(const Vec& pt) const {
  Vec Y(2);
  Y << alpha_, 1.0 / (b_ + std::cos(pt(0)));
  return Y / std::sqrt(alpha_ * alpha_ + 1.0);
}

double EmbeddedTorusModel::leaf_phase(double x) const { return torus_phase(b_, alpha_, x); }

double EmbeddedTorusModel::leaf_invariant(const Vec& pt) const {
  return pt(1) - leaf_phase(pt(0));
}

Vec example3_flow(const EmbeddedTorusModel& model, double x0, double y0, double t) {
  return torus_flow(model.b(), model.alpha(), x0, y0, t);
}

Path example3_closed_form_fobm(const EmbeddedTorusModel& model, double x0, double y0,
                               std::span<const double> brownian_path) {
  Path out;
  out.reserve(brownian_path.size());
  for (double B : brownian_path) out.push_back(example3_flow(model, x0, y0, B));
  return out;
}

Path kronecker_fobm(const KroneckerModel& model, const Vec& x0,
                    std::span<const double> brownian_path) {
  if (x0.size() != 2) throw InvalidArgument("Kronecker start point must be 2-dimensional");
  const Vec dir = model.direction();
  Path out;
  out.reserve(brownian_path.size());
  for (double W : brownian_path) {
    Vec x = x0 + W * dir;
    out.push_back(model.torus() ? wrap_periodic(model.foliated(), x) : x);
  }
  return out;
}

}  // namespace folbm::models
