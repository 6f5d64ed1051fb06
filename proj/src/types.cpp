#include "folbm/model.hpp"
#include "folbm/types.hpp"

#include <cmath>

namespace folbm {

ChartPoint::ChartPoint(std::initializer_list<double> c) : coords(static_cast<int>(c.size())) {
  int i = 0;
  for (double v : c) coords(i++) = v;
}

MetricSample MetricSample::from_metric(const Mat& g) {
  MetricSample m;
  m.g = g;
  const double det = g.determinant();
  if (!(det >= tol::degenerate)) {
    throw SingularMetric("metric determinant " + std::to_string(det) + " below 1e-12");
  }
  m.g_inv = g.inverse();
  m.sqrt_det_g = std::sqrt(det);
  return m;
}

double MetricSample::norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

Vec Christoffels::contract(const Vec& v, const Vec& w) const {
  Vec out = Vec::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (v(i) == 0.0) continue;
      for (int j = 0; j < n_; ++j) s += (*this)(k, i, j) * v(i) * w(j);
    }
    out(k) = s;
  }
  return out;
}

void FoliatedModel::validate() const {
  if (n < 2 || n > kMaxDim) {
    throw InvalidArgument("model dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  }
  if (p < 1 || p >= n) throw InvalidArgument("leaf dimension must satisfy 1 <= p < n");
  if (!metric_at || !e_frame_at) throw InvalidArgument("model needs metric_at and e_frame_at");
  if (static_cast<int>(periodic_mask.size()) != n) {
    throw InvalidArgument("periodic_mask length must equal n");
  }
  if (!(fd_step > 0.0)) throw InvalidArgument("fd_step must be positive");
  if (leaf_flow && p != 1) throw InvalidArgument("leaf_flow is only meaningful for p == 1");
}

bool FoliatedModel::fully_periodic() const {
  for (bool b : periodic_mask)
    if (!b) return false;
  return !periodic_mask.empty();
}

double wrap_angle(double a) {
  double r = a - kTwoPi * std::floor(a / kTwoPi);
  // floor can leave r == 2pi for tiny negative inputs
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

Vec wrap_periodic(const FoliatedModel& model, const Vec& x) {
  Vec out = x;
  for (int i = 0; i < model.n; ++i)
    if (model.periodic_mask[i]) out(i) = wrap_angle(x(i));
  return out;
}

ScalarField constant_field(double c, int n) {
  return ScalarField{[c](const Vec&) { return c; }, [n](const Vec&) { return Vec(Vec::Zero(n)); },
                     [n](const Vec&) { return Mat(Mat::Zero(n, n)); }};
}

ScalarField product(const ScalarField& f, const ScalarField& h) {
  ScalarField out;
  out.eval = [f, h](const Vec& x) { return f.eval(x) * h.eval(x); };
  if (f.has_analytic_derivatives() && h.has_analytic_derivatives()) {
    out.partials = [f, h](const Vec& x) -> Vec {
      return f.eval(x) * h.partials(x) + h.eval(x) * f.partials(x);
    };
    out.second_partials = [f, h](const Vec& x) -> Mat {
      const Vec df = f.partials(x);
      const Vec dh = h.partials(x);
      Mat m = f.eval(x) * h.second_partials(x) + h.eval(x) * f.second_partials(x);
      m += df * dh.transpose() + dh * df.transpose();
      return m;
    };
  }
  return out;
}

}  // namespace folbm
