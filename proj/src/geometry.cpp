#include "folbm/geometry.hpp"

#include <cmath>
#include <string>

namespace folbm::geometry {

namespace {

void check_point(const FoliatedModel& model, const ChartPoint& x) {
  if (x.dim() != model.n) {
    throw InvalidArgument("chart point has dimension " + std::to_string(x.dim()) +
                          ", model expects " + std::to_string(model.n));
  }
}

Mat raw_frame(const FoliatedModel& model, const Vec& x) {
  Mat raw = model.e_frame_at(x);
  if (raw.rows() != model.n || raw.cols() != model.p) {
    throw InvalidArgument("e_frame_at must return an n x p matrix");
  }
  return raw;
}

Mat frame_at(const FoliatedModel& model, const Vec& x) {
  return orthonormalize(raw_frame(model, x), model.metric_at(x));
}

// Directional central difference of the orthonormal frame field.
Mat frame_derivative(const FoliatedModel& model, const Vec& x, const Vec& dir) {
  const double h = model.fd_step;
  return (frame_at(model, x + h * dir) - frame_at(model, x - h * dir)) / (2.0 * h);
}

// Chart basis vectors used for the perp frame at x, chosen once at the base
// point so that the frame field is smooth in a neighbourhood.
std::vector<int> perp_selection(const FoliatedModel& model, const MetricSample& m,
                                const Mat& U) {
  std::vector<int> chosen;
  Mat basis(model.n, 0);
  for (int k = 0; k < model.n && static_cast<int>(chosen.size()) < model.n - model.p; ++k) {
    Vec v = Vec::Unit(model.n, k);
    const double scale = m.norm(v);
    for (int i = 0; i < U.cols(); ++i) v -= m.inner(v, U.col(i)) * U.col(i);
    for (int i = 0; i < basis.cols(); ++i) v -= m.inner(v, basis.col(i)) * basis.col(i);
    const double r = m.norm(v);
    if (r > 1e-3 * scale) {
      chosen.push_back(k);
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = v / r;
    }
  }
  if (static_cast<int>(chosen.size()) != model.n - model.p) {
    throw DegenerateFrame("could not complete an orthonormal frame of the complement of E");
  }
  return chosen;
}

Mat perp_frame_with(const FoliatedModel& model, const Vec& x, const std::vector<int>& chosen) {
  const MetricSample m = model.metric_at(x);
  const Mat U = orthonormalize(raw_frame(model, x), m);
  Mat V(model.n, static_cast<int>(chosen.size()));
  for (int j = 0; j < static_cast<int>(chosen.size()); ++j) {
    Vec v = Vec::Unit(model.n, chosen[j]);
    for (int i = 0; i < U.cols(); ++i) v -= m.inner(v, U.col(i)) * U.col(i);
    for (int i = 0; i < j; ++i) v -= m.inner(v, V.col(i)) * V.col(i);
    const double r = m.norm(v);
    if (r < tol::degenerate) throw DegenerateFrame("perp frame pivot below 1e-12");
    V.col(j) = v / r;
  }
  return V;
}

void require_in_E(const MetricSample& m, const Mat& P, const Vec& v, const char* what) {
  const double off = m.norm(v - P * v);
  if (off > tol::frame * std::max(1.0, m.norm(v))) {
    throw NotInE(std::string(what) + " is not tangent to E (off-E norm " + std::to_string(off) +
                 ")");
  }
}

}  // namespace

MetricSample metric(const FoliatedModel& model, const ChartPoint& x) {
  check_point(model, x);
  return model.metric_at(x.coords);
}

Mat orthonormalize(const Mat& raw, const MetricSample& m) {
  Mat U = raw;
  for (int i = 0; i < U.cols(); ++i) {
    // Modified Gram-Schmidt, two passes for stability.
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) U.col(i) -= m.inner(U.col(i), U.col(j)) * U.col(j);
    const double r = m.norm(U.col(i));
    if (!(r >= tol::degenerate)) throw DegenerateFrame("Gram-Schmidt pivot below 1e-12");
    U.col(i) /= r;
  }
  return U;
}

Mat orthonormal_e_frame(const FoliatedModel& model, const ChartPoint& x) {
  check_point(model, x);
  return frame_at(model, x.coords);
}

Mat orthonormal_perp_frame(const FoliatedModel& model, const ChartPoint& x) {
  check_point(model, x);
  const MetricSample m = model.metric_at(x.coords);
  const Mat U = orthonormalize(raw_frame(model, x.coords), m);
  return perp_frame_with(model, x.coords, perp_selection(model, m, U));
}

Mat projector(const MetricSample& m, const Mat& U) { return U * (U.transpose() * m.g); }

TangentVector project_E(const FoliatedModel& model, const TangentVector& v) {
  check_point(model, v.base);
  const MetricSample m = model.metric_at(v.base.coords);
  const Mat U = orthonormalize(raw_frame(model, v.base.coords), m);
  return {v.base, projector(m, U) * v.components};
}

TangentVector project_perp(const FoliatedModel& model, const TangentVector& v) {
  TangentVector e = project_E(model, v);
  e.components = v.components - e.components;
  return e;
}

Christoffels christoffels_fd(const FoliatedModel& model, const ChartPoint& x) {
  check_point(model, x);
  const int n = model.n;
  const double h = model.fd_step;
  const MetricSample m = model.metric_at(x.coords);
  // dg[l] = d_l g
  std::array<Mat, kMaxDim> dg;
  for (int l = 0; l < n; ++l) {
    Vec xp = x.coords, xm = x.coords;
    xp(l) += h;
    xm(l) -= h;
    dg[l] = (model.metric_at(xp).g - model.metric_at(xm).g) / (2.0 * h);
  }
  Christoffels gamma(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vec lowered(n);
      for (int l = 0; l < n; ++l) lowered(l) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      const Vec raised = m.g_inv * lowered;
      for (int k = 0; k < n; ++k) {
        gamma(k, i, j) = raised(k);
        gamma(k, j, i) = raised(k);
      }
    }
  }
  return gamma;
}

Christoffels christoffels(const FoliatedModel& model, const ChartPoint& x) {
  check_point(model, x);
  if (model.christoffels_at) return model.christoffels_at(x.coords);
  return christoffels_fd(model, x);
}

Vec partials(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  check_point(model, x);
  if (f.partials) return f.partials(x.coords);
  const double h = model.fd_step;
  Vec d(model.n);
  for (int i = 0; i < model.n; ++i) {
    Vec xp = x.coords, xm = x.coords;
    xp(i) += h;
    xm(i) -= h;
    d(i) = (f.eval(xp) - f.eval(xm)) / (2.0 * h);
  }
  return d;
}

Mat second_partials(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  check_point(model, x);
  if (f.second_partials) return f.second_partials(x.coords);
  const int n = model.n;
  Mat H(n, n);
  if (f.partials) {
    const double h = model.fd_step;
    for (int i = 0; i < n; ++i) {
      Vec xp = x.coords, xm = x.coords;
      xp(i) += h;
      xm(i) -= h;
      H.col(i) = (f.partials(xp) - f.partials(xm)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
  }
  const double h = kSecondDerivativeStep;
  const double f0 = f.eval(x.coords);
  for (int i = 0; i < n; ++i) {
    Vec xp = x.coords, xm = x.coords;
    xp(i) += h;
    xm(i) -= h;
    H(i, i) = (f.eval(xp) - 2.0 * f0 + f.eval(xm)) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      Vec pp = x.coords, pm = x.coords, mp = x.coords, mm = x.coords;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      H(i, j) = H(j, i) = (f.eval(pp) - f.eval(pm) - f.eval(mp) + f.eval(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

TangentVector grad(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  const MetricSample m = metric(model, x);
  return {x, m.g_inv * partials(model, f, x)};
}

TangentVector grad_E(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  return project_E(model, grad(model, f, x));
}

TangentVector grad_E_basis(const FoliatedModel& model, const ScalarField& f,
                           const ChartPoint& x) {
  const Mat U = orthonormal_e_frame(model, x);
  const Vec df = partials(model, f, x);
  Vec out = Vec::Zero(model.n);
  for (int i = 0; i < model.p; ++i) out += U.col(i).dot(df) * U.col(i);
  return {x, out};
}

Vec covariant_derivative(const FoliatedModel& model, const VectorField& V, const ChartPoint& x,
                         const Vec& dir) {
  check_point(model, x);
  const double h = model.fd_step;
  const Vec d = (V(x.coords + h * dir) - V(x.coords - h * dir)) / (2.0 * h);
  return d + christoffels(model, x).contract(dir, V(x.coords));
}

double div(const FoliatedModel& model, const VectorField& V, const ChartPoint& x, double step) {
  check_point(model, x);
  const double h = step > 0.0 ? step : model.fd_step;
  const int n = model.n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    Vec xp = x.coords, xm = x.coords;
    xp(k) += h;
    xm(k) -= h;
    s += (V(xp)(k) - V(xm)(k)) / (2.0 * h);
  }
  const Christoffels gamma = christoffels(model, x);
  const Vec v = V(x.coords);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) s += gamma(k, k, j) * v(j);
  return s;
}

double div_E(const FoliatedModel& model, const VectorField& V, const ChartPoint& x) {
  const MetricSample m = metric(model, x);
  const Mat U = orthonormalize(raw_frame(model, x.coords), m);
  double s = 0.0;
  for (int i = 0; i < model.p; ++i) {
    s += m.inner(covariant_derivative(model, V, x, U.col(i)), U.col(i));
  }
  return s;
}

Mat hess(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  const Mat d2 = second_partials(model, f, x);
  const Vec df = partials(model, f, x);
  const Christoffels gamma = christoffels(model, x);
  Mat H = d2;
  for (int a = 0; a < model.n; ++a)
    for (int b = 0; b < model.n; ++b)
      for (int k = 0; k < model.n; ++k) H(a, b) -= gamma(k, a, b) * df(k);
  return H;
}

Mat hess_E(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  const MetricSample m = metric(model, x);
  const Mat U = orthonormalize(raw_frame(model, x.coords), m);
  const Mat P = projector(m, U);
  const Mat Pperp = Mat::Identity(model.n, model.n) - P;
  const Mat d2 = second_partials(model, f, x);
  const Vec df = partials(model, f, x);
  const Christoffels gamma = christoffels(model, x);
  const int p = model.p;
  Mat H(p, p);
  for (int i = 0; i < p; ++i) {
    const Mat dU = frame_derivative(model, x.coords, U.col(i));
    for (int j = 0; j < p; ++j) {
      const Vec conn = gamma.contract(U.col(i), U.col(j));
      H(i, j) = U.col(i).dot(d2 * U.col(j)) + (Pperp * dU.col(j)).dot(df) - (P * conn).dot(df);
    }
  }
  return H;
}

double laplacian_E(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  return hess_E(model, f, x).trace();
}

double laplacian_E_divergence(const FoliatedModel& model, const ScalarField& f,
                              const ChartPoint& x) {
  const VectorField field = [&model, &f](const Vec& y) -> Vec {
    return grad_E(model, f, ChartPoint(y)).components;
  };
  return div_E(model, field, x);
}

TangentVector second_fundamental_form(const FoliatedModel& model, const TangentVector& X,
                                      const VectorField& Y_extension) {
  const ChartPoint& x = X.base;
  const MetricSample m = metric(model, x);
  const Mat U = orthonormalize(raw_frame(model, x.coords), m);
  const Mat P = projector(m, U);
  require_in_E(m, P, X.components, "X");
  require_in_E(m, P, Y_extension(x.coords), "Y");
  const Vec nabla = covariant_derivative(model, Y_extension, x, X.components);
  return {x, nabla - P * nabla};
}

TangentVector second_fundamental_form(const FoliatedModel& model, const TangentVector& X,
                                      const TangentVector& Y) {
  const MetricSample m = metric(model, Y.base);
  const Mat U = orthonormalize(raw_frame(model, Y.base.coords), m);
  require_in_E(m, projector(m, U), Y.components, "Y");
  Vec coeff(model.p);
  for (int j = 0; j < model.p; ++j) coeff(j) = m.inner(Y.components, U.col(j));
  const VectorField extension = [&model, coeff](const Vec& y) -> Vec {
    return frame_at(model, y) * coeff;
  };
  return second_fundamental_form(model, X, extension);
}

TangentVector mean_curvature_K(const FoliatedModel& model, const ChartPoint& x) {
  const Mat U = orthonormal_e_frame(model, x);
  Vec K = Vec::Zero(model.n);
  for (int i = 0; i < model.p; ++i) {
    const TangentVector u{x, U.col(i)};
    K += second_fundamental_form(model, u, u).components;
  }
  return {x, K};
}

TangentVector kappa(const FoliatedModel& model, const ChartPoint& x) {
  const MetricSample m = metric(model, x);
  const Mat U = orthonormalize(raw_frame(model, x.coords), m);
  const std::vector<int> chosen = perp_selection(model, m, U);
  const Mat V = perp_frame_with(model, x.coords, chosen);
  const Christoffels gamma = christoffels(model, x);
  const double h = model.fd_step;
  Vec sum = Vec::Zero(model.n);
  for (int j = 0; j < V.cols(); ++j) {
    const Vec v = V.col(j);
    const Vec dv =
        (perp_frame_with(model, x.coords + h * v, chosen).col(j) -
         perp_frame_with(model, x.coords - h * v, chosen).col(j)) /
        (2.0 * h);
    sum += dv + gamma.contract(v, v);
  }
  return {x, projector(m, U) * sum};
}

double kappa_flat(const FoliatedModel& model, const TangentVector& X) {
  const MetricSample m = metric(model, X.base);
  return m.inner(kappa(model, X.base).components, X.components);
}

double laplacian_full(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  const VectorField flux = [&model, &f](const Vec& y) -> Vec {
    const MetricSample m = model.metric_at(y);
    return m.sqrt_det_g * (m.g_inv * partials(model, f, ChartPoint(y)));
  };
  const double h = model.fd_step;
  double s = 0.0;
  for (int k = 0; k < model.n; ++k) {
    Vec xp = x.coords, xm = x.coords;
    xp(k) += h;
    xm(k) -= h;
    s += (flux(xp)(k) - flux(xm)(k)) / (2.0 * h);
  }
  return s / metric(model, x).sqrt_det_g;
}

double trace_hess(const FoliatedModel& model, const ScalarField& f, const ChartPoint& x) {
  const MetricSample m = metric(model, x);
  return (m.g_inv * hess(model, f, x)).trace();
}

double decomposition_residual(const FoliatedModel& model, const ScalarField& f,
                              const ChartPoint& x) {
  const double full = laplacian_full(model, f, x);
  const double leafwise = laplacian_E(model, f, x);
  const double kappa_f = kappa(model, x).components.dot(partials(model, f, x));
  const VectorField normal_grad = [&model, &f](const Vec& y) -> Vec {
    return project_perp(model, grad(model, f, ChartPoint(y))).components;
  };
  const double transverse = div(model, normal_grad, x);
  return full - (leafwise - kappa_f) - transverse;
}

}  // namespace folbm::geometry
