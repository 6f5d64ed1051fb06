#include "folbm/verify.hpp"

#include "folbm/geometry.hpp"
#include "folbm/harmonic.hpp"
#include "folbm/models.hpp"
#include "folbm/sde.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace folbm::verify {

using stats::TestReport;

namespace {

TestReport make_report(std::string name, double statistic, double threshold, std::int64_t n,
                       std::vector<std::pair<std::string, double>> details = {}) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.n_samples = n;
  r.passed = statistic <= threshold;
  r.details = std::move(details);
  return r;
}

// Lower-bound report (p-values, rates): passes at or above the threshold.
TestReport make_lower_bound_report(std::string name, double value, double threshold,
                                   std::int64_t n,
                                   std::vector<std::pair<std::string, double>> details = {}) {
  TestReport r = make_report(std::move(name), value, threshold, n, std::move(details));
  r.passed = value >= threshold;
  return r;
}

struct ModelSet {
  models::ProductModel product{1, 2};
  models::KroneckerModel kronecker;
  models::EmbeddedTorusModel torus;

  explicit ModelSet(const VerifyOptions& o) : kronecker(o.a), torus(o.b, o.alpha) {}
  [[nodiscard]] std::vector<const FoliatedModel*> all() const {
    return {&product.foliated(), &kronecker.foliated(), &torus.foliated()};
  }
};

constexpr int kFieldsPerModel = 5;
constexpr int kPointsPerField = 10;

// Calls fn(model, f, x) on random analytic fields and points of every model.
template <typename Fn>
void sweep(const ModelSet& set, std::uint64_t seed, Fn&& fn) {
  std::uint64_t stream = 0;
  for (const FoliatedModel* model : set.all()) {
    for (int k = 0; k < kFieldsPerModel; ++k) {
      NormalStream rng(seed, stream++, StreamDomain::auxiliary);
      const ScalarField f = random_trig_field(rng, model->n);
      for (int j = 0; j < kPointsPerField; ++j) fn(*model, f, ChartPoint(random_point(rng, model->n)), rng);
    }
  }
}

constexpr std::int64_t kSweepSize = 3 * kFieldsPerModel * kPointsPerField;

TestReport check_grad_routes(const ModelSet& set, std::uint64_t seed) {
  double worst = 0.0;
  sweep(set, seed, [&](const FoliatedModel& m, const ScalarField& f, const ChartPoint& x, auto&) {
    const Vec a = geometry::grad_E(m, f, x).components;
    const Vec b = geometry::grad_E_basis(m, f, x).components;
    worst = std::max(worst, (a - b).norm());
  });
  return make_report("grad_routes", worst, tol::lin, kSweepSize);
}

TestReport check_laplacian_routes(const ModelSet& set, std::uint64_t seed) {
  double worst = 0.0;
  sweep(set, seed, [&](const FoliatedModel& m, const ScalarField& f, const ChartPoint& x, auto&) {
    worst = std::max(worst, std::fabs(geometry::laplacian_E(m, f, x) -
                                      geometry::laplacian_E_divergence(m, f, x)));
  });
  return make_report("laplacian_routes", worst, tol::routes_analytic, kSweepSize);
}

// Hess f(u_i, u_j) = Hess_E f(u_i, u_j) - W(u_i, u_j) f, and Hess_E is symmetric.
TestReport check_hessian_relation(const ModelSet& set, std::uint64_t seed) {
  double worst = 0.0;
  double asym = 0.0;
  sweep(set, seed, [&](const FoliatedModel& m, const ScalarField& f, const ChartPoint& x, auto&) {
    const Mat U = geometry::orthonormal_e_frame(m, x);
    const Mat H = geometry::hess(m, f, x);
    const Mat HE = geometry::hess_E(m, f, x);
    const Vec df = geometry::partials(m, f, x);
    for (int i = 0; i < m.p; ++i) {
      for (int j = 0; j < m.p; ++j) {
        const Vec W = geometry::second_fundamental_form(m, TangentVector{x, U.col(i)},
                                                        TangentVector{x, U.col(j)})
                          .components;
        const double full = U.col(i).dot(H * U.col(j));
        worst = std::max(worst, std::fabs(full - (HE(i, j) - W.dot(df))));
      }
    }
    asym = std::max(asym, (HE - HE.transpose()).cwiseAbs().maxCoeff());
  });
  return make_report("hessian_relation", std::max(worst, asym), tol::routes_analytic, kSweepSize,
                     {{"relation", worst}, {"asymmetry", asym}});
}

// W(X, Y) must not depend on which E-valued extension of Y is used.
TestReport check_w_tensorial(const ModelSet& set, std::uint64_t seed) {
  double worst = 0.0;
  double constant_gap = 0.0;
  sweep(set, seed, [&](const FoliatedModel& m, const ScalarField&, const ChartPoint& x,
                       NormalStream& rng) {
    const Mat U = geometry::orthonormal_e_frame(m, x);
    Vec c(m.p), X_coeff(m.p);
    for (int i = 0; i < m.p; ++i) {
      c(i) = rng.normal();
      X_coeff(i) = rng.normal();
    }
    Mat L(m.p, m.n);
    for (int i = 0; i < m.p; ++i)
      for (int d = 0; d < m.n; ++d) L(i, d) = rng.normal();
    const TangentVector X{x, U * X_coeff};
    const TangentVector Y{x, U * c};
    const Vec base = x.coords;
    const VectorField varying = [&m, base, c, L](const Vec& y) -> Vec {
      const Mat Uy = geometry::orthonormal_e_frame(m, ChartPoint(y));
      return Uy * (c + L * (y - base));
    };
    const Vec w1 = geometry::second_fundamental_form(m, X, Y).components;
    const Vec w2 = geometry::second_fundamental_form(m, X, varying).components;
    worst = std::max(worst, (w1 - w2).norm());
    const Vec y0 = Y.components;
    const VectorField constant = [y0](const Vec&) -> Vec { return y0; };
    const Vec w3 = geometry::second_fundamental_form(m, X, constant).components;
    constant_gap = std::max(constant_gap, (w1 - w3).norm());
  });
  return make_report("w_tensorial", worst, tol::routes_analytic, kSweepSize,
                     {{"constant_extension_gap", constant_gap}});
}

// Tr_E Hess f = Delta_E f - K f, with K = sum_i W(u_i, u_i).
TestReport check_mean_curvature_trace(const ModelSet& set, std::uint64_t seed) {
  double trace_gap = 0.0;
  double k_gap = 0.0;
  sweep(set, seed, [&](const FoliatedModel& m, const ScalarField& f, const ChartPoint& x, auto&) {
    const Mat U = geometry::orthonormal_e_frame(m, x);
    const Mat H = geometry::hess(m, f, x);
    const Vec K = geometry::mean_curvature_K(m, x).components;
    Vec K_sum = Vec::Zero(m.n);
    double tr = 0.0;
    for (int i = 0; i < m.p; ++i) {
      tr += U.col(i).dot(H * U.col(i));
      K_sum += geometry::second_fundamental_form(m, TangentVector{x, U.col(i)},
                                                 TangentVector{x, U.col(i)})
                   .components;
    }
    const double Kf = K.dot(geometry::partials(m, f, x));
    trace_gap = std::max(trace_gap, std::fabs(tr - (geometry::laplacian_E(m, f, x) - Kf)));
    k_gap = std::max(k_gap, (K - K_sum).norm());
  });
  return make_report("mean_curvature_trace", std::max(trace_gap, k_gap), tol::routes_analytic,
                     kSweepSize, {{"trace_gap", trace_gap}, {"k_gap", k_gap}});
}

TestReport check_product_rule(const ModelSet& set, std::uint64_t seed) {
  double worst = 0.0;
  sweep(set, seed, [&](const FoliatedModel& m, const ScalarField& f, const ChartPoint& x,
                       NormalStream& rng) {
    const ScalarField h = random_trig_field(rng, m.n);
    const ScalarField fh = product(f, h);
    const Vec gf = geometry::grad_E(m, f, x).components;
    const Vec gh = geometry::grad_E(m, h, x).components;
    const double rhs = f.eval(x.coords) * geometry::laplacian_E(m, h, x) +
                       h.eval(x.coords) * geometry::laplacian_E(m, f, x) +
                       2.0 * geometry::metric(m, x).inner(gf, gh);
    worst = std::max(worst, std::fabs(geometry::laplacian_E(m, fh, x) - rhs));
  });
  return make_report("product_rule", worst, tol::routes_analytic, kSweepSize);
}

ScalarField sin_x_cos_y() {
  ScalarField f;
  f.eval = [](const Vec& x) { return std::sin(x(0)) * std::cos(x(1)); };
  f.partials = [](const Vec& x) -> Vec {
    Vec d = Vec::Zero(x.size());
    d(0) = std::cos(x(0)) * std::cos(x(1));
    d(1) = -std::sin(x(0)) * std::sin(x(1));
    return d;
  };
  f.second_partials = [](const Vec& x) -> Mat {
    Mat h = Mat::Zero(x.size(), x.size());
    h(0, 0) = -std::sin(x(0)) * std::cos(x(1));
    h(1, 1) = h(0, 0);
    h(0, 1) = h(1, 0) = -std::cos(x(0)) * std::sin(x(1));
    return h;
  };
  return f;
}

ScalarField coordinate_trig(int coordinate, bool use_cos) {
  ScalarField f;
  f.eval = [=](const Vec& x) { return use_cos ? std::cos(x(coordinate)) : std::sin(x(coordinate)); };
  f.partials = [=](const Vec& x) -> Vec {
    Vec d = Vec::Zero(x.size());
    d(coordinate) = use_cos ? -std::sin(x(coordinate)) : std::cos(x(coordinate));
    return d;
  };
  f.second_partials = [=](const Vec& x) -> Mat {
    Mat h = Mat::Zero(x.size(), x.size());
    h(coordinate, coordinate) = use_cos ? -std::cos(x(coordinate)) : -std::sin(x(coordinate));
    return h;
  };
  return f;
}

}  // namespace

ScalarField random_trig_field(NormalStream& rng, int n, int terms) {
  struct Term {
    Vec m;
    double amplitude;
    double phase;
  };
  auto list = std::make_shared<std::vector<Term>>();
  for (int t = 0; t < terms; ++t) {
    Term term{Vec::Zero(n), 0.5 + rng.uniform(), kTwoPi * rng.uniform()};
    while (term.m.isZero()) {
      for (int d = 0; d < n; ++d) term.m(d) = std::floor(5.0 * rng.uniform()) - 2.0;
    }
    list->push_back(term);
  }
  ScalarField f;
  f.eval = [list](const Vec& x) {
    double s = 0.0;
    for (const Term& t : *list) s += t.amplitude * std::sin(t.m.dot(x) + t.phase);
    return s;
  };
  f.partials = [list](const Vec& x) -> Vec {
    Vec d = Vec::Zero(x.size());
    for (const Term& t : *list) d += t.amplitude * std::cos(t.m.dot(x) + t.phase) * t.m;
    return d;
  };
  f.second_partials = [list](const Vec& x) -> Mat {
    Mat h = Mat::Zero(x.size(), x.size());
    for (const Term& t : *list) {
      h -= t.amplitude * std::sin(t.m.dot(x) + t.phase) * (t.m * t.m.transpose());
    }
    return h;
  };
  return f;
}

VectorField random_e_field(const FoliatedModel& model, NormalStream& rng) {
  std::vector<ScalarField> coeffs;
  for (int i = 0; i < model.p; ++i) coeffs.push_back(random_trig_field(rng, model.n, 2));
  return [&model, coeffs](const Vec& x) -> Vec {
    const Mat U = geometry::orthonormalize(model.e_frame_at(x), model.metric_at(x));
    Vec phi(model.p);
    for (int i = 0; i < model.p; ++i) phi(i) = coeffs[i].eval(x);
    return U * phi;
  };
}

Vec random_point(NormalStream& rng, int n) {
  Vec x(n);
  for (int d = 0; d < n; ++d) x(d) = kTwoPi * rng.uniform();
  return x;
}

double loglog_slope(const std::vector<double>& dt, const std::vector<double>& err) {
  if (dt.size() != err.size() || dt.size() < 2) throw InvalidArgument("slope needs >= 2 points");
  const double n = static_cast<double>(dt.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const double lx = std::log(dt[i]);
    const double ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TestReport check_density_ode(const std::vector<double>& b_values, int N) {
  double worst = 0.0;
  std::vector<std::pair<std::string, double>> details;
  for (double b : b_values) {
    const harmonic::DensityProfile ode = harmonic::example3_density_ode_solve(b, N);
    const harmonic::DensityProfile exact = harmonic::example3_density_closed_form(b, N);
    double gap = 0.0;
    for (int j = 0; j < N; ++j) gap = std::max(gap, std::fabs(ode.values[j] - exact.values[j]));
    worst = std::max(worst, gap);
    std::ostringstream key;
    key << "linf_b" << b;
    details.emplace_back(key.str(), gap);
  }
  details.emplace_back("grid_n", N);
  return make_report("density_ode", worst, 1e-8, static_cast<std::int64_t>(b_values.size()) * N,
                     std::move(details));
}

TestReport check_harmonic_residual(double b, double alpha, int n_points, std::uint64_t seed) {
  const models::EmbeddedTorusModel torus(b, alpha);
  const ScalarField h = harmonic::example3_density_field(b);
  NormalStream rng(seed, 0, StreamDomain::auxiliary);
  double worst = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const ChartPoint x(random_point(rng, 2));
    worst = std::max(worst, std::fabs(harmonic::harmonic_residual(torus.foliated(), h, x)));
  }
  return make_report("harmonic_residual", worst, 1e-5, n_points);
}

TestReport check_decomposition(const FoliatedModel& model, const ScalarField& f, int grid) {
  double worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Vec x = Vec::Constant(model.n, 0.3);
      x(0) = kTwoPi * (i + 0.5) / grid;
      x(1) = kTwoPi * (j + 0.5) / grid;
      worst = std::max(worst,
                       std::fabs(geometry::decomposition_residual(model, f, ChartPoint(x))));
    }
  }
  return make_report("decomposition", worst, f.route_tolerance(),
                     static_cast<std::int64_t>(grid) * grid);
}

TestReport check_kappa_identity(const std::vector<const FoliatedModel*>& models, int n_fields,
                                int n_points, std::uint64_t seed) {
  double worst = 0.0;
  std::uint64_t stream = 1000;
  for (const FoliatedModel* model : models) {
    for (int k = 0; k < n_fields; ++k) {
      NormalStream rng(seed, stream++, StreamDomain::auxiliary);
      const VectorField X = random_e_field(*model, rng);
      for (int j = 0; j < n_points; ++j) {
        const ChartPoint x(random_point(rng, model->n));
        const double lhs = geometry::kappa_flat(*model, TangentVector{x, X(x.coords)});
        const double rhs = geometry::div_E(*model, X, x) - geometry::div(*model, X, x);
        worst = std::max(worst, std::fabs(lhs - rhs));
      }
    }
  }
  return make_report("kappa_identity", worst, 1e-5,
                     static_cast<std::int64_t>(models.size()) * n_fields * n_points);
}

TestReport check_qv(const VerifyOptions& o) {
  const models::EmbeddedTorusModel torus(o.b, o.alpha);
  const FoliatedModel& m = torus.foliated();
  const ScalarField f = coordinate_trig(0, false);
  sde::SdeConfig cfg;
  cfg.dt = o.qv_dt;
  cfg.n_steps = static_cast<int>(std::lround(1.0 / o.qv_dt));
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.record_noise = false;
  cfg.noise_scale = o.broken.count("qv") ? 1.1 : 1.0;
  const sde::FramePoint u0 = sde::FramePoint::at(m, ChartPoint{0.0, 0.0});
  const sde::PathEnsemble full = sde::fobm_frame_bundle(m, u0, cfg, o.qv_paths);
  sde::SdeConfig half = cfg;
  half.dt = 0.5 * cfg.dt;
  half.n_steps = 2 * cfg.n_steps;
  const sde::PathEnsemble fine = sde::fobm_frame_bundle(m, u0, half, o.qv_paths);
  TestReport r = stats::qv_identity_test(full, f, m, &fine);
  r.name = "qv";
  return r;
}

TestReport check_generator(const VerifyOptions& o) {
  const models::EmbeddedTorusModel torus(o.b, o.alpha);
  const ScalarField f = coordinate_trig(0, true);
  stats::GeneratorOptions g;
  g.seed = o.seed;
  g.threads = o.threads;
  g.noise_scale = o.broken.count("generator") ? 1.1 : 1.0;
  double worst = 0.0;
  std::vector<std::pair<std::string, double>> details;
  constexpr int kPoints = 5;
  for (int j = 0; j < kPoints; ++j) {
    const ChartPoint x{kTwoPi * j / kPoints, 0.0};
    const TestReport r =
        stats::generator_test(torus.foliated(), x, f, o.generator_delta, o.generator_paths, g);
    const double ratio = r.threshold > 0.0 ? r.statistic / r.threshold
                                           : (r.statistic == 0.0 ? 0.0 : HUGE_VAL);
    worst = std::max(worst, ratio);
    details.emplace_back("est" + std::to_string(j), r.detail("estimate"));
    details.emplace_back("target" + std::to_string(j), r.detail("target"));
    details.emplace_back("thr" + std::to_string(j), r.threshold);
  }
  return make_report("generator", worst, 1.0, static_cast<std::int64_t>(o.generator_paths) * kPoints,
                     std::move(details));
}

namespace {

harmonic::InitialSampler concentrated_sampler() {
  return [](NormalStream& rng) {
    const double x = wrap_angle(rng.normal());
    const double y = kTwoPi * rng.uniform();
    return ChartPoint{x, y};
  };
}

}  // namespace

TestReport check_invariance(const VerifyOptions& o) {
  const models::EmbeddedTorusModel torus(o.b, o.alpha);
  sde::SdeConfig cfg;
  cfg.dt = o.invariance_dt;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const std::vector<int> bins{o.bins, o.bins};
  const harmonic::ChiSquareReport uniform = harmonic::invariance_test(
      torus.foliated(), harmonic::uniform_torus_sampler(), 1.0, cfg, bins, o.invariance_paths);
  const harmonic::ChiSquareReport control = harmonic::invariance_test(
      torus.foliated(), concentrated_sampler(), 1.0, cfg, bins, o.invariance_paths);
  TestReport r = make_lower_bound_report("invariance", uniform.p_value, 0.01, uniform.n_samples,
                               {{"chi2", uniform.statistic},
                                {"dof", uniform.dof},
                                {"control_p", control.p_value}});
  // A test that cannot reject a non-invariant law proves nothing.
  r.passed = r.passed && control.p_value < 1e-6;
  return r;
}

TestReport check_leaf_confinement(const VerifyOptions& o) {
  const models::EmbeddedTorusModel torus(o.b, o.alpha);
  const FoliatedModel& m = torus.foliated();
  sde::SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 1000;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.record_noise = false;
  constexpr int kPaths = 200;
  std::vector<ChartPoint> starts;
  NormalStream rng(o.seed, 0, StreamDomain::initial_points);
  for (int i = 0; i < kPaths; ++i) starts.emplace_back(random_point(rng, 2));
  std::vector<sde::FramePoint> frames;
  for (const ChartPoint& s : starts) frames.push_back(sde::FramePoint::at(m, s));
  const sde::PathEnsemble bundle = sde::fobm_frame_bundle(m, frames, cfg);
  const sde::PathEnsemble flow = sde::fobm_flow_1d(m, starts, cfg);
  auto drift = [&](const sde::PathEnsemble& e) {
    double worst = 0.0;
    for (int i = 0; i < e.n_paths; ++i) {
      const double i0 = torus.leaf_invariant(e.initial(i));
      for (int k = 1; k < e.n_records(); ++k) {
        worst = std::max(worst, std::fabs(torus.leaf_invariant(e.state(i, k)) - i0));
      }
    }
    return worst;
  };
  const double d_bundle = drift(bundle);
  const double d_flow = drift(flow);
  return make_report("leaf_confinement", std::max(d_bundle, d_flow),
                     1e-6 * std::sqrt(static_cast<double>(cfg.n_steps)) * cfg.dt, 2 * kPaths,
                     {{"frame_bundle", d_bundle}, {"flow", d_flow}});
}

TestReport check_construction_equivalence(const VerifyOptions& o) {
  const models::EmbeddedTorusModel torus(o.b, o.alpha);
  const FoliatedModel& m = torus.foliated();
  const sde::FramePoint u0 = sde::FramePoint::at(m, ChartPoint{0.0, 0.0});
  const std::vector<double> dts{1e-2, 1e-3, 1e-4};
  std::vector<double> gaps;
  constexpr int kPathwise = 32;
  for (double dt : dts) {
    sde::SdeConfig cfg;
    cfg.dt = dt;
    cfg.n_steps = static_cast<int>(std::lround(1.0 / dt));
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const sde::PathEnsemble e = sde::fobm_frame_bundle(m, u0, cfg, kPathwise);
    double mean_sup = 0.0;
    for (int i = 0; i < kPathwise; ++i) {
      const std::vector<double> B = sde::brownian_path(e, i);
      const models::Path exact = models::example3_closed_form_fobm(torus, 0.0, 0.0, B);
      double sup = 0.0;
      for (int k = 0; k < e.n_records(); ++k) sup = std::max(sup, (e.state(i, k) - exact[k]).norm());
      mean_sup += sup / kPathwise;
    }
    gaps.push_back(mean_sup);
  }
  const double slope = loglog_slope(dts, gaps);

  // Endpoint laws with independent noise: Heun at dt = 1e-2 against the
  // exact flow evaluated at B_1.
  sde::SdeConfig heun;
  heun.dt = 1e-2;
  heun.n_steps = 100;
  heun.seed = o.seed;
  heun.threads = o.threads;
  heun.record_stride = heun.n_steps;
  heun.record_noise = false;
  const sde::PathEnsemble a = sde::fobm_frame_bundle(m, u0, heun, o.equivalence_paths);
  sde::SdeConfig exact_cfg = heun;
  exact_cfg.dt = 1.0;
  exact_cfg.n_steps = 1;
  exact_cfg.record_stride = 1;
  exact_cfg.seed = o.seed + 1;
  const sde::PathEnsemble b = sde::fobm_flow_1d(m, u0.base, exact_cfg, o.equivalence_paths);
  double p_min = 1.0;
  for (int d = 0; d < 2; ++d) {
    std::vector<double> sa, sb;
    for (int i = 0; i < o.equivalence_paths; ++i) {
      sa.push_back(wrap_angle(a.terminal(i)(d)));
      sb.push_back(wrap_angle(b.terminal(i)(d)));
    }
    p_min = std::min(p_min, stats::ks_two_sample(std::move(sa), std::move(sb)).p_value);
  }
  // Slope is a lower bound, so this report passes at or above its threshold.
  TestReport r = make_lower_bound_report("construction_equivalence", slope, 0.9, o.equivalence_paths,
                               {{"gap_dt1e-2", gaps[0]},
                                {"gap_dt1e-3", gaps[1]},
                                {"gap_dt1e-4", gaps[2]},
                                {"ks_p_min", p_min}});
  r.passed = r.passed && p_min > 0.01;
  return r;
}

TestReport check_martingale(const VerifyOptions& o) {
  const models::KroneckerModel kron(o.a);
  const FoliatedModel& m = kron.foliated();
  sde::SdeConfig cfg;
  cfg.dt = 1e-2;
  cfg.n_steps = 100;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.record_stride = cfg.n_steps;
  cfg.record_noise = false;
  sde::PathEnsemble e =
      sde::fobm_frame_bundle(m, sde::FramePoint::at(m, ChartPoint{0.0, 0.0}), cfg,
                             o.martingale_paths);
  if (o.broken.count("martingale")) {
    for (int i = 0; i < e.n_paths; ++i) {
      for (int k = 0; k < e.n_records(); ++k) {
        const std::size_t base = (static_cast<std::size_t>(i) * e.n_records() + k) * e.dim;
        for (int d = 0; d < e.dim; ++d) e.states[base + d] += e.times[k];
      }
    }
  }
  return stats::martingale_test(e, true);
}

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names{
      "grad_routes",    "laplacian_routes", "hessian_relation",  "w_tensorial",
      "mean_curvature_trace", "product_rule", "decomposition",  "kappa_identity",
      "harmonic_residual", "density_ode",  "qv",                "generator",
      "invariance",     "leaf_confinement", "construction_equivalence", "martingale"};
  return names;
}

std::vector<TestReport> run_verification(const VerifyOptions& o,
                                         const std::vector<std::string>& only) {
  const auto& names = property_names();
  for (const std::string& n : only) {
    if (std::find(names.begin(), names.end(), n) == names.end()) {
      throw InvalidArgument("unknown property: " + n);
    }
  }
  for (const std::string& n : o.broken) {
    if (n != "qv" && n != "generator" && n != "martingale") {
      throw InvalidArgument("no fault hook for property: " + n);
    }
  }
  const ModelSet set(o);
  const std::map<std::string, std::function<TestReport()>> table{
      {"grad_routes", [&] { return check_grad_routes(set, o.seed); }},
      {"laplacian_routes", [&] { return check_laplacian_routes(set, o.seed); }},
      {"hessian_relation", [&] { return check_hessian_relation(set, o.seed); }},
      {"w_tensorial", [&] { return check_w_tensorial(set, o.seed); }},
      {"mean_curvature_trace", [&] { return check_mean_curvature_trace(set, o.seed); }},
      {"product_rule", [&] { return check_product_rule(set, o.seed); }},
      {"decomposition",
       [&] {
         const ScalarField f = sin_x_cos_y();
         TestReport t = check_decomposition(set.torus.foliated(), f, 10);
         const TestReport k = check_decomposition(set.kronecker.foliated(), f, 10);
         const TestReport fd = check_decomposition(set.torus.foliated(), f.without_derivatives(), 10);
         t.details = {{"torus", t.statistic}, {"kronecker", k.statistic}, {"torus_fd", fd.statistic}};
         t.statistic = std::max(t.statistic, k.statistic);
         t.n_samples += k.n_samples;
         t.passed = t.statistic <= t.threshold && fd.passed;
         return t;
       }},
      {"kappa_identity", [&] { return check_kappa_identity(set.all(), 20, 50, o.seed); }},
      {"harmonic_residual", [&] { return check_harmonic_residual(o.b, o.alpha, 100, o.seed); }},
      {"density_ode", [&] { return check_density_ode({1.5, 2.0, 10.0}, o.grid_n); }},
      {"qv", [&] { return check_qv(o); }},
      {"generator", [&] { return check_generator(o); }},
      {"invariance", [&] { return check_invariance(o); }},
      {"leaf_confinement", [&] { return check_leaf_confinement(o); }},
      {"construction_equivalence", [&] { return check_construction_equivalence(o); }},
      {"martingale", [&] { return check_martingale(o); }},
  };
  std::vector<TestReport> out;
  for (const std::string& n : names) {
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    out.push_back(table.at(n)());
  }
  return out;
}

}  // namespace folbm::verify
