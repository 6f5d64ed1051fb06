#include "folbm/sde.hpp"

#include "folbm/geometry.hpp"
#include "folbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace folbm::sde {

namespace {

// Leafwise transport velocity of a frame E along the base displacement dx:
// dE_j = -pi Gamma(dx, e_j) + pi_perp (d_dx e~_j), e~_j the frame-coefficient
// extension of e_j.
struct Velocity {
  Vec dx;
  Mat dE;
};

Velocity transport_velocity(const FoliatedModel& model, const Vec& x, const Mat& E,
                            const Vec& dx) {
  const MetricSample m = model.metric_at(x);
  const Mat U = geometry::orthonormalize(model.e_frame_at(x), m);
  const Mat P = geometry::projector(m, U);
  const Mat Pperp = Mat::Identity(model.n, model.n) - P;
  const Christoffels gamma = model.christoffels_at
                                 ? model.christoffels_at(x)
                                 : geometry::christoffels_fd(model, ChartPoint(x));
  Velocity v{dx, Mat::Zero(model.n, model.p)};
  const double len = dx.norm();
  Mat dU = Mat::Zero(model.n, model.p);
  if (len > 0.0) {
    const Vec dir = dx / len;
    const double h = model.fd_step;
    const Mat up = geometry::orthonormalize(model.e_frame_at(x + h * dir), model.metric_at(x + h * dir));
    const Mat um = geometry::orthonormalize(model.e_frame_at(x - h * dir), model.metric_at(x - h * dir));
    dU = (up - um) * (len / (2.0 * h));
  }
  const Mat coeff = U.transpose() * (m.g * E);  // p x p
  for (int j = 0; j < model.p; ++j) {
    v.dE.col(j) = -(P * gamma.contract(dx, E.col(j))) + Pperp * (dU * coeff.col(j));
  }
  return v;
}

Mat reorthonormalize(const FoliatedModel& model, const Vec& x, const Mat& E) {
  const MetricSample m = model.metric_at(x);
  const Mat U = geometry::orthonormalize(model.e_frame_at(x), m);
  return geometry::orthonormalize(geometry::projector(m, U) * E, m);
}

// Closest point to target on the leaf through x0, found by Gauss-Newton in
// the leaf parameter s (updated in place) starting from the current point.
Vec retract_to_leaf(const FoliatedModel& model, const Vec& x0, double& s, const Vec& current,
                    const Vec& target) {
  Vec z = current;
  for (int it = 0; it < 3; ++it) {
    const MetricSample m = model.metric_at(z);
    const Vec y = geometry::orthonormalize(model.e_frame_at(z), m).col(0);
    const double step = m.inner(y, target - z);
    s += step;
    z = model.leaf_flow(x0, s);
    if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(s))) break;
  }
  return z;
}

void write_state(std::span<double> out, int record, const Vec& x) {
  const int n = static_cast<int>(x.size());
  for (int d = 0; d < n; ++d) out[static_cast<std::size_t>(record) * n + d] = x(d);
}

std::vector<double> recorded_times(const SdeConfig& cfg, const std::vector<int>& steps) {
  std::vector<double> t(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) t[i] = cfg.dt * steps[i];
  return t;
}

PathEnsemble make_ensemble(const FoliatedModel& model, const SdeConfig& cfg, int n_paths) {
  PathEnsemble e;
  e.model_id = model.id;
  e.n_paths = n_paths;
  e.dim = model.n;
  e.noise_dim = model.p;
  e.n_steps = cfg.n_steps;
  e.dt = cfg.dt;
  e.record_stride = cfg.record_stride;
  e.steps = cfg.recorded_steps();
  e.times = recorded_times(cfg, e.steps);
  e.states.assign(static_cast<std::size_t>(n_paths) * e.steps.size() * model.n, 0.0);
  if (cfg.record_noise) {
    e.noise.assign(static_cast<std::size_t>(n_paths) * cfg.n_steps * model.p, 0.0);
  }
  return e;
}

std::span<double> path_states(PathEnsemble& e, int path) {
  const std::size_t len = static_cast<std::size_t>(e.n_records()) * e.dim;
  return std::span<double>(e.states).subspan(static_cast<std::size_t>(path) * len, len);
}

std::span<double> path_noise(PathEnsemble& e, int path) {
  if (e.noise.empty()) return {};
  const std::size_t len = static_cast<std::size_t>(e.n_steps) * e.noise_dim;
  return std::span<double>(e.noise).subspan(static_cast<std::size_t>(path) * len, len);
}

}  // namespace

FramePoint FramePoint::at(const FoliatedModel& model, const ChartPoint& x) {
  return {x, geometry::orthonormal_e_frame(model, x)};
}

void SdeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
  if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  if (reorthonormalize_every < 1) throw InvalidArgument("reorthonormalize_every must be >= 1");
  if (record_stride < 1) throw InvalidArgument("record_stride must be >= 1");
  if (!(noise_scale >= 0.0)) throw InvalidArgument("noise_scale must be >= 0");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

std::vector<int> SdeConfig::recorded_steps() const {
  std::vector<int> steps;
  for (int k = 0; k <= n_steps; k += record_stride) steps.push_back(k);
  if (steps.back() != n_steps) steps.push_back(n_steps);
  return steps;
}

Vec PathEnsemble::state(int path, int record) const {
  Vec x(dim);
  const std::size_t base = (static_cast<std::size_t>(path) * n_records() + record) * dim;
  for (int d = 0; d < dim; ++d) x(d) = states[base + d];
  return x;
}

std::span<const double> PathEnsemble::noise_of(int path) const {
  if (noise.empty()) throw InvalidArgument("ensemble was simulated without recording noise");
  const std::size_t len = static_cast<std::size_t>(n_steps) * noise_dim;
  return std::span<const double>(noise).subspan(static_cast<std::size_t>(path) * len, len);
}

HorizontalVelocity horizontal_field(const FoliatedModel& model, const FramePoint& u, int i) {
  if (i < 0 || i >= model.p) throw InvalidArgument("horizontal field index out of range");
  if (u.frame.rows() != model.n || u.frame.cols() != model.p) {
    throw InvalidArgument("frame must be n x p");
  }
  const Vec e = u.frame.col(i);
  const Velocity v = transport_velocity(model, u.base.coords, u.frame, e);
  return {TangentVector{u.base, e}, v.dE};
}

FramePoint heun_step(const FoliatedModel& model, const FramePoint& u, const Vec& dB,
                     bool reorthonormalize_frame) {
  const Vec& x = u.base.coords;
  const Mat& E = u.frame;
  const Velocity k1 = transport_velocity(model, x, E, E * dB);
  const Vec x_pred = x + k1.dx;
  const Mat E_pred = E + k1.dE;
  const Velocity k2 = transport_velocity(model, x_pred, E_pred, E_pred * dB);
  FramePoint next{ChartPoint(Vec(x + 0.5 * (k1.dx + k2.dx))), E + 0.5 * (k1.dE + k2.dE)};
  if (reorthonormalize_frame) next.frame = reorthonormalize(model, next.base.coords, next.frame);
  return next;
}

int resolve_thread_count(int requested) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* cap = std::getenv("FOLBM_THREADS")) {
      const int c = std::atoi(cap);
      if (c >= 1) n = std::min(n, c);
    }
  }
  return std::max(1, n);
}

void for_each_path(int n_paths, int threads, const std::function<void(int)>& fn) {
  const int workers = std::min(std::max(1, threads), std::max(1, n_paths));
  if (workers == 1) {
    for (int i = 0; i < n_paths; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n_paths; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

void simulate_frame_bundle_path(const FoliatedModel& model, const FramePoint& u0,
                                const SdeConfig& cfg, std::uint64_t path_id,
                                std::span<double> states_out, std::span<double> noise_out) {
  const int p = model.p;
  NormalStream rng(cfg.seed, path_id);
  const double sqrt_dt = std::sqrt(cfg.dt);
  Vec x = u0.base.coords;
  Mat E = u0.frame;
  Vec dB(p);
  // With a closed-form leaf flow the base point is kept as flow(x0, s) and each
  // Heun step only updates the leaf parameter s.
  const bool retract = cfg.leaf_retraction && p == 1 && static_cast<bool>(model.leaf_flow);
  double s = 0.0;
  int record = 0;
  write_state(states_out, record++, x);
  for (int k = 0; k < cfg.n_steps; ++k) {
    for (int i = 0; i < p; ++i) dB(i) = cfg.noise_scale * sqrt_dt * rng.normal();
    if (!noise_out.empty()) {
      for (int i = 0; i < p; ++i) noise_out[static_cast<std::size_t>(k) * p + i] = dB(i);
    }
    try {
      const bool renormalize = retract || (k + 1) % cfg.reorthonormalize_every == 0;
      FramePoint u = heun_step(model, FramePoint{ChartPoint(x), E}, dB, !retract && renormalize);
      if (retract) {
        x = retract_to_leaf(model, u0.base.coords, s, x, u.base.coords);
        E = reorthonormalize(model, x, u.frame);
      } else {
        x = u.base.coords;
        E = u.frame;
      }
    } catch (const SingularMetric& err) {
      throw StepRejected("path " + std::to_string(path_id) + " step " + std::to_string(k) +
                         ": " + err.what());
    } catch (const DegenerateFrame& err) {
      throw StepRejected("path " + std::to_string(path_id) + " step " + std::to_string(k) +
                         ": " + err.what());
    }
    if (!x.allFinite()) {
      throw StepRejected("path " + std::to_string(path_id) + " left the finite chart at step " +
                         std::to_string(k));
    }
    const int step = k + 1;
    if (step % cfg.record_stride == 0 || step == cfg.n_steps) write_state(states_out, record++, x);
  }
}

PathEnsemble fobm_frame_bundle(const FoliatedModel& model, std::span<const FramePoint> starts,
                               const SdeConfig& cfg) {
  model.validate();
  cfg.validate();
  for (const FramePoint& u : starts) {
    if (u.base.dim() != model.n || u.frame.rows() != model.n || u.frame.cols() != model.p) {
      throw InvalidArgument("start frame does not match the model dimensions");
    }
  }
  const int n_paths = static_cast<int>(starts.size());
  PathEnsemble e = make_ensemble(model, cfg, n_paths);
  for_each_path(n_paths, resolve_thread_count(cfg.threads), [&](int path) {
    simulate_frame_bundle_path(model, starts[path], cfg, static_cast<std::uint64_t>(path),
                               path_states(e, path), path_noise(e, path));
  });
  return e;
}

PathEnsemble fobm_frame_bundle(const FoliatedModel& model, const FramePoint& u0,
                               const SdeConfig& cfg, int n_paths) {
  if (n_paths < 1) throw InvalidArgument("n_paths must be >= 1");
  const std::vector<FramePoint> starts(static_cast<std::size_t>(n_paths), u0);
  return fobm_frame_bundle(model, starts, cfg);
}

Vec leaf_flow(const FoliatedModel& model, const Vec& x0, double t) {
  if (model.p != 1) throw InvalidArgument("leaf flow needs a one-dimensional foliation");
  if (model.leaf_flow) return model.leaf_flow(x0, t);
  const auto field = [&model](const Vec& x) -> Vec {
    return geometry::orthonormalize(model.e_frame_at(x), model.metric_at(x)).col(0);
  };
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::fabs(t) / 0.01)));
  const double h = t / substeps;
  Vec x = x0;
  for (int s = 0; s < substeps; ++s) {
    const Vec k1 = field(x);
    const Vec k2 = field(x + 0.5 * h * k1);
    const Vec k3 = field(x + 0.5 * h * k2);
    const Vec k4 = field(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

void simulate_flow_path(const FoliatedModel& model, const ChartPoint& x0, const SdeConfig& cfg,
                        std::uint64_t path_id, std::span<double> states_out,
                        std::span<double> noise_out) {
  NormalStream rng(cfg.seed, path_id);
  const double sqrt_dt = std::sqrt(cfg.dt);
  double B = 0.0;
  Vec x = x0.coords;
  int record = 0;
  write_state(states_out, record++, x);
  for (int k = 0; k < cfg.n_steps; ++k) {
    const double dB = cfg.noise_scale * sqrt_dt * rng.normal();
    if (!noise_out.empty()) noise_out[k] = dB;
    B += dB;
    // Closed-form flows are evaluated from the start so no error accumulates;
    // numeric flows advance incrementally.
    x = model.leaf_flow ? model.leaf_flow(x0.coords, B) : leaf_flow(model, x, dB);
    const int step = k + 1;
    if (step % cfg.record_stride == 0 || step == cfg.n_steps) write_state(states_out, record++, x);
  }
}

PathEnsemble fobm_flow_1d(const FoliatedModel& model, std::span<const ChartPoint> starts,
                          const SdeConfig& cfg) {
  model.validate();
  cfg.validate();
  if (model.p != 1) throw InvalidArgument("fobm_flow_1d requires p == 1");
  for (const ChartPoint& x0 : starts) {
    if (x0.dim() != model.n) throw InvalidArgument("start point does not match model dimension");
  }
  if (!starts.empty()) {
    const ChartPoint& x0 = starts.front();
    const VectorField Y = [&model](const Vec& y) -> Vec {
      return geometry::orthonormal_e_frame(model, ChartPoint(y)).col(0);
    };
    const Vec y0 = Y(x0.coords);
    const Vec accel = geometry::covariant_derivative(model, Y, x0, y0);
    const TangentVector along = geometry::project_E(model, TangentVector{x0, accel});
    const double size = geometry::metric(model, x0).norm(along.components);
    if (size > tol::routes_analytic) {
      throw NotGeodesicLeafField("leafwise acceleration of the leaf field is " +
                                 std::to_string(size));
    }
  }
  const int n_paths = static_cast<int>(starts.size());
  PathEnsemble e = make_ensemble(model, cfg, n_paths);
  for_each_path(n_paths, resolve_thread_count(cfg.threads), [&](int path) {
    simulate_flow_path(model, starts[path], cfg, static_cast<std::uint64_t>(path),
                       path_states(e, path), path_noise(e, path));
  });
  return e;
}

PathEnsemble fobm_flow_1d(const FoliatedModel& model, const ChartPoint& x0, const SdeConfig& cfg,
                          int n_paths) {
  if (n_paths < 1) throw InvalidArgument("n_paths must be >= 1");
  const std::vector<ChartPoint> starts(static_cast<std::size_t>(n_paths), x0);
  return fobm_flow_1d(model, starts, cfg);
}

std::vector<double> brownian_path(const PathEnsemble& ensemble, int path) {
  if (ensemble.noise_dim != 1) throw InvalidArgument("brownian_path needs one noise component");
  const auto inc = ensemble.noise_of(path);
  std::vector<double> B(inc.size() + 1, 0.0);
  for (std::size_t k = 0; k < inc.size(); ++k) B[k + 1] = B[k] + inc[k];
  return B;
}

}  // namespace folbm::sde
