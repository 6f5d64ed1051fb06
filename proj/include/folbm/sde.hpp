#pragma once

// Foliated Brownian motion integrators.
//
// fobm_frame_bundle solves du = sum_i H_i(u) o dB^i on the bundle of
// orthonormal frames of E with the Stratonovich-Heun predictor-corrector and
// records the base point r(u). fobm_flow_1d evaluates the flow of the unit
// leaf field at Brownian time, for models with p == 1.
//
// Ensembles are built from a pure per-path kernel with a private noise stream
// per path, so output does not depend on the number of threads.

#include "folbm/model.hpp"
#include "folbm/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace folbm::sde {

/// A point of O(E): base point plus orthonormal E-frame (n x p, columns).
struct FramePoint {
  ChartPoint base;
  Mat frame;

  /// Base point with the model's orthonormalized E-frame.
  static FramePoint at(const FoliatedModel& model, const ChartPoint& x);
};

enum class Scheme { stratonovich_heun };

struct SdeConfig {
  double dt = 1e-3;
  int n_steps = 1000;
  Scheme scheme = Scheme::stratonovich_heun;
  std::uint64_t seed = 0;
  int reorthonormalize_every = 1;
  /// For p == 1 models with a closed-form leaf flow, project every step back
  /// onto the starting leaf so paths never drift off it.
  bool leaf_retraction = true;
  /// Record every k-th step (the final step is always recorded).
  int record_stride = 1;
  bool record_noise = true;
  /// Test hook: multiplies every Brownian increment. Leave at 1.
  double noise_scale = 1.0;
  /// 0 selects the hardware concurrency capped by FOLBM_THREADS.
  int threads = 0;

  [[nodiscard]] double horizon() const { return dt * n_steps; }
  void validate() const;
  /// Step indices that are stored: 0, stride, 2 stride, ..., n_steps.
  [[nodiscard]] std::vector<int> recorded_steps() const;
};

struct PathEnsemble {
  std::string model_id;
  int n_paths = 0;
  int dim = 0;
  int noise_dim = 0;
  int n_steps = 0;
  double dt = 0.0;
  int record_stride = 1;
  std::vector<int> steps;      // recorded step indices
  std::vector<double> times;   // recorded times
  std::vector<double> states;  // [path][record][dim], universal-cover coordinates
  std::vector<double> noise;   // [path][step][noise_dim]; empty when not recorded

  [[nodiscard]] int n_records() const { return static_cast<int>(times.size()); }
  [[nodiscard]] Vec state(int path, int record) const;
  [[nodiscard]] Vec initial(int path) const { return state(path, 0); }
  [[nodiscard]] Vec terminal(int path) const { return state(path, n_records() - 1); }
  [[nodiscard]] std::span<const double> noise_of(int path) const;
  [[nodiscard]] bool has_every_step() const { return record_stride == 1; }
};

struct HorizontalVelocity {
  TangentVector base_velocity;
  Mat frame_velocity;  // n x p, column j is the velocity of frame vector j
};

/// Standard horizontal field H_{e_i} at u (i is 0-based). The frame moves by
/// leafwise parallel transport: the E-part of its covariant derivative is
/// zero and the normal part keeps it tangent to E.
[[nodiscard]] HorizontalVelocity horizontal_field(const FoliatedModel& model,
                                                  const FramePoint& u, int i);

/// One Stratonovich-Heun step of the frame-bundle equation driven by the
/// increment dB (length p), optionally followed by E-projection and
/// Gram-Schmidt of the frame.
[[nodiscard]] FramePoint heun_step(const FoliatedModel& model, const FramePoint& u, const Vec& dB,
                                   bool reorthonormalize_frame = true);

/// Number of worker threads for a request (0 = automatic).
[[nodiscard]] int resolve_thread_count(int requested);

/// Runs fn(path) for every path in [0, n_paths) on `threads` workers.
void for_each_path(int n_paths, int threads, const std::function<void(int)>& fn);

/// Per-path kernel: fills states_out ([record][dim]) and, when non-empty,
/// noise_out ([step][p]) for stream `path_id`.
void simulate_frame_bundle_path(const FoliatedModel& model, const FramePoint& u0,
                                const SdeConfig& cfg, std::uint64_t path_id,
                                std::span<double> states_out, std::span<double> noise_out);

[[nodiscard]] PathEnsemble fobm_frame_bundle(const FoliatedModel& model, const FramePoint& u0,
                                             const SdeConfig& cfg, int n_paths);
/// One path per start point.
[[nodiscard]] PathEnsemble fobm_frame_bundle(const FoliatedModel& model,
                                             std::span<const FramePoint> starts,
                                             const SdeConfig& cfg);

/// Flow of the unit leaf field at time t, using the model's closed form when
/// present and fourth-order Runge-Kutta otherwise.
[[nodiscard]] Vec leaf_flow(const FoliatedModel& model, const Vec& x0, double t);

void simulate_flow_path(const FoliatedModel& model, const ChartPoint& x0, const SdeConfig& cfg,
                        std::uint64_t path_id, std::span<double> states_out,
                        std::span<double> noise_out);

/// Requires p == 1 and a leaf field with vanishing leafwise acceleration at x0
/// (NotGeodesicLeafField otherwise).
[[nodiscard]] PathEnsemble fobm_flow_1d(const FoliatedModel& model, const ChartPoint& x0,
                                        const SdeConfig& cfg, int n_paths);
[[nodiscard]] PathEnsemble fobm_flow_1d(const FoliatedModel& model,
                                        std::span<const ChartPoint> starts,
                                        const SdeConfig& cfg);

/// Cumulative sums of a path's recorded increments, starting at 0 (p == 1).
[[nodiscard]] std::vector<double> brownian_path(const PathEnsemble& ensemble, int path);

}  // namespace folbm::sde
