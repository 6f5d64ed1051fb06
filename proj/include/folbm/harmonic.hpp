#pragma once

#include "folbm/model.hpp"
#include "folbm/models.hpp"
#include "folbm/rng.hpp"
#include "folbm/sde.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace folbm::harmonic {

/// Density h(x) of a harmonic measure h mu_g on the embedded torus, sampled
/// on N uniformly spaced points of [0, 2pi). Normalized so that
/// int int h(x) (b + cos x) dx dy = 1.
struct DensityProfile {
  double b = 0.0;
  std::vector<double> grid;
  std::vector<double> values;

  /// Trapezoid value of int int h dmu_g (periodic rule).
  [[nodiscard]] double normalization_integral() const;
};

struct DensitySolution {
  DensityProfile profile;
  double smallest_singular_value = 0.0;
  double second_singular_value = 0.0;
  bool sign_definite = false;
};

/// Null vector of the Fourier-collocation discretization of
///   (b + cos x) h'' - 2 sin x h' - cos x h = 0,
/// sign-fixed positive and normalized. Requires b > 1 and N >= 32 a power of
/// two. Throws NoNullVector when the smallest singular value exceeds 1e-6 or
/// the null vector changes sign.
[[nodiscard]] DensityProfile example3_density_ode_solve(double b, int N);

/// Same computation without precondition or acceptance checks, reporting the
/// singular values instead. Used for diagnostics on coarse grids.
[[nodiscard]] DensitySolution solve_density_ode_unchecked(double b, int N);

/// 1 / (4 pi^2 (b + cos x)) on the same grid.
[[nodiscard]] DensityProfile example3_density_closed_form(double b, int N);
/// Closed-form density as a field on the torus, with analytic derivatives.
[[nodiscard]] ScalarField example3_density_field(double b);
/// Left side of the density ODE for given h, h', h''.
[[nodiscard]] double example3_ode_residual(double b, double x, double h, double dh, double d2h);

/// Fourier spectral differentiation matrices on N points (N even).
[[nodiscard]] Eigen::MatrixXd fourier_d1(int N);
[[nodiscard]] Eigen::MatrixXd fourier_d2(int N);

/// div(grad_E h - h kappa) at x; zero where h mu_g is harmonic.
[[nodiscard]] double harmonic_residual(const FoliatedModel& model, const ScalarField& h,
                                       const ChartPoint& x);

/// Counts over a regular grid of [0, 2pi)^n in chart (Lebesgue) coordinates.
struct OccupationHistogram {
  std::vector<int> bins;
  std::vector<std::int64_t> counts;  // row-major, last coordinate fastest
  std::int64_t total = 0;

  explicit OccupationHistogram(std::vector<int> bins_per_coordinate = {});
  [[nodiscard]] std::size_t flat_index(std::span<const int> idx) const;
  [[nodiscard]] double bin_center(int coordinate, int index) const;
  /// Adds points stored as consecutive n-tuples on the universal cover.
  void add_points(std::span<const double> coords);
};

struct OccupationOptions {
  /// Records with t < burn_in are discarded.
  double burn_in = 10.0;
};

[[nodiscard]] OccupationHistogram occupation_estimate(const sde::PathEnsemble& ensemble,
                                                      std::vector<int> bins,
                                                      const OccupationOptions& options = {});

struct ChiSquareReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::int64_t n_samples = 0;
  double min_expected = 0.0;
};

[[nodiscard]] double chi_square_p_value(double statistic, int dof);
/// Goodness of fit against equal bin probabilities.
[[nodiscard]] ChiSquareReport chi_square_uniform(const OccupationHistogram& h);
/// Homogeneity of two histograms with equal totals. Throws
/// InsufficientSamples when a pooled expected count is below 5.
[[nodiscard]] ChiSquareReport chi_square_homogeneity(const OccupationHistogram& a,
                                                     const OccupationHistogram& b);

/// Draws a start point from a candidate law.
using InitialSampler = std::function<ChartPoint(NormalStream&)>;

[[nodiscard]] InitialSampler uniform_torus_sampler();

/// Draws n_paths start points (stream domain initial_points, seeded by
/// cfg.seed), evolves them to time t with the frame-bundle integrator using
/// cfg.dt, and compares the start and end histograms.
[[nodiscard]] ChiSquareReport invariance_test(const FoliatedModel& model,
                                              const InitialSampler& sampler, double t,
                                              const sde::SdeConfig& cfg, std::vector<int> bins,
                                              int n_paths);

/// int Delta_E f * density dmu_g over [0, 2pi)^n by the periodic trapezoid
/// rule on G points per coordinate.
[[nodiscard]] double harmonicity_quadrature(const FoliatedModel& model,
                                            const ScalarField& density, const ScalarField& f,
                                            int G = 128);

}  // namespace folbm::harmonic
