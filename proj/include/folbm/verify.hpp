#pragma once

// The property suite behind `folbm verify`: operator identities checked at
// random points with random test fields, the density solve, and the
// statistical checks on simulated ensembles. Each property yields one
// TestReport.

#include "folbm/model.hpp"
#include "folbm/rng.hpp"
#include "folbm/stats.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace folbm::verify {

struct VerifyOptions {
  double a = 1.4142135623730951;
  double b = 2.0;
  double alpha = 1.0;
  std::uint64_t seed = 1;
  int threads = 0;
  int qv_paths = 1000;
  double qv_dt = 1e-3;
  int generator_paths = 100000;
  double generator_delta = 1e-3;
  int invariance_paths = 100000;
  double invariance_dt = 1e-2;
  int bins = 16;
  int martingale_paths = 10000;
  int equivalence_paths = 10000;
  int grid_n = 256;
  /// Fault injection for negative controls: "qv" and "generator" scale the
  /// driving noise by 1.1, "martingale" adds a unit drift.
  std::set<std::string> broken;
};

/// Names in the order they run.
[[nodiscard]] const std::vector<std::string>& property_names();

/// Runs the properties in `only` (all of them when empty). InvalidArgument
/// for unknown names.
[[nodiscard]] std::vector<stats::TestReport> run_verification(
    const VerifyOptions& options, const std::vector<std::string>& only = {});

/// Sum of a few sin(m . x + phase) terms with small integer wavevectors m,
/// with analytic first and second partials.
[[nodiscard]] ScalarField random_trig_field(NormalStream& rng, int n, int terms = 3);

/// Section of E: sum_i phi_i u_i with random trigonometric coefficients over
/// the orthonormal E-frame. The model must outlive the field.
[[nodiscard]] VectorField random_e_field(const FoliatedModel& model, NormalStream& rng);

/// Uniform point of [0, 2pi)^n.
[[nodiscard]] Vec random_point(NormalStream& rng, int n);

/// Least-squares slope of log(err) against log(dt).
[[nodiscard]] double loglog_slope(const std::vector<double>& dt, const std::vector<double>& err);

// Individual properties, also used by the acceptance suite.
[[nodiscard]] stats::TestReport check_density_ode(const std::vector<double>& b_values, int N);
[[nodiscard]] stats::TestReport check_harmonic_residual(double b, double alpha, int n_points,
                                                        std::uint64_t seed);
[[nodiscard]] stats::TestReport check_decomposition(const FoliatedModel& model,
                                                    const ScalarField& f, int grid);
[[nodiscard]] stats::TestReport check_kappa_identity(const std::vector<const FoliatedModel*>& models,
                                                     int n_fields, int n_points,
                                                     std::uint64_t seed);
[[nodiscard]] stats::TestReport check_qv(const VerifyOptions& options);
[[nodiscard]] stats::TestReport check_generator(const VerifyOptions& options);
[[nodiscard]] stats::TestReport check_invariance(const VerifyOptions& options);
[[nodiscard]] stats::TestReport check_leaf_confinement(const VerifyOptions& options);
[[nodiscard]] stats::TestReport check_construction_equivalence(const VerifyOptions& options);
[[nodiscard]] stats::TestReport check_martingale(const VerifyOptions& options);

}  // namespace folbm::verify
