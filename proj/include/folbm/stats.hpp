#pragma once

// Statistical checks tying simulated ensembles to the probabilistic
// characterization of foliated Brownian motion. Every check uses the same
// gate: a statistic within three standard errors, plus a discretization bias
// budget estimated by halving the step where one applies.

#include "folbm/model.hpp"
#include "folbm/sde.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace folbm::stats {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::int64_t n_samples = 0;
  bool passed = false;
  std::vector<std::pair<std::string, double>> details;

  [[nodiscard]] double detail(const std::string& key) const;
  /// "name statistic threshold PASS|FAIL" followed by key=value details.
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::int64_t n = 0;
};
[[nodiscard]] MeanEstimate mean_with_error(std::span<const double> samples);

/// Mean terminal displacement per coordinate; passes when every mean is
/// within 3 standard errors of zero. Only valid for flat charts, where the
/// coordinates themselves are the martingale test functions (WrongModel
/// otherwise).
[[nodiscard]] TestReport martingale_test(const sde::PathEnsemble& ensemble,
                                         bool coordinates_are_flat);

/// Realized quadratic variation sum (f(X_{k+1}) - f(X_k))^2 against
/// sum |grad_E f(X_k)|^2 dt. With a half-step ensemble, twice the
/// step-halving bias estimate enters the threshold.
[[nodiscard]] TestReport qv_identity_test(const sde::PathEnsemble& ensemble,
                                          const ScalarField& f, const FoliatedModel& model,
                                          const sde::PathEnsemble* half_step = nullptr);

/// Compares an estimate of 2 (E f(X_delta) - f(x)) / delta with a target
/// value of Delta_E f(x).
[[nodiscard]] TestReport generator_report(double f_at_start, std::span<const double> f_delta,
                                          std::span<const double> f_half_delta, double delta,
                                          double laplacian_target);

struct GeneratorOptions {
  int steps_per_delta = 2;
  std::uint64_t seed = 1;
  int threads = 0;
  double noise_scale = 1.0;
};

/// Simulates n_paths frame-bundle paths from x to time delta and delta / 2
/// (common random numbers) and checks the generator against laplacian_E.
[[nodiscard]] TestReport generator_test(const FoliatedModel& model, const ChartPoint& x,
                                        const ScalarField& f, double delta, int n_paths,
                                        const GeneratorOptions& options = {});

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
[[nodiscard]] KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Survival function of the Kolmogorov distribution.
[[nodiscard]] double kolmogorov_q(double lambda);

}  // namespace folbm::stats
