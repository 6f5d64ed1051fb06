#include "folbm/stats.hpp"

#include "folbm/geometry.hpp"
#include "folbm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace folbm::stats {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double TestReport::detail(const std::string& key) const {
  for (const auto& [k, v] : details)
    if (k == key) return v;
  throw InvalidArgument("report " + name + " has no detail " + key);
}

std::string TestReport::to_text() const {
  std::ostringstream out;
  out << name << ' ' << format_number(statistic) << ' ' << format_number(threshold) << ' '
      << (passed ? "PASS" : "FAIL") << " n=" << n_samples;
  for (const auto& [k, v] : details) out << ' ' << k << '=' << format_number(v);
  return out.str();
}

std::string TestReport::csv_header() { return "name,statistic,threshold,n_samples,passed"; }

std::string TestReport::csv_row() const {
  std::ostringstream out;
  out << name << ',' << format_number(statistic) << ',' << format_number(threshold) << ','
      << n_samples << ',' << (passed ? 1 : 0);
  return out.str();
}

MeanEstimate mean_with_error(std::span<const double> samples) {
  MeanEstimate e;
  e.n = static_cast<std::int64_t>(samples.size());
  if (e.n == 0) return e;
  const kernels::SumStats s = kernels::sum_and_sum_sq(samples);
  const double n = static_cast<double>(e.n);
  e.mean = s.sum / n;
  if (e.n > 1) {
    const double var = std::max(0.0, (s.sum_sq - n * e.mean * e.mean) / (n - 1.0));
    e.standard_error = std::sqrt(var / n);
  }
  return e;
}

TestReport martingale_test(const sde::PathEnsemble& ensemble, bool coordinates_are_flat) {
  if (!coordinates_are_flat) {
    throw WrongModel("coordinate martingale test requires a flat chart");
  }
  if (ensemble.n_paths < 2) throw InsufficientSamples("martingale test needs >= 2 paths");
  TestReport r;
  r.name = "martingale";
  r.threshold = 3.0;
  r.n_samples = ensemble.n_paths;
  double worst = 0.0;
  std::vector<double> disp(ensemble.n_paths);
  for (int d = 0; d < ensemble.dim; ++d) {
    for (int i = 0; i < ensemble.n_paths; ++i) {
      disp[i] = ensemble.terminal(i)(d) - ensemble.initial(i)(d);
    }
    const MeanEstimate m = mean_with_error(disp);
    double z = 0.0;
    if (m.standard_error > 0.0) {
      z = std::fabs(m.mean) / m.standard_error;
    } else if (m.mean != 0.0) {
      z = std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, z);
    r.details.emplace_back("mean_x" + std::to_string(d + 1), m.mean);
    r.details.emplace_back("se_x" + std::to_string(d + 1), m.standard_error);
  }
  r.statistic = worst;
  r.passed = worst <= r.threshold;
  return r;
}

namespace {

struct QvSummary {
  double gap = 0.0;
  double se = 0.0;
  double mean_qv = 0.0;
  double mean_integral = 0.0;
};

QvSummary qv_summary(const sde::PathEnsemble& e, const ScalarField& f,
                     const FoliatedModel& model) {
  if (!e.has_every_step()) throw ThinnedEnsemble("quadratic variation needs every step");
  if (e.n_paths < 2) throw InsufficientSamples("QV test needs >= 2 paths");
  const int records = e.n_records();
  std::vector<double> qv(e.n_paths), integral(e.n_paths), diff(e.n_paths);
  std::vector<double> fvals(records);
  for (int i = 0; i < e.n_paths; ++i) {
    double acc = 0.0;
    for (int k = 0; k < records; ++k) {
      const Vec x = e.state(i, k);
      fvals[k] = f.eval(x);
      if (k + 1 < records) {
        const ChartPoint pt(x);
        const TangentVector g = geometry::grad_E(model, f, pt);
        const double norm = geometry::metric(model, pt).norm(g.components);
        acc += norm * norm * (e.times[k + 1] - e.times[k]);
      }
    }
    qv[i] = kernels::sum_sq_diff(fvals);
    integral[i] = acc;
    diff[i] = qv[i] - acc;
  }
  QvSummary s;
  s.mean_qv = mean_with_error(qv).mean;
  s.mean_integral = mean_with_error(integral).mean;
  const MeanEstimate d = mean_with_error(diff);
  if (s.mean_integral > 0.0) {
    s.gap = d.mean / s.mean_integral;
    s.se = d.standard_error / s.mean_integral;
  } else {
    s.gap = d.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    s.se = 0.0;
  }
  return s;
}

}  // namespace

TestReport qv_identity_test(const sde::PathEnsemble& ensemble, const ScalarField& f,
                            const FoliatedModel& model, const sde::PathEnsemble* half_step) {
  const QvSummary s = qv_summary(ensemble, f, model);
  double bias = 0.0;
  if (half_step != nullptr) {
    const QvSummary h = qv_summary(*half_step, f, model);
    // Richardson estimate of the first-order bias at the coarse step.
    bias = 2.0 * std::fabs(s.gap - h.gap);
  }
  TestReport r;
  r.name = "qv_identity";
  r.statistic = std::fabs(s.gap);
  r.threshold = std::max(3.0 * s.se, 2.0 * bias);
  r.n_samples = ensemble.n_paths;
  r.passed = r.statistic <= r.threshold;
  r.details = {{"relative_gap", s.gap},
               {"standard_error", s.se},
               {"bias_estimate", bias},
               {"mean_qv", s.mean_qv},
               {"mean_integral", s.mean_integral},
               {"dt", ensemble.dt}};
  return r;
}

TestReport generator_report(double f_at_start, std::span<const double> f_delta,
                            std::span<const double> f_half_delta, double delta,
                            double laplacian_target) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const MeanEstimate full = mean_with_error(f_delta);
  const MeanEstimate half = mean_with_error(f_half_delta);
  const double est = 2.0 * (full.mean - f_at_start) / delta;
  const double se = 2.0 * full.standard_error / delta;
  const double est_half = 2.0 * (half.mean - f_at_start) / (0.5 * delta);
  // bias ~ c delta with c from the two step sizes: c delta = 2 |est - est_half|
  const double bias_budget = 2.0 * std::fabs(est - est_half);
  TestReport r;
  r.name = "generator";
  r.statistic = std::fabs(est - laplacian_target);
  r.threshold = 3.0 * se + bias_budget;
  r.n_samples = full.n;
  r.passed = r.statistic <= r.threshold;
  r.details = {{"estimate", est},
               {"estimate_half_delta", est_half},
               {"target", laplacian_target},
               {"standard_error", se},
               {"bias_budget", bias_budget},
               {"delta", delta}};
  return r;
}

TestReport generator_test(const FoliatedModel& model, const ChartPoint& x, const ScalarField& f,
                          double delta, int n_paths, const GeneratorOptions& options) {
  if (!(delta > 0.0) || delta > 1e-2) throw InvalidArgument("delta must be in (0, 1e-2]");
  if (n_paths < 2) throw InvalidArgument("generator test needs >= 2 paths");
  const sde::FramePoint u0 = sde::FramePoint::at(model, x);
  auto sample = [&](double horizon) {
    sde::SdeConfig cfg;
    cfg.n_steps = options.steps_per_delta;
    cfg.dt = horizon / options.steps_per_delta;
    cfg.seed = options.seed;
    cfg.record_stride = cfg.n_steps;
    cfg.record_noise = false;
    cfg.threads = options.threads;
    cfg.noise_scale = options.noise_scale;
    const sde::PathEnsemble e = sde::fobm_frame_bundle(model, u0, cfg, n_paths);
    std::vector<double> values(n_paths);
    for (int i = 0; i < n_paths; ++i) values[i] = f.eval(e.terminal(i));
    return values;
  };
  const std::vector<double> full = sample(delta);
  const std::vector<double> half = sample(0.5 * delta);
  TestReport r = generator_report(f.eval(x.coords), full, half, delta,
                                  geometry::laplacian_E(model, f, x));
  for (int d = 0; d < x.dim(); ++d) r.details.emplace_back("x" + std::to_string(d + 1), x.coords(d));
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-16 * std::fabs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientSamples("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

}  // namespace folbm::stats
