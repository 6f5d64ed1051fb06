#include "folbm/harmonic.hpp"

#include "folbm/geometry.hpp"
#include "folbm/kernels.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace folbm::harmonic {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> uniform_grid(int N) {
  std::vector<double> x(N);
  for (int j = 0; j < N; ++j) x[j] = kTwoPi * j / N;
  return x;
}

void normalize_profile(DensityProfile& p) {
  const double integral = p.normalization_integral();
  for (double& v : p.values) v /= integral;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

double DensityProfile::normalization_integral() const {
  const int N = static_cast<int>(grid.size());
  std::vector<double> weight(N);
  for (int j = 0; j < N; ++j) weight[j] = b + std::cos(grid[j]);
  // periodic trapezoid in x, exact 2pi in y
  return kTwoPi * (kTwoPi / N) * kernels::dot(values, weight);
}

Eigen::MatrixXd fourier_d1(int N) {
  if (N < 2 || N % 2 != 0) throw InvalidArgument("Fourier differentiation needs even N");
  const double h = kTwoPi / N;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = 0.5 * sign / std::tan(0.5 * k * h);
    }
  }
  return D;
}

Eigen::MatrixXd fourier_d2(int N) {
  if (N < 2 || N % 2 != 0) throw InvalidArgument("Fourier differentiation needs even N");
  const double h = kTwoPi / N;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        D(i, j) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
        continue;
      }
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double s = std::sin(0.5 * k * h);
      D(i, j) = -0.5 * sign / (s * s);
    }
  }
  return D;
}

double example3_ode_residual(double b, double x, double h, double dh, double d2h) {
  return (b + std::cos(x)) * d2h - 2.0 * std::sin(x) * dh - std::cos(x) * h;
}

DensitySolution solve_density_ode_unchecked(double b, int N) {
  if (!(b > 1.0)) throw InvalidArgument("b must be > 1");
  if (N < 4 || N % 2 != 0) throw InvalidArgument("grid size must be even and >= 4");
  const std::vector<double> x = uniform_grid(N);
  const Eigen::MatrixXd D1 = fourier_d1(N);
  const Eigen::MatrixXd D2 = fourier_d2(N);
  Eigen::MatrixXd L(N, N);
  for (int i = 0; i < N; ++i) {
    L.row(i) = (b + std::cos(x[i])) * D2.row(i) - 2.0 * std::sin(x[i]) * D1.row(i);
    L(i, i) -= std::cos(x[i]);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd v = svd.matrixV().col(N - 1);
  if (v.sum() < 0.0) v = -v;

  DensitySolution out;
  out.smallest_singular_value = sv(N - 1);
  out.second_singular_value = sv(N - 2);
  out.sign_definite = v.minCoeff() > 0.0;
  out.profile.b = b;
  out.profile.grid = x;
  out.profile.values.assign(v.data(), v.data() + N);
  normalize_profile(out.profile);
  return out;
}

DensityProfile example3_density_ode_solve(double b, int N) {
  if (N < 32 || !is_power_of_two(N)) {
    throw InvalidArgument("grid size must be a power of two >= 32, got " + std::to_string(N));
  }
  DensitySolution s = solve_density_ode_unchecked(b, N);
  if (s.smallest_singular_value > 1e-6) {
    throw NoNullVector("smallest singular value " + std::to_string(s.smallest_singular_value) +
                       " exceeds 1e-6");
  }
  if (!s.sign_definite) throw NoNullVector("null vector changes sign");
  return std::move(s.profile);
}

DensityProfile example3_density_closed_form(double b, int N) {
  if (!(b > 1.0)) throw InvalidArgument("b must be > 1");
  DensityProfile p;
  p.b = b;
  p.grid = uniform_grid(N);
  p.values.resize(N);
  for (int j = 0; j < N; ++j) p.values[j] = 1.0 / (4.0 * kPi * kPi * (b + std::cos(p.grid[j])));
  return p;
}

ScalarField example3_density_field(double b) {
  const double c = 1.0 / (4.0 * kPi * kPi);
  ScalarField h;
  h.eval = [b, c](const Vec& x) { return c / (b + std::cos(x(0))); };
  h.partials = [b, c](const Vec& x) -> Vec {
    const double u = b + std::cos(x(0));
    Vec d = Vec::Zero(x.size());
    d(0) = c * std::sin(x(0)) / (u * u);
    return d;
  };
  h.second_partials = [b, c](const Vec& x) -> Mat {
    const double u = b + std::cos(x(0));
    const double s = std::sin(x(0));
    Mat m = Mat::Zero(x.size(), x.size());
    m(0, 0) = c * (std::cos(x(0)) / (u * u) + 2.0 * s * s / (u * u * u));
    return m;
  };
  return h;
}

double harmonic_residual(const FoliatedModel& model, const ScalarField& h, const ChartPoint& x) {
  const VectorField flux = [&model, &h](const Vec& y) -> Vec {
    const ChartPoint pt(y);
    return geometry::grad_E(model, h, pt).components -
           h.eval(y) * geometry::kappa(model, pt).components;
  };
  // kappa is itself a difference quotient; a wider outer step keeps the
  // nested rounding error small.
  return geometry::div(model, flux, x, 10.0 * model.fd_step);
}

OccupationHistogram::OccupationHistogram(std::vector<int> bins_per_coordinate)
    : bins(std::move(bins_per_coordinate)) {
  std::size_t size = bins.empty() ? 0 : 1;
  for (int b : bins) {
    if (b < 1) throw InvalidArgument("bin counts must be positive");
    size *= static_cast<std::size_t>(b);
  }
  counts.assign(size, 0);
}

std::size_t OccupationHistogram::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (std::size_t d = 0; d < bins.size(); ++d) flat = flat * bins[d] + idx[d];
  return flat;
}

double OccupationHistogram::bin_center(int coordinate, int index) const {
  return kTwoPi * (index + 0.5) / bins[coordinate];
}

void OccupationHistogram::add_points(std::span<const double> coords) {
  const std::size_t n = bins.size();
  if (n == 0 || coords.size() % n != 0) throw InvalidArgument("point data does not match bins");
  const std::size_t m = coords.size() / n;
  std::vector<double> column(m);
  std::vector<std::vector<int>> idx(n, std::vector<int>(m));
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < m; ++i) column[i] = coords[i * n + d];
    kernels::bin_indices(column, bins[d], idx[d]);
  }
  std::vector<int> cell(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < n; ++d) cell[d] = idx[d][i];
    ++counts[flat_index(cell)];
  }
  total += static_cast<std::int64_t>(m);
}

OccupationHistogram occupation_estimate(const sde::PathEnsemble& ensemble, std::vector<int> bins,
                                        const OccupationOptions& options) {
  if (ensemble.n_paths < 1) throw InvalidArgument("ensemble is empty");
  if (static_cast<int>(bins.size()) != ensemble.dim) {
    throw InvalidArgument("need one bin count per coordinate");
  }
  OccupationHistogram h(std::move(bins));
  const int first = static_cast<int>(
      std::lower_bound(ensemble.times.begin(), ensemble.times.end(), options.burn_in) -
      ensemble.times.begin());
  const int kept = ensemble.n_records() - first;
  if (kept <= 0) return h;
  const std::size_t stride = static_cast<std::size_t>(ensemble.n_records()) * ensemble.dim;
  for (int path = 0; path < ensemble.n_paths; ++path) {
    const std::size_t begin = path * stride + static_cast<std::size_t>(first) * ensemble.dim;
    h.add_points(std::span<const double>(ensemble.states)
                     .subspan(begin, static_cast<std::size_t>(kept) * ensemble.dim));
  }
  return h;
}

double chi_square_p_value(double statistic, int dof) {
  if (dof < 1) throw InvalidArgument("chi-square needs at least one degree of freedom");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareReport chi_square_uniform(const OccupationHistogram& h) {
  if (h.total <= 0) throw InsufficientSamples("empty histogram");
  const double expected = static_cast<double>(h.total) / static_cast<double>(h.counts.size());
  if (expected < 5.0) throw InsufficientSamples("expected count per bin below 5");
  double stat = 0.0;
  for (std::int64_t c : h.counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  ChiSquareReport r;
  r.statistic = stat;
  r.dof = static_cast<int>(h.counts.size()) - 1;
  r.p_value = chi_square_p_value(stat, r.dof);
  r.n_samples = h.total;
  r.min_expected = expected;
  return r;
}

ChiSquareReport chi_square_homogeneity(const OccupationHistogram& a,
                                       const OccupationHistogram& b) {
  if (a.bins != b.bins) throw InvalidArgument("histograms have different binning");
  if (a.total != b.total || a.total <= 0) {
    throw InvalidArgument("homogeneity test needs equal, positive totals");
  }
  double stat = 0.0;
  double min_expected = static_cast<double>(a.total);
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const double pooled = static_cast<double>(a.counts[i] + b.counts[i]);
    min_expected = std::min(min_expected, 0.5 * pooled);
    if (pooled > 0.0) {
      const double d = static_cast<double>(a.counts[i] - b.counts[i]);
      stat += d * d / pooled;
    }
  }
  if (min_expected < 5.0) {
    throw InsufficientSamples("expected bin count " + std::to_string(min_expected) +
                              " below 5");
  }
  ChiSquareReport r;
  r.statistic = stat;
  r.dof = static_cast<int>(a.counts.size()) - 1;
  r.p_value = chi_square_p_value(stat, r.dof);
  r.n_samples = a.total;
  r.min_expected = min_expected;
  return r;
}

InitialSampler uniform_torus_sampler() {
  return [](NormalStream& rng) {
    return ChartPoint{kTwoPi * rng.uniform(), kTwoPi * rng.uniform()};
  };
}

ChiSquareReport invariance_test(const FoliatedModel& model, const InitialSampler& sampler,
                                double t, const sde::SdeConfig& cfg, std::vector<int> bins,
                                int n_paths) {
  if (!model.fully_periodic()) throw WrongModel("invariance test needs a periodic model");
  if (n_paths < 1) throw InvalidArgument("n_paths must be >= 1");
  if (!(t >= 0.0)) throw InvalidArgument("t must be >= 0");
  std::vector<ChartPoint> starts(static_cast<std::size_t>(n_paths));
  for (int i = 0; i < n_paths; ++i) {
    NormalStream rng(cfg.seed, static_cast<std::uint64_t>(i), StreamDomain::initial_points);
    starts[i] = sampler(rng);
  }
  OccupationHistogram initial(bins);
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n_paths) * model.n);
  for (const ChartPoint& s : starts)
    for (int d = 0; d < model.n; ++d) flat.push_back(s.coords(d));
  initial.add_points(flat);

  const int n_steps = t > 0.0 ? std::max(1, static_cast<int>(std::lround(t / cfg.dt))) : 0;
  if (n_steps == 0) return chi_square_homogeneity(initial, initial);

  sde::SdeConfig run = cfg;
  run.dt = t / n_steps;
  run.n_steps = n_steps;
  run.record_stride = n_steps;
  run.record_noise = false;
  std::vector<sde::FramePoint> frames;
  frames.reserve(starts.size());
  for (const ChartPoint& s : starts) frames.push_back(sde::FramePoint::at(model, s));
  const sde::PathEnsemble e = sde::fobm_frame_bundle(model, frames, run);
  OccupationHistogram final_hist(std::move(bins));
  flat.clear();
  for (int i = 0; i < n_paths; ++i) {
    const Vec x = e.terminal(i);
    for (int d = 0; d < model.n; ++d) flat.push_back(x(d));
  }
  final_hist.add_points(flat);
  return chi_square_homogeneity(initial, final_hist);
}

double harmonicity_quadrature(const FoliatedModel& model, const ScalarField& density,
                              const ScalarField& f, int G) {
  if (!model.fully_periodic()) throw WrongModel("quadrature needs a periodic model");
  if (G < 2) throw InvalidArgument("quadrature grid too small");
  const int n = model.n;
  std::size_t cells = 1;
  for (int d = 0; d < n; ++d) cells *= static_cast<std::size_t>(G);
  std::vector<double> integrand(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t r = c;
    Vec x(n);
    for (int d = n - 1; d >= 0; --d) {
      x(d) = kTwoPi * static_cast<double>(r % G) / G;
      r /= G;
    }
    const ChartPoint pt(x);
    integrand[c] = geometry::laplacian_E(model, f, pt) * density.eval(x) *
                   model.metric_at(x).sqrt_det_g;
  }
  const std::vector<double> ones(cells, 1.0);
  return kernels::dot(integrand, ones) * std::pow(kTwoPi / G, n);
}

}  // namespace folbm::harmonic
