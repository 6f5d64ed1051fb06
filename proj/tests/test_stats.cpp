#include "folbm/geometry.hpp"
#include "folbm/models.hpp"
#include "folbm/rng.hpp"
#include "folbm/sde.hpp"
#include "folbm/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace folbm;
using doctest::Approx;

namespace {

sde::SdeConfig config(double dt, int steps, std::uint64_t seed) {
  sde::SdeConfig c;
  c.dt = dt;
  c.n_steps = steps;
  c.seed = seed;
  return c;
}

ScalarField sin_sum() {
  return {[](const Vec& p) { return std::sin(p(0) + p(1)); },
          [](const Vec& p) -> Vec { return Vec::Constant(2, std::cos(p(0) + p(1))); },
          [](const Vec& p) -> Mat { return Mat::Constant(2, 2, -std::sin(p(0) + p(1))); }};
}

ScalarField cos_x() {
  return {[](const Vec& p) { return std::cos(p(0)); },
          [](const Vec& p) -> Vec {
            Vec d = Vec::Zero(2);
            d(0) = -std::sin(p(0));
            return d;
          },
          [](const Vec& p) -> Mat {
            Mat m = Mat::Zero(2, 2);
            m(0, 0) = -std::cos(p(0));
            return m;
          }};
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("mean with error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const stats::MeanEstimate m = stats::mean_with_error(v);
  CHECK(m.mean == Approx(2.5));
  CHECK(m.standard_error == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(stats::mean_with_error(std::vector<double>{}).n == 0);
}

TEST_CASE("martingale test") {
  const models::KroneckerModel kron(std::sqrt(2.0));
  const sde::PathEnsemble e =
      sde::fobm_frame_bundle(kron.foliated(), sde::FramePoint::at(kron.foliated(), ChartPoint{0.0, 0.0}),
                             config(1e-2, 100, 5), 4000);
  CHECK(stats::martingale_test(e, true).passed);

  const models::ProductModel prod(1, 2);
  const sde::PathEnsemble ep = sde::fobm_frame_bundle(
      prod.foliated(), sde::FramePoint::at(prod.foliated(), ChartPoint{0.0, 0.0, 0.0}),
      config(1e-2, 100, 6), 4000);
  const stats::TestReport rp = stats::martingale_test(ep, true);
  CHECK(rp.passed);
  CHECK(rp.detail("mean_x1") == 0.0);  // transverse coordinate never moves

  // manufactured drift x_t = t + B_t
  sde::PathEnsemble drift = e;
  for (int i = 0; i < drift.n_paths; ++i) {
    const int last = drift.n_records() - 1;
    drift.states[(static_cast<std::size_t>(i) * drift.n_records() + last) * drift.dim] += 1.0;
  }
  CHECK_FALSE(stats::martingale_test(drift, true).passed);
  CHECK_THROWS_AS(stats::martingale_test(e, false), WrongModel);
}

TEST_CASE("quadratic variation") {
  const models::KroneckerModel kron(std::sqrt(2.0));
  const sde::FramePoint u0 = sde::FramePoint::at(kron.foliated(), ChartPoint{0.0, 0.0});
  const sde::PathEnsemble e = sde::fobm_frame_bundle(kron.foliated(), u0, config(1e-3, 1000, 7), 200);

  const stats::TestReport c = stats::qv_identity_test(e, constant_field(3.0, 2), kron.foliated());
  CHECK(c.statistic == 0.0);
  CHECK(c.passed);

  // f = x: |grad_E f|^2 = a^2 / (a^2 + 1) exactly
  const ScalarField fx{[](const Vec& p) { return p(0); },
                       [](const Vec&) -> Vec { return Vec::Unit(2, 0); },
                       [](const Vec&) -> Mat { return Mat::Zero(2, 2); }};
  const stats::TestReport r = stats::qv_identity_test(e, fx, kron.foliated());
  CHECK(r.detail("mean_integral") == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.passed);

  sde::SdeConfig thin = config(1e-3, 100, 7);
  thin.record_stride = 10;
  const sde::PathEnsemble et = sde::fobm_frame_bundle(kron.foliated(), u0, thin, 10);
  CHECK_THROWS_AS(stats::qv_identity_test(et, fx, kron.foliated()), ThinnedEnsemble);

  const models::EmbeddedTorusModel torus;
  const sde::FramePoint t0 = sde::FramePoint::at(torus.foliated(), ChartPoint{0.3, 0.0});
  const sde::PathEnsemble full = sde::fobm_frame_bundle(torus.foliated(), t0, config(1e-3, 1000, 8), 300);
  const sde::PathEnsemble half = sde::fobm_frame_bundle(torus.foliated(), t0, config(5e-4, 2000, 8), 300);
  CHECK(stats::qv_identity_test(full, sin_sum(), torus.foliated(), &half).passed);

  sde::SdeConfig loud = config(1e-3, 1000, 8);
  loud.noise_scale = 1.1;
  const sde::PathEnsemble bad = sde::fobm_frame_bundle(torus.foliated(), t0, loud, 300);
  CHECK_FALSE(stats::qv_identity_test(bad, sin_sum(), torus.foliated()).passed);
}

TEST_CASE("generator") {
  const models::KroneckerModel kron(std::sqrt(2.0));
  const stats::TestReport c =
      stats::generator_test(kron.foliated(), ChartPoint{0.0, 0.0}, constant_field(1.0, 2), 1e-3, 100);
  CHECK(c.statistic == 0.0);
  CHECK(c.detail("estimate") == 0.0);

  for (double x : {0.0, M_PI / 2}) {
    CAPTURE(x);
    const stats::TestReport r =
        stats::generator_test(kron.foliated(), ChartPoint{x, 0.0}, sin_sum(), 1e-3, 100000);
    // (u . d)^2 sin(x + y) with u = (a, 1) / sqrt(a^2 + 1)
    const double a = std::sqrt(2.0);
    CHECK(r.detail("target") == Approx(-std::sin(x) * (a + 1) * (a + 1) / (a * a + 1)).epsilon(1e-9));
    CHECK(r.passed);
  }

  const models::EmbeddedTorusModel torus;
  const stats::TestReport t =
      stats::generator_test(torus.foliated(), ChartPoint{M_PI / 2, 0.0}, cos_x(), 1e-3, 100000);
  CHECK(std::fabs(t.detail("target")) < 1e-9);
  CHECK(t.passed);

  CHECK_THROWS_AS(stats::generator_test(kron.foliated(), ChartPoint{0.0, 0.0}, sin_sum(), 0.1, 10),
                  InvalidArgument);
  CHECK_THROWS_AS(stats::generator_report(0.0, {}, {}, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("report formatting") {
  stats::TestReport r;
  r.name = "demo";
  r.statistic = 0.5;
  r.threshold = 1.0;
  r.n_samples = 10;
  r.passed = true;
  r.details = {{"k", 2.0}};
  CHECK(r.to_text() == "demo 0.5 1 PASS n=10 k=2");
  CHECK(stats::TestReport::csv_header() == "name,statistic,threshold,n_samples,passed");
  CHECK(r.csv_row() == "demo,0.5,1,10,1");
  CHECK(r.detail("k") == 2.0);
  CHECK_THROWS_AS((void)r.detail("missing"), InvalidArgument);
}

TEST_CASE("kolmogorov-smirnov") {
  CHECK(stats::kolmogorov_q(0.0) == 1.0);
  // classical 5% critical value
  CHECK(stats::kolmogorov_q(1.3581) == Approx(0.05).epsilon(1e-3));

  NormalStream r1(1, 0), r2(2, 0);
  std::vector<double> a(5000), b(5000), c(5000);
  for (int i = 0; i < 5000; ++i) {
    a[i] = r1.normal();
    b[i] = r2.normal();
    c[i] = r2.normal() + 0.2;
  }
  CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
  CHECK(stats::ks_two_sample(a, c).p_value < 1e-6);
  CHECK(stats::ks_two_sample({1.0, 2.0}, {1.0, 2.0}).statistic == 0.0);
  CHECK_THROWS_AS(stats::ks_two_sample({}, {1.0}), InsufficientSamples);
}

}  // TEST_SUITE
