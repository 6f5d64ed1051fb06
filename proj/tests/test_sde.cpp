#include "folbm/geometry.hpp"
#include "folbm/models.hpp"
#include "folbm/rng.hpp"
#include "folbm/sde.hpp"
#include "folbm/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace folbm;
using std::numbers::pi;

namespace {

// R^3 with a warped metric and E spanned by the first two coordinates, so the
// frame has to be transported non-trivially.
FoliatedModel warped_model() {
  FoliatedModel m;
  m.id = "warped";
  m.n = 3;
  m.p = 2;
  m.metric_at = [](const Vec& x) {
    Mat g = Mat::Identity(3, 3);
    g(0, 0) = 1.0 + 0.5 * std::sin(x(2));
    g(1, 1) = 2.0 + std::cos(x(0) + x(2));
    g(0, 1) = g(1, 0) = 0.3 * std::sin(x(1));
    return MetricSample::from_metric(g);
  };
  m.e_frame_at = [](const Vec& x) -> Mat {
    Mat f = Mat::Zero(3, 2);
    f(0, 0) = 1.0;
    f(1, 1) = 1.0;
    f(2, 1) = 0.2 * std::sin(x(0));
    return f;
  };
  m.periodic_mask = {false, false, false};
  return m;
}

sde::SdeConfig config(double dt, int steps, std::uint64_t seed = 5) {
  sde::SdeConfig c;
  c.dt = dt;
  c.n_steps = steps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("config validation") {
  sde::SdeConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.reorthonormalize_every = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.n_steps = 10;
  c.record_stride = 3;
  CHECK(c.recorded_steps() == std::vector<int>{0, 3, 6, 9, 10});
  CHECK(c.horizon() == doctest::Approx(0.01));
}

TEST_CASE("horizontal fields") {
  SUBCASE("flat models do not turn the frame") {
    const models::KroneckerModel kron(1.3);
    const models::ProductModel prod(1, 2);
    for (const FoliatedModel* m : {&kron.foliated(), &prod.foliated()}) {
      const sde::FramePoint u = sde::FramePoint::at(*m, ChartPoint(Vec::Constant(m->n, 0.4)));
      for (int i = 0; i < m->p; ++i) {
        const sde::HorizontalVelocity h = sde::horizontal_field(*m, u, i);
        CHECK((h.base_velocity.components - u.frame.col(i)).norm() == 0.0);
        CHECK(h.frame_velocity.norm() < 1e-12);
      }
    }
  }
  SUBCASE("torus frame follows the leaf field") {
    const models::EmbeddedTorusModel torus(2.0, 1.0);
    for (double x0 : {0.3, 2.0, 4.1}) {
      const ChartPoint x{x0, 1.0};
      const sde::FramePoint u = sde::FramePoint::at(torus.foliated(), x);
      const sde::HorizontalVelocity h = sde::horizontal_field(torus.foliated(), u, 0);
      const Vec Y = torus.leaf_field(x.coords);
      const double hstep = 1e-5;
      const Vec dY = (torus.leaf_field(x.coords + hstep * Y) - torus.leaf_field(x.coords - hstep * Y)) /
                     (2 * hstep);
      CHECK((h.base_velocity.components - Y).norm() < 1e-12);
      CHECK((h.frame_velocity.col(0) - dY).norm() < 1e-8);
    }
  }
  SUBCASE("index out of range") {
    const models::KroneckerModel kron(1.0);
    const sde::FramePoint u = sde::FramePoint::at(kron.foliated(), ChartPoint{0.0, 0.0});
    CHECK_THROWS_AS(sde::horizontal_field(kron.foliated(), u, 1), InvalidArgument);
  }
}

TEST_CASE("frames stay orthonormal and tangent to E") {
  const FoliatedModel m = warped_model();
  sde::FramePoint u = sde::FramePoint::at(m, ChartPoint{0.1, 0.2, 0.3});
  NormalStream rng(3, 0);
  for (int k = 0; k < 500; ++k) {
    Vec dB(2);
    dB << 0.03 * rng.normal(), 0.03 * rng.normal();
    u = sde::heun_step(m, u, dB);
    const MetricSample g = m.metric_at(u.base.coords);
    const Mat gram = u.frame.transpose() * g.g * u.frame;
    CHECK((gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    for (int j = 0; j < 2; ++j) {
      const Vec off = geometry::project_perp(m, {u.base, u.frame.col(j)}).components;
      CHECK(off.norm() <= tol::frame);
    }
  }
}

TEST_CASE("kronecker frame bundle matches the closed form") {
  const models::KroneckerModel kron(std::sqrt(2.0), false);
  const FoliatedModel& m = kron.foliated();
  Vec x0(2);
  x0 << 0.3, -0.2;
  const sde::PathEnsemble e =
      sde::fobm_frame_bundle(m, sde::FramePoint::at(m, ChartPoint(x0)), config(1e-2, 200), 5);
  const sde::PathEnsemble f = sde::fobm_flow_1d(m, ChartPoint(x0), config(1e-2, 200), 5);
  for (int i = 0; i < e.n_paths; ++i) {
    const models::Path exact = models::kronecker_fobm(kron, x0, sde::brownian_path(e, i));
    for (int k = 0; k < e.n_records(); ++k) {
      CHECK((e.state(i, k) - exact[k]).norm() < 1e-12);
      CHECK((f.state(i, k) - exact[k]).norm() == 0.0);
    }
  }
}

TEST_CASE("torus frame bundle converges to the closed form") {
  const models::EmbeddedTorusModel torus(2.0, 1.0);
  const FoliatedModel& m = torus.foliated();
  const sde::FramePoint u0 = sde::FramePoint::at(m, ChartPoint{0.0, 0.0});
  std::vector<double> gaps;
  for (double dt : {1e-2, 1e-3}) {
    const sde::PathEnsemble e = sde::fobm_frame_bundle(m, u0, config(dt, static_cast<int>(std::lround(1 / dt))), 16);
    double mean_sup = 0.0;
    for (int i = 0; i < e.n_paths; ++i) {
      const models::Path exact = models::example3_closed_form_fobm(torus, 0.0, 0.0, sde::brownian_path(e, i));
      double sup = 0.0;
      for (int k = 0; k < e.n_records(); ++k) sup = std::max(sup, (e.state(i, k) - exact[k]).norm());
      mean_sup += sup / e.n_paths;
    }
    gaps.push_back(mean_sup);
  }
  const double C = gaps[0] / 1e-2;
  CHECK(gaps[1] <= 2.0 * C * 1e-3);
  CHECK(gaps[0] < 5e-3);
}

TEST_CASE("leaf retraction keeps torus paths on their leaf") {
  const models::EmbeddedTorusModel torus(2.0, 1.0);
  const FoliatedModel& m = torus.foliated();
  const ChartPoint x0{1.0, 2.0};
  sde::SdeConfig c = config(1e-2, 300);
  const sde::PathEnsemble on = sde::fobm_frame_bundle(m, sde::FramePoint::at(m, x0), c, 4);
  c.leaf_retraction = false;
  const sde::PathEnsemble off = sde::fobm_frame_bundle(m, sde::FramePoint::at(m, x0), c, 4);
  const double i0 = torus.leaf_invariant(x0.coords);
  double drift_on = 0.0, drift_off = 0.0, gap = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < on.n_records(); ++k) {
      drift_on = std::max(drift_on, std::fabs(torus.leaf_invariant(on.state(i, k)) - i0));
      drift_off = std::max(drift_off, std::fabs(torus.leaf_invariant(off.state(i, k)) - i0));
      gap = std::max(gap, (on.state(i, k) - off.state(i, k)).norm());
    }
  }
  CHECK(drift_on < 1e-12);
  CHECK(drift_off > drift_on);
  // both are discretizations of the same path
  CHECK(gap < 0.05);
}

TEST_CASE("zero noise gives a constant path") {
  const models::EmbeddedTorusModel torus;
  sde::SdeConfig c = config(1e-2, 50);
  c.noise_scale = 0.0;
  const sde::PathEnsemble e = sde::fobm_frame_bundle(
      torus.foliated(), sde::FramePoint::at(torus.foliated(), ChartPoint{0.5, 0.5}), c, 2);
  for (int k = 0; k < e.n_records(); ++k) CHECK((e.state(1, k) - e.initial(1)).norm() == 0.0);
}

TEST_CASE("flow construction") {
  const models::EmbeddedTorusModel torus(2.0, 1.0);
  const FoliatedModel& m = torus.foliated();
  const sde::PathEnsemble e = sde::fobm_flow_1d(m, ChartPoint{0.2, 0.1}, config(1e-3, 1000), 8);
  for (int i = 0; i < e.n_paths; ++i) {
    const models::Path exact = models::example3_closed_form_fobm(torus, 0.2, 0.1, sde::brownian_path(e, i));
    for (int k = 0; k < e.n_records(); k += 50) CHECK((e.state(i, k) - exact[k]).norm() < 1e-8);
  }
  SUBCASE("numeric flow when no closed form is given") {
    FoliatedModel numeric = m;
    numeric.leaf_flow = nullptr;
    const sde::PathEnsemble n = sde::fobm_flow_1d(numeric, ChartPoint{0.2, 0.1}, config(1e-2, 100), 2);
    for (int i = 0; i < 2; ++i) {
      const models::Path exact = models::example3_closed_form_fobm(torus, 0.2, 0.1, sde::brownian_path(n, i));
      CHECK((n.terminal(i) - exact.back()).norm() < 1e-8);
    }
  }
  SUBCASE("time reversal") {
    Vec x0(2);
    x0 << 0.2, 0.1;
    FoliatedModel numeric = m;
    numeric.leaf_flow = nullptr;
    const Vec there = sde::leaf_flow(numeric, x0, 2.7);
    CHECK((sde::leaf_flow(numeric, there, -2.7) - x0).norm() < 1e-8);
  }
  SUBCASE("requires p = 1") {
    const models::ProductModel prod(1, 2);
    CHECK_THROWS_AS(sde::fobm_flow_1d(prod.foliated(), ChartPoint{0.0, 0.0, 0.0}, config(1e-2, 2), 1),
                    InvalidArgument);
  }
  SUBCASE("a leaf field that is not smooth is rejected") {
    FoliatedModel flip = models::KroneckerModel(1.0, false).foliated();
    flip.leaf_flow = nullptr;
    flip.e_frame_at = [](const Vec& x) -> Mat {
      Mat f(2, 1);
      f << 1.0, 1.0;
      return x(0) + x(1) >= 0.0 ? f : Mat(-f);
    };
    CHECK_THROWS_AS(sde::fobm_flow_1d(flip, ChartPoint{0.0, 0.0}, config(1e-2, 2), 1),
                    NotGeodesicLeafField);
  }
}

TEST_CASE("recorded noise") {
  const models::KroneckerModel kron(1.0);
  const sde::PathEnsemble e = sde::fobm_frame_bundle(
      kron.foliated(), sde::FramePoint::at(kron.foliated(), ChartPoint{0.0, 0.0}), config(1e-2, 100), 200);
  std::vector<double> inc, sq;
  for (int i = 0; i < e.n_paths; ++i) {
    for (double d : e.noise_of(i)) {
      inc.push_back(d);
      sq.push_back(d * d);
    }
  }
  const stats::MeanEstimate m = stats::mean_with_error(inc);
  const stats::MeanEstimate v = stats::mean_with_error(sq);
  CHECK(std::fabs(m.mean) <= 3.0 * m.standard_error);
  CHECK(std::fabs(v.mean - 1e-2) <= 3.0 * v.standard_error);
}

TEST_CASE("thinning keeps the final step") {
  const models::KroneckerModel kron(1.0);
  sde::SdeConfig c = config(1e-2, 10);
  c.record_stride = 4;
  const sde::PathEnsemble e = sde::fobm_frame_bundle(
      kron.foliated(), sde::FramePoint::at(kron.foliated(), ChartPoint{0.0, 0.0}), c, 1);
  CHECK(e.steps == std::vector<int>{0, 4, 8, 10});
  CHECK_FALSE(e.has_every_step());
}

TEST_CASE("step rejection on a singular metric") {
  FoliatedModel m = models::ProductModel(1, 1).foliated();
  m.metric_at = [](const Vec& x) {
    Mat g = Mat::Identity(2, 2);
    g(1, 1) = 1.0 - x(1);  // degenerates at y = 1
    return MetricSample::from_metric(g);
  };
  m.leaf_flow = nullptr;
  sde::SdeConfig c = config(0.5, 200);
  c.noise_scale = 1.0;
  CHECK_THROWS_AS(sde::fobm_frame_bundle(m, sde::FramePoint::at(m, ChartPoint{0.0, 0.9}), c, 8),
                  StepRejected);
}

TEST_CASE("ensembles do not depend on the thread count") {
  const models::EmbeddedTorusModel torus;
  const FoliatedModel& m = torus.foliated();
  sde::SdeConfig c = config(1e-2, 50, 99);
  c.threads = 1;
  const sde::PathEnsemble a = sde::fobm_frame_bundle(m, sde::FramePoint::at(m, ChartPoint{0.1, 0.2}), c, 37);
  c.threads = 4;
  const sde::PathEnsemble b = sde::fobm_frame_bundle(m, sde::FramePoint::at(m, ChartPoint{0.1, 0.2}), c, 37);
  CHECK(a.states == b.states);
  CHECK(a.noise == b.noise);
}

}  // TEST_SUITE
