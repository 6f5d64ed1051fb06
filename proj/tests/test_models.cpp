#include "folbm/geometry.hpp"
#include "folbm/models.hpp"
#include "folbm/rng.hpp"
#include "folbm/sde.hpp"
#include "folbm/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace folbm;
using doctest::Approx;
using std::numbers::pi;

TEST_SUITE("models") {

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(models::EmbeddedTorusModel(0.5, 1.0), InvalidArgument);
  CHECK_THROWS_AS(models::EmbeddedTorusModel(1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(models::EmbeddedTorusModel(2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(models::KroneckerModel(-1.0), InvalidArgument);
  CHECK_THROWS_AS(models::ProductModel(0, 1), InvalidArgument);
  CHECK_THROWS_AS(models::ProductModel(4, 3), InvalidArgument);
}

TEST_CASE("torus leaf field") {
  const models::EmbeddedTorusModel torus(2.0, 1.0);
  const FoliatedModel& m = torus.foliated();
  for (double x0 : {0.0, 1.0, pi, 5.0}) {
    const ChartPoint p{x0, 0.5};
    const Vec Y = torus.leaf_field(p.coords);
    CHECK(geometry::metric(m, p).norm(Y) == Approx(1.0).epsilon(1e-12));
    // leafwise acceleration vanishes
    const VectorField field = [&torus](const Vec& q) { return torus.leaf_field(q); };
    const Vec acc = geometry::covariant_derivative(m, field, p, Y);
    CHECK(geometry::project_E(m, {p, acc}).components.norm() < tol::routes_analytic);
  }
}

TEST_CASE("torus flow") {
  const models::EmbeddedTorusModel torus(2.0, 1.0);
  SUBCASE("t = 0") {
    const Vec p = models::example3_flow(torus, 0.4, 1.5, 0.0);
    CHECK(p(0) == 0.4);
    CHECK(p(1) == Approx(1.5).epsilon(1e-15));
  }
  SUBCASE("quarter turn") {
    const Vec p = models::example3_flow(torus, 0.0, 0.0, std::sqrt(2.0) * pi / 2);
    CHECK(p(0) == Approx(pi / 2).epsilon(1e-14));
    CHECK(p(1) == Approx(pi / (3.0 * std::sqrt(3.0))).epsilon(1e-14));
  }
  SUBCASE("tangent at t = 0 is the leaf field") {
    const double h = 1e-5;
    for (double x0 : {0.0, 2.0, pi, 4.5}) {
      const Vec fwd = models::example3_flow(torus, x0, 0.3, h);
      const Vec bwd = models::example3_flow(torus, x0, 0.3, -h);
      const Vec Y = torus.leaf_field(models::example3_flow(torus, x0, 0.3, 0.0));
      CHECK(((fwd - bwd) / (2 * h) - Y).norm() < 1e-8);
    }
  }
  SUBCASE("matches numerical integration of Y across several turns") {
    FoliatedModel numeric = torus.foliated();
    numeric.leaf_flow = nullptr;
    Vec x0(2);
    x0 << 0.5, 0.2;
    for (double t : {-20.0, 3.0, 25.0}) {
      const Vec a = models::example3_flow(torus, 0.5, 0.2, t);
      const Vec b = sde::leaf_flow(numeric, x0, t);
      CHECK((a - b).norm() < 1e-8);
    }
  }
  SUBCASE("group property") {
    const Vec p = models::example3_flow(torus, 1.0, 2.0, 7.3);
    const Vec q = models::example3_flow(torus, p(0), p(1), -7.3);
    CHECK(q(0) == Approx(1.0).epsilon(1e-12));
    CHECK(q(1) == Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("leaf invariant is constant and continuous across x = pi") {
    const double i0 = torus.leaf_invariant(models::example3_flow(torus, 0.1, 0.0, 0.0));
    double prev_y = 0.0;
    for (int k = 1; k <= 2000; ++k) {
      const Vec p = models::example3_flow(torus, 0.1, 0.0, 0.01 * k);
      CHECK(std::fabs(torus.leaf_invariant(p) - i0) < 1e-12);
      CHECK(std::fabs(p(1) - prev_y) < 0.02);
      prev_y = p(1);
    }
  }
}

TEST_CASE("closed-form torus paths") {
  const models::EmbeddedTorusModel torus(2.0, 1.0);
  const std::vector<double> zero(5, 0.0);
  for (const Vec& p : models::example3_closed_form_fobm(torus, 0.7, 0.1, zero)) {
    CHECK(p(0) == 0.7);
    CHECK(p(1) == Approx(0.1));
  }
  const std::vector<double> one{0.0, 1.0};
  const models::Path path = models::example3_closed_form_fobm(torus, 0.0, 0.0, one);
  CHECK(path[1](0) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  // Var X_t = alpha^2 t / (1 + alpha^2)
  NormalStream rng(17, 0);
  std::vector<double> xs, sq;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> B{0.0, rng.normal()};
    const double x = models::example3_closed_form_fobm(torus, 0.0, 0.0, B)[1](0);
    xs.push_back(x);
  }
  const stats::MeanEstimate m = stats::mean_with_error(xs);
  for (double x : xs) sq.push_back((x - m.mean) * (x - m.mean));
  const stats::MeanEstimate v = stats::mean_with_error(sq);
  CHECK(std::fabs(v.mean - 0.5) <= 3.0 * v.standard_error);
}

TEST_CASE("kronecker paths") {
  const models::KroneckerModel kron(1.0);
  Vec x0 = Vec::Zero(2);
  const std::vector<double> zero(3, 0.0);
  for (const Vec& p : models::kronecker_fobm(kron, x0, zero)) CHECK(p.norm() == 0.0);
  x0 << 0.5, 0.5;
  const std::vector<double> W{0.0, std::sqrt(2.0)};
  const models::Path path = models::kronecker_fobm(kron, x0, W);
  CHECK(path[1](0) == Approx(1.5));
  CHECK(path[1](1) == Approx(1.5));

  // increment covariance t (a,1)(a,1)^T / (a^2+1) at t = 1
  const double a = std::sqrt(2.0);
  const models::KroneckerModel k2(a, false);
  NormalStream rng(19, 0);
  std::vector<double> xx, xy, yy;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> B{0.0, rng.normal()};
    const Vec d = models::kronecker_fobm(k2, Vec::Zero(2), B)[1];
    xx.push_back(d(0) * d(0));
    xy.push_back(d(0) * d(1));
    yy.push_back(d(1) * d(1));
  }
  const double s = a * a + 1.0;
  const stats::MeanEstimate mxx = stats::mean_with_error(xx);
  const stats::MeanEstimate mxy = stats::mean_with_error(xy);
  const stats::MeanEstimate myy = stats::mean_with_error(yy);
  CHECK(std::fabs(mxx.mean - a * a / s) <= 3.0 * mxx.standard_error);
  CHECK(std::fabs(mxy.mean - a / s) <= 3.0 * mxy.standard_error);
  CHECK(std::fabs(myy.mean - 1.0 / s) <= 3.0 * myy.standard_error);
}

TEST_CASE("wrapping") {
  const models::EmbeddedTorusModel torus;
  Vec p(2);
  p << -0.5, 7.0;
  const Vec w = wrap_periodic(torus.foliated(), p);
  CHECK(w(0) == Approx(kTwoPi - 0.5));
  CHECK(w(1) == Approx(7.0 - kTwoPi));
  const models::ProductModel prod(1, 1);
  CHECK(wrap_periodic(prod.foliated(), p)(1) == 7.0);
  CHECK(wrap_angle(kTwoPi) == 0.0);
}

}  // TEST_SUITE
