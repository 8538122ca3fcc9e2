#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "monopole/dynamics.hpp"
#include "monopole/error.hpp"
#include "monopole/geometry.hpp"

using namespace monopole;

namespace {

const EllipticModel& model() {
  static const EllipticModel m = build_model(from_roots({3, 2, -1, -4}, -1));
  return m;
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no monopole::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Geometry, StackelMetricValidation) {
  const auto f = [](double q) { return case_i_stackel_f({{3, 2, 1}}, -4, q); };
  const MetricSample m = stackel_metric(f, 2.5, 1.5);
  EXPECT_GT(m.g11, 0.0);
  EXPECT_GT(m.g22, 0.0);
  EXPECT_NEAR(m.lambda, std::sqrt(m.g11 * m.g22), 1e-15);
  EXPECT_EQ(code_of([&] { stackel_metric(f, 1.5, 1.5); }), ErrorCode::DegenerateCoordinates);
  EXPECT_EQ(code_of([&] { stackel_metric(f, 2.5, 2.2); }), ErrorCode::WrongSignature);
}

TEST(Geometry, TorusMetricVanishesOnlyAtFixedPoints) {
  const auto& m = model();
  for (const TorusPoint& p : fixed_points(m)) EXPECT_NEAR(torus_metric(m, p).lambda, 0.0, 1e-12);
  // Away from 1e-2 neighbourhoods of the fixed points lambda stays positive.
  const int n = 256;
  double lmin = 1e300;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u1 = 4 * m.k1() * i / n, u2 = 4 * m.k2() * j / n;
      bool near = false;
      for (const TorusPoint& p : fixed_points(m)) {
        for (int a = -1; a <= 1; ++a) {
          for (int b = -1; b <= 1; ++b) {
            near = near || std::hypot(u1 - p.u1 - 4 * a * m.k1(), u2 - p.u2 - 4 * b * m.k2()) < 1e-2;
          }
        }
      }
      if (!near) lmin = std::min(lmin, torus_metric(m, {u1, u2}).lambda);
    }
  }
  EXPECT_GT(lmin, 0.0);
}

TEST(Geometry, SigmaEquivarianceAndQuotient) {
  const auto& m = model();
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const TorusPoint p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    ASSERT_NEAR(torus_metric(m, p).lambda, torus_metric(m, sigma(p)).lambda, 1e-14);
    const SpherePoint a = to_sphere(m, p), b = to_sphere(m, sigma(p));
    ASSERT_NEAR(a.representative.u1, b.representative.u1, 1e-12);
    ASSERT_NEAR(a.representative.u2, b.representative.u2, 1e-12);
  }
  EXPECT_EQ(to_sphere(m, {1e-3, 1e-3}).chart, 0);
  EXPECT_EQ(to_sphere(m, {2 * m.k1() + 1e-3, 2 * m.k2()}).chart, 3);
  EXPECT_EQ(to_sphere(m, {m.k1(), m.k2()}).chart, -1);
}

TEST(Geometry, CurvatureOracles) {
  const CaseIGeometry g({{3, 2, 1}}, -4);
  EXPECT_DOUBLE_EQ(curvature_closed(g), 1.0);
  const auto lam1 = [&](double a, double b) { return conformal_metric(g, {a, b}).lambda; };
  EXPECT_NEAR(curvature_numeric(lam1, 0.7 * g.k1(), 0.4 * g.k2(), 1e-2), 1.0, 1e-8);

  const auto& m = model();
  const auto lam = [&](double a, double b) { return torus_metric(m, {a, b}).lambda; };
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const double u1 = rng.uniform(0.2, 1.8) * m.k1(), u2 = rng.uniform(0.2, 1.8) * m.k2();
    ASSERT_NEAR(curvature_numeric(lam, u1, u2, 1e-2), curvature_closed(m, {u1, u2}), 1e-6);
  }
  // The printed coefficient differs by the factor 8 and is not the curvature.
  const TorusPoint p{0.6 * m.k1(), 0.5 * m.k2()};
  EXPECT_GT(std::abs(curvature_numeric(lam, p.u1, p.u2, 1e-2) - curvature_closed_printed(m, p)), 1e-2);
  EXPECT_EQ(code_of([&] { curvature_closed(m, {0, 0}); }), ErrorCode::DegeneratePoint);
  EXPECT_EQ(code_of([&] { curvature_numeric(lam, 0.005, 0.1, 1e-2, ChartBox{0.0, 1.0, 0.0, 1.0}); }),
            ErrorCode::StencilOutsideChart);
}

TEST(Geometry, FixedPointChartConverges) {
  const auto& m = model();
  const double limit = fixed_point_limit(m);
  EXPECT_NEAR(limit, 2.0 * 18.0 / 32.0, 1e-12);  // beta2 P'(beta2) / 32 with P'(2) = 18
  EXPECT_NEAR(fixed_point_limit_printed(m), 0.5 * std::sqrt(18.0) / 4.0 * 2.0, 1e-12);
  double prev = 1.0;
  for (double w : {1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(fixed_point_chart(m, 0, {w, 0.0}).lambda - limit) / limit;
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
  // The chart coefficient depends on w only through |w| to leading order.
  EXPECT_NEAR(fixed_point_chart(m, 0, {0.0, 1e-3}).lambda, fixed_point_chart(m, 0, {1e-3, 0.0}).lambda, 1e-3);
  EXPECT_EQ(fixed_point_chart(m, 0, {0.0, 0.0}).lambda, limit);
  EXPECT_EQ(code_of([&] { fixed_point_chart(m, 0, {10.0, 0.0}); }), ErrorCode::ChartOverflow);
  EXPECT_EQ(code_of([&] { fixed_point_chart(m, 4, {0.0, 0.0}); }), ErrorCode::OutOfRange);
}

TEST(Geometry, AreaAndFlux) {
  const CaseIGeometry g({{3, 2, 1}}, -4);
  const AreaFlux a = area_and_flux(g, 0.5, 128);
  EXPECT_NEAR(a.area, 4 * std::numbers::pi, 1e-9);
  EXPECT_NEAR(a.flux_over_2pi, 1.0, 1e-9);
  EXPECT_EQ(a.nearest_integer, 1.0);
  const AreaFlux half = area_and_flux(g, 0.25, 128);
  EXPECT_NEAR(half.gap, 0.5, 1e-9);

  const auto& m = model();
  const double a64 = area_and_flux(m, 1.0, 64).area, a128 = area_and_flux(m, 1.0, 128).area;
  EXPECT_NEAR(a64, a128, 1e-6 * a128);
  const double f1 = area_and_flux(m, 0.2, 64).flux_over_2pi, f2 = area_and_flux(m, 0.5, 64).flux_over_2pi;
  EXPECT_NEAR(area_and_flux(m, 0.7, 64).flux_over_2pi, f1 + f2, 1e-12);
  EXPECT_EQ(code_of([&] { area_and_flux(m, 1.0, 32); }), ErrorCode::InvalidArgument);
}

TEST(Geometry, NeumannCoordinates) {
  const NeumannConstants c{{3, 2, 1}};
  EXPECT_EQ(code_of([&] { cartesian_to_neumann(c, {0, 0, 1}); }), ErrorCode::AxisPoint);
  EXPECT_EQ(code_of([&] { neumann_to_cartesian(c, 1.5, 2.5); }), ErrorCode::InterlacingViolated);
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double q1 = rng.uniform(2, 3), q2 = rng.uniform(1, 2);
    const unsigned bits = static_cast<unsigned>(rng.uniform() * 8);
    const auto x = neumann_to_cartesian(c, q1, q2, bits);
    ASSERT_NEAR(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], 1.0, 1e-12);
    ASSERT_NEAR(neumann_quadratic_form(c, x), q1 + q2, 1e-12);
    const NeumannCoords r = cartesian_to_neumann(c, x);
    ASSERT_NEAR(r.q1, q1, 1e-9);
    ASSERT_NEAR(r.q2, q2, 1e-9);
    ASSERT_EQ(r.sign_bits, bits);
  }
}

TEST(Geometry, NeumannPullbackIsStackel) {
  // |dx|^2 of the round sphere in (q1, q2) against the Staeckel form with
  // f = 4 prod(alpha_i - q).
  const NeumannConstants c{{3, 2, 1}};
  const auto f = [&](double q) { return case_i_stackel_f(c, -4, q); };
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double q1 = rng.uniform(2.1, 2.9), q2 = rng.uniform(1.1, 1.9), h = 1e-6;
    const auto d = [&](double a1, double a2, double b1, double b2) {
      const auto x = neumann_to_cartesian(c, a1, a2), y = neumann_to_cartesian(c, b1, b2);
      return std::array<double, 3>{(x[0] - y[0]) / (2 * h), (x[1] - y[1]) / (2 * h), (x[2] - y[2]) / (2 * h)};
    };
    const auto e1 = d(q1 + h, q2, q1 - h, q2), e2 = d(q1, q2 + h, q1, q2 - h);
    const MetricSample s = stackel_metric(f, q1, q2);
    ASSERT_NEAR(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2], s.g11, 1e-6 * s.g11);
    ASSERT_NEAR(e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2], s.g22, 1e-6 * s.g22);
    ASSERT_NEAR(e1[0] * e2[0] + e1[1] * e2[1] + e1[2] * e2[2], 0.0, 1e-7);
  }
}

TEST(Geometry, HyperbolicChart) {
  const HyperbolicPoint p = hyperbolic_chart(1.0, -1.0);
  EXPECT_DOUBLE_EQ(p.u, 0.0);
  EXPECT_DOUBLE_EQ(p.v, 2.0);
  EXPECT_DOUBLE_EQ(p.h_over_mu, 0.0);
  EXPECT_EQ(code_of([] { hyperbolic_chart(1.0, 1.0); }), ErrorCode::NonPositiveCoordinate);
  const auto f = [](double q) { return 4 * q * q * q; };
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const double q1 = rng.uniform(0.2, 3), q2 = -rng.uniform(0.2, 3), h = 1e-6;
    const HyperbolicPoint c = hyperbolic_chart(q1, q2);
    ASSERT_NEAR(c.h_over_mu, q1 + q2, 1e-10 * (1 + std::abs(q1 + q2)));
    const auto a = hyperbolic_chart(q1 + h, q2), b = hyperbolic_chart(q1 - h, q2);
    const auto a2 = hyperbolic_chart(q1, q2 + h), b2 = hyperbolic_chart(q1, q2 - h);
    const double du1 = (a.u - b.u) / (2 * h), dv1 = (a.v - b.v) / (2 * h);
    const double du2 = (a2.u - b2.u) / (2 * h), dv2 = (a2.v - b2.v) / (2 * h);
    const MetricSample s = stackel_metric(f, q1, q2);
    ASSERT_NEAR((du1 * du1 + dv1 * dv1) * c.metric.g11, s.g11, 1e-6 * s.g11);
    ASSERT_NEAR((du2 * du2 + dv2 * dv2) * c.metric.g22, s.g22, 1e-6 * s.g22);
  }
}

TEST(Geometry, LimitCylinder) {
  const LimitModel lm(1.0, -0.5, -1.5);
  const double q = lm.q2(lm.delta());
  EXPECT_NEAR(limit_cylinder_metric(lm, 0.0, 0.0).lambda, 16 * (1 - q * q) / lm.c(), 1e-12);
  EXPECT_DOUBLE_EQ(limit_decay_ratio(lm, 5.0), limit_decay_ratio(lm, -5.0));
  // The ratio tends to 1 with an O(exp(-2|u|)) correction.
  const double r5 = limit_decay_ratio(lm, 5.0) - 1, r10 = limit_decay_ratio(lm, 10.0) - 1;
  EXPECT_LT(std::abs(r10), 1e-7);
  EXPECT_NEAR(r5 / r10, std::exp(10.0), 0.05 * std::exp(10.0));
}
