#include <cmath>

#include <gtest/gtest.h>

#include "monopole/dynamics.hpp"
#include "monopole/elliptic.hpp"
#include "monopole/error.hpp"

using namespace monopole;

namespace {

const EllipticModel& reference() {
  static const EllipticModel m = build_model(from_roots({3, 2, -1, -4}, -1));
  return m;
}

const EllipticModel& even() {
  static const EllipticModel m = build_model(from_roots({2, 1, -1, -2}, -1));
  return m;
}

}  // namespace

TEST(Elliptic, ReferencePeriods) {
  EXPECT_NEAR(reference().k1(), 1.32571830309, 1e-10);
  EXPECT_NEAR(reference().k2(), 2.01968281846, 1e-10);
  EXPECT_NEAR(even().k1(), 2.15651564749964, 1e-12);
  EXPECT_NEAR(even().k2(), 3.37150070962519, 1e-12);
}

TEST(Elliptic, TurningPoints) {
  const auto& m = reference();
  EXPECT_NEAR(m.dq1(0.0), 0.0, 1e-300);
  EXPECT_NEAR(m.dq2(m.k2()), 0.0, 1e-12);
  EXPECT_NEAR(m.q1(0.0), m.beta(2), 1e-14);
  EXPECT_NEAR(m.q1(m.k1()), m.beta(1), 1e-12);
  EXPECT_NEAR(m.q2(m.k2()), m.beta(3), 1e-12);
}

TEST(Elliptic, DerivativeBranchOnFirstQuarter) {
  const auto& m = reference();
  const double u = 0.5 * m.k1();
  EXPECT_NEAR(m.dq1(u), std::sqrt(eval_p(m.params(), m.q1(u))) / 2.0, 1e-12);
  const double h = 1e-5;
  EXPECT_NEAR(m.dq1(u), (m.q1(u + h) - m.q1(u - h)) / (2 * h), 1e-8);
}

TEST(Elliptic, Inversion) {
  const auto& m = reference();
  EXPECT_NEAR(m.invert_u(m.beta(2), Slice::Real), 0.0, 1e-12);
  EXPECT_NEAR(m.invert_u(m.beta(1), Slice::Real), m.k1(), 1e-10);
  EXPECT_NEAR(m.invert_u(m.q1(0.3 * m.k1()), Slice::Real), 0.3 * m.k1(), 1e-9);
  EXPECT_NEAR(m.invert_u(m.q2(0.7 * m.k2()), Slice::Imaginary), 0.7 * m.k2(), 1e-9);
  EXPECT_THROW(m.invert_u(m.beta(1) + 0.1, Slice::Real), Error);
}

TEST(Elliptic, JacobiFormMatchesSeries) {
  const auto& m = even();
  EXPECT_NEAR(m.jacobi_special(0.0), 1.0, 1e-12);
  EXPECT_NEAR(m.jacobi_special(m.k1()), 2.0, 1e-12);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double z = 2.0 * m.k1() * i / 99.0;
    worst = std::max(worst, std::abs(m.jacobi_special(z) - m.q1(z)));
  }
  EXPECT_LT(worst, 1e-9);
  try {
    reference().jacobi_special(0.1);
    FAIL() << "odd quartic accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotEvenQuartic);
  }
}

TEST(EllipticProperty, OdeRangeParityAndPeriod) {
  const auto& m = reference();
  const double scale = m.scale();
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u1 = rng.uniform(-20.0, 20.0), u2 = rng.uniform(-20.0, 20.0);
    const double q1 = m.q1(u1), q2 = m.q2(u2);
    ASSERT_LT(std::abs(4 * m.dq1(u1) * m.dq1(u1) - eval_p(m.params(), q1)), 1e-9 * scale);
    ASSERT_LT(std::abs(4 * m.dq2(u2) * m.dq2(u2) + eval_p(m.params(), q2)), 1e-9 * scale);
    ASSERT_GE(q1, m.beta(2));
    ASSERT_LE(q1, m.beta(1));
    ASSERT_GE(q2, m.beta(3));
    ASSERT_LE(q2, m.beta(2));
    ASSERT_NEAR(m.q1(-u1), q1, 1e-14);
    ASSERT_NEAR(m.q2(-u2), q2, 1e-14);
    ASSERT_NEAR(m.q1(u1 + 2 * m.k1()), q1, 1e-9);
    ASSERT_NEAR(m.q2(u2 + 2 * m.k2()), q2, 1e-9);
  }
}

TEST(EllipticProperty, AntiderivativesMatchQuadrature) {
  const EllipticSlice& s = reference().slice(Slice::Real);
  // Composite Simpson on [0, u] as an independent oracle.
  const double u = 1.7;
  const int n = 2000;
  double a = 0.0, b = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double q = s.value(u * i / n);
    a += w * q;
    b += w * q * q;
  }
  EXPECT_NEAR(s.integral_of_value(u), a * u / (3 * n), 1e-10);
  EXPECT_NEAR(s.integral_of_square(u), b * u / (3 * n), 1e-10);
}

TEST(LimitModel, ClosedForm) {
  const LimitModel lm(1.0, -0.5, -1.5);
  EXPECT_NEAR(lm.q2(lm.delta()), lm.beta3(), 1e-12);
  EXPECT_NEAR(lm.q2(50.0), 1.0, 1e-8);
  EXPECT_NEAR(lm.q2(-50.0), 1.0, 1e-8);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double u = rng.uniform(-10, 10);
    ASSERT_NEAR(lm.q2(2 * lm.delta() - u), lm.q2(u), 1e-12);
    ASSERT_NEAR(lm.q2_exponential(u), lm.q2(u), 1e-11);
    ASSERT_NEAR(lm.gap(u), 1.0 - lm.q2(u), 1e-14);
    // The limit still satisfies 4 Q'^2 = -P(Q).
    ASSERT_NEAR(4 * lm.dq2(u) * lm.dq2(u), -lm.p(lm.q2(u)), 1e-10);
  }
  EXPECT_THROW(LimitModel(1.0, -0.5, -1.0), Error);
}

TEST(LimitModel, DegenerationOfCaseTwo) {
  // beta2 = beta1 - eps: K2 grows like log(1/eps) and, around its minimum at
  // K2, Q2 approaches the closed form centred at delta with an O(eps) error.
  const LimitModel lm(1.0, -0.5, -1.5);
  const auto worst = [&](double eps) {
    const EllipticModel m = build_model(from_roots({1.0, 1.0 - eps, -0.5 + eps / 2, -1.5 + eps / 2}, -1));
    double w = 0.0;
    for (double s = -3.0; s <= 3.0; s += 0.05) w = std::max(w, std::abs(m.q2(m.k2() + s) - lm.q2(lm.delta() + s)));
    return w;
  };
  const double w3 = worst(1e-3), w4 = worst(1e-4);
  EXPECT_LT(w4, 1e-4);
  EXPECT_NEAR(w3 / w4, 10.0, 0.5);
}
