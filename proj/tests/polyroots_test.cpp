#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "monopole/dynamics.hpp"
#include "monopole/error.hpp"
#include "monopole/polyroots.hpp"

using namespace monopole;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no monopole::Error thrown";
  return ErrorCode::InvalidArgument;
}

// Random descending quadruple with zero sum and gaps of at least 0.1.
std::array<double, 4> random_roots(Rng& rng) {
  for (;;) {
    std::array<double, 3> t{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    std::array<double, 4> b{t[0], t[1], t[2], -(t[0] + t[1] + t[2])};
    std::sort(b.begin(), b.end(), std::greater<>());
    if (b[0] - b[1] > 0.1 && b[1] - b[2] > 0.1 && b[2] - b[3] > 0.1) return b;
  }
}

}  // namespace

TEST(Polyroots, ExpandsRootsIntoCoefficients) {
  const QuarticParams p = from_roots({3, 2, -1, -4}, -1);
  EXPECT_DOUBLE_EQ(p.a3, -1);
  EXPECT_DOUBLE_EQ(p.a2, 15);
  EXPECT_DOUBLE_EQ(p.a0, -10);
  EXPECT_DOUBLE_EQ(p.a1, -24);
  const QuarticParams e = from_roots({2, 1, -1, -2}, -1);
  EXPECT_DOUBLE_EQ(e.a2, 5);
  EXPECT_EQ(e.a0, 0.0);
  EXPECT_DOUBLE_EQ(e.a1, -4);
}

TEST(Polyroots, RejectsNonZeroRootSum) {
  EXPECT_EQ(code_of([] { from_roots({3, 2, -1, -3}, -1); }), ErrorCode::NonZeroRootSum);
}

TEST(Polyroots, FindsRootsOfReferenceQuartics) {
  const RootQuadruple r = real_roots({-1, 15, -10, -24});
  const std::array<double, 4> want{3, 2, -1, -4};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.beta[i], want[i], 1e-12);
  const RootQuadruple e = real_roots({-1, 5, 0, -4});
  const std::array<double, 4> even{2, 1, -1, -2};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.beta[i], even[i], 1e-12);
}

TEST(Polyroots, RootResidualsAreSmall) {
  const QuarticParams p{-1, 15, -10, -24};
  for (double b : real_roots(p).beta) EXPECT_LT(std::abs(eval_p(p, b)), 1e-10 * coefficient_scale(p));
}

TEST(Polyroots, ClassifiesDegenerateInputs) {
  // x^4 + 1 style: no real roots at all.
  EXPECT_EQ(code_of([] { real_roots({-1, 0, 0, -1}); }), ErrorCode::FewerThanFourRealRoots);
  EXPECT_EQ(code_of([] { real_roots(from_roots({1, 1, -1, -1}, -1)); }), ErrorCode::MultipleRootDetected);
}

TEST(Polyroots, Admissibility) {
  const AdmissibilityReport ok = admissibility(from_roots({3, 2, -1, -4}, -1));
  EXPECT_TRUE(ok.admissible);
  EXPECT_TRUE(ok.root_inequalities);
  const AdmissibilityReport bad = admissibility(from_roots({4, 1, -2, -3}, -1));
  EXPECT_FALSE(bad.root_inequalities);
  EXPECT_FALSE(bad.admissible);
  EXPECT_FALSE(admissibility({-1, -2, 0.1, -1}).coefficient_conditions);
}

TEST(PolyrootsProperty, RoundTripSumAndDiscriminant) {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const auto b = random_roots(rng);
    const QuarticParams p = from_roots(b, -rng.uniform(0.5, 2.0));
    const RootQuadruple r = real_roots(p);
    for (int k = 0; k < 4; ++k) ASSERT_NEAR(r.beta[k], b[k], 1e-9) << "sample " << i;
    ASSERT_NEAR(r.sum(), 0.0, 1e-9);
    ASSERT_GT(discriminant(p), 0.0);
    const bool expected = b[0] + b[3] < 0 && b[1] + b[2] > 0;
    ASSERT_EQ(admissibility(p).root_inequalities, expected) << "sample " << i;
  }
}

TEST(PolyrootsProperty, RelativeDiscriminantIsScaleInvariant) {
  const std::array<double, 4> b{3, 2, -1, -4};
  const double d1 = relative_discriminant(from_roots(b, -1));
  const double d2 = relative_discriminant(from_roots({30, 20, -10, -40}, -1));
  EXPECT_NEAR(d1, d2, 1e-9 * std::abs(d1));
}
