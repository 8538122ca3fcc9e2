#include "monopole/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "monopole/error.hpp"

namespace monopole {

namespace {

constexpr double kMultipleRootThreshold = 1e-10;

double root_magnitude_bound(const QuarticParams& p) noexcept {
  const double r2 = std::sqrt(std::abs(p.a2 / p.a3));
  const double r1 = std::cbrt(std::abs(p.a0 / p.a3));
  const double r0 = std::pow(std::abs(p.a1 / p.a3), 0.25);
  return std::max({r2, r1, r0});
}

double newton_polish(const QuarticParams& p, double x) noexcept {
  for (int it = 0; it < 8; ++it) {
    const double d = eval_dp(p, x);
    if (d == 0.0) break;
    const double step = eval_p(p, x) / d;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

bool RootQuadruple::satisfies_root_inequalities() const noexcept {
  return beta[0] + beta[3] < 0.0 && beta[1] + beta[2] > 0.0;
}

double eval_p(const QuarticParams& p, double x) noexcept {
  const double x2 = x * x;
  return (p.a3 * x2 + p.a2) * x2 + p.a0 * x + p.a1;
}

double eval_dp(const QuarticParams& p, double x) noexcept {
  return (4.0 * p.a3 * x * x + 2.0 * p.a2) * x + p.a0;
}

double coefficient_scale(const QuarticParams& p) noexcept {
  return std::max({1.0, std::abs(p.a3), std::abs(p.a2), std::abs(p.a0), std::abs(p.a1)});
}

double discriminant(const QuarticParams& p) noexcept {
  const double a3 = p.a3, a2 = p.a2, a0 = p.a0, a1 = p.a1;
  const double a3sq = a3 * a3;
  return 256.0 * a1 * a1 * a1 * a3sq * a3 - 128.0 * a1 * a1 * a2 * a2 * a3sq +
         144.0 * a0 * a0 * a1 * a2 * a3sq - 27.0 * a0 * a0 * a0 * a0 * a3sq +
         16.0 * a1 * a2 * a2 * a2 * a2 * a3 - 4.0 * a0 * a0 * a2 * a2 * a2 * a3;
}

double relative_discriminant(const QuarticParams& p) noexcept {
  const double r = root_magnitude_bound(p);
  if (r == 0.0) return 0.0;
  const double a3_6 = std::pow(p.a3, 6);
  return discriminant(p) / (a3_6 * std::pow(r, 12));
}

RootQuadruple real_roots(const QuarticParams& p) {
  if (p.a3 == 0.0) throw Error(ErrorCode::InvalidArgument, "leading coefficient a3 is zero");
  const double rel = relative_discriminant(p);
  if (std::abs(rel) < kMultipleRootThreshold) {
    std::ostringstream os;
    os << "relative discriminant " << rel << " below " << kMultipleRootThreshold;
    throw Error(ErrorCode::MultipleRootDetected, os.str());
  }
  if (rel < 0.0) {
    throw Error(ErrorCode::FewerThanFourRealRoots, "negative discriminant: exactly two real roots");
  }

  // Companion matrix of the monic x^4 + 0 x^3 + c2 x^2 + c1 x + c0.
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;
  companion(0, 3) = -p.a1 / p.a3;
  companion(1, 3) = -p.a0 / p.a3;
  companion(2, 3) = -p.a2 / p.a3;
  companion(3, 3) = 0.0;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
  const auto eig = solver.eigenvalues();

  const double bound = std::max(1.0, root_magnitude_bound(p));
  RootQuadruple out;
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> z = eig(i);
    if (std::abs(z.imag()) > 1e-7 * bound) {
      throw Error(ErrorCode::FewerThanFourRealRoots, "complex-conjugate pair among the roots");
    }
    out.beta[static_cast<std::size_t>(i)] = newton_polish(p, z.real());
  }
  std::sort(out.beta.begin(), out.beta.end(), std::greater<>());
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    if (!(out.beta[i] > out.beta[i + 1])) {
      throw Error(ErrorCode::MultipleRootDetected, "roots coincide after polishing");
    }
  }
  return out;
}

AdmissibilityReport admissibility(const QuarticParams& p) {
  AdmissibilityReport r;
  const double a3 = p.a3, a2 = p.a2, a0 = p.a0, a1 = p.a1;
  const double ratio = a2 / (4.0 * a3);
  r.coefficient_conditions = a2 > 0.0 && a3 < 0.0 && a1 < ratio && ratio < 0.0;

  const double lhs = 256.0 * a1 * a1 * a1 * a3 * a3 - 128.0 * a1 * a1 * a2 * a2 * a3 +
                     144.0 * a0 * a0 * a1 * a2 * a3 - 27.0 * a0 * a0 * a0 * a0 * a3 +
                     16.0 * a1 * a2 * a2 * a2 * a2 - 4.0 * a0 * a0 * a2 * a2 * a2;
  r.discriminant_condition = lhs < 0.0;

  try {
    const RootQuadruple roots = real_roots(p);
    r.four_distinct_real_roots = true;
    r.root_inequalities = roots.satisfies_root_inequalities();
  } catch (const Error&) {
    r.four_distinct_real_roots = false;
    r.root_inequalities = false;
  }
  r.admissible = a3 < 0.0 && discriminant(p) > 0.0 && r.four_distinct_real_roots && r.root_inequalities;
  return r;
}

QuarticParams from_roots(const std::array<double, 4>& beta, double a3) {
  if (!(a3 < 0.0)) throw Error(ErrorCode::InvalidArgument, "a3 must be negative");
  const double mag = std::max({std::abs(beta[0]), std::abs(beta[1]), std::abs(beta[2]), std::abs(beta[3])});
  const double e1 = beta[0] + beta[1] + beta[2] + beta[3];
  if (std::abs(e1) > 1e-10 * std::max(mag, 1e-300)) {
    std::ostringstream os;
    os << "roots sum to " << e1 << " (the quartic has no cubic term)";
    throw Error(ErrorCode::NonZeroRootSum, os.str());
  }
  double e2 = 0.0, e3 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      e2 += beta[i] * beta[j];
      for (std::size_t k = j + 1; k < 4; ++k) e3 += beta[i] * beta[j] * beta[k];
    }
  }
  const double e4 = beta[0] * beta[1] * beta[2] * beta[3];
  return QuarticParams{a3, a3 * e2, -a3 * e3, a3 * e4};
}

}  // namespace monopole
