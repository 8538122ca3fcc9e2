#pragma once

#include <array>

namespace monopole {

/// Quartic without cubic term, P(x) = a3 x^4 + a2 x^2 + a0 x + a1.
///
/// Note the coefficient naming: `a0` is the LINEAR coefficient and `a1` the
/// constant term. This matches the JSON config keys "a3", "a2", "a0", "a1".
struct QuarticParams {
  double a3 = -1.0;
  double a2 = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
};

/// Real roots of a quartic, strictly descending.
struct RootQuadruple {
  std::array<double, 4> beta{};

  double sum() const noexcept { return beta[0] + beta[1] + beta[2] + beta[3]; }
  /// beta1 + beta4 < 0 and beta2 + beta3 > 0.
  bool satisfies_root_inequalities() const noexcept;
};

struct AdmissibilityReport {
  // a2 > 0, a3 < 0, a1 < a2/(4 a3) < 0, evaluated exactly as printed.
  bool coefficient_conditions = false;
  // 256 a1^3 a3^2 - ... < 0 (equivalent to discriminant > 0 when a3 < 0).
  bool discriminant_condition = false;
  // beta1 + beta4 < 0 and beta2 + beta3 > 0 on the extracted roots.
  bool root_inequalities = false;
  bool four_distinct_real_roots = false;
  bool admissible = false;
};

double eval_p(const QuarticParams& p, double x) noexcept;
double eval_dp(const QuarticParams& p, double x) noexcept;

/// max(1, |a3|, |a2|, |a0|, |a1|); all relative tolerances in this module use it.
double coefficient_scale(const QuarticParams& p) noexcept;

double discriminant(const QuarticParams& p) noexcept;

/// Discriminant divided by a3^6 R^12 with R a root-magnitude bound, so that it
/// is invariant under x -> s x rescaling of the roots.
double relative_discriminant(const QuarticParams& p) noexcept;

/// Companion-matrix eigenvalues, Newton polish, sorted descending.
/// Throws MultipleRootDetected when the relative discriminant is below 1e-10
/// and FewerThanFourRealRoots when any root is complex.
RootQuadruple real_roots(const QuarticParams& p);

AdmissibilityReport admissibility(const QuarticParams& p);

/// Expands a3 * prod(x - beta_i). The roots must sum to zero.
QuarticParams from_roots(const std::array<double, 4>& beta, double a3);

}  // namespace monopole
