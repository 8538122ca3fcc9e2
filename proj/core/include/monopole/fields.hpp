#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string_view>

#include "monopole/elliptic.hpp"
#include "monopole/geometry.hpp"

namespace monopole {

enum class Family { CaseI, CaseII, CaseIILimit, VY };

std::string_view to_string(Family f) noexcept;
/// Accepts the config spellings "CaseI", "CaseII", "CaseIILimit", "VY".
Family family_from_string(std::string_view s);

/// A complete system definition. Exactly one of the geometry members is set,
/// matching `family`. For Case I and Case II the coupling k = -4B/a3 is
/// derived at construction. For VY, (vyA, vyB) are metric parameters and B is
/// the leaf value (M, x) = B of the initial states.
struct SystemSpec {
  Family family = Family::CaseII;
  double mu = 0.0;
  double B = 0.0;
  double k = 0.0;
  std::shared_ptr<const CaseIGeometry> case_i;
  std::shared_ptr<const EllipticModel> case_ii;
  std::shared_ptr<const LimitModel> limit;
  double vyA = 0.0;
  double vyB = 0.0;

  const CaseIGeometry& geometry_i() const;
  const EllipticModel& model() const;
  const LimitModel& limit_model() const;
};

SystemSpec make_case_i(const NeumannConstants& c, double a3, double mu, double B);
SystemSpec make_case_ii(const QuarticParams& params, double mu, double B);
SystemSpec make_case_ii(std::shared_ptr<const EllipticModel> model, double mu, double B);
SystemSpec make_limit(double beta1, double beta3, double beta4, double mu, double B);
/// Requires vyA > vyB > 0.
SystemSpec make_vy(double vyA, double vyB, double mu, double nu);

// Coordinates of the field evaluators below:
//   Case I        (q1, q2) elliptic coordinates, alpha1 > q1 > alpha2 > q2 > alpha3
//   Case II       (u1, u2) torus coordinates
//   Case II limit (u1, u2) cylinder coordinates (only u2 enters)

/// Case I mu (q1 + q2); Case II mu / (Q1 + Q2); limit mu / (beta1 + Q2).
double electric_h(const SystemSpec& spec, double c1, double c2);

/// Case I: phi1 = -phi2 = k sqrt(-f(q1) f(q2)) / (q1 - q2), NegativeRadicand
/// when f(q1) f(q2) > 0. Case II: (2k Q2'/(Q1 - Q2), 2k Q1'/(Q2 - Q1)); the
/// pair is 0/0 at the four fixed points and throws FixedPointSingularity there.
std::array<double, 2> phi_components(const SystemSpec& spec, double c1, double c2);

/// Case II in Staeckel coordinates q_i = x_i^2 with f(q) = q P(sqrt q):
/// phi1 = k R / (sqrt(q1 q2) - q2), phi2 = k R / (sqrt(q1 q2) - q1),
/// R = sqrt(-f(q1) f(q2)).
std::array<double, 2> phi_components_stackel(const SystemSpec& spec, double q1, double q2);

/// Case I mu q1 q2 - k B (q1 + q2); Case II -mu Q1 Q2/(Q1 + Q2) - k B (Q1 + Q2)^2.
double varphi(const SystemSpec& spec, double c1, double c2);

/// Landau gauge on the chart |u1| <= 2 K1 (Case II) with A1 = 0 and
/// A2 = B (I1(u1) - u1 Q2^2(u2)), I1 = \int_0^{u1} Q1^2. Case I uses the same
/// construction in its conformal chart with lambda = Q1 - Q2. The limit uses
/// A2 = 0 and A1(u2) = (B/c) \int_delta^{u2} (beta1^2 - Q2^2) in closed form.
/// Throws OutsideChart when |u1| exceeds the chart.
std::array<double, 2> gauge_a(const SystemSpec& spec, const TorusPoint& p);

/// Half-width of the gauge chart in u1 (2 K1), infinite for the limit.
double gauge_chart_half_width(const SystemSpec& spec);

using MetricSampler = std::function<MetricSample(double, double)>;
using GaugeSampler = std::function<std::array<double, 2>(double, double)>;

/// sqrt(g^11 g^22) (d1 A2 - d2 A1) from covariant metric samples, by
/// Richardson-extrapolated central differences of step h.
/// Throws DegeneratePoint where the metric degenerates.
double magnetic_density(const MetricSampler& metric, const GaugeSampler& gauge, double c1,
                        double c2, double h = 1e-3);
/// The built-in metric and gauge of the system (chart coordinates as in gauge_a).
double magnetic_density(const SystemSpec& spec, double c1, double c2);

/// Covariant metric of the system in its chart coordinates.
MetricSample system_metric(const SystemSpec& spec, double c1, double c2);

/// Closed-form curvature (Case I constant, Case II at torus point (c1, c2)).
double curvature_closed(const SystemSpec& spec, double c1, double c2);

}  // namespace monopole
