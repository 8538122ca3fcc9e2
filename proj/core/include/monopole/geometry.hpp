#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>

#include "monopole/elliptic.hpp"

namespace monopole {

/// Covariant diagonal metric components. `lambda` is sqrt(g11 g22), which is
/// the conformal factor whenever g11 == g22.
struct MetricSample {
  double g11 = 0.0;
  double g22 = 0.0;
  double lambda = 0.0;
};

struct TorusPoint {
  double u1 = 0.0;
  double u2 = 0.0;
};

/// A point of the quotient sphere T^2 / sigma, sigma(u) = -u. `chart` is -1
/// for the bulk chart or the index 0..3 of the fixed point whose quadratic
/// chart contains the point.
struct SpherePoint {
  TorusPoint representative;
  int chart = -1;
};

/// Neumann constants alpha1 > alpha2 > alpha3.
struct NeumannConstants {
  std::array<double, 3> alpha{3.0, 2.0, 1.0};
};

/// Rectangle a finite-difference stencil must stay inside.
struct ChartBox {
  double lo1 = -std::numeric_limits<double>::infinity();
  double hi1 = std::numeric_limits<double>::infinity();
  double lo2 = -std::numeric_limits<double>::infinity();
  double hi2 = std::numeric_limits<double>::infinity();

  bool contains(double c1, double c2) const noexcept {
    return c1 >= lo1 && c1 <= hi1 && c2 >= lo2 && c2 <= hi2;
  }
};

/// Case I metric f(q) = a3 (q - alpha1)(q - alpha2)(q - alpha3) together with
/// its conformal chart: du = dq / sqrt(|f(q)|) turns the Staeckel form into
/// (Q1(u1) - Q2(u2)) (du1^2 + du2^2). Q1 runs over [alpha2, alpha1] and Q2 over
/// [alpha3, alpha2], both starting at alpha2.
class CaseIGeometry {
 public:
  CaseIGeometry(const NeumannConstants& c, double a3);

  const NeumannConstants& constants() const noexcept { return c_; }
  double alpha(int i) const noexcept { return c_.alpha[static_cast<std::size_t>(i - 1)]; }
  double a3() const noexcept { return a3_; }
  double f(double q) const noexcept;

  const EllipticSlice& slice1() const noexcept { return s1_; }
  const EllipticSlice& slice2() const noexcept { return s2_; }
  double k1() const noexcept { return s1_.half_period(); }
  double k2() const noexcept { return s2_.half_period(); }
  double q1(double u1) const { return s1_.value(u1); }
  double q2(double u2) const { return s2_.value(u2); }

 private:
  NeumannConstants c_;
  double a3_;
  EllipticSlice s1_;
  EllipticSlice s2_;
};

/// g11 = (q1 - q2)/f(q1), g22 = (q2 - q1)/f(q2).
/// Throws DegenerateCoordinates for q1 == q2 and WrongSignature when either
/// component fails to be positive.
MetricSample stackel_metric(const std::function<double(double)>& f, double q1, double q2);

/// Staeckel functions of the two families: a3 prod(q - alpha_i) and q P(sqrt q).
double case_i_stackel_f(const NeumannConstants& c, double a3, double q) noexcept;
double case_ii_stackel_f(const QuarticParams& p, double q) noexcept;

/// lambda = Q1^2(u1) - Q2^2(u2), evaluated as a product to avoid cancellation.
MetricSample torus_metric(const EllipticModel& model, const TorusPoint& p);
/// lambda = Q1(u1) - Q2(u2).
MetricSample conformal_metric(const CaseIGeometry& geo, const TorusPoint& p);

/// Representative in [0, 4K1) x [0, 4K2).
TorusPoint canonical(const EllipticModel& model, const TorusPoint& p);
TorusPoint sigma(const TorusPoint& p) noexcept;
/// (0,0), (2K1,0), (0,2K2), (2K1,2K2).
std::array<TorusPoint, 4> fixed_points(const EllipticModel& model);
/// Radius of the quadratic charts around the fixed points: min(K1, K2)/8.
double atlas_radius(const EllipticModel& model);
/// The lexicographically smaller canonical point of the sigma orbit, tagged with
/// the chart that contains it.
SpherePoint to_sphere(const EllipticModel& model, const TorusPoint& p);

/// Gaussian curvature in closed form: -a3/4 for Case I and
/// -a3/4 + a0 / (8 (x1 + x2)^3) for Case II at x1 = Q1(u1), x2 = Q2(u2).
double curvature_closed(const CaseIGeometry& geo) noexcept;
/// Throws DegeneratePoint at the fixed points.
double curvature_closed(const EllipticModel& model, const TorusPoint& p);
/// The same expression with the coefficient a0 / (x1 + x2)^3 taken literally.
double curvature_closed_printed(const EllipticModel& model, const TorusPoint& p);

/// -Laplacian(log lambda) / (2 lambda) for a conformal factor, using the
/// 4th-order 5-point second difference at h and h/2 plus Richardson
/// extrapolation. Throws StencilOutsideChart if any node leaves `box`.
double curvature_numeric(const std::function<double(double, double)>& lambda, double c1,
                         double c2, double h, const ChartBox& box = {});

/// Metric coefficient of ds^2 = m |dw|^2 in the chart w = z^2 around fixed
/// point `index`, z = u - u_fixed. Throws ChartOverflow for |w| beyond
/// sqrt(K1 K2)/4 and OutOfRange for a bad index. At w == 0 returns the limit.
MetricSample fixed_point_chart(const EllipticModel& model, int index, std::complex<double> w);
/// Limit of the chart coefficient: beta2 P'(beta2) / 32.
double fixed_point_limit(const EllipticModel& model);
/// The constant as printed, (1/2)(sqrt(P'(beta2))/4) beta2.
double fixed_point_limit_printed(const EllipticModel& model);

struct AreaFlux {
  double area = 0.0;
  double flux_over_2pi = 0.0;
  double nearest_integer = 0.0;
  double gap = 0.0;
};

/// Midpoint rule over the quarter cell [0,K1] x [0,K2] (the integrand is even
/// and 2K-periodic, so the rule converges spectrally); the sphere is 8 copies.
/// Throws InvalidArgument for n < 64.
AreaFlux area_and_flux(const EllipticModel& model, double B, int n);
AreaFlux area_and_flux(const CaseIGeometry& geo, double B, int n);

/// x_i^2 = prod_j (alpha_i - q_j) / prod_{k != i} (alpha_i - alpha_k).
/// Bit i of `sign_bits` makes component i negative.
/// Throws InterlacingViolated unless alpha1 >= q1 >= alpha2 >= q2 >= alpha3.
std::array<double, 3> neumann_to_cartesian(const NeumannConstants& c, double q1, double q2,
                                           unsigned sign_bits = 0);

struct NeumannCoords {
  double q1 = 0.0;
  double q2 = 0.0;
  unsigned sign_bits = 0;
};

/// Roots of sum_i x_i^2 / (alpha_i - q) = 0. Throws AxisPoint when two
/// components of x vanish.
NeumannCoords cartesian_to_neumann(const NeumannConstants& c, const std::array<double, 3>& x);

/// (alpha2 + alpha3) x1^2 + (alpha1 + alpha3) x2^2 + (alpha1 + alpha2) x3^2.
double neumann_quadratic_form(const NeumannConstants& c, const std::array<double, 3>& x) noexcept;

struct HyperbolicPoint {
  double u = 0.0;
  double v = 0.0;
  MetricSample metric;
  double h_over_mu = 0.0;
};

/// Degenerate Case I with f(q) = 4 q^3. The Staeckel form is positive only for
/// q1 > 0 > q2; X = q1^(-1/2), Y = (-q2)^(-1/2), u + iv = (X + iY)^2.
/// Throws NonPositiveCoordinate outside that sector.
HyperbolicPoint hyperbolic_chart(double q1, double q2);

/// Cylinder metric of the beta1 = beta2 limit in the rescaled coordinates
/// u1 = 2 ut1, u2 = delta + 4 ut2 / sqrt(c):
///   lambda = 16 (beta1^2 - Q2^2) / c.
MetricSample limit_cylinder_metric(const LimitModel& lm, double ut1, double ut2);
double limit_u2_from_tilde(const LimitModel& lm, double ut2) noexcept;
/// (beta1^2 - Q2^2) e^{2|ut2|} / A with A = 8 beta1 c / sqrt(D).
double limit_decay_ratio(const LimitModel& lm, double ut2);

}  // namespace monopole
