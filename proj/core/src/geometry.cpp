#include "monopole/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "monopole/error.hpp"

namespace monopole {

namespace {

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

double wrap_centered(double x, double period) {
  return x - period * std::round(x / period);
}

}  // namespace

CaseIGeometry::CaseIGeometry(const NeumannConstants& c, double a3) : c_(c), a3_(a3) {
  const auto& a = c_.alpha;
  if (!(a[0] > a[1] && a[1] > a[2])) {
    throw Error(ErrorCode::InvalidArgument, "Neumann constants must satisfy alpha1 > alpha2 > alpha3");
  }
  if (!(a3 < 0.0)) throw Error(ErrorCode::InvalidArgument, "Case I requires a3 < 0");
  const double o1[] = {a[2]};
  const double o2[] = {a[0]};
  s1_ = EllipticSlice(a[1], a[0], o1, a3, 1.0);
  s2_ = EllipticSlice(a[1], a[2], o2, a3, 1.0);
}

double CaseIGeometry::f(double q) const noexcept { return case_i_stackel_f(c_, a3_, q); }

double case_i_stackel_f(const NeumannConstants& c, double a3, double q) noexcept {
  return a3 * (q - c.alpha[0]) * (q - c.alpha[1]) * (q - c.alpha[2]);
}

double case_ii_stackel_f(const QuarticParams& p, double q) noexcept {
  return q * eval_p(p, std::sqrt(q));
}

MetricSample stackel_metric(const std::function<double(double)>& f, double q1, double q2) {
  if (q1 == q2) throw Error(ErrorCode::DegenerateCoordinates, "q1 == q2");
  MetricSample m;
  m.g11 = (q1 - q2) / f(q1);
  m.g22 = (q2 - q1) / f(q2);
  if (!(m.g11 > 0.0 && m.g22 > 0.0) || !std::isfinite(m.g11) || !std::isfinite(m.g22)) {
    std::ostringstream os;
    os << "metric not positive definite at (" << q1 << ", " << q2 << ")";
    throw Error(ErrorCode::WrongSignature, os.str());
  }
  m.lambda = std::sqrt(m.g11 * m.g22);
  return m;
}

MetricSample torus_metric(const EllipticModel& model, const TorusPoint& p) {
  const double d1 = model.slice(Slice::Real).offset(p.u1);
  const double d2 = model.slice(Slice::Imaginary).offset(p.u2);
  const double lambda = (d1 - d2) * (2.0 * model.beta(2) + d1 + d2);
  return {lambda, lambda, lambda};
}

MetricSample conformal_metric(const CaseIGeometry& geo, const TorusPoint& p) {
  const double lambda = geo.slice1().offset(p.u1) - geo.slice2().offset(p.u2);
  return {lambda, lambda, lambda};
}

TorusPoint canonical(const EllipticModel& model, const TorusPoint& p) {
  return {wrap(p.u1, 4.0 * model.k1()), wrap(p.u2, 4.0 * model.k2())};
}

TorusPoint sigma(const TorusPoint& p) noexcept { return {-p.u1, -p.u2}; }

std::array<TorusPoint, 4> fixed_points(const EllipticModel& model) {
  const double a = 2.0 * model.k1(), b = 2.0 * model.k2();
  return {TorusPoint{0.0, 0.0}, TorusPoint{a, 0.0}, TorusPoint{0.0, b}, TorusPoint{a, b}};
}

double atlas_radius(const EllipticModel& model) {
  return std::min(model.k1(), model.k2()) / 8.0;
}

SpherePoint to_sphere(const EllipticModel& model, const TorusPoint& p) {
  const TorusPoint a = canonical(model, p);
  const TorusPoint b = canonical(model, sigma(p));
  SpherePoint s;
  s.representative = (a.u1 < b.u1 || (a.u1 == b.u1 && a.u2 <= b.u2)) ? a : b;
  const double r0 = atlas_radius(model);
  const auto fps = fixed_points(model);
  for (int i = 0; i < 4; ++i) {
    const double d1 = wrap_centered(s.representative.u1 - fps[i].u1, 4.0 * model.k1());
    const double d2 = wrap_centered(s.representative.u2 - fps[i].u2, 4.0 * model.k2());
    if (std::hypot(d1, d2) < r0) {
      s.chart = i;
      break;
    }
  }
  return s;
}

double curvature_closed(const CaseIGeometry& geo) noexcept { return -geo.a3() / 4.0; }

namespace {

double case_ii_curvature(const EllipticModel& model, const TorusPoint& p, double factor) {
  const double lambda = torus_metric(model, p).lambda;
  if (!(lambda > 1e-14 * model.scale())) {
    throw Error(ErrorCode::DegeneratePoint, "curvature requested at a fixed point");
  }
  const double s = model.q1(p.u1) + model.q2(p.u2);
  const auto& prm = model.params();
  return -prm.a3 / 4.0 + prm.a0 / (factor * s * s * s);
}

}  // namespace

double curvature_closed(const EllipticModel& model, const TorusPoint& p) {
  return case_ii_curvature(model, p, 8.0);
}

double curvature_closed_printed(const EllipticModel& model, const TorusPoint& p) {
  return case_ii_curvature(model, p, 1.0);
}

double curvature_numeric(const std::function<double(double, double)>& lambda, double c1,
                         double c2, double h, const ChartBox& box) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  for (int i = -2; i <= 2; ++i) {
    if (!box.contains(c1 + i * h, c2) || !box.contains(c1, c2 + i * h)) {
      throw Error(ErrorCode::StencilOutsideChart, "curvature stencil leaves the chart");
    }
  }
  const auto log_lambda = [&](double a, double b) {
    const double v = lambda(a, b);
    if (!(v > 0.0)) throw Error(ErrorCode::DegeneratePoint, "non-positive conformal factor");
    return std::log(v);
  };
  const double f0 = log_lambda(c1, c2);
  const auto laplacian = [&](double s) {
    const double e1 = -log_lambda(c1 + 2 * s, c2) + 16 * log_lambda(c1 + s, c2) +
                      16 * log_lambda(c1 - s, c2) - log_lambda(c1 - 2 * s, c2);
    const double e2 = -log_lambda(c1, c2 + 2 * s) + 16 * log_lambda(c1, c2 + s) +
                      16 * log_lambda(c1, c2 - s) - log_lambda(c1, c2 - 2 * s);
    return (e1 + e2 - 60.0 * f0) / (12.0 * s * s);
  };
  const double lap = (16.0 * laplacian(0.5 * h) - laplacian(h)) / 15.0;
  return -lap / (2.0 * std::exp(f0));
}

MetricSample fixed_point_chart(const EllipticModel& model, int index, std::complex<double> w) {
  if (index < 0 || index > 3) throw Error(ErrorCode::OutOfRange, "fixed point index must be 0..3");
  const double radius = std::sqrt(model.k1() * model.k2()) / 4.0;
  const double aw = std::abs(w);
  if (aw > radius) {
    std::ostringstream os;
    os << "|w| = " << aw << " exceeds chart radius " << radius;
    throw Error(ErrorCode::ChartOverflow, os.str());
  }
  if (aw == 0.0) {
    const double m = fixed_point_limit(model);
    return {m, m, m};
  }
  const std::complex<double> z = std::sqrt(w);
  const TorusPoint base = fixed_points(model)[static_cast<std::size_t>(index)];
  const double lambda = torus_metric(model, {base.u1 + z.real(), base.u2 + z.imag()}).lambda;
  const double m = lambda / (4.0 * aw);
  return {m, m, m};
}

double fixed_point_limit(const EllipticModel& model) {
  const double b2 = model.beta(2);
  return b2 * eval_dp(model.params(), b2) / 32.0;
}

double fixed_point_limit_printed(const EllipticModel& model) {
  const double b2 = model.beta(2);
  return 0.5 * (std::sqrt(eval_dp(model.params(), b2)) / 4.0) * b2;
}

namespace {

AreaFlux finish(double area, double B) {
  AreaFlux r;
  r.area = area;
  r.flux_over_2pi = B * area / (2.0 * std::numbers::pi);
  r.nearest_integer = std::round(r.flux_over_2pi);
  r.gap = std::abs(r.flux_over_2pi - r.nearest_integer);
  return r;
}

void check_resolution(int n) {
  if (n < 64) throw Error(ErrorCode::InvalidArgument, "area quadrature needs n >= 64");
}

}  // namespace

AreaFlux area_and_flux(const EllipticModel& model, double B, int n) {
  check_resolution(n);
  // lambda = Q1^2 - Q2^2 separates, so the 2D midpoint sum factorizes.
  const double h1 = model.k1() / n, h2 = model.k2() / n;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double q1 = model.q1((i + 0.5) * h1);
    const double q2 = model.q2((i + 0.5) * h2);
    s1 += q1 * q1;
    s2 += q2 * q2;
  }
  return finish(8.0 * n * h1 * h2 * (s1 - s2), B);
}

AreaFlux area_and_flux(const CaseIGeometry& geo, double B, int n) {
  check_resolution(n);
  const double h1 = geo.k1() / n, h2 = geo.k2() / n;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    s1 += geo.q1((i + 0.5) * h1);
    s2 += geo.q2((i + 0.5) * h2);
  }
  return finish(8.0 * n * h1 * h2 * (s1 - s2), B);
}

std::array<double, 3> neumann_to_cartesian(const NeumannConstants& c, double q1, double q2,
                                           unsigned sign_bits) {
  const auto& a = c.alpha;
  const double tol = 1e-14 * std::max({std::abs(a[0]), std::abs(a[2]), 1.0});
  if (!(q1 <= a[0] + tol && q1 >= a[1] - tol && q2 <= a[1] + tol && q2 >= a[2] - tol)) {
    std::ostringstream os;
    os << "(q1, q2) = (" << q1 << ", " << q2 << ") does not interlace the Neumann constants";
    throw Error(ErrorCode::InterlacingViolated, os.str());
  }
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < 3; ++i) {
    double num = (a[i] - q1) * (a[i] - q2);
    double den = 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k != i) den *= a[i] - a[k];
    }
    const double sq = std::max(0.0, num / den);
    x[i] = (sign_bits >> i & 1u) ? -std::sqrt(sq) : std::sqrt(sq);
  }
  return x;
}

NeumannCoords cartesian_to_neumann(const NeumannConstants& c, const std::array<double, 3>& x) {
  const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  int zeros = 0;
  for (double xi : x) zeros += std::abs(xi) <= 1e-15 * norm;
  if (zeros >= 2) throw Error(ErrorCode::AxisPoint, "elliptic coordinates degenerate on the axes");

  const auto& a = c.alpha;
  // sum_i x_i^2 prod_{k != i} (alpha_k - q) = A q^2 + Bq q + C.
  double A = 0.0, Bq = 0.0, C = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
    const double w = x[i] * x[i];
    A += w;
    Bq -= w * (a[j] + a[k]);
    C += w * a[j] * a[k];
  }
  const double disc = std::max(0.0, Bq * Bq - 4.0 * A * C);
  const double t = -0.5 * (Bq + std::copysign(std::sqrt(disc), Bq));
  double r1 = t / A, r2 = C / t;
  if (r1 < r2) std::swap(r1, r2);

  NeumannCoords out;
  out.q1 = std::clamp(r1, a[1], a[0]);
  out.q2 = std::clamp(r2, a[2], a[1]);
  for (unsigned i = 0; i < 3; ++i) {
    if (x[i] < 0.0) out.sign_bits |= 1u << i;
  }
  return out;
}

double neumann_quadratic_form(const NeumannConstants& c, const std::array<double, 3>& x) noexcept {
  const auto& a = c.alpha;
  return (a[1] + a[2]) * x[0] * x[0] + (a[0] + a[2]) * x[1] * x[1] + (a[0] + a[1]) * x[2] * x[2];
}

HyperbolicPoint hyperbolic_chart(double q1, double q2) {
  if (!(q1 > 0.0 && q2 < 0.0)) {
    std::ostringstream os;
    os << "hyperbolic chart needs q1 > 0 > q2, got (" << q1 << ", " << q2 << ")";
    throw Error(ErrorCode::NonPositiveCoordinate, os.str());
  }
  const double X = 1.0 / std::sqrt(q1);
  const double Y = 1.0 / std::sqrt(-q2);
  HyperbolicPoint r;
  r.u = X * X - Y * Y;
  r.v = 2.0 * X * Y;
  const double g = 1.0 / (r.v * r.v);
  r.metric = {g, g, g};
  r.h_over_mu = -4.0 * r.u / (r.v * r.v);
  return r;
}

double limit_u2_from_tilde(const LimitModel& lm, double ut2) noexcept {
  return lm.delta() + 4.0 * ut2 / std::sqrt(lm.c());
}

MetricSample limit_cylinder_metric(const LimitModel& lm, double /*ut1*/, double ut2) {
  const double gap = lm.gap(limit_u2_from_tilde(lm, ut2));
  const double lambda = 16.0 * gap * (2.0 * lm.beta1() - gap) / lm.c();
  return {lambda, lambda, lambda};
}

double limit_decay_ratio(const LimitModel& lm, double ut2) {
  const double gap = lm.gap(limit_u2_from_tilde(lm, ut2));
  return gap * (2.0 * lm.beta1() - gap) * std::exp(2.0 * std::abs(ut2)) / lm.decay_constant();
}

}  // namespace monopole
