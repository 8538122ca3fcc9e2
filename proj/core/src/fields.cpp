#include "monopole/fields.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "monopole/error.hpp"

namespace monopole {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::CaseI: return "CaseI";
    case Family::CaseII: return "CaseII";
    case Family::CaseIILimit: return "CaseIILimit";
    case Family::VY: return "VY";
  }
  return "?";
}

Family family_from_string(std::string_view s) {
  if (s == "CaseI") return Family::CaseI;
  if (s == "CaseII") return Family::CaseII;
  if (s == "CaseIILimit") return Family::CaseIILimit;
  if (s == "VY") return Family::VY;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + std::string(s) + "'");
}

const CaseIGeometry& SystemSpec::geometry_i() const {
  if (family != Family::CaseI || !case_i) throw Error(ErrorCode::InvalidArgument, "not a Case I system");
  return *case_i;
}

const EllipticModel& SystemSpec::model() const {
  if (family != Family::CaseII || !case_ii) throw Error(ErrorCode::InvalidArgument, "not a Case II system");
  return *case_ii;
}

const LimitModel& SystemSpec::limit_model() const {
  if (family != Family::CaseIILimit || !limit) {
    throw Error(ErrorCode::InvalidArgument, "not a limit system");
  }
  return *limit;
}

SystemSpec make_case_i(const NeumannConstants& c, double a3, double mu, double B) {
  SystemSpec s;
  s.family = Family::CaseI;
  s.case_i = std::make_shared<const CaseIGeometry>(c, a3);
  s.mu = mu;
  s.B = B;
  s.k = -4.0 * B / a3;
  return s;
}

SystemSpec make_case_ii(std::shared_ptr<const EllipticModel> model, double mu, double B) {
  SystemSpec s;
  s.family = Family::CaseII;
  s.mu = mu;
  s.B = B;
  s.k = -4.0 * B / model->params().a3;
  s.case_ii = std::move(model);
  return s;
}

SystemSpec make_case_ii(const QuarticParams& params, double mu, double B) {
  return make_case_ii(std::make_shared<const EllipticModel>(build_model(params)), mu, B);
}

SystemSpec make_limit(double beta1, double beta3, double beta4, double mu, double B) {
  SystemSpec s;
  s.family = Family::CaseIILimit;
  s.limit = std::make_shared<const LimitModel>(beta1, beta3, beta4);
  s.mu = mu;
  s.B = B;
  s.k = 4.0 * B;  // a3 = -1 in the limit normalization
  return s;
}

SystemSpec make_vy(double vyA, double vyB, double mu, double nu) {
  if (!(vyA > vyB && vyB > 0.0)) throw Error(ErrorCode::InvalidArgument, "VY requires vyA > vyB > 0");
  SystemSpec s;
  s.family = Family::VY;
  s.vyA = vyA;
  s.vyB = vyB;
  s.mu = mu;
  s.B = nu;
  return s;
}

namespace {

[[noreturn]] void unsupported(const SystemSpec& spec, const char* what) {
  throw Error(ErrorCode::InvalidArgument,
              std::string(what) + " is not defined for family " + std::string(to_string(spec.family)));
}

struct CaseIIPoint {
  double q1, dq1, q2, dq2;
  double diff;  // Q1 - Q2 without cancellation
};

CaseIIPoint sample(const EllipticModel& m, double u1, double u2) {
  CaseIIPoint p{};
  m.slice(Slice::Real).evaluate(u1, p.q1, p.dq1);
  m.slice(Slice::Imaginary).evaluate(u2, p.q2, p.dq2);
  p.diff = (p.q1 - m.beta(2)) - (p.q2 - m.beta(2));
  return p;
}

}  // namespace

double electric_h(const SystemSpec& spec, double c1, double c2) {
  switch (spec.family) {
    case Family::CaseI: return spec.mu * (c1 + c2);
    case Family::CaseII: {
      const auto& m = spec.model();
      return spec.mu / (m.q1(c1) + m.q2(c2));
    }
    case Family::CaseIILimit: {
      const auto& lm = spec.limit_model();
      return spec.mu / (lm.beta1() + lm.q2(c2));
    }
    case Family::VY: break;
  }
  unsupported(spec, "electric_h");
}

std::array<double, 2> phi_components(const SystemSpec& spec, double c1, double c2) {
  if (spec.family == Family::CaseI) {
    const auto& g = spec.geometry_i();
    const double prod = -g.f(c1) * g.f(c2);
    if (prod < 0.0) {
      std::ostringstream os;
      os << "f(q1) f(q2) > 0 at (" << c1 << ", " << c2 << ")";
      throw Error(ErrorCode::NegativeRadicand, os.str());
    }
    if (c1 == c2) throw Error(ErrorCode::DegenerateCoordinates, "q1 == q2");
    const double phi1 = spec.k * std::sqrt(prod) / (c1 - c2);
    return {phi1, -phi1};
  }
  if (spec.family == Family::CaseII) {
    const auto& m = spec.model();
    const CaseIIPoint p = sample(m, c1, c2);
    if (std::abs(p.diff) <= 1e-14 * m.scale()) {
      throw Error(ErrorCode::FixedPointSingularity, "phi is 0/0 at a torus fixed point");
    }
    return {2.0 * spec.k * p.dq2 / p.diff, -2.0 * spec.k * p.dq1 / p.diff};
  }
  unsupported(spec, "phi_components");
}

std::array<double, 2> phi_components_stackel(const SystemSpec& spec, double q1, double q2) {
  const auto& m = spec.model();
  const double f1 = case_ii_stackel_f(m.params(), q1);
  const double f2 = case_ii_stackel_f(m.params(), q2);
  if (f1 * f2 > 0.0) throw Error(ErrorCode::NegativeRadicand, "f(q1) f(q2) > 0");
  const double R = std::sqrt(-f1 * f2);
  const double s = std::sqrt(q1 * q2);
  return {spec.k * R / (s - q2), spec.k * R / (s - q1)};
}

double varphi(const SystemSpec& spec, double c1, double c2) {
  if (spec.family == Family::CaseI) return spec.mu * c1 * c2 - spec.k * spec.B * (c1 + c2);
  if (spec.family == Family::CaseII) {
    const auto& m = spec.model();
    const double q1 = m.q1(c1), q2 = m.q2(c2);
    const double s = q1 + q2;
    return -spec.mu * q1 * q2 / s - spec.k * spec.B * s * s;
  }
  unsupported(spec, "varphi");
}

double gauge_chart_half_width(const SystemSpec& spec) {
  switch (spec.family) {
    case Family::CaseI: return 2.0 * spec.geometry_i().k1();
    case Family::CaseII: return 2.0 * spec.model().k1();
    case Family::CaseIILimit: return std::numeric_limits<double>::infinity();
    case Family::VY: break;
  }
  unsupported(spec, "gauge_a");
}

namespace {

// (B/c) \int_delta^{u2} (beta1^2 - Q2^2) du with beta1 - Q2 = y = 2c/(a cosh s + b),
// s = sqrt(c)(u2 - delta)/2, a = sqrt(D), W = sqrt(b^2 - a^2) = 2 sqrt(c).
double limit_gauge(const LimitModel& lm, double B, double u2) {
  const double c = lm.c(), b = lm.b(), a = std::sqrt(lm.d());
  const double sc = std::sqrt(c);
  const double W = 2.0 * sc;
  const double r = std::sqrt((b - a) / (b + a));
  const double T = std::tanh(0.25 * sc * (u2 - lm.delta()));  // tanh(s/2)
  const double at = std::atanh(r * T);
  const double i1 = 2.0 / W * at;
  const double i2 = 2.0 * b / (W * W * W) * at - 2.0 * a * T / (W * W * (b + a) * (1.0 - r * r * T * T));
  const double y1 = 4.0 * sc * i1;          // \int y du
  const double y2 = 8.0 * c * sc * i2;      // \int y^2 du
  return B / c * (2.0 * lm.beta1() * y1 - y2);
}

}  // namespace

std::array<double, 2> gauge_a(const SystemSpec& spec, const TorusPoint& p) {
  if (spec.family == Family::CaseIILimit) return {limit_gauge(spec.limit_model(), spec.B, p.u2), 0.0};
  const double half = gauge_chart_half_width(spec);
  if (std::abs(p.u1) > half * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "u1 = " << p.u1 << " outside the gauge chart |u1| <= " << half;
    throw Error(ErrorCode::OutsideChart, os.str());
  }
  if (spec.family == Family::CaseII) {
    const auto& m = spec.model();
    const double q2 = m.q2(p.u2);
    return {0.0, spec.B * (m.slice(Slice::Real).integral_of_square(p.u1) - p.u1 * q2 * q2)};
  }
  const auto& g = spec.geometry_i();
  return {0.0, spec.B * (g.slice1().integral_of_value(p.u1) - p.u1 * g.q2(p.u2))};
}

MetricSample system_metric(const SystemSpec& spec, double c1, double c2) {
  switch (spec.family) {
    case Family::CaseI: return conformal_metric(spec.geometry_i(), {c1, c2});
    case Family::CaseII: return torus_metric(spec.model(), {c1, c2});
    case Family::CaseIILimit: {
      const auto& lm = spec.limit_model();
      const double y = lm.gap(c2);
      const double L = y * (2.0 * lm.beta1() - y);
      MetricSample m{4.0 * L / lm.c(), L, 0.0};
      m.lambda = std::sqrt(m.g11 * m.g22);
      return m;
    }
    case Family::VY: break;
  }
  unsupported(spec, "system_metric");
}

double magnetic_density(const MetricSampler& metric, const GaugeSampler& gauge, double c1,
                        double c2, double h) {
  const MetricSample m = metric(c1, c2);
  const double area = std::sqrt(m.g11 * m.g22);
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw Error(ErrorCode::DegeneratePoint, "metric degenerates at the sample point");
  }
  const auto curl = [&](double s) {
    const double d1a2 = (gauge(c1 + s, c2)[1] - gauge(c1 - s, c2)[1]) / (2.0 * s);
    const double d2a1 = (gauge(c1, c2 + s)[0] - gauge(c1, c2 - s)[0]) / (2.0 * s);
    return d1a2 - d2a1;
  };
  const double c = (4.0 * curl(0.5 * h) - curl(h)) / 3.0;
  return c / area;  // sqrt(g^11 g^22) = 1 / sqrt(g11 g22)
}

double magnetic_density(const SystemSpec& spec, double c1, double c2) {
  return magnetic_density([&](double a, double b) { return system_metric(spec, a, b); },
                          [&](double a, double b) { return gauge_a(spec, {a, b}); }, c1, c2);
}

double curvature_closed(const SystemSpec& spec, double c1, double c2) {
  if (spec.family == Family::CaseI) return curvature_closed(spec.geometry_i());
  if (spec.family == Family::CaseII) return curvature_closed(spec.model(), {c1, c2});
  unsupported(spec, "curvature_closed");
}

}  // namespace monopole
