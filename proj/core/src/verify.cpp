#include "monopole/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "monopole/error.hpp"
#include "monopole/parallel.hpp"

namespace monopole {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_size(const AnsatzGrid& g, int stencil) {
  if (stencil != 2 && stencil != 4 && stencil != 6 && stencil != 8) {
    throw Error(ErrorCode::InvalidArgument, "stencil must be 2, 4, 6 or 8");
  }
  if (g.n1 < 9 || g.n2 < 9) {
    std::ostringstream os;
    os << "grid " << g.n1 << "x" << g.n2 << " is below the 9x9 minimum";
    throw Error(ErrorCode::GridTooSmall, os.str());
  }
}

// Antisymmetric central-difference weights w_d, f' ~ sum_d w_d (f(+d) - f(-d)) / h.
std::span<const double> weights(int stencil) {
  static constexpr double w2[] = {0.5};
  static constexpr double w4[] = {2.0 / 3.0, -1.0 / 12.0};
  static constexpr double w6[] = {0.75, -0.15, 1.0 / 60.0};
  static constexpr double w8[] = {0.8, -0.2, 4.0 / 105.0, -1.0 / 280.0};
  switch (stencil) {
    case 2: return w2;
    case 4: return w4;
    case 6: return w6;
    default: return w8;
  }
}

// Central difference along dir (1 or 2); NaN where the stencil does not fit.
std::vector<double> diff(const AnsatzGrid& g, const std::vector<double>& f, int dir, int stencil) {
  std::vector<double> out(f.size(), kNaN);
  const auto w = weights(stencil);
  const int m = stencil / 2;
  const double h = dir == 1 ? g.h1() : g.h2();
  const int n = dir == 1 ? g.n1 : g.n2;
  for (int i = 0; i < g.n1; ++i) {
    for (int j = 0; j < g.n2; ++j) {
      const int k = dir == 1 ? i : j;
      if (k < m || k >= n - m) continue;
      const auto at = [&](int d) {
        return dir == 1 ? f[g.index(i + d, j)] : f[g.index(i, j + d)];
      };
      double acc = 0.0;
      for (int d = m; d >= 1; --d) acc += w[d - 1] * (at(d) - at(-d));
      out[g.index(i, j)] = acc / h;
    }
  }
  return out;
}

struct Derivs {
  std::vector<double> d1, d2;
};

Derivs grad(const AnsatzGrid& g, const std::vector<double>& f, int stencil) {
  return {diff(g, f, 1, stencil), diff(g, f, 2, stencil)};
}

// Running max of |equation| and of its individual terms.
struct Acc {
  double num = 0.0;
  double den = 0.0;
  void add(double value, std::initializer_list<double> terms) {
    if (!std::isfinite(value)) return;
    num = std::max(num, std::abs(value));
    for (double t : terms) den = std::max(den, std::abs(t));
  }
  double normalized() const { return den > 0.0 ? num / den : 0.0; }
};

template <class Fn>
void for_interior(const AnsatzGrid& g, int stencil, Fn&& fn) {
  const int m = stencil / 2;
  for (int i = m; i < g.n1 - m; ++i) {
    for (int j = m; j < g.n2 - m; ++j) fn(g.index(i, j));
  }
}

double sqrt_g(const AnsatzGrid& g, std::size_t k) { return std::sqrt(g.g11[k] * g.g22[k]); }

struct QuantumParts {
  std::vector<double> classical;   // phi1 d1h + phi2 d2h
  std::vector<double> correction;  // sqrt(g)(v2 - v1)(d2g11/g11 d1B + d1g22/g22 d2B - d1d2B)
  std::vector<double> t1, t2;      // individual classical terms
};

QuantumParts quantum_parts(const AnsatzGrid& g, int stencil) {
  check_size(g, stencil);
  const Derivs dh = grad(g, g.h, stencil);
  const Derivs dB = grad(g, g.B, stencil);
  const auto d2g11 = diff(g, g.g11, 2, stencil);
  const auto d1g22 = diff(g, g.g22, 1, stencil);
  const auto d12B = diff(g, dB.d2, 1, stencil);
  const std::size_t n = g.h.size();
  QuantumParts q{std::vector<double>(n, kNaN), std::vector<double>(n, kNaN),
                 std::vector<double>(n, kNaN), std::vector<double>(n, kNaN)};
  for_interior(g, stencil, [&](std::size_t k) {
    q.t1[k] = g.phi1[k] * dh.d1[k];
    q.t2[k] = g.phi2[k] * dh.d2[k];
    q.classical[k] = q.t1[k] + q.t2[k];
    q.correction[k] = sqrt_g(g, k) * (g.v2[k] - g.v1[k]) *
                      (d2g11[k] / g.g11[k] * dB.d1[k] + d1g22[k] / g.g22[k] * dB.d2[k] - d12B[k]);
  });
  return q;
}

}  // namespace

AnsatzGrid::AnsatzGrid(int n1_, int n2_, const ChartBox& box_) : n1(n1_), n2(n2_), box(box_) {
  const std::size_t n = static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  for (auto* v : {&g11, &g22, &v1, &v2, &phi1, &phi2, &h, &varphi, &B}) v->assign(n, 0.0);
}

ChartBox default_verify_box(const SystemSpec& spec) {
  if (spec.family == Family::CaseI) {
    const auto& g = spec.geometry_i();
    const double a1 = g.alpha(1), a2 = g.alpha(2), a3 = g.alpha(3);
    return {a2 + 0.1 * (a1 - a2), a1 - 0.1 * (a1 - a2), a3 + 0.1 * (a2 - a3), a2 - 0.1 * (a2 - a3)};
  }
  if (spec.family == Family::CaseII) {
    const auto& m = spec.model();
    return {0.1 * m.k1(), 0.9 * m.k1(), 0.1 * m.k2(), 0.9 * m.k2()};
  }
  throw Error(ErrorCode::InvalidArgument, "verification grids exist for Case I and Case II only");
}

AnsatzGrid sample_system(const SystemSpec& spec, int n) {
  return sample_system(spec, n, default_verify_box(spec));
}

AnsatzGrid sample_system(const SystemSpec& spec, int n, const ChartBox& box) {
  if (spec.family != Family::CaseI && spec.family != Family::CaseII) {
    throw Error(ErrorCode::InvalidArgument, "verification grids exist for Case I and Case II only");
  }
  if (n < 2) throw Error(ErrorCode::GridTooSmall, "grid needs at least 2 points per axis");
  AnsatzGrid g(n, n, box);
  const bool case_i = spec.family == Family::CaseI;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (int i = static_cast<int>(begin); i < static_cast<int>(end); ++i) {
      for (int j = 0; j < n; ++j) {
        const double a = g.c1(i), b = g.c2(j);
        const std::size_t k = g.index(i, j);
        if (case_i) {
          const auto& geo = spec.geometry_i();
          const MetricSample m =
              stackel_metric([&](double q) { return geo.f(q); }, a, b);
          g.g11[k] = 1.0 / m.g11;
          g.g22[k] = 1.0 / m.g22;
          g.v1[k] = b;
          g.v2[k] = a;
        } else {
          const MetricSample m = torus_metric(spec.model(), {a, b});
          const double q1 = spec.model().q1(a), q2 = spec.model().q2(b);
          g.g11[k] = 1.0 / m.g11;
          g.g22[k] = 1.0 / m.g22;
          g.v1[k] = q2 * q2;
          g.v2[k] = q1 * q1;
        }
        const auto phi = phi_components(spec, a, b);
        g.phi1[k] = phi[0];
        g.phi2[k] = phi[1];
        g.h[k] = electric_h(spec, a, b);
        g.varphi[k] = varphi(spec, a, b);
        g.B[k] = spec.B;
      }
    }
  });
  return g;
}

AnsatzGrid sample_case_ii_stackel(const SystemSpec& spec, int n) {
  const auto& m = spec.model();
  const double b1 = m.beta(1), b2 = m.beta(2), lo = std::max(m.beta(3), 0.0);
  const double s1 = b1 * b1 - b2 * b2, s2 = b2 * b2 - lo * lo;
  const ChartBox box{b2 * b2 + 0.1 * s1, b1 * b1 - 0.1 * s1, lo * lo + 0.1 * s2, b2 * b2 - 0.1 * s2};
  AnsatzGrid g(n, n, box);
  const auto f = [&](double q) { return case_ii_stackel_f(m.params(), q); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double q1 = g.c1(i), q2 = g.c2(j);
      const std::size_t k = g.index(i, j);
      const MetricSample ms = stackel_metric(f, q1, q2);
      g.g11[k] = 1.0 / ms.g11;
      g.g22[k] = 1.0 / ms.g22;
      g.v1[k] = q2;
      g.v2[k] = q1;
      const auto phi = phi_components_stackel(spec, q1, q2);
      g.phi1[k] = phi[0];
      g.phi2[k] = phi[1];
      const double r1 = std::sqrt(q1), r2 = std::sqrt(q2);
      g.h[k] = spec.mu / (r1 + r2);
      g.varphi[k] = -spec.mu * r1 * r2 / (r1 + r2) - spec.k * spec.B * (r1 + r2) * (r1 + r2);
      g.B[k] = spec.B;
    }
  }
  return g;
}

std::string_view to_string(Condition c) noexcept {
  static constexpr std::string_view names[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C6*"};
  return names[static_cast<std::size_t>(c)];
}

double ConditionReport::max_residual() const noexcept {
  return *std::max_element(residual.begin(), residual.end());
}

ConditionReport check_classical(const AnsatzGrid& g, int stencil) {
  check_size(g, stencil);
  const Derivs dv1 = grad(g, g.v1, stencil), dv2 = grad(g, g.v2, stencil);
  const Derivs dg11 = grad(g, g.g11, stencil), dg22 = grad(g, g.g22, stencil);
  const Derivs dp1 = grad(g, g.phi1, stencil), dp2 = grad(g, g.phi2, stencil);
  const Derivs dh = grad(g, g.h, stencil), dvp = grad(g, g.varphi, stencil);

  Acc c1a, c1b, c2a, c2b, c3a, c3b, c4, c5a, c5b;
  for_interior(g, stencil, [&](std::size_t k) {
    c1a.add(dv1.d1[k], {dv1.d1[k], dv1.d2[k]});
    c1b.add(dv2.d2[k], {dv2.d1[k], dv2.d2[k]});

    const double r2a = (g.v2[k] - g.v1[k]) * dg11.d2[k] / g.g11[k];
    const double r2b = (g.v1[k] - g.v2[k]) * dg22.d1[k] / g.g22[k];
    c2a.add(dv1.d2[k] - r2a, {dv1.d2[k], r2a});
    c2b.add(dv2.d1[k] - r2b, {dv2.d1[k], r2b});

    const double t3a = g.phi1[k] * dg11.d1[k] / (2.0 * g.g11[k]);
    const double t3b = g.phi2[k] * dg11.d2[k] / (2.0 * g.g11[k]);
    c3a.add(dp1.d1[k] - t3a - t3b, {dp1.d1[k], t3a, t3b});
    const double t3c = g.phi1[k] * dg22.d1[k] / (2.0 * g.g22[k]);
    const double t3d = g.phi2[k] * dg22.d2[k] / (2.0 * g.g22[k]);
    c3b.add(dp2.d2[k] - t3c - t3d, {dp2.d2[k], t3c, t3d});

    const double sg = sqrt_g(g, k);
    const double lhs = 2.0 * sg * (g.v2[k] - g.v1[k]) * g.B[k];
    const double r4a = g.g22[k] * dp1.d2[k], r4b = g.g11[k] * dp2.d1[k];
    c4.add(lhs - r4a - r4b, {lhs, r4a, r4b});

    const double t5a = g.v1[k] * dh.d1[k], t5b = g.phi2[k] / sg * g.B[k];
    c5a.add(dvp.d1[k] - t5a - t5b, {dvp.d1[k], t5a, t5b});
    const double t5c = g.v2[k] * dh.d2[k], t5d = g.phi1[k] / sg * g.B[k];
    c5b.add(dvp.d2[k] - t5c + t5d, {dvp.d2[k], t5c, t5d});
  });

  ConditionReport r;
  r.n1 = g.n1;
  r.n2 = g.n2;
  r.stencil = stencil;
  r.residual[0] = std::max(c1a.normalized(), c1b.normalized());
  r.residual[1] = std::max(c2a.normalized(), c2b.normalized());
  r.residual[2] = std::max(c3a.normalized(), c3b.normalized());
  r.residual[3] = c4.normalized();
  r.residual[4] = std::max(c5a.normalized(), c5b.normalized());
  const QuantumReport q = check_quantum_c6star(g, stencil);
  r.residual[5] = q.c6_residual;
  r.residual[6] = q.residual;
  r.c6star_correction = q.correction;
  return r;
}

QuantumReport check_quantum_c6star(const AnsatzGrid& g, int stencil) {
  const QuantumParts q = quantum_parts(g, stencil);
  Acc c6, c6s;
  QuantumReport r;
  for_interior(g, stencil, [&](std::size_t k) {
    c6.add(q.classical[k], {q.t1[k], q.t2[k]});
    c6s.add(q.classical[k] + q.correction[k], {q.t1[k], q.t2[k], q.correction[k]});
    if (std::isfinite(q.correction[k])) r.correction = std::max(r.correction, std::abs(q.correction[k]));
  });
  r.residual = c6s.normalized();
  r.c6_residual = c6.normalized();
  return r;
}

std::vector<double> c6star_field(const AnsatzGrid& g, int stencil) {
  QuantumParts q = quantum_parts(g, stencil);
  for (std::size_t k = 0; k < q.classical.size(); ++k) q.classical[k] += q.correction[k];
  return q.classical;
}

std::vector<double> c6star_correction_field(const AnsatzGrid& g, int stencil) {
  return quantum_parts(g, stencil).correction;
}

std::vector<double> consistency_field(const AnsatzGrid& g, int stencil) {
  check_size(g, stencil);
  const auto dB1 = diff(g, g.B, 1, stencil), dB2 = diff(g, g.B, 2, stencil);
  const auto dh1 = diff(g, g.h, 1, stencil), dh2 = diff(g, g.h, 2, stencil);
  const auto dh12 = diff(g, dh2, 1, stencil);
  const auto a = diff(g, g.g11, 2, stencil), b = diff(g, g.g22, 1, stencil);
  std::vector<double> out(g.h.size(), kNaN);
  for_interior(g, stencil, [&](std::size_t k) {
    const double bracket = a[k] / g.g11[k] * dh1[k] + b[k] / g.g22[k] * dh2[k] - dh12[k];
    out[k] = g.phi1[k] * dB1[k] + g.phi2[k] * dB2[k] +
             std::sqrt(g.g11[k] * g.g22[k]) * (g.v2[k] - g.v1[k]) * bracket;
  });
  return out;
}

double check_duality(const AnsatzGrid& g, int stencil_consistency, int stencil_quantum) {
  AnsatzGrid swapped = g;
  std::swap(swapped.h, swapped.B);
  const auto lhs = consistency_field(g, stencil_consistency);
  const auto rhs = c6star_field(swapped, stencil_quantum);
  double worst = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (std::isfinite(lhs[k]) && std::isfinite(rhs[k])) worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
  }
  return worst;
}

double OdeReport::max() const noexcept {
  return std::max({g_case_a, pz[0], pz[1], pz[2], pz_linear, g_relation});
}

namespace {

// Value and first three derivatives of Q^s for a quadratic Q.
struct Jet {
  double v, d1, d2, d3;
};

Jet power_jet(double Q, double Q1, double Q2, double s) {
  const double p = std::pow(Q, s);
  // Q^{s-n} written as p / Q^n to share one pow call.
  return {p, s * p / Q * Q1, s * (s - 1) * p / (Q * Q) * Q1 * Q1 + s * p / Q * Q2,
          s * (s - 1) * (s - 2) * p / (Q * Q * Q) * Q1 * Q1 * Q1 + 3 * s * (s - 1) * p / (Q * Q) * Q1 * Q2};
}

double relative_sum(std::initializer_list<double> terms) {
  double sum = 0.0, scale = 0.0;
  for (double t : terms) {
    sum += t;
    scale = std::max(scale, std::abs(t));
  }
  return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

}  // namespace

OdeReport check_ode_identities(std::span<const double> samples, const std::array<double, 3>& c) {
  OdeReport r;
  for (double q : samples) {
    const double Q = c[0] + c[1] * q + c[2] * q * q;
    if (!(Q > 0.0)) {
      std::ostringstream os;
      os << "quadratic vanishes or is negative at q = " << q;
      throw Error(ErrorCode::SingularSample, os.str());
    }
    const double Q1 = c[1] + 2.0 * c[2] * q, Q2 = 2.0 * c[2];

    const Jet g = power_jet(Q, Q1, Q2, -1.5);
    r.g_case_a = std::max(r.g_case_a, relative_sum({40.0 / 9.0 * g.d1 * g.d1 * g.d1,
                                                   -5.0 * g.v * g.d1 * g.d2, g.v * g.v * g.d3}));
    const auto pz = [&](double n) {
      const Jet y = power_jet(Q, Q1, Q2, 1.0 / n);
      return relative_sum({(n - 1) * (n - 2) * y.d1 * y.d1 * y.d1, 3 * (n - 1) * y.v * y.d1 * y.d2,
                           y.v * y.v * y.d3});
    };
    r.pz[0] = std::max(r.pz[0], pz(-2.0 / 3.0));
    r.pz[1] = std::max(r.pz[1], pz(2.0));
    r.pz[2] = std::max(r.pz[2], pz(3.0));
    r.pz_linear = std::max(r.pz_linear, pz(1.0));
    const Jet s = power_jet(Q, Q1, Q2, 0.5);
    r.g_relation = std::max(r.g_relation, relative_sum({3.0 * s.d1 * s.d2, s.v * s.d3}));
  }
  return r;
}

double check_functional_equation(FunctionalCase fc, double q1, double q2, double coeff) {
  if (q1 == q2) throw Error(ErrorCode::DomainError, "functional equation needs q1 != q2");
  if (fc == FunctionalCase::Sqrt && !(q1 > 0.0 && q2 > 0.0)) {
    throw Error(ErrorCode::DomainError, "sqrt case needs positive arguments");
  }
  struct D {
    double v, d1, d2;
  };
  const auto eval = [&](double q) -> D {
    if (fc == FunctionalCase::Sqrt) {
      const double s = std::sqrt(q);
      return {coeff * s, coeff / (2.0 * s), -coeff / (4.0 * q * s)};
    }
    return {coeff * q * q, 2.0 * coeff * q, 2.0 * coeff};
  };
  const D a = eval(q1), b = eval(q2);
  // With a = b both brackets are Taylor remainders, O((q1 - q2)^2). For close
  // arguments the differenced form cancels, so use the integral remainder
  // \int_{from}^{to} (to - t) a''(t) dt instead.
  const auto remainder = [&](double from, double to) {
    return boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double t) { return (to - t) * eval(t).d2; }, from, to);
  };
  const bool close = std::abs(q1 - q2) < 0.25 * std::max(std::abs(q1), std::abs(q2));
  const double x = close ? remainder(q2, q1) : a.v - b.v - (q1 - q2) * b.d1;
  const double y = close ? remainder(q1, q2) : b.v - a.v + (q1 - q2) * a.d1;
  const double t1 = a.d2 * x * x * x;
  const double t2 = b.d2 * y * y * y;
  const double scale = std::max(std::abs(t1), std::abs(t2));
  return scale > 0.0 ? std::abs(t1 - t2) / scale : 0.0;
}

}  // namespace monopole
