#include "monopole/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <type_traits>

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "monopole/error.hpp"

namespace monopole {

namespace {

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) on an autonomous system whose last component is the
// physical time t, advancing in an independent variable tau with dt/dtau =
// y[N-1]' (1 for plain time, lambda for the Sundman-regularized flow).

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, double tol, double h0) : rhs_(std::move(rhs)), tol_(tol), h_(h0) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  }

  // Accepts steps until y[N-1] == t_target. `on_accept` may modify y (chart
  // reduction, projection) between steps; if it returns bool, false stops
  // early. Returns whether t_target was reached.
  template <class OnAccept>
  bool advance(Vec<N>& y, double t_target, OnAccept&& on_accept) {
    constexpr std::size_t T = N - 1;
    const double t_eps = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_target));
    int rejections = 0;
    while (std::abs(t_target - y[T]) > t_eps) {
      Vec<N> k1 = rhs_(y);
      const double rate = k1[T];
      if (!(rate > 0.0)) throw Error(ErrorCode::StepRejected, "time rate vanished");
      const double to_go = (t_target - y[T]) / rate;
      const bool last = std::abs(h_) >= std::abs(to_go);
      const double h = last ? to_go : std::copysign(std::abs(h_), to_go);
      Vec<N> y5, err;
      trial(y, k1, h, y5, err);
      double norm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = tol_ * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (!std::isfinite(norm)) norm = 1e10;
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        y = y5;
        if (last && std::abs(t_target - y[T]) <= 1e3 * t_eps) y[T] = t_target;
        // Keep the controller's step when the last step was shortened to land.
        if (!last) h_ = std::abs(h) * factor;
        rejections = 0;
        if constexpr (std::is_same_v<decltype(on_accept(y)), bool>) {
          if (!on_accept(y)) return std::abs(t_target - y[T]) <= t_eps;
        } else {
          on_accept(y);
        }
      } else {
        h_ = std::abs(h) * factor;
        if (++rejections > 200 || h_ < 1e-14) {
          throw Error(ErrorCode::StepRejected, "step size underflow");
        }
      }
    }
    return true;
  }

  double step() const { return h_; }

 private:
  void trial(const Vec<N>& y, const Vec<N>& k1, double h, Vec<N>& y5, Vec<N>& err) {
    Vec<N> tmp, k2, k3, k4, k5, k6, k7;
    const auto stage = [&](std::initializer_list<std::pair<const Vec<N>*, double>> terms) {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (const auto& [k, a] : terms) acc += a * (*k)[i];
        tmp[i] = y[i] + h * acc;
      }
      return rhs_(tmp);
    };
    k2 = stage({{&k1, 1.0 / 5}});
    k3 = stage({{&k1, 3.0 / 40}, {&k2, 9.0 / 40}});
    k4 = stage({{&k1, 44.0 / 45}, {&k2, -56.0 / 15}, {&k3, 32.0 / 9}});
    k5 = stage({{&k1, 19372.0 / 6561}, {&k2, -25360.0 / 2187}, {&k3, 64448.0 / 6561},
                {&k4, -212.0 / 729}});
    k6 = stage({{&k1, 9017.0 / 3168}, {&k2, -355.0 / 33}, {&k3, 46732.0 / 5247},
                {&k4, 49.0 / 176}, {&k5, -5103.0 / 18656}});
    for (std::size_t i = 0; i < N; ++i) {
      y5[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] + 125.0 / 192 * k4[i] -
                          2187.0 / 6784 * k5[i] + 11.0 / 84 * k6[i]);
    }
    k7 = rhs_(y5);
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h * ((35.0 / 384 - 5179.0 / 57600) * k1[i] + (500.0 / 1113 - 7571.0 / 16695) * k3[i] +
                    (125.0 / 192 - 393.0 / 640) * k4[i] + (-2187.0 / 6784 + 92097.0 / 339200) * k5[i] +
                    (11.0 / 84 - 187.0 / 2100) * k6[i] - 1.0 / 40 * k7[i]);
    }
  }

  Rhs rhs_;
  double tol_;
  double h_;
};

template <std::size_t N, class Rhs>
DormandPrince<N, Rhs> make_dp(Rhs rhs, double tol, double h0) {
  return DormandPrince<N, Rhs>(std::move(rhs), tol, h0);
}

double wrap_centered(double x, double period) { return x - period * std::round(x / period); }

double relative(double x, double x0) {
  return std::abs(x - x0) / std::max(std::abs(x0), 1e-300);
}

// ---------------------------------------------------------------------------
// Case II in velocity form, y = (u1, u2, pi1, pi2, t), pi = p - A.

struct TorusLocal {
  double q1, dq1, q2, dq2, diff, sum, lambda;
};

TorusLocal torus_local(const EllipticModel& m, double u1, double u2) {
  TorusLocal l{};
  m.slice(Slice::Real).evaluate(u1, l.q1, l.dq1);
  m.slice(Slice::Imaginary).evaluate(u2, l.q2, l.dq2);
  l.diff = (l.q1 - m.beta(2)) - (l.q2 - m.beta(2));
  l.sum = l.q1 + l.q2;
  l.lambda = l.diff * l.sum;
  return l;
}

struct TorusRhs {
  const SystemSpec* spec;
  Vec<5> operator()(const Vec<5>& y) const {
    const TorusLocal l = torus_local(spec->model(), y[0], y[1]);
    const double pi1 = y[2], pi2 = y[3];
    const double kinetic = l.lambda > 0.0 ? (pi1 * pi1 + pi2 * pi2) / l.lambda : 0.0;
    const double gl1 = 2.0 * l.q1 * l.dq1, gl2 = -2.0 * l.q2 * l.dq2;
    const double s2 = l.sum * l.sum;
    const double gh1 = -spec->mu * l.dq1 / s2, gh2 = -spec->mu * l.dq2 / s2;
    const double bl = 2.0 * spec->B * l.lambda;
    return {2.0 * pi1, 2.0 * pi2, kinetic * gl1 - l.lambda * gh1 + bl * pi2,
            kinetic * gl2 - l.lambda * gh2 - bl * pi1, l.lambda};
  }
};

Vec<5> to_velocity(const SystemSpec& spec, const PhaseState& s, double t) {
  const auto A = gauge_a(spec, {s.u1, s.u2});
  return {s.u1, s.u2, s.p1 - A[0], s.p2 - A[1], t};
}

PhaseState from_velocity(const SystemSpec& spec, const Vec<5>& y) {
  const auto A = gauge_a(spec, {y[0], y[1]});
  return {y[0], y[1], y[2] + A[0], y[3] + A[1]};
}

// Shift into the gauge chart |u1| <= 2K1 and |u2| <= 2K2. pi is gauge
// invariant, so re-anchoring p happens when converting back.
void reduce_torus(const EllipticModel& m, Vec<5>& y) {
  y[0] = wrap_centered(y[0], 4.0 * m.k1());
  y[1] = wrap_centered(y[1], 4.0 * m.k2());
}

// ---------------------------------------------------------------------------
// Limit cylinder, y = (u1, u2, p2, t); p1 is a constant.

struct LimitRhs {
  const SystemSpec* spec;
  double p1;
  Vec<4> operator()(const Vec<4>& y) const {
    const auto& lm = spec->limit_model();
    const double c = lm.c();
    const double gap = lm.gap(y[1]);
    const double q2 = lm.beta1() - gap;
    const double dq2 = lm.dq2(y[1]);
    const double L = gap * (2.0 * lm.beta1() - gap);
    const double dL = -2.0 * q2 * dq2;
    const double A1 = gauge_a(*spec, {y[0], y[1]})[0];
    const double dA1 = spec->B * L / c;
    const double pi1 = p1 - A1;
    const double p2 = y[2];
    const double s = lm.beta1() + q2;
    const double dh = -spec->mu * dq2 / (s * s);
    const double dp2 = c / (4.0 * L * L) * dL * pi1 * pi1 + c / (2.0 * L) * pi1 * dA1 +
                       p2 * p2 * dL / (L * L) - dh;
    return {c * pi1 / (2.0 * L), 2.0 * p2 / L, dp2, 1.0};
  }
};

// ---------------------------------------------------------------------------
// e(3)* systems with gradients from forward-mode automatic differentiation.

using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 6, 1>>;

template <class T>
std::array<T, 2> clebsch_hf(const std::array<double, 3>& a, double mu, const std::array<T, 3>& M,
                            const std::array<T, 3>& x) {
  const T H = M[0] * M[0] + M[1] * M[1] + M[2] * M[2] -
              mu * (a[0] * x[0] * x[0] + a[1] * x[1] * x[1] + a[2] * x[2] * x[2]);
  const T F = a[0] * M[0] * M[0] + a[1] * M[1] * M[1] + a[2] * M[2] * M[2] +
              mu * (a[1] * a[2] * x[0] * x[0] + a[0] * a[2] * x[1] * x[1] + a[0] * a[1] * x[2] * x[2]);
  return {H, F};
}

template <class T>
std::array<T, 2> vy_hf(double A, double B, double mu, const std::array<T, 3>& M,
                       const std::array<T, 3>& q) {
  using std::sqrt;
  const double sab = std::sqrt(A * B);
  const T nq = sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
  // Sum of squares: the expanded quadratic form cancels catastrophically near a centre.
  const T l2 = std::sqrt(B) * nq - std::sqrt(A) * q[2];
  const T R = (A - B) * q[1] * q[1] + l2 * l2;
  if (!(R > 1e-14 * (A + B) * nq * nq)) {
    throw Error(ErrorCode::CenterSingularity, "R(q) vanishes at a Coulomb centre");
  }
  const T sR = sqrt(R);
  const T Mq = M[0] * q[0] + M[1] * q[1] + M[2] * q[2];
  const T H = 0.5 * (M[0] * M[0] + M[1] * M[1] + M[2] * M[2]) - mu * nq / sR;
  const T F = A * M[0] * M[0] + B * M[1] * M[1] + (2.0 * sab / nq) * Mq * M[2] -
              2.0 * mu * sab * q[2] / sR;
  return {H, F};
}

template <class T>
std::array<T, 2> e3_hf(const SystemSpec& spec, const std::array<T, 3>& M, const std::array<T, 3>& x) {
  if (spec.family == Family::CaseI) return clebsch_hf(spec.geometry_i().constants().alpha, spec.mu, M, x);
  if (spec.family == Family::VY) return vy_hf(spec.vyA, spec.vyB, spec.mu, M, x);
  throw Error(ErrorCode::InvalidArgument, "e(3)* flow needs a Case I or VY system");
}

struct E3Rhs {
  const SystemSpec* spec;
  Vec<7> operator()(const Vec<7>& y) const {
    std::array<AD, 3> M, x;
    for (int i = 0; i < 3; ++i) {
      M[i] = AD(y[i], 6, i);
      x[i] = AD(y[3 + i], 6, 3 + i);
    }
    const auto hf = e3_hf(*spec, M, x);
    const auto& g = hf[0].derivatives();
    const std::array<double, 3> gm{g[0], g[1], g[2]}, gx{g[3], g[4], g[5]};
    const std::array<double, 3> m{y[0], y[1], y[2]}, q{y[3], y[4], y[5]};
    const auto cross = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
      return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                   a[0] * b[1] - a[1] * b[0]};
    };
    const auto a1 = cross(gm, m), a2 = cross(gx, q), b1 = cross(gm, q);
    return {a1[0] + a2[0], a1[1] + a2[1], a1[2] + a2[2], b1[0], b1[1], b1[2], 1.0};
  }
};

void project_leaf(Vec<7>& y, double c1, double c2) {
  const double n = std::sqrt(y[3] * y[3] + y[4] * y[4] + y[5] * y[5]);
  const double scale = std::sqrt(c1) / n;
  for (int i = 3; i < 6; ++i) y[i] *= scale;
  const double mx = y[0] * y[3] + y[1] * y[4] + y[2] * y[5];
  const double shift = (c2 - mx) / c1;
  for (int i = 0; i < 3; ++i) y[i] += shift * y[3 + i];
}

double initial_step(double dt) { return std::min(std::abs(dt), 1e-2); }

// ---------------------------------------------------------------------------
// VY close to a Coulomb centre c. Stereographic chart z = xi + i eta from -c,
// Levi-Civita map z = w^2 and dt = |z| dtau. On the unit sphere
//   R = 4|z|^2 S / (1+|z|^2)^2,  S = (A-B) + 2s sqrt(B(A-B)) xi + B|z|^2,
// so |w|^2 (H - E) is smooth through the collision. y = (u, v, Pu, Pv, t).

using AD4 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 4, 1>>;

using R3 = std::array<double, 3>;

R3 cross3(const R3& a, const R3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const R3& a, const R3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct VyChart {
  double A, B, mu;
  double s;           // +1 or -1, sign of x1 at the centre
  double radius;      // |x| (the leaf C1 = radius^2)
  double nu;          // (M, x/|x|)
  double energy = 0.0;
  R3 c, e1, e2;       // e1 x e2 = c

  VyChart(const SystemSpec& spec, double sign, double c1, double c2)
      : A(spec.vyA), B(spec.vyB), mu(spec.mu), s(sign), radius(std::sqrt(c1)), nu(c2 / radius) {
    c = {s * std::sqrt(1.0 - B / A), 0.0, std::sqrt(B / A)};
    e2 = {0.0, 1.0, 0.0};
    e1 = cross3(e2, c);
  }

  template <class T>
  T hamiltonian(const T& u, const T& v, const T& pu, const T& pv) const {
    using std::sqrt;
    const T w2 = u * u + v * v;
    const T xi = u * u - v * v, eta = 2.0 * u * v;
    const T r2 = w2 * w2;
    const T d = 1.0 + r2;
    // Monopole gauge a = 2 nu (eta, -xi) / (1+|z|^2), pulled back by J^T.
    const T ax = 2.0 * nu * eta / d, ay = -2.0 * nu * xi / d;
    const T qu = pu - 2.0 * (u * ax + v * ay), qv = pv - 2.0 * (u * ay - v * ax);
    const T S = (A - B) + 2.0 * s * std::sqrt(B * (A - B)) * xi + B * r2;
    return (qu * qu + qv * qv) * d * d / 32.0 + (0.5 * nu * nu - energy) * w2 - 0.5 * mu * d / sqrt(S);
  }

  R3 point(double xi, double eta, R3* dxi, R3* deta) const {
    const double d = 1.0 + xi * xi + eta * eta;
    R3 x;
    for (int i = 0; i < 3; ++i) x[i] = ((2.0 - d) * c[i] + 2.0 * xi * e1[i] + 2.0 * eta * e2[i]) / d;
    for (int i = 0; i < 3; ++i) {
      (*dxi)[i] = 2.0 / d * (e1[i] - xi * (c[i] + x[i]));
      (*deta)[i] = 2.0 / d * (e2[i] - eta * (c[i] + x[i]));
    }
    return x;
  }

  Vec<5> enter(const E3State& st, double t) {
    energy = vy_hf(A, B, mu, st.M, st.x)[0];
    R3 xh = st.x;
    for (double& v : xh) v /= radius;
    const double den = 1.0 + dot3(xh, c);
    const double xi = dot3(xh, e1) / den, eta = dot3(xh, e2) / den;
    R3 dxi, deta;
    point(xi, eta, &dxi, &deta);
    const R3 k = cross3(st.M, xh);
    const double d = 1.0 + xi * xi + eta * eta;
    const double p1 = dot3(k, dxi) + 2.0 * nu * eta / d, p2 = dot3(k, deta) - 2.0 * nu * xi / d;
    const std::complex<double> w = std::sqrt(std::complex<double>(xi, eta));
    const double u = w.real(), v = w.imag();
    return {u, v, 2.0 * (u * p1 + v * p2), 2.0 * (u * p2 - v * p1), t};
  }

  E3State leave(const Vec<5>& y) const {
    const double u = y[0], v = y[1], w2 = u * u + v * v;
    const double xi = u * u - v * v, eta = 2.0 * u * v;
    const double p1 = (u * y[2] - v * y[3]) / (2.0 * w2), p2 = (v * y[2] + u * y[3]) / (2.0 * w2);
    R3 dxi, deta;
    const R3 xh = point(xi, eta, &dxi, &deta);
    const double d = 1.0 + xi * xi + eta * eta;
    const double sig2 = 4.0 / (d * d);
    const double z1 = (p1 - 2.0 * nu * eta / d) / sig2, z2 = (p2 + 2.0 * nu * xi / d) / sig2;
    R3 k;
    for (int i = 0; i < 3; ++i) k[i] = z1 * dxi[i] + z2 * deta[i];
    const R3 xk = cross3(xh, k);
    E3State st;
    for (int i = 0; i < 3; ++i) {
      st.M[i] = xk[i] + nu * xh[i];
      st.x[i] = radius * xh[i];
    }
    return st;
  }
};

struct VyChartRhs {
  const VyChart* ch;
  Vec<5> operator()(const Vec<5>& y) const {
    const AD4 K = ch->hamiltonian(AD4(y[0], 4, 0), AD4(y[1], 4, 1), AD4(y[2], 4, 2), AD4(y[3], 4, 3));
    const auto& g = K.derivatives();
    return {g[2], g[3], -g[0], -g[1], y[0] * y[0] + y[1] * y[1]};
  }
};

// Chart radii: enter below r_in, leave above r_out; both well inside half the
// distance to the other centre, which sits at |z| = sqrt((A-B)/B).
struct ChartRadii {
  double r_in, r_out;
};

ChartRadii chart_radii(const SystemSpec& spec) {
  const double r_out = std::min(0.25, 0.35 * std::sqrt((spec.vyA - spec.vyB) / spec.vyB));
  return {0.6 * r_out, r_out};
}

// Nearest VY centre to x (sign of x1) and its chart distance.
std::pair<double, double> nearest_centre(const SystemSpec& spec, const E3State& st, double radius) {
  const double sign = st.x[0] >= 0.0 ? 1.0 : -1.0;
  const double A = spec.vyA, B = spec.vyB;
  const R3 c{sign * std::sqrt(1.0 - B / A), 0.0, std::sqrt(B / A)};
  const double cs = std::clamp(dot3(st.x, c) / radius, -1.0, 1.0);
  return {sign, std::sqrt((1.0 - cs) / (1.0 + cs))};
}

// Flow of a Case I or VY state from t = 0 to t_end, calling on_step(t, state)
// after every accepted step. VY passes close to a centre in the regularized
// chart; everything else in Lie-Poisson form projected onto the leaf.
template <class OnStep>
E3State integrate_e3(const SystemSpec& spec, E3State st, double t_end, double tol, OnStep&& on_step) {
  const auto cas = casimirs(st);
  const bool vy = spec.family == Family::VY;
  const double radius = std::sqrt(cas[0]);
  const ChartRadii rr = vy ? chart_radii(spec) : ChartRadii{0.0, 0.0};
  double t = 0.0, h_free = initial_step(t_end), h_chart = 1e-3;
  while (t < t_end) {
    const auto [sign, dist] = vy ? nearest_centre(spec, st, radius) : std::pair{1.0, 1.0};
    if (vy && dist < rr.r_in) {
      VyChart ch(spec, sign, cas[0], cas[1]);
      Vec<5> y = ch.enter(st, t);
      auto dp = make_dp<5>(VyChartRhs{&ch}, tol, h_chart);
      dp.advance(y, t_end, [&](Vec<5>& v) {
        st = ch.leave(v);
        on_step(v[4], st);
        return v[0] * v[0] + v[1] * v[1] < rr.r_out;
      });
      h_chart = dp.step();
      t = y[4];
    } else {
      Vec<7> y{st.M[0], st.M[1], st.M[2], st.x[0], st.x[1], st.x[2], t};
      auto dp = make_dp<7>(E3Rhs{&spec}, tol, h_free);
      dp.advance(y, t_end, [&](Vec<7>& v) {
        project_leaf(v, cas[0], cas[1]);
        st = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
        on_step(v[6], st);
        return !vy || nearest_centre(spec, st, radius).second >= rr.r_in;
      });
      h_free = dp.step();
      t = y[6];
    }
  }
  return st;
}

}  // namespace

// ---------------------------------------------------------------------------

double h_eval(const SystemSpec& spec, const PhaseState& s) {
  if (spec.family == Family::CaseIILimit) {
    const auto& lm = spec.limit_model();
    const double gap = lm.gap(s.u2);
    const double L = gap * (2.0 * lm.beta1() - gap);
    const double pi1 = s.p1 - gauge_a(spec, {s.u1, s.u2})[0];
    return lm.c() / (4.0 * L) * pi1 * pi1 + s.p2 * s.p2 / L + electric_h(spec, s.u1, s.u2);
  }
  const auto& m = spec.model();
  const TorusLocal l = torus_local(m, s.u1, s.u2);
  if (!(l.lambda > 1e-14 * m.scale())) {
    throw Error(ErrorCode::FixedPointSingularity, "H evaluated at a torus fixed point");
  }
  const auto A = gauge_a(spec, {s.u1, s.u2});
  const double pi1 = s.p1 - A[0], pi2 = s.p2 - A[1];
  return (pi1 * pi1 + pi2 * pi2) / l.lambda + spec.mu / l.sum;
}

double f_eval(const SystemSpec& spec, const PhaseState& s) {
  if (spec.family == Family::CaseIILimit) return s.p1;
  const auto& m = spec.model();
  const TorusLocal l = torus_local(m, s.u1, s.u2);
  if (!(l.lambda > 1e-14 * m.scale())) {
    throw Error(ErrorCode::FixedPointSingularity, "F evaluated at a torus fixed point");
  }
  const auto A = gauge_a(spec, {s.u1, s.u2});
  const double pi1 = s.p1 - A[0], pi2 = s.p2 - A[1];
  const double phi1 = 2.0 * spec.k * l.dq2 / l.diff;
  const double phi2 = -2.0 * spec.k * l.dq1 / l.diff;
  return (l.q2 * l.q2 * pi1 * pi1 + l.q1 * l.q1 * pi2 * pi2) / l.lambda + phi1 * pi1 + phi2 * pi2 -
         spec.mu * l.q1 * l.q2 / l.sum - spec.k * spec.B * l.sum * l.sum;
}

double f_eval_stackel(const SystemSpec& spec, const PhaseState& s) {
  const auto& m = spec.model();
  const TorusLocal l = torus_local(m, s.u1, s.u2);
  const double j1 = 2.0 * l.q1 * l.dq1, j2 = 2.0 * l.q2 * l.dq2;  // dq_i / du_i
  if (j1 == 0.0 || j2 == 0.0) throw Error(ErrorCode::DegeneratePoint, "turning point of the q chart");
  const auto A = gauge_a(spec, {s.u1, s.u2});
  const double pi1 = (s.p1 - A[0]) / j1, pi2 = (s.p2 - A[1]) / j2;
  const double q1 = l.q1 * l.q1, q2 = l.q2 * l.q2;
  const double f1 = case_ii_stackel_f(m.params(), q1), f2 = case_ii_stackel_f(m.params(), q2);
  const auto phi = phi_components_stackel(spec, q1, q2);
  const double r1 = std::sqrt(q1), r2 = std::sqrt(q2);
  const double vphi = -spec.mu * r1 * r2 / (r1 + r2) - spec.k * spec.B * (r1 + r2) * (r1 + r2);
  return f1 / (q1 - q2) * q2 * pi1 * pi1 + f2 / (q2 - q1) * q1 * pi2 * pi2 + phi[0] * pi1 +
         phi[1] * pi2 + vphi;
}

std::array<double, 2> clebsch_eval(const SystemSpec& spec, const E3State& s) {
  return clebsch_hf(spec.geometry_i().constants().alpha, spec.mu, s.M, s.x);
}

std::array<double, 2> vy_eval(const SystemSpec& spec, const E3State& s) {
  if (spec.family != Family::VY) throw Error(ErrorCode::InvalidArgument, "not a VY system");
  return vy_hf(spec.vyA, spec.vyB, spec.mu, s.M, s.x);
}

std::array<double, 2> e3_eval(const SystemSpec& spec, const E3State& s) {
  return e3_hf(spec, s.M, s.x);
}

std::array<double, 2> casimirs(const E3State& s) noexcept {
  return {s.x[0] * s.x[0] + s.x[1] * s.x[1] + s.x[2] * s.x[2],
          s.M[0] * s.x[0] + s.M[1] * s.x[1] + s.M[2] * s.x[2]};
}

PhaseState limit_system_step(const SystemSpec& spec, const PhaseState& s, double dt, double tol) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  Vec<4> y{s.u1, s.u2, s.p2, 0.0};
  auto dp = make_dp<4>(LimitRhs{&spec, s.p1}, tol, initial_step(dt));
  dp.advance(y, dt, [](Vec<4>&) {});
  return {y[0], y[1], s.p1, y[2]};
}

PhaseState flow_step(const SystemSpec& spec, const PhaseState& s, double dt, double tol) {
  if (spec.family == Family::CaseIILimit) return limit_system_step(spec, s, dt, tol);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const auto& m = spec.model();
  Vec<5> y = to_velocity(spec, s, 0.0);
  auto dp = make_dp<5>(TorusRhs{&spec}, tol, initial_step(dt));
  dp.advance(y, dt, [&](Vec<5>& v) { reduce_torus(m, v); });
  return from_velocity(spec, y);
}

E3State e3_flow_step(const SystemSpec& spec, const E3State& s, double dt, double tol) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  e3_hf(spec, s.M, s.x);  // rejects other families and states on a centre
  return integrate_e3(spec, s, dt, tol, [](double, const E3State&) {});
}

Trajectory<PhaseState> simulate_phase(const SystemSpec& spec, const PhaseState& s0, double t_end,
                                      double tol, int stride) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  stride = std::max(stride, 1);
  Trajectory<PhaseState> tr;
  const double H0 = h_eval(spec, s0), F0 = f_eval(spec, s0);
  const auto record = [&](double t, const PhaseState& st, double H, double F) {
    tr.times.push_back(t);
    tr.states.push_back(st);
    tr.H.push_back(H);
    tr.F.push_back(F);
  };
  record(0.0, s0, H0, F0);
  const auto monitor = [&](double t, const PhaseState& st) {
    const double H = h_eval(spec, st), F = f_eval(spec, st);
    tr.max_drift_H = std::max(tr.max_drift_H, relative(H, H0));
    tr.max_drift_F = std::max(tr.max_drift_F, relative(F, F0));
    ++tr.accepted_steps;
    if (tr.accepted_steps % static_cast<std::size_t>(stride) == 0 || t == t_end) record(t, st, H, F);
  };
  if (spec.family == Family::CaseIILimit) {
    const double p1 = s0.p1;
    Vec<4> y{s0.u1, s0.u2, s0.p2, 0.0};
    auto dp = make_dp<4>(LimitRhs{&spec, p1}, tol, initial_step(t_end));
    dp.advance(y, t_end, [&](Vec<4>& v) { monitor(v[3], {v[0], v[1], p1, v[2]}); });
  } else {
    const auto& m = spec.model();
    Vec<5> y = to_velocity(spec, s0, 0.0);
    auto dp = make_dp<5>(TorusRhs{&spec}, tol, initial_step(t_end));
    dp.advance(y, t_end, [&](Vec<5>& v) {
      reduce_torus(m, v);
      monitor(v[4], from_velocity(spec, v));
    });
  }
  if (tr.times.back() != t_end) {
    // The end point is recorded by the stride rule only when it lands on it.
    record(t_end, tr.states.back(), tr.H.back(), tr.F.back());
  }
  return tr;
}

Trajectory<E3State> simulate_e3(const SystemSpec& spec, const E3State& s0, double t_end, double tol,
                                int stride) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  stride = std::max(stride, 1);
  Trajectory<E3State> tr;
  const auto hf0 = e3_eval(spec, s0);
  const auto c0 = casimirs(s0);
  const auto record = [&](double t, const E3State& st, const std::array<double, 2>& hf,
                          const std::array<double, 2>& c) {
    tr.times.push_back(t);
    tr.states.push_back(st);
    tr.H.push_back(hf[0]);
    tr.F.push_back(hf[1]);
    tr.C1.push_back(c[0]);
    tr.C2.push_back(c[1]);
  };
  record(0.0, s0, hf0, c0);
  integrate_e3(spec, s0, t_end, tol, [&](double t, const E3State& st) {
    const auto hf = e3_eval(spec, st);
    const auto c = casimirs(st);
    tr.max_drift_H = std::max(tr.max_drift_H, relative(hf[0], hf0[0]));
    tr.max_drift_F = std::max(tr.max_drift_F, relative(hf[1], hf0[1]));
    tr.max_drift_casimir =
        std::max({tr.max_drift_casimir, std::abs(c[0] - c0[0]), std::abs(c[1] - c0[1])});
    ++tr.accepted_steps;
    if (tr.accepted_steps % static_cast<std::size_t>(stride) == 0 || t == t_end) record(t, st, hf, c);
  });
  if (tr.times.back() != t_end) {
    record(t_end, tr.states.back(), {tr.H.back(), tr.F.back()}, {tr.C1.back(), tr.C2.back()});
  }
  return tr;
}

namespace {

template <class State, class Fn, class Shift>
double fd_partial(const Fn& f, const State& s, double h, Shift shift) {
  const auto d = [&](double step) { return (f(shift(s, step)) - f(shift(s, -step))) / (2.0 * step); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

}  // namespace

BracketResult poisson_bracket_fd(const PhaseFunction& a, const PhaseFunction& b,
                                 const PhaseState& s, double h) {
  std::array<double, 4> ga{}, gb{};
  for (int i = 0; i < 4; ++i) {
    const auto shift = [i](PhaseState st, double d) {
      double* c[4] = {&st.u1, &st.u2, &st.p1, &st.p2};
      *c[i] += d;
      return st;
    };
    ga[i] = fd_partial(a, s, h, shift);
    gb[i] = fd_partial(b, s, h, shift);
  }
  BracketResult r;
  for (int i = 0; i < 2; ++i) {
    r.value += ga[i] * gb[2 + i] - ga[2 + i] * gb[i];
    r.scale += std::abs(ga[i] * gb[2 + i]) + std::abs(ga[2 + i] * gb[i]);
  }
  return r;
}

BracketResult lie_poisson_bracket(const E3Function& a, const E3Function& b, const E3State& s,
                                  double h) {
  std::array<double, 6> ga{}, gb{};
  for (int i = 0; i < 6; ++i) {
    const auto shift = [i](E3State st, double d) {
      if (i < 3) st.M[i] += d; else st.x[i - 3] += d;
      return st;
    };
    ga[i] = fd_partial(a, s, h, shift);
    gb[i] = fd_partial(b, s, h, shift);
  }
  // Triple products v . (p x q), accumulating |terms| for the scale.
  BracketResult r;
  const auto triple = [&r](const std::array<double, 3>& v, const double* p, const double* q) {
    const double t[6] = {v[0] * p[1] * q[2], -v[0] * p[2] * q[1], v[1] * p[2] * q[0],
                         -v[1] * p[0] * q[2], v[2] * p[0] * q[1], -v[2] * p[1] * q[0]};
    for (double x : t) {
      r.value += x;
      r.scale += std::abs(x);
    }
  };
  triple(s.M, ga.data(), gb.data());
  triple(s.x, ga.data(), gb.data() + 3);
  triple(s.x, ga.data() + 3, gb.data());
  return r;
}

PhaseState random_phase_state(const SystemSpec& spec, Rng& rng) {
  if (spec.family == Family::CaseIILimit) {
    const auto& lm = spec.limit_model();
    PhaseState s{rng.uniform(-5.0, 5.0), lm.delta() + rng.uniform(-3.0, 3.0), 0.0,
                 rng.uniform(-1.0, 1.0)};
    s.p1 = gauge_a(spec, {s.u1, s.u2})[0] + rng.uniform(-1.0, 1.0);
    return s;
  }
  const auto& m = spec.model();
  const double lmax = m.beta(1) * m.beta(1) - m.beta(3) * m.beta(3);
  for (;;) {
    const double u1 = rng.uniform(-2.0, 2.0) * m.k1();
    const double u2 = rng.uniform(-2.0, 2.0) * m.k2();
    const double pi1 = rng.uniform(-1.0, 1.0), pi2 = rng.uniform(-1.0, 1.0);
    if (torus_metric(m, {u1, u2}).lambda < 0.05 * lmax) continue;
    const auto A = gauge_a(spec, {u1, u2});
    return {u1, u2, pi1 + A[0], pi2 + A[1]};
  }
}

E3State random_e3_state(const SystemSpec& spec, Rng& rng) {
  for (;;) {
    const double z = rng.uniform(-1.0, 1.0);
    const double ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(1.0 - z * z);
    E3State s;
    s.x = {r * std::cos(ph), r * std::sin(ph), z};
    if (spec.family == Family::VY) {
      const double A = spec.vyA, B = spec.vyB;
      const auto& q = s.x;
      const double R = A * q[1] * q[1] + B * q[0] * q[0] + (A + B) * q[2] * q[2] -
                       2.0 * std::sqrt(A * B) * q[2];
      if (R < 0.05 * (A + B)) continue;
    }
    for (auto& mi : s.M) mi = rng.uniform(-1.0, 1.0);
    const double shift = spec.B - casimirs(s)[1];
    for (int i = 0; i < 3; ++i) s.M[i] += shift * s.x[i];
    return s;
  }
}

}  // namespace monopole
