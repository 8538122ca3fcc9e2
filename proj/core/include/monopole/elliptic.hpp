#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "monopole/polyroots.hpp"

namespace monopole {

/// Real inversion of u(x) = weight * \int_{start}^{x} dxi / sqrt(|P(xi)|) on the
/// interval between two adjacent simple roots of P(xi) = lead * prod(xi - r).
///
/// With xi = start + (end - start) sin^2(theta) the integrand becomes the
/// smooth pi-periodic function
///   g(theta) = 2 weight / sqrt(|lead * prod_{other roots}(xi - r)|),
/// so u(theta) = g0 theta + sum_n a_n sin(2 n theta) / (2n). The slice stores
/// the cosine coefficients of g and evaluates the inverse by safeguarded
/// Newton iteration in theta. Q(u) is even with period 2K, Q(0) = start,
/// Q(K) = end.
class EllipticSlice {
 public:
  EllipticSlice() = default;
  EllipticSlice(double start, double end, std::span<const double> other_roots, double lead,
                double weight);

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  /// Quarter-orbit length: u(end).
  double half_period() const noexcept { return half_period_; }
  double period() const noexcept { return 2.0 * half_period_; }

  double value(double u) const;
  /// Q(u) - start, computed without cancellation near the turning point.
  double offset(double u) const;
  double derivative(double u) const;
  /// Q and dQ/du from a single inversion.
  void evaluate(double u, double& q, double& dq) const;

  /// u in [0, K] with value(u) == x. Throws OutOfRange outside [start, end].
  double inverse(double x) const;

  /// \int_0^u Q(s) ds and \int_0^u Q(s)^2 ds, exact up to the series truncation.
  double integral_of_value(double u) const;
  double integral_of_square(double u) const;

  /// Amplitude theta(u); theta(u + 2K m) = theta(u) + pi m.
  double amplitude(double u) const;
  double integrand(double theta) const;
  std::size_t series_length() const noexcept { return g_coeffs_.size(); }

 private:
  double u_of_theta(double theta) const;
  double theta_reduced(double r) const;

  double start_ = 0.0;
  double end_ = 0.0;
  double lead_abs_ = 1.0;
  double weight_ = 1.0;
  std::vector<double> others_;
  double g0_ = 0.0;
  std::vector<double> g_coeffs_;   // sin(2 n theta) coefficients of u(theta) - g0 theta
  double v0_ = 0.0;
  std::vector<double> v_coeffs_;   // same for \int Q g dtheta
  double h0_ = 0.0;
  std::vector<double> h_coeffs_;   // same for \int Q^2 g dtheta
  double half_period_ = 0.0;
};

enum class Slice { Real, Imaginary };

/// The elliptic function of the Case II family, restricted to the real axis
/// (Q1, period 2 K1, range [beta2, beta1]) and the imaginary axis
/// (Q2(u) = Q(i u), period 2 K2, range [beta3, beta2]).
class EllipticModel {
 public:
  EllipticModel(const QuarticParams& params, const RootQuadruple& roots);

  const QuarticParams& params() const noexcept { return params_; }
  const RootQuadruple& roots() const noexcept { return roots_; }
  double beta(int i) const noexcept { return roots_.beta[static_cast<std::size_t>(i - 1)]; }
  double k1() const noexcept { return real_.half_period(); }
  double k2() const noexcept { return imag_.half_period(); }
  double scale() const noexcept { return coefficient_scale(params_); }

  const EllipticSlice& slice(Slice s) const noexcept { return s == Slice::Real ? real_ : imag_; }

  double q1(double u1) const { return real_.value(u1); }
  double q2(double u2) const { return imag_.value(u2); }
  /// dQ1/du1; satisfies 4 dq1^2 = P(q1).
  double dq1(double u1) const { return real_.derivative(u1); }
  /// dQ2/du2 (real derivative); satisfies 4 dq2^2 = -P(q2).
  double dq2(double u2) const { return imag_.derivative(u2); }

  double invert_u(double x, Slice s) const { return slice(s).inverse(x); }

  /// Q1 through Jacobi's dn (even quartics only, a0 == 0):
  ///   Q1(z) = beta2 / dn(sqrt(-a3) beta1 z / 2 ; k'),  k'^2 = 1 - beta2^2/beta1^2.
  double jacobi_special(double z) const;

 private:
  QuarticParams params_;
  RootQuadruple roots_;
  EllipticSlice real_;
  EllipticSlice imag_;
};

/// Requires an admissible quartic; throws InadmissibleParams otherwise.
EllipticModel build_model(const QuarticParams& params);

/// Degenerate family beta1 = beta2 (a3 = -1): Q2 has a closed form and the
/// real period becomes infinite.
class LimitModel {
 public:
  LimitModel(double beta1, double beta3, double beta4);

  double beta1() const noexcept { return beta1_; }
  double beta3() const noexcept { return beta3_; }
  double beta4() const noexcept { return beta4_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }
  double delta() const noexcept { return delta_; }
  /// Decay constant of beta1^2 - Q2^2 in the rescaled coordinate.
  double decay_constant() const noexcept { return 8.0 * beta1_ * c_ / std::sqrt(d_); }

  /// R(xi) = (xi - beta3)(xi - beta4).
  double r(double xi) const noexcept { return (xi - beta3_) * (xi - beta4_); }
  /// P(x) = -(x - beta1)^2 R(x).
  double p(double x) const noexcept { return -(x - beta1_) * (x - beta1_) * r(x); }

  double q2(double u2) const;
  /// beta1 - Q2(u2), positive, free of cancellation.
  double gap(double u2) const;
  double dq2(double u2) const;
  /// The exponential representation; equal to q2 but overflows for large |u2|.
  double q2_exponential(double u2) const;

 private:
  double beta1_, beta3_, beta4_;
  double b_, c_, d_, delta_;
};

}  // namespace monopole
