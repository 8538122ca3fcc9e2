#include "monopole/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include "monopole/error.hpp"

namespace monopole {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMinSamples = 64;
constexpr std::size_t kMaxSamples = 16384;

// sum_{n>=1} coeffs[n-1] sin(n x) by Clenshaw recurrence.
double sine_series(const std::vector<double>& coeffs, double x) noexcept {
  const double alpha = 2.0 * std::cos(x);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    const double y0 = coeffs[k] + alpha * y1 - y2;
    y2 = y1;
    y1 = y0;
  }
  return y1 * std::sin(x);
}

// Integrates a pi-periodic even function f(theta) term by term:
//   \int_0^theta f = mean * theta + sum_n coeffs[n-1] sin(2 n theta).
// Sample count doubles until the tail of the cosine spectrum is negligible.
template <class F>
void antiderivative_series(F&& f, double& mean, std::vector<double>& coeffs) {
  std::vector<double> samples;
  std::vector<double> table;
  for (std::size_t n = kMinSamples;; n *= 2) {
    samples.resize(n);
    table.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      samples[j] = f(kPi * static_cast<double>(j) / static_cast<double>(n));
      table[j] = std::cos(2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
    }
    double sum = 0.0;
    for (double s : samples) sum += s;
    mean = sum / static_cast<double>(n);

    const std::size_t modes = n / 2 - 1;
    coeffs.assign(modes, 0.0);
    double tail = 0.0;
    for (std::size_t k = 1; k <= modes; ++k) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) a += samples[j] * table[(k * j) % n];
      a *= 2.0 / static_cast<double>(n);
      coeffs[k - 1] = a / (2.0 * static_cast<double>(k));
      if (k > modes / 2) tail = std::max(tail, std::abs(a));
    }
    if (tail <= 4e-16 * std::abs(mean) || n >= kMaxSamples) break;
  }
  // Drop the trailing modes that sit at the rounding floor of the samples.
  const double cutoff = 1e-17 * std::abs(mean);
  while (!coeffs.empty() &&
         std::abs(coeffs.back()) * 2.0 * static_cast<double>(coeffs.size()) < cutoff) {
    coeffs.pop_back();
  }
}

}  // namespace

EllipticSlice::EllipticSlice(double start, double end, std::span<const double> other_roots,
                             double lead, double weight)
    : start_(start),
      end_(end),
      lead_abs_(std::abs(lead)),
      weight_(weight),
      others_(other_roots.begin(), other_roots.end()) {
  if (!(start != end) || lead == 0.0 || !(weight > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "degenerate elliptic slice");
  }
  const double lo = std::min(start, end), hi = std::max(start, end);
  for (double r : others_) {
    if (r > lo && r < hi) throw Error(ErrorCode::InvalidArgument, "root inside slice interval");
  }
  antiderivative_series([this](double th) { return integrand(th); }, g0_, g_coeffs_);
  const auto q_of = [this](double th) {
    const double s = std::sin(th);
    return start_ + (end_ - start_) * s * s;
  };
  antiderivative_series([&](double th) { return q_of(th) * integrand(th); }, v0_, v_coeffs_);
  antiderivative_series([&](double th) { return q_of(th) * q_of(th) * integrand(th); }, h0_,
                        h_coeffs_);
  half_period_ = g0_ * kPi / 2.0;
}

double EllipticSlice::integrand(double theta) const {
  const double s = std::sin(theta);
  const double xi = start_ + (end_ - start_) * s * s;
  double prod = lead_abs_;
  for (double r : others_) prod *= std::abs(xi - r);
  return 2.0 * weight_ / std::sqrt(prod);
}

double EllipticSlice::u_of_theta(double theta) const {
  return g0_ * theta + sine_series(g_coeffs_, 2.0 * theta);
}

double EllipticSlice::theta_reduced(double r) const {
  // u(theta) is increasing on [-pi/2, pi/2] and maps it onto [-K, K].
  double lo = -kPi / 2.0, hi = kPi / 2.0;
  double th = std::clamp(r / g0_, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double f = u_of_theta(th) - r;
    if (f > 0.0) hi = th; else lo = th;
    double next = th - f / integrand(th);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - th);
    th = next;
    if (step <= 4e-16 * std::max(std::abs(th), 1e-300) || hi - lo <= 1e-300) break;
  }
  return th;
}

double EllipticSlice::amplitude(double u) const {
  const double m = std::round(u / period());
  const double r = u - m * period();
  return theta_reduced(r) + m * kPi;
}

double EllipticSlice::offset(double u) const {
  const double m = std::round(u / period());
  const double s = std::sin(theta_reduced(u - m * period()));
  return (end_ - start_) * s * s;
}

double EllipticSlice::value(double u) const { return start_ + offset(u); }

double EllipticSlice::derivative(double u) const {
  const double m = std::round(u / period());
  const double th = theta_reduced(u - m * period());
  return (end_ - start_) * std::sin(2.0 * th) / integrand(th);
}

void EllipticSlice::evaluate(double u, double& q, double& dq) const {
  const double m = std::round(u / period());
  const double th = theta_reduced(u - m * period());
  const double s = std::sin(th);
  q = start_ + (end_ - start_) * s * s;
  dq = (end_ - start_) * std::sin(2.0 * th) / integrand(th);
}

double EllipticSlice::inverse(double x) const {
  double t = (x - start_) / (end_ - start_);
  constexpr double slack = 1e-12;
  if (!(t >= -slack && t <= 1.0 + slack)) {
    std::ostringstream os;
    os << "x=" << x << " outside [" << std::min(start_, end_) << ", " << std::max(start_, end_) << "]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  t = std::clamp(t, 0.0, 1.0);
  return u_of_theta(std::asin(std::sqrt(t)));
}

double EllipticSlice::integral_of_value(double u) const {
  const double th = amplitude(u);
  return v0_ * th + sine_series(v_coeffs_, 2.0 * th);
}

double EllipticSlice::integral_of_square(double u) const {
  const double th = amplitude(u);
  return h0_ * th + sine_series(h_coeffs_, 2.0 * th);
}

EllipticModel::EllipticModel(const QuarticParams& params, const RootQuadruple& roots)
    : params_(params), roots_(roots) {
  const auto& b = roots_.beta;
  const double real_others[] = {b[2], b[3]};
  const double imag_others[] = {b[0], b[3]};
  real_ = EllipticSlice(b[1], b[0], real_others, params_.a3, 2.0);
  imag_ = EllipticSlice(b[1], b[2], imag_others, params_.a3, 2.0);
}

double EllipticModel::jacobi_special(double z) const {
  if (std::abs(params_.a0) > 1e-12 * scale()) {
    throw Error(ErrorCode::NotEvenQuartic, "jacobi_special needs a0 == 0");
  }
  const double b1 = beta(1), b2 = beta(2);
  const double kc = std::sqrt(1.0 - (b2 * b2) / (b1 * b1));
  const double alpha = std::sqrt(-params_.a3) * b1 / 2.0;
  // boost's dn is inaccurate within ~1e-8 of K (and visibly wrong at K itself),
  // so reduce to [0, K/2] with dn even, 2K-periodic and dn(K - t) = k'/dn(t).
  const double K = boost::math::ellint_1(kc);
  const double r = std::abs(std::remainder(alpha * z, 2.0 * K));
  if (r <= 0.5 * K) return b2 / boost::math::jacobi_dn(kc, r);
  return b1 * boost::math::jacobi_dn(kc, K - r);  // k' = b2 / b1
}

EllipticModel build_model(const QuarticParams& params) {
  // The model only needs a3 < 0 and four distinct real roots; the root
  // inequalities are checked with a boundary tolerance so that the symmetric
  // even quartics (beta1 + beta4 == 0) remain usable.
  const AdmissibilityReport rep = admissibility(params);
  bool ok = params.a3 < 0.0 && rep.four_distinct_real_roots;
  RootQuadruple roots;
  if (ok) {
    roots = real_roots(params);
    const auto& b = roots.beta;
    const double tol = 1e-12 * std::max(std::abs(b[0]), std::abs(b[3]));
    ok = b[0] + b[3] <= tol && b[1] + b[2] >= -tol;
  }
  if (!ok) {
    std::ostringstream os;
    os << "quartic (a3=" << params.a3 << ", a2=" << params.a2 << ", a0=" << params.a0
       << ", a1=" << params.a1 << ") is not admissible";
    throw Error(ErrorCode::InadmissibleParams, os.str());
  }
  return EllipticModel(params, roots);
}

LimitModel::LimitModel(double beta1, double beta3, double beta4)
    : beta1_(beta1), beta3_(beta3), beta4_(beta4) {
  const double mag = std::max({std::abs(beta1), std::abs(beta3), std::abs(beta4)});
  if (std::abs(2.0 * beta1 + beta3 + beta4) > 1e-10 * mag) {
    throw Error(ErrorCode::NonZeroRootSum, "2 beta1 + beta3 + beta4 must vanish");
  }
  if (!(beta1 > beta3 && beta3 > beta4)) {
    throw Error(ErrorCode::InvalidArgument, "limit roots must satisfy beta1 > beta3 > beta4");
  }
  b_ = 2.0 * beta1 - beta3 - beta4;
  c_ = (beta1 - beta3) * (beta1 - beta4);
  d_ = b_ * b_ - 4.0 * c_;
  if (!(b_ > 0.0 && c_ > 0.0 && d_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "limit model requires b > 0, c > 0, b^2 - 4c > 0");
  }
  delta_ = std::log(d_) / std::sqrt(c_);
}

double LimitModel::gap(double u2) const {
  const double s = 0.5 * std::sqrt(c_) * (u2 - delta_);
  return 2.0 * c_ / (std::sqrt(d_) * std::cosh(s) + b_);
}

double LimitModel::q2(double u2) const { return beta1_ - gap(u2); }

double LimitModel::dq2(double u2) const {
  const double s = 0.5 * std::sqrt(c_) * (u2 - delta_);
  const double den = std::sqrt(d_) * std::cosh(s) + b_;
  return c_ * std::sqrt(c_) * std::sqrt(d_) * std::sinh(s) / (den * den);
}

double LimitModel::q2_exponential(double u2) const {
  const double e = std::exp(0.5 * std::sqrt(c_) * u2);
  return beta1_ - 4.0 * c_ * e / ((b_ + e) * (b_ + e) - 4.0 * c_);
}

}  // namespace monopole
