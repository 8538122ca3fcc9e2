#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "monopole/fields.hpp"

namespace monopole {

/// Canonical coordinates on T*T^2 (Case II) or on the cylinder (limit).
/// Momenta are anchored to the gauge chart that contains (u1, u2).
struct PhaseState {
  double u1 = 0.0;
  double u2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

/// A point of e(3)*: angular momentum M and Poisson vector x.
struct E3State {
  std::array<double, 3> M{};
  std::array<double, 3> x{0.0, 0.0, 1.0};
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> H;
  std::vector<double> F;
  std::vector<double> C1;  // e(3)* only
  std::vector<double> C2;  // e(3)* only
  // Largest relative deviation from the initial value over every accepted step.
  double max_drift_H = 0.0;
  double max_drift_F = 0.0;
  double max_drift_casimir = 0.0;
  std::size_t accepted_steps = 0;
};

/// H = |p - A|^2 / lambda + h (Case II torus form, or the cylinder form of the
/// limit). Throws FixedPointSingularity where lambda vanishes.
double h_eval(const SystemSpec& spec, const PhaseState& s);
/// F with the 2kQ'/(Q1 - Q2) cross terms (Case II); F = p1 for the limit.
double f_eval(const SystemSpec& spec, const PhaseState& s);

/// F of Case II evaluated in Staeckel coordinates q_i = Q_i(u_i)^2 with the
/// momenta and gauge transformed as covectors. Valid where Q1' Q2' > 0.
double f_eval_stackel(const SystemSpec& spec, const PhaseState& s);

/// Clebsch: H = |M|^2 - mu sum alpha_i x_i^2, F = sum alpha_i M_i^2 + mu(...).
std::array<double, 2> clebsch_eval(const SystemSpec& spec, const E3State& s);
/// Two-centre system; throws CenterSingularity where R(q) vanishes.
std::array<double, 2> vy_eval(const SystemSpec& spec, const E3State& s);
/// Dispatches on the family (Case I uses the Clebsch form).
std::array<double, 2> e3_eval(const SystemSpec& spec, const E3State& s);
/// C1 = |x|^2, C2 = (M, x).
std::array<double, 2> casimirs(const E3State& s) noexcept;

/// Advances the Case II (or limit) flow by physical time dt with adaptive
/// Dormand-Prince 5(4) steps, atol = rtol = tol. Case II uses the
/// Sundman time dt = lambda d(tau) so that passages near the fixed points stay
/// regular; positions leaving the gauge chart are shifted by a period and the
/// momenta re-anchored. Throws StepRejected when the step size underflows.
PhaseState flow_step(const SystemSpec& spec, const PhaseState& s, double dt, double tol);
/// Cylinder flow of the limit system; p1 is never modified.
PhaseState limit_system_step(const SystemSpec& spec, const PhaseState& s, double dt, double tol);
/// Lie-Poisson flow with projection back onto the initial Casimir leaf.
E3State e3_flow_step(const SystemSpec& spec, const E3State& s, double dt, double tol);

/// Integrates to t_end, storing every `stride`-th accepted step and the end point.
Trajectory<PhaseState> simulate_phase(const SystemSpec& spec, const PhaseState& s0, double t_end,
                                      double tol, int stride = 1);
Trajectory<E3State> simulate_e3(const SystemSpec& spec, const E3State& s0, double t_end,
                                double tol, int stride = 1);

struct BracketResult {
  double value = 0.0;
  /// Sum of the absolute values of the products entering the bracket; the
  /// natural scale for a relative test.
  double scale = 0.0;
};

using PhaseFunction = std::function<double(const PhaseState&)>;
using E3Function = std::function<double(const E3State&)>;

/// Canonical bracket by Richardson-extrapolated central differences.
BracketResult poisson_bracket_fd(const PhaseFunction& a, const PhaseFunction& b,
                                 const PhaseState& s, double h);
/// {a,b} = M.(dMa x dMb) + x.(dMa x dxb) + x.(dxa x dMb) from FD gradients.
BracketResult lie_poisson_bracket(const E3Function& a, const E3Function& b, const E3State& s,
                                  double h);

/// mt19937_64 with an explicit 53-bit mapping to [0, 1), so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Random Case II state away from the fixed points (lambda above 5% of its
/// maximum), momenta with |p - A| <= 1. For the limit: u2 within 3 of delta.
PhaseState random_phase_state(const SystemSpec& spec, Rng& rng);
/// Random e(3)* state with |x| = 1 and (M, x) = spec.B. For VY the position is
/// kept away from the two centres.
E3State random_e3_state(const SystemSpec& spec, Rng& rng);

}  // namespace monopole
