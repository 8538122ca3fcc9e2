// Acceptance report: one PASS/FAIL line per criterion, measured at the stated
// tolerances. Diagnostic lines (indented) show the numbers behind each verdict.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/ellint_1.hpp>
#include <fmt/format.h>

#include "monopole/dynamics.hpp"
#include "monopole/geometry.hpp"
#include "monopole/verify.hpp"

using namespace monopole;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    pass = pass && ok;
    notes.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", note));
  }
};

SystemSpec case_ii_system() { return make_case_ii(from_roots({3.0, 2.0, -1.0, -4.0}, -1.0), 1.0, 0.7); }
SystemSpec clebsch_system() { return make_case_i({{3.0, 2.0, 1.0}}, -4.0, 1.0, 0.5); }
SystemSpec vy_system() { return make_vy(2.0, 1.0, 1.0, 0.3); }
SystemSpec limit_system() { return make_limit(1.0, -0.5, -1.5, 1.0, 0.5); }

double rel(const BracketResult& r) { return r.scale > 0.0 ? std::abs(r.value) / r.scale : 0.0; }

// 1. {H, F} = 0 at 100 seeded states per system.
Verdict brackets() {
  Verdict v;
  constexpr double h = 1e-4;
  {
    const auto s = case_ii_system();
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const PhaseState st = random_phase_state(s, rng);
      worst = std::max(worst, rel(poisson_bracket_fd([&](const PhaseState& x) { return h_eval(s, x); },
                                                     [&](const PhaseState& x) { return f_eval(s, x); }, st, h)));
    }
    v.check(worst < 1e-6, fmt::format("Case II roots (3,2,-1,-4): max relative |{{H,F}}| {:.2e}", worst));
  }
  for (const auto& [name, s] : {std::pair{"Clebsch alpha=(3,2,1)", clebsch_system()},
                                std::pair{"VY (A,B)=(2,1)", vy_system()}}) {
    Rng rng(102);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const E3State st = random_e3_state(s, rng);
      worst = std::max(worst, rel(lie_poisson_bracket([&](const E3State& x) { return e3_eval(s, x)[0]; },
                                                      [&](const E3State& x) { return e3_eval(s, x)[1]; }, st, h)));
    }
    v.check(worst < 1e-6, fmt::format("{}: max relative |{{H,F}}| {:.2e}", name, worst));
  }
  return v;
}

// 2. Drift over t in [0, 50] at tol 1e-10, ten seeded states per family.
Verdict conservation() {
  Verdict v;
  constexpr int kSeeds = 10;
  {
    const auto s = case_ii_system();
    double worst = 0.0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      Rng rng(static_cast<std::uint64_t>(seed));
      const auto tr = simulate_phase(s, random_phase_state(s, rng), 50.0, 1e-10, 1000);
      worst = std::max({worst, tr.max_drift_H, tr.max_drift_F});
    }
    v.check(worst < 1e-7, fmt::format("Case II: worst H/F drift {:.2e} over {} states", worst, kSeeds));
  }
  for (const auto& [name, s] : {std::pair{"Clebsch", clebsch_system()}, std::pair{"VY", vy_system()}}) {
    double worst = 0.0, worst_c = 0.0;
    int passed = 0;
    std::string failures;
    for (int seed = 0; seed < kSeeds; ++seed) {
      Rng rng(static_cast<std::uint64_t>(seed));
      const auto tr = simulate_e3(s, random_e3_state(s, rng), 50.0, 1e-10, 1000);
      const double d = std::max(tr.max_drift_H, tr.max_drift_F);
      worst = std::max(worst, d);
      worst_c = std::max(worst_c, tr.max_drift_casimir);
      if (d < 1e-7) {
        ++passed;
      } else {
        failures += fmt::format(" seed {}: {:.1e}", seed, d);
      }
    }
    v.check(worst < 1e-7, fmt::format("{}: worst H/F drift {:.2e}, {}/{} states below 1e-7{}", name, worst,
                                      passed, kSeeds, failures.empty() ? "" : ";" + failures));
    v.check(worst_c < 1e-10, fmt::format("{}: worst Casimir drift {:.2e}", name, worst_c));
  }
  {
    const auto s = limit_system();
    Rng rng(0);
    const auto tr = simulate_phase(s, random_phase_state(s, rng), 50.0, 1e-10, 1000);
    v.notes.push_back(fmt::format("info limit system (not graded): H drift {:.2e}", tr.max_drift_H));
  }
  return v;
}

// 3. Elliptic engine.
Verdict elliptic() {
  Verdict v;
  const EllipticModel m = build_model(from_roots({3.0, 2.0, -1.0, -4.0}, -1.0));
  const double scale = m.scale();
  double ode = 0.0, period = 0.0, even = 0.0;
  for (Slice sl : {Slice::Real, Slice::Imaginary}) {
    const EllipticSlice& s = m.slice(sl);
    const double sign = sl == Slice::Real ? 1.0 : -1.0;  // Q2(u) = Q(iu) flips the sign of P
    for (int i = 0; i < 1000; ++i) {
      const double u = -2.0 * s.period() + 4.0 * s.period() * (i + 0.5) / 1000.0;
      double q = 0.0, dq = 0.0;
      s.evaluate(u, q, dq);
      ode = std::max(ode, std::abs(4.0 * dq * dq - sign * eval_p(m.params(), q)) / scale);
      period = std::max(period, std::abs(s.value(u + s.period()) - q));
      even = std::max(even, std::abs(s.value(-u) - q));
    }
  }
  v.check(ode < 1e-9, fmt::format("max |4Q'^2 - P(Q)| / scale {:.2e} (2000 points, both slices)", ode));
  v.check(period < 1e-9, fmt::format("periodicity error {:.2e}", period));
  v.check(even < 1e-9, fmt::format("evenness error {:.2e}", even));
  const double k1 = build_model(from_roots({2.0, 1.0, -1.0, -2.0}, -1.0)).k1();
  const double legendre = boost::math::ellint_1(std::sqrt(3.0) / 2.0);
  v.check(std::abs(k1 - legendre) < 1e-8,
          fmt::format("even quartic K1 {:.15f} vs K(sqrt3/2) {:.15f}", k1, legendre));
  return v;
}

// 4. Curvature.
Verdict curvature() {
  Verdict v;
  {
    const auto s = case_ii_system();
    const auto& m = s.model();
    const auto lam = [&](double a, double b) { return torus_metric(m, {a, b}).lambda; };
    const double lmax = lam(m.k1(), m.k2());
    Rng rng(4);
    double worst = 0.0;
    for (int n = 0; n < 200;) {
      const double u1 = rng.uniform(0.0, 2.0 * m.k1()), u2 = rng.uniform(0.0, 2.0 * m.k2());
      if (lam(u1, u2) < 0.05 * lmax) continue;
      worst = std::max(worst, std::abs(curvature_numeric(lam, u1, u2, 1e-2) - curvature_closed(m, {u1, u2})));
      ++n;
    }
    v.check(worst < 1e-6, fmt::format("Case II: max |K_numeric - K_closed| {:.2e} at 200 points", worst));
  }
  {
    const CaseIGeometry g({{3.0, 2.0, 1.0}}, -4.0);
    const auto lam = [&](double a, double b) { return conformal_metric(g, {a, b}).lambda; };
    Rng rng(5);
    double worst = 0.0;
    for (int n = 0; n < 200; ++n) {
      const double u1 = rng.uniform(0.1, 1.9) * g.k1(), u2 = rng.uniform(0.1, 1.9) * g.k2();
      worst = std::max(worst, std::abs(curvature_numeric(lam, u1, u2, 1e-2) - curvature_closed(g)));
    }
    v.check(std::abs(curvature_closed(g) - 1.0) < 1e-6 && worst < 1e-6,
            fmt::format("Case I a3=-4: closed K {:.15g}, max numeric deviation {:.2e}", curvature_closed(g), worst));
  }
  return v;
}

// 5. Integrability conditions on a 64^2 grid.
Verdict conditions() {
  Verdict v;
  for (const auto& [name, s] : {std::pair{"Case I", clebsch_system()}, std::pair{"Case II", case_ii_system()}}) {
    const ConditionReport r = check_classical(sample_system(s, 64));
    std::string row;
    for (Condition c : {Condition::C1, Condition::C2, Condition::C3, Condition::C4, Condition::C5,
                        Condition::C6, Condition::C6Star}) {
      row += fmt::format(" {} {:.1e}", to_string(c), r[c]);
    }
    v.check(r.max_residual() < 1e-6, fmt::format("{}:{}", name, row));
    v.check(r.c6star_correction < 1e-12, fmt::format("{}: (C6)*-(C6) correction {:.1e}", name, r.c6star_correction));
  }
  return v;
}

// 6. Duality of the consistency condition and (C6)*.
Verdict duality() {
  Verdict v;
  for (const auto& [name, s] : {std::pair{"Case I", clebsch_system()}, std::pair{"Case II", case_ii_system()}}) {
    const double d = check_duality(sample_system(s, 64));
    v.check(d < 1e-12, fmt::format("{}: max |consistency - C6*(h<->B)| {:.1e}", name, d));
  }
  return v;
}

// 7. Metric coefficient in the w = z^2 chart at (0,0).
Verdict quotient() {
  Verdict v;
  const EllipticModel m = build_model(from_roots({3.0, 2.0, -1.0, -4.0}, -1.0));
  const double printed = fixed_point_limit_printed(m), limit = fixed_point_limit(m);
  for (const auto& [w, tol] : {std::pair{1e-3, 1e-2}, std::pair{1e-4, 1e-3}}) {
    const double c = fixed_point_chart(m, 0, {w, 0.0}).lambda;
    v.check(std::abs(c - printed) / printed < tol,
            fmt::format("|w|={:.0e}: coefficient {:.10f} vs (1/2)(sqrt(P'(b2))/4) b2 = {:.10f}, rel err {:.2e}", w, c,
                        printed, std::abs(c - printed) / printed));
    v.notes.push_back(fmt::format("info |w|={:.0e}: vs b2 P'(b2)/32 = {:.10f}, rel err {:.2e}", w, limit,
                                  std::abs(c - limit) / limit));
  }
  return v;
}

// 8. Flux quantization.
Verdict flux() {
  Verdict v;
  const CaseIGeometry g({{3.0, 2.0, 1.0}}, -4.0);
  const AreaFlux a = area_and_flux(g, 0.5, 256);
  v.check(std::abs(a.area - 4.0 * std::numbers::pi) < 1e-6 && std::abs(a.flux_over_2pi - 1.0) < 1e-6,
          fmt::format("round sphere area {:.15f}, B=0.5 flux/2pi {:.15f}", a.area, a.flux_over_2pi));
  const EllipticModel m = build_model(from_roots({3.0, 2.0, -1.0, -4.0}, -1.0));
  const double a1 = area_and_flux(m, 1.0, 64).area, a2 = area_and_flux(m, 1.0, 128).area;
  v.check(std::abs(a1 - a2) / a2 < 1e-6, fmt::format("Case II area n=64 {:.12f}, n=128 {:.12f}", a1, a2));
  const double f1 = area_and_flux(m, 0.3, 128).flux_over_2pi, f2 = area_and_flux(m, 0.9, 128).flux_over_2pi;
  const double f12 = area_and_flux(m, 1.2, 128).flux_over_2pi;
  v.check(std::abs(f12 - f1 - f2) < 1e-10, fmt::format("linearity |F(1.2)-F(0.3)-F(0.9)| {:.1e}", std::abs(f12 - f1 - f2)));
  return v;
}

// 9. The beta1 = beta2 limit.
Verdict limit() {
  Verdict v;
  const auto s = limit_system();
  const LimitModel& lm = s.limit_model();
  Rng rng(9);
  double sym = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-30.0, 30.0);
    sym = std::max(sym, std::abs(lm.q2(2.0 * lm.delta() - u) - lm.q2(u)));
  }
  v.check(sym < 1e-12, fmt::format("max |Q2(2 delta - u) - Q2(u)| {:.1e}", sym));
  const double ratio = limit_decay_ratio(lm, 5.0);
  v.check(std::abs(ratio - 1.0) < 1e-4, fmt::format("decay ratio at |u2~|=5: {:.8f} (|ratio-1| {:.2e})", ratio,
                                                  std::abs(ratio - 1.0)));
  v.notes.push_back(fmt::format("info decay ratio at 7.5: {:.10f}, at 10: {:.12f}", limit_decay_ratio(lm, 7.5),
                                limit_decay_ratio(lm, 10.0)));
  PhaseState st = random_phase_state(s, rng);
  const double p1 = st.p1;
  bool exact = true;
  for (int i = 0; i < 1000; ++i) {
    st = limit_system_step(s, st, 0.05, 1e-10);
    exact = exact && st.p1 == p1;
  }
  v.check(exact, fmt::format("p1 bit-identical over 1000 cylinder steps: {}", exact ? "yes" : "no"));
  return v;
}

// 10. Identities of the proofs at 10^3 sample points.
Verdict identities() {
  Verdict v;
  Rng rng(10);
  std::vector<double> q(1000);
  double ode = 0.0;
  for (const std::array<double, 3>& c : {std::array{1.0, 0.0, 1.0}, std::array{2.0, 0.7, 0.3},
                                         std::array{0.5, -0.2, 1.5}}) {
    for (double& x : q) x = rng.uniform(0.05, 3.0);
    ode = std::max(ode, check_ode_identities(q, c).max());
  }
  v.check(ode < 1e-10, fmt::format("ODE identities (n = -2/3, 2, 3 and the g relations): max residual {:.1e}", ode));
  double fs = 0.0, fq = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double q1 = rng.uniform(0.1, 5.0), q2 = rng.uniform(0.1, 5.0);
    if (q1 == q2) continue;
    fs = std::max(fs, check_functional_equation(FunctionalCase::Sqrt, q1, q2, 1.3));
    fq = std::max(fq, check_functional_equation(FunctionalCase::Quadratic, q1, q2, 0.7));
  }
  v.check(fs < 1e-10, fmt::format("functional equation a=b=mu sqrt(q): {:.1e}", fs));
  v.check(fq < 1e-10, fmt::format("functional equation a=b=c q^2: {:.1e}", fq));
  return v;
}

// 11. Neumann elliptic coordinates.
Verdict neumann() {
  Verdict v;
  const NeumannConstants c{{3.0, 2.0, 1.0}};
  Rng rng(11);
  double norm = 0.0, quad = 0.0, trip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double q1 = rng.uniform(2.0, 3.0), q2 = rng.uniform(1.0, 2.0);
    const auto bits = static_cast<unsigned>(rng.uniform() * 8.0);
    const auto x = neumann_to_cartesian(c, q1, q2, bits);
    norm = std::max(norm, std::abs(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0));
    quad = std::max(quad, std::abs(q1 + q2 - neumann_quadratic_form(c, x)));
    const NeumannCoords nc = cartesian_to_neumann(c, x);
    const auto y = neumann_to_cartesian(c, nc.q1, nc.q2, nc.sign_bits);
    trip = std::max({trip, std::abs(x[0] - y[0]), std::abs(x[1] - y[1]), std::abs(x[2] - y[2])});
  }
  v.check(norm < 1e-12, fmt::format("max |sum x_i^2 - 1| {:.1e}", norm));
  v.check(quad < 1e-12, fmt::format("max |q1 + q2 - quadratic form| {:.1e}", quad));
  v.check(trip < 1e-10, fmt::format("round-trip error {:.1e}", trip));
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"bracket vanishing", brackets},   {"conservation under flow", conservation},
      {"elliptic engine", elliptic},     {"curvature", curvature},
      {"integrability conditions", conditions}, {"duality", duality},
      {"quotient regularity", quotient}, {"flux quantization", flux},
      {"limit case", limit},             {"proof identities", identities},
      {"Neumann coordinates", neumann}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("criterion {:2}: {} {} ({:.1f} s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, secs);
    for (const auto& n : v.notes) fmt::print("    {}\n", n);
    failed += v.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
