#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "monopole/error.hpp"
#include "monopole/verify.hpp"

namespace monopole::cli {

namespace fs = std::filesystem;

namespace {

// Single-owner CSV writer; every value is printed with 17 significant digits.
class CsvFile {
 public:
  CsvFile(const fs::path& path, std::string_view header) : path_(path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    buf_.append(header);
    buf_.push_back('\n');
  }
  template <class... T>
  void row(const T&... values) {
    ((fmt::format_to(std::back_inserter(buf_), "{:.17g},", values)), ...);
    buf_[buf_.size() - 1] = '\n';
  }
  void close() {
    std::ofstream f(path_, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path_.string() + "'");
    f.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  }

 private:
  fs::path path_;
  fmt::memory_buffer buf_;
};

void require(const RunConfig& cfg, std::initializer_list<Family> families, std::string_view command) {
  for (Family f : families) {
    if (cfg.family == f) return;
  }
  throw ConfigError(fmt::format("{} does not support family {}", command, to_string(cfg.family)));
}

// Uniform point of the fundamental cell with lambda above 5% of its maximum.
TorusPoint regular_point(const SystemSpec& spec, Rng& rng, double k1, double k2) {
  const auto lam = [&](double a, double b) { return system_metric(spec, a, b).lambda; };
  const double lam_max = lam(k1, k2);
  for (;;) {
    const TorusPoint p{rng.uniform(0.0, 2.0 * k1), rng.uniform(0.0, 2.0 * k2)};
    if (lam(p.u1, p.u2) >= 0.05 * lam_max) return p;
  }
}

}  // namespace

int run_roots(const RunConfig& cfg, std::ostream& out) {
  require(cfg, {Family::CaseII}, "roots");
  const QuarticParams& p = cfg.geometry.quartic;
  const AdmissibilityReport r = admissibility(p);
  fmt::print(out, "coefficients a3={:.17g} a2={:.17g} a0={:.17g} a1={:.17g}\n", p.a3, p.a2, p.a0, p.a1);
  try {
    const RootQuadruple q = real_roots(p);
    fmt::print(out, "roots {:.17g} {:.17g} {:.17g} {:.17g}\n", q.beta[0], q.beta[1], q.beta[2], q.beta[3]);
  } catch (const Error& e) {
    fmt::print(out, "roots unavailable: {}\n", e.what());
  }
  fmt::print(out, "discriminant {:.17g}\n", discriminant(p));
  fmt::print(out, "relative_discriminant {:.17g}\n", relative_discriminant(p));
  const auto flag = [&](std::string_view name, bool v) { fmt::print(out, "{} {}\n", name, v ? "yes" : "no"); };
  flag("coefficient_conditions", r.coefficient_conditions);
  flag("discriminant_condition", r.discriminant_condition);
  flag("four_distinct_real_roots", r.four_distinct_real_roots);
  flag("root_inequalities", r.root_inequalities);
  flag("admissible", r.admissible);
  return r.admissible ? kOk : kThresholdBreach;
}

int run_elliptic_table(const RunConfig& cfg, const EllipticTableOptions& opt, std::ostream& out) {
  require(cfg, {Family::CaseI, Family::CaseII}, "elliptic-table");
  if (opt.samples < 2) throw ConfigError("--samples must be at least 2");
  const SystemSpec spec = build_spec(cfg);
  const bool real = opt.slice == Slice::Real;
  const EllipticSlice& s = cfg.family == Family::CaseII
                               ? spec.model().slice(opt.slice)
                               : (real ? spec.geometry_i().slice1() : spec.geometry_i().slice2());
  const fs::path path = opt.out_dir / "elliptic_table.csv";
  CsvFile csv(path, "u,Q,dQ");
  const double period = s.period();
  for (int i = 0; i < opt.samples; ++i) {
    const double u = period * i / (opt.samples - 1);
    double q = 0.0, dq = 0.0;
    s.evaluate(u, q, dq);
    csv.row(u, q, dq);
  }
  csv.close();
  fmt::print(out, "slice {} half_period {:.17g} samples {} -> {}\n", real ? "real" : "imaginary",
             s.half_period(), opt.samples, path.string());
  return kOk;
}

int run_metric_check(const RunConfig& cfg, const MetricCheckOptions& opt, std::ostream& out) {
  require(cfg, {Family::CaseI, Family::CaseII}, "metric-check");
  const SystemSpec spec = build_spec(cfg);
  const bool one = cfg.family == Family::CaseI;
  const double k1 = one ? spec.geometry_i().k1() : spec.model().k1();
  const double k2 = one ? spec.geometry_i().k2() : spec.model().k2();
  const auto lam = [&](double a, double b) { return system_metric(spec, a, b).lambda; };

  Rng rng(cfg.integrator.seed);
  const fs::path path = opt.out_dir / "metric_check.csv";
  CsvFile csv(path, "u1,u2,lambda,K_closed,K_numeric");
  double worst = 0.0;
  for (int i = 0; i < opt.samples; ++i) {
    const TorusPoint p = regular_point(spec, rng, k1, k2);
    const double kc = curvature_closed(spec, p.u1, p.u2);
    const double kn = curvature_numeric(lam, p.u1, p.u2, opt.step);
    worst = std::max(worst, std::abs(kc - kn));
    csv.row(p.u1, p.u2, lam(p.u1, p.u2), kc, kn);
  }
  csv.close();
  fmt::print(out, "metric-check samples {} max|K_closed-K_numeric| {:.3e} tol {:.1e} -> {}\n", opt.samples,
             worst, opt.tol, path.string());
  return worst <= opt.tol ? kOk : kThresholdBreach;
}

int run_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out) {
  const SystemSpec spec = build_spec(cfg);
  const auto& it = cfg.integrator;
  Rng rng(it.seed);
  const fs::path path = opt.out_dir / "trajectory.csv";
  double dH = 0.0, dF = 0.0, dC = 0.0;
  std::size_t steps = 0;
  if (cfg.family == Family::CaseII || cfg.family == Family::CaseIILimit) {
    const PhaseState s0 = cfg.phase_init ? *cfg.phase_init : random_phase_state(spec, rng);
    const auto tr = simulate_phase(spec, s0, it.t_end, it.tol, it.stride);
    CsvFile csv(path, "t,u1,u2,p1,p2,H,F");
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const auto& s = tr.states[i];
      csv.row(tr.times[i], s.u1, s.u2, s.p1, s.p2, tr.H[i], tr.F[i]);
    }
    csv.close();
    dH = tr.max_drift_H;
    dF = tr.max_drift_F;
    steps = tr.accepted_steps;
  } else {
    const E3State s0 = cfg.e3_init ? *cfg.e3_init : random_e3_state(spec, rng);
    const auto tr = simulate_e3(spec, s0, it.t_end, it.tol, it.stride);
    CsvFile csv(path, "t,M1,M2,M3,x1,x2,x3,H,F,C1,C2");
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const auto& s = tr.states[i];
      csv.row(tr.times[i], s.M[0], s.M[1], s.M[2], s.x[0], s.x[1], s.x[2], tr.H[i], tr.F[i], tr.C1[i],
              tr.C2[i]);
    }
    csv.close();
    dH = tr.max_drift_H;
    dF = tr.max_drift_F;
    dC = tr.max_drift_casimir;
    steps = tr.accepted_steps;
  }
  const auto meta = describe(cfg, spec);
  fmt::print(out, "system {}\n", meta.dump());
  fmt::print(out, "simulate t_end {:.17g} tol {:.1e} steps {} max_drift H {:.3e} F {:.3e} casimir {:.3e} -> {}\n",
             it.t_end, it.tol, steps, dH, dF, dC, path.string());
  const bool ok = dH <= opt.max_drift && dF <= opt.max_drift && dC <= opt.max_casimir_drift;
  return ok ? kOk : kThresholdBreach;
}

int run_verify(const RunConfig& cfg, const VerifyOptions& opt, std::ostream& out) {
  require(cfg, {Family::CaseI, Family::CaseII}, "verify");
  const SystemSpec spec = build_spec(cfg);
  const int n = cfg.grid.n;
  const int stencil = cfg.grid.stencil;
  if (stencil != 2 && stencil != 4 && stencil != 6 && stencil != 8) {
    throw ConfigError("stencil must be 2, 4, 6 or 8");
  }
  if (n < 9) throw ConfigError("grid must be at least 9");
  const AnsatzGrid grid = sample_system(spec, n);
  const ConditionReport r = check_classical(grid, stencil);
  fmt::print(out, "verify {} grid {}x{} stencil {}\n", to_string(cfg.family), n, n, stencil);
  for (Condition c : {Condition::C1, Condition::C2, Condition::C3, Condition::C4, Condition::C5,
                      Condition::C6, Condition::C6Star}) {
    fmt::print(out, "  {:<4} {:.3e}\n", to_string(c), r[c]);
  }
  fmt::print(out, "  quantum correction {:.3e}\n", r.c6star_correction);
  const double worst = r.max_residual();
  fmt::print(out, "max residual {:.3e} tol {:.1e}\n", worst, opt.tol);
  return worst <= opt.tol ? kOk : kThresholdBreach;
}

int run_flux(const RunConfig& cfg, const FluxOptions& opt, std::ostream& out) {
  require(cfg, {Family::CaseI, Family::CaseII}, "flux");
  const SystemSpec spec = build_spec(cfg);
  const AreaFlux a = cfg.family == Family::CaseI ? area_and_flux(spec.geometry_i(), cfg.B, opt.grid)
                                                 : area_and_flux(spec.model(), cfg.B, opt.grid);
  fmt::print(out, "area {:.17g}\n", a.area);
  fmt::print(out, "flux/2pi {:.17g}\n", a.flux_over_2pi);
  fmt::print(out, "nearest_integer {:.0f}\n", a.nearest_integer);
  fmt::print(out, "gap {:.3e}\n", a.gap);
  return a.gap <= opt.tol ? kOk : kThresholdBreach;
}

}  // namespace monopole::cli
