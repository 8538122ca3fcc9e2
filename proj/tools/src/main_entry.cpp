#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "monopole/error.hpp"

namespace monopole::cli {

namespace {

struct Common {
  std::string config;
  std::string family;
  std::string out = ".";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, const std::string& tol_help) {
  sub->add_option("--config", c.config, "JSON run configuration");
  sub->add_option("--family", c.family, "CaseI | CaseII | CaseIILimit | VY (built-in example system)");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--tol", c.tol, tol_help);
  sub->add_option("--seed", c.seed, "seed for random samples and initial states");
}

RunConfig resolve(const Common& c) {
  if (c.config.empty() && c.family.empty()) throw ConfigError("one of --config or --family is required");
  RunConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
    if (!c.family.empty() && c.family != to_string(cfg.family)) {
      throw ConfigError("--family " + c.family + " contradicts the config family " +
                        std::string(to_string(cfg.family)));
    }
  } else {
    try {
      cfg = default_config(family_from_string(c.family));
    } catch (const Error&) {
      throw ConfigError("--family must be one of CaseI, CaseII, CaseIILimit, VY");
    }
  }
  if (c.seed) cfg.integrator.seed = *c.seed;
  return cfg;
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"monopole-lab: integrable monopole systems on the sphere and the torus"};
  app.require_subcommand(1);

  Common common;
  EllipticTableOptions et;
  MetricCheckOptions mc;
  SimulateOptions sim;
  VerifyOptions ver;
  FluxOptions fl;
  std::string slice = "real";
  std::optional<double> t_end;
  std::optional<int> stride, grid, stencil;

  auto* roots = app.add_subcommand("roots", "root and admissibility report (exit 0 iff admissible)");
  add_common(roots, common, "unused");

  auto* table = app.add_subcommand("elliptic-table", "write u,Q,dQ over one period");
  add_common(table, common, "unused");
  table->add_option("--samples", et.samples, "number of samples")->capture_default_str();
  table->add_option("--slice", slice, "real | imaginary")->check(CLI::IsMember({"real", "imaginary"}));

  auto* metric = app.add_subcommand("metric-check", "closed-form vs numeric curvature at random points");
  add_common(metric, common, "threshold on |K_closed - K_numeric|");
  metric->add_option("--samples", mc.samples, "number of random points")->capture_default_str();
  metric->add_option("--step", mc.step, "finite-difference step")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory and record H, F drift");
  add_common(simulate, common, "integrator tolerance (atol = rtol)");
  simulate->add_option("--t-end", t_end, "final time");
  simulate->add_option("--stride", stride, "record every n-th accepted step");
  simulate->add_option("--max-drift", sim.max_drift, "threshold on relative H and F drift")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "integrability conditions on a grid");
  add_common(verify, common, "threshold on every normalized residual");
  verify->add_option("--grid", grid, "grid points per axis");
  verify->add_option("--stencil", stencil, "central difference order")->check(CLI::IsMember({2, 4, 6, 8}));

  auto* flux = app.add_subcommand("flux", "area and flux/2pi of the sphere");
  add_common(flux, common, "threshold on the distance to the nearest integer");
  flux->add_option("--grid", fl.grid, "midpoint samples per axis")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    RunConfig cfg = resolve(common);
    if (roots->parsed()) return run_roots(cfg, std::cout);
    if (table->parsed()) {
      et.out_dir = common.out;
      et.slice = slice == "real" ? Slice::Real : Slice::Imaginary;
      return run_elliptic_table(cfg, et, std::cout);
    }
    if (metric->parsed()) {
      mc.out_dir = common.out;
      if (common.tol) mc.tol = *common.tol;
      return run_metric_check(cfg, mc, std::cout);
    }
    if (simulate->parsed()) {
      sim.out_dir = common.out;
      if (common.tol) cfg.integrator.tol = *common.tol;
      if (t_end) cfg.integrator.t_end = *t_end;
      if (stride) cfg.integrator.stride = *stride;
      return run_simulate(cfg, sim, std::cout);
    }
    if (verify->parsed()) {
      if (common.tol) ver.tol = *common.tol;
      if (grid) cfg.grid.n = *grid;
      if (stencil) cfg.grid.stencil = *stencil;
      return run_verify(cfg, ver, std::cout);
    }
    if (flux->parsed()) {
      if (common.tol) fl.tol = *common.tol;
      return run_flux(cfg, fl, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kThresholdBreach;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kThresholdBreach;
  }
  return kConfigError;
}

}  // namespace monopole::cli
