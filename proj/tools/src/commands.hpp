#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace monopole::cli {

enum ExitCode : int { kOk = 0, kThresholdBreach = 1, kConfigError = 2 };

struct EllipticTableOptions {
  std::filesystem::path out_dir = ".";
  int samples = 257;
  Slice slice = Slice::Real;
};

struct MetricCheckOptions {
  std::filesystem::path out_dir = ".";
  int samples = 200;
  double tol = 1e-6;
  double step = 1e-2;
};

struct SimulateOptions {
  std::filesystem::path out_dir = ".";
  double max_drift = 1e-7;
  double max_casimir_drift = 1e-10;
};

struct VerifyOptions {
  double tol = 1e-6;
};

struct FluxOptions {
  int grid = 256;
  double tol = 1e-6;
};

// Each command prints a human-readable summary to `out` and returns an exit code.
int run_roots(const RunConfig& cfg, std::ostream& out);
int run_elliptic_table(const RunConfig& cfg, const EllipticTableOptions& opt, std::ostream& out);
int run_metric_check(const RunConfig& cfg, const MetricCheckOptions& opt, std::ostream& out);
int run_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out);
int run_verify(const RunConfig& cfg, const VerifyOptions& opt, std::ostream& out);
int run_flux(const RunConfig& cfg, const FluxOptions& opt, std::ostream& out);

/// Full command line entry point; never throws.
int main_entry(int argc, char** argv);

}  // namespace monopole::cli
