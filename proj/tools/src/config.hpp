#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "monopole/dynamics.hpp"

namespace monopole::cli {

/// Malformed or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegratorSettings {
  double t_end = 50.0;
  double tol = 1e-10;
  int stride = 10;
  std::uint64_t seed = 7;
};

struct GridSettings {
  int n = 64;
  int stencil = 8;
};

/// Geometry of whichever family is selected; only the matching block is used.
struct Geometry {
  NeumannConstants alpha;          // CaseI
  double a3 = -1.0;                // CaseI, CaseII
  QuarticParams quartic;           // CaseII, always filled (derived from roots if given)
  std::optional<std::array<double, 4>> roots;
  double beta1 = 1.0, beta3 = -0.5, beta4 = -1.5;  // CaseIILimit
  double vyA = 2.0, vyB = 1.0;                     // VY
};

struct RunConfig {
  Family family = Family::CaseII;
  double mu = 1.0;
  double B = 0.7;
  std::optional<double> k;  // only checked against the derived value
  Geometry geometry;
  IntegratorSettings integrator;
  GridSettings grid;
  std::optional<PhaseState> phase_init;
  std::optional<E3State> e3_init;
};

/// Built-in example system of each family.
RunConfig default_config(Family f);

/// Parses one JSON document. Unknown keys, missing keys and type mismatches
/// are reported with the dotted key path; syntax errors with line and column.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the system; library errors surface as ConfigError.
SystemSpec build_spec(const RunConfig& cfg);

/// Metadata echoed into summaries (derived k in particular).
nlohmann::json describe(const RunConfig& cfg, const SystemSpec& spec);

}  // namespace monopole::cli
