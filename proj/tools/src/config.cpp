#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "monopole/error.hpp"

namespace monopole::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + join(path, key) + "'");
  }
}

const json& object_at(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + join(path, key) + "'");
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError("key '" + join(path, key) + "' must be an object");
  return v;
}

double number(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + join(path, key) + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("key '" + join(path, key) + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("key '" + join(path, key) + "' must be finite");
  return x;
}

double number_or(const json& obj, const std::string& path, const std::string& key, double fallback) {
  return obj.contains(key) ? number(obj, path, key) : fallback;
}

long long integer_or(const json& obj, const std::string& path, const std::string& key,
                     long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("key '" + join(path, key) + "' must be an integer");
  return v.get<long long>();
}

template <std::size_t N>
std::array<double, N> vector_of(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + join(path, key) + "'");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != N) {
    throw ConfigError("key '" + join(path, key) + "' must be an array of " + std::to_string(N) +
                      " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw ConfigError("key '" + join(path, key) + "' must hold numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

void parse_geometry(const json& g, RunConfig& cfg) {
  const std::string p = "geometry";
  auto& geo = cfg.geometry;
  switch (cfg.family) {
    case Family::CaseI:
      reject_unknown(g, p, {"alpha", "a3"});
      geo.alpha.alpha = vector_of<3>(g, p, "alpha");
      geo.a3 = number(g, p, "a3");
      break;
    case Family::CaseII: {
      reject_unknown(g, p, {"roots", "a3", "a2", "a0", "a1"});
      const bool has_roots = g.contains("roots");
      const bool has_coeff = g.contains("a2") || g.contains("a0") || g.contains("a1");
      if (has_roots == has_coeff) {
        throw ConfigError("geometry needs exactly one of 'geometry.roots' or the coefficients "
                          "'geometry.a2', 'geometry.a0', 'geometry.a1'");
      }
      geo.a3 = number(g, p, "a3");
      if (has_roots) {
        geo.roots = vector_of<4>(g, p, "roots");
        try {
          geo.quartic = from_roots(*geo.roots, geo.a3);
        } catch (const Error& e) {
          throw ConfigError(std::string("geometry.roots: ") + e.what());
        }
      } else {
        geo.quartic = {geo.a3, number(g, p, "a2"), number(g, p, "a0"), number(g, p, "a1")};
      }
      break;
    }
    case Family::CaseIILimit:
      reject_unknown(g, p, {"beta1", "beta3", "beta4"});
      geo.beta1 = number(g, p, "beta1");
      geo.beta3 = number(g, p, "beta3");
      geo.beta4 = number(g, p, "beta4");
      break;
    case Family::VY:
      reject_unknown(g, p, {"vyA", "vyB"});
      geo.vyA = number(g, p, "vyA");
      geo.vyB = number(g, p, "vyB");
      break;
  }
}

void parse_initial(const json& s, RunConfig& cfg) {
  const std::string p = "initial_state";
  if (cfg.family == Family::CaseI || cfg.family == Family::VY) {
    reject_unknown(s, p, {"M", "x"});
    cfg.e3_init = E3State{vector_of<3>(s, p, "M"), vector_of<3>(s, p, "x")};
    // The state must lie on the leaf |x| = 1, (M, x) = B that defines the system.
    const auto c = casimirs(*cfg.e3_init);
    if (std::abs(c[0] - 1.0) > 1e-12) throw ConfigError("initial_state.x must be a unit vector");
    if (std::abs(c[1] - cfg.B) > 1e-12 * std::max(1.0, std::abs(cfg.B))) {
      throw ConfigError("initial_state must satisfy (M, x) = B");
    }
  } else {
    reject_unknown(s, p, {"u1", "u2", "p1", "p2"});
    cfg.phase_init = PhaseState{number(s, p, "u1"), number(s, p, "u2"), number(s, p, "p1"),
                                number(s, p, "p2")};
  }
}

}  // namespace

RunConfig default_config(Family f) {
  RunConfig cfg;
  cfg.family = f;
  switch (f) {
    case Family::CaseI:
      cfg.geometry.alpha = {{3.0, 2.0, 1.0}};
      cfg.geometry.a3 = -4.0;
      cfg.B = 0.5;
      break;
    case Family::CaseII:
      cfg.geometry.a3 = -1.0;
      cfg.geometry.roots = std::array<double, 4>{3.0, 2.0, -1.0, -4.0};
      cfg.geometry.quartic = from_roots(*cfg.geometry.roots, -1.0);
      break;
    case Family::CaseIILimit:
      cfg.B = 0.5;
      break;
    case Family::VY:
      cfg.B = 0.3;
      break;
  }
  return cfg;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON syntax: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, "", {"family", "mu", "B", "k", "geometry", "integrator", "grid", "initial_state"});

  if (!doc.contains("family")) throw ConfigError("missing key 'family'");
  if (!doc["family"].is_string()) throw ConfigError("key 'family' must be a string");
  RunConfig cfg;
  try {
    cfg.family = family_from_string(doc["family"].get<std::string>());
  } catch (const Error&) {
    throw ConfigError("key 'family' must be one of CaseI, CaseII, CaseIILimit, VY");
  }
  cfg.mu = number(doc, "", "mu");
  cfg.B = number(doc, "", "B");
  if (doc.contains("k")) cfg.k = number(doc, "", "k");
  parse_geometry(object_at(doc, "", "geometry"), cfg);

  if (doc.contains("integrator")) {
    const json& in = object_at(doc, "", "integrator");
    reject_unknown(in, "integrator", {"t_end", "tol", "stride", "seed"});
    auto& it = cfg.integrator;
    it.t_end = number_or(in, "integrator", "t_end", it.t_end);
    it.tol = number_or(in, "integrator", "tol", it.tol);
    it.stride = static_cast<int>(integer_or(in, "integrator", "stride", it.stride));
    const long long seed = integer_or(in, "integrator", "seed", static_cast<long long>(it.seed));
    if (seed < 0) throw ConfigError("key 'integrator.seed' must be non-negative");
    it.seed = static_cast<std::uint64_t>(seed);
    if (!(it.t_end > 0.0)) throw ConfigError("key 'integrator.t_end' must be positive");
    if (!(it.tol > 0.0)) throw ConfigError("key 'integrator.tol' must be positive");
    if (it.stride < 1) throw ConfigError("key 'integrator.stride' must be at least 1");
  }
  if (doc.contains("grid")) {
    const json& gr = object_at(doc, "", "grid");
    reject_unknown(gr, "grid", {"n", "stencil"});
    cfg.grid.n = static_cast<int>(integer_or(gr, "grid", "n", cfg.grid.n));
    cfg.grid.stencil = static_cast<int>(integer_or(gr, "grid", "stencil", cfg.grid.stencil));
  }
  if (doc.contains("initial_state")) parse_initial(object_at(doc, "", "initial_state"), cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SystemSpec build_spec(const RunConfig& cfg) {
  SystemSpec spec;
  const auto& g = cfg.geometry;
  try {
    switch (cfg.family) {
      case Family::CaseI: spec = make_case_i(g.alpha, g.a3, cfg.mu, cfg.B); break;
      case Family::CaseII: spec = make_case_ii(g.quartic, cfg.mu, cfg.B); break;
      case Family::CaseIILimit: spec = make_limit(g.beta1, g.beta3, g.beta4, cfg.mu, cfg.B); break;
      case Family::VY: spec = make_vy(g.vyA, g.vyB, cfg.mu, cfg.B); break;
    }
  } catch (const Error& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  if (cfg.k && cfg.family == Family::VY) throw ConfigError("key 'k' is not defined for family VY");
  if (cfg.k) {
    if (std::abs(*cfg.k - spec.k) > 1e-12 * std::max(1.0, std::abs(spec.k))) {
      std::ostringstream os;
      os.precision(17);
      os << "key 'k' is derived (" << spec.k << ") and must not be set to " << *cfg.k;
      throw ConfigError(os.str());
    }
  }
  return spec;
}

json describe(const RunConfig& cfg, const SystemSpec& spec) {
  json j;
  j["family"] = std::string(to_string(cfg.family));
  j["mu"] = cfg.mu;
  j["B"] = cfg.B;
  if (cfg.family != Family::VY) j["k"] = spec.k;
  if (cfg.family == Family::CaseII) {
    const auto& m = spec.model();
    j["roots"] = m.roots().beta;
    j["K1"] = m.k1();
    j["K2"] = m.k2();
  } else if (cfg.family == Family::CaseI) {
    j["K1"] = spec.geometry_i().k1();
    j["K2"] = spec.geometry_i().k2();
  }
  return j;
}

}  // namespace monopole::cli
