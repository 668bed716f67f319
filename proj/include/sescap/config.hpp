#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sescap/boundary_aids.hpp"
#include "sescap/cap_operator.hpp"
#include "sescap/contour.hpp"
#include "sescap/dc_field.hpp"
#include "sescap/hamiltonian.hpp"
#include "sescap/propagation.hpp"

namespace sescap {

// Run configuration. Serialized as JSON with every key present; loading
// rejects unknown keys so that typos surface as validation errors.

struct GridConfig {
  int n = 400;
  double length = 200.0;
};

struct ContourConfig {
  bool enabled = true;
  double theta = 0.5;
  double lambda = 0.9;
  double x_cap = 90.0;
  std::string profile = "erf";
};

struct PotentialConfig {
  std::string kind = "test_well_barrier";  // test_well_barrier | free | harmonic
  double omega = 1.0;
  double mass = 1.0;
};

struct InitialConfig {
  double a = 0.1;
  double p0 = 1.0;
  double x0 = 0.0;
};

struct PropagatorConfig {
  std::string method = "eigen";  // split5 | eigen | matrix_step
  double dt = 0.01;
  double t_final = 60.0;
  int stride = 100;
  std::string approximant = "pade";  // pade | eigen | taylor (matrix_step only)
  int taylor_order = 12;
};

struct DcConfig {
  bool enabled = false;
  double x_dc = 95.0;
  double strength = 2.0;
};

struct TbcConfig {
  bool enabled = false;
  int j_c = -1;
};

struct MonomialConfig {
  bool enabled = false;
  double strength = 1e-3;
  double x0 = 90.0;
  int order = 4;
};

struct ReferenceConfig {
  bool enabled = true;
  double box_length = 2000.0;
  int n_start = 8192;
  int n_max = 65536;
  double dt = 0.005;
  double tolerance = 1e-9;
};

struct DiagnosticsConfig {
  double region_halfwidth = 85.0;
  double epsilon = 1e-6;
  double x_edge = 100.0;
  double onset_threshold = 1e-4;
};

struct OutputConfig {
  std::string directory = "out";
  std::string prefix = "run";
};

struct RunConfig {
  GridConfig grid;
  ContourConfig contour;
  PotentialConfig potential;
  InitialConfig initial;
  PropagatorConfig propagator;
  DcConfig dc;
  TbcConfig tbc;
  MonomialConfig monomial_cap;
  ReferenceConfig reference;
  DiagnosticsConfig diagnostics;
  OutputConfig output;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GridConfig, n, length)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ContourConfig, enabled, theta, lambda, x_cap, profile)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PotentialConfig, kind, omega, mass)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InitialConfig, a, p0, x0)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PropagatorConfig, method, dt, t_final, stride, approximant, taylor_order)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DcConfig, enabled, x_dc, strength)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TbcConfig, enabled, j_c)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MonomialConfig, enabled, strength, x0, order)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReferenceConfig, enabled, box_length, n_start, n_max, dt, tolerance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DiagnosticsConfig, region_halfwidth, epsilon, x_edge, onset_threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OutputConfig, directory, prefix)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunConfig, grid, contour, potential, initial, propagator, dc, tbc, monomial_cap,
                                   reference, diagnostics, output)

namespace detail {

// Every key of `given` must exist in `schema`, recursively.
inline void check_keys(const nlohmann::json& given, const nlohmann::json& schema, const std::string& path) {
  if (!given.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!schema.contains(key)) throw ValidationError("config: unknown key '" + here + "'");
    check_keys(value, schema.at(key), here);
  }
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& c) { return nlohmann::json(c); }

/// Parses a (possibly partial) JSON object over the defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  nlohmann::json merged = config_to_json(RunConfig{});
  detail::check_keys(j, merged, "");
  merged.merge_patch(j);
  try {
    return merged.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return config_from_json(j);
}

/// Applies one "dotted.path=value" override. The value is read as JSON when
/// it parses, otherwise as a bare string.
inline RunConfig apply_override(const RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("config: override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  std::string pointer = "/" + key;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  nlohmann::json j = config_to_json(c);
  try {
    const nlohmann::json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw ValidationError("config: unknown key '" + key + "'");
    if (j.at(ptr).is_object()) throw ValidationError("config: '" + key + "' is a section, not a value");
    j[ptr] = value;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config: bad override key '" + key + "' (" + e.what() + ")");
  }
  return config_from_json(j);
}

inline PotentialModel make_potential(const PotentialConfig& p) {
  if (p.kind == "test_well_barrier") return PotentialModel::test_well_barrier();
  if (p.kind == "free") return PotentialModel::free();
  if (p.kind == "harmonic") {
    require(std::isfinite(p.omega) && p.omega > 0.0, "config: potential.omega must be positive");
    return PotentialModel::harmonic(p.omega);
  }
  throw ValidationError("config: unknown potential.kind '" + p.kind + "' (expected test_well_barrier, free or harmonic)");
}

inline std::optional<ContourParams> make_contour(const ContourConfig& c) {
  if (!c.enabled) return std::nullopt;
  return ContourParams{c.theta, c.lambda, c.x_cap, switch_profile_from_string(c.profile)};
}

inline GridSpec make_grid(const GridConfig& g) { return make_grid(g.n, g.length); }

inline HamiltonianSpec make_hamiltonian_spec(const RunConfig& c) {
  HamiltonianSpec h;
  h.potential = make_potential(c.potential);
  h.contour = make_contour(c.contour);
  if (c.dc.enabled) h.dc = DcFieldParams{c.dc.x_dc, c.dc.strength, true};
  if (c.monomial_cap.enabled) h.monomial = MonomialCap{c.monomial_cap.strength, c.monomial_cap.x0, c.monomial_cap.order};
  h.mass = c.potential.mass;
  return h;
}

inline PropagatorSpec make_propagator_spec(const RunConfig& c) {
  PropagatorSpec p;
  p.method = propagation_method_from_string(c.propagator.method);
  p.dt = c.propagator.dt;
  p.t_final = c.propagator.t_final;
  p.snapshot_stride = c.propagator.stride;
  p.dc_field = c.dc.enabled;
  p.tbc = c.tbc.enabled;
  p.tbc_jc = c.tbc.j_c;
  if (c.propagator.approximant == "pade") {
    p.approximant = StepApproximant::pade;
  } else if (c.propagator.approximant == "eigen") {
    p.approximant = StepApproximant::eigen;
  } else if (c.propagator.approximant == "taylor") {
    p.approximant = StepApproximant::taylor;
  } else {
    throw ValidationError("config: unknown propagator.approximant '" + c.propagator.approximant +
                          "' (expected pade, eigen or taylor)");
  }
  p.taylor_order = c.propagator.taylor_order;
  return p;
}

/// Cross-field validation; each check delegates to the owning module.
inline void validate_config(const RunConfig& c) {
  const GridSpec g = make_grid(c.grid);
  require(c.grid.n >= 8, "config: grid.n must be >= 8");
  const HamiltonianSpec h = make_hamiltonian_spec(c);
  require(std::isfinite(h.mass) && h.mass > 0.0, "config: potential.mass must be positive");
  if (h.contour) {
    validate_contour(*h.contour, g.box_length);
    validate_theta_against_initial(*h.contour, InitialFamily::gaussian());
  }
  if (h.dc) validate_dc(*h.dc, g.box_length, h.contour);
  if (h.monomial) validate_monomial(*h.monomial, g.box_length);
  const PropagatorSpec p = make_propagator_spec(c);
  validate_propagator(p);
  if (p.method == PropagationMethod::split5) {
    require(!h.contour && !h.dc && !h.monomial, "config: split5 needs a real potential (disable contour, dc and monomial_cap)");
  }
  if (p.tbc) {
    const int side = g.n_points / 2;
    require(c.tbc.j_c == -1 || (c.tbc.j_c >= 2 && c.tbc.j_c <= side), "config: tbc.j_c must be -1 or in 2..n/2");
  }
  require(c.initial.a > 0.0, "config: initial.a must be positive");
  require(c.diagnostics.region_halfwidth > 0.0 && c.diagnostics.region_halfwidth <= g.half_length(),
          "config: diagnostics.region_halfwidth must lie in (0, L/2]");
  require(c.diagnostics.epsilon > 0.0, "config: diagnostics.epsilon must be positive");
  require(c.diagnostics.onset_threshold > 0.0, "config: diagnostics.onset_threshold must be positive");
  if (c.reference.enabled) {
    require(c.reference.box_length >= g.box_length, "config: reference.box_length must cover the run box");
    require(c.reference.n_start >= 8 && c.reference.n_start % 2 == 0, "config: reference.n_start must be even and >= 8");
    require(c.reference.n_max >= 2 * c.reference.n_start, "config: reference.n_max must be >= 2 * n_start");
    require(c.reference.dt > 0.0 && c.reference.tolerance > 0.0, "config: reference dt and tolerance must be positive");
    step_count(c.reference.dt, c.propagator.dt * c.propagator.stride);
  }
  require(!c.output.directory.empty() && !c.output.prefix.empty(), "config: output directory and prefix must be set");
}

}  // namespace sescap
