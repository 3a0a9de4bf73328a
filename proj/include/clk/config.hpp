#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clk/error.hpp"
#include "clk/geometry.hpp"
#include "clk/wall.hpp"

namespace clk::cli {

struct ConfigIssue {
  int line = 0;  // 0: command line or environment
  std::string message;
};

class ConfigErrors : public ConfigError {
public:
  explicit ConfigErrors(std::vector<ConfigIssue> issues);
  std::vector<ConfigIssue> issues;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = ".";

  // domain
  std::string domain = "ball";  // ball | disk | slab
  double radius = 1.0;
  double width = 1.0;
  double period = 1.0;
  std::string wall_temp = "const:1";

  // boundary model
  std::string model = "cl";  // cl | diffuse | specular | bounce_back | maxwell
  double r_perp = 0.5;
  double r_par = 0.5;
  double c = 0.5;
  double tw = 1.0;  // wall temperature of single-wall commands

  // physics
  double theta = 0.0;  // 0: 1/(8 T_M)
  std::optional<double> t_max;  // T_M override for check-theorem
  std::optional<double> min_tw;
  double kappa = 1.0;
  double t0 = 1.0;  // initial gas temperature

  // numerics
  std::int64_t n_particles = 100000;
  std::int64_t n_samples = 100000;
  std::optional<double> t_end;  // command-specific default
  std::string mode = "transient";  // simulate: transient | creep
  double amp = 0.05;               // creep runs
  double relax = 20.0;
  double window = 40.0;
  int which = 2;
  double u_par = 2.0;   // incident beam, figure coordinates (u_par, -u_perp)
  double u_perp = 2.0;
  int table_points = 121;
  double table_extent = 6.0;
  std::int64_t trials = 10000;
  int k_max = 64;
  double horizon = 1.0;
  double census_delta = 0.0;
  int nx = 10;
  int m = 15;
  double v_max = 0.0;
  double dt = 0.0;
  double cfl = 0.5;
  double tol = 1e-8;
  int m_max = 50;
  int n_mc = 32;
  std::string datum = "perturbed";
  double density = 0.1;
  double amplitude = 0.1;

  // line of each key that was set from a file (0 for overrides)
  std::map<std::string, int> origin;

  geometry::Domain make_domain() const;
  wall::BoundaryModel make_model() const;
  // Canonical "key = value" listing of every field. The manifest hash leaves
  // out the output directory.
  std::string canonical(bool with_out = true) const;
};

// Known keys in canonical order.
const std::vector<std::string>& known_keys();

// Applies one setting; returns an error message on failure.
std::optional<std::string> apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Parses `key = value` lines with `#` comments on top of `base`, then checks
// cross-field invariants. Throws ConfigErrors listing every problem.
RunConfig parse_config(std::string_view text, RunConfig base = {});

// Cross-field checks; issues carry the line of the offending key.
std::vector<ConfigIssue> validate(const RunConfig& cfg);

std::uint64_t fnv1a(std::string_view text);

}  // namespace clk::cli
