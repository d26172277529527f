#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pnp/scenario.hpp"

namespace pnp {

struct OutputOptions {
  std::filesystem::path directory = "out";
  int snapshot_every = 1;  // VTK cadence in steps, >= 1
  bool diagnostics_csv = true;
  bool vtk = false;
  bool matrix_dump = false;
};

struct SteadyOptions {
  double tolerance = 1e-8;
  std::size_t max_steps = 100000;
};

struct RunConfig {
  Scenario scenario;
  /// If set, tau = tau_over_h * min_j h_j and follows grid overrides.
  double tau_over_h = 0.0;
  OutputOptions output;
  SteadyOptions steady;
};

/// Parses a JSON document. Unknown keys are rejected; every error is a
/// ConfigError whose message starts with the path of the offending entry,
/// e.g. "species[1].diffusion: ...". Field values are numbers or expression
/// strings in x, y, z, t.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Replaces the cell counts (one per axis, or one for all) and rescales tau
/// when it was given relative to h.
void override_grid(RunConfig& config, const std::vector<int>& counts);

/// Builds the operators once to check field-valued invariants (D > 0,
/// eps > 0, non-negative initial data, Poisson compatibility). Throws
/// ConfigError with the config path of the first violation.
void check_fields(const Scenario& scenario);

}  // namespace pnp
