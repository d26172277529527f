#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnp/field.hpp"
#include "pnp/marching.hpp"

namespace pnp {

struct NamedField {
  std::string name;
  const ScalarField* field;
};

/// Legacy ASCII VTK, STRUCTURED_POINTS with CELL_DATA. The point lattice is
/// (N_j + 1) per axis; missing axes of 1D/2D grids are padded with one
/// cell of unit spacing. Values use %.17g, so output is byte-stable.
void write_vtk(std::ostream& out, const Grid& grid, const std::vector<NamedField>& fields,
               const std::string& title = "pnp snapshot");
void write_vtk(const std::filesystem::path& path, const Grid& grid,
               const std::vector<NamedField>& fields, const std::string& title = "pnp snapshot");

/// Species densities (named after the species) followed by "phi".
void write_snapshot(const std::filesystem::path& path, const Simulation& sim, const State& state);

struct VtkData {
  std::array<int, 3> cells{};
  std::array<double, 3> spacing{};
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
};

/// Reader for files produced by write_vtk.
VtkData read_vtk(std::istream& in);
VtkData read_vtk(const std::filesystem::path& path);

/// CSV time series, one row per state; the initial state is row 0 with the
/// per-step columns empty.
class DiagnosticsWriter {
 public:
  DiagnosticsWriter(std::ostream& out, const std::vector<std::string>& species_names);

  void initial(const State& state, const std::vector<double>& masses);
  void row(const StepReport& report);

 private:
  std::ostream& out_;
  std::size_t n_species_;
};

}  // namespace pnp
