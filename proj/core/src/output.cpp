#include "pnp/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pnp/diagnostics.hpp"
#include "pnp/error.hpp"

namespace pnp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_vtk(std::ostream& out, const Grid& grid, const std::vector<NamedField>& fields,
               const std::string& title) {
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};
  for (int j = 0; j < grid.dim(); ++j) {
    n[j] = grid.count(j);
    h[j] = grid.spacing(j);
  }
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << n[0] + 1 << ' ' << n[1] + 1 << ' ' << n[2] + 1 << '\n';
  out << "ORIGIN 0 0 0\n";
  out << "SPACING " << fmt(h[0]) << ' ' << fmt(h[1]) << ' ' << fmt(h[2]) << '\n';
  out << "CELL_DATA " << grid.num_cells() << '\n';
  for (const NamedField& f : fields) {
    if (f.field->size() != grid.num_cells()) throw InvalidArgument("field size mismatch");
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < f.field->size(); ++c) out << fmt((*f.field)[c]) << '\n';
  }
  if (!out) throw Error("VTK write failed");
}

void write_vtk(const std::filesystem::path& path, const Grid& grid,
               const std::vector<NamedField>& fields, const std::string& title) {
  std::ofstream out = open_out(path);
  write_vtk(out, grid, fields, title);
}

void write_snapshot(const std::filesystem::path& path, const Simulation& sim, const State& state) {
  std::vector<NamedField> fields;
  for (std::size_t i = 0; i < state.densities.size(); ++i) {
    fields.push_back({sim.scenario().species[i].name, &state.densities[i]});
  }
  fields.push_back({"phi", &state.phi});
  std::ostringstream title;
  title << "pnp step " << state.step << " t=" << fmt(state.time);
  write_vtk(path, sim.grid(), fields, title.str());
}

VtkData read_vtk(std::istream& in) {
  VtkData d;
  std::string line;
  std::size_t n_cells = 0;
  auto bad = [](const std::string& what) { return Error("VTK read: " + what); };
  if (!std::getline(in, line) || line.rfind("# vtk", 0) != 0) throw bad("missing header");
  std::getline(in, line);  // title
  std::string word;
  while (in >> word) {
    if (word == "ASCII" || word == "DATASET" || word == "STRUCTURED_POINTS") continue;
    if (word == "DIMENSIONS") {
      for (int& c : d.cells) {
        in >> c;
        c -= 1;
      }
    } else if (word == "ORIGIN") {
      double o;
      in >> o >> o >> o;
    } else if (word == "SPACING") {
      for (double& h : d.spacing) in >> h;
    } else if (word == "CELL_DATA") {
      in >> n_cells;
    } else if (word == "SCALARS") {
      std::string name, type, table;
      int comps = 0;
      in >> name >> type >> comps >> table >> table;
      std::vector<double> v(n_cells);
      for (double& x : v) {
        if (!(in >> x)) throw bad("truncated data for " + name);
      }
      d.names.push_back(name);
      d.values.push_back(std::move(v));
    } else {
      throw bad("unexpected token '" + word + "'");
    }
  }
  return d;
}

VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_vtk(in);
}

DiagnosticsWriter::DiagnosticsWriter(std::ostream& out, const std::vector<std::string>& names)
    : out_(out), n_species_(names.size()) {
  out_ << "step,time";
  for (const auto& n : names) out_ << ",mass_" << n;
  out_ << ",energy,dissipation,energy_change,energy_margin,min_density,tau_star,"
          "limiter_patches,limiter_max_patch,limiter_min_theta,solver_iterations\n";
}

void DiagnosticsWriter::initial(const State& state, const std::vector<double>& masses) {
  double min_density = INFINITY;
  for (const auto& r : state.densities) min_density = std::min(min_density, r.min());
  out_ << state.step << ',' << fmt(state.time);
  for (double m : masses) out_ << ',' << fmt(m);
  out_ << ',' << fmt(state.energy) << ",,,," << fmt(min_density) << ','
       << (state.tau_star ? fmt(state.tau_star->value()) : "") << ",0,0,1,0\n";
}

void DiagnosticsWriter::row(const StepReport& r) {
  out_ << r.step << ',' << fmt(r.time);
  for (double m : r.masses) out_ << ',' << fmt(m);
  out_ << ',' << fmt(r.energy) << ',' << fmt(r.dissipation) << ',' << fmt(r.energy_change) << ','
       << fmt(r.energy_margin) << ',' << fmt(r.min_density) << ',' << fmt(r.tau_star) << ','
       << r.limiter_patches << ',' << r.limiter_max_patch << ',' << fmt(r.limiter_min_theta)
       << ',' << r.solver_iterations << '\n';
  if (!out_) throw Error("diagnostics write failed");
}

}  // namespace pnp
