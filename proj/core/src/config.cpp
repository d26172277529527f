#include "pnp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pnp/error.hpp"
#include "pnp/expression.hpp"
#include "pnp/marching.hpp"

namespace pnp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& required(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

AnalyticField field(const json& v, const std::string& path) {
  if (v.is_number()) return constant_field(number(v, path));
  if (v.is_string()) {
    try {
      return expression_field(v.get<std::string>());
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }
  fail(path, "expected a number or an expression string");
}

template <class Enum>
Enum choice(const json& v, const std::string& path,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  const std::string s = text(v, path);
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) {
    (void)value;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  fail(path, "'" + s + "' is not one of " + allowed);
}

std::shared_ptr<const Grid> parse_grid(const json& g, const std::string& path) {
  only_keys(g, path, {"dim", "lengths", "counts"});
  const int dim = integer(required(g, path, "dim"), join(path, "dim"));
  if (dim < 1 || dim > 3) fail(join(path, "dim"), "must be 1, 2 or 3");
  std::vector<double> lengths;
  std::vector<int> counts;
  const json& l = required(g, path, "lengths");
  const json& c = required(g, path, "counts");
  if (!l.is_array() || static_cast<int>(l.size()) != dim) {
    fail(join(path, "lengths"), "expected " + std::to_string(dim) + " numbers");
  }
  if (!c.is_array() || static_cast<int>(c.size()) != dim) {
    fail(join(path, "counts"), "expected " + std::to_string(dim) + " integers");
  }
  for (int j = 0; j < dim; ++j) {
    lengths.push_back(number(l[j], join(path, "lengths") + "[" + std::to_string(j) + "]"));
    counts.push_back(integer(c[j], join(path, "counts") + "[" + std::to_string(j) + "]"));
  }
  try {
    return std::make_shared<const Grid>(dim, lengths, counts);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

SpeciesSpec parse_species(const json& s, const std::string& path) {
  only_keys(s, path, {"name", "charge", "diffusion", "chemical_potential", "initial", "source"});
  SpeciesSpec sp;
  sp.name = text(required(s, path, "name"), join(path, "name"));
  sp.charge = number(required(s, path, "charge"), join(path, "charge"));
  if (s.contains("diffusion")) sp.diffusion = field(s["diffusion"], join(path, "diffusion"));
  if (s.contains("chemical_potential")) {
    sp.chemical_potential = field(s["chemical_potential"], join(path, "chemical_potential"));
  }
  sp.initial = field(required(s, path, "initial"), join(path, "initial"));
  if (s.contains("source")) sp.source = field(s["source"], join(path, "source"));
  return sp;
}

const std::pair<const char*, std::pair<int, Side>> kPlanes[] = {
    {"x-", {0, Side::Minus}}, {"x+", {0, Side::Plus}}, {"y-", {1, Side::Minus}},
    {"y+", {1, Side::Plus}},  {"z-", {2, Side::Minus}}, {"z+", {2, Side::Plus}}};

BoundarySpec parse_boundaries(const json& b, const std::string& path, int dim,
                              std::size_t n_species) {
  only_keys(b, path, {"x-", "x+", "y-", "y+", "z-", "z+"});
  BoundarySpec spec;
  for (const auto& [name, plane] : kPlanes) {
    if (!b.contains(name)) continue;
    const std::string p = join(path, name);
    if (plane.first >= dim) fail(p, "axis beyond the grid dimension");
    const json& e = b[name];
    only_keys(e, p, {"type", "potential", "densities"});
    const auto kind = choice<BoundaryKind>(required(e, p, "type"), join(p, "type"),
                                           {{"no_flux", BoundaryKind::NoFlux},
                                            {"dirichlet", BoundaryKind::Dirichlet}});
    if (kind == BoundaryKind::NoFlux) {
      if (e.contains("potential") || e.contains("densities")) {
        fail(p, "no_flux planes take no potential or densities");
      }
      continue;
    }
    AnalyticField phi = field(required(e, p, "potential"), join(p, "potential"));
    const json& d = required(e, p, "densities");
    if (!d.is_array() || d.size() != n_species) {
      fail(join(p, "densities"), "expected one trace per species (" +
                                     std::to_string(n_species) + ")");
    }
    std::vector<AnalyticField> traces;
    for (std::size_t i = 0; i < d.size(); ++i) {
      traces.push_back(field(d[i], join(p, "densities") + "[" + std::to_string(i) + "]"));
    }
    spec.set_dirichlet(plane.first, plane.second, std::move(phi), std::move(traces));
  }
  return spec;
}

double min_spacing(const Grid& g) {
  double h = g.spacing(0);
  for (int j = 1; j < g.dim(); ++j) h = std::min(h, g.spacing(j));
  return h;
}

}  // namespace

RunConfig parse_config(const std::string& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<document>: ") + e.what());
  }
  only_keys(doc, "", {"grid", "thermal_energy", "permittivity", "fixed_charge",
                      "neutralize_fixed_charge", "species", "boundaries", "time", "scheme",
                      "solver", "steady", "output"});
  RunConfig cfg;
  Scenario& s = cfg.scenario;
  s.grid = parse_grid(required(doc, "", "grid"), "grid");

  if (doc.contains("thermal_energy")) {
    s.thermal_energy = number(doc["thermal_energy"], "thermal_energy");
    if (!(s.thermal_energy > 0.0)) fail("thermal_energy", "must be positive");
  }
  if (doc.contains("permittivity")) s.permittivity = field(doc["permittivity"], "permittivity");
  if (doc.contains("fixed_charge")) s.fixed_charge = field(doc["fixed_charge"], "fixed_charge");
  if (doc.contains("neutralize_fixed_charge")) {
    s.neutralize_fixed_charge = boolean(doc["neutralize_fixed_charge"], "neutralize_fixed_charge");
  }

  const json& species = required(doc, "", "species");
  if (!species.is_array() || species.empty()) fail("species", "expected a non-empty array");
  for (std::size_t i = 0; i < species.size(); ++i) {
    s.species.push_back(parse_species(species[i], "species[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (s.species[i].name == s.species[k].name) {
        fail("species[" + std::to_string(i) + "].name", "duplicate name '" + s.species[i].name + "'");
      }
    }
  }

  if (doc.contains("boundaries")) {
    s.boundaries = parse_boundaries(doc["boundaries"], "boundaries", s.grid->dim(),
                                    s.species.size());
  }

  const json& time = required(doc, "", "time");
  only_keys(time, "time", {"tau", "tau_over_h", "end"});
  if (time.contains("tau") == time.contains("tau_over_h")) {
    fail("time", "give exactly one of tau, tau_over_h");
  }
  if (time.contains("tau")) {
    s.tau = number(time["tau"], "time.tau");
    if (!(s.tau > 0.0)) fail("time.tau", "must be positive");
  } else {
    cfg.tau_over_h = number(time["tau_over_h"], "time.tau_over_h");
    if (!(cfg.tau_over_h > 0.0)) fail("time.tau_over_h", "must be positive");
    s.tau = cfg.tau_over_h * min_spacing(*s.grid);
  }
  s.end_time = number(required(time, "time", "end"), "time.end");
  if (s.end_time < 0.0) fail("time.end", "must be non-negative");

  if (doc.contains("scheme")) {
    const json& sc = doc["scheme"];
    only_keys(sc, "scheme", {"order", "mean", "limiter", "data_time"});
    if (sc.contains("order")) {
      s.order = choice<SchemeOrder>(sc["order"], "scheme.order",
                                    {{"first", SchemeOrder::First}, {"second", SchemeOrder::Second}});
    }
    if (sc.contains("mean")) {
      s.mean = choice<InterfaceMean>(sc["mean"], "scheme.mean",
                                     {{"harmonic", InterfaceMean::Harmonic},
                                      {"geometric", InterfaceMean::Geometric},
                                      {"algebraic", InterfaceMean::Algebraic}});
    }
    if (sc.contains("limiter")) s.limiter = boolean(sc["limiter"], "scheme.limiter");
    if (sc.contains("data_time")) {
      s.data_time = choice<DataTime>(sc["data_time"], "scheme.data_time",
                                     {{"start", DataTime::StepStart}, {"end", DataTime::StepEnd}});
    }
  }

  if (doc.contains("solver")) {
    const json& so = doc["solver"];
    only_keys(so, "solver", {"method", "preconditioner", "tolerance", "max_iterations"});
    if (so.contains("method")) {
      s.solver.method = choice<KrylovMethod>(so["method"], "solver.method",
                                             {{"cg", KrylovMethod::CG},
                                              {"bicgstab", KrylovMethod::BiCGStab}});
    }
    if (so.contains("preconditioner")) {
      s.solver.preconditioner = choice<Preconditioner>(
          so["preconditioner"], "solver.preconditioner",
          {{"none", Preconditioner::None}, {"jacobi", Preconditioner::Jacobi},
           {"ilu0", Preconditioner::ILU0}});
    }
    if (so.contains("tolerance")) s.solver.tolerance = number(so["tolerance"], "solver.tolerance");
    if (so.contains("max_iterations")) {
      s.solver.max_iterations = integer(so["max_iterations"], "solver.max_iterations");
    }
    try {
      s.solver.validate();
    } catch (const Error& e) {
      fail("solver", e.what());
    }
  }

  if (doc.contains("steady")) {
    const json& st = doc["steady"];
    only_keys(st, "steady", {"tolerance", "max_steps"});
    if (st.contains("tolerance")) {
      cfg.steady.tolerance = number(st["tolerance"], "steady.tolerance");
      if (!(cfg.steady.tolerance > 0.0)) fail("steady.tolerance", "must be positive");
    }
    if (st.contains("max_steps")) {
      const int m = integer(st["max_steps"], "steady.max_steps");
      if (m < 1) fail("steady.max_steps", "must be at least 1");
      cfg.steady.max_steps = static_cast<std::size_t>(m);
    }
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    only_keys(o, "output",
              {"directory", "snapshot_every", "diagnostics_csv", "vtk", "matrix_dump"});
    if (o.contains("directory")) cfg.output.directory = text(o["directory"], "output.directory");
    if (o.contains("snapshot_every")) {
      cfg.output.snapshot_every = integer(o["snapshot_every"], "output.snapshot_every");
      if (cfg.output.snapshot_every < 1) fail("output.snapshot_every", "must be at least 1");
    }
    if (o.contains("diagnostics_csv")) {
      cfg.output.diagnostics_csv = boolean(o["diagnostics_csv"], "output.diagnostics_csv");
    }
    if (o.contains("vtk")) cfg.output.vtk = boolean(o["vtk"], "output.vtk");
    if (o.contains("matrix_dump")) cfg.output.matrix_dump = boolean(o["matrix_dump"], "output.matrix_dump");
  }

  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("<document>: ") + e.what());
  }
  check_fields(s);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void override_grid(RunConfig& config, const std::vector<int>& counts) {
  const Grid& g = *config.scenario.grid;
  std::vector<int> n;
  if (counts.size() == 1) {
    n.assign(g.dim(), counts[0]);
  } else if (static_cast<int>(counts.size()) == g.dim()) {
    n = counts;
  } else {
    throw ConfigError("--grid: expected 1 or " + std::to_string(g.dim()) + " counts");
  }
  std::vector<double> lengths;
  for (int j = 0; j < g.dim(); ++j) lengths.push_back(g.length(j));
  config.scenario.grid = std::make_shared<const Grid>(g.dim(), lengths, n);
  if (config.tau_over_h > 0.0) {
    config.scenario.tau = config.tau_over_h * min_spacing(*config.scenario.grid);
  }
  check_fields(config.scenario);
}

void check_fields(const Scenario& s) {
  try {
    PoissonOperator poisson(s.grid, s.permittivity, s.boundaries);
    (void)poisson;
  } catch (const Error& e) {
    fail("permittivity", e.what());
  }
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    const std::string path = "species[" + std::to_string(i) + "]";
    try {
      TransportOperator op(s.grid, s.species[i], i, s.boundaries, s.thermal_energy, s.mean);
      (void)op;
    } catch (const Error& e) {
      fail(join(path, "diffusion"), e.what());
    }
    try {
      const ScalarField rho = sample_initial(s.grid, s.species[i].initial);
      if (rho.min() < 0.0) fail(join(path, "initial"), "density must be non-negative");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(join(path, "initial"), e.what());
    }
  }
  // Compatibility of pure no-flux problems is decided by the first solve.
  try {
    const Simulation sim(s);
    if (sim.poisson().gauge() == GaugeMode::PureNeumann) (void)sim.init_state();
  } catch (const Error& e) {
    fail("fixed_charge", e.what());
  }
}

}  // namespace pnp
