// pnp: command-line driver for the PNP finite-volume solver.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnp/config.hpp"
#include "pnp/diagnostics.hpp"
#include "pnp/error.hpp"
#include "pnp/fuzz.hpp"
#include "pnp/marching.hpp"
#include "pnp/mms.hpp"
#include "pnp/output.hpp"

namespace fs = std::filesystem;

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("PNP_LOG_LEVEL");
  if (!env) return Level::Info;
  const std::string v = env;
  if (v == "error") return Level::Error;
  if (v == "warn") return Level::Warn;
  if (v == "debug") return Level::Debug;
  return Level::Info;
}

template <class... Args>
void log(Level level, const char* format, Args... args) {
  static const Level threshold = log_level();
  if (level > threshold) return;
  static const char* tags[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] ", tags[static_cast<int>(level)]);
  if constexpr (sizeof...(Args) == 0) {
    std::fputs(format, stderr);
  } else {
    std::fprintf(stderr, format, args...);
  }
  std::fputc('\n', stderr);
}

std::vector<int> parse_counts(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    std::size_t used = 0;
    const int n = std::stoi(item, &used);
    if (used != item.size() || n < 1) throw pnp::ConfigError("--grid: bad count '" + item + "'");
    out.push_back(n);
  }
  if (out.empty()) throw pnp::ConfigError("--grid: empty");
  return out;
}

struct Overrides {
  double tau = 0.0;
  std::string grid;
  std::string scheme;
  std::string mean;
  std::string limiter;
  std::string out;
  int snapshot_every = 0;
};

void apply(const Overrides& o, pnp::RunConfig& cfg) {
  if (!o.grid.empty()) pnp::override_grid(cfg, parse_counts(o.grid));
  if (o.tau > 0.0) {
    cfg.scenario.tau = o.tau;
    cfg.tau_over_h = 0.0;
  }
  if (!o.scheme.empty()) {
    cfg.scenario.order = o.scheme == "second" ? pnp::SchemeOrder::Second : pnp::SchemeOrder::First;
  }
  if (!o.mean.empty()) {
    cfg.scenario.mean = o.mean == "geometric"   ? pnp::InterfaceMean::Geometric
                        : o.mean == "algebraic" ? pnp::InterfaceMean::Algebraic
                                                : pnp::InterfaceMean::Harmonic;
  }
  if (!o.limiter.empty()) cfg.scenario.limiter = o.limiter == "on";
  if (!o.out.empty()) cfg.output.directory = o.out;
  if (o.snapshot_every > 0) cfg.output.snapshot_every = o.snapshot_every;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--tau", o.tau, "Time step")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", o.grid, "Cells per axis: N or NxMxK");
  cmd->add_option("--scheme", o.scheme, "Time scheme")->check(CLI::IsMember({"first", "second"}));
  cmd->add_option("--mean", o.mean, "Interface mean")
      ->check(CLI::IsMember({"harmonic", "geometric", "algebraic"}));
  cmd->add_option("--limiter", o.limiter, "Positivity limiter")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--snapshot-every", o.snapshot_every, "VTK cadence in steps")
      ->check(CLI::PositiveNumber);
}

std::vector<double> masses(const pnp::State& s) {
  std::vector<double> m;
  for (const auto& r : s.densities) m.push_back(pnp::total_mass(r));
  return m;
}

std::vector<std::string> species_names(const pnp::Scenario& s) {
  std::vector<std::string> names;
  for (const auto& sp : s.species) names.push_back(sp.name);
  return names;
}

std::string snapshot_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.vtk", step);
  return buf;
}

void dump_matrices(const pnp::Simulation& sim, const pnp::State& s, const fs::path& dir) {
  pnp::write_matrix_market(sim.poisson().matrix(), (dir / "poisson.mtx").string());
  for (std::size_t i = 0; i < s.densities.size(); ++i) {
    const auto& op = sim.transport(i);
    pnp::DensityStepData data;
    data.density = s.densities[i].values();
    data.psi = s.psi[i];
    data.boundary_psi = [&](const pnp::FaceId& f) { return op.boundary_psi(f, s.time); };
    data.tau = sim.scenario().tau;
    data.trace_time = s.time;
    data.source_time = s.time;
    const auto sys = op.assemble(data);
    pnp::write_matrix_market(sys.matrix, (dir / ("density_" + op.species().name + ".mtx")).string());
  }
}

int cmd_run(const std::string& path, const Overrides& o) {
  pnp::RunConfig cfg = pnp::load_config(path);
  apply(o, cfg);
  const auto& out = cfg.output;
  fs::create_directories(out.directory);
  const pnp::Simulation sim(cfg.scenario);
  log(Level::Info, "grid %zu cells, tau %.6g, end %.6g, %s order", sim.grid().num_cells(),
      cfg.scenario.tau, cfg.scenario.end_time, pnp::to_string(cfg.scenario.order).c_str());

  std::ofstream csv;
  std::unique_ptr<pnp::DiagnosticsWriter> diag;
  if (out.diagnostics_csv) {
    csv.open(out.directory / "diagnostics.csv");
    if (!csv) throw pnp::Error("cannot write diagnostics.csv");
    diag = std::make_unique<pnp::DiagnosticsWriter>(csv, species_names(cfg.scenario));
  }

  pnp::State initial = sim.init_state();
  if (diag) diag->initial(initial, masses(initial));
  if (out.vtk) pnp::write_snapshot(out.directory / snapshot_name(0), sim, initial);
  if (out.matrix_dump) dump_matrices(sim, initial, out.directory);

  std::size_t last_vtk = 0;
  const auto callback = [&](const pnp::State& s, const pnp::StepReport& r) {
    if (diag) diag->row(r);
    if (out.vtk && s.step % static_cast<std::size_t>(out.snapshot_every) == 0) {
      pnp::write_snapshot(out.directory / snapshot_name(s.step), sim, s);
      last_vtk = s.step;
    }
    log(Level::Debug, "step %zu t=%.6g E=%.10g min=%.3g iters=%d", r.step, r.time, r.energy,
        r.min_density, r.solver_iterations);
  };
  pnp::RunResult result = sim.run(std::move(initial), callback);
  if (out.vtk && last_vtk != result.state.step) {
    pnp::write_snapshot(out.directory / snapshot_name(result.state.step), sim, result.state);
  }
  std::size_t patches = 0;
  for (const auto& r : result.reports) patches += r.limiter_patches;
  log(Level::Info, "done: %zu steps, t=%.6g, E=%.10g, limiter patches %zu",
      result.reports.size(), result.state.time, result.state.energy, patches);
  return 0;
}

int cmd_steady(const std::string& path, const Overrides& o) {
  pnp::RunConfig cfg = pnp::load_config(path);
  apply(o, cfg);
  const pnp::Simulation sim(cfg.scenario);
  const pnp::SteadyResult r = sim.run_to_steady(cfg.steady.tolerance, cfg.steady.max_steps);
  std::printf("species,boltzmann_constant\n");
  for (std::size_t i = 0; i < r.boltzmann_constants.size(); ++i) {
    std::printf("%s,%.17g\n", cfg.scenario.species[i].name.c_str(), r.boltzmann_constants[i]);
  }
  std::printf("# steps %zu, time %.17g, residual %.3e\n", r.steps, r.state.time, r.residual);
  if (!cfg.output.directory.empty() && !o.out.empty()) {
    fs::create_directories(cfg.output.directory);
    pnp::write_snapshot(cfg.output.directory / "steady.vtk", sim, r.state);
  }
  return 0;
}

pnp::mms::SweepOptions mms_file(const std::string& path, std::vector<int>& grids) {
  std::ifstream in(path);
  if (!in) throw pnp::ConfigError(path + ": cannot open");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw pnp::ConfigError(path + ": " + e.what());
  }
  pnp::mms::SweepOptions o;
  for (const auto& [key, v] : doc.items()) {
    if (key == "preset") {
      o = pnp::mms::preset(v.get<std::string>());
    }
  }
  for (const auto& [key, v] : doc.items()) {
    if (key == "preset") continue;
    if (key == "order") {
      o.order = v.get<std::string>() == "second" ? pnp::SchemeOrder::Second : pnp::SchemeOrder::First;
    } else if (key == "tau_rule") {
      o.tau_rule = v.get<std::string>() == "h" ? pnp::mms::TauRule::H : pnp::mms::TauRule::H2;
    } else if (key == "grids") {
      grids = v.get<std::vector<int>>();
    } else if (key == "limiter") {
      o.limiter = v.get<bool>();
    } else if (key == "end_time") {
      o.end_time = v.get<double>();
    } else if (key == "data_time") {
      o.data_time = v.get<std::string>() == "end" ? pnp::DataTime::StepEnd : pnp::DataTime::StepStart;
    } else {
      throw pnp::ConfigError(key + ": unknown key");
    }
  }
  return o;
}

int cmd_mms(const std::string& what, const std::string& grids_text, const std::string& limiter,
            const std::string& mean, const std::string& out) {
  std::vector<int> grids{8, 16, 32, 64};
  pnp::mms::SweepOptions o =
      pnp::mms::is_preset(what) ? pnp::mms::preset(what) : mms_file(what, grids);
  if (!grids_text.empty()) {
    grids.clear();
    std::stringstream ss(grids_text);
    std::string item;
    while (std::getline(ss, item, ',')) grids.push_back(std::stoi(item));
  }
  if (!limiter.empty()) o.limiter = limiter == "on";
  if (mean == "geometric") o.mean = pnp::InterfaceMean::Geometric;
  if (mean == "algebraic") o.mean = pnp::InterfaceMean::Algebraic;
  log(Level::Info, "mms %s, %s order, tau = %s", what.c_str(), pnp::to_string(o.order).c_str(),
      pnp::mms::to_string(o.tau_rule).c_str());
  const auto table = pnp::mms::convergence_sweep(grids, o);
  if (out.empty()) {
    table.write_csv(std::cout);
  } else {
    std::ofstream f(out);
    if (!f) throw pnp::Error("cannot write " + out);
    table.write_csv(f);
  }
  for (const auto& r : table.rows) {
    if (!r.failure.empty()) return 1;
  }
  return 0;
}

int cmd_fuzz(std::uint64_t seed, int count, int steps) {
  std::mt19937_64 rng(seed);
  double worst = INFINITY;
  for (int k = 0; k < count; ++k) {
    const pnp::Scenario s = pnp::random_scenario(rng);
    const auto c = pnp::check_first_order_positivity(s, static_cast<std::size_t>(steps));
    worst = std::min(worst, c.worst_ratio);
    log(Level::Debug, "scenario %d: d=%d cells=%zu tau=%g min/max=%.3e", k, s.grid->dim(),
        s.grid->num_cells(), s.tau, c.worst_ratio);
  }
  std::printf("scenarios %d, worst min/max %.3e\n", count, worst);
  return worst >= -1e-12 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume Poisson-Nernst-Planck solver", "pnp"};
  app.require_subcommand(0, 1);

  Overrides run_o, steady_o;
  std::string run_config, steady_config;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "March a configuration to its end time");
  run->add_option("config", run_config, "JSON configuration")->required()->check(CLI::ExistingFile);
  add_overrides(run, run_o);
  auto* seed_opt = run->add_option("--seed", seed,
                                   "Ignore the config and run the positivity fuzz with this seed");

  std::string mms_what, mms_grids, mms_limiter, mms_mean, mms_out;
  auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence table (CSV)");
  mms->add_option("case", mms_what, "table1, table2, table3 or a JSON sweep file")->required();
  mms->add_option("--grids", mms_grids, "Comma-separated cells per axis, e.g. 8,16,32");
  mms->add_option("--limiter", mms_limiter)->check(CLI::IsMember({"on", "off"}));
  mms->add_option("--mean", mms_mean)->check(CLI::IsMember({"harmonic", "geometric", "algebraic"}));
  mms->add_option("--out", mms_out, "Write the CSV here instead of stdout");

  auto* steady = app.add_subcommand("steady", "March to the Boltzmann steady state");
  steady->add_option("config", steady_config, "JSON configuration")->required()->check(CLI::ExistingFile);
  add_overrides(steady, steady_o);

  int fuzz_count = 200, fuzz_steps = 3;
  run->add_option("--fuzz-count", fuzz_count, "Scenarios for --seed")->check(CLI::PositiveNumber);
  run->add_option("--fuzz-steps", fuzz_steps, "Steps per scenario for --seed")
      ->check(CLI::PositiveNumber);

  if (argc < 2) {
    std::cout << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  seed_given = seed_opt->count() > 0;

  try {
    if (run->parsed()) {
      return seed_given ? cmd_fuzz(seed, fuzz_count, fuzz_steps) : cmd_run(run_config, run_o);
    }
    if (steady->parsed()) return cmd_steady(steady_config, steady_o);
    if (mms->parsed()) return cmd_mms(mms_what, mms_grids, mms_limiter, mms_mean, mms_out);
    std::cout << app.help();
    return 2;
  } catch (const pnp::ConfigError& e) {
    log(Level::Error, "%s", e.what());
    return 2;
  } catch (const std::exception& e) {
    log(Level::Error, "%s", e.what());
    return 1;
  }
}
