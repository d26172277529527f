#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pnp/limiter.hpp"
#include "pnp/marching.hpp"
#include "pnp/poisson.hpp"

namespace {

pnp::Scenario two_ion_box(int n) {
  pnp::Scenario s;
  s.grid = std::make_shared<const pnp::Grid>(3, std::vector<double>{1, 1, 1},
                                             std::vector<int>{n, n, n});
  const auto box = [](double lo, double hi, double v) {
    return [=](const pnp::Point& p, double) {
      return (p[0] >= lo && p[0] <= hi && p[1] >= lo && p[1] <= hi && p[2] >= lo && p[2] <= hi)
                 ? v
                 : 0.0;
    };
  };
  s.species = {{"rho1", 1.0, pnp::constant_field(1.0), pnp::constant_field(0.0), box(0, 0.25, 1), {}},
               {"rho2", -1.0, pnp::constant_field(1.0), pnp::constant_field(0.0), box(0, 0.25, 2), {}}};
  s.permittivity = pnp::constant_field(4 * std::numbers::pi);
  s.fixed_charge = box(0.2, 0.4, 10);
  const auto q = [](double v) { return v * v * (1 - v) * (1 - v); };
  for (auto side : {pnp::Side::Minus, pnp::Side::Plus}) {
    s.boundaries.set_dirichlet(
        1, side, [=](const pnp::Point& p, double t) { return (q(p[0]) + q(p[2])) * std::exp(-t); },
        {[=](const pnp::Point& p, double t) { return 4 * q(p[0]) * std::exp(-t); },
         [=](const pnp::Point& p, double t) { return q(p[2]) * std::exp(-t); }});
  }
  s.tau = 0.5 / n;
  return s;
}

void BM_FirstOrderStep(benchmark::State& st) {
  const pnp::Simulation sim(two_ion_box(static_cast<int>(st.range(0))));
  pnp::State s0 = sim.init_state();
  sim.step_first_order(s0, sim.scenario().tau);
  for (auto _ : st) {
    pnp::State s = s0;
    benchmark::DoNotOptimize(sim.step_first_order(s, sim.scenario().tau));
  }
}
BENCHMARK(BM_FirstOrderStep)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SecondOrderStep(benchmark::State& st) {
  const pnp::Simulation sim(two_ion_box(static_cast<int>(st.range(0))));
  pnp::State s0 = sim.init_state();
  sim.step_first_order(s0, sim.scenario().tau);
  for (auto _ : st) {
    pnp::State s = s0;
    benchmark::DoNotOptimize(sim.step_second_order(s, sim.scenario().tau, true));
  }
}
BENCHMARK(BM_SecondOrderStep)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PoissonSolve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const pnp::Simulation sim(two_ion_box(n));
  const auto f = sim.fixed_charge(0.0);
  const auto sys = sim.poisson().assemble(f, 0.0);
  for (auto _ : st) {
    benchmark::DoNotOptimize(pnp::solve(sys.matrix, sys.rhs, pnp::SolverConfig{}));
  }
}
BENCHMARK(BM_PoissonSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Limiter(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  auto grid = std::make_shared<const pnp::Grid>(3, std::vector<double>{1, 1, 1},
                                                std::vector<int>{n, n, n});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pnp::ScalarField f(grid);
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = u(rng) < 0.05 ? -0.1 * u(rng) : u(rng);
  for (auto _ : st) benchmark::DoNotOptimize(pnp::apply_limiter(f));
}
BENCHMARK(BM_Limiter)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
