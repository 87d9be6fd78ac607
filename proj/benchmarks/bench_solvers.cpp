#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "lcns/adjoint.hpp"
#include "lcns/linsolve.hpp"
#include "lcns/verification.hpp"

using namespace lcns;

namespace {

BaseState rest(int dim, int cells, int steps) {
    // dt = h / 4 keeps the acoustic CFL check satisfied at every size.
    const double T = 0.25 * steps / cells;
    return make_family(FamilySpec{}, Grid::unit(dim, cells), FluidParams::make(0.1, 0.0), uniform_times(T, steps));
}

VectorField smooth(const Grid& g) {
    VectorField v(g, true);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const auto c = g.coords(i);
        double s = 1.0;
        for (int a = 0; a < g.dim; ++a) s *= std::sin(std::numbers::pi * g.center(a, c[a]));
        for (int a = 0; a < g.dim; ++a) v.at(a, i) = s;
    }
    return v;
}

void BM_ForwardSolve(benchmark::State& st) {
    const int dim = static_cast<int>(st.range(0)), cells = static_cast<int>(st.range(1));
    const BaseState b = rest(dim, cells, 32);
    const Grid& g = b.grid();
    const ControlField U(g, 32, b.dt(), 10.0);
    const VectorField u0 = smooth(g);
    for (auto _ : st) benchmark::DoNotOptimize(solve_linearized(b, U, ScalarField(g), u0));
    st.SetItemsProcessed(st.iterations() * 32);
}
BENCHMARK(BM_ForwardSolve)->Args({1, 256})->Args({2, 32})->Args({3, 12})->Unit(benchmark::kMillisecond);

void BM_AdjointSolve(benchmark::State& st) {
    const int dim = static_cast<int>(st.range(0)), cells = static_cast<int>(st.range(1));
    const AdjointMode mode = st.range(2) ? AdjointMode::Continuous : AdjointMode::ExactTranspose;
    const BaseState b = rest(dim, cells, 32);
    const Grid& g = b.grid();
    const StateTrajectory y = solve_linearized(b, ControlField(g, 32, b.dt(), 10.0), ScalarField(g), VectorField(g, true));
    Targets t = Targets::zero(g, 33);
    for (auto& u : t.u_d) u = smooth(g);
    AdjointSources src;
    src.targets = &t;
    AdjointOptions o;
    o.mode = mode;
    for (auto _ : st) benchmark::DoNotOptimize(solve_adjoint(b, y, src, o));
}
BENCHMARK(BM_AdjointSolve)->Args({1, 256, 0})->Args({1, 256, 1})->Args({2, 32, 0})->Unit(benchmark::kMillisecond);

void BM_ViscousSolve(benchmark::State& st) {
    const Grid g = Grid::unit(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const VectorField rhs = smooth(g);
    for (auto _ : st) benchmark::DoNotOptimize(solve_viscous(nullptr, 1.0, 1.0, 0.5, rhs));
}
BENCHMARK(BM_ViscousSolve)->Args({2, 32})->Args({2, 64})->Args({3, 16})->Unit(benchmark::kMillisecond);

void BM_Lame(benchmark::State& st) {
    const Grid g = Grid::unit(2, static_cast<int>(st.range(0)));
    const VectorField F = smooth(g);
    for (auto _ : st) benchmark::DoNotOptimize(solve_lame(F, 1.0, -0.5));
}
BENCHMARK(BM_Lame)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
