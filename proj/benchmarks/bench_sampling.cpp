#include <benchmark/benchmark.h>

#include "gengsp/cascade.hpp"
#include "gengsp/sampling.hpp"

namespace {

using namespace gengsp;

void BM_PlanAndRecover(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Graph g = random_weighted_graph(n, {Topology::ErdosRenyi, 0.3}, 4);
    const SignalContext ctx(build_shift(g, ShiftKind::Laplacian), HilbertBasis::half_integer_fourier(8));
    const SubspaceSpec spec = SubspaceSpec::leading(n / 4, 8, ctx.basis());
    const GeneralizedSignal f(ctx, Matrix::Ones(static_cast<Eigen::Index>(n), 16));
    for (auto _ : state) {
        const SampleSet w = plan_samples(spec, ctx, DistributedStrategy{2});
        benchmark::DoNotOptimize(recover(w, evaluate_at(f, w), spec, ctx));
    }
}
BENCHMARK(BM_PlanAndRecover)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
    const Graph g = random_weighted_graph(static_cast<std::size_t>(state.range(0)), {Topology::ErdosRenyi, 0.1}, 5);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(g, CascadeModel::SIR, 1.0, 1.0, 10.0, {0}, seed++));
}
BENCHMARK(BM_Simulate)->Arg(50)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_StepSpectrum(benchmark::State& state) {
    const Graph g = random_weighted_graph(50, {Topology::ErdosRenyi, 0.1}, 6);
    const ShiftOperator shift = build_shift(g, ShiftKind::Adjacency);
    const HilbertBasis basis = HilbertBasis::fourier_series(static_cast<std::size_t>(state.range(0)), 10.0);
    const CascadeTrace t = simulate(g, CascadeModel::SIR, 1.0, 1.0, 10.0, {0}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(step_spectrum(t, shift, basis));
}
BENCHMARK(BM_StepSpectrum)->Arg(32)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace
