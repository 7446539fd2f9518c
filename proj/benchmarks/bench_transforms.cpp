#include <benchmark/benchmark.h>

#include <random>

#include "gengsp/graph.hpp"
#include "gengsp/signal.hpp"

namespace {

using namespace gengsp;

Matrix random_grid(Eigen::Index rows, Eigen::Index cols) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(nd(rng), nd(rng));
    return m;
}

void BM_FTransform(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto modes = static_cast<std::size_t>(state.range(1));
    const Graph g = random_weighted_graph(n, {Topology::ErdosRenyi, 0.3}, 1);
    const SignalContext ctx(build_shift(g, ShiftKind::Laplacian), HilbertBasis::half_integer_fourier(modes));
    const GeneralizedSignal f(ctx, random_grid(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ctx.modes())));
    const FunctionSignal pointwise = as_function(f);
    for (auto _ : state) benchmark::DoNotOptimize(f_transform(pointwise, ctx));
}
BENCHMARK(BM_FTransform)->Args({10, 8})->Args({30, 8})->Args({30, 16})->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Graph g = random_weighted_graph(n, {Topology::ErdosRenyi, 0.3}, 1);
    const SignalContext ctx(build_shift(g, ShiftKind::Adjacency), HilbertBasis::chebyshev(16));
    const GeneralizedSignal f(ctx, random_grid(static_cast<Eigen::Index>(n), 16));
    double x = -0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.at(x));
        x = x > 0.9 ? -0.9 : x + 0.01;
    }
}
BENCHMARK(BM_Evaluate)->Arg(10)->Arg(100);

void BM_BuildShift(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Graph g = random_weighted_graph(n, {Topology::ErdosRenyi, 0.1}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(build_shift(g, ShiftKind::Laplacian));
}
BENCHMARK(BM_BuildShift)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
