#include <benchmark/benchmark.h>

#include "gengsp/graph.hpp"

namespace {

using namespace gengsp;

Matrix leading(std::size_t n, std::size_t k) {
    const Graph g = random_weighted_graph(n, {Topology::Complete, 0.0}, 3);
    return build_shift(g, ShiftKind::Laplacian).eigenvectors.leftCols(static_cast<Eigen::Index>(k)).cast<Complex>();
}

void BM_DeltaExact(benchmark::State& state) {
    const Matrix phi = leading(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(delta(phi));
}
BENCHMARK(BM_DeltaExact)->Args({8, 2})->Args({12, 3})->Args({16, 4})->Unit(benchmark::kMicrosecond);

void BM_PartitionVertices(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix phi = leading(n, 5);
    for (auto _ : state) benchmark::DoNotOptimize(partition_vertices(phi, n / 5));
}
BENCHMARK(BM_PartitionVertices)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace
