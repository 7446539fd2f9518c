#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "gengsp/numerics.hpp"
#include "gengsp/signal.hpp"

namespace gengsp {

struct SamplePoint {
    std::size_t vertex = 0;
    double x = 0.0;

    friend bool operator==(const SamplePoint&, const SamplePoint&) = default;
};

/// Finite W in V x Omega, in sample order.
struct SampleSet {
    std::vector<SamplePoint> points;

    std::size_t size() const noexcept { return points.size(); }
    /// k_v(W) for v in [0, n).
    std::vector<std::size_t> counts(std::size_t n) const;
    /// Throws OutOfDomain for points outside V x Omega, InvalidArgument for repeats.
    void validate(const SignalContext& context) const;
};

/// Phi' x Xi' given by eigenvector indices and basis positions.
struct SubspaceSpec {
    std::vector<std::size_t> phi_indices;
    std::vector<std::size_t> xi_positions;

    std::size_t dimension() const noexcept { return phi_indices.size() * xi_positions.size(); }
    void validate(const SignalContext& context) const;

    /// First k eigenvectors and the B lowest-|frequency| basis elements.
    static SubspaceSpec leading(std::size_t k, std::size_t b, const HilbertBasis& basis);
};

/// Parses "k=2,B=10" into SubspaceSpec::leading.
SubspaceSpec parse_subspace(const std::string& text, const HilbertBasis& basis);

/// Rows follow the sample order; column a * |Xi'| + b holds phi_{a}(v) xi_{b}(x).
Matrix sampling_matrix(const SampleSet& w, const SubspaceSpec& spec, const SignalContext& context);

bool determines(const SampleSet& w, const SubspaceSpec& spec, const SignalContext& context,
                double rel_tol = kDefaultRankTol);

struct VertexSubsetStrategy {};

struct DistributedStrategy {
    std::size_t blocks = 2;
};

enum class PointDistribution { Uniform, TruncatedNormal };

struct RandomAsyncStrategy {
    PointDistribution distribution = PointDistribution::Uniform;
    double mean = 0.0;
    double stddev = 1.0;
    /// Per-vertex counts k_v; a single entry applies to every vertex.
    std::vector<std::size_t> counts;
    std::uint64_t seed = 0;
};

using SamplingStrategy = std::variant<VertexSubsetStrategy, DistributedStrategy, RandomAsyncStrategy>;

/// "vertex_subset", "distributed:t", "random:k[:uniform]" or
/// "random:k:normal:mean:stddev". The seed is supplied separately.
SamplingStrategy parse_strategy(const std::string& text, std::uint64_t seed = 0);

/// Distinct interior points of Omega spaced evenly, or for a discrete Omega
/// the vertices selected from the rows of the Xi' restriction.
std::vector<double> default_points(const HilbertBasis& basis, const std::vector<std::size_t>& xi_positions);

/// One draw of a random asynchronous plan with the given per-vertex counts,
/// without checking that it determines anything.
SampleSet draw_random(const RandomAsyncStrategy& strategy, const SignalContext& context, std::mt19937_64& rng);

/// Throws InfeasiblePartition for an unreachable block count and PlanFailed
/// after 10 random draws that fail to determine the subspace.
SampleSet plan_samples(const SubspaceSpec& spec, const SignalContext& context, const SamplingStrategy& strategy);

struct Recovery {
    /// Full n x modes grid with the recovered coefficients scattered into Phi' x Xi'.
    Matrix grid;
    double residual_norm = 0.0;
    std::size_t rank = 0;
    bool rank_deficient = false;
};

/// Plain least squares of the sampling matrix against the values.
Recovery recover(const SampleSet& w, const std::vector<Complex>& values, const SubspaceSpec& spec,
                 const SignalContext& context);

/// Values of a coefficient signal at the points of W.
std::vector<Complex> evaluate_at(const GeneralizedSignal& f, const SampleSet& w);

// Sample plan CSV: vertex,x.
void write_plan(std::ostream& out, const SampleSet& w);
SampleSet read_plan(std::istream& in);

}  // namespace gengsp
