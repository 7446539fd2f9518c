#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gengsp/error.hpp"
#include "gengsp/sampling.hpp"
#include "support.hpp"

using namespace gengsp;

namespace {

// 4-cycle with ten half-integer Fourier modes.
SignalContext cycle_context() {
    return SignalContext(build_shift(cycle_graph(4), ShiftKind::Laplacian), HilbertBasis::half_integer_fourier(5));
}

// Random coefficients on Phi' x Xi', zero elsewhere.
GeneralizedSignal in_band(const SubspaceSpec& spec, const SignalContext& ctx, std::uint64_t seed) {
    const Matrix r = test::random_complex(static_cast<Eigen::Index>(spec.phi_indices.size()),
                                          static_cast<Eigen::Index>(spec.xi_positions.size()), seed);
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(ctx.vertices()), static_cast<Eigen::Index>(ctx.modes()));
    for (std::size_t a = 0; a < spec.phi_indices.size(); ++a)
        for (std::size_t b = 0; b < spec.xi_positions.size(); ++b)
            c(static_cast<Eigen::Index>(spec.phi_indices[a]), static_cast<Eigen::Index>(spec.xi_positions[b])) =
                r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    return GeneralizedSignal(ctx, c);
}

RandomAsyncStrategy uniform(std::size_t per_vertex, std::uint64_t seed) {
    RandomAsyncStrategy s;
    s.counts = {per_vertex};
    s.seed = seed;
    return s;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("subspace specs") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = parse_subspace("k=2,B=10", ctx.basis());
    CHECK(spec.phi_indices == std::vector<std::size_t>{0, 1});
    CHECK(spec.xi_positions.size() == 10);
    CHECK(spec.dimension() == 20);
    CHECK_NOTHROW(spec.validate(ctx));
    CHECK_THROWS_AS(parse_subspace("k=2", ctx.basis()), Error);
    CHECK_THROWS_AS(parse_subspace("k=2,B=10,z=1", ctx.basis()), Error);
    SubspaceSpec bad{{0, 7}, {0}};
    CHECK_THROWS_AS(bad.validate(ctx), Error);
}

TEST_CASE("sampling matrix entries") {
    const SignalContext ctx = cycle_context();
    SampleSet w;
    w.points = {{2, 1.25}};
    const SubspaceSpec spec{{1}, {3}};
    const Matrix m = sampling_matrix(w, spec, ctx);
    REQUIRE(m.rows() == 1);
    REQUIRE(m.cols() == 1);
    CHECK(std::abs(m(0, 0) - ctx.shift().eigenvectors(2, 1) * ctx.basis().eval(3, 1.25)) < 1e-15);
}

TEST_CASE("random points on the 4-cycle give a full-rank 20 x 20 system") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());
    std::mt19937_64 rng(5);
    const SampleSet w = draw_random(uniform(5, 0), ctx, rng);
    CHECK(w.size() == 20);
    CHECK(numeric_rank(sampling_matrix(w, spec, ctx)) == 20);
}

TEST_CASE("repeated rows lose rank") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec{{0}, {0, 1, 2}};
    SampleSet w;
    w.points = {{0, 1.0}, {0, 1.0}, {1, 2.0}};
    CHECK(numeric_rank(sampling_matrix(w, spec, ctx)) < 3);
    CHECK_FALSE(determines(w, spec, ctx));
    CHECK_THROWS_AS(w.validate(ctx), Error);
}

TEST_CASE("a single vertex cannot determine two graph components") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 4, ctx.basis());
    SampleSet w;
    for (int j = 0; j < 12; ++j) w.points.push_back({1, 0.2 + 0.5 * j});
    CHECK_FALSE(determines(w, spec, ctx));
}

TEST_CASE("constructive plans") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());

    const SampleSet sub = plan_samples(spec, ctx, VertexSubsetStrategy{});
    CHECK(sub.size() == 20);
    CHECK(determines(sub, spec, ctx));

    const SampleSet dist = plan_samples(spec, ctx, DistributedStrategy{2});
    CHECK(dist.counts(4) == std::vector<std::size_t>{5, 5, 5, 5});
    CHECK(determines(dist, spec, ctx));
    CHECK_NOTHROW(dist.validate(ctx));

    const SubspaceSpec full = SubspaceSpec::leading(4, 3, ctx.basis());
    const SampleSet all = plan_samples(full, ctx, VertexSubsetStrategy{});
    CHECK(all.counts(4) == std::vector<std::size_t>{3, 3, 3, 3});

    try {
        plan_samples(spec, ctx, DistributedStrategy{3});
        FAIL("expected InfeasiblePartition");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasiblePartition);
    }
}

TEST_CASE("default points") {
    const HilbertBasis h = HilbertBasis::half_integer_fourier(2);
    const auto pts = default_points(h, {0, 1, 2});
    REQUIRE(pts.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(pts[j] == doctest::Approx((j + 1) * 2 * test::kPi / 4));
    const HilbertBasis g = HilbertBasis::graph_basis(random_weighted_graph(5, {Topology::Complete, 0.0}, 1), ShiftKind::Adjacency, 5);
    const auto vs = default_points(g, {0, 1});
    CHECK(vs.size() == 2);
    for (double v : vs) CHECK(g.contains(v));
}

TEST_CASE("random asynchronous plans determine with probability one") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed);
        if (determines(draw_random(uniform(5, seed), ctx, rng), spec, ctx)) ++ok;
    }
    CHECK(ok >= 99);
    RandomAsyncStrategy normal = uniform(5, 3);
    normal.distribution = PointDistribution::TruncatedNormal;
    normal.mean = 3.0;
    normal.stddev = 1.0;
    const SampleSet w = plan_samples(spec, ctx, normal);
    CHECK(determines(w, spec, ctx));
    for (const auto& p : w.points) CHECK(ctx.basis().contains(p.x));
}

TEST_CASE("random plans with too few points fail") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());
    try {
        plan_samples(spec, ctx, uniform(4, 1));
        FAIL("expected PlanFailed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PlanFailed);
    }
}

TEST_CASE("strategy flags") {
    CHECK(std::holds_alternative<VertexSubsetStrategy>(parse_strategy("vertex_subset")));
    CHECK(std::get<DistributedStrategy>(parse_strategy("distributed:3")).blocks == 3);
    const auto r = std::get<RandomAsyncStrategy>(parse_strategy("random:6:normal:1.5:0.5", 9));
    CHECK(r.distribution == PointDistribution::TruncatedNormal);
    CHECK(r.counts == std::vector<std::size_t>{6});
    CHECK(r.mean == 1.5);
    CHECK(r.stddev == 0.5);
    CHECK(r.seed == 9);
    CHECK(std::get<RandomAsyncStrategy>(parse_strategy("random:4")).distribution == PointDistribution::Uniform);
    CHECK_THROWS_AS(parse_strategy("grid"), Error);
    CHECK_THROWS_AS(parse_strategy("distributed:x"), Error);
}

TEST_CASE("noiseless recovery of an in-band signal") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());
    const GeneralizedSignal f = in_band(spec, ctx, 3);
    const SampleSet w = plan_samples(spec, ctx, DistributedStrategy{2});
    const Recovery r = recover(w, evaluate_at(f, w), spec, ctx);
    CHECK(relative_error(r.grid, f.coeffs()) < 1e-8);
    CHECK(r.rank == 20);
    CHECK_FALSE(r.rank_deficient);

    const Recovery z = recover(w, std::vector<Complex>(w.size(), Complex(0.0)), spec, ctx);
    CHECK(z.grid.norm() == 0.0);
}

TEST_CASE("out-of-band energy shows up in the residual") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 4, ctx.basis());
    GeneralizedSignal f = in_band(spec, ctx, 4);
    Matrix c = f.coeffs();
    c(0, 0) = 1.0;  // outside the low band of four modes
    const GeneralizedSignal g(ctx, c);
    std::mt19937_64 rng(2);
    const SampleSet w = draw_random(uniform(6, 0), ctx, rng);
    const Recovery r = recover(w, evaluate_at(g, w), spec, ctx);
    CHECK(r.residual_norm > 1e-3);
    const Recovery clean = recover(w, evaluate_at(f, w), spec, ctx);
    CHECK(clean.residual_norm < 1e-10);
}

TEST_CASE("fewer samples than the dimension never determine") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        RandomAsyncStrategy s;
        s.counts = {5, 5, 5, 4};
        CHECK_FALSE(determines(draw_random(s, ctx, rng), spec, ctx));
    }
}

TEST_CASE("graph bandlimitedness lowers the per-vertex rate") {
    const SignalContext ctx = cycle_context();
    const SubspaceSpec spec = SubspaceSpec::leading(2, 10, ctx.basis());
    Matrix phi(4, 2);
    phi.col(0) = ctx.shift().eigenvectors.col(0).cast<Complex>();
    phi.col(1) = ctx.shift().eigenvectors.col(1).cast<Complex>();
    REQUIRE(delta(phi).value == 2);
    const std::size_t per_vertex = 10 / 2 + 1;
    std::mt19937_64 rng(3);
    const SampleSet w = draw_random(uniform(per_vertex, 0), ctx, rng);
    CHECK(determines(w, spec, ctx));
    // one vertex alone: six points cannot pin down ten modes
    Matrix single(static_cast<Eigen::Index>(per_vertex), 10);
    std::size_t row = 0;
    for (const auto& p : w.points)
        if (p.vertex == 0) single.row(static_cast<Eigen::Index>(row++)) = ctx.basis().eval_all(p.x).transpose();
    CHECK(numeric_rank(single) == per_vertex);
    CHECK(numeric_rank(single) < 10);
}

TEST_CASE("plan CSV round trip") {
    SampleSet w;
    w.points = {{0, 0.1}, {3, 1.0 / 3.0}};
    std::stringstream ss;
    write_plan(ss, w);
    CHECK(ss.str().rfind("vertex,x", 0) == 0);
    const SampleSet back = read_plan(ss);
    CHECK(back.points == w.points);
    std::istringstream bad("vertex,x\n-1,0.5\n");
    CHECK_THROWS_AS(read_plan(bad), Error);
}

}
