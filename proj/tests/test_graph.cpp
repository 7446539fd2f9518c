#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

#include "doctest.h"
#include "gengsp/error.hpp"
#include "gengsp/graph.hpp"
#include "support.hpp"

using namespace gengsp;

namespace {

Graph four_cycle() { return cycle_graph(4); }

Matrix rows_of(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

// Exhaustive search over labelings of rows into t + 1 groups (group t discarded).
bool blocks_exist(const Matrix& phi, std::size_t t) {
    const auto n = static_cast<std::size_t>(phi.rows());
    std::vector<std::size_t> label(n, 0);
    const std::function<bool(std::size_t)> go = [&](std::size_t v) -> bool {
        if (v == n) {
            for (std::size_t b = 0; b < t; ++b) {
                std::vector<std::size_t> rows;
                for (std::size_t u = 0; u < n; ++u)
                    if (label[u] == b) rows.push_back(u);
                if (numeric_rank(rows_of(phi, rows)) < static_cast<std::size_t>(phi.cols())) return false;
            }
            return true;
        }
        for (std::size_t b = 0; b <= t; ++b) {
            label[v] = b;
            if (go(v + 1)) return true;
        }
        return false;
    };
    return go(0);
}

std::size_t brute_delta(const Matrix& phi) {
    std::size_t best = 0;
    for (std::size_t t = 1; t * static_cast<std::size_t>(phi.cols()) <= static_cast<std::size_t>(phi.rows()); ++t)
        if (blocks_exist(phi, t)) best = t;
    return best;
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const Graph& g) {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (const Edge& e : g.edges()) s.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
    return s;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("graph construction validates edges") {
    CHECK_THROWS_AS(Graph(2, {{0, 0, 1.0}}), Error);
    CHECK_THROWS_AS(Graph(2, {{0, 2, 1.0}}), Error);
    CHECK_THROWS_AS(Graph(2, {{0, 1, 1.0}, {1, 0, 2.0}}), Error);
    CHECK_THROWS_AS(Graph(2, {{0, 1, std::nan("")}}), Error);
}

TEST_CASE("shift of the 3-path Laplacian") {
    const ShiftOperator s = build_shift(path_graph(3), ShiftKind::Laplacian);
    CHECK(std::abs(s.eigenvalues(0)) < 1e-12);
    CHECK(std::abs(s.eigenvalues(1) - 1.0) < 1e-12);
    CHECK(std::abs(s.eigenvalues(2) - 3.0) < 1e-12);
    CHECK_FALSE(s.repeated_eigenvalues);
}

TEST_CASE("4-cycle Laplacian eigenspaces") {
    const ShiftOperator s = build_shift(four_cycle(), ShiftKind::Laplacian);
    CHECK(s.repeated_eigenvalues);
    RealMatrix expected(4, 4);
    expected.col(0) << 1, 1, 1, 1;
    expected.col(1) << -1, 0, 1, 0;
    expected.col(2) << 0, -1, 0, 1;
    expected.col(3) << -1, 1, -1, 1;
    const RealMatrix l = s.matrix;
    // the stated vectors are eigenvectors for 0, 2, 2, 4
    const double lam[] = {0, 2, 2, 4};
    for (int j = 0; j < 4; ++j) CHECK((l * expected.col(j) - lam[j] * expected.col(j)).norm() < 1e-12);
    // span of our degenerate pair equals span of the stated pair
    const RealMatrix ours = s.eigenvectors.middleCols(1, 2);
    RealMatrix theirs = expected.middleCols(1, 2);
    theirs.col(0).normalize();
    theirs.col(1).normalize();
    CHECK((ours * ours.transpose() - theirs * theirs.transpose()).norm() < 1e-10);
}

TEST_CASE("single vertex adjacency") {
    const ShiftOperator s = build_shift(Graph(1, {}), ShiftKind::Adjacency);
    CHECK(s.matrix.rows() == 1);
    CHECK(s.matrix(0, 0) == 0.0);
    CHECK(s.eigenvalues(0) == 0.0);
}

TEST_CASE("product graphs") {
    const Graph k2 = path_graph(2);
    const Graph sq = product_graph(k2, k2);
    CHECK(sq.size() == 4);
    CHECK(sq.edges().size() == 4);
    const ShiftOperator a = build_shift(sq, ShiftKind::Laplacian);
    const ShiftOperator c = build_shift(four_cycle(), ShiftKind::Laplacian);
    CHECK((a.eigenvalues - c.eigenvalues).norm() < 1e-12);

    const Graph single(1, {});
    const Graph p4 = path_graph(4);
    CHECK(edge_set(product_graph(single, p4)) == edge_set(p4));

    const Graph grid = product_graph(path_graph(3), path_graph(2));
    CHECK(grid.size() == 6);
    CHECK(grid.edges().size() == 7);

    // Kronecker-sum oracle for the adjacency
    const Graph g1 = random_weighted_graph(3, {Topology::Complete, 0.0}, 4);
    const Graph g2 = random_weighted_graph(4, {Topology::ErdosRenyi, 0.6}, 5);
    const RealMatrix a1 = g1.adjacency(), a2 = g2.adjacency();
    RealMatrix expected = RealMatrix::Zero(12, 12);
    for (int v = 0; v < 3; ++v)
        for (int u = 0; u < 4; ++u)
            for (int v2 = 0; v2 < 3; ++v2)
                for (int u2 = 0; u2 < 4; ++u2)
                    expected(v * 4 + u, v2 * 4 + u2) = a1(v, v2) * (u == u2 ? 1.0 : 0.0) + (v == v2 ? 1.0 : 0.0) * a2(u, u2);
    CHECK((product_graph(g1, g2).adjacency() - expected).norm() < 1e-14);
}

TEST_CASE("delta on the 4-cycle, every pair of eigenvectors") {
    const ShiftOperator s = build_shift(four_cycle(), ShiftKind::Laplacian);
    const Matrix phi = s.eigenvectors.cast<Complex>();
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            Matrix sub(4, 2);
            sub.col(0) = phi.col(a);
            sub.col(1) = phi.col(b);
            const DeltaResult d = delta(sub);
            CHECK(d.exact);
            CHECK(d.value == 2);
            CHECK(d.value == brute_delta(sub));
        }
}

TEST_CASE("delta of a full basis is 1") {
    const ShiftOperator s = build_shift(path_graph(5), ShiftKind::Adjacency);
    CHECK(delta(s.eigenvectors.cast<Complex>()).value == 1);
}

TEST_CASE("delta matches exhaustive search on random graphs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Graph g = random_weighted_graph(6, {Topology::Complete, 0.0}, seed);
        const ShiftOperator s = build_shift(g, ShiftKind::Laplacian);
        const Matrix sub = s.eigenvectors.leftCols(2).cast<Complex>();
        const DeltaResult d = delta(sub);
        CHECK(d.value == 3);
        CHECK(d.value == brute_delta(sub));
    }
    // a structured family where the bound floor(n/k) is not attained
    Matrix sub = Matrix::Zero(5, 2);
    sub(0, 0) = 1.0;
    sub(1, 1) = 1.0;
    sub(2, 1) = 1.0;
    sub(3, 1) = 1.0;
    sub(4, 1) = 1.0;
    CHECK(delta(sub).value == brute_delta(sub));
    CHECK(delta(sub).value == 1);
}

TEST_CASE("delta rejects dependent families") {
    Matrix sub(3, 2);
    sub << 1, 2, 1, 2, 1, 2;
    CHECK_THROWS_AS(delta(sub), Error);
}

TEST_CASE("select_vertex_subset") {
    Matrix e = Matrix::Zero(4, 2);
    e(0, 0) = 1.0;
    e(1, 1) = 1.0;
    std::vector<std::size_t> sel = select_vertex_subset(e);
    std::sort(sel.begin(), sel.end());
    CHECK(sel == std::vector<std::size_t>{0, 1});

    Matrix c(4, 2);
    c << 1, -1, 1, 0, 1, 1, 1, 0;
    CHECK(std::abs(rows_of(c, select_vertex_subset(c)).determinant()) > 1e-9);

    const Matrix r = test::random_complex(8, 3, 11);
    const auto rows = select_vertex_subset(r);
    CHECK(rows.size() == 3);
    CHECK(std::abs(rows_of(r, rows).determinant()) > 1e-9);
}

TEST_CASE("partition_vertices") {
    const ShiftOperator s = build_shift(four_cycle(), ShiftKind::Laplacian);
    const Matrix sub = s.eigenvectors.leftCols(2).cast<Complex>();

    const auto one = partition_vertices(sub, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 4);

    const auto two = partition_vertices(sub, 2);
    REQUIRE(two.size() == 2);
    std::set<std::size_t> all;
    for (const auto& blk : two) {
        CHECK(numeric_rank(rows_of(sub, blk)) == 2);
        for (std::size_t v : blk) CHECK(all.insert(v).second);
    }
    CHECK(all.size() == 4);

    const Graph g = random_weighted_graph(6, {Topology::Complete, 0.0}, 3);
    const Matrix sub6 = build_shift(g, ShiftKind::Adjacency).eigenvectors.leftCols(2).cast<Complex>();
    const auto three = partition_vertices(sub6, 3);
    REQUIRE(three.size() == 3);
    for (const auto& blk : three) CHECK(numeric_rank(rows_of(sub6, blk)) == 2);

    CHECK_THROWS_AS(partition_vertices(sub, 3), Error);
    const auto blocks = independent_blocks(sub6, 2);
    CHECK(blocks.size() == 2);
    for (const auto& blk : blocks) CHECK(blk.size() == 2);
}

TEST_CASE("random_weighted_graph") {
    const Graph a = random_weighted_graph(3, {Topology::Complete, 0.0}, 42);
    const Graph b = random_weighted_graph(3, {Topology::Complete, 0.0}, 42);
    REQUIRE(a.edges().size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.edges()[i].w == b.edges()[i].w);
        CHECK(a.edges()[i].w > 0.0);
        CHECK(a.edges()[i].w <= 1.0);
    }
    CHECK(random_weighted_graph(5, {Topology::ErdosRenyi, 0.0}, 1).edges().empty());
    CHECK(random_weighted_graph(6, {Topology::Cycle, 0.0}, 1).edges().size() == 6);
    CHECK(random_weighted_graph(6, {Topology::Path, 0.0}, 1).edges().size() == 5);
    CHECK(parse_topology("er(0.25)").kind == Topology::ErdosRenyi);
}

TEST_CASE("complete graphs have simple adjacency spectra") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Graph g = random_weighted_graph(10, {Topology::Complete, 0.0}, seed);
        const RealVector ev = build_shift(g, ShiftKind::Adjacency).eigenvalues;
        for (Eigen::Index i = 1; i < ev.size(); ++i) CHECK(ev(i) - ev(i - 1) > 1e-8);
    }
}

TEST_CASE("edge list round trip") {
    const Graph g = random_weighted_graph(5, {Topology::ErdosRenyi, 0.5}, 8);
    std::stringstream ss;
    write_edge_list(ss, g);
    const Graph back = read_edge_list(ss, 5);
    CHECK(back.size() == 5);
    CHECK((back.adjacency() - g.adjacency()).norm() == 0.0);

    std::istringstream dup("u,v,w\n0,1,1\n1,0,2\n");
    CHECK_THROWS_AS(read_edge_list(dup), Error);
    std::istringstream loop("u,v,w\n2,2,1\n");
    CHECK_THROWS_AS(read_edge_list(loop), Error);
    std::istringstream junk("u,v,w\n0,x,1\n");
    CHECK_THROWS_AS(read_edge_list(junk), Error);
}

}
