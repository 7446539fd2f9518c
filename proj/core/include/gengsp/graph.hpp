#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gengsp/numerics.hpp"

namespace gengsp {

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double w = 1.0;
};

/// Weighted undirected graph on vertices 0..n-1. No self-loops, at most one
/// edge per unordered pair, finite weights; the constructor enforces all three.
class Graph {
public:
    Graph() = default;
    Graph(std::size_t n, std::vector<Edge> edges);

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    RealMatrix adjacency() const;
    RealMatrix laplacian() const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

enum class ShiftKind { Adjacency, Laplacian };

std::string to_string(ShiftKind kind);
ShiftKind parse_shift_kind(const std::string& text);

/// Symmetric shift matrix with its ascending eigenvalues and orthonormal
/// eigenbasis (columns of `eigenvectors`).
struct ShiftOperator {
    ShiftKind kind = ShiftKind::Adjacency;
    RealMatrix matrix;
    RealVector eigenvalues;
    RealMatrix eigenvectors;
    /// Set when two eigenvalues lie within 1e-8 of each other.
    bool repeated_eigenvalues = false;

    std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

ShiftOperator build_shift(const Graph& g, ShiftKind kind);

/// Cartesian product. Vertex (v, u) gets index v * g2.size() + u, matching the
/// Kronecker ordering of C^n (x) C^n'.
Graph product_graph(const Graph& g, const Graph& g2);

struct DeltaResult {
    std::size_t value = 0;
    /// False when the search was skipped (n > 24) and value is a greedy lower bound.
    bool exact = true;
};

/// Largest t such that the rows split into t disjoint blocks with each block's
/// row restriction of full column rank.
DeltaResult delta(const Matrix& phi_subset);

/// Row indices of an invertible k x k minor, found by pivoted elimination.
std::vector<std::size_t> select_vertex_subset(const Matrix& phi_subset);

/// t disjoint k-row blocks, each with an invertible minor. Leftover rows are
/// not included. Throws InfeasiblePartition when t blocks do not exist.
std::vector<std::vector<std::size_t>> independent_blocks(const Matrix& phi_subset, std::size_t t);

/// Partition of all rows into t blocks, each of full column rank. Rows not
/// needed by any minimal block are appended to the last block.
std::vector<std::vector<std::size_t>> partition_vertices(const Matrix& phi_subset, std::size_t t);

enum class Topology { Complete, Cycle, Path, ErdosRenyi };

struct TopologySpec {
    Topology kind = Topology::Complete;
    double p = 0.0;  // edge probability for ErdosRenyi
};

TopologySpec parse_topology(const std::string& text);

/// Weights i.i.d. uniform on (0, 1]; identical output for identical seeds.
Graph random_weighted_graph(std::size_t n, TopologySpec topology, std::uint64_t seed);

/// Unit-weight path, cycle and grid graphs.
Graph path_graph(std::size_t n, double weight = 1.0);
Graph cycle_graph(std::size_t n, double weight = 1.0);

/// Edge-list CSV with header `u,v,w`. Duplicate pairs and self-loops are
/// rejected with ParseError. Vertex count is max id + 1 unless `min_vertices`
/// is larger.
Graph read_edge_list(std::istream& in, std::size_t min_vertices = 0);
Graph read_edge_list_file(const std::string& path, std::size_t min_vertices = 0);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace gengsp
