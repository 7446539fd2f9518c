#include "gengsp/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_set>
#include <utility>

#include "gengsp/csv.hpp"
#include "gengsp/error.hpp"

namespace gengsp {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges_) {
        if (e.u >= n_ || e.v >= n_)
            throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
        if (e.u == e.v)
            throw Error(ErrorCode::InvalidArgument, "self-loop at vertex " + std::to_string(e.u));
        if (!std::isfinite(e.w)) throw Error(ErrorCode::InvalidArgument, "non-finite edge weight");
        if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate edge " + std::to_string(e.u) + "-" +
                                                        std::to_string(e.v));
    }
}

RealMatrix Graph::adjacency() const {
    const auto n = static_cast<Eigen::Index>(n_);
    RealMatrix a = RealMatrix::Zero(n, n);
    for (const auto& e : edges_) {
        a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = e.w;
        a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = e.w;
    }
    return a;
}

RealMatrix Graph::laplacian() const {
    const RealMatrix a = adjacency();
    RealMatrix l = -a;
    l.diagonal() = a.rowwise().sum();
    return l;
}

std::string to_string(ShiftKind kind) {
    return kind == ShiftKind::Adjacency ? "adjacency" : "laplacian";
}

ShiftKind parse_shift_kind(const std::string& text) {
    if (text == "adjacency") return ShiftKind::Adjacency;
    if (text == "laplacian") return ShiftKind::Laplacian;
    throw Error(ErrorCode::InvalidArgument, "unknown shift kind `" + text + "`");
}

ShiftOperator build_shift(const Graph& g, ShiftKind kind) {
    if (g.size() == 0) throw Error(ErrorCode::InvalidArgument, "graph has no vertices");
    ShiftOperator s;
    s.kind = kind;
    s.matrix = kind == ShiftKind::Adjacency ? g.adjacency() : g.laplacian();
    auto eig = sym_eig(s.matrix);
    s.eigenvalues = std::move(eig.values);
    s.eigenvectors = std::move(eig.vectors);
    for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i)
        if (s.eigenvalues(i) - s.eigenvalues(i - 1) < 1e-8) s.repeated_eigenvalues = true;
    return s;
}

Graph product_graph(const Graph& g, const Graph& g2) {
    if (g.size() == 0 || g2.size() == 0)
        throw Error(ErrorCode::InvalidArgument, "product of an empty graph");
    const std::size_t n2 = g2.size();
    std::vector<Edge> edges;
    edges.reserve(g.edges().size() * n2 + g2.edges().size() * g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        for (const auto& e : g2.edges()) edges.push_back({v * n2 + e.u, v * n2 + e.v, e.w});
    for (std::size_t u = 0; u < n2; ++u)
        for (const auto& e : g.edges()) edges.push_back({e.u * n2 + u, e.v * n2 + u, e.w});
    return Graph(g.size() * n2, std::move(edges));
}

namespace {

void require_independent(const Matrix& phi) {
    if (phi.cols() == 0) throw Error(ErrorCode::InvalidArgument, "empty vector family");
    if (phi.cols() > phi.rows() ||
        numeric_rank(phi) != static_cast<std::size_t>(phi.cols()))
        throw Error(ErrorCode::DependentColumns, "vector family is linearly dependent");
}

Matrix rows_of(const Matrix& phi, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), phi.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = phi.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

bool full_row_rank(const Matrix& phi, const std::vector<std::size_t>& rows) {
    return numeric_rank(rows_of(phi, rows)) == rows.size();
}

// Greedy pivoted elimination over the given candidate rows. Returns fewer than
// k rows when the candidates do not span C^k.
std::vector<std::size_t> pivoted_rows(const Matrix& phi, const std::vector<std::size_t>& candidates) {
    const Eigen::Index k = phi.cols();
    Matrix residual = rows_of(phi, candidates);
    const double scale = residual.rows() ? residual.rowwise().norm().maxCoeff() : 0.0;
    std::vector<std::size_t> chosen;
    std::vector<bool> taken(candidates.size(), false);
    for (Eigen::Index step = 0; step < k; ++step) {
        double best = 0.0;
        std::size_t best_i = candidates.size();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (taken[i]) continue;
            const double nrm = residual.row(static_cast<Eigen::Index>(i)).norm();
            if (nrm > best * (1.0 + 1e-12)) {
                best = nrm;
                best_i = i;
            }
        }
        if (best_i == candidates.size() || best <= 1e-9 * scale) break;
        taken[best_i] = true;
        chosen.push_back(candidates[best_i]);
        const Vector q = residual.row(static_cast<Eigen::Index>(best_i)).adjoint() / best;
        // Remove the new direction from every remaining row.
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (taken[i]) continue;
            auto row = residual.row(static_cast<Eigen::Index>(i));
            const Complex c = (row * q)(0);
            row -= c * q.adjoint();
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

class BlockSearch {
public:
    BlockSearch(const Matrix& phi, std::size_t t)
        : phi_(phi),
          n_(static_cast<std::size_t>(phi.rows())),
          k_(static_cast<std::size_t>(phi.cols())),
          t_(t) {
        // Rows that are numerically zero can never join a block.
        const double scale = phi.rowwise().norm().maxCoeff();
        for (std::size_t r = 0; r < n_; ++r)
            usable_[r] = phi.row(static_cast<Eigen::Index>(r)).norm() > 1e-9 * scale;
    }

    bool run(std::vector<std::vector<std::size_t>>& blocks) {
        std::uint32_t used = 0;
        for (std::size_t r = 0; r < n_; ++r)
            if (!usable_[r]) used |= 1u << r;
        return solve(used, t_, blocks);
    }

private:
    bool solve(std::uint32_t used, std::size_t blocks_left,
               std::vector<std::vector<std::size_t>>& blocks) {
        if (blocks_left == 0) return true;
        const std::uint32_t full = n_ == 32 ? ~0u : ((1u << n_) - 1u);
        const std::uint32_t free = full & ~used;
        if (static_cast<std::size_t>(std::popcount(free)) < k_ * blocks_left) return false;
        const std::uint64_t key = (static_cast<std::uint64_t>(blocks_left) << 32) | used;
        if (failed_.count(key)) return false;

        const auto r = static_cast<std::size_t>(std::countr_zero(free));
        std::vector<std::size_t> block{r};
        if (full_row_rank(phi_, block) && extend(used | (1u << r), r, block, blocks_left, blocks))
            return true;
        // Leave r out of every block.
        if (solve(used | (1u << r), blocks_left, blocks)) return true;
        failed_.insert(key);
        return false;
    }

    bool extend(std::uint32_t used, std::size_t last, std::vector<std::size_t>& block,
                std::size_t blocks_left, std::vector<std::vector<std::size_t>>& blocks) {
        if (block.size() == k_) {
            blocks.push_back(block);
            if (solve(used, blocks_left - 1, blocks)) return true;
            blocks.pop_back();
            return false;
        }
        for (std::size_t r = last + 1; r < n_; ++r) {
            if (used & (1u << r)) continue;
            block.push_back(r);
            if (full_row_rank(phi_, block) && extend(used | (1u << r), r, block, blocks_left, blocks))
                return true;
            block.pop_back();
        }
        return false;
    }

    const Matrix& phi_;
    std::size_t n_, k_, t_;
    bool usable_[32] = {};
    std::unordered_set<std::uint64_t> failed_;
};

constexpr std::size_t kExactDeltaLimit = 24;

std::vector<std::vector<std::size_t>> greedy_blocks(const Matrix& phi, std::size_t limit) {
    const auto n = static_cast<std::size_t>(phi.rows());
    const auto k = static_cast<std::size_t>(phi.cols());
    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<std::vector<std::size_t>> blocks;
    while (blocks.size() < limit && remaining.size() >= k) {
        auto chosen = pivoted_rows(phi, remaining);
        if (chosen.size() < k) break;
        std::vector<std::size_t> rest;
        std::set_difference(remaining.begin(), remaining.end(), chosen.begin(), chosen.end(),
                            std::back_inserter(rest));
        remaining = std::move(rest);
        blocks.push_back(std::move(chosen));
    }
    return blocks;
}

}  // namespace

std::vector<std::size_t> select_vertex_subset(const Matrix& phi_subset) {
    require_independent(phi_subset);
    std::vector<std::size_t> all(static_cast<std::size_t>(phi_subset.rows()));
    std::iota(all.begin(), all.end(), 0);
    auto chosen = pivoted_rows(phi_subset, all);
    if (chosen.size() < static_cast<std::size_t>(phi_subset.cols()))
        throw Error(ErrorCode::DependentColumns, "no invertible minor found");
    return chosen;
}

std::vector<std::vector<std::size_t>> independent_blocks(const Matrix& phi_subset, std::size_t t) {
    require_independent(phi_subset);
    const auto n = static_cast<std::size_t>(phi_subset.rows());
    const auto k = static_cast<std::size_t>(phi_subset.cols());
    if (t == 0) throw Error(ErrorCode::InvalidArgument, "block count must be >= 1");
    if (t * k > n)
        throw Error(ErrorCode::InfeasiblePartition,
                    std::to_string(t) + " blocks of " + std::to_string(k) + " rows exceed n");
    std::vector<std::vector<std::size_t>> blocks;
    if (n <= kExactDeltaLimit) {
        BlockSearch search(phi_subset, t);
        if (!search.run(blocks))
            throw Error(ErrorCode::InfeasiblePartition,
                        "no partition into " + std::to_string(t) + " independent blocks");
        return blocks;
    }
    blocks = greedy_blocks(phi_subset, t);
    if (blocks.size() < t)
        throw Error(ErrorCode::InfeasiblePartition,
                    "greedy search found only " + std::to_string(blocks.size()) + " blocks");
    return blocks;
}

std::vector<std::vector<std::size_t>> partition_vertices(const Matrix& phi_subset, std::size_t t) {
    auto blocks = independent_blocks(phi_subset, t);
    std::vector<bool> covered(static_cast<std::size_t>(phi_subset.rows()), false);
    for (const auto& b : blocks)
        for (auto r : b) covered[r] = true;
    for (std::size_t r = 0; r < covered.size(); ++r)
        if (!covered[r]) blocks.back().push_back(r);
    std::sort(blocks.back().begin(), blocks.back().end());
    return blocks;
}

DeltaResult delta(const Matrix& phi_subset) {
    require_independent(phi_subset);
    const auto n = static_cast<std::size_t>(phi_subset.rows());
    const auto k = static_cast<std::size_t>(phi_subset.cols());
    if (n <= kExactDeltaLimit) {
        for (std::size_t t = n / k; t >= 1; --t) {
            std::vector<std::vector<std::size_t>> blocks;
            BlockSearch search(phi_subset, t);
            if (search.run(blocks)) return {t, true};
        }
        return {1, true};
    }
    const auto blocks = greedy_blocks(phi_subset, n / k);
    return {std::max<std::size_t>(blocks.size(), 1), false};
}

TopologySpec parse_topology(const std::string& text) {
    if (text == "complete") return {Topology::Complete, 0.0};
    if (text == "cycle") return {Topology::Cycle, 0.0};
    if (text == "path") return {Topology::Path, 0.0};
    if (text.rfind("er(", 0) == 0 && text.back() == ')') {
        const double p = csv::to_double(text.substr(3, text.size() - 4), 0);
        if (p < 0.0 || p > 1.0) throw Error(ErrorCode::InvalidArgument, "er probability outside [0,1]");
        return {Topology::ErdosRenyi, p};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown topology `" + text + "`");
}

Graph random_weighted_graph(std::size_t n, TopologySpec topology, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "graph needs at least one vertex");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto weight = [&] { return 1.0 - unit(rng); };  // (0, 1]
    std::vector<Edge> edges;
    switch (topology.kind) {
    case Topology::Complete:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, weight()});
        break;
    case Topology::Cycle:
        if (n >= 3) {
            for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight()});
            break;
        }
        [[fallthrough]];
    case Topology::Path:
        for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight()});
        break;
    case Topology::ErdosRenyi:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool keep = unit(rng) < topology.p;
                const double w = weight();
                if (keep) edges.push_back({i, j, w});
            }
        break;
    }
    return Graph(n, std::move(edges));
}

Graph path_graph(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
    return Graph(n, std::move(edges));
}

Graph cycle_graph(std::size_t n, double weight) {
    if (n < 3) return path_graph(n, weight);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
    return Graph(n, std::move(edges));
}

Graph read_edge_list(std::istream& in, std::size_t min_vertices) {
    const auto rows = csv::read(in, {"u", "v", "w"});
    std::vector<Edge> edges;
    std::size_t n = min_vertices;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& row : rows) {
        const auto u = csv::to_integer(row[0], row.line);
        const auto v = csv::to_integer(row[1], row.line);
        if (u < 0 || v < 0)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": negative vertex id");
        if (u == v)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": self-loop");
        const auto a = static_cast<std::size_t>(std::min(u, v));
        const auto b = static_cast<std::size_t>(std::max(u, v));
        if (!seen.emplace(a, b).second)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": duplicate edge");
        edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v),
                         csv::to_double(row[2], row.line)});
        n = std::max(n, b + 1);
    }
    return Graph(n, std::move(edges));
}

Graph read_edge_list_file(const std::string& path, std::size_t min_vertices) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return read_edge_list(in, min_vertices);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    csv::write_header(out, {"u", "v", "w"});
    for (const auto& e : g.edges()) out << e.u << ',' << e.v << ',' << csv::format(e.w) << '\n';
}

}  // namespace gengsp
