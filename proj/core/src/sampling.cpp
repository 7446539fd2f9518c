#include "gengsp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "gengsp/csv.hpp"
#include "gengsp/error.hpp"
#include "gengsp/graph.hpp"

namespace gengsp {

namespace {

constexpr int kMaxDraws = 10;
constexpr int kMaxRejections = 100000;

Matrix phi_restriction(const SubspaceSpec& spec, const SignalContext& ctx) {
    const auto& phi = ctx.shift().eigenvectors;
    Matrix out(phi.rows(), static_cast<Eigen::Index>(spec.phi_indices.size()));
    for (std::size_t a = 0; a < spec.phi_indices.size(); ++a)
        out.col(static_cast<Eigen::Index>(a)) = phi.col(static_cast<Eigen::Index>(spec.phi_indices[a])).cast<Complex>();
    return out;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || v < 0) throw Error(ErrorCode::ParseError, "bad " + what + ": \"" + s + "\"");
    return static_cast<std::size_t>(v);
}

double parse_real(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw Error(ErrorCode::ParseError, "bad " + what + ": \"" + s + "\"");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
    return out;
}

double draw_point(const RandomAsyncStrategy& s, const HilbertBasis& basis, std::mt19937_64& rng) {
    const double lo = basis.lower(), hi = basis.upper();
    if (s.distribution == PointDistribution::Uniform) {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(rng);
    }
    std::normal_distribution<double> nd(s.mean, s.stddev);
    for (int i = 0; i < kMaxRejections; ++i) {
        const double x = nd(rng);
        if (x >= lo && x <= hi) return x;
    }
    throw Error(ErrorCode::PlanFailed, "truncated normal has negligible mass on Omega");
}

SampleSet constructive_plan(const std::vector<std::vector<std::size_t>>& blocks,
                            const std::vector<double>& omega) {
    SampleSet w;
    const std::size_t t = blocks.size();
    const std::size_t base = omega.size() / t, extra = omega.size() % t;
    std::size_t start = 0;
    for (std::size_t j = 0; j < t; ++j) {
        const std::size_t len = base + (j < extra ? 1 : 0);
        auto block = blocks[j];
        std::sort(block.begin(), block.end());
        for (auto v : block)
            for (std::size_t p = start; p < start + len; ++p) w.points.push_back({v, omega[p]});
        start += len;
    }
    std::stable_sort(w.points.begin(), w.points.end(),
                     [](const SamplePoint& a, const SamplePoint& b) { return a.vertex < b.vertex; });
    return w;
}

}  // namespace

std::vector<std::size_t> SampleSet::counts(std::size_t n) const {
    std::vector<std::size_t> k(n, 0);
    for (const auto& p : points)
        if (p.vertex < n) ++k[p.vertex];
    return k;
}

void SampleSet::validate(const SignalContext& context) const {
    std::set<std::pair<std::size_t, double>> seen;
    for (const auto& p : points) {
        if (p.vertex >= context.vertices()) throw Error(ErrorCode::OutOfDomain, "sample vertex out of range");
        if (!context.basis().contains(p.x)) throw Error(ErrorCode::OutOfDomain, "sample point outside Omega");
        if (!seen.emplace(p.vertex, p.x).second)
            throw Error(ErrorCode::InvalidArgument, "repeated sample (" + std::to_string(p.vertex) + ", " +
                                                        csv::format(p.x) + ")");
    }
}

void SubspaceSpec::validate(const SignalContext& context) const {
    if (phi_indices.empty() || xi_positions.empty()) throw Error(ErrorCode::InvalidArgument, "empty subspace");
    for (auto i : phi_indices)
        if (i >= context.vertices()) throw Error(ErrorCode::OutOfDomain, "eigenvector index out of range");
    for (auto m : xi_positions)
        if (m >= context.modes()) throw Error(ErrorCode::OutOfDomain, "basis position out of range");
    if (std::set(phi_indices.begin(), phi_indices.end()).size() != phi_indices.size() ||
        std::set(xi_positions.begin(), xi_positions.end()).size() != xi_positions.size())
        throw Error(ErrorCode::InvalidArgument, "repeated index in subspace");
}

SubspaceSpec SubspaceSpec::leading(std::size_t k, std::size_t b, const HilbertBasis& basis) {
    SubspaceSpec s;
    s.phi_indices.resize(k);
    std::iota(s.phi_indices.begin(), s.phi_indices.end(), std::size_t{0});
    s.xi_positions = low_band(basis, b);
    return s;
}

SubspaceSpec parse_subspace(const std::string& text, const HilbertBasis& basis) {
    std::size_t k = 0, b = 0;
    bool has_k = false, has_b = false;
    for (const auto& part : split(text, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "subspace entries look like k=2");
        const auto key = part.substr(0, eq);
        const auto value = parse_count(part.substr(eq + 1), key);
        if (key == "k") {
            k = value;
            has_k = true;
        } else if (key == "B") {
            b = value;
            has_b = true;
        } else {
            throw Error(ErrorCode::ParseError, "unknown subspace key \"" + key + "\"");
        }
    }
    if (!has_k || !has_b) throw Error(ErrorCode::ParseError, "subspace needs both k and B");
    return SubspaceSpec::leading(k, b, basis);
}

Matrix sampling_matrix(const SampleSet& w, const SubspaceSpec& spec, const SignalContext& context) {
    const auto& phi = context.shift().eigenvectors;
    const std::size_t nb = spec.xi_positions.size();
    Matrix m(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(spec.dimension()));
    for (std::size_t l = 0; l < w.size(); ++l) {
        const auto& p = w.points[l];
        if (p.vertex >= context.vertices()) throw Error(ErrorCode::OutOfDomain, "sample vertex out of range");
        const Vector xi = context.basis().eval_all(p.x);
        for (std::size_t a = 0; a < spec.phi_indices.size(); ++a) {
            const double pv = phi(static_cast<Eigen::Index>(p.vertex), static_cast<Eigen::Index>(spec.phi_indices[a]));
            for (std::size_t b = 0; b < nb; ++b)
                m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(a * nb + b)) =
                    pv * xi(static_cast<Eigen::Index>(spec.xi_positions[b]));
        }
    }
    return m;
}

bool determines(const SampleSet& w, const SubspaceSpec& spec, const SignalContext& context, double rel_tol) {
    if (w.size() < spec.dimension()) return false;
    return numeric_rank(sampling_matrix(w, spec, context), rel_tol) == spec.dimension();
}

SamplingStrategy parse_strategy(const std::string& text, std::uint64_t seed) {
    const auto parts = split(text, ':');
    if (parts.empty()) throw Error(ErrorCode::ParseError, "empty sampling strategy");
    if (parts[0] == "vertex_subset" && parts.size() == 1) return VertexSubsetStrategy{};
    if (parts[0] == "distributed" && parts.size() == 2) {
        const auto t = parse_count(parts[1], "block count");
        if (t == 0) throw Error(ErrorCode::ParseError, "block count must be positive");
        return DistributedStrategy{t};
    }
    if (parts[0] == "random" && parts.size() >= 2) {
        RandomAsyncStrategy s;
        s.counts = {parse_count(parts[1], "per-vertex count")};
        s.seed = seed;
        if (parts.size() == 2 || (parts.size() == 3 && parts[2] == "uniform")) return s;
        if (parts.size() == 5 && parts[2] == "normal") {
            s.distribution = PointDistribution::TruncatedNormal;
            s.mean = parse_real(parts[3], "mean");
            s.stddev = parse_real(parts[4], "standard deviation");
            if (!(s.stddev > 0.0)) throw Error(ErrorCode::ParseError, "standard deviation must be positive");
            return s;
        }
    }
    throw Error(ErrorCode::ParseError, "unknown sampling strategy \"" + text + "\"");
}

std::vector<double> default_points(const HilbertBasis& basis, const std::vector<std::size_t>& xi_positions) {
    const std::size_t k = xi_positions.size();
    std::vector<double> out;
    if (basis.discrete()) {
        const auto& vecs = basis.graph_eigenvectors();
        Matrix restricted(vecs.rows(), static_cast<Eigen::Index>(k));
        for (std::size_t b = 0; b < k; ++b)
            restricted.col(static_cast<Eigen::Index>(b)) =
                vecs.col(static_cast<Eigen::Index>(xi_positions[b])).cast<Complex>();
        for (auto r : select_vertex_subset(restricted)) out.push_back(static_cast<double>(r));
        return out;
    }
    const double lo = basis.lower(), hi = basis.upper();
    for (std::size_t j = 0; j < k; ++j)
        out.push_back(lo + static_cast<double>(j + 1) * (hi - lo) / static_cast<double>(k + 1));
    return out;
}

SampleSet draw_random(const RandomAsyncStrategy& s, const SignalContext& context, std::mt19937_64& rng) {
    const std::size_t n = context.vertices();
    std::vector<std::size_t> counts = s.counts;
    if (counts.size() == 1) counts.assign(n, counts[0]);
    if (counts.size() != n) throw Error(ErrorCode::DimensionMismatch, "need one sample count per vertex");
    const auto& basis = context.basis();
    SampleSet w;
    for (std::size_t v = 0; v < n; ++v) {
        if (basis.discrete()) {
            const auto m = static_cast<std::size_t>(basis.upper()) + 1;
            if (counts[v] > m) throw Error(ErrorCode::PlanFailed, "more samples than points in Omega");
            std::vector<std::size_t> ids(m);
            std::iota(ids.begin(), ids.end(), std::size_t{0});
            std::vector<std::size_t> chosen;
            std::sample(ids.begin(), ids.end(), std::back_inserter(chosen), counts[v], rng);
            for (auto x : chosen) w.points.push_back({v, static_cast<double>(x)});
            continue;
        }
        std::set<double> used;
        while (used.size() < counts[v]) {
            const double x = draw_point(s, basis, rng);
            if (used.insert(x).second) w.points.push_back({v, x});
        }
    }
    return w;
}

SampleSet plan_samples(const SubspaceSpec& spec, const SignalContext& context, const SamplingStrategy& strategy) {
    spec.validate(context);
    SampleSet w;
    if (std::holds_alternative<RandomAsyncStrategy>(strategy)) {
        const auto& s = std::get<RandomAsyncStrategy>(strategy);
        std::mt19937_64 rng(s.seed);
        for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
            w = draw_random(s, context, rng);
            if (determines(w, spec, context)) return w;
        }
        throw Error(ErrorCode::PlanFailed,
                    std::to_string(kMaxDraws) + " random draws failed to determine the subspace");
    }
    const Matrix phi = phi_restriction(spec, context);
    const auto omega = default_points(context.basis(), spec.xi_positions);
    if (std::holds_alternative<VertexSubsetStrategy>(strategy)) {
        w = constructive_plan({select_vertex_subset(phi)}, omega);
    } else {
        const std::size_t t = std::get<DistributedStrategy>(strategy).blocks;
        if (t == 0 || t > omega.size())
            throw Error(ErrorCode::InfeasiblePartition,
                        "cannot split " + std::to_string(omega.size()) + " points into " + std::to_string(t) + " blocks");
        w = constructive_plan(partition_vertices(phi, t), omega);
    }
    if (!determines(w, spec, context))
        throw Error(ErrorCode::PlanFailed, "constructed plan does not determine the subspace");
    return w;
}

Recovery recover(const SampleSet& w, const std::vector<Complex>& values, const SubspaceSpec& spec,
                 const SignalContext& context) {
    spec.validate(context);
    if (values.size() != w.size()) throw Error(ErrorCode::DimensionMismatch, "one value per sample is required");
    const Matrix m = sampling_matrix(w, spec, context);
    const Vector b = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    const auto fit = lstsq(m, b);
    Recovery r;
    r.grid = Matrix::Zero(static_cast<Eigen::Index>(context.vertices()), static_cast<Eigen::Index>(context.modes()));
    const std::size_t nb = spec.xi_positions.size();
    for (std::size_t a = 0; a < spec.phi_indices.size(); ++a)
        for (std::size_t c = 0; c < nb; ++c)
            r.grid(static_cast<Eigen::Index>(spec.phi_indices[a]), static_cast<Eigen::Index>(spec.xi_positions[c])) =
                fit.x(static_cast<Eigen::Index>(a * nb + c));
    r.residual_norm = fit.residual_norm;
    r.rank = fit.rank;
    r.rank_deficient = fit.rank_deficient;
    return r;
}

std::vector<Complex> evaluate_at(const GeneralizedSignal& f, const SampleSet& w) {
    const Matrix vc = f.vertex_coeffs();
    std::vector<Complex> out;
    out.reserve(w.size());
    for (const auto& p : w.points) {
        if (p.vertex >= f.context().vertices()) throw Error(ErrorCode::OutOfDomain, "sample vertex out of range");
        out.push_back((vc.row(static_cast<Eigen::Index>(p.vertex)) * f.context().basis().eval_all(p.x))(0));
    }
    return out;
}

void write_plan(std::ostream& out, const SampleSet& w) {
    csv::write_header(out, {"vertex", "x"});
    for (const auto& p : w.points) out << p.vertex << ',' << csv::format(p.x) << '\n';
}

SampleSet read_plan(std::istream& in) {
    SampleSet w;
    for (const auto& row : csv::read(in, {"vertex", "x"})) {
        const auto v = csv::to_integer(row[0], row.line);
        if (v < 0) throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": negative vertex");
        w.points.push_back({static_cast<std::size_t>(v), csv::to_double(row[1], row.line)});
    }
    return w;
}

}  // namespace gengsp
