#include "gengsp/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gengsp/error.hpp"
#include "gengsp/filters.hpp"
#include "gengsp/hilbert.hpp"
#include "gengsp/parallel.hpp"
#include "gengsp/sampling.hpp"
#include "gengsp/signal.hpp"

namespace gengsp {

namespace {

using nlohmann::json;

// Independent streams derived from one experiment seed. The noise stream is
// kept apart so that an SNR sweep perturbs identical signals and plans.
std::uint64_t stream(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

enum Salt : std::uint64_t { kGraph = 1, kSignal = 2, kPlan = 3, kNoise = 4, kCascade = 5 };

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

std::filesystem::path prepare_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

template <class Writer>
std::string write_artifact(const std::string& out_dir, const std::string& name, Writer&& writer) {
    const auto path = prepare_dir(out_dir) / name;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    writer(out);
    return path.string();
}

RealMatrix lower_shift(std::size_t n) {
    RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t t = 1; t < n; ++t) m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t - 1)) = 1.0;
    return m;
}

// Real least squares for a complex system: [Re D; Im D] x = [Re y; Im y].
RealVector real_lstsq(const Matrix& design, const Vector& target) {
    const Eigen::Index r = design.rows();
    Matrix stacked(2 * r, design.cols());
    stacked.topRows(r) = design.real().cast<Complex>();
    stacked.bottomRows(r) = design.imag().cast<Complex>();
    Vector rhs(2 * r);
    rhs.head(r) = target.real().cast<Complex>();
    rhs.tail(r) = target.imag().cast<Complex>();
    return lstsq(stacked, rhs).x.real();
}

Graph rewire(const Graph& g, double p, std::mt19937_64& rng) {
    const std::size_t n = g.size();
    std::set<std::pair<std::size_t, std::size_t>> present;
    for (const auto& e : g.edges()) present.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
    const std::size_t capacity = n * (n - 1) / 2;
    std::bernoulli_distribution coin(p);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<Edge> out;
    for (const auto& e : g.edges()) {
        if (!coin(rng) || present.size() >= capacity) {
            out.push_back(e);
            continue;
        }
        std::size_t u = 0, v = 0;
        do {
            u = pick(rng);
            v = pick(rng);
        } while (u == v || present.count({std::min(u, v), std::max(u, v)}));
        present.erase({std::min(e.u, e.v), std::max(e.u, e.v)});
        present.emplace(std::min(u, v), std::max(u, v));
        out.push_back({u, v, e.w});
    }
    return Graph(n, std::move(out));
}

}  // namespace

Graph build_graph(const GraphSource& s, std::uint64_t seed) {
    if (!s.file.empty()) return read_edge_list_file(s.file, s.n);
    if (s.generator == "grid") return product_graph(path_graph(s.rows), path_graph(s.cols));
    if (s.generator == "path") return path_graph(s.n);
    if (s.generator == "cycle") return cycle_graph(s.n);
    if (s.generator == "complete") return random_weighted_graph(s.n, {Topology::Complete, 0.0}, stream(seed, kGraph));
    if (s.generator == "er") return random_weighted_graph(s.n, {Topology::ErdosRenyi, s.p}, stream(seed, kGraph));
    throw Error(ErrorCode::InvalidArgument, "unknown graph generator \"" + s.generator + "\"");
}

void add_noise(std::vector<Complex>& values, double snr_db, std::mt19937_64& rng) {
    if (!std::isfinite(snr_db)) throw Error(ErrorCode::InvalidArgument, "SNR must be finite");
    if (values.empty()) return;
    double power = 0.0;
    for (const auto& v : values) power += std::norm(v);
    power /= static_cast<double>(values.size());
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0) / 2.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (auto& v : values) {
        const double re = nd(rng);
        const double im = nd(rng);
        v += sigma * Complex(re, im);
    }
}

void add_noise(Matrix& values, double snr_db, std::mt19937_64& rng) {
    std::vector<Complex> flat(values.data(), values.data() + values.size());
    add_noise(flat, snr_db, rng);
    std::copy(flat.begin(), flat.end(), values.data());
}

double ExperimentReport::metric(const std::string& name) const {
    const auto it = metrics.find(name);
    if (it == metrics.end()) throw Error(ErrorCode::InvalidArgument, "report has no metric \"" + name + "\"");
    return it->second;
}

std::string ExperimentReport::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["metrics"] = json::object();
    for (const auto& [k, v] : metrics) j["metrics"][k] = v;
    j["artifacts"] = artifacts;
    j["config"] = config_json.empty() ? json(nullptr) : json::parse(config_json);
    return j.dump(2) + "\n";
}

ExperimentReport run_recover(const RecoverConfig& cfg, const std::string& out_dir) {
    const Graph g = build_graph(cfg.graph, cfg.seed);
    if (cfg.k == 0 || cfg.k > g.size()) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n]");
    if (cfg.bandwidth == 0) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
    if (cfg.vertex_blocks == 0) throw Error(ErrorCode::InvalidArgument, "need at least one vertex block");
    if (!(cfg.variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "variance must be positive");
    const SignalContext ctx(build_shift(g, cfg.shift), HilbertBasis::chebyshev(cfg.bandwidth));
    const auto spec = SubspaceSpec::leading(cfg.k, cfg.bandwidth, ctx.basis());

    std::mt19937_64 rng(stream(cfg.seed, kSignal));
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix truth = Matrix::Zero(static_cast<Eigen::Index>(ctx.vertices()), static_cast<Eigen::Index>(ctx.modes()));
    for (auto i : spec.phi_indices)
        for (auto m : spec.xi_positions) truth(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = nd(rng);
    const GeneralizedSignal f(ctx, truth);

    Matrix phi(static_cast<Eigen::Index>(ctx.vertices()), static_cast<Eigen::Index>(cfg.k));
    for (std::size_t i = 0; i < cfg.k; ++i)
        phi.col(static_cast<Eigen::Index>(i)) = ctx.shift().eigenvectors.col(static_cast<Eigen::Index>(i)).cast<Complex>();
    const auto blocks = independent_blocks(phi, cfg.vertex_blocks);
    const std::size_t per_vertex =
        cfg.points_per_vertex > 0 ? cfg.points_per_vertex
                                  : (cfg.bandwidth + cfg.vertex_blocks - 1) / cfg.vertex_blocks;
    RandomAsyncStrategy strategy;
    strategy.distribution = PointDistribution::TruncatedNormal;
    strategy.mean = cfg.mean;
    strategy.stddev = std::sqrt(cfg.variance);
    strategy.counts.assign(ctx.vertices(), 0);
    for (const auto& block : blocks)
        for (auto v : block) strategy.counts[v] = per_vertex;
    strategy.seed = stream(cfg.seed, kPlan);
    const SampleSet w = plan_samples(spec, ctx, strategy);

    auto values = evaluate_at(f, w);
    if (cfg.snr_db) {
        std::mt19937_64 noise(stream(cfg.seed, kNoise));
        add_noise(values, *cfg.snr_db, noise);
    }
    const Recovery rec = recover(w, values, spec, ctx);
    const GeneralizedSignal fhat(ctx, rec.grid);

    ExperimentReport r;
    r.experiment = "recover";
    r.metrics["vertices"] = static_cast<double>(ctx.vertices());
    r.metrics["dimension"] = static_cast<double>(spec.dimension());
    r.metrics["samples"] = static_cast<double>(w.size());
    r.metrics["sampled_vertices"] = static_cast<double>(blocks.size() * cfg.k);
    r.metrics["rank"] = static_cast<double>(rec.rank);
    r.metrics["residual_norm"] = rec.residual_norm;
    r.metrics["relative_coeff_error"] = relative_error(rec.grid, truth);
    for (const double x : {-1.0, 1.0}) {
        const Vector want = f.at(x);
        const double err = safe_ratio((fhat.at(x) - want).norm(), want.norm());
        r.metrics[x < 0 ? "endpoint_error_minus1" : "endpoint_error_plus1"] = err;
    }
    if (!out_dir.empty()) {
        r.artifacts.push_back(write_artifact(out_dir, "plan.csv", [&](std::ostream& o) { write_plan(o, w); }));
        r.artifacts.push_back(
            write_artifact(out_dir, "recovered_grid.csv", [&](std::ostream& o) { write_grid(o, rec.grid, ctx.basis()); }));
    }
    return r;
}

ExperimentReport run_learn_filter(const LearnFilterConfig& cfg, const std::string& out_dir) {
    const Graph g = build_graph(cfg.graph, cfg.seed);
    const std::size_t n = g.size();
    const std::size_t k = cfg.k ? *cfg.k : static_cast<std::size_t>(std::lround(0.4 * static_cast<double>(n)));
    if (k == 0 || k > n) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n]");
    if (cfg.intervals < 2) throw Error(ErrorCode::InvalidArgument, "need at least two sub-intervals");
    if (cfg.bandwidth == 0) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
    if (!(cfg.sub_period > 0.0)) throw Error(ErrorCode::InvalidArgument, "sub-period must be positive");
    const std::size_t q = cfg.intervals, nb = cfg.bandwidth;
    const double t0 = cfg.sub_period;
    const auto basis = HilbertBasis::fourier_series(nb, static_cast<double>(q) * t0);
    const auto shift = build_shift(g, ShiftKind::Adjacency);
    const auto band = low_band(basis, nb);

    std::mt19937_64 rng(stream(cfg.seed, kSignal));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> p2(3);
    if (cfg.p2) {
        if (cfg.p2->size() != 3) throw Error(ErrorCode::InvalidArgument, "P2 needs three coefficients");
        p2 = *cfg.p2;
    } else {
        for (auto& c : p2) c = unif(rng);
    }
    // Translation by T0 multiplies the coefficient of exp(i w x) by exp(-i w T0).
    Vector ell(static_cast<Eigen::Index>(nb));
    for (std::size_t b = 0; b < nb; ++b)
        ell(static_cast<Eigen::Index>(b)) = std::polar(1.0, -basis.element(band[b]).freq_label * t0);
    auto p2_of = [&](const std::vector<double>& c) {
        Vector out(static_cast<Eigen::Index>(nb));
        for (Eigen::Index b = 0; b < out.size(); ++b) out(b) = c[0] + c[1] * ell(b) + c[2] * ell(b) * ell(b);
        return out;
    };

    const Matrix phi_all = shift.eigenvectors.cast<Complex>();
    const Matrix phi_k = phi_all.leftCols(static_cast<Eigen::Index>(k));
    const Matrix a_g = shift.matrix.cast<Complex>();

    // Vertex-domain H-coefficients on the band, one n x B matrix per interval.
    std::vector<Matrix> hv(q);
    {
        Matrix coeff = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nb));
        for (Eigen::Index b = 0; b < coeff.cols(); ++b)
            for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) coeff(i, b) = unif(rng);
        const Vector gain = p2_of(p2);
        for (std::size_t i = 0; i < q; ++i) {
            hv[i] = phi_all * coeff;
            coeff = shift.eigenvalues.cast<Complex>().asDiagonal() * coeff * gain.asDiagonal();
        }
    }

    // Sample times: B interior points of each sub-interval.
    std::vector<Matrix> eval(q);
    for (std::size_t i = 0; i < q; ++i) {
        eval[i].resize(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
        for (std::size_t j = 0; j < nb; ++j) {
            const double t = static_cast<double>(i) * t0 + static_cast<double>(j + 1) * t0 / static_cast<double>(nb + 1);
            for (std::size_t b = 0; b < nb; ++b)
                eval[i](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b)) = basis.eval(band[b], t);
        }
    }

    const auto vprime = select_vertex_subset(phi_k);
    const auto nv = static_cast<Eigen::Index>(vprime.size());
    Matrix m_vprime(nv, static_cast<Eigen::Index>(k));
    for (Eigen::Index r = 0; r < nv; ++r) m_vprime.row(r) = phi_k.row(static_cast<Eigen::Index>(vprime[static_cast<std::size_t>(r)]));
    auto restrict_rows = [&](const Matrix& full) {
        Matrix out(nv, full.cols());
        for (Eigen::Index r = 0; r < nv; ++r) out.row(r) = full.row(static_cast<Eigen::Index>(vprime[static_cast<std::size_t>(r)]));
        return out;
    };

    // h(i): |V'| x B samples; noise is added to all of them at once.
    std::vector<Matrix> h(q), h_noisy(q);
    Matrix stacked(nv, static_cast<Eigen::Index>(nb * q));
    for (std::size_t i = 0; i < q; ++i) {
        h[i] = restrict_rows(hv[i] * eval[i].transpose());
        stacked.middleCols(static_cast<Eigen::Index>(i * nb), static_cast<Eigen::Index>(nb)) = h[i];
    }
    if (cfg.snr_db) {
        std::mt19937_64 noise(stream(cfg.seed, kNoise));
        add_noise(stacked, *cfg.snr_db, noise);
    }
    for (std::size_t i = 0; i < q; ++i)
        h_noisy[i] = stacked.middleCols(static_cast<Eigen::Index>(i * nb), static_cast<Eigen::Index>(nb));

    // Step (a): full graph signal at every sample time, then H-coefficients.
    std::vector<Matrix> f_tilde(q), hv_tilde(q);
    for (std::size_t i = 0; i < q; ++i) {
        Matrix x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(nb));
        for (Eigen::Index t = 0; t < x.cols(); ++t) x.col(t) = lstsq(m_vprime, h_noisy[i].col(t)).x;
        f_tilde[i] = phi_k * x;
        Matrix ht(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(n));
        const Matrix rhs = f_tilde[i].transpose();
        for (Eigen::Index v = 0; v < ht.cols(); ++v) ht.col(v) = lstsq(eval[i], rhs.col(v)).x;
        hv_tilde[i] = ht.transpose();
    }

    // Step (b): linear least squares over the three real coefficients of P2.
    const Eigen::Index block = static_cast<Eigen::Index>(n * nb);
    Matrix design(block * static_cast<Eigen::Index>(q - 1), 3);
    Vector target(block * static_cast<Eigen::Index>(q - 1));
    for (std::size_t i = 0; i + 1 < q; ++i) {
        const auto row0 = static_cast<Eigen::Index>(i) * block;
        Vector power = Vector::Ones(static_cast<Eigen::Index>(nb));
        for (Eigen::Index d = 0; d < 3; ++d) {
            const Matrix col = a_g * hv_tilde[i] * power.asDiagonal() * eval[i + 1].transpose();
            design.block(row0, d, block, 1) = col.reshaped();
            power = power.cwiseProduct(ell);
        }
        target.segment(row0, block) = f_tilde[i + 1].reshaped();
    }
    const RealVector p2_hat = real_lstsq(design, target);
    const std::vector<double> p2_est(p2_hat.data(), p2_hat.data() + 3);

    // Prediction error on the noiseless samples.
    const Vector gain_hat = p2_of(p2_est);
    double diff_sq = 0.0, ref_sq = 0.0;
    for (std::size_t i = 0; i + 1 < q; ++i) {
        const Matrix pred = restrict_rows(a_g * hv[i] * gain_hat.asDiagonal() * eval[i + 1].transpose());
        diff_sq += (pred - h[i + 1]).squaredNorm();
        ref_sq += h[i + 1].squaredNorm();
    }

    ExperimentReport r;
    r.experiment = "learn_filter";
    r.metrics["vertices"] = static_cast<double>(n);
    r.metrics["k"] = static_cast<double>(k);
    r.metrics["sampled_vertices"] = static_cast<double>(vprime.size());
    double coeff_err = 0.0;
    for (std::size_t d = 0; d < 3; ++d) {
        r.metrics["p2_true_" + std::to_string(d)] = p2[d];
        r.metrics["p2_hat_" + std::to_string(d)] = p2_est[d];
        coeff_err = std::max(coeff_err, std::abs(p2_est[d] - p2[d]));
    }
    r.metrics["p2_max_abs_error"] = coeff_err;
    r.metrics["prediction_error"] = safe_ratio(std::sqrt(diff_sq), std::sqrt(ref_sq));
    if (!out_dir.empty()) {
        std::vector<Sample> samples;
        for (std::size_t i = 0; i < q; ++i)
            for (Eigen::Index row = 0; row < nv; ++row)
                for (std::size_t j = 0; j < nb; ++j)
                    samples.push_back({vprime[static_cast<std::size_t>(row)],
                                       static_cast<double>(i) * t0 + static_cast<double>(j + 1) * t0 / static_cast<double>(nb + 1),
                                       h_noisy[i](row, static_cast<Eigen::Index>(j))});
        r.artifacts.push_back(write_artifact(out_dir, "samples.csv", [&](std::ostream& o) { write_samples(o, samples); }));
    }
    return r;
}

RankOneFit rank_one_factor(const RealMatrix& c) {
    if (c.rows() != 2 || c.cols() != 2) throw Error(ErrorCode::DimensionMismatch, "expected a 2 x 2 arrangement");
    Eigen::JacobiSVD<RealMatrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s = svd.singularValues()(0);
    if (!(s > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff())) || s < 1e-300)
        throw Error(ErrorCode::DegenerateFactorization, "product arrangement is numerically zero");
    RealVector a = svd.matrixU().col(0);
    RealVector b = s * svd.matrixV().col(0);
    if (a(0) < 0.0 || (a(0) == 0.0 && a(1) < 0.0)) {
        a = -a;
        b = -b;
    }
    return {{a(0), a(1)}, {b(0), b(1)}};
}

ExperimentReport run_adaptive(const AdaptiveConfig& cfg, const std::string& out_dir) {
    (void)out_dir;
    if (cfg.times < 3) throw Error(ErrorCode::InvalidArgument, "need at least three time indices");
    if (!(cfg.rewire_probability >= 0.0 && cfg.rewire_probability <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "rewiring probability must lie in [0, 1]");
    const Graph g0 = build_graph(cfg.graph, cfg.seed);
    const auto m = static_cast<Eigen::Index>(g0.size());
    std::mt19937_64 rng(stream(cfg.seed, kSignal));
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    auto params = [&](const std::optional<std::vector<double>>& given) {
        if (given) {
            if (given->size() != 2) throw Error(ErrorCode::InvalidArgument, "degree-1 polynomials need two coefficients");
            return *given;
        }
        return std::vector<double>{unif(rng), unif(rng)};
    };
    const auto a = params(cfg.a);
    const auto b = params(cfg.b);

    AdaptiveFilter filter;
    filter.p1 = {a[0], a[1]};
    filter.p2 = {b[0], b[1]};
    filter.mixing = lower_shift(cfg.times).cast<Complex>();
    Graph current = g0;
    for (std::size_t t = 0; t < cfg.times; ++t) {
        current = rewire(current, cfg.rewire_probability, rng);
        filter.vertex_ops.push_back(current.adjacency().cast<Complex>());
    }
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix gsig(static_cast<Eigen::Index>(cfg.times), m);
    for (Eigen::Index t = 0; t < gsig.rows(); ++t)
        for (Eigen::Index v = 0; v < m; ++v) gsig(t, v) = nd(rng);
    const Matrix f = apply_adaptive(filter, gsig);

    // Observed rows: 1-based odd times from 3 on, i.e. 0-based even rows >= 2.
    std::vector<Eigen::Index> observed, held_out;
    for (Eigen::Index t = 1; t < static_cast<Eigen::Index>(cfg.times); ++t) (t % 2 == 0 ? observed : held_out).push_back(t);
    Matrix obs(static_cast<Eigen::Index>(observed.size()), m);
    for (std::size_t r = 0; r < observed.size(); ++r) obs.row(static_cast<Eigen::Index>(r)) = f.row(observed[r]);
    if (cfg.snr_db) {
        std::mt19937_64 noise(stream(cfg.seed, kNoise));
        add_noise(obs, *cfg.snr_db, noise);
    }

    // feature(t)[j][l] multiplies a_j b_l: j = 0 current time, j = 1 previous.
    auto features = [&](Eigen::Index t) {
        std::array<std::array<Vector, 2>, 2> out;
        for (int j = 0; j < 2; ++j) {
            const Vector gt = gsig.row(t - j).transpose();
            out[j][0] = gt;
            out[j][1] = filter.vertex_ops[static_cast<std::size_t>(t - j)] * gt;
        }
        return out;
    };
    const Eigen::Index rows = m * static_cast<Eigen::Index>(observed.size());
    Vector target(rows);
    std::vector<std::array<std::array<Vector, 2>, 2>> feats;
    for (std::size_t r = 0; r < observed.size(); ++r) {
        feats.push_back(features(observed[r]));
        target.segment(static_cast<Eigen::Index>(r) * m, m) = obs.row(static_cast<Eigen::Index>(r)).transpose();
    }
    Matrix design(rows, 4);
    for (std::size_t r = 0; r < feats.size(); ++r)
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) design.block(static_cast<Eigen::Index>(r) * m, 2 * j + l, m, 1) = feats[r][j][l];
    const RealVector c = real_lstsq(design, target);
    RealMatrix products(2, 2);
    products << c(0), c(1), c(2), c(3);
    RankOneFit fit = rank_one_factor(products);

    // Alternating refinement of the bilinear objective.
    for (std::size_t it = 0; it < cfg.refine_iterations; ++it) {
        Matrix db(rows, 2), da(rows, 2);
        for (std::size_t r = 0; r < feats.size(); ++r)
            for (int s = 0; s < 2; ++s)
                db.block(static_cast<Eigen::Index>(r) * m, s, m, 1) = fit.a[0] * feats[r][0][s] + fit.a[1] * feats[r][1][s];
        const RealVector bn = real_lstsq(db, target);
        fit.b = {bn(0), bn(1)};
        for (std::size_t r = 0; r < feats.size(); ++r)
            for (int s = 0; s < 2; ++s)
                da.block(static_cast<Eigen::Index>(r) * m, s, m, 1) = fit.b[0] * feats[r][s][0] + fit.b[1] * feats[r][s][1];
        const RealVector an = real_lstsq(da, target);
        RealMatrix outer = an * RealVector(Eigen::Vector2d(fit.b[0], fit.b[1])).transpose();
        fit = rank_one_factor(outer);
    }

    AdaptiveFilter est = filter;
    est.p1 = {fit.a[0], fit.a[1]};
    est.p2 = {fit.b[0], fit.b[1]};
    const Matrix fhat = apply_adaptive(est, gsig);
    double total = 0.0;
    for (auto t : held_out) total += safe_ratio((fhat.row(t) - f.row(t)).norm(), f.row(t).norm());

    RealMatrix truth(2, 2);
    truth << a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1];
    RealMatrix estimate(2, 2);
    estimate << fit.a[0] * fit.b[0], fit.a[0] * fit.b[1], fit.a[1] * fit.b[0], fit.a[1] * fit.b[1];

    ExperimentReport r;
    r.experiment = "adaptive";
    r.metrics["graph_vertices"] = static_cast<double>(m);
    r.metrics["times"] = static_cast<double>(cfg.times);
    r.metrics["a0_hat"] = fit.a[0];
    r.metrics["a1_hat"] = fit.a[1];
    r.metrics["b0_hat"] = fit.b[0];
    r.metrics["b1_hat"] = fit.b[1];
    r.metrics["product_error"] = safe_ratio((estimate - truth).norm(), truth.norm());
    r.metrics["recovery_error"] = total;
    r.metrics["mean_recovery_error"] = total / static_cast<double>(held_out.size());
    return r;
}

ExperimentReport run_spectrum(const SpectrumConfig& cfg, const std::string& out_dir) {
    const Graph g = build_graph(cfg.graph, cfg.seed);
    if (cfg.seed_vertices == 0 || cfg.seed_vertices > g.size())
        throw Error(ErrorCode::InvalidArgument, "seed vertex count must lie in [1, n]");
    const auto shift = build_shift(g, cfg.shift);
    const auto basis = HilbertBasis::fourier_series(cfg.truncation, cfg.horizon);
    std::vector<double> labels;
    for (const auto& e : basis.elements()) labels.push_back(e.freq_label);
    const auto tv_freqs = tv_frequencies(cfg.slots, cfg.horizon);

    std::mt19937_64 rng(stream(cfg.seed, kCascade));
    std::vector<std::size_t> ids(g.size()), seeds;
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::sample(ids.begin(), ids.end(), std::back_inserter(seeds), cfg.seed_vertices, rng);
    const std::uint64_t sim_seed = rng();

    ExperimentReport r;
    r.experiment = "spectrum";
    for (std::size_t j = 0; j < cfg.runs.size(); ++j) {
        const auto& run = cfg.runs[j];
        // Every run shares the seed so model comparisons are paired.
        const auto trace = simulate(g, run.model, run.lambda_i, run.lambda_r, cfg.horizon, seeds, sim_seed);
        const RealMatrix step = step_spectrum(trace, shift, basis);
        const RealMatrix tv = tv_spectrum(trace, shift, cfg.slots);
        const std::string key = "run" + std::to_string(j) + ".";
        double infected_time = 0.0;
        std::size_t ever = 0, events = 0;
        for (std::size_t v = 0; v < trace.vertices(); ++v) {
            infected_time += trace.infected_duration(v);
            ever += trace.events[v].empty() ? 0 : 1;
            events += trace.events[v].size();
        }
        r.metrics[key + "spread_step"] = spectral_spread(step, shift.eigenvalues, cfg.shift, labels);
        r.metrics[key + "spread_tv"] = spectral_spread(tv, shift.eigenvalues, cfg.shift, tv_freqs);
        r.metrics[key + "ever_infected_fraction"] = static_cast<double>(ever) / static_cast<double>(g.size());
        r.metrics[key + "events"] = static_cast<double>(events);
        r.metrics[key + "infected_time"] = infected_time;
        if (!out_dir.empty()) {
            const std::string stem = "run" + std::to_string(j) + "_" + to_string(run.model);
            r.artifacts.push_back(
                write_artifact(out_dir, stem + "_trace.csv", [&](std::ostream& o) { write_trace(o, trace); }));
            r.artifacts.push_back(write_artifact(out_dir, stem + "_step_spectrum.csv", [&](std::ostream& o) {
                write_spectrum(o, step, shift.eigenvalues, labels);
            }));
            r.artifacts.push_back(write_artifact(out_dir, stem + "_tv_spectrum.csv", [&](std::ostream& o) {
                write_spectrum(o, tv, shift.eigenvalues, tv_freqs);
            }));
        }
    }
    return r;
}

std::vector<SweepPoint> snr_sweep(const std::function<double(double, std::uint64_t)>& metric,
                                  const std::vector<double>& snrs, std::size_t trials, std::uint64_t base_seed) {
    if (trials == 0) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one trial");
    std::vector<SweepPoint> out(snrs.size());
    std::vector<double> flat(snrs.size() * trials);
    parallel_for(flat.size(), [&](std::size_t idx) {
        flat[idx] = metric(snrs[idx / trials], base_seed + idx % trials);
    });
    for (std::size_t s = 0; s < snrs.size(); ++s) {
        out[s].snr_db = snrs[s];
        out[s].values.assign(flat.begin() + static_cast<std::ptrdiff_t>(s * trials),
                             flat.begin() + static_cast<std::ptrdiff_t>((s + 1) * trials));
        auto sorted = out[s].values;
        std::sort(sorted.begin(), sorted.end());
        out[s].median = trials % 2 == 1 ? sorted[trials / 2] : 0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2]);
    }
    return out;
}

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::ParseError, "experiment config: " + what); }

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_config(std::string("bad value for \"") + key + "\"");
    }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    T value{};
    read(j, key, value);
    out = value;
}

void read_graph(const json& j, GraphSource& s) {
    if (!j.contains("graph")) return;
    const auto& gj = j.at("graph");
    if (gj.is_string()) {
        s.file = gj.get<std::string>();
        return;
    }
    if (!gj.is_object()) bad_config("\"graph\" must be a path or an object");
    read(gj, "file", s.file);
    read(gj, "generator", s.generator);
    read(gj, "n", s.n);
    read(gj, "rows", s.rows);
    read(gj, "cols", s.cols);
    read(gj, "p", s.p);
}

void read_common(const json& j, GraphSource& graph, std::optional<double>& snr, std::uint64_t& seed) {
    read_graph(j, graph);
    read(j, "snr_db", snr);
    read(j, "seed", seed);
}

ShiftKind read_shift(const json& j, ShiftKind fallback) {
    if (!j.contains("shift")) return fallback;
    try {
        return parse_shift_kind(j.at("shift").get<std::string>());
    } catch (const json::exception&) {
        bad_config("\"shift\" must be a string");
    }
}

}  // namespace

ExperimentReport run_experiment(const std::string& config_json, const std::string& out_dir) {
    json j;
    try {
        j = json::parse(config_json);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("experiment config: ") + e.what());
    }
    if (!j.is_object()) bad_config("expected an object");
    std::string kind;
    read(j, "experiment", kind);

    std::function<ExperimentReport(std::optional<double>, std::uint64_t, const std::string&)> runner;
    std::string main_metric;
    std::uint64_t seed = 1;
    if (kind == "recover") {
        RecoverConfig c;
        std::optional<double> snr;
        read_common(j, c.graph, snr, c.seed);
        c.snr_db = snr;
        c.shift = read_shift(j, c.shift);
        read(j, "k", c.k);
        read(j, "B", c.bandwidth);
        read(j, "vertex_blocks", c.vertex_blocks);
        read(j, "points_per_vertex", c.points_per_vertex);
        read(j, "mean", c.mean);
        read(j, "variance", c.variance);
        seed = c.seed;
        runner = [c](std::optional<double> s, std::uint64_t sd, const std::string& dir) mutable {
            c.snr_db = s;
            c.seed = sd;
            return run_recover(c, dir);
        };
        main_metric = "relative_coeff_error";
    } else if (kind == "learn_filter") {
        LearnFilterConfig c;
        std::optional<double> snr;
        read_common(j, c.graph, snr, c.seed);
        c.snr_db = snr;
        read(j, "k", c.k);
        read(j, "B", c.bandwidth);
        read(j, "q", c.intervals);
        read(j, "T0", c.sub_period);
        read(j, "p2", c.p2);
        seed = c.seed;
        runner = [c](std::optional<double> s, std::uint64_t sd, const std::string& dir) mutable {
            c.snr_db = s;
            c.seed = sd;
            return run_learn_filter(c, dir);
        };
        main_metric = "prediction_error";
    } else if (kind == "adaptive") {
        AdaptiveConfig c;
        std::optional<double> snr;
        read_common(j, c.graph, snr, c.seed);
        c.snr_db = snr;
        read(j, "times", c.times);
        read(j, "p", c.rewire_probability);
        read(j, "a", c.a);
        read(j, "b", c.b);
        read(j, "refine_iterations", c.refine_iterations);
        seed = c.seed;
        runner = [c](std::optional<double> s, std::uint64_t sd, const std::string& dir) mutable {
            c.snr_db = s;
            c.seed = sd;
            return run_adaptive(c, dir);
        };
        main_metric = "recovery_error";
    } else if (kind == "spectrum") {
        SpectrumConfig c;
        read_graph(j, c.graph);
        read(j, "seed", c.seed);
        c.shift = read_shift(j, c.shift);
        read(j, "T", c.horizon);
        read(j, "M", c.truncation);
        read(j, "slots", c.slots);
        read(j, "seed_vertices", c.seed_vertices);
        if (j.contains("runs")) {
            c.runs.clear();
            for (const auto& rj : j.at("runs")) {
                CascadeRun run;
                std::string model = "SI";
                read(rj, "model", model);
                run.model = parse_cascade_model(model);
                read(rj, "lambda_I", run.lambda_i);
                read(rj, "lambda_R", run.lambda_r);
                c.runs.push_back(run);
            }
        }
        if (j.contains("sweep")) bad_config("spectrum experiments have no SNR sweep");
        auto report = run_spectrum(c, out_dir);
        report.config_json = j.dump();
        return report;
    } else {
        bad_config("unknown experiment \"" + kind + "\"");
    }

    std::optional<double> snr;
    read(j, "snr_db", snr);
    auto report = runner(snr, seed, out_dir);
    if (j.contains("sweep")) {
        const auto& sj = j.at("sweep");
        std::vector<double> snrs;
        std::size_t trials = 10;
        read(sj, "snr_db", snrs);
        read(sj, "trials", trials);
        if (snrs.empty()) bad_config("sweep needs a non-empty \"snr_db\" list");
        const auto points = snr_sweep(
            [&](double s, std::uint64_t sd) { return runner(s, sd, "").metric(main_metric); }, snrs, trials, seed);
        for (const auto& p : points) {
            std::ostringstream key;
            key << "sweep." << main_metric << ".median_at_" << p.snr_db << "dB";
            report.metrics[key.str()] = p.median;
        }
    }
    report.config_json = j.dump();
    return report;
}

}  // namespace gengsp
