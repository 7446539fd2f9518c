#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gengsp/cascade.hpp"
#include "gengsp/graph.hpp"
#include "gengsp/numerics.hpp"

namespace gengsp {

/// Graph from an edge-list file or a generator: "grid" (rows x cols),
/// "er" (n, p), "complete", "cycle", "path" (n). Generated weights come from
/// the experiment seed except for grid/cycle/path, which are unit weight.
struct GraphSource {
    std::string file;
    std::string generator = "er";
    std::size_t n = 30;
    std::size_t rows = 10;
    std::size_t cols = 10;
    double p = 0.3;

    static GraphSource er(std::size_t n, double p) {
        GraphSource s;
        s.n = n;
        s.p = p;
        return s;
    }
    static GraphSource grid(std::size_t rows, std::size_t cols) {
        GraphSource s;
        s.generator = "grid";
        s.rows = rows;
        s.cols = cols;
        return s;
    }
};

Graph build_graph(const GraphSource& source, std::uint64_t seed);

/// Complex circular Gaussian noise with total variance set by the empirical
/// power of `values` and the target SNR in dB.
void add_noise(std::vector<Complex>& values, double snr_db, std::mt19937_64& rng);
void add_noise(Matrix& values, double snr_db, std::mt19937_64& rng);

struct RecoverConfig {
    GraphSource graph = GraphSource::grid(10, 10);
    ShiftKind shift = ShiftKind::Laplacian;
    std::size_t k = 30;
    std::size_t bandwidth = 8;        // B Chebyshev modes
    std::size_t vertex_blocks = 2;    // number of disjoint k-vertex blocks sampled
    std::size_t points_per_vertex = 0;  // 0 selects B / vertex_blocks
    double mean = 0.0;
    double variance = 0.5;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
};

struct LearnFilterConfig {
    GraphSource graph = GraphSource::er(30, 0.3);
    std::optional<std::size_t> k;  // default 0.4 n
    std::size_t bandwidth = 10;
    std::size_t intervals = 5;     // q
    double sub_period = 6.283185307179586;  // T0
    std::optional<std::vector<double>> p2;  // default U[0,1] coefficients
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
};

struct AdaptiveConfig {
    GraphSource graph = GraphSource::er(20, 0.3);
    std::size_t times = 20;
    double rewire_probability = 0.05;  // per-step random edge rewiring; a stand-in evolution model
    std::optional<std::vector<double>> a;  // (a0, a1), default U[0.5, 1.5]
    std::optional<std::vector<double>> b;  // (b0, b1), default U[0.5, 1.5]
    std::size_t refine_iterations = 10;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
};

struct CascadeRun {
    CascadeModel model = CascadeModel::SI;
    double lambda_i = 1.0;
    double lambda_r = 1.0;
};

struct SpectrumConfig {
    GraphSource graph = GraphSource::er(50, 0.1);
    ShiftKind shift = ShiftKind::Adjacency;
    std::vector<CascadeRun> runs{{CascadeModel::SI, 1.0, 1.0}, {CascadeModel::SIR, 1.0, 1.0}};
    double horizon = 10.0;
    std::size_t truncation = 32;  // Fourier modes -M..M on [0, T]
    std::size_t slots = 64;
    std::size_t seed_vertices = 1;
    std::uint64_t seed = 1;
};

struct ExperimentReport {
    std::string experiment;
    std::map<std::string, double> metrics;
    std::vector<std::string> artifacts;
    std::string config_json;

    double metric(const std::string& name) const;
    std::string to_json() const;
};

/// Artifacts are written under `out_dir` when it is non-empty.
ExperimentReport run_recover(const RecoverConfig& config, const std::string& out_dir = "");
ExperimentReport run_learn_filter(const LearnFilterConfig& config, const std::string& out_dir = "");
ExperimentReport run_adaptive(const AdaptiveConfig& config, const std::string& out_dir = "");
ExperimentReport run_spectrum(const SpectrumConfig& config, const std::string& out_dir = "");

/// Estimated (a, b) of the adaptive model, normalized so that ||a|| = 1, a0 >= 0.
struct RankOneFit {
    std::vector<double> a;
    std::vector<double> b;
};

/// Best rank-1 factorization of a 2 x 2 product arrangement c(j, k) = a_j b_k.
/// Throws DegenerateFactorization when the arrangement is numerically zero.
RankOneFit rank_one_factor(const RealMatrix& products);

struct SweepPoint {
    double snr_db = 0.0;
    double median = 0.0;
    std::vector<double> values;
};

/// Median of metric(snr, seed) over seeds base_seed .. base_seed + trials - 1,
/// trials evaluated concurrently.
std::vector<SweepPoint> snr_sweep(const std::function<double(double, std::uint64_t)>& metric,
                                  const std::vector<double>& snrs, std::size_t trials, std::uint64_t base_seed);

/// Runs the experiment described by a JSON document. A "sweep" object
/// {"snr_db": [...], "trials": n} adds the median of the experiment's main
/// error metric per SNR.
ExperimentReport run_experiment(const std::string& config_json, const std::string& out_dir = "");

}  // namespace gengsp
