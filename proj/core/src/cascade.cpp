#include "gengsp/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "gengsp/csv.hpp"
#include "gengsp/error.hpp"

namespace gengsp {

std::string to_string(CascadeModel model) {
    switch (model) {
        case CascadeModel::SI: return "SI";
        case CascadeModel::SIR: return "SIR";
        case CascadeModel::SIRI: return "SIRI";
    }
    return "?";
}

CascadeModel parse_cascade_model(const std::string& text) {
    if (text == "SI" || text == "si") return CascadeModel::SI;
    if (text == "SIR" || text == "sir") return CascadeModel::SIR;
    if (text == "SIRI" || text == "siri") return CascadeModel::SIRI;
    throw Error(ErrorCode::ParseError, "unknown cascade model \"" + text + "\"");
}

std::string to_string(NodeStatus status) {
    switch (status) {
        case NodeStatus::Susceptible: return "susceptible";
        case NodeStatus::Infected: return "infected";
        case NodeStatus::Recovered: return "recovered";
    }
    return "?";
}

NodeStatus parse_node_status(const std::string& text) {
    if (text == "susceptible") return NodeStatus::Susceptible;
    if (text == "infected") return NodeStatus::Infected;
    if (text == "recovered") return NodeStatus::Recovered;
    throw Error(ErrorCode::ParseError, "unknown status \"" + text + "\"");
}

bool CascadeTrace::infected_at(std::size_t v, double t) const {
    bool infected = false;
    for (const auto& e : events.at(v)) {
        if (e.time > t) break;
        infected = e.status == NodeStatus::Infected;
    }
    return infected;
}

std::vector<std::pair<double, double>> CascadeTrace::infected_intervals(std::size_t v) const {
    std::vector<std::pair<double, double>> out;
    double start = -1.0;
    for (const auto& e : events.at(v)) {
        if (e.status == NodeStatus::Infected) {
            if (start < 0.0) start = e.time;
        } else if (start >= 0.0) {
            if (e.time > start) out.emplace_back(start, e.time);
            start = -1.0;
        }
    }
    if (start >= 0.0 && start < horizon) out.emplace_back(start, horizon);
    return out;
}

double CascadeTrace::infected_duration(std::size_t v) const {
    double total = 0.0;
    for (const auto& [a, b] : infected_intervals(v)) total += b - a;
    return total;
}

void CascadeTrace::validate() const {
    const std::size_t cap = model == CascadeModel::SI ? 1 : model == CascadeModel::SIR ? 2 : SIZE_MAX;
    const NodeStatus off = model == CascadeModel::SIR ? NodeStatus::Recovered : NodeStatus::Susceptible;
    for (std::size_t v = 0; v < events.size(); ++v) {
        const auto& ev = events[v];
        const auto where = "vertex " + std::to_string(v) + ": ";
        if (ev.size() > cap) throw Error(ErrorCode::InvalidArgument, where + "too many events for " + to_string(model));
        for (std::size_t k = 0; k < ev.size(); ++k) {
            if (!(ev[k].time >= 0.0 && ev[k].time <= horizon))
                throw Error(ErrorCode::InvalidArgument, where + "event outside [0, T]");
            if (k > 0 && !(ev[k].time > ev[k - 1].time))
                throw Error(ErrorCode::InvalidArgument, where + "timestamps not strictly increasing");
            const NodeStatus expected = k % 2 == 0 ? NodeStatus::Infected : off;
            if (ev[k].status != expected)
                throw Error(ErrorCode::InvalidArgument, where + "statuses do not alternate");
        }
    }
}

CascadeTrace simulate(const Graph& g, CascadeModel model, double lambda_i, double lambda_r, double horizon,
                      const std::vector<std::size_t>& seeds, std::uint64_t seed) {
    if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "cascade needs at least one seed vertex");
    if (!(lambda_i > 0.0) || !std::isfinite(lambda_i))
        throw Error(ErrorCode::InvalidArgument, "lambda_I must be positive");
    if (model != CascadeModel::SI && (!(lambda_r > 0.0) || !std::isfinite(lambda_r)))
        throw Error(ErrorCode::InvalidArgument, "lambda_R must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");

    const std::size_t n = g.size();
    CascadeTrace trace;
    trace.model = model;
    trace.lambda_i = lambda_i;
    trace.lambda_r = model == CascadeModel::SI ? 0.0 : lambda_r;
    trace.horizon = horizon;
    trace.events.assign(n, {});

    std::vector<NodeStatus> state(n, NodeStatus::Susceptible);
    for (auto s : std::set<std::size_t>(seeds.begin(), seeds.end())) {
        if (s >= n) throw Error(ErrorCode::OutOfDomain, "seed vertex out of range");
        state[s] = NodeStatus::Infected;
        trace.events[s].push_back({0.0, NodeStatus::Infected});
    }

    std::vector<std::vector<std::size_t>> nbrs(n);
    for (const auto& e : g.edges()) {
        nbrs[e.u].push_back(e.v);
        nbrs[e.v].push_back(e.u);
    }
    const double infect_rate = 1.0 / lambda_i;
    const double recover_rate = model == CascadeModel::SI ? 0.0 : 1.0 / lambda_r;
    const NodeStatus off = model == CascadeModel::SIR ? NodeStatus::Recovered : NodeStatus::Susceptible;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> frontier;  // (infected, susceptible) pairs
    std::vector<std::size_t> infected;
    for (;;) {
        frontier.clear();
        infected.clear();
        for (std::size_t v = 0; v < n; ++v) {
            if (state[v] != NodeStatus::Infected) continue;
            infected.push_back(v);
            for (auto u : nbrs[v])
                if (state[u] == NodeStatus::Susceptible) frontier.emplace_back(v, u);
        }
        const double total = infect_rate * static_cast<double>(frontier.size()) +
                             recover_rate * static_cast<double>(infected.size());
        if (total <= 0.0) break;
        t += std::exponential_distribution<double>(total)(rng);
        if (t > horizon) break;
        const double pick = unit(rng) * total;
        const double infect_total = infect_rate * static_cast<double>(frontier.size());
        if (pick < infect_total) {
            const auto idx = std::min(frontier.size() - 1, static_cast<std::size_t>(pick / infect_rate));
            const auto target = frontier[idx].second;
            state[target] = NodeStatus::Infected;
            trace.events[target].push_back({t, NodeStatus::Infected});
        } else {
            const auto idx = std::min(infected.size() - 1,
                                      static_cast<std::size_t>((pick - infect_total) / recover_rate));
            const auto target = infected[idx];
            state[target] = off;
            trace.events[target].push_back({t, off});
        }
    }
    return trace;
}

FunctionSignal as_signal(const CascadeTrace& trace, double lower) {
    FunctionSignal f;
    f.vertices = trace.vertices();
    auto shared = std::make_shared<const CascadeTrace>(trace);
    f.value = [shared, lower](std::size_t v, double x) {
        return Complex(shared->infected_at(v, x - lower) ? 1.0 : 0.0, 0.0);
    };
    std::set<double> cuts;
    for (const auto& ev : trace.events)
        for (const auto& e : ev)
            if (e.time > 0.0 && e.time < trace.horizon) cuts.insert(lower + e.time);
    f.breakpoints.assign(cuts.begin(), cuts.end());
    return f;
}

Matrix step_h_transform(const CascadeTrace& trace, const HilbertBasis& basis) {
    if (basis.kind() != BasisKind::FourierSeries && basis.kind() != BasisKind::HalfIntegerFourier)
        throw Error(ErrorCode::BasisMismatch, "step spectra need a Fourier basis");
    if (std::abs(basis.period() - trace.horizon) > 1e-9 * trace.horizon)
        throw Error(ErrorCode::BasisMismatch, "basis period differs from the cascade horizon");
    const double norm = std::sqrt(basis.period());
    const double lo = basis.lower();
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(trace.vertices()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t v = 0; v < trace.vertices(); ++v)
        for (const auto& [t1, t2] : trace.infected_intervals(v))
            for (std::size_t m = 0; m < basis.size(); ++m) {
                const double w = basis.angular_frequency(m);
                const Complex c = w == 0.0 ? Complex(t2 - t1, 0.0)
                                           : (std::polar(1.0, -w * (lo + t1)) - std::polar(1.0, -w * (lo + t2))) /
                                                 Complex(0.0, w);
                h(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(m)) += c / norm;
            }
    return h;
}

Matrix step_transform(const CascadeTrace& trace, const ShiftOperator& shift, const HilbertBasis& basis) {
    if (shift.size() != trace.vertices())
        throw Error(ErrorCode::DimensionMismatch, "trace and shift vertex counts differ");
    return shift.eigenvectors.transpose().cast<Complex>() * step_h_transform(trace, basis);
}

RealMatrix step_spectrum(const CascadeTrace& trace, const ShiftOperator& shift, const HilbertBasis& basis) {
    return step_transform(trace, shift, basis).cwiseAbs();
}

RealMatrix tv_spectrum(const CascadeTrace& trace, const ShiftOperator& shift, std::size_t slots) {
    if (slots < 2) throw Error(ErrorCode::InvalidArgument, "need at least two time slots");
    if (shift.size() != trace.vertices())
        throw Error(ErrorCode::DimensionMismatch, "trace and shift vertex counts differ");
    const auto n = static_cast<Eigen::Index>(trace.vertices());
    const auto s = static_cast<Eigen::Index>(slots);
    RealMatrix status(n, s);
    for (Eigen::Index v = 0; v < n; ++v)
        for (Eigen::Index k = 0; k < s; ++k)
            status(v, k) = trace.infected_at(static_cast<std::size_t>(v),
                                             trace.horizon * static_cast<double>(k) / static_cast<double>(slots))
                               ? 1.0
                               : 0.0;
    Matrix dft(s, s);
    const double scale = 1.0 / std::sqrt(static_cast<double>(slots));
    for (Eigen::Index j = 0; j < s; ++j)
        for (Eigen::Index k = 0; k < s; ++k)
            dft(j, k) = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>((j * k) % s) /
                                              static_cast<double>(s));
    const Matrix projected = (shift.eigenvectors.transpose() * status).cast<Complex>();
    return (projected * dft).cwiseAbs();
}

std::vector<double> tv_frequencies(std::size_t slots, double horizon) {
    std::vector<double> out(slots);
    for (std::size_t k = 0; k < slots; ++k) {
        const double bin = 2 * k < slots ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(slots);
        out[k] = 2.0 * std::numbers::pi * bin / horizon;
    }
    return out;
}

double spectral_spread(const RealMatrix& mag, const RealVector& graph_eigenvalues, ShiftKind kind,
                       const std::vector<double>& freqs) {
    if (mag.rows() != graph_eigenvalues.size() || mag.cols() != static_cast<Eigen::Index>(freqs.size()))
        throw Error(ErrorCode::DimensionMismatch, "spectrum shape does not match its axes");
    const double total = mag.squaredNorm();
    if (total == 0.0) return 0.0;
    const Eigen::Index n = mag.rows();
    const Eigen::Index half = (n + 1) / 2;
    double fmax = 0.0;
    for (double f : freqs) fmax = std::max(fmax, std::abs(f));
    double low = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool smooth = kind == ShiftKind::Laplacian ? i < half : i >= n - half;
        if (!smooth) continue;
        for (Eigen::Index m = 0; m < mag.cols(); ++m)
            if (std::abs(freqs[static_cast<std::size_t>(m)]) <= 0.5 * fmax * (1.0 + 1e-12)) low += mag(i, m) * mag(i, m);
    }
    return std::max(0.0, 1.0 - low / total);
}

void write_trace(std::ostream& out, const CascadeTrace& trace) {
    csv::write_header(out, {"vertex", "timestamp", "status"});
    for (std::size_t v = 0; v < trace.vertices(); ++v)
        for (const auto& e : trace.events[v]) out << v << ',' << csv::format(e.time) << ',' << to_string(e.status) << '\n';
}

CascadeTrace read_trace(std::istream& in, std::size_t vertices, double horizon) {
    CascadeTrace trace;
    trace.horizon = horizon;
    trace.events.assign(vertices, {});
    bool recovered = false, susceptible = false;
    for (const auto& row : csv::read(in, {"vertex", "timestamp", "status"})) {
        const auto v = csv::to_integer(row[0], row.line);
        if (v < 0 || v >= static_cast<long long>(vertices))
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": vertex out of range");
        NodeStatus st{};
        try {
            st = parse_node_status(row[2]);
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": " + e.what());
        }
        recovered |= st == NodeStatus::Recovered;
        susceptible |= st == NodeStatus::Susceptible;
        trace.events[static_cast<std::size_t>(v)].push_back({csv::to_double(row[1], row.line), st});
    }
    if (recovered && susceptible) throw Error(ErrorCode::ParseError, "trace mixes recovered and susceptible events");
    trace.model = recovered ? CascadeModel::SIR : susceptible ? CascadeModel::SIRI : CascadeModel::SI;
    if (trace.model == CascadeModel::SI)
        for (const auto& ev : trace.events)
            if (ev.size() > 1) trace.model = CascadeModel::SIRI;
    try {
        trace.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return trace;
}

void write_spectrum(std::ostream& out, const RealMatrix& magnitude, const RealVector& graph_eigenvalues,
                    const std::vector<double>& freqs) {
    if (magnitude.rows() != graph_eigenvalues.size() || magnitude.cols() != static_cast<Eigen::Index>(freqs.size()))
        throw Error(ErrorCode::DimensionMismatch, "spectrum shape does not match its axes");
    csv::write_header(out, {"graph_eig", "freq", "magnitude"});
    for (Eigen::Index i = 0; i < magnitude.rows(); ++i)
        for (Eigen::Index m = 0; m < magnitude.cols(); ++m)
            out << csv::format(graph_eigenvalues(i)) << ',' << csv::format(freqs[static_cast<std::size_t>(m)]) << ','
                << csv::format(magnitude(i, m)) << '\n';
}

}  // namespace gengsp
