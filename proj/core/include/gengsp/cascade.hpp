#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gengsp/graph.hpp"
#include "gengsp/hilbert.hpp"
#include "gengsp/numerics.hpp"
#include "gengsp/signal.hpp"

namespace gengsp {

enum class CascadeModel { SI, SIR, SIRI };
std::string to_string(CascadeModel model);
CascadeModel parse_cascade_model(const std::string& text);

enum class NodeStatus { Susceptible, Infected, Recovered };
std::string to_string(NodeStatus status);
NodeStatus parse_node_status(const std::string& text);

struct CascadeEvent {
    double time = 0.0;
    NodeStatus status = NodeStatus::Infected;
};

struct CascadeTrace {
    CascadeModel model = CascadeModel::SI;
    double lambda_i = 1.0;
    double lambda_r = 0.0;  // unused for SI
    double horizon = 1.0;
    /// Per vertex, events in increasing time. Seeds carry an infection at t = 0.
    std::vector<std::vector<CascadeEvent>> events;

    std::size_t vertices() const noexcept { return events.size(); }
    /// Right-continuous infected indicator.
    bool infected_at(std::size_t v, double t) const;
    /// Maximal intervals [t1, t2] within [0, horizon] where v is infected.
    std::vector<std::pair<double, double>> infected_intervals(std::size_t v) const;
    double infected_duration(std::size_t v) const;
    /// Throws InvalidArgument if event times or status sequences are illegal.
    void validate() const;
};

/// Continuous-time event simulation. Every infected vertex holds an
/// exponential clock of mean lambda_i per susceptible neighbour and, outside
/// SI, a recovery clock of mean lambda_r. Edge weights do not affect rates.
CascadeTrace simulate(const Graph& g, CascadeModel model, double lambda_i, double lambda_r, double horizon,
                      const std::vector<std::size_t>& seeds, std::uint64_t seed);

/// Infected indicators as a pointwise signal on Omega = [lower, lower + T].
FunctionSignal as_signal(const CascadeTrace& trace, double lower = 0.0);

/// Closed-form H-transform of every infected indicator; row v, column m.
/// The basis must be one of the Fourier kinds with period equal to the horizon.
Matrix step_h_transform(const CascadeTrace& trace, const HilbertBasis& basis);

/// Phi^T applied to step_h_transform: the complex joint coefficient grid.
Matrix step_transform(const CascadeTrace& trace, const ShiftOperator& shift, const HilbertBasis& basis);

/// |step_transform|.
RealMatrix step_spectrum(const CascadeTrace& trace, const ShiftOperator& shift, const HilbertBasis& basis);

/// Status sampled at s T / slots, unitary DFT along slots, Phi^T along vertices.
/// Column k is DFT bin k (0 .. slots-1).
RealMatrix tv_spectrum(const CascadeTrace& trace, const ShiftOperator& shift, std::size_t slots);

/// Angular frequency of each DFT bin, bins from slots/2 up folded to negative.
std::vector<double> tv_frequencies(std::size_t slots, double horizon);

/// Fraction of the squared magnitude outside the low quadrant. The low graph
/// half is the ceil(n/2) smoothest eigenvectors (smallest Laplacian or
/// largest adjacency eigenvalues); the low frequency half has |freq| at most
/// half the largest |freq|. Returns 0 for an all-zero grid.
double spectral_spread(const RealMatrix& magnitude, const RealVector& graph_eigenvalues, ShiftKind kind,
                       const std::vector<double>& freqs);

// Trace CSV: vertex,timestamp,status.
void write_trace(std::ostream& out, const CascadeTrace& trace);
/// Reads a trace for `vertices` nodes on [0, horizon]. The model is inferred
/// from the statuses present.
CascadeTrace read_trace(std::istream& in, std::size_t vertices, double horizon);

// Spectrum CSV: graph_eig,freq,magnitude.
void write_spectrum(std::ostream& out, const RealMatrix& magnitude, const RealVector& graph_eigenvalues,
                    const std::vector<double>& freqs);

}  // namespace gengsp
