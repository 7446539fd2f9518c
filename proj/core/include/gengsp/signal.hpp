#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gengsp/graph.hpp"
#include "gengsp/hilbert.hpp"
#include "gengsp/numerics.hpp"

namespace gengsp {

/// The (Phi, Xi) pair a coefficient grid is expressed in. Cheap to copy.
class SignalContext {
public:
    SignalContext(ShiftOperator shift, HilbertBasis basis);
    SignalContext(std::shared_ptr<const ShiftOperator> shift, std::shared_ptr<const HilbertBasis> basis);

    const ShiftOperator& shift() const noexcept { return *shift_; }
    const HilbertBasis& basis() const noexcept { return *basis_; }
    std::size_t vertices() const noexcept { return shift_->size(); }
    std::size_t modes() const noexcept { return basis_->size(); }

    /// Same shift matrix and kind, same basis construction.
    bool compatible(const SignalContext& other) const;

private:
    std::shared_ptr<const ShiftOperator> shift_;
    std::shared_ptr<const HilbertBasis> basis_;
};

/// Element of S(G, H) stored as coefficients c(i, m) over phi_i (x) xi_m.
/// Rows follow ascending graph eigenvalue, columns ascending frequency label.
class GeneralizedSignal {
public:
    GeneralizedSignal(SignalContext context, Matrix coeffs);

    const SignalContext& context() const noexcept { return context_; }
    const Matrix& coeffs() const noexcept { return coeffs_; }

    /// f(v, x) = sum c(i, m) phi_i(v) xi_m(x).
    Complex evaluate(std::size_t vertex, double x) const;
    /// The graph signal f(., x).
    Vector at(double x) const;
    /// Vertex-domain H-coefficients: row v holds <f(v, .), xi_m>.
    Matrix vertex_coeffs() const;

private:
    SignalContext context_;
    Matrix coeffs_;
};

/// A signal given pointwise, f(v, x). `breakpoints` lists interior points of
/// Omega where some f(v, .) may jump, so projections split the integral there.
struct FunctionSignal {
    std::size_t vertices = 0;
    std::function<Complex(std::size_t, double)> value;
    std::vector<double> breakpoints;
};

struct FrequencyPoint {
    double graph_freq = 0.0;
    double hilbert_freq = 0.0;

    friend bool operator==(const FrequencyPoint&, const FrequencyPoint&) = default;
};

/// Row v holds the H-transform <f(v, .), xi_m> for every m.
Matrix h_transform_all(const FunctionSignal& f, const HilbertBasis& basis,
                       const ProjectionOptions& options = {});

/// The vector (<f(v, .), xi_pos>)_v in C^n.
Vector h_transform(const FunctionSignal& f, const HilbertBasis& basis, std::size_t pos,
                   const ProjectionOptions& options = {});

/// <f(., x), phi_i> in C^n. Throws OutOfDomain for x outside Omega.
Complex g_transform(const FunctionSignal& f, const SignalContext& context, std::size_t i, double x);

/// Joint transform c(i, m) = sum_v conj(phi_i(v)) <f(v, .), xi_m>.
Matrix f_transform(const FunctionSignal& f, const SignalContext& context,
                   const ProjectionOptions& options = {});

GeneralizedSignal inverse_f_transform(const Matrix& grid, const SignalContext& context);

std::vector<FrequencyPoint> frequency_range(const Matrix& grid, const SignalContext& context,
                                            double magnitude_tol = 1e-10);
std::vector<FrequencyPoint> frequency_range(const GeneralizedSignal& f, double magnitude_tol = 1e-10);

/// Sum over the grid of c_f * conj(c_g). Throws BasisMismatch on mixed contexts.
Complex inner_product(const GeneralizedSignal& f, const GeneralizedSignal& g);

/// Wraps a coefficient signal as a pointwise one.
FunctionSignal as_function(const GeneralizedSignal& f);

struct Sample {
    std::size_t vertex = 0;
    double x = 0.0;
    Complex value{};
};

struct FittedSignal {
    GeneralizedSignal signal;
    double residual_norm = 0.0;
};

/// Converts a sample table to a grid: per vertex, least squares of the
/// values on the basis evaluated at that vertex's points, then projection on
/// Phi. Throws RankDeficient if some vertex's points do not determine its
/// H-coefficients.
FittedSignal fit_samples(const std::vector<Sample>& samples, const SignalContext& context);

// Coefficient grid CSV: phi_index,xi_index,re,im. phi_index is the 0-based
// eigenvector position, xi_index the basis element label.
void write_grid(std::ostream& out, const Matrix& grid, const HilbertBasis& basis);
Matrix read_grid(std::istream& in, const SignalContext& context);

// Signal sample CSV: vertex,x,re,im.
void write_samples(std::ostream& out, const std::vector<Sample>& samples);
std::vector<Sample> read_samples(std::istream& in);

}  // namespace gengsp
