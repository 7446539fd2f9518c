#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gengsp/graph.hpp"
#include "gengsp/numerics.hpp"

namespace gengsp {

enum class BasisKind { HalfIntegerFourier, FourierSeries, Chebyshev, GraphBasis };

std::string to_string(BasisKind kind);

struct BasisElement {
    /// Label as usually written: m for exp(i(m+1/2)x), k for exp(i 2 pi k x / T),
    /// the polynomial degree j for Chebyshev, the eigenvector index for graphs.
    int index = 0;
    /// Frequency axis value, the reciprocal of the compact operator's eigenvalue.
    double freq_label = 0.0;
    /// Eigenvalue of the operator A acting on H, when defined. Absent for the
    /// DC element of the Fourier series and the constant Chebyshev polynomial.
    std::optional<double> operator_eigenvalue;
};

/// Truncated orthonormal family of H = L^2(Omega, mu), elements sorted by
/// ascending frequency label. Immutable after construction.
class HilbertBasis {
public:
    static HilbertBasis half_integer_fourier(std::size_t truncation);
    static HilbertBasis fourier_series(std::size_t truncation, double period);
    static HilbertBasis chebyshev(std::size_t truncation);
    /// Eigenvectors of the chosen shift of `g`, keeping the first
    /// min(truncation, n') in ascending eigenvalue order. Omega = vertex ids.
    static HilbertBasis graph_basis(const Graph& g, ShiftKind shift, std::size_t truncation);

    BasisKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const BasisElement& element(std::size_t pos) const { return elements_.at(pos); }
    const std::vector<BasisElement>& elements() const noexcept { return elements_; }

    /// Position in the sorted element list of the element with label `index`.
    std::size_t position_of(int index) const;

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    bool discrete() const noexcept { return kind_ == BasisKind::GraphBasis; }
    /// Period of the Fourier kinds (2 pi for the half-integer family).
    double period() const noexcept { return upper_ - lower_; }

    bool contains(double x) const noexcept;

    /// xi_pos(x). Throws OutOfDomain outside Omega (or off the vertex ids).
    Complex eval(std::size_t pos, double x) const;
    /// All elements at x, in basis order.
    Vector eval_all(double x) const;

    /// Angular frequency omega with xi(x) = exp(i omega x) / sqrt(period), for
    /// the two Fourier kinds. Throws BasisMismatch otherwise.
    double angular_frequency(std::size_t pos) const;

    /// Quadrature against mu. `breakpoints` are interior points where the
    /// integrand may jump; the rule is composite across them. For the
    /// discrete kind the rule is the counting measure on the vertex ids.
    QuadratureRule quadrature(std::size_t order, std::span<const double> breakpoints = {}) const;

    std::size_t default_quadrature_order() const noexcept { return 4 * truncation_ + 16; }

    const RealMatrix& graph_eigenvectors() const noexcept { return graph_vectors_; }

    /// Identity of the underlying construction, used to reject mixed contexts.
    bool same_as(const HilbertBasis& other) const;

private:
    HilbertBasis() = default;

    BasisKind kind_ = BasisKind::HalfIntegerFourier;
    std::size_t truncation_ = 0;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::vector<BasisElement> elements_;
    RealMatrix graph_vectors_;  // n' x size() for GraphBasis
};

/// Parses `kind:truncation[:extra]` flags: half_fourier:M, fourier:M[:T],
/// chebyshev:M. Graph bases need a graph and are built directly.
HilbertBasis parse_basis(const std::string& text);

using ScalarFunction = std::function<Complex(double)>;

struct ProjectionOptions {
    std::size_t order = 0;                 // 0 selects the basis default
    std::vector<double> breakpoints;       // jump locations inside Omega
    double refinement_tol = 1e-6;          // doubled-order disagreement bound
};

/// <f, xi_pos>_H for every element at once. The integral is evaluated with
/// the requested order and again with twice the order; a disagreement above
/// refinement_tol (relative to max(1, |value|)) raises QuadratureUnderResolved.
Vector project_all(const HilbertBasis& basis, const ScalarFunction& f,
                   const ProjectionOptions& options = {});

Complex project(const HilbertBasis& basis, std::size_t pos, const ScalarFunction& f,
                const ProjectionOptions& options = {});

/// Positions of the `count` elements with smallest |freq_label|, ties broken
/// toward the negative label; returned in ascending basis order.
std::vector<std::size_t> low_band(const HilbertBasis& basis, std::size_t count);

}  // namespace gengsp
