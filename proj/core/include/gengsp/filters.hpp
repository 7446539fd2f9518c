#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "gengsp/numerics.hpp"
#include "gengsp/signal.hpp"

namespace gengsp {

/// P(A_G (x) A) with P(z) = coeffs[0] + coeffs[1] z + ...
struct PolynomialFilter {
    std::vector<Complex> coeffs;
};

/// g * f, multiplying F-coefficients entrywise by those of g.
struct ConvolutionFilter {
    Matrix kernel;
};

/// Closed axis-aligned rectangle in the (graph eigenvalue, frequency label) plane.
struct FrequencyRect {
    double graph_lo = 0.0, graph_hi = 0.0;
    double freq_lo = 0.0, freq_hi = 0.0;
};

/// Projection onto the frequency pairs in K, K given as a union of closed
/// rectangles and explicit points (matched within `point_tol`).
struct BandPassFilter {
    std::vector<FrequencyRect> rects;
    std::vector<FrequencyPoint> points;
    double point_tol = 1e-9;

    bool contains(const FrequencyPoint& p) const;
};

/// B_G on the Phi-coefficient axis and B_H on the Xi-coefficient axis:
/// c -> B_G c B_H^T.
struct TensorFilter {
    Matrix graph_op;
    Matrix hilbert_op;
};

/// sum_u P1(M)_u (x) P2(A_u), P1(M)_u being column u of P1(M) with zeros
/// elsewhere. Acts on H = C^m; `vertex_ops` holds one m x m matrix per vertex.
struct AdaptiveFilter {
    std::vector<Complex> p1;
    Matrix mixing;
    std::vector<Matrix> vertex_ops;
    std::vector<Complex> p2;
};

class Filter;

/// Inner filter followed by projection onto span{w_1, ..., w_cutoff}, the w
/// enumerated in grid order (phi index major, xi position minor).
struct TruncationFilter {
    std::shared_ptr<const Filter> inner;
    std::size_t cutoff = 0;
};

class Filter {
public:
    using Variant = std::variant<PolynomialFilter, ConvolutionFilter, BandPassFilter, TensorFilter,
                                 AdaptiveFilter, TruncationFilter>;

    template <class T>
        requires std::is_constructible_v<Variant, T&&>
    Filter(T&& alternative) : v_(std::forward<T>(alternative)) {}  // NOLINT: implicit by intent

    const Variant& variant() const noexcept { return v_; }
    std::string kind() const;

    /// True for the families that act diagonally on the Phi (x) Xi grid.
    bool diagonal() const noexcept;

private:
    Variant v_;
};

GeneralizedSignal apply(const Filter& filter, const GeneralizedSignal& f);

/// Adaptive filter on vertex-domain values: row u of `values` is f(u) in C^m.
Matrix apply_adaptive(const AdaptiveFilter& filter, const Matrix& values);

/// Matrix of the filter on the truncated grid, flat index i * modes + m.
Matrix matrix_form(const Filter& filter, const SignalContext& context);

Filter truncate_finite_rank(Filter inner, std::size_t cutoff);

struct ShiftInvarianceReport {
    bool shift_invariant = false;
    bool weakly_shift_invariant = false;
    /// ||[A_G (x) Id, L]||, ||[Id (x) A, L]||, ||[A_G (x) A, L]|| (Frobenius).
    std::array<double, 3> commutator_norms{};
};

/// Truncated-grid commutator test. `filter_matrix` acts on C^n (x) C^M with
/// flat index i * M + m; graph_op is n x n, hilbert_op is M x M. A property
/// holds when the commutator norm is at most tol * ||L||.
ShiftInvarianceReport check_shift_invariance(const Matrix& filter_matrix, const Matrix& graph_op,
                                             const Matrix& hilbert_op, double tol = 1e-10);

/// Same test in coefficient coordinates, where A_G and A are the diagonal
/// eigenvalue matrices. Throws UnboundedFreqLabel if some basis element has
/// no operator eigenvalue.
ShiftInvarianceReport check_shift_invariance(const Matrix& filter_matrix, const SignalContext& context,
                                             double tol = 1e-10);

/// Frobenius norm of AB - BA.
double commutator_norm(const Matrix& a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);

Complex polyval(const std::vector<Complex>& coeffs, Complex z);
Matrix polyval(const std::vector<Complex>& coeffs, const Matrix& m);

/// Filter description in JSON, e.g. {"kind": "polynomial", "coeffs": [1, 0.5]}.
/// Complex numbers are written as a number or a [re, im] pair. Convolution
/// kernels come from "grid_file" (coefficient CSV) or inline "entries"
/// [[phi_index, xi_index, re, im], ...].
Filter parse_filter_json(const std::string& text, const SignalContext& context);

}  // namespace gengsp
