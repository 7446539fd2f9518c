#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gengsp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-9;

/// Eigenpairs of a real symmetric matrix. Eigenvalues ascend; eigenvectors are
/// the columns of `vectors`, orthonormal, with the first component of
/// magnitude above 1e-9 made positive so that results are reproducible.
struct SymEig {
    RealVector values;
    RealMatrix vectors;
};

/// Throws NotSymmetric when |m - m^T| exceeds 1e-10 relative to max|m|.
SymEig sym_eig(const RealMatrix& m);

struct LstsqResult {
    Vector x;
    std::size_t rank = 0;
    bool rank_deficient = false;
    double residual_norm = 0.0;
};

/// Minimum-norm least squares through a complete orthogonal decomposition.
/// Columns whose pivots fall below rel_tol * sigma_max are treated as
/// dependent and the flag is set.
LstsqResult lstsq(const Matrix& m, const Vector& b, double rel_tol = kDefaultRankTol);

std::size_t numeric_rank(const Matrix& m, double rel_tol = kDefaultRankTol);

RealVector singular_values(const Matrix& m);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lower = -1.0;
    double upper = 1.0;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre rule with `order` nodes on [lower, upper]; exact for
/// polynomials of degree up to 2*order - 1.
QuadratureRule gauss_quadrature(std::size_t order, double lower = -1.0, double upper = 1.0);

/// Gauss-Chebyshev (first kind) rule on [-1, 1]: integrates g(x)/sqrt(1-x^2).
/// Weights are pi/order; nodes ascend.
QuadratureRule gauss_chebyshev(std::size_t order);

/// Relative Frobenius distance ||a - b|| / max(||b||, tiny).
double relative_error(const Matrix& a, const Matrix& b);

}  // namespace gengsp
