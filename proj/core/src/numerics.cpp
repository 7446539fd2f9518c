#include "gengsp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gengsp/error.hpp"

namespace gengsp {

SymEig sym_eig(const RealMatrix& m) {
    if (m.rows() != m.cols())
        throw Error(ErrorCode::DimensionMismatch, "sym_eig needs a square matrix");
    const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    const double asym = m.size() ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
    if (asym > 1e-10 * scale)
        throw Error(ErrorCode::NotSymmetric, "asymmetry " + std::to_string(asym));

    SymEig out;
    if (m.size() == 0) return out;

    // Symmetrize so round-off in the input does not leak into the solver.
    const RealMatrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym);
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
            const double c = out.vectors(i, j);
            if (std::abs(c) > 1e-9) {
                if (c < 0) out.vectors.col(j) *= -1.0;
                break;
            }
        }
    }
    return out;
}

RealVector singular_values(const Matrix& m) {
    if (m.size() == 0) return RealVector{};
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues();
}

std::size_t numeric_rank(const Matrix& m, double rel_tol) {
    const RealVector s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cut = rel_tol * s(0);
    return static_cast<std::size_t>((s.array() > cut).count());
}

LstsqResult lstsq(const Matrix& m, const Vector& b, double rel_tol) {
    if (b.size() != m.rows())
        throw Error(ErrorCode::DimensionMismatch,
                    "rhs has " + std::to_string(b.size()) + " rows, matrix has " +
                        std::to_string(m.rows()));
    LstsqResult out;
    out.x = Vector::Zero(m.cols());
    if (m.rows() == 0 || m.cols() == 0) {
        out.rank = 0;
        out.rank_deficient = m.cols() > 0;
        out.residual_norm = b.norm();
        return out;
    }

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double cut = s(0) * rel_tol;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++rank;

    // Minimum-norm pseudo-inverse solve restricted to the retained singular triplets.
    const auto r = static_cast<Eigen::Index>(rank);
    if (r > 0) {
        const Vector coeff = svd.matrixU().leftCols(r).adjoint() * b;
        out.x = svd.matrixV().leftCols(r) * (coeff.array() / s.head(r).array()).matrix();
    }
    out.rank = rank;
    out.rank_deficient = rank < static_cast<std::size_t>(m.cols());
    out.residual_norm = (m * out.x - b).norm();
    return out;
}

QuadratureRule gauss_quadrature(std::size_t order, double lower, double upper) {
    if (order == 0) throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
    QuadratureRule rule;
    rule.lower = lower;
    rule.upper = upper;
    rule.nodes.resize(order);
    rule.weights.resize(order);

    const double half = 0.5 * (upper - lower);
    const double mid = 0.5 * (upper + lower);
    const auto n = static_cast<double>(order);
    for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
        // Newton on P_n from the Tricomi initial guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= order; ++k) {
                const auto kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            // Recompute the derivative at the converged node.
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= order; ++k) {
                const auto kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[order - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[order - 1 - i] = half * w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = mid;
    return rule;
}

QuadratureRule gauss_chebyshev(std::size_t order) {
    if (order == 0) throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.assign(order, std::numbers::pi / static_cast<double>(order));
    const auto n = static_cast<double>(order);
    for (std::size_t k = 0; k < order; ++k) {
        // k-th node counted from the left end.
        rule.nodes[k] = -std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / n);
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

double relative_error(const Matrix& a, const Matrix& b) {
    const double denom = std::max(b.norm(), 1e-300);
    return (a - b).norm() / denom;
}

}  // namespace gengsp
