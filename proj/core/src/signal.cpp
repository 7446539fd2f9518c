#include "gengsp/signal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "gengsp/csv.hpp"
#include "gengsp/error.hpp"
#include "gengsp/parallel.hpp"

namespace gengsp {

SignalContext::SignalContext(ShiftOperator shift, HilbertBasis basis)
    : shift_(std::make_shared<const ShiftOperator>(std::move(shift))),
      basis_(std::make_shared<const HilbertBasis>(std::move(basis))) {}

SignalContext::SignalContext(std::shared_ptr<const ShiftOperator> shift,
                             std::shared_ptr<const HilbertBasis> basis)
    : shift_(std::move(shift)), basis_(std::move(basis)) {
    if (!shift_ || !basis_) throw Error(ErrorCode::InvalidArgument, "null shift or basis");
}

bool SignalContext::compatible(const SignalContext& other) const {
    if (shift_ == other.shift_ && basis_ == other.basis_) return true;
    const bool same_shift = shift_ == other.shift_ ||
                            (shift_->kind == other.shift_->kind &&
                             shift_->matrix.rows() == other.shift_->matrix.rows() &&
                             shift_->matrix == other.shift_->matrix);
    const bool same_basis = basis_ == other.basis_ || basis_->same_as(*other.basis_);
    return same_shift && same_basis;
}

GeneralizedSignal::GeneralizedSignal(SignalContext context, Matrix coeffs)
    : context_(std::move(context)), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != static_cast<Eigen::Index>(context_.vertices()) ||
        coeffs_.cols() != static_cast<Eigen::Index>(context_.modes()))
        throw Error(ErrorCode::DimensionMismatch,
                    "grid is " + std::to_string(coeffs_.rows()) + "x" + std::to_string(coeffs_.cols()) +
                        ", context needs " + std::to_string(context_.vertices()) + "x" +
                        std::to_string(context_.modes()));
    if (!coeffs_.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
}

Matrix GeneralizedSignal::vertex_coeffs() const {
    return context_.shift().eigenvectors.cast<Complex>() * coeffs_;
}

Vector GeneralizedSignal::at(double x) const {
    return vertex_coeffs() * context_.basis().eval_all(x);
}

Complex GeneralizedSignal::evaluate(std::size_t vertex, double x) const {
    if (vertex >= context_.vertices()) throw Error(ErrorCode::OutOfDomain, "vertex out of range");
    const Vector xi = context_.basis().eval_all(x);
    const auto phi_v = context_.shift().eigenvectors.row(static_cast<Eigen::Index>(vertex));
    return (phi_v.cast<Complex>() * coeffs_ * xi)(0);
}

Matrix h_transform_all(const FunctionSignal& f, const HilbertBasis& basis, const ProjectionOptions& options) {
    ProjectionOptions opts = options;
    if (opts.breakpoints.empty()) opts.breakpoints = f.breakpoints;
    Matrix out(static_cast<Eigen::Index>(f.vertices), static_cast<Eigen::Index>(basis.size()));
    parallel_for(f.vertices, [&](std::size_t v) {
        const auto row = project_all(basis, [&](double x) { return f.value(v, x); }, opts);
        out.row(static_cast<Eigen::Index>(v)) = row.transpose();
    });
    return out;
}

Vector h_transform(const FunctionSignal& f, const HilbertBasis& basis, std::size_t pos,
                   const ProjectionOptions& options) {
    if (pos >= basis.size()) throw Error(ErrorCode::OutOfDomain, "basis position out of range");
    return h_transform_all(f, basis, options).col(static_cast<Eigen::Index>(pos));
}

Complex g_transform(const FunctionSignal& f, const SignalContext& context, std::size_t i, double x) {
    if (!context.basis().contains(x)) throw Error(ErrorCode::OutOfDomain, "point outside the basis domain");
    if (f.vertices != context.vertices())
        throw Error(ErrorCode::DimensionMismatch, "signal and shift vertex counts differ");
    if (i >= context.vertices()) throw Error(ErrorCode::OutOfDomain, "eigenvector index out of range");
    const auto& phi = context.shift().eigenvectors;
    Complex acc{};
    for (std::size_t v = 0; v < f.vertices; ++v)
        acc += f.value(v, x) * phi(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(i));
    return acc;
}

Matrix f_transform(const FunctionSignal& f, const SignalContext& context, const ProjectionOptions& options) {
    if (f.vertices != context.vertices())
        throw Error(ErrorCode::DimensionMismatch, "signal and shift vertex counts differ");
    const Matrix h = h_transform_all(f, context.basis(), options);
    return context.shift().eigenvectors.transpose().cast<Complex>() * h;
}

GeneralizedSignal inverse_f_transform(const Matrix& grid, const SignalContext& context) {
    return GeneralizedSignal(context, grid);
}

std::vector<FrequencyPoint> frequency_range(const Matrix& grid, const SignalContext& context,
                                            double magnitude_tol) {
    if (magnitude_tol < 0.0) throw Error(ErrorCode::InvalidArgument, "negative magnitude tolerance");
    if (grid.rows() != static_cast<Eigen::Index>(context.vertices()) ||
        grid.cols() != static_cast<Eigen::Index>(context.modes()))
        throw Error(ErrorCode::DimensionMismatch, "grid shape does not match context");
    std::vector<FrequencyPoint> out;
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index m = 0; m < grid.cols(); ++m)
            if (std::abs(grid(i, m)) > magnitude_tol) {
                FrequencyPoint p{context.shift().eigenvalues(i),
                                 context.basis().element(static_cast<std::size_t>(m)).freq_label};
                // Repeated graph eigenvalues give the same point more than once.
                if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
            }
    return out;
}

std::vector<FrequencyPoint> frequency_range(const GeneralizedSignal& f, double magnitude_tol) {
    return frequency_range(f.coeffs(), f.context(), magnitude_tol);
}

Complex inner_product(const GeneralizedSignal& f, const GeneralizedSignal& g) {
    if (!f.context().compatible(g.context()))
        throw Error(ErrorCode::BasisMismatch, "signals live in different (shift, basis) contexts");
    return (f.coeffs().array() * g.coeffs().array().conjugate()).sum();
}

FunctionSignal as_function(const GeneralizedSignal& f) {
    auto vc = std::make_shared<const Matrix>(f.vertex_coeffs());
    auto basis = std::make_shared<const HilbertBasis>(f.context().basis());
    FunctionSignal out;
    out.vertices = f.context().vertices();
    out.value = [vc, basis](std::size_t v, double x) {
        return (vc->row(static_cast<Eigen::Index>(v)) * basis->eval_all(x))(0);
    };
    return out;
}

FittedSignal fit_samples(const std::vector<Sample>& samples, const SignalContext& context) {
    const std::size_t n = context.vertices();
    const auto& basis = context.basis();
    std::vector<std::vector<const Sample*>> by_vertex(n);
    for (const auto& s : samples) {
        if (s.vertex >= n) throw Error(ErrorCode::OutOfDomain, "sample vertex out of range");
        if (!basis.contains(s.x)) throw Error(ErrorCode::OutOfDomain, "sample point outside Omega");
        by_vertex[s.vertex].push_back(&s);
    }
    Matrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(basis.size()));
    double residual_sq = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        const auto& rows = by_vertex[v];
        Matrix design(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(basis.size()));
        Vector values(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            design.row(static_cast<Eigen::Index>(r)) = basis.eval_all(rows[r]->x).transpose();
            values(static_cast<Eigen::Index>(r)) = rows[r]->value;
        }
        const auto fit = lstsq(design, values);
        if (fit.rank_deficient)
            throw Error(ErrorCode::RankDeficient,
                        "vertex " + std::to_string(v) + " has " + std::to_string(rows.size()) +
                            " samples of rank " + std::to_string(fit.rank) + ", needs " +
                            std::to_string(basis.size()));
        h.row(static_cast<Eigen::Index>(v)) = fit.x.transpose();
        residual_sq += fit.residual_norm * fit.residual_norm;
    }
    Matrix grid = context.shift().eigenvectors.transpose().cast<Complex>() * h;
    return {GeneralizedSignal(context, std::move(grid)), std::sqrt(residual_sq)};
}

void write_grid(std::ostream& out, const Matrix& grid, const HilbertBasis& basis) {
    if (grid.cols() != static_cast<Eigen::Index>(basis.size()))
        throw Error(ErrorCode::DimensionMismatch, "grid columns do not match basis size");
    csv::write_header(out, {"phi_index", "xi_index", "re", "im"});
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index m = 0; m < grid.cols(); ++m)
            out << i << ',' << basis.element(static_cast<std::size_t>(m)).index << ','
                << csv::format(grid(i, m).real()) << ',' << csv::format(grid(i, m).imag()) << '\n';
}

Matrix read_grid(std::istream& in, const SignalContext& context) {
    const auto rows = csv::read(in, {"phi_index", "xi_index", "re", "im"});
    Matrix grid = Matrix::Zero(static_cast<Eigen::Index>(context.vertices()),
                               static_cast<Eigen::Index>(context.modes()));
    std::set<std::pair<long long, long long>> seen;
    for (const auto& row : rows) {
        const auto i = csv::to_integer(row[0], row.line);
        const auto m = csv::to_integer(row[1], row.line);
        if (i < 0 || i >= static_cast<long long>(context.vertices()))
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": phi_index out of range");
        std::size_t pos = 0;
        try {
            pos = context.basis().position_of(static_cast<int>(m));
        } catch (const Error&) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": unknown xi_index");
        }
        if (!seen.emplace(i, m).second)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": duplicate entry");
        grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pos)) =
            Complex(csv::to_double(row[2], row.line), csv::to_double(row[3], row.line));
    }
    return grid;
}

void write_samples(std::ostream& out, const std::vector<Sample>& samples) {
    csv::write_header(out, {"vertex", "x", "re", "im"});
    for (const auto& s : samples)
        out << s.vertex << ',' << csv::format(s.x) << ',' << csv::format(s.value.real()) << ','
            << csv::format(s.value.imag()) << '\n';
}

std::vector<Sample> read_samples(std::istream& in) {
    const auto rows = csv::read(in, {"vertex", "x", "re", "im"});
    std::vector<Sample> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const auto v = csv::to_integer(row[0], row.line);
        if (v < 0) throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": negative vertex");
        out.push_back({static_cast<std::size_t>(v), csv::to_double(row[1], row.line),
                       Complex(csv::to_double(row[2], row.line), csv::to_double(row[3], row.line))});
    }
    return out;
}

}  // namespace gengsp
