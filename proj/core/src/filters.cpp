#include "gengsp/filters.hpp"

#include <cmath>
#include <fstream>
#include <type_traits>

#include "json.hpp"

#include "gengsp/error.hpp"

namespace gengsp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols)
        throw Error(ErrorCode::ContextMismatch, std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                                    std::to_string(m.cols()) + ", expected " +
                                                    std::to_string(rows) + "x" + std::to_string(cols));
}

Matrix apply_grid(const Filter& filter, const SignalContext& ctx, const Matrix& c);

Matrix apply_polynomial(const PolynomialFilter& p, const SignalContext& ctx, const Matrix& c) {
    const auto& basis = ctx.basis();
    const auto& lam = ctx.shift().eigenvalues;
    Matrix out = c;
    for (Eigen::Index m = 0; m < c.cols(); ++m) {
        const auto& el = basis.element(static_cast<std::size_t>(m));
        if (!el.operator_eigenvalue)
            throw Error(ErrorCode::UnboundedFreqLabel,
                        "basis element " + std::to_string(el.index) + " has no operator eigenvalue");
        for (Eigen::Index i = 0; i < c.rows(); ++i)
            out(i, m) *= polyval(p.coeffs, Complex(lam(i) * *el.operator_eigenvalue, 0.0));
    }
    return out;
}

// Grid-ordered columns of the adaptive action are only available when H = C^m
// carries its full graph eigenbasis.
void require_full_graph_basis(const AdaptiveFilter& a, const SignalContext& ctx) {
    const auto& basis = ctx.basis();
    if (basis.kind() != BasisKind::GraphBasis || basis.graph_eigenvectors().rows() != basis.graph_eigenvectors().cols())
        throw Error(ErrorCode::NotRepresentable, "adaptive filters need a complete graph basis for H");
    if (a.vertex_ops.size() != ctx.vertices())
        throw Error(ErrorCode::ContextMismatch, "adaptive filter needs one operator per vertex");
    if (static_cast<std::size_t>(basis.graph_eigenvectors().rows()) != ctx.modes())
        throw Error(ErrorCode::ContextMismatch, "adaptive operators do not match H");
}

Matrix apply_grid(const Filter& filter, const SignalContext& ctx, const Matrix& c) {
    const auto n = static_cast<Eigen::Index>(ctx.vertices());
    const auto modes = static_cast<Eigen::Index>(ctx.modes());
    return std::visit(
        overloaded{
            [&](const PolynomialFilter& p) -> Matrix { return apply_polynomial(p, ctx, c); },
            [&](const ConvolutionFilter& g) -> Matrix {
                require_shape(g.kernel, n, modes, "convolution kernel");
                return g.kernel.cwiseProduct(c);
            },
            [&](const BandPassFilter& b) -> Matrix {
                Matrix out = c;
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index m = 0; m < modes; ++m) {
                        const FrequencyPoint p{ctx.shift().eigenvalues(i),
                                               ctx.basis().element(static_cast<std::size_t>(m)).freq_label};
                        if (!b.contains(p)) out(i, m) = 0.0;
                    }
                return out;
            },
            [&](const TensorFilter& t) -> Matrix {
                require_shape(t.graph_op, n, n, "graph operator");
                require_shape(t.hilbert_op, modes, modes, "Hilbert operator");
                return t.graph_op * c * t.hilbert_op.transpose();
            },
            [&](const AdaptiveFilter& a) -> Matrix {
                require_full_graph_basis(a, ctx);
                const Matrix phi = ctx.shift().eigenvectors.cast<Complex>();
                const Matrix xi = ctx.basis().graph_eigenvectors().cast<Complex>();
                const Matrix values = phi * c * xi.transpose();
                return phi.transpose() * apply_adaptive(a, values) * xi;
            },
            [&](const TruncationFilter& t) -> Matrix {
                if (!t.inner) throw Error(ErrorCode::InvalidArgument, "truncation without inner filter");
                const auto total = static_cast<std::size_t>(n * modes);
                if (t.cutoff > total)
                    throw Error(ErrorCode::CutoffOutOfRange, "cutoff " + std::to_string(t.cutoff) +
                                                                 " exceeds grid size " + std::to_string(total));
                Matrix out = apply_grid(*t.inner, ctx, c);
                for (std::size_t p = t.cutoff; p < total; ++p)
                    out(static_cast<Eigen::Index>(p) / modes, static_cast<Eigen::Index>(p) % modes) = 0.0;
                return out;
            },
        },
        filter.variant());
}

}  // namespace

bool BandPassFilter::contains(const FrequencyPoint& p) const {
    for (const auto& r : rects)
        if (p.graph_freq >= r.graph_lo && p.graph_freq <= r.graph_hi && p.hilbert_freq >= r.freq_lo &&
            p.hilbert_freq <= r.freq_hi)
            return true;
    for (const auto& q : points)
        if (std::abs(p.graph_freq - q.graph_freq) <= point_tol && std::abs(p.hilbert_freq - q.hilbert_freq) <= point_tol)
            return true;
    return false;
}

std::string Filter::kind() const {
    static constexpr const char* names[] = {"polynomial", "convolution", "band_pass",
                                            "tensor",     "adaptive",    "truncation"};
    return names[v_.index()];
}

bool Filter::diagonal() const noexcept {
    return std::holds_alternative<PolynomialFilter>(v_) || std::holds_alternative<ConvolutionFilter>(v_) ||
           std::holds_alternative<BandPassFilter>(v_);
}

GeneralizedSignal apply(const Filter& filter, const GeneralizedSignal& f) {
    return GeneralizedSignal(f.context(), apply_grid(filter, f.context(), f.coeffs()));
}

Matrix apply_adaptive(const AdaptiveFilter& a, const Matrix& values) {
    const auto n = a.mixing.rows();
    if (a.mixing.cols() != n) throw Error(ErrorCode::DimensionMismatch, "mixing matrix must be square");
    if (values.rows() != n || a.vertex_ops.size() != static_cast<std::size_t>(n))
        throw Error(ErrorCode::DimensionMismatch, "adaptive filter and signal vertex counts differ");
    const auto m = values.cols();
    const Matrix p1 = polyval(a.p1, a.mixing);
    Matrix out = Matrix::Zero(n, m);
    for (Eigen::Index u = 0; u < n; ++u) {
        const auto& au = a.vertex_ops[static_cast<std::size_t>(u)];
        if (au.rows() != m || au.cols() != m)
            throw Error(ErrorCode::DimensionMismatch, "vertex operator " + std::to_string(u) + " has wrong size");
        const Vector local = polyval(a.p2, au) * values.row(u).transpose();
        out += p1.col(u) * local.transpose();
    }
    return out;
}

Matrix matrix_form(const Filter& filter, const SignalContext& context) {
    const auto n = static_cast<Eigen::Index>(context.vertices());
    const auto modes = static_cast<Eigen::Index>(context.modes());
    const Eigen::Index total = n * modes;
    Matrix out(total, total);
    Matrix unit = Matrix::Zero(n, modes);
    for (Eigen::Index p = 0; p < total; ++p) {
        unit(p / modes, p % modes) = 1.0;
        const Matrix col = apply_grid(filter, context, unit);
        unit(p / modes, p % modes) = 0.0;
        for (Eigen::Index q = 0; q < total; ++q) out(q, p) = col(q / modes, q % modes);
    }
    return out;
}

Filter truncate_finite_rank(Filter inner, std::size_t cutoff) {
    return Filter(TruncationFilter{std::make_shared<const Filter>(std::move(inner)), cutoff});
}

double commutator_norm(const Matrix& a, const Matrix& b) { return (a * b - b * a).norm(); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ShiftInvarianceReport check_shift_invariance(const Matrix& l, const Matrix& graph_op, const Matrix& hilbert_op,
                                             double tol) {
    if (graph_op.rows() != graph_op.cols() || hilbert_op.rows() != hilbert_op.cols())
        throw Error(ErrorCode::DimensionMismatch, "shift operators must be square");
    const Eigen::Index dim = graph_op.rows() * hilbert_op.rows();
    if (l.rows() != dim || l.cols() != dim)
        throw Error(ErrorCode::DimensionMismatch, "filter matrix does not act on the product grid");
    const Matrix id_g = Matrix::Identity(graph_op.rows(), graph_op.rows());
    const Matrix id_h = Matrix::Identity(hilbert_op.rows(), hilbert_op.rows());
    ShiftInvarianceReport r;
    r.commutator_norms = {commutator_norm(kron(graph_op, id_h), l), commutator_norm(kron(id_g, hilbert_op), l),
                          commutator_norm(kron(graph_op, hilbert_op), l)};
    const double bound = tol * l.norm();
    r.shift_invariant = r.commutator_norms[0] <= bound && r.commutator_norms[1] <= bound;
    r.weakly_shift_invariant = r.commutator_norms[2] <= bound;
    return r;
}

ShiftInvarianceReport check_shift_invariance(const Matrix& l, const SignalContext& context, double tol) {
    Vector h(static_cast<Eigen::Index>(context.modes()));
    for (std::size_t m = 0; m < context.modes(); ++m) {
        const auto& el = context.basis().element(m);
        if (!el.operator_eigenvalue)
            throw Error(ErrorCode::UnboundedFreqLabel,
                        "basis element " + std::to_string(el.index) + " has no operator eigenvalue");
        h(static_cast<Eigen::Index>(m)) = *el.operator_eigenvalue;
    }
    const Matrix g = context.shift().eigenvalues.cast<Complex>().asDiagonal();
    return check_shift_invariance(l, g, Matrix(h.asDiagonal()), tol);
}

Complex polyval(const std::vector<Complex>& coeffs, Complex z) {
    Complex acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Matrix polyval(const std::vector<Complex>& coeffs, const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "polynomial of a non-square matrix");
    Matrix acc = Matrix::Zero(m.rows(), m.cols());
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * m;
        acc.diagonal().array() += *it;
    }
    return acc;
}

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, "filter spec: " + what); }

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) bad(std::string("missing \"") + key + "\"");
    return j.at(key);
}

Complex to_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    bad("expected a number or [re, im]");
}

std::vector<Complex> to_coeffs(const json& j) {
    if (!j.is_array()) bad("coefficients must be an array");
    std::vector<Complex> out;
    for (const auto& c : j) out.push_back(to_complex(c));
    return out;
}

Matrix to_matrix(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) bad("expected a non-empty matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) bad("ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = to_complex(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

std::pair<double, double> to_interval(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad("expected [lo, hi]");
    const double lo = j[0].get<double>(), hi = j[1].get<double>();
    if (!(lo <= hi)) bad("interval with lo > hi");
    return {lo, hi};
}

Filter parse(const json& j, const SignalContext& ctx) {
    if (!j.is_object()) bad("expected an object");
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "polynomial") return PolynomialFilter{to_coeffs(field(j, "coeffs"))};
    if (kind == "convolution") {
        if (j.contains("grid_file")) {
            const auto path = j.at("grid_file").get<std::string>();
            std::ifstream in(path);
            if (!in) bad("cannot open " + path);
            return ConvolutionFilter{read_grid(in, ctx)};
        }
        Matrix k = Matrix::Zero(static_cast<Eigen::Index>(ctx.vertices()), static_cast<Eigen::Index>(ctx.modes()));
        for (const auto& e : field(j, "entries")) {
            if (!e.is_array() || e.size() != 4) bad("entries are [phi_index, xi_index, re, im]");
            const auto i = e[0].get<long long>();
            if (i < 0 || i >= static_cast<long long>(ctx.vertices())) bad("phi_index out of range");
            const auto pos = ctx.basis().position_of(e[1].get<int>());
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pos)) = {e[2].get<double>(), e[3].get<double>()};
        }
        return ConvolutionFilter{std::move(k)};
    }
    if (kind == "band_pass") {
        BandPassFilter b;
        if (j.contains("K"))
            for (const auto& r : j.at("K")) {
                const auto [glo, ghi] = to_interval(field(r, "graph"));
                const auto [flo, fhi] = to_interval(field(r, "freq"));
                b.rects.push_back({glo, ghi, flo, fhi});
            }
        if (j.contains("points"))
            for (const auto& p : j.at("points")) {
                if (!p.is_array() || p.size() != 2) bad("points are [graph_freq, freq]");
                b.points.push_back({p[0].get<double>(), p[1].get<double>()});
            }
        if (j.contains("point_tol")) b.point_tol = j.at("point_tol").get<double>();
        return b;
    }
    if (kind == "tensor") {
        TensorFilter t;
        t.graph_op = j.contains("graph_matrix")
                         ? to_matrix(j.at("graph_matrix"))
                         : Matrix(Matrix::Identity(static_cast<Eigen::Index>(ctx.vertices()),
                                                   static_cast<Eigen::Index>(ctx.vertices())));
        if (j.contains("hilbert_matrix")) {
            t.hilbert_op = to_matrix(j.at("hilbert_matrix"));
        } else if (j.contains("hilbert_diag")) {
            const auto d = to_coeffs(j.at("hilbert_diag"));
            t.hilbert_op = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
            for (std::size_t m = 0; m < d.size(); ++m)
                t.hilbert_op(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = d[m];
        } else {
            t.hilbert_op = Matrix::Identity(static_cast<Eigen::Index>(ctx.modes()), static_cast<Eigen::Index>(ctx.modes()));
        }
        return t;
    }
    if (kind == "adaptive") {
        AdaptiveFilter a;
        a.p1 = to_coeffs(field(j, "p1"));
        a.p2 = to_coeffs(field(j, "p2"));
        a.mixing = to_matrix(field(j, "M"));
        for (const auto& op : field(j, "A")) a.vertex_ops.push_back(to_matrix(op));
        return a;
    }
    if (kind == "truncation") {
        const auto cutoff = field(j, "cutoff").get<long long>();
        if (cutoff < 0) bad("negative cutoff");
        return truncate_finite_rank(parse(field(j, "inner"), ctx), static_cast<std::size_t>(cutoff));
    }
    bad("unknown kind \"" + kind + "\"");
}

}  // namespace

Filter parse_filter_json(const std::string& text, const SignalContext& context) {
    try {
        return parse(json::parse(text), context);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("filter spec: ") + e.what());
    }
}

}  // namespace gengsp
