#include "gengsp/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gengsp/csv.hpp"
#include "gengsp/error.hpp"

namespace gengsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string to_string(BasisKind kind) {
    switch (kind) {
    case BasisKind::HalfIntegerFourier: return "half_integer_fourier";
    case BasisKind::FourierSeries: return "fourier_series";
    case BasisKind::Chebyshev: return "chebyshev";
    case BasisKind::GraphBasis: return "graph_basis";
    }
    return "unknown";
}

HilbertBasis HilbertBasis::half_integer_fourier(std::size_t truncation) {
    if (truncation == 0) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
    HilbertBasis b;
    b.kind_ = BasisKind::HalfIntegerFourier;
    b.truncation_ = truncation;
    b.lower_ = 0.0;
    b.upper_ = kTwoPi;
    const int m_count = static_cast<int>(truncation);
    for (int m = -m_count; m < m_count; ++m) {
        const double label = m + 0.5;
        b.elements_.push_back({m, label, 1.0 / label});
    }
    return b;
}

HilbertBasis HilbertBasis::fourier_series(std::size_t truncation, double period) {
    if (truncation == 0) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
    if (!(period > 0.0) || !std::isfinite(period))
        throw Error(ErrorCode::InvalidArgument, "period must be positive");
    HilbertBasis b;
    b.kind_ = BasisKind::FourierSeries;
    b.truncation_ = truncation;
    b.lower_ = 0.0;
    b.upper_ = period;
    const int m_count = static_cast<int>(truncation);
    for (int k = -m_count; k <= m_count; ++k) {
        const double label = kTwoPi * k / period;
        BasisElement e{k, label, std::nullopt};
        if (k != 0) e.operator_eigenvalue = 1.0 / label;
        b.elements_.push_back(e);
    }
    return b;
}

HilbertBasis HilbertBasis::chebyshev(std::size_t truncation) {
    if (truncation == 0) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
    HilbertBasis b;
    b.kind_ = BasisKind::Chebyshev;
    b.truncation_ = truncation;
    b.lower_ = -1.0;
    b.upper_ = 1.0;
    for (int j = 0; j < static_cast<int>(truncation); ++j) {
        BasisElement e{j, static_cast<double>(j), std::nullopt};
        if (j != 0) e.operator_eigenvalue = 1.0 / j;
        b.elements_.push_back(e);
    }
    return b;
}

HilbertBasis HilbertBasis::graph_basis(const Graph& g, ShiftKind shift, std::size_t truncation) {
    if (truncation == 0) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
    const ShiftOperator s = build_shift(g, shift);
    const auto keep = static_cast<Eigen::Index>(std::min(truncation, s.size()));
    HilbertBasis b;
    b.kind_ = BasisKind::GraphBasis;
    b.truncation_ = static_cast<std::size_t>(keep);
    b.lower_ = 0.0;
    b.upper_ = static_cast<double>(s.size() - 1);
    b.graph_vectors_ = s.eigenvectors.leftCols(keep);
    for (Eigen::Index i = 0; i < keep; ++i)
        b.elements_.push_back({static_cast<int>(i), s.eigenvalues(i), s.eigenvalues(i)});
    return b;
}

std::size_t HilbertBasis::position_of(int index) const {
    for (std::size_t p = 0; p < elements_.size(); ++p)
        if (elements_[p].index == index) return p;
    throw Error(ErrorCode::OutOfDomain, "no basis element with index " + std::to_string(index));
}

bool HilbertBasis::contains(double x) const noexcept {
    if (!std::isfinite(x)) return false;
    if (discrete()) {
        const double r = std::round(x);
        return std::abs(x - r) < 1e-9 && r >= lower_ && r <= upper_;
    }
    const double slack = 1e-12 * std::max(1.0, upper_ - lower_);
    return x >= lower_ - slack && x <= upper_ + slack;
}

Complex HilbertBasis::eval(std::size_t pos, double x) const {
    if (pos >= elements_.size()) throw Error(ErrorCode::OutOfDomain, "basis position out of range");
    if (!contains(x)) throw Error(ErrorCode::OutOfDomain, "point outside the basis domain");
    const auto& e = elements_[pos];
    switch (kind_) {
    case BasisKind::HalfIntegerFourier:
        return std::polar(1.0 / std::sqrt(kTwoPi), e.freq_label * x);
    case BasisKind::FourierSeries:
        return std::polar(1.0 / std::sqrt(period()), e.freq_label * x);
    case BasisKind::Chebyshev: {
        if (e.index == 0) return 1.0 / std::sqrt(std::numbers::pi);
        double t0 = 1.0, t1 = x;
        for (int j = 2; j <= e.index; ++j) {
            const double t2 = 2.0 * x * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        return std::sqrt(2.0 / std::numbers::pi) * t1;
    }
    case BasisKind::GraphBasis:
        return graph_vectors_(static_cast<Eigen::Index>(std::lround(x)),
                              static_cast<Eigen::Index>(pos));
    }
    return 0.0;
}

Vector HilbertBasis::eval_all(double x) const {
    if (!contains(x)) throw Error(ErrorCode::OutOfDomain, "point outside the basis domain");
    const auto count = static_cast<Eigen::Index>(elements_.size());
    Vector out(count);
    switch (kind_) {
    case BasisKind::HalfIntegerFourier:
    case BasisKind::FourierSeries: {
        const double norm = 1.0 / std::sqrt(kind_ == BasisKind::FourierSeries ? period() : kTwoPi);
        for (Eigen::Index p = 0; p < count; ++p)
            out(p) = std::polar(norm, elements_[static_cast<std::size_t>(p)].freq_label * x);
        break;
    }
    case BasisKind::Chebyshev: {
        double t0 = 1.0, t1 = x;
        const double scale = std::sqrt(2.0 / std::numbers::pi);
        out(0) = 1.0 / std::sqrt(std::numbers::pi);
        if (count > 1) out(1) = scale * x;
        for (Eigen::Index j = 2; j < count; ++j) {
            const double t2 = 2.0 * x * t1 - t0;
            t0 = t1;
            t1 = t2;
            out(j) = scale * t2;
        }
        break;
    }
    case BasisKind::GraphBasis:
        out = graph_vectors_.row(static_cast<Eigen::Index>(std::lround(x))).transpose().cast<Complex>();
        break;
    }
    return out;
}

double HilbertBasis::angular_frequency(std::size_t pos) const {
    if (kind_ != BasisKind::HalfIntegerFourier && kind_ != BasisKind::FourierSeries)
        throw Error(ErrorCode::BasisMismatch, "angular frequency needs a Fourier basis");
    return element(pos).freq_label;
}

QuadratureRule HilbertBasis::quadrature(std::size_t order, std::span<const double> breakpoints) const {
    if (discrete()) {
        QuadratureRule rule;
        rule.lower = lower_;
        rule.upper = upper_;
        const auto n = static_cast<std::size_t>(graph_vectors_.rows());
        rule.nodes.resize(n);
        std::iota(rule.nodes.begin(), rule.nodes.end(), 0.0);
        rule.weights.assign(n, 1.0);
        return rule;
    }
    if (order == 0) order = default_quadrature_order();

    std::vector<double> cuts;
    for (double b : breakpoints)
        if (b > lower_ && b < upper_) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    if (kind_ == BasisKind::Chebyshev && cuts.empty()) {
        QuadratureRule rule = gauss_chebyshev(order);
        rule.lower = lower_;
        rule.upper = upper_;
        return rule;
    }

    QuadratureRule rule;
    rule.lower = lower_;
    rule.upper = upper_;
    if (kind_ == BasisKind::Chebyshev) {
        // x = cos(theta) turns the weighted measure into d(theta) on [0, pi].
        std::vector<double> thetas{0.0};
        for (auto it = cuts.rbegin(); it != cuts.rend(); ++it) thetas.push_back(std::acos(*it));
        thetas.push_back(std::numbers::pi);
        for (std::size_t s = 0; s + 1 < thetas.size(); ++s) {
            const auto piece = gauss_quadrature(order, thetas[s], thetas[s + 1]);
            for (std::size_t q = 0; q < piece.size(); ++q) {
                rule.nodes.push_back(std::cos(piece.nodes[q]));
                rule.weights.push_back(piece.weights[q]);
            }
        }
        std::vector<std::size_t> idx(rule.nodes.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return rule.nodes[a] < rule.nodes[b]; });
        QuadratureRule sorted = rule;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            sorted.nodes[i] = rule.nodes[idx[i]];
            sorted.weights[i] = rule.weights[idx[i]];
        }
        return sorted;
    }

    std::vector<double> edges{lower_};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(upper_);
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const auto piece = gauss_quadrature(order, edges[s], edges[s + 1]);
        rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
    }
    return rule;
}

bool HilbertBasis::same_as(const HilbertBasis& other) const {
    if (kind_ != other.kind_ || truncation_ != other.truncation_ || lower_ != other.lower_ ||
        upper_ != other.upper_)
        return false;
    if (kind_ == BasisKind::GraphBasis)
        return graph_vectors_.rows() == other.graph_vectors_.rows() &&
               graph_vectors_.cols() == other.graph_vectors_.cols() &&
               graph_vectors_ == other.graph_vectors_;
    return true;
}

HilbertBasis parse_basis(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() < 2) throw Error(ErrorCode::InvalidArgument, "basis flag must be kind:truncation");
    const long long m = csv::to_integer(parts[1], 0);
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "basis truncation must be >= 1");
    const auto trunc = static_cast<std::size_t>(m);
    const std::string& kind = parts[0];
    if ((kind == "half_fourier" || kind == "half_integer_fourier") && parts.size() == 2)
        return HilbertBasis::half_integer_fourier(trunc);
    if ((kind == "fourier" || kind == "fourier_series") && parts.size() <= 3) {
        const double period = parts.size() == 3 ? csv::to_double(parts[2], 0) : kTwoPi;
        return HilbertBasis::fourier_series(trunc, period);
    }
    if (kind == "chebyshev" && parts.size() == 2) return HilbertBasis::chebyshev(trunc);
    throw Error(ErrorCode::InvalidArgument, "unknown basis `" + text + "`");
}

namespace {

Vector integrate(const HilbertBasis& basis, const ScalarFunction& f, const QuadratureRule& rule) {
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Complex fx = f(rule.nodes[q]);
        if (fx == Complex{}) continue;
        acc += (rule.weights[q] * fx) * basis.eval_all(rule.nodes[q]).conjugate();
    }
    return acc;
}

}  // namespace

Vector project_all(const HilbertBasis& basis, const ScalarFunction& f, const ProjectionOptions& options) {
    const std::size_t order = options.order ? options.order : basis.default_quadrature_order();
    const Vector coarse = integrate(basis, f, basis.quadrature(order, options.breakpoints));
    if (basis.discrete()) return coarse;
    const Vector fine = integrate(basis, f, basis.quadrature(2 * order, options.breakpoints));
    for (Eigen::Index p = 0; p < fine.size(); ++p) {
        const double gap = std::abs(fine(p) - coarse(p));
        if (gap > options.refinement_tol * std::max(1.0, std::abs(fine(p))))
            throw Error(ErrorCode::QuadratureUnderResolved,
                        "order " + std::to_string(order) + " and " + std::to_string(2 * order) +
                            " disagree by " + csv::format(gap) + " at position " + std::to_string(p));
    }
    return fine;
}

Complex project(const HilbertBasis& basis, std::size_t pos, const ScalarFunction& f,
                const ProjectionOptions& options) {
    if (pos >= basis.size()) throw Error(ErrorCode::OutOfDomain, "basis position out of range");
    return project_all(basis, f, options)(static_cast<Eigen::Index>(pos));
}

std::vector<std::size_t> low_band(const HilbertBasis& basis, std::size_t count) {
    if (count > basis.size())
        throw Error(ErrorCode::InvalidArgument, "band of " + std::to_string(count) +
                                                    " exceeds basis size " + std::to_string(basis.size()));
    std::vector<std::size_t> idx(basis.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        const double fa = basis.element(a).freq_label, fb = basis.element(b).freq_label;
        if (std::abs(fa) != std::abs(fb)) return std::abs(fa) < std::abs(fb);
        return fa < fb;
    });
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace gengsp
