#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "gengsp/graph.hpp"
#include "gengsp/numerics.hpp"
#include "gengsp/signal.hpp"

namespace gengsp::test {

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(nd(rng), nd(rng));
    return m;
}

inline RealMatrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    RealMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(rng);
    return m;
}

inline constexpr double kPi = std::numbers::pi;

/// Three vertices, u1 joined to u2 and u3 (the path u2 - u1 - u3).
inline Graph three_path() { return Graph(3, {{0, 1, 1.0}, {0, 2, 1.0}}); }

/// f(u1) = sqrt2 sin(x/2 - pi/4), f(u2) = 2 cos(x/2), f(u3) = sqrt2 sin(x/2 + pi/4).
inline FunctionSignal three_path_signal() {
    FunctionSignal f;
    f.vertices = 3;
    f.value = [](std::size_t v, double x) -> Complex {
        const double r2 = std::sqrt(2.0);
        switch (v) {
            case 0: return r2 * std::sin(x / 2 - kPi / 4);
            case 1: return 2.0 * std::cos(x / 2);
            default: return r2 * std::sin(x / 2 + kPi / 4);
        }
    };
    return f;
}

/// Random coefficients on the full grid of `context`.
inline GeneralizedSignal random_signal(const SignalContext& context, std::uint64_t seed) {
    return GeneralizedSignal(context, random_complex(static_cast<Eigen::Index>(context.vertices()),
                                                     static_cast<Eigen::Index>(context.modes()), seed));
}

}  // namespace gengsp::test
