#pragma once

#include <doctest.h>
#include <random>

#include "liouville/numerics.hpp"

namespace testutil {

// deterministic RNG for reproducible fixtures
inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed1234u);
    return gen;
}

inline double uniform(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(rng());
}

// quadrature over [-T, T] for exponentially decaying integrands
template <typename F>
double integrate_line(F&& f, double T = 40.0, int panels = 160, int order = 16) {
    return liouville::num::integrate(std::forward<F>(f), -T, T, panels, order);
}

} // namespace testutil
