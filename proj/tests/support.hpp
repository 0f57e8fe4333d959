#pragma once

#include <random>

#include "toroidal/algebra.hpp"

namespace testsupport {

using namespace toroidal;

inline Q small_rational(std::mt19937_64& rng, long range = 4) {
    std::uniform_int_distribution<long> num(-range, range), den(1, 3);
    return frac(num(rng), den(rng));
}

inline Monomial random_degree(std::mt19937_64& rng, int n, long range) {
    std::uniform_int_distribution<long> e(-range, range);
    Monomial m(n);
    for (auto& x : m) x = e(rng);
    return m;
}

inline MatrixG random_traceless(std::mt19937_64& rng, std::size_t size) {
    MatrixG x(size, size);
    std::uniform_int_distribution<int> coin(0, 2);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j)
            if (coin(rng) == 0) x(i, j) = small_rational(rng);
    Q t = trace(x);
    x(size - 1, size - 1) -= t;
    return x;
}

/// A few terms from each summand of tau.
inline TauElement random_tau(const ToroidalAlgebra& tau, std::mt19937_64& rng, long range = 2, int terms = 2) {
    TauElement x = tau.zero();
    std::uniform_int_distribution<int> axis(0, tau.n() - 1), coin(0, 1);
    for (int k = 0; k < terms; ++k) x.add_g(random_degree(rng, tau.n(), range), random_traceless(rng, tau.size()));
    for (int k = 0; k < terms; ++k)
        x.z.add(random_degree(rng, tau.n(), range), static_cast<std::size_t>(axis(rng)), small_rational(rng));
    if (coin(rng)) x.dpart[static_cast<std::size_t>(axis(rng))] = small_rational(rng);
    return x;
}

inline TauElement jacobiator(const TauElement& x, const TauElement& y, const TauElement& z) {
    return bracket(bracket(x, y), z) + bracket(bracket(y, z), x) + bracket(bracket(z, x), y);
}

} // namespace testsupport
