#pragma once

#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace toroidal {

struct BracketReport {
    std::size_t basis_size = 0;
    std::size_t pairs = 0;
    std::size_t triples = 0;
    std::size_t failures = 0;
    std::string witness;
    bool ok() const { return failures == 0; }
};

inline TauElement jacobi_sum(const TauElement& x, const TauElement& y, const TauElement& z) {
    return bracket(bracket(x, y), z) + bracket(bracket(y, z), x) + bracket(bracket(z, x), y);
}

/// Antisymmetry on all ordered pairs and Jacobi on all triples i < j < k of the basis
/// with |degree|_inf <= bound. Once antisymmetry holds the Jacobi sum is alternating,
/// so the remaining triples follow.
inline BracketReport check_bracket_exhaustive(const ToroidalAlgebra& tau, long bound) {
    BracketReport rep;
    auto b = tau.basis(bound);
    const std::size_t N = b.size();
    rep.basis_size = N;
    std::vector<std::vector<TauElement>> br(N, std::vector<TauElement>(N));
    auto fail = [&](const std::string& w) {
        if (rep.failures++ == 0) rep.witness = w;
    };
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) {
            br[i][j] = bracket(b[i], b[j]);
            ++rep.pairs;
            if (i == j) {
                if (!br[i][j].is_zero()) fail("[x,x] != 0 for x = " + b[i].str());
                continue;
            }
            br[j][i] = bracket(b[j], b[i]);
            ++rep.pairs;
            if (br[i][j] + br[j][i] != tau.zero()) fail("antisymmetry fails on " + b[i].str() + ", " + b[j].str());
        }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            for (std::size_t k = j + 1; k < N; ++k) {
                ++rep.triples;
                TauElement s = tau.zero();
                if (!br[i][j].is_zero()) s += bracket(br[i][j], b[k]);
                if (!br[j][k].is_zero()) s += bracket(br[j][k], b[i]);
                if (!br[k][i].is_zero()) s += bracket(br[k][i], b[j]);
                if (!s.is_zero()) fail("Jacobi fails on " + b[i].str() + ", " + b[j].str() + ", " + b[k].str());
            }
        }
    return rep;
}

/// Antisymmetry and Jacobi on seeded random triples.
template <class Gen>
BracketReport check_bracket_random(const ToroidalAlgebra&, std::size_t count, Gen&& random_element) {
    BracketReport rep;
    for (std::size_t t = 0; t < count; ++t) {
        TauElement x = random_element(), y = random_element(), z = random_element();
        ++rep.triples;
        rep.pairs += 2;
        bool ok = bracket(x, x).is_zero() && (bracket(x, y) + bracket(y, x)).is_zero() && jacobi_sum(x, y, z).is_zero();
        if (!ok && rep.failures++ == 0) rep.witness = x.str() + " | " + y.str() + " | " + z.str();
    }
    return rep;
}

} // namespace toroidal
