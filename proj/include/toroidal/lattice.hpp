#pragma once

#include <cstdlib>
#include <vector>

#include "matrix.hpp"

namespace toroidal {

using IntVec = std::vector<Z>;

struct HermiteForm {
    std::vector<IntVec> basis;  // nonzero rows of the normal form
    IntMatrix transform;        // unimodular U with U * G = H (rows of G are the generators)
};

namespace detail {

inline Z floor_div(const Z& a, const Z& b) {
    Z q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline void add_row_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const Z& f) {
    if (f == 0) return;
    for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += f * m(src, j);
}

inline void add_col_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const Z& f) {
    if (f == 0) return;
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += f * m(i, src);
}

inline void negate_row(IntMatrix& m, std::size_t i) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = -m(i, j);
}

inline void negate_col(IntMatrix& m, std::size_t j) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
}

inline std::size_t check_lengths(const std::vector<IntVec>& v, std::size_t n) {
    for (const auto& x : v)
        if (x.size() != n) throw dimension_error("vectors of unequal length");
    return n;
}

} // namespace detail

/// Row Hermite normal form: positive pivots, entries above each pivot in [0, pivot).
inline HermiteForm hermite_normal_form(const std::vector<IntVec>& gens, std::size_t n) {
    detail::check_lengths(gens, n);
    const std::size_t k = gens.size();
    IntMatrix h = k ? IntMatrix::from_rows(gens) : IntMatrix(0, n);
    IntMatrix u = IntMatrix::identity(k);
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < k; ++c) {
        for (;;) {
            std::size_t best = k;
            for (std::size_t i = r; i < k; ++i)
                if (h(i, c) != 0 && (best == k || abs(h(i, c)) < abs(h(best, c)))) best = i;
            if (best == k) break;
            h.swap_rows(best, r);
            u.swap_rows(best, r);
            bool done = true;
            for (std::size_t i = r + 1; i < k; ++i) {
                if (h(i, c) == 0) continue;
                Z q = detail::floor_div(h(i, c), h(r, c));
                detail::add_row_multiple(h, i, r, -q);
                detail::add_row_multiple(u, i, r, -q);
                if (h(i, c) != 0) done = false;
            }
            if (done) break;
        }
        if (h(r, c) == 0) continue;
        if (h(r, c) < 0) {
            detail::negate_row(h, r);
            detail::negate_row(u, r);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Z q = detail::floor_div(h(i, c), h(r, c));
            detail::add_row_multiple(h, i, r, -q);
            detail::add_row_multiple(u, i, r, -q);
        }
        ++r;
    }
    HermiteForm out;
    for (std::size_t i = 0; i < r; ++i) out.basis.push_back(h.row(i));
    out.transform = std::move(u);
    return out;
}

inline HermiteForm hermite_normal_form(const std::vector<IntVec>& gens) {
    if (gens.empty()) return {{}, IntMatrix(0, 0)};
    return hermite_normal_form(gens, gens.front().size());
}

struct SmithForm {
    IntMatrix d;  // diagonal, d_i | d_{i+1}, nonnegative
    IntMatrix p;  // unimodular, rows
    IntMatrix q;  // unimodular, columns; p * a * q == d
};

inline SmithForm smith_normal_form(const IntMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    IntMatrix d = a, p = IntMatrix::identity(m), q = IntMatrix::identity(n);
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            std::size_t bi = m, bj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (d(i, j) != 0 && (bi == m || abs(d(i, j)) < abs(d(bi, bj)))) {
                        bi = i;
                        bj = j;
                    }
            if (bi == m) return {d, p, q};
            d.swap_rows(t, bi);
            p.swap_rows(t, bi);
            d.swap_cols(t, bj);
            q.swap_cols(t, bj);
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                Z f = detail::floor_div(d(i, t), d(t, t));
                detail::add_row_multiple(d, i, t, -f);
                detail::add_row_multiple(p, i, t, -f);
                if (d(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                Z f = detail::floor_div(d(t, j), d(t, t));
                detail::add_col_multiple(d, j, t, -f);
                detail::add_col_multiple(q, j, t, -f);
                if (d(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility of the remaining block by the pivot
            std::size_t bad_i = m;
            for (std::size_t i = t + 1; i < m && bad_i == m; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (d(i, j) % d(t, t) != 0) {
                        bad_i = i;
                        break;
                    }
            if (bad_i == m) break;
            detail::add_row_multiple(d, t, bad_i, Z(1));
            detail::add_row_multiple(p, t, bad_i, Z(1));
        }
        if (d(t, t) < 0) {
            detail::negate_row(d, t);
            detail::negate_row(p, t);
        }
    }
    return {d, p, q};
}

/// B in GL(n, Z) with B * s_i = e_i for each input vector s_i.
inline IntMatrix complete_to_unimodular(const std::vector<IntVec>& basis, std::size_t n) {
    detail::check_lengths(basis, n);
    const std::size_t k = basis.size();
    if (k == 0) return IntMatrix::identity(n);
    IntMatrix s = IntMatrix::from_rows(basis);
    if (rank(to_rational(s)) != k) throw rank_error("dependent vectors");
    SmithForm f = smith_normal_form(s);
    for (std::size_t i = 0; i < k; ++i)
        if (f.d(i, i) != 1) throw rank_error("vectors do not extend to a basis of Z^n");
    // s = p^{-1} [I 0] q^{-1}; rows of q^{-1} form a basis of Z^n
    QMatrix qinv = *inverse(to_rational(f.q));
    QMatrix pinv = *inverse(to_rational(f.p));
    QMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i < k) {
                for (std::size_t l = 0; l < k; ++l) r(i, j) += pinv(i, l) * qinv(l, j);
            } else {
                r(i, j) = qinv(i, j);
            }
        }
    QMatrix b = *inverse(r.transpose());
    IntMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = b(i, j).get_num();
    return out;
}

/// Integer coefficients expressing v in the row basis, if v lies in the lattice.
inline std::optional<IntVec> lattice_coordinates(const std::vector<IntVec>& basis, const IntVec& v) {
    if (basis.empty()) {
        if (is_zero_vec(v)) return IntVec{};
        return std::nullopt;
    }
    QMatrix bt = to_rational(IntMatrix::from_rows(basis)).transpose();
    std::vector<Q> rhs(v.begin(), v.end());
    auto x = solve(bt, rhs);
    if (!x) return std::nullopt;
    IntVec out;
    for (const auto& c : *x) {
        if (c.get_den() != 1) return std::nullopt;
        out.push_back(c.get_num());
    }
    return out;
}

/// Index [Z^n : L] for a full-rank row basis; zero when L is not of full rank.
inline Z lattice_index(const std::vector<IntVec>& basis, std::size_t n) {
    if (basis.size() != n) return 0;
    if (n == 0) return 1;
    return abs(det(IntMatrix::from_rows(basis)));
}

inline Z gcd_of(const IntVec& v) {
    Z g = 0;
    for (const auto& x : v) g = gcd(g, x);
    return g;
}

} // namespace toroidal
