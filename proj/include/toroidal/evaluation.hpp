#pragma once

#include <map>
#include <vector>

#include "algebra.hpp"
#include "laurent.hpp"

namespace toroidal {

/// Per-axis evaluation points; grid points I = (i_1, ..., i_n) are ordered lexicographically.
class PointGrid {
public:
    PointGrid() = default;
    explicit PointGrid(Grid axes) : axes_(std::move(axes)) {
        validate_grid(axes_);
        init();
    }

    /// Skips validation so that degenerate grids can be examined.
    static PointGrid unvalidated(Grid axes) {
        PointGrid g;
        g.axes_ = std::move(axes);
        g.init();
        return g;
    }

    std::size_t n() const { return axes_.size(); }
    const Grid& axes() const { return axes_; }
    std::size_t size(std::size_t j) const { return axes_[j].size(); }
    std::size_t N() const { return N_; }
    const Q& point(std::size_t j, std::size_t i) const { return axes_[j][i]; }

    /// Index tuple of the k-th grid point (0-based entries).
    std::vector<std::size_t> index(std::size_t k) const {
        std::vector<std::size_t> I(n());
        for (std::size_t j = n(); j-- > 0;) {
            I[j] = k % size(j);
            k /= size(j);
        }
        return I;
    }

    std::size_t flat(const std::vector<std::size_t>& I) const {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n(); ++j) k = k * size(j) + I[j];
        return k;
    }

    /// a_I^m.
    Q power(std::size_t k, const Monomial& m) const {
        auto I = index(k);
        Q r = 1;
        for (std::size_t j = 0; j < n(); ++j) r *= qpow(axes_[j][I[j]], m[j]);
        return r;
    }

    /// Exponents m in T = {0 <= m_j < N_j}, lexicographic, matching the point order.
    std::vector<Monomial> box() const {
        std::vector<Monomial> out;
        for (std::size_t k = 0; k < N_; ++k) {
            auto I = index(k);
            out.emplace_back(I.begin(), I.end());
        }
        return out;
    }

private:
    void init() {
        N_ = 1;
        for (const auto& a : axes_) N_ *= a.size();
    }

    Grid axes_;
    std::size_t N_ = 0;
};

/// One factor in M = A~_1 E_1 A~_2 E_2 ... A~_n.
struct GridFactor {
    enum Kind { vandermonde, permutation } kind;
    std::size_t axis = 0;             // vandermonde: which axis
    std::vector<std::size_t> sigma;   // permutation: row k has its 1 in column sigma[k]
};

/// X = (a_I^m), rows m in T, columns I, with its block Vandermonde factorization.
struct GridMatrix {
    PointGrid grid;
    QMatrix X;
    std::vector<GridFactor> factors;
    /// M = product of factors is points x powers: M(r, c) = X(power_perm[c], point_perm[r]).
    std::vector<std::size_t> point_perm, power_perm;

    /// A_j = (a_{j,i}^{p}), rows points, columns powers.
    QMatrix axis_vandermonde(std::size_t j) const {
        std::size_t Nj = grid.size(j);
        QMatrix a(Nj, Nj);
        for (std::size_t i = 0; i < Nj; ++i)
            for (std::size_t p = 0; p < Nj; ++p) a(i, p) = qpow(grid.point(j, i), static_cast<long>(p));
        return a;
    }

    QMatrix dense_factor(const GridFactor& f) const {
        const std::size_t N = grid.N();
        QMatrix m(N, N);
        if (f.kind == GridFactor::permutation) {
            for (std::size_t k = 0; k < N; ++k) m(k, f.sigma[k]) = 1;
            return m;
        }
        QMatrix a = axis_vandermonde(f.axis);
        const std::size_t b = a.rows();
        for (std::size_t blk = 0; blk < N / b; ++blk)
            for (std::size_t i = 0; i < b; ++i)
                for (std::size_t j = 0; j < b; ++j) m(blk * b + i, blk * b + j) = a(i, j);
        return m;
    }

    QMatrix factor_product() const {
        QMatrix p = QMatrix::identity(grid.N());
        for (const auto& f : factors) p = p * dense_factor(f);
        return p;
    }

    /// Factor product moved back to the (m, I) indexing of X.
    QMatrix unpermuted_product() const {
        QMatrix m = factor_product();
        QMatrix x(grid.N(), grid.N());
        for (std::size_t r = 0; r < grid.N(); ++r)
            for (std::size_t c = 0; c < grid.N(); ++c) x(power_perm[c], point_perm[r]) = m(r, c);
        return x;
    }
};

inline GridMatrix build_grid_matrix(const PointGrid& grid) {
    GridMatrix gm;
    gm.grid = grid;
    const std::size_t N = grid.N(), n = grid.n();
    gm.X = QMatrix(N, N);
    auto T = grid.box();
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) gm.X(r, c) = grid.power(c, T[r]);
    if (n == 0) return gm;

    // labels of the current leading block: point tuples for rows, power tuples for columns
    std::vector<std::vector<std::size_t>> rows, cols;
    for (std::size_t i = 0; i < grid.size(0); ++i) {
        rows.push_back({i});
        cols.push_back({i});
    }
    gm.factors.push_back({GridFactor::vandermonde, 0, {}});
    std::size_t P = grid.size(0);
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t Qk = grid.size(k), block = P * Qk;
        // sigma(P l + m) = m Q + l on each block of order P Q
        GridFactor e{GridFactor::permutation, 0, std::vector<std::size_t>(N)};
        for (std::size_t base = 0; base < N; base += block)
            for (std::size_t l = 0; l < Qk; ++l)
                for (std::size_t m = 0; m < P; ++m) e.sigma[base + P * l + m] = base + m * Qk + l;
        gm.factors.push_back(std::move(e));
        gm.factors.push_back({GridFactor::vandermonde, k, {}});
        // entry (p1 P + q1, s Q + t) of the new block is M_k(q1, s) a_{k,p1}^t
        std::vector<std::vector<std::size_t>> nrows(block), ncols(block);
        for (std::size_t p1 = 0; p1 < Qk; ++p1)
            for (std::size_t q1 = 0; q1 < P; ++q1) {
                nrows[p1 * P + q1] = rows[q1];
                nrows[p1 * P + q1].push_back(p1);
            }
        for (std::size_t s = 0; s < P; ++s)
            for (std::size_t t = 0; t < Qk; ++t) {
                ncols[s * Qk + t] = cols[s];
                ncols[s * Qk + t].push_back(t);
            }
        rows = std::move(nrows);
        cols = std::move(ncols);
        P = block;
    }
    gm.point_perm.resize(N);
    gm.power_perm.resize(N);
    for (std::size_t r = 0; r < N; ++r) gm.point_perm[r] = grid.flat(rows[r]);
    for (std::size_t c = 0; c < N; ++c) gm.power_perm[c] = grid.flat(cols[c]);
    return gm;
}

/// Element of sl(d+1) (x) A without center or derivations.
using LoopElement = std::map<Monomial, MatrixG, GradedLex>;

inline void loop_add(LoopElement& u, const Monomial& m, const MatrixG& x) {
    if (x.is_zero()) return;
    auto it = u.find(m);
    if (it == u.end()) {
        u.emplace(m, x);
        return;
    }
    it->second = it->second + x;
    if (it->second.is_zero()) u.erase(it);
}

inline LoopElement loop_bracket(const LoopElement& x, const LoopElement& y) {
    LoopElement out;
    for (const auto& [r, X] : x)
        for (const auto& [s, Y] : y) loop_add(out, r + s, commutator(X, Y));
    return out;
}

/// The evaluation map X (x) t^m -> (a_I^m X)_I.
class EvalHom {
public:
    explicit EvalHom(const PointGrid& grid) : gm_(build_grid_matrix(grid)) {
        for (std::size_t j = 0; j < grid.n(); ++j) {
            auto inv = inverse(gm_.axis_vandermonde(j));
            if (!inv) throw invalid_grid();
            vinv_.push_back(*inv);
        }
    }

    const PointGrid& grid() const { return gm_.grid; }
    const GridMatrix& grid_matrix() const { return gm_; }
    std::size_t arity() const { return gm_.grid.N(); }

    std::vector<MatrixG> apply(const LoopElement& u, std::size_t size) const {
        std::vector<MatrixG> out(arity(), MatrixG(size, size));
        for (const auto& [m, X] : u)
            for (std::size_t k = 0; k < arity(); ++k) out[k] = out[k] + grid().power(k, m) * X;
        return out;
    }

    /// Unique preimage supported on T, solved one axis at a time.
    LoopElement preimage(const std::vector<MatrixG>& target) const {
        if (target.size() != arity()) throw dimension_error("preimage: wrong number of components");
        const std::size_t N = arity(), s = target.front().rows();
        // values indexed by grid point; after the sweep, by exponent in T
        std::vector<MatrixG> v = target;
        std::size_t stride = N;
        for (std::size_t j = 0; j < grid().n(); ++j) {
            const std::size_t Nj = grid().size(j);
            stride /= Nj;
            std::vector<MatrixG> w(N, MatrixG(s, s));
            for (std::size_t k = 0; k < N; ++k) {
                std::size_t pos = (k / stride) % Nj, base = k - pos * stride;
                for (std::size_t i = 0; i < Nj; ++i) {
                    const Q& c = vinv_[j](pos, i);
                    if (!is_zero(c)) w[k] = w[k] + c * v[base + i * stride];
                }
            }
            v = std::move(w);
        }
        LoopElement u;
        auto T = grid().box();
        for (std::size_t k = 0; k < N; ++k) loop_add(u, T[k], v[k]);
        return u;
    }

    /// Same preimage by a dense solve against X transpose.
    LoopElement preimage_dense(const std::vector<MatrixG>& target) const {
        const std::size_t N = arity(), s = target.front().rows();
        auto xinv = inverse(gm_.X.transpose());
        if (!xinv) throw invalid_grid();
        LoopElement u;
        auto T = grid().box();
        for (std::size_t k = 0; k < N; ++k) {
            MatrixG acc(s, s);
            for (std::size_t i = 0; i < N; ++i)
                if (!is_zero((*xinv)(k, i))) acc = acc + (*xinv)(k, i) * target[i];
            loop_add(u, T[k], acc);
        }
        return u;
    }

private:
    GridMatrix gm_;
    std::vector<QMatrix> vinv_;
};

inline std::vector<MatrixG> phi_apply(const EvalHom& hom, const LoopElement& u, std::size_t size) {
    return hom.apply(u, size);
}

inline LoopElement phi_preimage(const EvalHom& hom, const std::vector<MatrixG>& target) {
    return hom.preimage(target);
}

/// Reduction of u modulo sl (x) I, coefficientwise.
inline LoopElement reduce_loop(const LoopElement& u, const PointGrid& grid) {
    LoopElement out;
    for (const auto& [m, X] : u) {
        LaurentPoly r = laurent_reduce_mod_ideal(LaurentPoly(m, Q(1)), grid.axes());
        for (const auto& [e, c] : r.terms()) {
            Monomial full(grid.n(), 0);
            std::copy(e.begin(), e.end(), full.begin());
            loop_add(out, full, c * X);
        }
    }
    return out;
}

struct QuotientReport {
    bool ok = false;
    std::size_t rank_on_T = 0;       // rank of Phi restricted to sl (x) span T
    std::size_t expected = 0;        // N dim sl
    std::size_t sampled_degrees = 0;
    std::string failure;
};

/// Phi factors through the reduction and is bijective on sl (x) span T.
inline QuotientReport quotient_iso_check(const PointGrid& grid, std::size_t size, long sample_bound) {
    QuotientReport rep;
    const std::size_t dim = size * size - 1, N = grid.N();
    rep.expected = N * dim;
    for (const auto& axis : grid.axes())
        for (const auto& a : axis)
            if (is_zero(a)) {
                rep.failure = "zero point: negative powers undefined";
                return rep;
            }
    QMatrix X(N, N);
    auto T = grid.box();
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) X(r, c) = grid.power(c, T[r]);
    // Phi on sl (x) span T is X^t tensored with the identity of sl
    rep.rank_on_T = rank(X) * dim;
    if (rep.rank_on_T != rep.expected) {
        rep.failure = "Phi is not injective on sl (x) span T";
        return rep;
    }
    Monomial m(grid.n(), -sample_bound);
    for (;;) {
        ++rep.sampled_degrees;
        LaurentPoly r = laurent_reduce_mod_ideal(LaurentPoly(m, Q(1)), grid.axes());
        for (std::size_t k = 0; k < N; ++k) {
            Q lhs = 0;
            for (const auto& [e, c] : r.terms()) {
                Monomial full(grid.n(), 0);
                std::copy(e.begin(), e.end(), full.begin());
                lhs += c * grid.power(k, full);
            }
            if (lhs != grid.power(k, m)) {
                rep.failure = "Phi does not factor through the reduction at degree " + TauElement::mono_str(m);
                return rep;
            }
        }
        std::size_t i = m.size();
        while (i > 0 && m[i - 1] == sample_bound) m[--i] = -sample_bound;
        if (i == 0) break;
        ++m[i - 1];
    }
    rep.ok = true;
    return rep;
}

inline bool quotient_iso_check(const EvalHom& hom, std::size_t size, long sample_bound = 2) {
    return quotient_iso_check(hom.grid(), size, sample_bound).ok;
}

/// Element of (affine sl(d+1)) (x) A_{n-1} + D, the affine variable being t_1.
struct AffineLoopElement {
    int d = 0, n = 0;
    std::map<Monomial, MatrixG, GradedLex> g;   // X (x) t_1^{m_1} (x) t^{m'} keyed by the full m
    std::map<Monomial, Q, GradedLex> c;         // C_1 (x) t^{m'} keyed by m' = (m_2, ..., m_n)
    std::vector<Q> dpart;

    AffineLoopElement() = default;
    AffineLoopElement(int d_, int n_) : d(d_), n(n_), dpart(static_cast<std::size_t>(n_), Q(0)) {}

    void add_g(const Monomial& m, const MatrixG& x) {
        if (x.is_zero()) return;
        auto it = g.find(m);
        if (it == g.end()) {
            g.emplace(m, x);
            return;
        }
        it->second = it->second + x;
        if (it->second.is_zero()) g.erase(it);
    }
    void add_c(const Monomial& mbar, const Q& v) {
        if (toroidal::is_zero(v)) return;
        auto& slot = c[mbar];
        slot += v;
        if (toroidal::is_zero(slot)) c.erase(mbar);
    }
    bool is_zero() const { return g.empty() && c.empty() && is_zero_vec(dpart); }

    AffineLoopElement& operator+=(const AffineLoopElement& o) {
        for (const auto& [m, x] : o.g) add_g(m, x);
        for (const auto& [m, v] : o.c) add_c(m, v);
        for (std::size_t i = 0; i < dpart.size(); ++i) dpart[i] += o.dpart[i];
        return *this;
    }
    friend bool operator==(const AffineLoopElement& a, const AffineLoopElement& b) {
        return a.g == b.g && a.c == b.c && a.dpart == b.dpart;
    }
};

inline Monomial tail_degree(const Monomial& m) { return Monomial(m.begin() + 1, m.end()); }

/// Bracket with the affine cocycle r_1 delta_{r_1 + s_1, 0} tr(XY) C_1.
inline AffineLoopElement bracket(const AffineLoopElement& x, const AffineLoopElement& y) {
    AffineLoopElement out(x.d, x.n);
    for (const auto& [r, X] : x.g)
        for (const auto& [s, Y] : y.g) {
            Monomial rs = r + s;
            out.add_g(rs, commutator(X, Y));
            if (r[0] != 0 && rs[0] == 0) out.add_c(tail_degree(rs), Q(r[0]) * trace_form(X, Y));
        }
    for (std::size_t i = 0; i < x.dpart.size(); ++i) {
        for (const auto& [s, Y] : y.g)
            if (s[i] && !is_zero(x.dpart[i])) out.add_g(s, (x.dpart[i] * Q(s[i])) * Y);
        for (const auto& [r, X] : x.g)
            if (r[i] && !is_zero(y.dpart[i])) out.add_g(r, (-y.dpart[i] * Q(r[i])) * X);
        if (i == 0) continue;
        for (const auto& [m, v] : y.c)
            if (m[i - 1]) out.add_c(m, x.dpart[i] * Q(m[i - 1]) * v);
        for (const auto& [m, v] : x.c)
            if (m[i - 1]) out.add_c(m, -y.dpart[i] * Q(m[i - 1]) * v);
    }
    return out;
}

/// Identity on sl (x) A and D; t^m K_1 with m_1 = 0 goes to C_1 (x) t^{m'}, other centers to 0.
inline AffineLoopElement phi_prime(const TauElement& x) {
    AffineLoopElement out(x.d, x.n);
    for (const auto& [m, X] : x.g) out.add_g(m, X);
    for (const auto& [m, v] : x.z.terms())
        if (m[0] == 0) out.add_c(tail_degree(m), v[0]);
    out.dpart = x.dpart;
    return out;
}

} // namespace toroidal
