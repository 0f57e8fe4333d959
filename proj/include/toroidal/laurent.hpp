#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <vector>

#include "matrix.hpp"

namespace toroidal {

/// Multidegree m = (m_1, ..., m_n) of t^m = t_1^{m_1} ... t_n^{m_n}.
using Monomial = std::vector<long>;

/// Graded lexicographic order: total degree first, then lexicographic (missing entries read as 0).
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const {
        long sa = std::accumulate(a.begin(), a.end(), 0L);
        long sb = std::accumulate(b.begin(), b.end(), 0L);
        if (sa != sb) return sa < sb;
        for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
            long x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
            if (x != y) return x < y;
        }
        return false;
    }
};

inline Monomial operator+(Monomial a, const Monomial& b) {
    if (a.size() != b.size()) throw dimension_error("monomials of different arity");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Monomial operator-(Monomial a) {
    for (auto& x : a) x = -x;
    return a;
}

inline Monomial operator-(const Monomial& a, const Monomial& b) { return a + (-b); }

inline bool is_zero_degree(const Monomial& m) {
    for (long x : m)
        if (x != 0) return false;
    return true;
}

inline long max_abs(const Monomial& m) {
    long r = 0;
    for (long x : m) r = std::max(r, x < 0 ? -x : x);
    return r;
}

inline Monomial unit_degree(std::size_t n, std::size_t i, long k = 1) {
    Monomial m(n, 0);
    m[i] = k;
    return m;
}

inline Q qpow(const Q& a, long e) {
    Q r = 1, b = a;
    if (e < 0) {
        if (is_zero(a)) throw std::domain_error("negative power of zero");
        b = 1 / a;
        e = -e;
    }
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

/// Finite sum of c_m t^m; exponent vectors are stored without trailing zeros.
class LaurentPoly {
public:
    using Terms = std::map<Monomial, Q, GradedLex>;

    LaurentPoly() = default;
    LaurentPoly(int c) : LaurentPoly(Q(c)) {}
    LaurentPoly(const Q& c) {
        if (!toroidal::is_zero(c)) t_[Monomial{}] = c;
    }
    LaurentPoly(const Monomial& m, const Q& c) { add_term(m, c); }

    static LaurentPoly variable(std::size_t n, std::size_t i) { return {unit_degree(n, i), Q(1)}; }

    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    Q coeff(const Monomial& m) const {
        auto it = t_.find(strip(m));
        return it == t_.end() ? Q(0) : it->second;
    }

    void add_term(const Monomial& m, const Q& c) {
        if (toroidal::is_zero(c)) return;
        auto [it, fresh] = t_.emplace(strip(m), c);
        if (!fresh) {
            it->second += c;
            if (toroidal::is_zero(it->second)) t_.erase(it);
        }
    }

    LaurentPoly& operator+=(const LaurentPoly& o) {
        for (const auto& [m, c] : o.t_) add_term(m, c);
        return *this;
    }
    LaurentPoly& operator-=(const LaurentPoly& o) {
        for (const auto& [m, c] : o.t_) add_term(m, -c);
        return *this;
    }
    LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator-(const LaurentPoly& a) { return LaurentPoly() - a; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly p;
        for (const auto& [m1, c1] : a.t_)
            for (const auto& [m2, c2] : b.t_) {
                Monomial s(std::max(m1.size(), m2.size()), 0);
                for (std::size_t i = 0; i < m1.size(); ++i) s[i] += m1[i];
                for (std::size_t i = 0; i < m2.size(); ++i) s[i] += m2[i];
                p.add_term(s, c1 * c2);
            }
        return p;
    }
    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.t_ == b.t_; }
    friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

    /// Value at a point with nonzero coordinates.
    Q evaluate(const std::vector<Q>& x) const {
        Q s = 0;
        for (const auto& [m, c] : t_) {
            if (m.size() > x.size()) throw dimension_error("evaluation point too short");
            Q v = c;
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) v *= qpow(x[i], m[i]);
            s += v;
        }
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const LaurentPoly& p) {
        if (p.t_.empty()) return os << "0";
        bool first = true;
        for (const auto& [m, c] : p.t_) {
            os << (first ? "" : " + ") << c;
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i]) os << "*t" << (i + 1) << "^" << m[i];
            first = false;
        }
        return os;
    }

private:
    static Monomial strip(Monomial m) {
        while (!m.empty() && m.back() == 0) m.pop_back();
        return m;
    }

    Terms t_;
};

/// Grid of evaluation points: points[j] lists a_{j,1..N_j}.
using Grid = std::vector<std::vector<Q>>;

/// Throws invalid_grid when some axis is empty or has a zero or repeated point.
inline void validate_grid(const Grid& g) {
    for (const auto& axis : g) {
        if (axis.empty()) throw invalid_grid();
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (is_zero(axis[i])) throw invalid_grid();
            for (std::size_t k = 0; k < i; ++k)
                if (axis[i] == axis[k]) throw invalid_grid();
        }
    }
}

namespace detail {

/// Coefficients c_0..c_{N-1} of t^e mod prod_k (t - a_k).
class UnivariateReducer {
public:
    explicit UnivariateReducer(const std::vector<Q>& roots) {
        // monic P(t) = t^N + p_{N-1} t^{N-1} + ... + p_0
        std::vector<Q> p{Q(1)};
        for (const auto& a : roots) {
            std::vector<Q> next(p.size() + 1, Q(0));
            for (std::size_t i = 0; i < p.size(); ++i) {
                next[i + 1] += p[i];
                next[i] -= a * p[i];
            }
            p = std::move(next);
        }
        p_ = std::move(p);
        n_ = roots.size();
    }

    std::vector<Q> power(long e) const {
        std::vector<Q> r(n_, Q(0));
        if (n_ == 0) return r;
        r[0] = 1;
        if (e >= 0)
            for (long s = 0; s < e; ++s) r = times_t(r);
        else
            for (long s = 0; s < -e; ++s) r = over_t(r);
        return r;
    }

private:
    std::vector<Q> times_t(const std::vector<Q>& r) const {
        std::vector<Q> out(n_, Q(0));
        Q top = r[n_ - 1];
        for (std::size_t i = n_ - 1; i > 0; --i) out[i] = r[i - 1];
        for (std::size_t i = 0; i < n_; ++i) out[i] -= top * p_[i];
        return out;
    }
    // t^{-1} r: write r = r_0 + t s(t) and use t^{-1} = -(P(t) - p_0)/(t p_0) mod P
    std::vector<Q> over_t(const std::vector<Q>& r) const {
        std::vector<Q> out(n_, Q(0));
        Q c = r[0] / p_[0];
        for (std::size_t i = 0; i + 1 < n_; ++i) out[i] = r[i + 1] - c * p_[i + 1];
        out[n_ - 1] = -c;
        return out;
    }

    std::vector<Q> p_;
    std::size_t n_ = 0;
};

} // namespace detail

/// Representative of p modulo (P_1(t_1), ..., P_n(t_n)) supported on 0 <= m_j < N_j.
inline LaurentPoly laurent_reduce_mod_ideal(const LaurentPoly& p, const Grid& roots) {
    validate_grid(roots);
    const std::size_t n = roots.size();
    std::vector<detail::UnivariateReducer> red;
    for (const auto& axis : roots) red.emplace_back(axis);
    LaurentPoly out;
    for (const auto& [m0, c] : p.terms()) {
        Monomial m = m0;
        m.resize(n, 0);
        LaurentPoly term(Monomial(n, 0), c);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Q> u = red[j].power(m[j]);
            LaurentPoly f;
            for (std::size_t k = 0; k < u.size(); ++k) f.add_term(unit_degree(n, j, static_cast<long>(k)), u[k]);
            term = term * f;
        }
        out += term;
    }
    return out;
}

} // namespace toroidal
