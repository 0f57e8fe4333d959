#pragma once

#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "roots.hpp"

namespace toroidal {

/// Traceless (d+1)x(d+1) matrix standing for an element of sl(d+1).
using MatrixG = QMatrix;

inline MatrixG commutator(const MatrixG& x, const MatrixG& y) {
    const std::size_t s = x.rows();
    MatrixG c(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < s; ++k) {
            if (!is_zero(x(i, k)))
                for (std::size_t j = 0; j < s; ++j)
                    if (!is_zero(y(k, j))) c(i, j) += x(i, k) * y(k, j);
            if (!is_zero(y(i, k)))
                for (std::size_t j = 0; j < s; ++j)
                    if (!is_zero(x(k, j))) c(i, j) -= y(i, k) * x(k, j);
        }
    return c;
}

inline Q trace(const MatrixG& x) {
    Q t = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) t += x(i, i);
    return t;
}

/// tr(XY) without forming the product.
inline Q trace_form(const MatrixG& x, const MatrixG& y) {
    Q t = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k)
            if (!is_zero(x(i, k)) && !is_zero(y(k, i))) t += x(i, k) * y(k, i);
    return t;
}

inline MatrixG matrix_unit(std::size_t size, std::size_t i, std::size_t j) {
    MatrixG e(size, size);
    e(i, j) = 1;
    return e;
}

/// Basis of sl(size): off-diagonal units in row-major order, then h_i = E_ii - E_{i+1,i+1}.
inline std::vector<MatrixG> sl_basis(std::size_t size) {
    std::vector<MatrixG> b;
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j)
            if (i != j) b.push_back(matrix_unit(size, i, j));
    for (std::size_t i = 0; i + 1 < size; ++i) b.push_back(matrix_unit(size, i, i) - matrix_unit(size, i + 1, i + 1));
    return b;
}

/// Coordinates of a traceless matrix in sl_basis.
inline std::vector<Q> sl_coords(const MatrixG& x) {
    const std::size_t s = x.rows();
    if (!is_zero(trace(x))) throw domain_error("matrix is not traceless");
    std::vector<Q> c;
    c.reserve(s * s - 1);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j)
            if (i != j) c.push_back(x(i, j));
    Q partial = 0;
    for (std::size_t i = 0; i + 1 < s; ++i) {
        partial += x(i, i);
        c.push_back(partial);
    }
    return c;
}

/// Largest axis with m_i != 0, or -1 for the zero degree.
inline int pivot_axis(const Monomial& m) {
    for (int i = static_cast<int>(m.size()) - 1; i >= 0; --i)
        if (m[i] != 0) return i;
    return -1;
}

/// Element of the center: finite sum of t^m K_i modulo sum_i m_i t^m K_i = 0.
class CenterElement {
public:
    using Terms = std::map<Monomial, std::vector<Q>, GradedLex>;

    CenterElement() = default;
    explicit CenterElement(std::size_t n) : n_(n) {}

    static CenterElement single(std::size_t n, const Monomial& m, std::size_t axis, const Q& c) {
        CenterElement z(n);
        z.add(m, axis, c);
        return z;
    }

    std::size_t n() const { return n_; }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    /// Adds c t^m K_axis and restores the canonical form in degree m.
    void add(const Monomial& m, std::size_t axis, const Q& c) {
        if (m.size() != n_ || axis >= n_) throw dimension_error("center term of wrong arity");
        if (toroidal::is_zero(c)) return;
        auto it = t_.find(m);
        if (it == t_.end()) it = t_.emplace(m, std::vector<Q>(n_, Q(0))).first;
        auto& v = it->second;
        int p = pivot_axis(m);
        if (p >= 0 && static_cast<int>(axis) == p) {
            // K_p = -sum_{i != p} (m_i / m_p) K_i in degree m
            for (std::size_t i = 0; i < n_; ++i)
                if (static_cast<int>(i) != p && m[i] != 0) v[i] -= c * Q(m[i]) / Q(m[p]);
        } else {
            v[axis] += c;
        }
        if (is_zero_vec(v)) t_.erase(it);
    }

    Q coeff(const Monomial& m, std::size_t axis) const {
        auto it = t_.find(m);
        return it == t_.end() ? Q(0) : it->second[axis];
    }

    CenterElement& operator+=(const CenterElement& o) {
        adopt(o);
        for (const auto& [m, v] : o.t_)
            for (std::size_t i = 0; i < n_; ++i) add(m, i, v[i]);
        return *this;
    }
    CenterElement& operator*=(const Q& s) {
        if (toroidal::is_zero(s)) {
            t_.clear();
            return *this;
        }
        for (auto& [m, v] : t_)
            for (auto& x : v) x *= s;
        return *this;
    }
    friend bool operator==(const CenterElement& a, const CenterElement& b) { return a.t_ == b.t_; }

private:
    void adopt(const CenterElement& o) {
        if (n_ == 0) n_ = o.n_;
        if (o.n_ != 0 && o.n_ != n_) throw system_mismatch("center elements of different arity");
    }

    std::size_t n_ = 0;
    Terms t_;
};

/// Canonical form of a raw sum of (m, i, c) meaning c t^m K_i.
inline CenterElement canonicalize_center(std::size_t n, const std::vector<std::tuple<Monomial, std::size_t, Q>>& raw) {
    CenterElement z(n);
    for (const auto& [m, i, c] : raw) z.add(m, i, c);
    return z;
}

/// Element of tau = sl(d+1) (x) A + Z + D.
struct TauElement {
    int d = 0, n = 0;
    std::map<Monomial, MatrixG, GradedLex> g;
    CenterElement z;
    std::vector<Q> dpart;

    TauElement() = default;
    TauElement(int d_, int n_) : d(d_), n(n_), z(static_cast<std::size_t>(n_)), dpart(static_cast<std::size_t>(n_), Q(0)) {}

    bool is_zero() const { return g.empty() && z.is_zero() && is_zero_vec(dpart); }

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

    TauElement& operator+=(const TauElement& o) {
        same_system(o);
        for (const auto& [m, x] : o.g) add_g(m, x);
        z += o.z;
        for (std::size_t i = 0; i < dpart.size(); ++i) dpart[i] += o.dpart[i];
        return *this;
    }
    TauElement& operator*=(const Q& s) {
        if (toroidal::is_zero(s)) {
            *this = TauElement(d, n);
            return *this;
        }
        for (auto& [m, x] : g) x = s * x;
        z *= s;
        for (auto& x : dpart) x *= s;
        return *this;
    }
    friend TauElement operator+(TauElement a, const TauElement& b) { return a += b; }
    friend TauElement operator*(const Q& s, TauElement a) { return a *= s; }
    friend TauElement operator-(TauElement a, const TauElement& b) {
        TauElement nb = b;
        nb *= Q(-1);
        return a += nb;
    }
    friend bool operator==(const TauElement& a, const TauElement& b) {
        return a.d == b.d && a.n == b.n && a.g == b.g && a.z == b.z && a.dpart == b.dpart;
    }
    friend bool operator!=(const TauElement& a, const TauElement& b) { return !(a == b); }

    void same_system(const TauElement& o) const {
        if (o.d != d || o.n != n) throw system_mismatch("elements of different toroidal algebras");
    }

    /// Degrees present in the G- and center parts.
    std::vector<Monomial> degrees() const {
        std::vector<Monomial> out;
        for (const auto& [m, x] : g) out.push_back(m);
        for (const auto& [m, v] : z.terms()) out.push_back(m);
        if (!is_zero_vec(dpart)) out.push_back(Monomial(n, 0));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        auto sep = [&] {
            if (!first) os << " + ";
            first = false;
        };
        for (const auto& [m, x] : g)
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 0; j < x.cols(); ++j)
                    if (!toroidal::is_zero(x(i, j))) {
                        sep();
                        os << x(i, j) << "*E" << i + 1 << j + 1 << "@" << mono_str(m);
                    }
        for (const auto& [m, v] : z.terms())
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!toroidal::is_zero(v[i])) {
                    sep();
                    os << v[i] << "*K" << i + 1 << "@" << mono_str(m);
                }
        for (std::size_t i = 0; i < dpart.size(); ++i)
            if (!toroidal::is_zero(dpart[i])) {
                sep();
                os << dpart[i] << "*d" << i + 1;
            }
        if (first) os << "0";
        return os.str();
    }

    static std::string mono_str(const Monomial& m) {
        std::string s = "(";
        for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
        return s + ")";
    }
};

/// Bracket on tau with the cocycle tr(XY) d(t^r) t^s.
inline TauElement bracket(const TauElement& x, const TauElement& y) {
    x.same_system(y);
    TauElement out(x.d, x.n);
    const std::size_t n = static_cast<std::size_t>(x.n);
    for (const auto& [r, X] : x.g)
        for (const auto& [s, Y] : y.g) {
            Monomial rs = r + s;
            out.add_g(rs, commutator(X, Y));
            Q f = trace_form(X, Y);
            if (!is_zero(f))
                for (std::size_t i = 0; i < n; ++i)
                    if (r[i]) out.z.add(rs, i, f * Q(r[i]));
        }
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_zero(x.dpart[i])) {
            for (const auto& [s, Y] : y.g)
                if (s[i]) out.add_g(s, (x.dpart[i] * Q(s[i])) * Y);
            for (const auto& [m, v] : y.z.terms())
                if (m[i])
                    for (std::size_t j = 0; j < n; ++j) out.z.add(m, j, x.dpart[i] * Q(m[i]) * v[j]);
        }
        if (!is_zero(y.dpart[i])) {
            for (const auto& [r, X] : x.g)
                if (r[i]) out.add_g(r, (-y.dpart[i] * Q(r[i])) * X);
            for (const auto& [m, v] : x.z.terms())
                if (m[i])
                    for (std::size_t j = 0; j < n; ++j) out.z.add(m, j, -y.dpart[i] * Q(m[i]) * v[j]);
        }
    }
    return out;
}

/// The toroidal Lie algebra over sl(d+1) in n >= 2 variables.
class ToroidalAlgebra {
public:
    ToroidalAlgebra(int d, int n) : rs_(d, n) {
        if (n < 2) throw domain_error("toroidal algebra needs n >= 2");
    }

    int d() const { return rs_.d(); }
    int n() const { return rs_.n(); }
    std::size_t size() const { return static_cast<std::size_t>(d() + 1); }
    const ToroidalRootSystem& roots() const { return rs_; }

    TauElement zero() const { return TauElement(d(), n()); }
    Monomial zero_degree() const { return Monomial(n(), 0); }

    TauElement g(const MatrixG& x, const Monomial& m) const {
        check_degree(m);
        if (x.rows() != size() || x.cols() != size()) throw dimension_error("matrix of wrong size");
        TauElement t = zero();
        t.add_g(m, x);
        return t;
    }
    TauElement K(std::size_t i, const Monomial& m) const {
        check_degree(m);
        TauElement t = zero();
        t.z.add(m, i, Q(1));
        return t;
    }
    TauElement K(std::size_t i) const { return K(i, zero_degree()); }
    TauElement dd(std::size_t i) const {
        TauElement t = zero();
        t.dpart.at(i) = 1;
        return t;
    }

    MatrixG E(std::size_t i, std::size_t j) const { return matrix_unit(size(), i, j); }
    /// h_i = E_ii - E_{i+1,i+1}, the image of alpha_i^v (1-based i).
    MatrixG h(int i) const { return E(i - 1, i - 1) - E(i, i); }
    MatrixG beta_vee_matrix() const { return E(0, 0) - E(size() - 1, size() - 1); }

    /// Root vector X_alpha for a finite root alpha.
    MatrixG root_vector(const WeightVec& alpha) const {
        auto [a, b] = root_span(alpha);
        return E(a, b);
    }

    /// Cartan element of tau representing a coweight.
    TauElement cartan_element(const CoweightVec& h_) const {
        TauElement t = zero();
        MatrixG x(size(), size());
        for (int i = 1; i <= d(); ++i) x = x + h_[i - 1] * h(i);
        for (int j = 1; j <= n(); ++j) {
            const Q& c = h_[d() + j - 1];
            if (is_zero(c)) continue;
            x = x - c * beta_vee_matrix();
            t.z.add(zero_degree(), j - 1, c);
        }
        t.add_g(zero_degree(), x);
        for (int j = 1; j <= n(); ++j) t.dpart[j - 1] = h_[d() + n() + j - 1];
        return t;
    }

    /// Basis of sl(d+1): off-diagonal units then h_1..h_d.
    std::vector<MatrixG> sl_basis() const { return toroidal::sl_basis(size()); }

    /// All degrees with |m|_inf <= bound in lexicographic order.
    std::vector<Monomial> degrees(long bound) const {
        std::vector<Monomial> out;
        Monomial m(n(), -bound);
        for (;;) {
            out.push_back(m);
            std::size_t i = m.size();
            while (i > 0 && m[i - 1] == bound) m[--i] = -bound;
            if (i == 0) break;
            ++m[i - 1];
        }
        return out;
    }

    /// Basis of the part of tau with |degree|_inf <= bound.
    std::vector<TauElement> basis(long bound) const {
        std::vector<TauElement> out;
        auto slb = sl_basis();
        for (const auto& m : degrees(bound)) {
            for (const auto& x : slb) out.push_back(g(x, m));
            int p = pivot_axis(m);
            for (int i = 0; i < n(); ++i)
                if (i != p) out.push_back(K(static_cast<std::size_t>(i), m));
        }
        for (int i = 0; i < n(); ++i) out.push_back(dd(static_cast<std::size_t>(i)));
        return out;
    }

    /// Splits gamma = alpha + delta_m; alpha is zero or a finite root.
    std::optional<std::pair<WeightVec, Monomial>> split_root(const WeightVec& gamma) const {
        const auto& rs = rs_;
        if (gamma.size() != rs.dim()) throw dimension_error("weight of wrong length");
        for (int j = 1; j <= n(); ++j)
            if (!is_zero(gamma[d() + n() + j - 1])) return std::nullopt;
        Monomial m(n());
        for (int j = 1; j <= n(); ++j) {
            const Q& c = gamma[d() + j - 1];
            if (c.get_den() != 1) return std::nullopt;
            m[j - 1] = c.get_num().get_si();
        }
        WeightVec alpha = gamma - rs.delta(m);
        if (!alpha.is_zero() && !rs.is_finite_root(alpha)) return std::nullopt;
        return std::make_pair(alpha, m);
    }

    /// Basis of the root space tau_gamma; empty when gamma is not a root or zero.
    std::vector<TauElement> root_space(const WeightVec& gamma) const {
        auto sp = split_root(gamma);
        if (!sp) return {};
        const auto& [alpha, m] = *sp;
        if (!alpha.is_zero()) return {g(root_vector(alpha), m)};
        std::vector<TauElement> out;
        for (int i = 1; i <= d(); ++i) out.push_back(g(h(i), m));
        int p = pivot_axis(m);
        for (int i = 0; i < n(); ++i)
            if (i != p) out.push_back(K(static_cast<std::size_t>(i), m));
        if (p < 0)
            for (int i = 0; i < n(); ++i) out.push_back(dd(static_cast<std::size_t>(i)));
        return out;
    }

    /// Weight of a homogeneous element, or nothing when it is not homogeneous.
    std::optional<WeightVec> weight_of(const TauElement& x) const {
        std::optional<WeightVec> w;
        auto merge = [&](const WeightVec& v) {
            if (w && *w != v) return false;
            w = v;
            return true;
        };
        for (const auto& [m, X] : x.g) {
            for (std::size_t i = 0; i < size(); ++i)
                for (std::size_t j = 0; j < size(); ++j) {
                    if (is_zero(X(i, j))) continue;
                    WeightVec v = rs_.delta(m);
                    if (i != j) v += entry_root(i, j);
                    if (!merge(v)) return std::nullopt;
                }
        }
        for (const auto& [m, v] : x.z.terms())
            if (!merge(rs_.delta(m))) return std::nullopt;
        if (!is_zero_vec(x.dpart) && !merge(WeightVec(rs_.dim()))) return std::nullopt;
        if (!w) w = WeightVec(rs_.dim());
        return w;
    }

    /// Weight eps_i - eps_j of the matrix unit E_ij (0-based, i != j).
    WeightVec entry_root(std::size_t i, std::size_t j) const {
        WeightVec v(rs_.dim());
        if (i < j)
            for (std::size_t k = i; k < j; ++k) v[k] = 1;
        else
            for (std::size_t k = j; k < i; ++k) v[k] = -1;
        return v;
    }

private:
    void check_degree(const Monomial& m) const {
        if (m.size() != static_cast<std::size_t>(n())) throw dimension_error("degree of wrong arity");
    }
    // row/column of the matrix unit carrying a finite root
    std::pair<std::size_t, std::size_t> root_span(const WeightVec& alpha) const {
        if (!rs_.is_finite_root(alpha)) throw not_a_root("not a finite root");
        std::size_t first = size(), last = 0;
        for (std::size_t k = 0; k < static_cast<std::size_t>(d()); ++k)
            if (!is_zero(alpha[k])) {
                first = std::min(first, k);
                last = k;
            }
        bool positive = alpha[first] > 0;
        return positive ? std::make_pair(first, last + 1) : std::make_pair(last + 1, first);
    }

    ToroidalRootSystem rs_;
};

struct Sl2Triple {
    TauElement e, f, h;
    CoweightVec h_coweight;
};

/// (X_alpha t^m, Y_alpha t^{-m}, gamma^v) with (X_alpha, Y_alpha) = 2/(t_alpha, t_alpha).
inline Sl2Triple sl2_triple(const ToroidalAlgebra& tau, const WeightVec& alpha, const Monomial& m) {
    const auto& rs = tau.roots();
    if (!rs.is_finite_root(alpha)) throw not_a_root("not a finite root");
    MatrixG x = tau.root_vector(alpha);
    MatrixG y = tau.root_vector(-alpha);
    CoweightVec t_alpha = rs.dual_coweight(alpha);
    Q target = Q(2) / rs.form(t_alpha, t_alpha);
    y = (target / trace_form(x, y)) * y;
    CoweightVec hv = rs.coroot(RealRoot{alpha, m});
    return {tau.g(x, m), tau.g(y, -m), tau.cartan_element(hv), hv};
}

} // namespace toroidal
