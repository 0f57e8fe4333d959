#pragma once

#include <deque>
#include <set>
#include <vector>

#include "laurent.hpp"

namespace toroidal {

/// Coordinate vector over a fixed ordered basis; Tag separates weights from coweights.
template <class Tag>
struct Coords {
    std::vector<Q> c;

    Coords() = default;
    explicit Coords(std::size_t dim) : c(dim, Q(0)) {}
    explicit Coords(std::vector<Q> v) : c(std::move(v)) {}

    std::size_t size() const { return c.size(); }
    Q& operator[](std::size_t i) { return c[i]; }
    const Q& operator[](std::size_t i) const { return c[i]; }
    bool is_zero() const { return is_zero_vec(c); }

    Coords& operator+=(const Coords& o) {
        if (o.size() != size()) throw dimension_error("coordinate length mismatch");
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    Coords& operator-=(const Coords& o) {
        if (o.size() != size()) throw dimension_error("coordinate length mismatch");
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
        return *this;
    }
    friend Coords operator+(Coords a, const Coords& b) { return a += b; }
    friend Coords operator-(Coords a, const Coords& b) { return a -= b; }
    friend Coords operator-(Coords a) {
        for (auto& x : a.c) x = -x;
        return a;
    }
    friend Coords operator*(const Q& s, Coords a) {
        for (auto& x : a.c) x *= s;
        return a;
    }
    friend bool operator==(const Coords& a, const Coords& b) { return a.c == b.c; }
    friend bool operator!=(const Coords& a, const Coords& b) { return a.c != b.c; }
    friend bool operator<(const Coords& a, const Coords& b) { return a.c < b.c; }
};

struct WeightTag {};
struct CoweightTag {};

/// Coordinates over (alpha_1..alpha_{d+n}, w_1..w_n).
using WeightVec = Coords<WeightTag>;
/// Coordinates over (alpha_1^v..alpha_{d+n}^v, d_1..d_n).
using CoweightVec = Coords<CoweightTag>;

/// Real root alpha + delta_m with alpha a finite root.
struct RealRoot {
    WeightVec alpha;
    Monomial m;
};

/// Affine and toroidal root data for type A_d with n loop variables.
class ToroidalRootSystem {
public:
    ToroidalRootSystem(int d, int n) : d_(d), n_(n) {
        if (d < 1) throw domain_error("rank must be at least 1");
        if (n < 1) throw domain_error("need at least one loop variable");
        build();
    }

    int d() const { return d_; }
    int n() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(d_ + 2 * n_); }

    const IntMatrix& affine_cartan() const { return affine_; }
    const IntMatrix& extended_cartan() const { return ext_; }
    const IntMatrix& finite_cartan() const { return fin_; }
    /// Numerical labels a_1..a_{d+n} and colabels b_i^{-1} = a_i^v.
    const std::vector<Q>& labels() const { return a_; }
    const std::vector<Q>& colabels() const { return binv_; }
    const QMatrix& form_gram_dual() const { return gram_dual_; }
    const QMatrix& form_gram() const { return gram_; }
    /// pairing_matrix()(i, j) = (i-th weight basis vector)(j-th coweight basis vector).
    const QMatrix& pairing_matrix() const { return pair_; }

    // basis vectors, indices are 1-based as in the usual notation
    WeightVec alpha(int i) const { return unit_w(static_cast<std::size_t>(i - 1)); }
    WeightVec w(int j) const { return unit_w(static_cast<std::size_t>(d_ + n_ + j - 1)); }
    CoweightVec alpha_vee(int i) const { return unit_h(static_cast<std::size_t>(i - 1)); }
    CoweightVec dd(int j) const { return unit_h(static_cast<std::size_t>(d_ + n_ + j - 1)); }

    WeightVec beta() const {
        WeightVec b(dim());
        for (int i = 1; i <= d_; ++i) b[i - 1] = a_[i - 1];
        return b;
    }
    CoweightVec beta_vee() const {
        CoweightVec b(dim());
        for (int i = 1; i <= d_; ++i) b[i - 1] = binv_[i - 1];
        return b;
    }
    WeightVec delta(int j) const { return beta() + alpha(d_ + j); }
    WeightVec delta(const Monomial& m) const {
        check_degree(m);
        WeightVec s(dim());
        for (int j = 1; j <= n_; ++j) s += Q(m[j - 1]) * delta(j);
        return s;
    }
    CoweightVec C(int j) const { return beta_vee() + alpha_vee(d_ + j); }

    Q pair(const WeightVec& lambda, const CoweightVec& h) const {
        check(lambda.size() == dim() && h.size() == dim());
        Q s = 0;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (is_zero(lambda[i])) continue;
            for (std::size_t j = 0; j < dim(); ++j)
                if (!is_zero(h[j]) && !is_zero(pair_(i, j))) s += lambda[i] * pair_(i, j) * h[j];
        }
        return s;
    }

    Q form_dual(const WeightVec& x, const WeightVec& y) const { return bilinear(gram_dual_, x.c, y.c); }
    Q form(const CoweightVec& x, const CoweightVec& y) const { return bilinear(gram_, x.c, y.c); }

    /// Weight with prescribed values on the coweight basis.
    WeightVec weight_from_values(const std::vector<Q>& values) const {
        check(values.size() == dim());
        return WeightVec(*solve(pair_.transpose(), values));
    }
    /// Values of lambda on the coweight basis.
    std::vector<Q> values_of(const WeightVec& lambda) const {
        std::vector<Q> v(dim());
        for (std::size_t j = 0; j < dim(); ++j) v[j] = pair(lambda, unit_h(j));
        return v;
    }

    /// Finite weight with Dynkin labels lambda(alpha_i^v), i <= d, vanishing on the C_j and d_j.
    WeightVec finite_weight(const std::vector<Q>& dynkin) const {
        check(dynkin.size() == static_cast<std::size_t>(d_));
        std::vector<Q> v(dim(), Q(0));
        Q on_beta = 0;
        for (int i = 0; i < d_; ++i) {
            v[i] = dynkin[i];
            on_beta += binv_[i] * dynkin[i];
        }
        for (int j = 0; j < n_; ++j) v[d_ + j] = -on_beta;
        return weight_from_values(v);
    }

    /// The element t_lambda of the Cartan with (t_lambda, h) = lambda(h).
    CoweightVec dual_coweight(const WeightVec& lambda) const {
        QMatrix g = gram_;
        std::vector<Q> rhs = values_of(lambda);
        return CoweightVec(*solve(g, rhs));
    }

    /// Finite roots of A_d: +-(alpha_a + ... + alpha_b), positive roots first.
    const std::vector<WeightVec>& finite_roots() const { return roots_; }
    std::vector<WeightVec> positive_finite_roots() const {
        return {roots_.begin(), roots_.begin() + static_cast<long>(roots_.size() / 2)};
    }
    bool is_finite_root(const WeightVec& a) const {
        for (const auto& r : roots_)
            if (r == a) return true;
        return false;
    }

    WeightVec gamma(const RealRoot& g) const { return g.alpha + delta(g.m); }

    /// alpha^v = sum m_i |alpha_i|^2/|alpha|^2 alpha_i^v for a finite root.
    CoweightVec finite_coroot(const WeightVec& alpha) const {
        if (!is_finite_root(alpha)) throw not_a_root("not a finite root");
        Q len = form_dual(alpha, alpha);
        CoweightVec c(dim());
        for (int i = 1; i <= d_; ++i) {
            if (is_zero(alpha[i - 1])) continue;
            c += (alpha[i - 1] * form_dual(this->alpha(i), this->alpha(i)) / len) * alpha_vee(i);
        }
        return c;
    }

    CoweightVec coroot(const RealRoot& g) const {
        check_degree(g.m);
        if (g.alpha.is_zero() || !is_finite_root(g.alpha)) throw not_a_root("null or non-root finite part");
        CoweightVec c = finite_coroot(g.alpha);
        Q s = Q(2) / form_dual(g.alpha, g.alpha);
        for (int j = 1; j <= n_; ++j)
            if (g.m[j - 1]) c += (s * Q(g.m[j - 1])) * C(j);
        return c;
    }

    WeightVec reflect(const RealRoot& g, const WeightVec& lambda) const {
        CoweightVec cv = coroot(g);
        return lambda - pair(lambda, cv) * gamma(g);
    }

    /// Reflection in a simple root alpha_i, 1 <= i <= d+n.
    WeightVec simple_reflect(int i, const WeightVec& lambda) const {
        return lambda - pair(lambda, alpha_vee(i)) * alpha(i);
    }

    /// Dominant finite weight with no smaller dominant weight in its root-lattice coset.
    bool is_miniscule(const WeightVec& lambda) const {
        std::vector<Q> dyn(d_);
        for (int i = 1; i <= d_; ++i) {
            dyn[i - 1] = pair(lambda, alpha_vee(i));
            if (dyn[i - 1].get_den() != 1 || dyn[i - 1] < 0) throw domain_error("weight is not dominant integral");
        }
        // simple-root coordinates bound how far below lambda a dominant weight can sit
        QMatrix cart = to_rational(fin_);
        std::vector<Q> coord = *solve(cart, dyn);
        std::vector<long> cap(d_);
        for (int i = 0; i < d_; ++i) {
            Z f;
            mpz_fdiv_q(f.get_mpz_t(), coord[i].get_num_mpz_t(), coord[i].get_den_mpz_t());
            cap[i] = f.get_si();
        }
        std::set<std::vector<long>> seen;
        std::deque<std::vector<long>> queue{std::vector<long>(d_, 0)};
        seen.insert(queue.front());
        while (!queue.empty()) {
            auto k = queue.front();
            queue.pop_front();
            bool dominant = true, nonzero = false;
            for (int i = 0; i < d_; ++i) {
                Q v = dyn[i];
                for (int j = 0; j < d_; ++j) v -= Q(k[j]) * Q(fin_(i, j));
                if (v < 0) dominant = false;
                if (k[i]) nonzero = true;
            }
            if (nonzero && dominant) return false;
            for (int i = 0; i < d_; ++i) {
                if (k[i] + 1 > cap[i]) continue;
                auto next = k;
                ++next[i];
                if (seen.insert(next).second) queue.push_back(next);
            }
        }
        return true;
    }

private:
    void check(bool ok) const {
        if (!ok) throw dimension_error("vector does not belong to this root system");
    }
    void check_degree(const Monomial& m) const {
        if (m.size() != static_cast<std::size_t>(n_)) throw dimension_error("degree of wrong arity");
    }
    WeightVec unit_w(std::size_t i) const {
        WeightVec v(dim());
        v[i] = 1;
        return v;
    }
    CoweightVec unit_h(std::size_t i) const {
        CoweightVec v(dim());
        v[i] = 1;
        return v;
    }
    static Q bilinear(const QMatrix& g, const std::vector<Q>& x, const std::vector<Q>& y) {
        if (x.size() != g.rows() || y.size() != g.cols()) throw dimension_error("form argument length");
        Q s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (is_zero(x[i])) continue;
            for (std::size_t j = 0; j < y.size(); ++j)
                if (!is_zero(y[j]) && !is_zero(g(i, j))) s += x[i] * g(i, j) * y[j];
        }
        return s;
    }

    void build() {
        const int d = d_, n = n_;
        affine_ = IntMatrix(d + 1, d + 1);
        for (int i = 0; i <= d; ++i) affine_(i, i) = 2;
        for (int i = 1; i < d; ++i) affine_(i, i + 1) = affine_(i + 1, i) = -1;
        if (d == 1) {
            affine_(0, 1) = affine_(1, 0) = -2;
        } else {
            affine_(0, 1) = affine_(1, 0) = -1;
            affine_(0, d) = affine_(d, 0) = -1;
        }
        fin_ = IntMatrix(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) fin_(i, j) = affine_(i + 1, j + 1);

        const int e = d + n;
        ext_ = IntMatrix(e, e);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) ext_(i, j) = fin_(i, j);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) {
                ext_(d + i, j) = affine_(0, j + 1);
                ext_(j, d + i) = affine_(j + 1, 0);
            }
            for (int j = 0; j < n; ++j) ext_(d + i, d + j) = 2;
        }

        a_.assign(e, Q(1));
        binv_.assign(e, Q(1));

        const std::size_t D = dim();
        pair_ = QMatrix(D, D);
        for (int i = 0; i < e; ++i)
            for (int j = 0; j < e; ++j) pair_(i, j) = Q(ext_(j, i));
        for (int i = 0; i < n; ++i) {
            pair_(d + i, e + i) = 1;  // alpha_{d+i}(d_i)
            pair_(e + i, d + i) = 1;  // w_i(alpha_{d+i}^v)
        }

        gram_dual_ = QMatrix(D, D);
        gram_ = QMatrix(D, D);
        for (int i = 0; i < e; ++i)
            for (int j = 0; j < e; ++j) {
                gram_dual_(i, j) = Q(ext_(i, j)) * binv_[i] / a_[i];
                gram_(i, j) = a_[j] / binv_[j] * Q(ext_(i, j));
            }
        for (int i = 0; i < n; ++i) {
            gram_dual_(d + i, e + i) = gram_dual_(e + i, d + i) = 1;
            gram_(d + i, e + i) = gram_(e + i, d + i) = 1;
        }

        for (int a = 1; a <= d; ++a)
            for (int b = a; b <= d; ++b) {
                WeightVec r(D);
                for (int i = a; i <= b; ++i) r[i - 1] = 1;
                roots_.push_back(r);
            }
        const std::size_t npos = roots_.size();
        for (std::size_t i = 0; i < npos; ++i) roots_.push_back(-roots_[i]);
    }

    int d_, n_;
    IntMatrix affine_, fin_, ext_;
    std::vector<Q> a_, binv_;
    QMatrix pair_, gram_dual_, gram_;
    std::vector<WeightVec> roots_;
};

} // namespace toroidal
