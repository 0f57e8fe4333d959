#pragma once

#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "lattice.hpp"
#include "modules.hpp"

namespace toroidal {

/// Automorphism of tau induced by A in GL(n, Z).
/// Degrees are column vectors: X t^m -> X t^{Am}, t^m K_i -> sum_j a_ji t^{Am} K_j,
/// d_i -> sum_j (A^{-1})_ij d_j. apply(A) o apply(B) = apply(AB).
class TauAutomorphism {
public:
    explicit TauAutomorphism(IntMatrix a) : a_(std::move(a)) {
        if (a_.rows() != a_.cols()) throw dimension_error("automorphism matrix must be square");
        Z det_a = det(a_);
        if (abs(det_a) != 1) throw not_unimodular("determinant " + det_a.get_str() + " is not +-1");
        QMatrix inv = *toroidal::inverse(to_rational(a_));
        inv_ = IntMatrix(a_.rows(), a_.rows());
        for (std::size_t i = 0; i < a_.rows(); ++i)
            for (std::size_t j = 0; j < a_.rows(); ++j) inv_(i, j) = inv(i, j).get_num();
        dual_ = inv_.transpose();
    }

    static TauAutomorphism identity(std::size_t n) { return TauAutomorphism(IntMatrix::identity(n)); }

    /// Exchanges axes i and j.
    static TauAutomorphism swap(std::size_t n, std::size_t i, std::size_t j) {
        IntMatrix p = IntMatrix::identity(n);
        p.swap_rows(i, j);
        return TauAutomorphism(p);
    }

    std::size_t n() const { return a_.rows(); }
    const IntMatrix& matrix() const { return a_; }
    const IntMatrix& inverse_matrix() const { return inv_; }
    /// (A^T)^{-1}, acting on coefficient vectors of d_1..d_n.
    const IntMatrix& dual_matrix() const { return dual_; }

    TauAutomorphism inverse() const { return TauAutomorphism(inv_); }
    TauAutomorphism compose(const TauAutomorphism& b) const { return TauAutomorphism(a_ * b.a_); }

    Monomial degree(const Monomial& m) const {
        check(m.size());
        Monomial out(n(), 0);
        for (std::size_t i = 0; i < n(); ++i)
            for (std::size_t j = 0; j < n(); ++j) out[i] += a_(i, j).get_si() * m[j];
        return out;
    }

    TauElement apply(const TauElement& x) const {
        check(static_cast<std::size_t>(x.n));
        TauElement out(x.d, x.n);
        for (const auto& [m, X] : x.g) out.add_g(degree(m), X);
        for (const auto& [m, v] : x.z.terms()) {
            Monomial am = degree(m);
            for (std::size_t i = 0; i < n(); ++i) {
                if (is_zero(v[i])) continue;
                for (std::size_t j = 0; j < n(); ++j)
                    if (a_(j, i) != 0) out.z.add(am, j, v[i] * Q(a_(j, i)));
            }
        }
        for (std::size_t j = 0; j < n(); ++j)
            for (std::size_t i = 0; i < n(); ++i)
                if (dual_(j, i) != 0) out.dpart[j] += Q(dual_(j, i)) * x.dpart[i];
        return out;
    }

    TauElement operator()(const TauElement& x) const { return apply(x); }

    friend bool operator==(const TauAutomorphism& a, const TauAutomorphism& b) { return a.a_ == b.a_; }

private:
    void check(std::size_t k) const {
        if (k != n()) throw dimension_error("automorphism of rank " + std::to_string(n()) + " applied in rank " + std::to_string(k));
    }

    IntMatrix a_, inv_, dual_;
};

struct CenterNormalization {
    TauAutomorphism automorphism;
    /// Axis-supported basis m_i e_i of the image lattice, m_i > 0.
    std::vector<Monomial> degrees;
};

/// B in GL(n, Z) carrying span(L) onto a lattice with an axis-supported basis.
inline CenterNormalization normalize_center_support(const std::vector<Monomial>& L, std::size_t n) {
    std::vector<IntVec> gens;
    for (const auto& m : L) {
        if (m.size() != n) throw dimension_error("degree of wrong arity");
        if (is_zero_degree(m)) continue;
        gens.emplace_back(m.begin(), m.end());
    }
    if (gens.empty()) return {TauAutomorphism::identity(n), {}};
    HermiteForm h = hermite_normal_form(gens, n);
    bool axis = true;
    std::vector<Monomial> hdeg;
    for (const auto& row : h.basis) {
        int nz = 0;
        Monomial m(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = row[i].get_si();
            nz += m[i] != 0;
        }
        axis = axis && nz == 1;
        hdeg.push_back(std::move(m));
    }
    if (axis) {
        for (auto& m : hdeg)
            for (auto& x : m) x = std::labs(x);
        return {TauAutomorphism::identity(n), hdeg};
    }
    // P M Q = D, so the rows of M Q = P^{-1} D span the same lattice as the rows of D
    SmithForm f = smith_normal_form(IntMatrix::from_rows(gens));
    std::vector<Monomial> degs;
    for (std::size_t i = 0; i < std::min(f.d.rows(), n); ++i)
        if (f.d(i, i) != 0) degs.push_back(unit_degree(n, i, f.d(i, i).get_si()));
    return {TauAutomorphism(f.q.transpose()), degs};
}

struct LevelNormalization {
    TauAutomorphism automorphism;
    Z level;
};

/// A = [[I_k, 0], [0, B]] with A k_vec = (k_1..k_k, 0, .., 0, l), l = gcd of the tail, l >= 0.
inline LevelNormalization normalize_level_vector(const IntVec& k_vec, std::size_t k) {
    const std::size_t n = k_vec.size();
    if (k > n) throw dimension_error("block index beyond the vector");
    const std::size_t s = n - k;
    IntVec tail(k_vec.begin() + static_cast<long>(k), k_vec.end());
    Z l = gcd_of(tail);
    if (l == 0) return {TauAutomorphism::identity(n), Z(0)};
    bool done = tail.back() > 0;
    for (std::size_t i = 0; i + 1 < s; ++i) done = done && tail[i] == 0;
    if (done) return {TauAutomorphism::identity(n), l};
    IntVec u = tail;
    for (auto& x : u) x /= l;
    IntMatrix b0 = complete_to_unimodular({u}, s);
    // cyclic shift e_1 -> e_s
    IntMatrix a = IntMatrix::identity(n);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) a(k + i, k + j) = b0((i + 1) % s, j);
    return {TauAutomorphism(a), l};
}

/// The module M twisted by A: x . v = A(x) v.
class TwistedModule : public TauModule {
public:
    TwistedModule(std::shared_ptr<const TauModule> base, TauAutomorphism a) : base_(std::move(base)), a_(std::move(a)), inv_(a_.inverse()) {
        if (static_cast<std::size_t>(base_->algebra().n()) != a_.n()) throw dimension_error("automorphism rank differs from loop count");
    }

    const TauModule& base() const { return *base_; }
    const TauAutomorphism& automorphism() const { return a_; }

    const ToroidalAlgebra& algebra() const override { return base_->algebra(); }
    std::vector<WeightSpace> weight_spaces(long window) const override { return base_->weight_spaces(window); }
    std::optional<GradedVec> act(const TauElement& x, const GradedVec& v) const override { return base_->act(a_.apply(x), v); }
    std::vector<TauElement> chevalley_ops(bool raising, long bound) const override {
        std::vector<TauElement> out;
        for (const auto& x : base_->chevalley_ops(raising, bound)) out.push_back(inv_.apply(x));
        return out;
    }
    Monomial loop_part(const Monomial& m) const override { return base_->loop_part(a_.degree(m)); }

private:
    std::shared_ptr<const TauModule> base_;
    TauAutomorphism a_, inv_;
};

inline std::shared_ptr<const TwistedModule> twist_module(std::shared_ptr<const TauModule> base, const TauAutomorphism& a) {
    return std::make_shared<const TwistedModule>(std::move(base), a);
}

} // namespace toroidal
