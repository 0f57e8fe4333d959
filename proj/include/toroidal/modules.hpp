#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "chevalley.hpp"
#include "evaluation.hpp"
#include "lattice.hpp"

namespace toroidal {

/// Vector of V (x) A: a finite sum of w (x) t^r.
struct GradedVec {
    std::map<Monomial, Vec, GradedLex> parts;

    static GradedVec single(const Monomial& r, Vec v) {
        GradedVec g;
        g.add(r, Q(1), v);
        return g;
    }

    void add(const Monomial& r, const Q& c, const Vec& v) {
        if (toroidal::is_zero(c) || is_zero_vec(v)) return;
        auto it = parts.find(r);
        if (it == parts.end()) {
            Vec w(v.size(), Q(0));
            axpy(w, c, v);
            parts.emplace(r, std::move(w));
            return;
        }
        axpy(it->second, c, v);
        if (is_zero_vec(it->second)) parts.erase(it);
    }

    bool is_zero() const { return parts.empty(); }

    GradedVec& operator+=(const GradedVec& o) {
        for (const auto& [r, v] : o.parts) add(r, Q(1), v);
        return *this;
    }
    friend GradedVec operator-(GradedVec a, const GradedVec& b) {
        for (const auto& [r, v] : b.parts) a.add(r, Q(-1), v);
        return a;
    }
    friend bool operator==(const GradedVec& a, const GradedVec& b) { return a.parts == b.parts; }
};

/// Tensor product of highest weight modules; X (x) t^k acts on factor I with a coefficient c_I.
/// Affine factors are truncated jointly: total alpha_0-depth at most depth.
class TensorModule {
public:
    using Key = ChevalleyModule::Key;

    TensorModule(std::vector<std::shared_ptr<const MatrixAction>> factors, long depth = -1)
        : factors_(std::move(factors)), depth_(depth) {
        if (factors_.empty()) throw dimension_error("tensor product of no factors");
        affine_ = factors_.front()->affine();
        rank_ = factors_.front()->module().rank();
        for (const auto& f : factors_)
            if (f->affine() != affine_ || f->module().rank() != rank_) throw system_mismatch("tensor factors of different algebras");
        if (affine_ && depth_ < 0) throw domain_error("affine tensor product needs a depth");
        std::vector<std::size_t> t(factors_.size(), 0);
        enumerate(0, 0, t);
        top_.assign(rank_, 0);
        for (const auto& f : factors_)
            for (std::size_t i = 0; i < rank_; ++i) top_[i] += f->module().top()[i];
    }

    std::size_t factor_count() const { return factors_.size(); }
    const MatrixAction& factor(std::size_t I) const { return *factors_[I]; }
    bool affine() const { return affine_; }
    std::size_t rank() const { return rank_; }
    long depth_bound() const { return depth_; }
    std::size_t dim() const { return tuples_.size(); }
    const std::vector<std::size_t>& tuple(std::size_t g) const { return tuples_[g]; }
    const Key& key(std::size_t g) const { return keys_[g]; }
    long depth(std::size_t g) const { return affine_ ? keys_[g][0] : 0; }
    const std::vector<long>& top() const { return top_; }

    std::optional<std::size_t> find(const std::vector<std::size_t>& t) const {
        auto it = index_.find(t);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    Vec unit(std::size_t g) const {
        Vec v(dim(), Q(0));
        v[g] = 1;
        return v;
    }
    Vec highest() const { return unit(0); }

    /// Basis indices grouped by weight key.
    std::map<Key, std::vector<std::size_t>> weight_blocks() const {
        std::map<Key, std::vector<std::size_t>> out;
        for (std::size_t g = 0; g < dim(); ++g) out[keys_[g]].push_back(g);
        return out;
    }

    long hval(std::size_t i, std::size_t g) const {
        long v = 0;
        for (std::size_t I = 0; I < factors_.size(); ++I) {
            const auto& m = factors_[I]->module();
            v += m.hval(i, m.weight_of_index(tuples_[g][I]));
        }
        return v;
    }

    Q level(const std::vector<Q>& coef) const {
        Q s = 0;
        for (std::size_t I = 0; I < factors_.size(); ++I) s += coef[I] * Q(factors_[I]->level());
        return s;
    }

    /// sum_I c_I (X (x) t^k)^(I) v.
    std::optional<Vec> apply(const MatrixG& x, long k, const std::vector<Q>& coef, const Vec& v) const {
        return act(v, k, [&](std::size_t I, std::size_t h) { return factors_[I]->apply_basis(x, k, h); }, coef);
    }

    /// sum_I c_I f_i^(I) v.
    std::optional<Vec> lower(std::size_t i, const std::vector<Q>& coef, const Vec& v) const {
        long shift = affine_ && i == 0 ? -1 : 0;
        return act(v, shift, [&](std::size_t I, std::size_t h) { return factors_[I]->module().lower_basis(i, h); }, coef);
    }

    /// sum_I c_I e_i^(I) v.
    Vec raise(std::size_t i, const std::vector<Q>& coef, const Vec& v) const {
        long shift = affine_ && i == 0 ? 1 : 0;
        return *act(v, shift, [&](std::size_t I, std::size_t h) { return std::optional<Vec>(factors_[I]->module().raise_basis(i, h)); }, coef);
    }

private:
    void enumerate(std::size_t I, long used, std::vector<std::size_t>& t) {
        if (I == factors_.size()) {
            Key k(rank_, 0);
            for (std::size_t J = 0; J < t.size(); ++J) {
                const auto& m = factors_[J]->module();
                const auto& kj = m.key(m.weight_of_index(t[J]));
                for (std::size_t i = 0; i < rank_; ++i) k[i] += kj[i];
            }
            index_[t] = tuples_.size();
            tuples_.push_back(t);
            keys_.push_back(std::move(k));
            return;
        }
        const auto& m = factors_[I]->module();
        for (std::size_t h = 0; h < m.dim(); ++h) {
            long dh = m.depth(m.weight_of_index(h));
            if (affine_ && used + dh > depth_) continue;
            t[I] = h;
            enumerate(I + 1, used + dh, t);
        }
    }

    // shift is the loop degree of the operator; the result has depth lowered by it
    template <class F>
    std::optional<Vec> act(const Vec& v, long shift, F&& on_factor, const std::vector<Q>& coef) const {
        Vec out(dim(), Q(0));
        for (std::size_t g = 0; g < v.size(); ++g) {
            if (is_zero(v[g])) continue;
            if (affine_ && depth(g) - shift > depth_) return std::nullopt;
            for (std::size_t I = 0; I < factors_.size(); ++I) {
                if (is_zero(coef[I])) continue;
                auto r = on_factor(I, tuples_[g][I]);
                if (!r) return std::nullopt;
                std::vector<std::size_t> t = tuples_[g];
                for (std::size_t h = 0; h < r->size(); ++h) {
                    if (is_zero((*r)[h])) continue;
                    t[I] = h;
                    auto target = find(t);
                    if (!target) return std::nullopt;
                    out[*target] += v[g] * coef[I] * (*r)[h];
                }
            }
        }
        return out;
    }

    std::vector<std::shared_ptr<const MatrixAction>> factors_;
    long depth_;
    bool affine_ = false;
    std::size_t rank_ = 0;
    std::vector<std::vector<std::size_t>> tuples_;
    std::vector<Key> keys_;
    std::map<std::vector<std::size_t>, std::size_t> index_;
    std::vector<long> top_;
};

/// Grid points with one highest weight each. Labels are Dynkin labels in Chevalley order;
/// for affine targets labels[I][0] is the value on alpha_0^v.
struct PsiSpec {
    int d = 1;
    bool affine = false;
    PointGrid grid;
    std::vector<std::vector<long>> labels;
    std::vector<Q> d_values;  // lambda_I(d), affine only; zero when empty

    std::size_t coroot_count() const { return static_cast<std::size_t>(affine ? d + 1 : d); }

    void validate() const {
        if (d < 1) throw domain_error("rank must be positive");
        if (labels.size() != grid.N()) throw dimension_error("one highest weight per grid point");
        for (const auto& l : labels) {
            if (l.size() != coroot_count()) throw dimension_error("highest weight of wrong length");
            for (long x : l)
                if (x < 0) throw domain_error("highest weight is not dominant integral");
        }
        if (!d_values.empty() && d_values.size() != grid.N()) throw dimension_error("one d-value per grid point");
    }

    bool degenerate() const {
        for (const auto& l : labels)
            for (long x : l)
                if (x != 0) return false;
        return true;
    }

    Q d_value(std::size_t I) const { return d_values.empty() ? Q(0) : d_values[I]; }
};

/// psi(h (x) t^m) = sum_I a_I^m lambda_I(h) on the simple coroots.
class PsiFunctional {
public:
    explicit PsiFunctional(PsiSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

    const PsiSpec& spec() const { return spec_; }
    std::size_t coroot_count() const { return spec_.coroot_count(); }

    Q operator()(std::size_t i, const Monomial& m) const {
        Q s = 0;
        for (std::size_t I = 0; I < spec_.grid.N(); ++I)
            if (spec_.labels[I][i] != 0) s += spec_.grid.power(I, m) * Q(spec_.labels[I][i]);
        return s;
    }

    /// psi on a combination of simple coroots.
    Q value(const std::vector<Q>& h, const Monomial& m) const {
        Q s = 0;
        for (std::size_t i = 0; i < h.size(); ++i)
            if (!is_zero(h[i])) s += h[i] * (*this)(i, m);
        return s;
    }

    /// psi-bar(alpha_i^v (x) t^m) = psi(alpha_i^v (x) t^m) t^m.
    std::pair<Q, Monomial> bar(std::size_t i, const Monomial& m) const { return {(*this)(i, m), m}; }

    bool supported(const Monomial& m) const {
        for (std::size_t i = 0; i < coroot_count(); ++i)
            if (!is_zero((*this)(i, m))) return true;
        return false;
    }

private:
    PsiSpec spec_;
};

inline PsiFunctional build_psi(const PsiSpec& spec) { return PsiFunctional(spec); }

/// Support lattice Gamma of the algebra psi-bar(U(H)) and its coset data.
struct GammaLattice {
    std::size_t n = 0;
    long box = 0;
    std::vector<IntVec> generators;  // degrees m != 0 in the box with psi(h (x) t^m) != 0 for some h
    std::vector<IntVec> basis;       // Hermite normal form rows
    std::vector<long> periods;       // k_j: gcd of the support on axis j
    Z index = 0;
    bool closed = false;  // sums of generators reach every lattice point of the box

    bool full_rank() const { return basis.size() == n; }

    /// Canonical representative of m + Gamma.
    Monomial reduce(Monomial m) const {
        if (!full_rank()) throw rank_error("support lattice is not of full rank");
        for (std::size_t i = 0; i < n; ++i) {
            Z q = detail::floor_div(Z(m[i]), basis[i][i]);
            if (q == 0) continue;
            for (std::size_t j = i; j < n; ++j) m[j] -= Z(q * basis[i][j]).get_si();
        }
        return m;
    }

    bool contains(const Monomial& m) const { return is_zero_degree(reduce(m)); }

    std::vector<Monomial> cosets() const {
        if (!full_rank()) throw rank_error("support lattice is not of full rank");
        std::vector<Monomial> out{Monomial(n, 0)};
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Monomial> next;
            for (const auto& m : out)
                for (long v = 0; v < basis[i][i].get_si(); ++v) {
                    Monomial x = m;
                    x[i] = v;
                    next.push_back(x);
                }
            out = std::move(next);
        }
        return out;
    }
};

/// Degrees with |m|_inf <= bound in lexicographic order.
inline std::vector<Monomial> degree_box(std::size_t n, long bound) {
    std::vector<Monomial> pts{Monomial{}};
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Monomial> next;
        for (const auto& m : pts)
            for (long v = -bound; v <= bound; ++v) {
                Monomial x = m;
                x.push_back(v);
                next.push_back(std::move(x));
            }
        pts = std::move(next);
    }
    return pts;
}

/// Gamma from the support of psi-bar in the box |m|_inf <= box (default 2 max N_j).
inline GammaLattice compute_gamma(const PsiSpec& spec, long box = 0) {
    spec.validate();
    if (spec.degenerate()) throw degenerate_spec("all highest weights vanish");
    PsiFunctional psi(spec);
    GammaLattice g;
    g.n = spec.grid.n();
    std::size_t maxN = 1;
    for (std::size_t j = 0; j < g.n; ++j) maxN = std::max(maxN, spec.grid.size(j));
    g.box = box > 0 ? box : static_cast<long>(2 * maxN);
    const long side = 2 * g.box + 1;
    auto pts = degree_box(g.n, g.box);
    auto slot = [&](const Monomial& m) -> std::optional<std::size_t> {
        std::size_t k = 0;
        for (long x : m) {
            if (x < -g.box || x > g.box) return std::nullopt;
            k = k * static_cast<std::size_t>(side) + static_cast<std::size_t>(x + g.box);
        }
        return k;
    };
    std::vector<Monomial> support;
    for (const auto& m : pts)
        if (!is_zero_degree(m) && psi.supported(m)) {
            support.push_back(m);
            g.generators.emplace_back(m.begin(), m.end());
        }
    g.basis = hermite_normal_form(g.generators, g.n).basis;
    g.index = lattice_index(g.basis, g.n);
    g.periods.assign(g.n, 0);
    for (const auto& m : support) {
        int p = pivot_axis(m);
        bool on_axis = true;
        for (int i = 0; i < p; ++i) on_axis = on_axis && m[i] == 0;
        if (on_axis) g.periods[p] = std::gcd(g.periods[p], std::labs(m[p]));
    }
    if (!g.full_rank()) return g;
    // additive closure of the support inside the box
    std::vector<bool> reached(pts.size(), false);
    std::vector<Monomial> queue{Monomial(g.n, 0)};
    reached[*slot(queue.front())] = true;
    for (std::size_t q = 0; q < queue.size(); ++q)
        for (const auto& s : support) {
            Monomial y = queue[q] + s;
            auto k = slot(y);
            if (!k || reached[*k]) continue;
            reached[*k] = true;
            queue.push_back(std::move(y));
        }
    g.closed = true;
    for (std::size_t p = 0; p < pts.size() && g.closed; ++p)
        if (g.contains(pts[p]) && !reached[*slot(pts[p])]) g.closed = false;
    return g;
}

struct WeightSpace {
    std::vector<long> key;
    Monomial r;
    std::size_t component = 0;
    std::vector<GradedVec> basis;
};

/// A module over tau(d, n) given by explicit actions on finite weight spaces.
class TauModule {
public:
    virtual ~TauModule() = default;
    virtual const ToroidalAlgebra& algebra() const = 0;
    /// Weight spaces with |r|_inf <= window.
    virtual std::vector<WeightSpace> weight_spaces(long window) const = 0;
    /// Nothing when the result leaves the truncation.
    virtual std::optional<GradedVec> act(const TauElement& x, const GradedVec& v) const = 0;
    /// Chevalley generators e_i (raising) or f_i times t^m, |m|_inf <= bound.
    virtual std::vector<TauElement> chevalley_ops(bool raising, long bound) const = 0;
    /// Shift in r produced by an element of tau-degree m.
    virtual Monomial loop_part(const Monomial& m) const = 0;

    std::vector<GradedVec> basis(long window) const {
        std::vector<GradedVec> out;
        for (auto& ws : weight_spaces(window))
            for (auto& v : ws.basis) out.push_back(std::move(v));
        return out;
    }
};

/// V(psi) (x) A with its decomposition into the submodules U v(m).
/// For finite targets the grid lives on all n loop axes; for affine targets the affine variable is t_1
/// and the grid lives on axes 2..n.
class LoopModule : public TauModule {
public:
    using Key = TensorModule::Key;

    LoopModule(PsiSpec spec, long depth = 0) : spec_(std::move(spec)), psi_(spec_) {
        const int n = static_cast<int>(spec_.grid.n()) + (spec_.affine ? 1 : 0);
        if (spec_.affine && depth < 0) throw domain_error("negative truncation depth");
        if (n >= 2) tau_ = std::make_unique<ToroidalAlgebra>(spec_.d, n);
        std::map<std::vector<long>, std::shared_ptr<const MatrixAction>> cache;
        std::vector<std::shared_ptr<const MatrixAction>> factors;
        for (const auto& l : spec_.labels) {
            auto& slot = cache[l];
            if (!slot) {
                auto mod = spec_.affine ? build_affine_irreducible(spec_.d, l, depth) : build_finite_irreducible(spec_.d, l);
                slot = std::make_shared<const MatrixAction>(std::make_shared<const ChevalleyModule>(std::move(mod)));
            }
            factors.push_back(slot);
        }
        tensor_ = std::make_shared<const TensorModule>(factors, spec_.affine ? depth : -1);
        blocks_ = tensor_->weight_blocks();
        if (spec_.degenerate()) {
            cosets_ = {Monomial(spec_.grid.n(), 0)};
            space_[{blocks_.begin()->first, 0}] = {tensor_->highest()};
            return;
        }
        gamma_ = compute_gamma(spec_);
        if (!gamma_.closed) throw domain_error("support of psi-bar is not a subgroup");
        cosets_ = gamma_.cosets();
        build_classes();
        build_spaces();
    }

    const ToroidalAlgebra& algebra() const override {
        if (!tau_) throw domain_error("one loop variable: no toroidal action");
        return *tau_;
    }
    const PsiSpec& spec() const { return spec_; }
    const PsiFunctional& psi() const { return psi_; }
    const TensorModule& tensor() const { return *tensor_; }
    bool degenerate() const { return spec_.degenerate(); }
    const GammaLattice& gamma() const {
        if (degenerate()) throw degenerate_spec("all highest weights vanish");
        return gamma_;
    }
    std::size_t component_count() const { return cosets_.size(); }
    const std::vector<Monomial>& cosets() const { return cosets_; }
    const std::vector<std::vector<std::size_t>>& character_classes() const { return classes_; }

    std::size_t coset_of(const Monomial& r) const {
        if (degenerate()) return 0;
        Monomial c = gamma_.reduce(r);
        for (std::size_t i = 0; i < cosets_.size(); ++i)
            if (cosets_[i] == c) return i;
        throw std::logic_error("coset representative not enumerated");
    }

    /// Basis of W_{key, c}: the part of V(psi)_key reached in loop degrees r with r in c.
    const std::vector<Vec>& coset_space(const Key& key, std::size_t c) const {
        static const std::vector<Vec> empty;
        auto it = space_.find({key, c});
        return it == space_.end() ? empty : it->second;
    }

    const std::map<Key, std::vector<std::size_t>>& weight_blocks() const { return blocks_; }

    /// Loop degree of the variable that a tau-degree contributes to V(psi) (x) A.
    Monomial loop_part(const Monomial& m) const override { return spec_.affine ? tail_degree(m) : m; }

    /// Weight spaces of the component U v(cosets()[c]); all components when c is empty.
    std::vector<WeightSpace> weight_spaces(long window) const override { return spaces(window, std::nullopt); }

    std::vector<WeightSpace> component_spaces(long window, std::size_t c) const { return spaces(window, c); }

    std::optional<GradedVec> act(const TauElement& x, const GradedVec& v) const override {
        if (x.d != algebra().d() || x.n != algebra().n()) throw system_mismatch("element of a different toroidal algebra");
        return spec_.affine ? act_affine(x, v) : act_finite(x, v);
    }

    std::vector<TauElement> chevalley_ops(bool raising, long bound) const override {
        std::vector<TauElement> out;
        const auto& tau = algebra();
        const std::size_t s = tau.size();
        for (const auto& mb : degree_box(spec_.grid.n(), bound)) {
            auto full = [&](long k) {
                if (!spec_.affine) return mb;
                Monomial m{k};
                m.insert(m.end(), mb.begin(), mb.end());
                return m;
            };
            if (spec_.affine)
                out.push_back(tau.g(raising ? matrix_unit(s, s - 1, 0) : matrix_unit(s, 0, s - 1), full(raising ? 1 : -1)));
            for (std::size_t i = 0; i + 1 < s; ++i)
                out.push_back(tau.g(raising ? matrix_unit(s, i, i + 1) : matrix_unit(s, i + 1, i), full(0)));
        }
        return out;
    }

    /// Coefficients a_I^m of the grid points.
    std::vector<Q> coefficients(const Monomial& m) const {
        std::vector<Q> c(spec_.grid.N());
        for (std::size_t I = 0; I < c.size(); ++I) c[I] = spec_.grid.power(I, m);
        return c;
    }

    /// Whether every part of v lies in the component U v(cosets()[c]).
    bool in_component(const GradedVec& v, std::size_t c) const {
        for (const auto& [r, w] : v.parts) {
            std::size_t cc = degenerate() ? 0 : coset_of(r - cosets_[c]);
            for (const auto& [key, idx] : blocks_) {
                Vec part(w.size(), Q(0));
                bool any = false;
                for (std::size_t g : idx)
                    if (!is_zero(w[g])) {
                        part[g] = w[g];
                        any = true;
                    }
                if (!any) continue;
                if (degenerate() && !is_zero_degree(r)) return false;
                const auto& b = coset_space(key, cc);
                if (b.empty()) return false;
                QMatrix m(w.size(), b.size());
                for (std::size_t a = 0; a < b.size(); ++a)
                    for (std::size_t t = 0; t < w.size(); ++t) m(t, a) = b[a][t];
                if (!solve(m, part)) return false;
            }
        }
        return true;
    }

private:
    struct SpaceKey {
        Key key;
        std::size_t c;
        friend bool operator<(const SpaceKey& a, const SpaceKey& b) { return std::tie(a.key, a.c) < std::tie(b.key, b.c); }
    };

    void build_classes() {
        std::map<std::vector<Q>, std::vector<std::size_t>> by_char;
        for (std::size_t I = 0; I < spec_.grid.N(); ++I) {
            std::vector<Q> ch;
            for (const auto& b : gamma_.basis) {
                Monomial m;
                for (const auto& x : b) m.push_back(x.get_si());
                ch.push_back(spec_.grid.power(I, m));
            }
            by_char[ch].push_back(I);
        }
        for (auto& [ch, idx] : by_char) classes_.push_back(std::move(idx));
    }

    // W_{K, c} = sum_i sum_{c'} sum_S F_{i,S}(c - c') W_{K - e_i, c'}, F_{i,S}(m) = sum_{I in S} a_I^m f_i^(I)
    void build_spaces() {
        std::vector<Key> order;
        for (const auto& [k, idx] : blocks_) order.push_back(k);
        std::stable_sort(order.begin(), order.end(), [](const Key& a, const Key& b) {
            long ha = 0, hb = 0;
            for (long x : a) ha += x;
            for (long x : b) hb += x;
            return ha < hb;
        });
        const std::size_t zero = coset_of(Monomial(spec_.grid.n(), 0));
        space_[{order.front(), zero}] = {tensor_->highest()};
        for (std::size_t q = 1; q < order.size(); ++q) {
            const Key& K = order[q];
            for (std::size_t c = 0; c < cosets_.size(); ++c) {
                std::vector<Vec> gens;
                for (std::size_t i = 0; i < tensor_->rank(); ++i) {
                    if (K[i] == 0) continue;
                    Key Kp = K;
                    --Kp[i];
                    for (std::size_t cp = 0; cp < cosets_.size(); ++cp) {
                        const auto& src = coset_space(Kp, cp);
                        if (src.empty()) continue;
                        Monomial m0 = cosets_[c] - cosets_[cp];
                        auto a = coefficients(m0);
                        for (const auto& S : classes_) {
                            std::vector<Q> coef(a.size(), Q(0));
                            for (std::size_t I : S) coef[I] = a[I];
                            for (const auto& w : src) {
                                auto y = tensor_->lower(i, coef, w);
                                if (!y) throw std::logic_error("lowering left the truncation");
                                if (!is_zero_vec(*y)) gens.push_back(std::move(*y));
                            }
                        }
                    }
                }
                auto b = independent(gens);
                if (!b.empty()) space_[{K, c}] = std::move(b);
            }
        }
    }

    static std::vector<Vec> independent(const std::vector<Vec>& gens) {
        std::vector<Vec> out;
        std::vector<std::pair<std::size_t, Vec>> reduced;
        for (const auto& g : gens) {
            Vec v = g;
            for (const auto& [p, row] : reduced)
                if (!is_zero(v[p])) axpy(v, Q(-v[p]), row);
            std::size_t p = 0;
            while (p < v.size() && is_zero(v[p])) ++p;
            if (p == v.size()) continue;
            Q inv = 1 / v[p];
            for (auto& x : v) x *= inv;
            for (auto& [pp, row] : reduced)
                if (!is_zero(row[p])) axpy(row, Q(-row[p]), v);
            reduced.emplace_back(p, std::move(v));
            out.push_back(g);
        }
        return out;
    }

    std::vector<WeightSpace> spaces(long window, std::optional<std::size_t> only) const {
        std::vector<WeightSpace> out;
        const std::size_t loops = spec_.grid.n();
        auto degs = degree_box(loops, window);
        if (degenerate()) {
            if (only && *only != 0) return out;
            WeightSpace ws{blocks_.begin()->first, Monomial(loops, 0), 0, {GradedVec::single(Monomial(loops, 0), tensor_->highest())}};
            out.push_back(std::move(ws));
            return out;
        }
        for (const auto& [key, idx] : blocks_)
            for (const auto& r : degs)
                for (std::size_t c = 0; c < cosets_.size(); ++c) {
                    if (only && *only != c) continue;
                    const auto& b = coset_space(key, coset_of(r - cosets_[c]));
                    if (b.empty()) continue;
                    WeightSpace ws{key, r, c, {}};
                    for (const auto& w : b) ws.basis.push_back(GradedVec::single(r, w));
                    out.push_back(std::move(ws));
                }
        return out;
    }

    std::optional<GradedVec> act_finite(const TauElement& x, const GradedVec& v) const {
        GradedVec out;
        for (const auto& [r, w] : v.parts) {
            for (const auto& [m, X] : x.g) out.add(r + m, Q(1), *tensor_->apply(X, 0, coefficients(m), w));
            Q dval = 0;
            for (std::size_t i = 0; i < r.size(); ++i) dval += x.dpart[i] * Q(r[i]);
            out.add(r, dval, w);
        }
        return out;
    }

    std::optional<GradedVec> act_affine(const TauElement& x, const GradedVec& v) const {
        AffineLoopElement y = phi_prime(x);
        GradedVec out;
        for (const auto& [r, w] : v.parts) {
            for (const auto& [m, X] : y.g) {
                Monomial mb = tail_degree(m);
                auto res = tensor_->apply(X, m[0], coefficients(mb), w);
                if (!res) return std::nullopt;
                out.add(r + mb, Q(1), *res);
            }
            for (const auto& [mb, c] : y.c) out.add(r + mb, c * tensor_->level(coefficients(mb)), w);
            // d_1 acts by lambda(d) - depth, d_i (i >= 2) by r_{i-1}
            Q dshift = 0;
            for (std::size_t i = 1; i < y.dpart.size(); ++i) dshift += y.dpart[i] * Q(r[i - 1]);
            Q dtop = 0;
            for (std::size_t I = 0; I < spec_.grid.N(); ++I) dtop += spec_.d_value(I);
            Vec dw(w.size(), Q(0));
            for (std::size_t g = 0; g < w.size(); ++g)
                if (!is_zero(w[g])) dw[g] = w[g] * (dshift + y.dpart[0] * (dtop - Q(tensor_->depth(g))));
            out.add(r, Q(1), dw);
        }
        return out;
    }

    PsiSpec spec_;
    PsiFunctional psi_;
    std::unique_ptr<ToroidalAlgebra> tau_;
    std::shared_ptr<const TensorModule> tensor_;
    std::map<Key, std::vector<std::size_t>> blocks_;
    GammaLattice gamma_;
    std::vector<Monomial> cosets_;
    std::vector<std::vector<std::size_t>> classes_;
    std::map<SpaceKey, std::vector<Vec>> space_;
};

inline std::shared_ptr<const TensorModule> build_tensor_module(const PsiSpec& spec, long depth = 0) {
    spec.validate();
    std::vector<std::shared_ptr<const MatrixAction>> factors;
    for (const auto& l : spec.labels) {
        auto mod = spec.affine ? build_affine_irreducible(spec.d, l, depth) : build_finite_irreducible(spec.d, l);
        factors.push_back(std::make_shared<const MatrixAction>(std::make_shared<const ChevalleyModule>(std::move(mod))));
    }
    return std::make_shared<const TensorModule>(std::move(factors), spec.affine ? depth : -1);
}

inline std::shared_ptr<const LoopModule> build_loop_module(const PsiSpec& spec, long depth = 0) {
    return std::make_shared<const LoopModule>(spec, depth);
}

/// Finite G: tau acts on V(psi) (x) A with the center acting trivially.
inline std::shared_ptr<const LoopModule> build_example_41(PsiSpec spec) {
    spec.affine = false;
    return build_loop_module(spec);
}

/// Affine G in the variable t_1, grid on axes 2..n; tau acts through phi_prime.
inline std::shared_ptr<const LoopModule> build_example_42(PsiSpec spec, int n, long depth) {
    spec.affine = true;
    if (static_cast<int>(spec.grid.n()) + 1 != n) throw dimension_error("grid must live on axes 2..n");
    return build_loop_module(spec, depth);
}

} // namespace toroidal
