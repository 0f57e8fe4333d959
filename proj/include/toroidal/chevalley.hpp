#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "algebra.hpp"

namespace toroidal {

using Vec = std::vector<Q>;

inline void axpy(Vec& y, const Q& a, const Vec& x) {
    if (is_zero(a)) return;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!is_zero(x[i])) y[i] += a * x[i];
}

/// Irreducible highest weight module of a Kac-Moody algebra of type A (finite or untwisted affine),
/// built weight by weight from its Chevalley generators. A vector below the top is zero exactly when
/// every e_i kills it, so each weight space is stored through its image under all e_i.
/// Weights are recorded as k with mu = lambda - sum k_i alpha_i.
class ChevalleyModule {
public:
    using Key = std::vector<long>;

    /// cartan(i, j) = alpha_j(alpha_i^v); depth_index < 0 means no truncation.
    ChevalleyModule(IntMatrix cartan, std::vector<long> top, int depth_index = -1, long depth = 0)
        : cartan_(std::move(cartan)), top_(std::move(top)), depth_index_(depth_index), depth_(depth) {
        const std::size_t r = cartan_.rows();
        if (cartan_.cols() != r || top_.size() != r) throw dimension_error("Cartan data of wrong shape");
        for (long x : top_)
            if (x < 0) throw domain_error("highest weight is not dominant integral");
        if (depth_index >= 0 && depth < 0) throw domain_error("negative truncation depth");
        build();
    }

    std::size_t rank() const { return cartan_.rows(); }
    const IntMatrix& cartan() const { return cartan_; }
    const std::vector<long>& top() const { return top_; }
    bool truncated() const { return depth_index_ >= 0; }
    int depth_index() const { return depth_index_; }
    long depth_bound() const { return depth_; }

    std::size_t dim() const { return dim_; }
    std::size_t weight_count() const { return keys_.size(); }
    const Key& key(std::size_t w) const { return keys_[w]; }
    std::size_t weight_dim(std::size_t w) const { return dims_[w]; }
    std::size_t offset(std::size_t w) const { return offsets_[w]; }
    std::size_t weight_of_index(std::size_t g) const { return owner_[g]; }

    std::optional<std::size_t> find(const Key& k) const {
        auto it = index_.find(k);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool in_window(const Key& k) const {
        for (long x : k)
            if (x < 0) return true;  // above the top: zero, not out of window
        return depth_index_ < 0 || k[static_cast<std::size_t>(depth_index_)] <= depth_;
    }

    long depth(std::size_t w) const { return depth_index_ < 0 ? 0 : keys_[w][static_cast<std::size_t>(depth_index_)]; }

    /// mu(alpha_i^v) on weight w.
    long hval(std::size_t i, std::size_t w) const {
        long v = top_[i];
        for (std::size_t j = 0; j < rank(); ++j) v -= cartan_(i, j).get_si() * keys_[w][j];
        return v;
    }

    Vec unit(std::size_t g) const {
        Vec v(dim_, Q(0));
        v[g] = 1;
        return v;
    }

    /// e_i on a basis vector: the image lies in weight k - e_i.
    Vec raise_basis(std::size_t i, std::size_t g) const {
        Vec out(dim_, Q(0));
        std::size_t w = owner_[g];
        auto it = e_[i].find(w);
        if (it == e_[i].end()) return out;
        const auto& [target, m] = it->second;
        for (std::size_t r = 0; r < m.rows(); ++r) out[offsets_[target] + r] = m(r, g - offsets_[w]);
        return out;
    }

    /// f_i on a basis vector, or nothing when the target weight lies below the truncation.
    std::optional<Vec> lower_basis(std::size_t i, std::size_t g) const {
        std::size_t w = owner_[g];
        Key k = keys_[w];
        ++k[i];
        if (!in_window(k)) return std::nullopt;
        Vec out(dim_, Q(0));
        auto it = f_[i].find(w);
        if (it == f_[i].end()) return out;
        const auto& [target, m] = it->second;
        for (std::size_t r = 0; r < m.rows(); ++r) out[offsets_[target] + r] = m(r, g - offsets_[w]);
        return out;
    }

private:
    void build() {
        const std::size_t r = rank();
        e_.assign(r, {});
        f_.assign(r, {});
        add_weight(Key(r, 0), 1);
        std::vector<std::size_t> layer{0};
        while (!layer.empty()) {
            std::map<Key, bool> cand;
            for (std::size_t w : layer)
                for (std::size_t i = 0; i < r; ++i) {
                    Key k = keys_[w];
                    ++k[i];
                    if (in_window(k)) cand[k] = true;
                }
            std::vector<std::size_t> next;
            for (const auto& [k, unused] : cand)
                if (auto w = build_weight(k)) next.push_back(*w);
            layer = std::move(next);
        }
        owner_.assign(dim_, 0);
        for (std::size_t w = 0; w < keys_.size(); ++w)
            for (std::size_t b = 0; b < dims_[w]; ++b) owner_[offsets_[w] + b] = w;
    }

    std::size_t add_weight(const Key& k, std::size_t d) {
        std::size_t w = keys_.size();
        keys_.push_back(k);
        dims_.push_back(d);
        offsets_.push_back(dim_);
        dim_ += d;
        index_[k] = w;
        return w;
    }

    // column b of e_j on weight w, as coordinates in weight k - e_j
    Vec raise_coords(std::size_t j, std::size_t w, std::size_t b) const {
        auto it = e_[j].find(w);
        return it->second.second.col(b);
    }

    std::optional<std::size_t> build_weight(const Key& k) {
        const std::size_t r = rank();
        // signature layout: one block per j with k - e_j a nonzero weight
        std::vector<std::optional<std::size_t>> below(r);
        std::vector<std::size_t> block_off(r, 0);
        std::size_t width = 0;
        for (std::size_t j = 0; j < r; ++j) {
            if (k[j] == 0) continue;
            Key kj = k;
            --kj[j];
            below[j] = find(kj);
            if (below[j]) {
                block_off[j] = width;
                width += dims_[*below[j]];
            }
        }
        struct Cand {
            std::size_t i, b;
            Vec sig;
        };
        std::vector<Cand> cands;
        for (std::size_t i = 0; i < r; ++i) {
            if (!below[i]) continue;
            const std::size_t src = *below[i];
            for (std::size_t b = 0; b < dims_[src]; ++b) {
                Vec sig(width, Q(0));
                for (std::size_t j = 0; j < r; ++j) {
                    if (!below[j]) continue;
                    // e_j f_i w = f_i e_j w + delta_ij h_i(w) w
                    if (i == j) sig[block_off[j] + b] += Q(hval(i, src));
                    if (keys_[src][j] == 0) continue;
                    Key kij = keys_[src];
                    --kij[j];
                    auto mid = find(kij);
                    if (!mid) continue;
                    Vec ew = raise_coords(j, src, b);
                    auto fit = f_[i].find(*mid);
                    if (fit == f_[i].end()) continue;
                    const QMatrix& fm = fit->second.second;
                    Vec img = fm * ew;
                    for (std::size_t t = 0; t < img.size(); ++t) sig[block_off[j] + t] += img[t];
                }
                cands.push_back({i, b, std::move(sig)});
            }
        }
        // greedy basis in candidate order, by incremental elimination
        std::vector<std::size_t> chosen;
        std::vector<std::pair<std::size_t, Vec>> reduced;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            Vec v = cands[c].sig;
            for (const auto& [p, row] : reduced)
                if (!is_zero(v[p])) axpy(v, Q(-v[p]), row);
            std::size_t p = 0;
            while (p < width && is_zero(v[p])) ++p;
            if (p == width) continue;
            Q inv = 1 / v[p];
            for (auto& x : v) x *= inv;
            for (auto& [q, row] : reduced)
                if (!is_zero(row[p])) axpy(row, Q(-row[p]), v);
            reduced.emplace_back(p, std::move(v));
            chosen.push_back(c);
        }
        if (chosen.empty()) return std::nullopt;
        const std::size_t w = add_weight(k, chosen.size());
        QMatrix basis_t(width, chosen.size());
        for (std::size_t a = 0; a < chosen.size(); ++a)
            for (std::size_t t = 0; t < width; ++t) basis_t(t, a) = cands[chosen[a]].sig[t];
        for (std::size_t j = 0; j < r; ++j) {
            if (!below[j]) continue;
            QMatrix m(dims_[*below[j]], chosen.size());
            for (std::size_t a = 0; a < chosen.size(); ++a)
                for (std::size_t t = 0; t < m.rows(); ++t) m(t, a) = cands[chosen[a]].sig[block_off[j] + t];
            e_[j][w] = {*below[j], m};
        }
        for (std::size_t i = 0; i < r; ++i) {
            if (!below[i]) continue;
            f_[i][*below[i]] = {w, QMatrix(chosen.size(), dims_[*below[i]])};
        }
        for (const auto& c : cands) {
            auto x = solve(basis_t, c.sig);
            if (!x) throw std::logic_error("candidate outside the span of the chosen basis");
            auto& fm = f_[c.i][*below[c.i]].second;
            for (std::size_t a = 0; a < chosen.size(); ++a) fm(a, c.b) = (*x)[a];
        }
        return w;
    }

    IntMatrix cartan_;
    std::vector<long> top_;
    int depth_index_;
    long depth_;
    std::vector<Key> keys_;
    std::vector<std::size_t> dims_, offsets_, owner_;
    std::map<Key, std::size_t> index_;
    std::size_t dim_ = 0;
    // per generator: source weight -> (target weight, matrix)
    std::vector<std::map<std::size_t, std::pair<std::size_t, QMatrix>>> e_, f_;
};

/// Finite-dimensional irreducible sl(d+1)-module from its Dynkin labels.
inline ChevalleyModule build_finite_irreducible(int d, const std::vector<long>& labels) {
    ToroidalRootSystem rs(d, 1);
    IntMatrix a(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rs.finite_cartan()(i, j);
    if (labels.size() != static_cast<std::size_t>(d)) throw dimension_error("one label per simple root");
    return ChevalleyModule(a, labels);
}

/// Dynkin labels of a weight of sl(d+1) given in toroidal coordinates.
inline std::vector<long> finite_labels(const ToroidalRootSystem& rs, const WeightVec& lambda) {
    std::vector<long> out;
    for (int i = 1; i <= rs.d(); ++i) {
        Q v = rs.pair(lambda, rs.alpha_vee(i));
        if (v.get_den() != 1 || v < 0) throw domain_error("highest weight is not dominant integral");
        out.push_back(v.get_num().get_si());
    }
    return out;
}

inline ChevalleyModule build_finite_irreducible(const ToroidalRootSystem& rs, const WeightVec& lambda) {
    return build_finite_irreducible(rs.d(), finite_labels(rs, lambda));
}

/// Affine sl(d+1) module truncated at alpha_0-depth <= depth; labels[0] is lambda(alpha_0^v).
inline ChevalleyModule build_affine_irreducible(int d, const std::vector<long>& labels, long depth) {
    if (labels.size() != static_cast<std::size_t>(d + 1)) throw dimension_error("one label per affine simple root");
    if (depth < 0) throw domain_error("negative truncation depth");
    ToroidalRootSystem rs(d, 1);
    // reorder so that index 0 is alpha_0
    const std::size_t r = static_cast<std::size_t>(d + 1);
    auto pos = [&](std::size_t i) { return i == 0 ? static_cast<std::size_t>(d) : i - 1; };
    IntMatrix a(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) a(i, j) = rs.extended_cartan()(pos(i), pos(j));
    return ChevalleyModule(a, labels, 0, depth);
}

/// Action of X (x) t^k (affine degree k, 0 for finite modules) on a ChevalleyModule, obtained from
/// the Chevalley generators by brackets. The affine generators are e_0 = E_{d+1,1} t and
/// f_0 = E_{1,d+1} t^{-1}.
class MatrixAction {
public:
    explicit MatrixAction(std::shared_ptr<const ChevalleyModule> mod)
        : mod_(std::move(mod)), affine_(mod_->truncated()), size_(affine_ ? mod_->rank() : mod_->rank() + 1) {
        const std::size_t s = size_;
        basis_ = sl_basis(s);
        // degree 0
        std::vector<Recipe> deg0(basis_.size());
        std::map<std::pair<std::size_t, std::size_t>, Recipe> unit;
        for (std::size_t a = 0; a + 1 < s; ++a) {
            unit[{a, a + 1}] = {{Q(1), node_raise(chev(a + 1))}};
            unit[{a + 1, a}] = {{Q(1), node_lower(chev(a + 1))}};
        }
        for (std::size_t gap = 2; gap < s; ++gap)
            for (std::size_t a = 0; a + gap < s; ++a) {
                std::size_t b = a + gap;
                unit[{a, b}] = bracket(unit[{a, a + 1}], unit[{a + 1, b}]);
                unit[{b, a}] = bracket(unit[{b, a + 1}], unit[{a + 1, a}]);
            }
        std::size_t idx = 0;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                if (i != j) deg0[idx++] = unit[{i, j}];
        for (std::size_t i = 1; i < s; ++i) {
            std::vector<Q> c(mod_->rank(), Q(0));
            c[chev(i)] = 1;
            deg0[idx++] = {{Q(1), node_cartan(c)}};
        }
        recipes_[0] = deg0;
        unit0_ = unit;
    }

    const ChevalleyModule& module() const { return *mod_; }
    std::size_t matrix_size() const { return size_; }
    bool affine() const { return affine_; }

    /// Level: C = sum of all affine simple coroots in type A.
    long level() const {
        if (!affine_) return 0;
        long c = 0;
        for (long x : mod_->top()) c += x;
        return c;
    }

    /// X (x) t^k applied to a basis vector; nothing when the result leaves the truncation.
    std::optional<Vec> apply_basis(const MatrixG& x, long k, std::size_t g) const {
        if (k != 0 && !affine_) throw domain_error("loop degree on a finite module");
        auto c = sl_coords(x);
        const auto& rec = recipes(k);
        Vec out(mod_->dim(), Q(0));
        for (std::size_t b = 0; b < c.size(); ++b) {
            if (is_zero(c[b])) continue;
            auto v = apply_recipe(rec[b], g);
            if (!v) return std::nullopt;
            axpy(out, c[b], *v);
        }
        return out;
    }

    std::optional<Vec> apply(const MatrixG& x, long k, const Vec& v) const {
        Vec out(mod_->dim(), Q(0));
        for (std::size_t g = 0; g < v.size(); ++g) {
            if (is_zero(v[g])) continue;
            auto r = apply_basis(x, k, g);
            if (!r) return std::nullopt;
            axpy(out, v[g], *r);
        }
        return out;
    }

private:
    struct Node {
        enum Kind { raise, lower, cartan, commutator } kind;
        std::size_t index = 0;
        std::vector<Q> coeffs;
        std::size_t left = 0, right = 0;
    };
    using Recipe = std::vector<std::pair<Q, std::size_t>>;

    std::size_t chev(std::size_t i) const { return affine_ ? i : i - 1; }

    std::size_t push(Node n) const {
        nodes_.push_back(std::move(n));
        return nodes_.size() - 1;
    }
    std::size_t node_raise(std::size_t i) const { return push({Node::raise, i, {}, 0, 0}); }
    std::size_t node_lower(std::size_t i) const { return push({Node::lower, i, {}, 0, 0}); }
    std::size_t node_cartan(std::vector<Q> c) const { return push({Node::cartan, 0, std::move(c), 0, 0}); }

    Recipe bracket(const Recipe& a, const Recipe& b) const {
        Recipe out;
        for (const auto& [ca, na] : a)
            for (const auto& [cb, nb] : b) out.push_back({ca * cb, push({Node::commutator, 0, {}, na, nb})});
        return out;
    }

    static Recipe scaled(Q s, Recipe r) {
        for (auto& [c, n] : r) c *= s;
        return r;
    }

    static Recipe combine(const std::vector<Q>& coords, const std::vector<Recipe>& recs) {
        Recipe out;
        for (std::size_t b = 0; b < coords.size(); ++b)
            if (!is_zero(coords[b]))
                for (const auto& [c, n] : recs[b]) out.push_back({coords[b] * c, n});
        return out;
    }

    MatrixG h_theta() const { return matrix_unit(size_, size_ - 1, size_ - 1) - matrix_unit(size_, 0, 0); }

    const std::vector<Recipe>& recipes(long k) const {
        std::lock_guard<std::recursive_mutex> lock(mu_);
        auto it = recipes_.find(k);
        if (it != recipes_.end()) return it->second;
        const std::size_t s = size_;
        Recipe seed;
        MatrixG seed_m;
        if (k > 0) {
            seed_m = matrix_unit(s, s - 1, 0);
            if (k == 1) {
                seed = {{Q(1), node_raise(0)}};
            } else {
                Recipe h = combine(sl_coords(h_theta()), recipes(k - 1));
                seed = scaled(frac(1, 2), bracket(h, {{Q(1), node_raise(0)}}));
            }
        } else {
            seed_m = matrix_unit(s, 0, s - 1);
            if (k == -1) {
                seed = {{Q(1), node_lower(0)}};
            } else {
                Recipe h = combine(sl_coords(h_theta()), recipes(k + 1));
                seed = scaled(frac(1, 2), bracket({{Q(1), node_lower(0)}}, h));
            }
        }
        // close under ad of degree-zero matrix units
        std::vector<MatrixG> mats{seed_m};
        std::vector<Recipe> recs{seed};
        auto flat_rank = [&](const std::vector<MatrixG>& ms) {
            QMatrix f(ms.size(), s * s);
            for (std::size_t a = 0; a < ms.size(); ++a)
                for (std::size_t t = 0; t < s * s; ++t) f(a, t) = ms[a](t / s, t % s);
            return rank(f);
        };
        for (std::size_t q = 0; q < mats.size() && mats.size() < basis_.size(); ++q)
            for (const auto& [ij, ry] : unit0_) {
                MatrixG c = commutator(matrix_unit(s, ij.first, ij.second), mats[q]);
                if (c.is_zero()) continue;
                auto trial = mats;
                trial.push_back(c);
                if (flat_rank(trial) == mats.size()) continue;
                mats.push_back(c);
                recs.push_back(bracket(ry, recs[q]));
                if (mats.size() == basis_.size()) break;
            }
        if (mats.size() != basis_.size()) throw std::logic_error("degree-k closure does not span sl");
        QMatrix span(s * s, mats.size());
        for (std::size_t a = 0; a < mats.size(); ++a)
            for (std::size_t t = 0; t < s * s; ++t) span(t, a) = mats[a](t / s, t % s);
        std::vector<Recipe> out;
        for (const auto& b : basis_) {
            Vec target(s * s);
            for (std::size_t t = 0; t < s * s; ++t) target[t] = b(t / s, t % s);
            auto x = solve(span, target);
            out.push_back(combine(*x, recs));
        }
        return recipes_[k] = std::move(out);
    }

    std::optional<Vec> apply_recipe(const Recipe& r, std::size_t g) const {
        Vec out(mod_->dim(), Q(0));
        for (const auto& [c, n] : r) {
            auto v = apply_node(n, g);
            if (!v) return std::nullopt;
            axpy(out, c, *v);
        }
        return out;
    }

    std::optional<Vec> apply_node_vec(std::size_t n, const Vec& v) const {
        Vec out(mod_->dim(), Q(0));
        for (std::size_t g = 0; g < v.size(); ++g) {
            if (is_zero(v[g])) continue;
            auto r = apply_node(n, g);
            if (!r) return std::nullopt;
            axpy(out, v[g], *r);
        }
        return out;
    }

    std::optional<Vec> apply_node(std::size_t n, std::size_t g) const {
        {
            std::lock_guard<std::recursive_mutex> lock(mu_);
            auto it = cache_.find({n, g});
            if (it != cache_.end()) return it->second;
        }
        Node node;
        {
            std::lock_guard<std::recursive_mutex> lock(mu_);
            node = nodes_[n];
        }
        std::optional<Vec> res;
        switch (node.kind) {
        case Node::raise: res = mod_->raise_basis(node.index, g); break;
        case Node::lower: res = mod_->lower_basis(node.index, g); break;
        case Node::cartan: {
            Q s = 0;
            std::size_t w = mod_->weight_of_index(g);
            for (std::size_t i = 0; i < node.coeffs.size(); ++i)
                if (!is_zero(node.coeffs[i])) s += node.coeffs[i] * Q(mod_->hval(i, w));
            Vec v(mod_->dim(), Q(0));
            v[g] = s;
            res = v;
            break;
        }
        case Node::commutator: {
            auto b = apply_node(node.right, g);
            auto a = apply_node(node.left, g);
            if (!a || !b) break;
            auto ab = apply_node_vec(node.left, *b);
            auto ba = apply_node_vec(node.right, *a);
            if (!ab || !ba) break;
            axpy(*ab, Q(-1), *ba);
            res = std::move(ab);
            break;
        }
        }
        std::lock_guard<std::recursive_mutex> lock(mu_);
        cache_[{n, g}] = res;
        return res;
    }

    std::shared_ptr<const ChevalleyModule> mod_;
    bool affine_;
    std::size_t size_;
    std::vector<MatrixG> basis_;
    std::map<std::pair<std::size_t, std::size_t>, Recipe> unit0_;
    mutable std::recursive_mutex mu_;
    mutable std::vector<Node> nodes_;
    mutable std::map<long, std::vector<Recipe>> recipes_;
    mutable std::map<std::pair<std::size_t, std::size_t>, std::optional<Vec>> cache_;
};

} // namespace toroidal
