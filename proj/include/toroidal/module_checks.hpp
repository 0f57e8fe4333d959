#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modules.hpp"

namespace toroidal {

inline std::string vec_str(const GradedVec& v) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [r, w] : v.parts)
        for (std::size_t g = 0; g < w.size(); ++g) {
            if (is_zero(w[g])) continue;
            if (!first) os << " + ";
            first = false;
            os << w[g].get_str() << " e" << g << " t^(";
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << ")";
        }
    return first ? "0" : os.str();
}

struct AxiomReport {
    std::size_t checked = 0;
    std::size_t vacuous = 0;
    std::size_t failures = 0;
    std::string witness;
    bool ok() const { return failures == 0; }
};

/// [a, b] v = a(b v) - b(a v) for all pairs a < b of ops and all vectors; out-of-window results are vacuous.
inline AxiomReport check_module_axiom(const TauModule& mod, const std::vector<TauElement>& ops, const std::vector<GradedVec>& vecs) {
    AxiomReport rep;
    std::vector<std::vector<std::optional<GradedVec>>> img(ops.size());
    for (std::size_t a = 0; a < ops.size(); ++a)
        for (const auto& v : vecs) img[a].push_back(mod.act(ops[a], v));
    for (std::size_t a = 0; a < ops.size(); ++a)
        for (std::size_t b = a + 1; b < ops.size(); ++b) {
            TauElement br = bracket(ops[a], ops[b]);
            for (std::size_t k = 0; k < vecs.size(); ++k) {
                const auto& av = img[a][k];
                const auto& bv = img[b][k];
                if (!av || !bv) {
                    ++rep.vacuous;
                    continue;
                }
                auto abv = bv->is_zero() ? std::optional<GradedVec>(GradedVec{}) : mod.act(ops[a], *bv);
                auto bav = av->is_zero() ? std::optional<GradedVec>(GradedVec{}) : mod.act(ops[b], *av);
                auto lhs = br.is_zero() ? std::optional<GradedVec>(GradedVec{}) : mod.act(br, vecs[k]);
                if (!abv || !bav || !lhs) {
                    ++rep.vacuous;
                    continue;
                }
                ++rep.checked;
                if (*lhs != *abv - *bav && rep.failures++ == 0)
                    rep.witness = "[" + ops[a].str() + ", " + ops[b].str() + "] on " + vec_str(vecs[k]);
            }
        }
    return rep;
}

/// Real root vectors X_alpha (x) t^m with |m|_inf <= bound.
inline std::vector<TauElement> real_root_vectors(const ToroidalAlgebra& tau, long bound) {
    std::vector<TauElement> out;
    for (const auto& m : tau.degrees(bound))
        for (const auto& a : tau.roots().finite_roots()) out.push_back(tau.g(tau.root_vector(a), m));
    return out;
}

struct IntegrabilityReport {
    std::size_t nilpotent = 0;
    std::size_t vacuous = 0;
    std::size_t failures = 0;
    long max_power = 0;
    std::string witness;
    bool ok() const { return failures == 0; }
    bool all_nilpotent() const { return failures == 0 && vacuous == 0; }
};

/// Applies each op repeatedly to each vector until zero (nilpotent), out of window (vacuous) or cap (failure).
inline IntegrabilityReport check_integrability(const TauModule& mod, const std::vector<TauElement>& ops, const std::vector<GradedVec>& vecs, long cap) {
    IntegrabilityReport rep;
    for (const auto& x : ops)
        for (const auto& v : vecs) {
            GradedVec w = v;
            long k = 0;
            for (;;) {
                if (w.is_zero()) {
                    ++rep.nilpotent;
                    rep.max_power = std::max(rep.max_power, k);
                    break;
                }
                if (k >= cap) {
                    if (rep.failures++ == 0) rep.witness = x.str() + " on " + vec_str(v);
                    break;
                }
                auto y = mod.act(x, w);
                if (!y) {
                    ++rep.vacuous;
                    break;
                }
                w = std::move(*y);
                ++k;
            }
        }
    return rep;
}

/// Smallest k with x^k v = 0, or nothing if none up to cap or the orbit leaves the window.
inline std::optional<long> nilpotency_order(const TauModule& mod, const TauElement& x, GradedVec v, long cap) {
    for (long k = 0; k <= cap; ++k) {
        if (v.is_zero()) return k;
        auto y = mod.act(x, v);
        if (!y) return std::nullopt;
        v = std::move(*y);
    }
    return std::nullopt;
}

/// Eigenvalues of the coweight basis on v, or nothing when v is not a weight vector.
inline std::optional<WeightVec> weight_of(const TauModule& mod, const GradedVec& v) {
    const auto& tau = mod.algebra();
    const auto& rs = tau.roots();
    std::vector<Q> values;
    auto eigen = [&](const CoweightVec& h) -> std::optional<Q> {
        auto y = mod.act(tau.cartan_element(h), v);
        if (!y) return std::nullopt;
        const auto& [r, w] = *v.parts.begin();
        std::size_t g = 0;
        while (is_zero(w[g])) ++g;
        auto it = y->parts.find(r);
        Q c = it == y->parts.end() ? Q(0) : it->second[g] / w[g];
        GradedVec cv;
        for (const auto& [rr, ww] : v.parts) cv.add(rr, c, ww);
        if (*y != cv) return std::nullopt;
        return c;
    };
    if (v.is_zero()) return std::nullopt;
    for (int i = 1; i <= tau.d() + tau.n(); ++i) {
        auto c = eigen(rs.alpha_vee(i));
        if (!c) return std::nullopt;
        values.push_back(*c);
    }
    for (int j = 1; j <= tau.n(); ++j) {
        auto c = eigen(rs.dd(j));
        if (!c) return std::nullopt;
        values.push_back(*c);
    }
    return rs.weight_from_values(values);
}

namespace detail {

// coordinates of graded vectors in a common flattened frame
struct Frame {
    std::map<std::pair<Monomial, std::size_t>, std::size_t> index;
    std::size_t slot(const Monomial& r, std::size_t g) {
        auto [it, fresh] = index.emplace(std::make_pair(r, g), index.size());
        return it->second;
    }
};

inline QMatrix columns(Frame& f, const std::vector<GradedVec>& cols) {
    for (const auto& c : cols)
        for (const auto& [r, w] : c.parts)
            for (std::size_t g = 0; g < w.size(); ++g)
                if (!is_zero(w[g])) f.slot(r, g);
    QMatrix m(f.index.size(), cols.size());
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (const auto& [r, w] : cols[a].parts)
            for (std::size_t g = 0; g < w.size(); ++g)
                if (!is_zero(w[g])) m(f.index.at({r, g}), a) = w[g];
    return m;
}

inline long height(const std::vector<long>& k) {
    long h = 0;
    for (long x : k) h += x;
    return h;
}

} // namespace detail

struct WitnessResult {
    std::optional<GradedVec> vector;
    std::vector<long> key;
    Monomial r;
    std::size_t searched = 0;
    std::size_t skipped = 0;
};

/// First weight space (by height, then |r|) containing a nonzero vector killed by all raising
/// Chevalley operators e_i (x) t^m, |m|_inf <= op_bound; reversed uses the lowering ones and the
/// opposite height order. Spaces where some operator leaves the window are skipped.
inline WitnessResult witness_highest_vector(const TauModule& mod, bool reversed, long window, long op_bound) {
    WitnessResult res;
    auto spaces = mod.weight_spaces(window);
    std::stable_sort(spaces.begin(), spaces.end(), [&](const WeightSpace& a, const WeightSpace& b) {
        long ha = detail::height(a.key), hb = detail::height(b.key);
        if (ha != hb) return reversed ? ha > hb : ha < hb;
        return max_abs(a.r) < max_abs(b.r);
    });
    auto ops = mod.chevalley_ops(!reversed, op_bound);
    for (const auto& ws : spaces) {
        std::vector<std::vector<GradedVec>> imgs(ops.size());
        bool skip = false;
        for (std::size_t o = 0; o < ops.size() && !skip; ++o)
            for (const auto& b : ws.basis) {
                auto y = mod.act(ops[o], b);
                if (!y) {
                    skip = true;
                    break;
                }
                imgs[o].push_back(std::move(*y));
            }
        if (skip) {
            ++res.skipped;
            continue;
        }
        ++res.searched;
        // stack all operators: one block of rows each
        std::size_t rows = 0;
        std::vector<QMatrix> blocks;
        for (auto& im : imgs) {
            detail::Frame f;
            blocks.push_back(detail::columns(f, im));
            rows += blocks.back().rows();
        }
        QMatrix big(rows, ws.basis.size());
        std::size_t off = 0;
        for (const auto& b : blocks) {
            for (std::size_t i = 0; i < b.rows(); ++i)
                for (std::size_t j = 0; j < b.cols(); ++j) big(off + i, j) = b(i, j);
            off += b.rows();
        }
        auto ker = nullspace(big);
        if (ker.empty()) continue;
        GradedVec v;
        for (std::size_t j = 0; j < ws.basis.size(); ++j)
            for (const auto& [r, w] : ws.basis[j].parts) v.add(r, ker.front()[j], w);
        res.vector = v;
        res.key = ws.key;
        res.r = ws.r;
        return res;
    }
    return res;
}

struct CentralReport {
    std::size_t elements = 0;
    std::size_t acting_nonzero = 0;
    std::size_t injectivity_failures = 0;
    std::size_t inverse_checked = 0;
    std::size_t inverse_failures = 0;
    std::size_t proportionality_failures = 0;
    std::vector<std::pair<Monomial, Q>> ratios;  // z_2 = k z_1 in degrees with two nonzero directions
    std::vector<std::optional<Q>> zero_degree_scalars;  // K_i, when acting by one scalar
    std::vector<std::pair<Monomial, std::size_t>> nonzero;  // (degree, axis) of t^m K_i acting nonzero
    std::string witness;
    bool ok() const { return injectivity_failures == 0 && inverse_failures == 0 && proportionality_failures == 0; }
};

/// Central operators t^m K_i (i off the pivot of m) with |m|_inf <= bound on the weight spaces in the window.
inline CentralReport check_central_operators(const TauModule& mod, long bound, long window) {
    CentralReport rep;
    const auto& tau = mod.algebra();
    const std::size_t n = static_cast<std::size_t>(tau.n());
    auto spaces = mod.weight_spaces(window);
    std::map<std::pair<std::vector<long>, Monomial>, std::vector<std::size_t>> by_weight;
    for (std::size_t s = 0; s < spaces.size(); ++s) by_weight[{spaces[s].key, spaces[s].r}].push_back(s);
    auto fail = [&](std::size_t& counter, const std::string& w) {
        if (counter++ == 0 && rep.witness.empty()) rep.witness = w;
    };
    // zero-degree scalars
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<Q> scalar;
        bool one = true;
        for (const auto& ws : spaces)
            for (const auto& b : ws.basis) {
                auto y = mod.act(tau.K(i), b);
                if (!y) continue;
                Q c = 0;
                if (!y->is_zero()) {
                    const auto& [r, w] = *b.parts.begin();
                    std::size_t g = 0;
                    while (is_zero(w[g])) ++g;
                    auto it = y->parts.find(r);
                    c = it == y->parts.end() ? Q(0) : it->second[g] / w[g];
                }
                GradedVec cb;
                for (const auto& [r, w] : b.parts) cb.add(r, c, w);
                if (*y != cb || (scalar && *scalar != c)) one = false;
                scalar = c;
            }
        rep.zero_degree_scalars.push_back(one ? scalar : std::nullopt);
    }
    for (const auto& m : tau.degrees(bound)) {
        int p = pivot_axis(m);
        std::vector<std::vector<GradedVec>> actions;
        std::vector<std::size_t> axes;
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<int>(i) == p) continue;
            TauElement z = tau.K(i, m);
            ++rep.elements;
            std::vector<GradedVec> col;
            bool any = false, vacuous = false;
            for (const auto& ws : spaces)
                for (const auto& b : ws.basis) {
                    auto y = mod.act(z, b);
                    if (!y) {
                        vacuous = true;
                        col.emplace_back();
                        continue;
                    }
                    any = any || !y->is_zero();
                    col.push_back(std::move(*y));
                }
            if (!any || vacuous) continue;
            ++rep.acting_nonzero;
            rep.nonzero.push_back({m, i});
            actions.push_back(col);
            axes.push_back(i);
            // injectivity and inverse per weight space
            std::size_t base = 0;
            std::vector<std::size_t> starts;
            for (const auto& ws : spaces) {
                starts.push_back(base);
                base += ws.basis.size();
            }
            for (std::size_t s = 0; s < spaces.size(); ++s) {
                const auto& ws = spaces[s];
                std::vector<GradedVec> imgs(col.begin() + static_cast<long>(starts[s]), col.begin() + static_cast<long>(starts[s] + ws.basis.size()));
                detail::Frame f;
                QMatrix zm = detail::columns(f, imgs);
                if (rank(zm) != ws.basis.size()) {
                    fail(rep.injectivity_failures, z.str() + " has a kernel at r = " + vec_str(ws.basis.front()));
                    continue;
                }
                // inverse on the target space when it lies in the window with matching dimension
                auto tgt = by_weight.find({ws.key, ws.r + mod.loop_part(m)});
                if (tgt == by_weight.end() || tgt->second.size() != 1 || tgt->second.size() != by_weight[{ws.key, ws.r}].size()) continue;
                const auto& ts = spaces[tgt->second.front()];
                if (ts.component != ws.component || ts.basis.size() != ws.basis.size()) continue;
                detail::Frame tf;
                QMatrix tb = detail::columns(tf, ts.basis);
                QMatrix zc(ts.basis.size(), ws.basis.size());
                bool expressible = true;
                for (std::size_t a = 0; a < imgs.size() && expressible; ++a) {
                    detail::Frame probe = tf;
                    QMatrix col1 = detail::columns(probe, {imgs[a]});
                    if (probe.index.size() != tf.index.size()) {
                        expressible = false;
                        break;
                    }
                    std::vector<Q> rhs(col1.rows());
                    for (std::size_t t = 0; t < rhs.size(); ++t) rhs[t] = col1(t, 0);
                    auto x = solve(tb, rhs);
                    if (!x) {
                        expressible = false;
                        break;
                    }
                    for (std::size_t t = 0; t < x->size(); ++t) zc(t, a) = (*x)[t];
                }
                ++rep.inverse_checked;
                auto T = expressible ? inverse(zc) : std::nullopt;
                if (!T || !((*T) * zc == QMatrix::identity(zc.rows())) || !(zc * (*T) == QMatrix::identity(zc.rows())))
                    fail(rep.inverse_failures, "no inverse for " + z.str());
            }
        }
        // at most one independent nonzero direction per degree
        if (actions.size() >= 2) {
            std::vector<GradedVec> flat;
            for (const auto& col : actions) {
                GradedVec all;
                for (std::size_t k = 0; k < col.size(); ++k) {
                    // tag each basis vector by shifting into a private slot of the frame
                    for (const auto& [r, w] : col[k].parts) {
                        Monomial tagged = r;
                        tagged.push_back(static_cast<long>(k));
                        all.add(tagged, Q(1), w);
                    }
                }
                flat.push_back(std::move(all));
            }
            detail::Frame f;
            QMatrix mm = detail::columns(f, flat);
            if (rank(mm) > 1) {
                fail(rep.proportionality_failures, "independent central operators in one degree");
            } else {
                QMatrix two = detail::columns(f, {flat[0], flat[1]});
                for (std::size_t t = 0; t < two.rows(); ++t)
                    if (!is_zero(two(t, 0))) {
                        rep.ratios.push_back({m, two(t, 1) / two(t, 0)});
                        break;
                    }
            }
        }
    }
    return rep;
}

struct AnnihilationReport {
    std::size_t checked = 0;
    std::size_t vacuous = 0;
    std::size_t failures = 0;
    std::string witness;
    bool ok() const { return failures == 0; }
};

/// Coefficients of prod_i (t - a_i), constant term first.
inline std::vector<Q> vanishing_polynomial(const std::vector<Q>& roots) {
    std::vector<Q> c{Q(1)};
    for (const auto& a : roots) {
        std::vector<Q> next(c.size() + 1, Q(0));
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= a * c[k];
        }
        c = std::move(next);
    }
    return c;
}

/// G' (x) I acts as zero on V(psi), I generated by the per-axis vanishing polynomials of the grid.
/// Elements X (x) p_j t^s with |s|_inf <= shift_bound; affine targets also use t_1^k, |k| <= 1, and C (x) p_j t^s.
inline AnnihilationReport check_ideal_annihilation(const LoopModule& mod, long shift_bound) {
    AnnihilationReport rep;
    const auto& grid = mod.spec().grid;
    const auto& T = mod.tensor();
    const std::size_t loops = grid.n();
    auto shifts = degree_box(loops, shift_bound);
    std::vector<long> ks = T.affine() ? std::vector<long>{-1, 0, 1} : std::vector<long>{0};
    auto basis = sl_basis(static_cast<std::size_t>(mod.spec().d + 1));
    for (std::size_t j = 0; j < loops; ++j) {
        auto p = vanishing_polynomial(grid.axes()[j]);
        for (const auto& s : shifts) {
            std::vector<std::pair<Q, Monomial>> terms;
            for (std::size_t e = 0; e < p.size(); ++e)
                if (!is_zero(p[e])) {
                    Monomial m = s;
                    m[j] += static_cast<long>(e);
                    terms.push_back({p[e], m});
                }
            for (std::size_t g = 0; g < T.dim(); ++g) {
                Vec v = T.unit(g);
                for (long k : ks)
                    for (const auto& X : basis) {
                        Vec sum(T.dim(), Q(0));
                        bool vac = false;
                        for (const auto& [c, m] : terms) {
                            auto y = T.apply(X, k, mod.coefficients(m), v);
                            if (!y) {
                                vac = true;
                                break;
                            }
                            axpy(sum, c, *y);
                        }
                        if (vac) {
                            ++rep.vacuous;
                            continue;
                        }
                        ++rep.checked;
                        if (!is_zero_vec(sum) && rep.failures++ == 0) rep.witness = "X (x) p_" + std::to_string(j + 1) + " on basis vector " + std::to_string(g);
                    }
                if (T.affine()) {
                    Q sum = 0;
                    for (const auto& [c, m] : terms) sum += c * T.level(mod.coefficients(m));
                    ++rep.checked;
                    if (!is_zero(sum) && rep.failures++ == 0) rep.witness = "C (x) p_" + std::to_string(j + 1);
                }
            }
        }
    }
    return rep;
}

struct DecompositionReport {
    std::size_t components = 0;
    Z index = 0;
    bool spans = true;
    bool direct = true;
    std::string witness;
    bool ok() const { return spans && direct && Z(static_cast<long>(components)) == index; }
};

/// V(psi)_mu = direct sum over cosets c of W_{mu, c}.
inline DecompositionReport check_decomposition(const LoopModule& mod) {
    DecompositionReport rep;
    rep.components = mod.component_count();
    rep.index = mod.degenerate() ? Z(1) : mod.gamma().index;
    if (mod.degenerate()) return rep;
    for (const auto& [key, idx] : mod.weight_blocks()) {
        std::vector<Vec> all;
        for (std::size_t c = 0; c < mod.component_count(); ++c)
            for (const auto& w : mod.coset_space(key, c)) all.push_back(w);
        QMatrix m(mod.tensor().dim(), all.size());
        for (std::size_t a = 0; a < all.size(); ++a)
            for (std::size_t t = 0; t < mod.tensor().dim(); ++t) m(t, a) = all[a][t];
        std::size_t rk = rank(m);
        if (rk != all.size()) {
            rep.direct = false;
            if (rep.witness.empty()) rep.witness = "coset spaces overlap";
        }
        if (rk != idx.size()) {
            rep.spans = false;
            if (rep.witness.empty()) rep.witness = "coset spaces do not span a weight space";
        }
    }
    return rep;
}

struct ClosureReport {
    std::size_t checked = 0;
    std::size_t vacuous = 0;
    std::size_t failures = 0;
    std::string witness;
    bool ok() const { return failures == 0; }
};

/// Each component U v(m) is stable under the given operators.
inline ClosureReport check_component_closure(const LoopModule& mod, const std::vector<TauElement>& ops, long window) {
    ClosureReport rep;
    for (std::size_t c = 0; c < mod.component_count(); ++c)
        for (const auto& ws : mod.component_spaces(window, c))
            for (const auto& b : ws.basis)
                for (const auto& x : ops) {
                    auto y = mod.act(x, b);
                    if (!y) {
                        ++rep.vacuous;
                        continue;
                    }
                    ++rep.checked;
                    if (!mod.in_component(*y, c) && rep.failures++ == 0) rep.witness = x.str() + " leaves component " + std::to_string(c);
                }
    return rep;
}

/// dim of each weight space (tensor key, r) of one component.
inline std::map<std::pair<std::vector<long>, Monomial>, std::size_t> graded_dimensions(const LoopModule& mod, std::size_t c, long window) {
    std::map<std::pair<std::vector<long>, Monomial>, std::size_t> out;
    for (const auto& ws : mod.component_spaces(window, c)) out[{ws.key, ws.r}] = ws.basis.size();
    return out;
}

} // namespace toroidal
