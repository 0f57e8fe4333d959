#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "toroidal/evaluation.hpp"

using namespace toroidal;
using namespace testsupport;

namespace {

Grid random_grid(std::mt19937_64& rng, const std::vector<std::size_t>& shape) {
    Grid g;
    for (auto Nj : shape) {
        std::set<Q> seen;
        std::vector<Q> axis;
        while (axis.size() < Nj) {
            Q a = small_rational(rng, 6);
            if (a == 0 || !seen.insert(a).second) continue;
            axis.push_back(a);
        }
        g.push_back(axis);
    }
    return g;
}

LoopElement random_loop(std::mt19937_64& rng, std::size_t size, std::size_t n, long range, int terms) {
    LoopElement u;
    for (int k = 0; k < terms; ++k) loop_add(u, random_degree(rng, static_cast<int>(n), range), random_traceless(rng, size));
    return u;
}

bool same(const std::vector<MatrixG>& a, const std::vector<MatrixG>& b) { return a == b; }

} // namespace

TEST_CASE("grid matrix for one axis is the Vandermonde matrix") {
    PointGrid g({{Q(1), Q(2), Q(-3)}});
    auto gm = build_grid_matrix(g);
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t i = 0; i < 3; ++i) CHECK(gm.X(p, i) == qpow(g.point(0, i), static_cast<long>(p)));
    CHECK(det(gm.X) == oracles::det_laplace(gm.X));
    CHECK(det(gm.X) == (Q(2) - 1) * (Q(-3) - 1) * (Q(-3) - 2));

    auto one = build_grid_matrix(PointGrid({{Q(5)}, {frac(1, 2)}}));
    CHECK(one.X == QMatrix::identity(1));
}

TEST_CASE("grid matrix for points (1,2) x (1,3)") {
    PointGrid g({{Q(1), Q(2)}, {Q(1), Q(3)}});
    auto gm = build_grid_matrix(g);
    REQUIRE(gm.X.rows() == 4);
    // rows m = 00, 01, 10, 11; columns I = 11, 12, 21, 22
    QMatrix expect = QMatrix::from_rows({{Q(1), Q(1), Q(1), Q(1)},
                                         {Q(1), Q(3), Q(1), Q(3)},
                                         {Q(1), Q(1), Q(2), Q(2)},
                                         {Q(1), Q(3), Q(2), Q(6)}});
    CHECK(gm.X == expect);
    Q dl = oracles::det_laplace(gm.X);
    CHECK(dl != 0);
    CHECK(det(gm.X) == dl);
    CHECK(gm.unpermuted_product() == gm.X);
    CHECK(gm.factors.size() == 3);
}

TEST_CASE("factorization and determinant on random grids") {
    std::mt19937_64 rng(41);
    std::vector<std::vector<std::size_t>> shapes = {{3}, {2, 2}, {2, 3}, {3, 2}, {1, 4}, {2, 1, 3}, {2, 2, 2}, {3, 1, 2}, {4, 3}, {2, 3, 2}};
    for (const auto& shape : shapes) {
        Grid axes = random_grid(rng, shape);
        auto gm = build_grid_matrix(PointGrid(axes));
        Q dx = det(gm.X);
        CHECK(dx != 0);
        CHECK(dx == oracles::det_grid_closed_form(axes));
        if (gm.X.rows() <= 8) CHECK(dx == oracles::det_laplace(gm.X));
        CHECK(gm.unpermuted_product() == gm.X);
        // permutation bookkeeping is a bijection
        std::set<std::size_t> pts(gm.point_perm.begin(), gm.point_perm.end()), pws(gm.power_perm.begin(), gm.power_perm.end());
        CHECK(pts.size() == gm.X.rows());
        CHECK(pws.size() == gm.X.rows());
    }
}

TEST_CASE("entries of the iterated product are single monomials") {
    // symbolic points: variable 2j + i stands for a_{j,i}
    const std::size_t n = 3;
    using PM = Matrix<LaurentPoly>;
    auto var = [](std::size_t j, std::size_t i) { return LaurentPoly::variable(6, 2 * j + i); };
    auto vand = [&](std::size_t j) {
        PM a(2, 2);
        for (std::size_t i = 0; i < 2; ++i) {
            a(i, 0) = LaurentPoly(1);
            a(i, 1) = var(j, i);
        }
        return a;
    };
    // reuse the numeric builder for the permutation pattern
    auto gm = build_grid_matrix(PointGrid({{Q(2), Q(3)}, {Q(5), Q(7)}, {Q(11), Q(13)}}));
    PM prod = PM::identity(8);
    for (const auto& f : gm.factors) {
        PM m(8, 8);
        if (f.kind == GridFactor::permutation) {
            for (std::size_t k = 0; k < 8; ++k) m(k, f.sigma[k]) = LaurentPoly(1);
        } else {
            PM a = vand(f.axis);
            for (std::size_t blk = 0; blk < 4; ++blk)
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j) m(blk * 2 + i, blk * 2 + j) = a(i, j);
        }
        prod = prod * m;
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) {
            const auto& terms = prod(r, c).terms();
            REQUIRE(terms.size() == 1);
            const auto& [mono, coef] = *terms.begin();
            CHECK(coef == 1);
            Monomial e(6, 0);
            std::copy(mono.begin(), mono.end(), e.begin());
            // one point per axis, exponent j_k - 1 in {0, 1}
            std::vector<std::size_t> I(n), pw(n);
            for (std::size_t j = 0; j < n; ++j) {
                long e0 = e[2 * j], e1 = e[2 * j + 1];
                CHECK(e0 >= 0);
                CHECK(e1 >= 0);
                CHECK(e0 + e1 <= 1);
                I[j] = e1 > 0 ? 1 : 0;
                pw[j] = static_cast<std::size_t>(e0 + e1);
            }
            auto ip = gm.grid.index(gm.point_perm[r]);
            auto pp = gm.grid.index(gm.power_perm[c]);
            for (std::size_t j = 0; j < n; ++j) {
                if (pw[j]) CHECK(I[j] == ip[j]);
                CHECK(pw[j] == pp[j]);
            }
            seen.insert({gm.point_perm[r], gm.power_perm[c]});
        }
    CHECK(seen.size() == 64);
}

TEST_CASE("evaluation map") {
    PointGrid single({{Q(1)}, {Q(1)}});
    EvalHom h1(single);
    MatrixG X = MatrixG::from_rows({{Q(1), Q(2)}, {Q(3), Q(-1)}});
    for (long a = -2; a <= 2; ++a) {
        LoopElement u{{Monomial{a, -a}, X}};
        auto img = phi_apply(h1, u, 2);
        REQUIRE(img.size() == 1);
        CHECK(img[0] == X);
    }
    EvalHom h2(PointGrid({{Q(1), Q(2)}}));
    auto img = phi_apply(h2, LoopElement{{Monomial{1}, X}}, 2);
    CHECK(img == std::vector<MatrixG>{X, Q(2) * X});

    std::mt19937_64 rng(17);
    EvalHom h3(PointGrid({{Q(1), frac(-1, 2)}, {Q(3), Q(2), Q(-1)}}));
    for (int trial = 0; trial < 200; ++trial) {
        auto u = random_loop(rng, 3, 2, 3, 2), v = random_loop(rng, 3, 2, 3, 2);
        auto pu = phi_apply(h3, u, 3), pv = phi_apply(h3, v, 3);
        std::vector<MatrixG> comp;
        for (std::size_t k = 0; k < pu.size(); ++k) comp.push_back(commutator(pu[k], pv[k]));
        CHECK(same(phi_apply(h3, loop_bracket(u, v), 3), comp));
    }
}

TEST_CASE("preimage") {
    std::mt19937_64 rng(23);
    PointGrid g({{Q(2), frac(1, 3)}, {Q(-1), Q(4), Q(5)}});
    EvalHom h(g);
    auto T = g.box();
    std::set<Monomial> box(T.begin(), T.end());
    for (int trial = 0; trial < 30; ++trial) {
        LoopElement u;
        for (const auto& m : T)
            if (rng() % 2) loop_add(u, m, random_traceless(rng, 2));
        auto img = phi_apply(h, u, 2);
        CHECK(phi_preimage(h, img) == u);
        CHECK(h.preimage_dense(img) == u);
    }
    // interpolant for (X, 0, ..., 0)
    MatrixG X = MatrixG::from_rows({{Q(0), Q(1)}, {Q(0), Q(0)}});
    std::vector<MatrixG> target(g.N(), MatrixG(2, 2));
    target[0] = X;
    auto u = phi_preimage(h, target);
    for (const auto& [m, Y] : u) CHECK(box.count(m) == 1);
    CHECK(phi_apply(h, u, 2) == target);
    // reduce-mod-I agreement on sampled degrees
    for (int trial = 0; trial < 30; ++trial) {
        auto w = random_loop(rng, 2, 2, 12, 3);
        CHECK(phi_preimage(h, phi_apply(h, w, 2)) == reduce_loop(w, g));
    }
    EvalHom h1(PointGrid({{Q(3)}}));
    CHECK(phi_preimage(h1, {X}) == LoopElement{{Monomial{0}, X}});
}

TEST_CASE("quotient isomorphism check") {
    CHECK(quotient_iso_check(EvalHom(PointGrid({{Q(1), Q(2)}, {Q(-1), frac(1, 2)}})), 2));
    CHECK(quotient_iso_check(EvalHom(PointGrid({{Q(7)}})), 3));
    auto rep = quotient_iso_check(PointGrid({{Q(1), Q(2), Q(3)}}), 2, 6);
    CHECK(rep.ok);
    CHECK(rep.rank_on_T == 9);
    auto bad = quotient_iso_check(PointGrid::unvalidated({{Q(1), Q(1)}, {Q(2)}}), 2, 2);
    CHECK_FALSE(bad.ok);
    CHECK(bad.rank_on_T < bad.expected);
    CHECK_THROWS_AS(PointGrid({{Q(1), Q(1)}}), invalid_grid);
    CHECK_THROWS_AS(EvalHom(PointGrid({{Q(0), Q(1)}})), invalid_grid);
}

TEST_CASE("phi prime") {
    ToroidalAlgebra tau(1, 2);
    auto z = phi_prime(tau.K(0, Monomial{0, 5}));
    REQUIRE(z.c.size() == 1);
    CHECK(z.c.at(Monomial{5}) == 1);
    CHECK(z.g.empty());
    CHECK(phi_prime(tau.K(1, Monomial{3, 1})).is_zero());
    CHECK(phi_prime(tau.K(0, Monomial{3, 1})).is_zero());
    CHECK(phi_prime(tau.K(1)).is_zero());
    auto d2 = phi_prime(tau.dd(1));
    CHECK(d2.dpart == std::vector<Q>{Q(0), Q(1)});

    auto b = tau.basis(2);
    std::size_t checked = 0;
    for (const auto& x : b)
        for (const auto& y : b) {
            CHECK(phi_prime(bracket(x, y)) == bracket(phi_prime(x), phi_prime(y)));
            ++checked;
        }
    CHECK(checked == b.size() * b.size());
}
