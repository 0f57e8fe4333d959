#include <catch_amalgamated.hpp>

#include <random>

#include "toroidal/lattice.hpp"
#include "toroidal/laurent.hpp"

using namespace toroidal;

namespace {

IntVec iv(std::initializer_list<long> xs) {
    IntVec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

// number of classes of Z^2 / L by pairwise membership tests over a box
long coset_count_2d(const std::vector<IntVec>& basis, long box) {
    std::vector<IntVec> reps;
    for (long x = 0; x < box; ++x)
        for (long y = 0; y < box; ++y) {
            IntVec p = iv({x, y});
            bool found = false;
            for (const auto& r : reps) {
                IntVec diff = {p[0] - r[0], p[1] - r[1]};
                if (lattice_coordinates(basis, diff)) {
                    found = true;
                    break;
                }
            }
            if (!found) reps.push_back(p);
        }
    return static_cast<long>(reps.size());
}

// remainder of t^k by a monic polynomial given low-to-high, by schoolbook division
std::vector<Q> long_division_remainder(long k, const std::vector<Q>& monic) {
    std::vector<Q> num(k + 1, Q(0));
    num[k] = 1;
    const std::size_t deg = monic.size() - 1;
    for (long top = k; top >= static_cast<long>(deg); --top) {
        Q c = num[top];
        if (c == 0) continue;
        for (std::size_t i = 0; i <= deg; ++i) num[top - deg + i] -= c * monic[i];
    }
    num.resize(deg);
    return num;
}

LaurentPoly random_poly(std::mt19937_64& rng, std::size_t n, int terms, long range) {
    std::uniform_int_distribution<long> e(-range, range), c(-5, 5);
    LaurentPoly p;
    for (int k = 0; k < terms; ++k) {
        Monomial m(n);
        for (auto& x : m) x = e(rng);
        p.add_term(m, Q(c(rng)));
    }
    return p;
}

} // namespace

TEST_CASE("rationals parse and print exactly") {
    CHECK(parse_rational("6/4") == frac(3, 2));
    CHECK(parse_rational("-7") == Q(-7));
    CHECK(to_string(frac(-3, 9)) == "-1/3");
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("1.5"));
    CHECK_THROWS(parse_rational("1/-2"));
}

TEST_CASE("hermite normal form on fixed inputs") {
    auto h = hermite_normal_form({iv({2, 0}), iv({0, 3})});
    REQUIRE(h.basis.size() == 2);
    CHECK(h.basis[0] == iv({2, 0}));
    CHECK(h.basis[1] == iv({0, 3}));

    auto g = hermite_normal_form({iv({2, 4}), iv({4, 2})});
    REQUIRE(g.basis.size() == 2);
    CHECK(lattice_index(g.basis, 2) == 12);
    CHECK(coset_count_2d(g.basis, 12) == 12);
    CHECK(g.basis[0][0] > 0);
    CHECK(g.basis[1][1] > 0);
    CHECK(g.basis[0][1] >= 0);
    CHECK(g.basis[0][1] < g.basis[1][1]);

    CHECK(hermite_normal_form({}).basis.empty());
    CHECK(hermite_normal_form({iv({0, 0}), iv({0, 0})}).basis.empty());
    CHECK_THROWS_AS(hermite_normal_form({iv({1, 2}), iv({1})}), dimension_error);
}

TEST_CASE("hermite normal form spans the input lattice") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> e(-6, 6), cnt(1, 5), dim(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = static_cast<std::size_t>(dim(rng));
        std::vector<IntVec> gens;
        for (long k = cnt(rng); k > 0; --k) {
            IntVec v(n);
            for (auto& x : v) x = e(rng);
            gens.push_back(v);
        }
        auto h = hermite_normal_form(gens, n);
        for (const auto& g : gens) CHECK(lattice_coordinates(h.basis, g).has_value());
        // U * G reproduces the basis rows and U is unimodular
        IntMatrix u = h.transform;
        CHECK(abs(det(u)) == 1);
        IntMatrix prod = u * IntMatrix::from_rows(gens);
        for (std::size_t i = 0; i < h.basis.size(); ++i) CHECK(prod.row(i) == h.basis[i]);
        for (std::size_t i = h.basis.size(); i < gens.size(); ++i) CHECK(is_zero_vec(prod.row(i)));
    }
}

TEST_CASE("complete to unimodular") {
    CHECK(complete_to_unimodular({iv({1, 0, 0})}, 3) == IntMatrix::identity(3));
    CHECK(complete_to_unimodular({iv({1, 0}), iv({0, 1})}, 2) == IntMatrix::identity(2));

    IntMatrix b = complete_to_unimodular({iv({2, 1})}, 2);
    CHECK(abs(det(b)) == 1);
    CHECK(b * iv({2, 1}) == iv({1, 0}));

    CHECK_THROWS_AS(complete_to_unimodular({iv({1, 2}), iv({2, 4})}, 2), rank_error);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> e(-9, 9);
    int built = 0;
    for (int trial = 0; trial < 300; ++trial) {
        IntVec s = iv({e(rng), e(rng), e(rng)});
        if (gcd_of(s) != 1) continue;
        IntMatrix m = complete_to_unimodular({s}, 3);
        CHECK(abs(det(m)) == 1);
        CHECK(m * s == iv({1, 0, 0}));
        ++built;
    }
    CHECK(built > 100);
}

TEST_CASE("reduction modulo the grid ideal") {
    Grid one = {{Q(1), Q(2)}};
    LaurentPoly t2(Monomial{2}, Q(1));
    LaurentPoly expect = LaurentPoly(Monomial{1}, Q(3)) + LaurentPoly(Q(-2));
    CHECK(laurent_reduce_mod_ideal(t2, one) == expect);
    CHECK(laurent_reduce_mod_ideal(LaurentPoly(Monomial{0}, Q(1)), one) == LaurentPoly(Q(1)));
    CHECK(laurent_reduce_mod_ideal(LaurentPoly(Monomial{-1}, Q(1)), {{Q(1)}}) == LaurentPoly(Q(1)));

    CHECK_THROWS_AS(laurent_reduce_mod_ideal(t2, {{Q(1), Q(1)}}), invalid_grid);
    CHECK_THROWS_AS(laurent_reduce_mod_ideal(t2, {{Q(0), Q(1)}}), invalid_grid);

    // schoolbook division oracle on positive powers
    Grid g3 = {{Q(2), frac(-1, 3), Q(5)}};
    std::vector<Q> monic = {Q(1)};
    for (const auto& a : g3[0]) {
        std::vector<Q> next(monic.size() + 1, Q(0));
        for (std::size_t i = 0; i < monic.size(); ++i) {
            next[i + 1] += monic[i];
            next[i] -= a * monic[i];
        }
        monic = next;
    }
    for (long k = 0; k < 12; ++k) {
        auto rem = long_division_remainder(k, monic);
        LaurentPoly r = laurent_reduce_mod_ideal(LaurentPoly(Monomial{k}, Q(1)), g3);
        for (long j = 0; j < 3; ++j) CHECK(r.coeff(Monomial{j}) == rem[j]);
    }
}

TEST_CASE("reduction is multiplicative and agrees at grid points") {
    std::mt19937_64 rng(2024);
    Grid g = {{Q(1), Q(-2), frac(1, 2)}, {Q(3), Q(-1)}};
    for (int trial = 0; trial < 60; ++trial) {
        LaurentPoly p = random_poly(rng, 2, 4, 5), q = random_poly(rng, 2, 4, 5);
        LaurentPoly rp = laurent_reduce_mod_ideal(p, g);
        LaurentPoly rq = laurent_reduce_mod_ideal(q, g);
        CHECK(laurent_reduce_mod_ideal(p * q, g) == laurent_reduce_mod_ideal(rp * rq, g));
        for (const auto& [m, c] : rp.terms()) {
            for (std::size_t j = 0; j < m.size(); ++j) {
                CHECK(m[j] >= 0);
                CHECK(m[j] < static_cast<long>(g[j].size()));
            }
        }
        for (const auto& a : g[0])
            for (const auto& b : g[1]) CHECK(rp.evaluate({a, b}) == p.evaluate({a, b}));
    }
}

TEST_CASE("graded lex order and Laurent arithmetic") {
    GradedLex lt;
    CHECK(lt(Monomial{1, 0}, Monomial{0, 2}));
    CHECK(lt(Monomial{0, 1}, Monomial{1, 0}));
    CHECK_FALSE(lt(Monomial{1, 0}, Monomial{1}));
    LaurentPoly x = LaurentPoly::variable(2, 0), y = LaurentPoly::variable(2, 1);
    LaurentPoly xinv(Monomial{-1, 0}, Q(1));
    CHECK(x * xinv == LaurentPoly(1));
    CHECK((x + y) * (x - y) == x * x - y * y);
}
