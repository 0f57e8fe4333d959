// One line per acceptance criterion; the exit status is nonzero if any criterion fails.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "support.hpp"
#include "toroidal/automorphisms.hpp"
#include "toroidal/checks.hpp"
#include "toroidal/evaluation.hpp"
#include "toroidal/module_checks.hpp"

using namespace toroidal;
using json = nlohmann::json;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
    std::size_t checks = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        if (pass) detail = what;
        pass = false;
    }
};

Grid random_grid(std::mt19937_64& rng, const std::vector<std::size_t>& shape, long num = 40, long den = 7) {
    std::uniform_int_distribution<long> p(-num, num), q(1, den);
    Grid g;
    for (auto Nj : shape) {
        std::set<Q> seen;
        std::vector<Q> axis;
        while (axis.size() < Nj) {
            Q a = frac(p(rng), q(rng));
            if (a == 0 || !seen.insert(a).second) continue;
            axis.push_back(a);
        }
        g.push_back(axis);
    }
    return g;
}

std::vector<std::vector<std::size_t>> shapes_up_to(std::size_t max_n, std::size_t max_N) {
    std::vector<std::vector<std::size_t>> out;
    std::function<void(std::vector<std::size_t>, std::size_t)> grow = [&](std::vector<std::size_t> s, std::size_t prod) {
        if (!s.empty()) out.push_back(s);
        if (s.size() == max_n) return;
        for (std::size_t k = 1; prod * k <= max_N; ++k) {
            auto t = s;
            t.push_back(k);
            grow(t, prod * k);
        }
    };
    grow({}, 1);
    return out;
}

std::vector<std::vector<long>> dominant_labels(int d, long max_sum) {
    std::vector<std::vector<long>> out{{}};
    for (int i = 0; i < d; ++i) {
        std::vector<std::vector<long>> next;
        for (const auto& l : out) {
            long s = 0;
            for (long x : l) s += x;
            for (long x = 0; s + x <= max_sum; ++x) {
                auto m = l;
                m.push_back(x);
                next.push_back(m);
            }
        }
        out = std::move(next);
    }
    return out;
}

IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
    IntMatrix a = IntMatrix::identity(n);
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    std::uniform_int_distribution<long> f(-2, 2);
    for (int s = 0; s < 6; ++s) {
        std::size_t i = idx(rng), j = idx(rng);
        if (i == j) {
            a.swap_rows(i, (i + 1) % n);
            continue;
        }
        Z c = f(rng);
        for (std::size_t k = 0; k < n; ++k) a(i, k) += c * a(j, k);
    }
    return a;
}

// 1
Verdict bracket_soundness() {
    Verdict v;
    for (auto [d, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}}) {
        auto rep = check_bracket_exhaustive(ToroidalAlgebra(d, n), 2);
        v.checks += rep.pairs + rep.triples;
        v.expect(rep.ok(), rep.witness);
    }
    ToroidalAlgebra tau(2, 3);
    std::mt19937_64 rng(1);
    auto rep = check_bracket_random(tau, 1000, [&] { return testsupport::random_tau(tau, rng); });
    v.checks += rep.triples;
    v.expect(rep.ok() && rep.triples == 1000, rep.witness);
    return v;
}

// 2
Verdict root_identities() {
    Verdict v;
    std::mt19937_64 rng(2);
    for (int d = 1; d <= 3; ++d)
        for (int n = 1; n <= 3; ++n) {
            ToroidalRootSystem rs(d, n);
            const std::size_t D = rs.dim();
            std::vector<WeightVec> basis;
            for (std::size_t i = 0; i < D; ++i) {
                WeightVec w(D);
                w[i] = 1;
                basis.push_back(w);
            }
            const std::string at = " at (d,n)=(" + std::to_string(d) + "," + std::to_string(n) + ")";
            // (lambda, alpha_i) = (a_i^v / a_i) lambda(alpha_i^v)
            for (const auto& lam : basis)
                for (int i = 1; i <= d + n; ++i) {
                    Q eps = rs.colabels()[i - 1] / rs.labels()[i - 1];
                    v.expect(rs.form_dual(lam, rs.alpha(i)) == eps * rs.pair(lam, rs.alpha_vee(i)), "simple root identity" + at);
                }
            // (lambda, gamma) = (gamma, gamma)/2 lambda(gamma^v) on real roots
            std::uniform_int_distribution<long> e(-3, 3);
            for (const auto& a : rs.finite_roots())
                for (int t = 0; t < 4; ++t) {
                    Monomial m(n);
                    for (auto& x : m) x = e(rng);
                    RealRoot g{a, m};
                    WeightVec gam = rs.gamma(g);
                    Q len = rs.form_dual(gam, gam);
                    v.expect(len != 0, "real root of length zero" + at);
                    for (const auto& lam : basis) v.expect(rs.form_dual(lam, gam) == len / 2 * rs.pair(lam, rs.coroot(g)), "real root identity" + at);
                    v.expect(rs.pair(gam, rs.coroot(g)) == 2, "gamma(gamma^v) != 2" + at);
                }
            // pairing table
            v.expect(rs.form_dual(rs.beta(), rs.beta()) == 2, "(beta, beta) != 2" + at);
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j) {
                    Q kron = i == j ? 1 : 0;
                    v.expect(rs.form_dual(rs.delta(i), rs.delta(j)) == 0, "(delta, delta) != 0" + at);
                    v.expect(rs.pair(rs.delta(j), rs.dd(i)) == kron, "delta(d) table" + at);
                    v.expect(rs.pair(rs.w(i), rs.C(j)) == kron, "w(C) table" + at);
                    v.expect(rs.pair(rs.delta(j), rs.C(i)) == 0, "delta(C) table" + at);
                    v.expect(rs.form_dual(rs.w(i), rs.w(j)) == 0, "(w, w) table" + at);
                }
            // invariance under every simple reflection
            for (int i = 1; i <= d + n; ++i)
                for (const auto& lam : basis) {
                    v.expect(rs.simple_reflect(i, rs.simple_reflect(i, lam)) == lam, "s_i^2 != 1" + at);
                    for (const auto& mu : basis)
                        v.expect(rs.form_dual(rs.simple_reflect(i, lam), rs.simple_reflect(i, mu)) == rs.form_dual(lam, mu), "form not W-invariant" + at);
                }
            // pairing matrix of the adapted bases
            std::vector<WeightVec> rows;
            std::vector<CoweightVec> cols;
            for (int i = 1; i <= d; ++i) rows.push_back(rs.alpha(i));
            for (int j = 1; j <= n; ++j) rows.push_back(rs.delta(j));
            for (int j = 1; j <= n; ++j) rows.push_back(rs.w(j));
            for (int i = 1; i <= d; ++i) cols.push_back(rs.alpha_vee(i));
            for (int j = 1; j <= n; ++j) cols.push_back(rs.C(j));
            for (int j = 1; j <= n; ++j) cols.push_back(rs.dd(j));
            QMatrix p(D, D);
            for (std::size_t i = 0; i < D; ++i)
                for (std::size_t j = 0; j < D; ++j) p(i, j) = rs.pair(rows[i], cols[j]);
            Q dp = det(p);
            v.expect(dp != 0 && dp == oracles::det_laplace(p), "pairing matrix singular" + at);
        }
    return v;
}

// 3
Verdict grid_factorization() {
    Verdict v;
    std::mt19937_64 rng(3);
    std::size_t grids = 0;
    for (const auto& shape : shapes_up_to(3, 36)) {
        Grid axes = random_grid(rng, shape);
        PointGrid grid(axes);
        std::string at = " on a grid with N = " + std::to_string(grid.N());
        EvalHom hom(grid);
        const auto& gm = hom.grid_matrix();
        Q dx = det(gm.X);
        Q oracle = grid.N() <= 8 ? oracles::det_laplace(gm.X) : oracles::det_grid_closed_form(axes);
        v.expect(dx != 0, "singular grid matrix" + at);
        v.expect(dx == oracle, "determinant differs from the oracle" + at);
        v.expect(gm.unpermuted_product() == gm.X, "factor product differs from X" + at);
        std::vector<MatrixG> target(grid.N());
        for (auto& t : target) t = testsupport::random_traceless(rng, 2);
        v.expect(phi_apply(hom, phi_preimage(hom, target), 2) == target, "Phi(preimage(y)) != y" + at);
        auto q = quotient_iso_check(grid, 2, 1);
        v.expect(q.ok && q.rank_on_T == 3 * grid.N(), "quotient check failed" + at + ": " + q.failure);
        ++grids;
    }
    bool rejected = false;
    try {
        PointGrid({{Q(1), Q(1)}});
    } catch (const invalid_grid& e) {
        rejected = std::string(e.what()) == "distinct nonzero points required";
    }
    v.expect(rejected, "repeated point accepted");
    v.detail = v.pass ? std::to_string(grids) + " grids" : v.detail;
    return v;
}

// 4
Verdict finite_modules() {
    Verdict v;
    std::size_t count = 0;
    for (int d : {1, 2})
        for (const auto& l : dominant_labels(d, 4)) {
            auto m = build_finite_irreducible(d, l);
            auto fr = oracles::Freudenthal::finite(d, l);
            v.expect(Q(static_cast<long>(m.dim())) == oracles::weyl_dimension(l), "dimension differs from Weyl's formula");
            std::size_t total = 0;
            for (std::size_t w = 0; w < m.weight_count(); ++w) {
                v.expect(static_cast<long>(m.weight_dim(w)) == fr.mult(m.key(w)), "multiplicity differs from Freudenthal");
                total += static_cast<std::size_t>(fr.mult(m.key(w)));
            }
            v.expect(total == m.dim(), "oracle multiplicities do not sum to the dimension");
            ++count;
        }
    v.detail = v.pass ? std::to_string(count) + " highest weights" : v.detail;
    return v;
}

// 5
Verdict example_41() {
    Verdict v;
    PsiSpec spec;
    spec.d = 1;
    spec.grid = PointGrid({{Q(1), Q(-1)}, {Q(1)}});
    spec.labels = {{1}, {1}};
    auto m = build_example_41(spec);
    const auto& tau = m->algebra();
    auto ops = tau.basis(2);
    auto vecs = m->basis(2);
    auto ax = check_module_axiom(*m, ops, vecs);
    v.checks += ax.checked;
    v.expect(ax.ok() && ax.vacuous == 0, "module axiom: " + ax.witness);
    for (const auto& x : ops)
        if (x.g.empty() && is_zero_vec(x.dpart))
            for (const auto& w : vecs) v.expect(m->act(x, w)->is_zero(), "center acts nonzero: " + x.str());
    auto ann = check_ideal_annihilation(*m, 2);
    v.expect(ann.ok() && ann.vacuous == 0, "ideal annihilation: " + ann.witness);
    auto integ = check_integrability(*m, real_root_vectors(tau, 2), vecs, 16);
    v.expect(integ.all_nilpotent(), "integrability: " + integ.witness);
    auto dec = check_decomposition(*m);
    v.expect(dec.ok(), "decomposition: " + dec.witness);
    v.expect(Z(static_cast<long>(m->component_count())) == m->gamma().index && m->component_count() == 2, "component count differs from the index");
    auto cl = check_component_closure(*m, ops, 1);
    v.expect(cl.ok(), "component closure: " + cl.witness);
    v.detail = v.pass ? std::to_string(ax.checked) + " axiom checks" : v.detail;
    return v;
}

// 6
Verdict example_42() {
    Verdict v;
    PsiSpec spec;
    spec.d = 1;
    spec.affine = true;
    spec.grid = PointGrid({{Q(1)}});
    spec.labels = {{1, 0}};
    auto m = build_example_42(spec, 2, 3);
    const auto& tau = m->algebra();
    auto ops = tau.basis(1);
    auto vecs = m->basis(1);
    auto ax = check_module_axiom(*m, ops, vecs);
    v.checks += ax.checked;
    v.expect(ax.ok() && ax.checked > 0, "module axiom: " + ax.witness);

    // level: K_1 acts by sum_j lambda_j(C) = 1
    for (const auto& w : vecs) {
        v.expect(*m->act(tau.K(0), w) == w, "K_1 does not act by the level");
        for (const auto& deg : tau.degrees(2)) {
            if (deg[0] != 0) v.expect(m->act(tau.K(0, deg), w)->is_zero(), "t^m K_1 with m_1 != 0 acts nonzero");
            v.expect(m->act(tau.K(1, deg), w)->is_zero(), "t^m K_2 acts nonzero");
        }
    }
    auto central = check_central_operators(*m, 1, 1);
    v.expect(central.zero_degree_scalars == std::vector<std::optional<Q>>{Q(1), Q(0)}, "K scalars differ from (1, 0)");

    auto wit = witness_highest_vector(*m, false, 1, 2);
    v.expect(wit.vector.has_value(), "no highest vector found");
    if (wit.vector) {
        for (const auto& x : m->chevalley_ops(true, 2)) {
            auto y = m->act(x, *wit.vector);
            v.expect(y && y->is_zero(), "witness not killed by " + x.str());
        }
    }

    // multiplicities of the depth-3 truncation against Freudenthal
    auto fr = oracles::Freudenthal::affine(1, {1, 0}, 3);
    std::size_t total = 0;
    for (const auto& [key, idx] : m->tensor().weight_blocks()) {
        v.expect(static_cast<long>(idx.size()) == fr.mult(key), "multiplicity differs from Freudenthal");
        total += idx.size();
    }
    std::size_t expected = 0;
    for (long k0 = 0; k0 <= 3; ++k0)
        for (long k1 = 0; k1 <= 12; ++k1) expected += static_cast<std::size_t>(fr.mult({k0, k1}));
    v.expect(total == expected && total == 15, "truncation misses oracle weights");
    v.detail = v.pass ? std::to_string(ax.checked) + " axiom checks, " + std::to_string(total) + " vectors to depth 3" : v.detail;
    return v;
}

// 7
Verdict gamma_machinery() {
    Verdict v;
    PsiSpec spec;
    spec.d = 1;
    spec.grid = PointGrid({{Q(1), Q(-1)}});
    spec.labels = {{1}, {1}};
    auto g = compute_gamma(spec);
    v.expect(g.basis == std::vector<IntVec>{{Z(2)}} && g.index == 2 && g.closed, "Gamma differs from 2Z");
    LoopModule m(spec);
    v.expect(m.component_count() == 2, "expected two components");
    v.expect(check_decomposition(m).ok(), "decomposition fails");

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> nd(1, 2), ne(1, 3), lab(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> shape(static_cast<std::size_t>(nd(rng)));
        for (auto& s : shape) s = static_cast<std::size_t>(ne(rng));
        PsiSpec s;
        s.d = nd(rng);
        s.grid = PointGrid(random_grid(rng, shape, 3, 2));
        for (std::size_t I = 0; I < s.grid.N(); ++I) {
            std::vector<long> l(static_cast<std::size_t>(s.d));
            for (auto& x : l) x = lab(rng);
            s.labels.push_back(l);
        }
        auto gr = compute_gamma(s);
        for (std::size_t j = 0; j < shape.size(); ++j)
            v.expect(gr.periods[j] > 0 && static_cast<long>(shape[j]) % gr.periods[j] == 0, "k_j does not divide N_j on trial " + std::to_string(trial));
    }
    return v;
}

// 8
Verdict automorphism_suite() {
    Verdict v;
    std::mt19937_64 rng(8);
    {
        ToroidalAlgebra tau(1, 2);
        auto basis = tau.basis(2);
        TauAutomorphism a(random_unimodular(rng, 2));
        std::vector<TauElement> img;
        for (const auto& x : basis) img.push_back(a.apply(x));
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = i + 1; j < basis.size(); ++j)
                v.expect(a.apply(bracket(basis[i], basis[j])) == bracket(img[i], img[j]), "bracket not preserved");
    }
    for (int n : {2, 3}) {
        ToroidalAlgebra tau(2, n);
        for (int t = 0; t < 50; ++t) {
            TauAutomorphism a(random_unimodular(rng, static_cast<std::size_t>(n)));
            auto x = testsupport::random_tau(tau, rng), y = testsupport::random_tau(tau, rng);
            v.expect(a.apply(bracket(x, y)) == bracket(a.apply(x), a.apply(y)), "bracket not preserved, n = " + std::to_string(n));
            std::vector<Monomial> expect;
            for (const auto& m : x.degrees()) expect.push_back(a.degree(m));
            std::sort(expect.begin(), expect.end());
            v.expect(a.apply(x).degrees() == expect, "degree not transformed by A");
            auto m = testsupport::random_degree(rng, n, 3);
            TauElement rel = tau.zero();
            for (int i = 0; i < n; ++i) rel += Q(m[i]) * a.apply(tau.K(static_cast<std::size_t>(i), m));
            v.expect(rel.is_zero(), "center relation not preserved");
        }
    }
    // round trip on the action tables of both examples
    PsiSpec fin;
    fin.d = 1;
    fin.grid = PointGrid({{Q(1), Q(-1)}, {Q(1)}});
    fin.labels = {{1}, {1}};
    PsiSpec aff;
    aff.d = 1;
    aff.affine = true;
    aff.grid = PointGrid({{Q(2)}});
    aff.labels = {{1, 0}};
    for (std::shared_ptr<const TauModule> base : {std::shared_ptr<const TauModule>(build_example_41(fin)), std::shared_ptr<const TauModule>(build_example_42(aff, 2, 2))}) {
        TauAutomorphism a(random_unimodular(rng, 2));
        auto back = twist_module(twist_module(base, a), a.inverse());
        for (const auto& x : base->algebra().basis(1))
            for (const auto& w : base->basis(1)) v.expect(back->act(x, w) == base->act(x, w), "twist round trip differs");
    }
    // level normalization
    std::uniform_int_distribution<long> e(-9, 9);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 3), k = static_cast<std::size_t>(t % static_cast<int>(n));
        IntVec kv(n, 0);
        for (std::size_t i = k; i < n; ++i) kv[i] = e(rng);
        auto res = normalize_level_vector(kv, k);
        const auto& A = res.automorphism.matrix();
        IntVec tail(kv.begin() + static_cast<long>(k), kv.end()), want(n, 0);
        want[n - 1] = gcd_of(tail);
        v.expect(abs(det(A)) == 1, "normalization not unimodular");
        v.expect(A * kv == want && res.level == want[n - 1], "normalized vector is not (0, .., 0, gcd)");
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j) v.expect(A(i, j) == (i == j ? 1 : 0) && A(j, i) == (i == j ? 1 : 0), "normalization not block diagonal");
    }
    return v;
}

// 9
int run_cli(const std::string& args, const std::filesystem::path& err) {
    std::string cmd = std::string(TOROIDAL_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json load_without_timing(const std::filesystem::path& p) {
    std::ifstream in(p);
    json r = json::parse(in);
    for (auto& j : r["jobs"]) j.erase("elapsed_us");
    return r;
}

Verdict cli_determinism() {
    Verdict v;
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("toroidal_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << R"({
      "version": 1,
      "algebra": {"type": "A", "rank": 1, "loops": 2},
      "grid": [["1", "-1"], ["1/2"]],
      "weights": [{"basis": "fundamental", "coords": [1]}, {"basis": "fundamental", "coords": [2]}],
      "seed": 17,
      "jobs": [{"job": "verify-bracket", "bound": 1, "random": 25}, {"job": "grid-factorize", "samples": 5}, "gamma",
               {"job": "twist", "matrix": [[2, 1], [1, 1]]}]
    })";
    std::ofstream(dir / "bad.json") << R"({"algebra": {"type": "A", "rank": 1, "loops": 1}, "grid": [["1", "1"]], "jobs": ["grid-factorize"]})";
    const std::string cfg = "--quiet --config " + (dir / "config.json").string();
    int a = run_cli(cfg + " --out " + (dir / "a.json").string(), dir / "err_a");
    int b = run_cli(cfg + " --out " + (dir / "b.json").string(), dir / "err_b");
    v.expect(a == 0 && b == 0, "sample configuration did not pass");
    if (a == 0 && b == 0) v.expect(load_without_timing(dir / "a.json") == load_without_timing(dir / "b.json"), "reports differ for the same seed");
    int bad = run_cli("--config " + (dir / "bad.json").string() + " --out " + (dir / "c.json").string(), dir / "err_c");
    std::ifstream in(dir / "err_c");
    std::stringstream s;
    s << in.rdbuf();
    v.expect(bad == 2, "malformed grid did not exit with 2");
    v.expect(s.str().find("distinct nonzero points required") != std::string::npos, "missing grid diagnostic");
    fs::remove_all(dir);
    return v;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "bracket soundness", 30, bracket_soundness},
        {2, "root data identities", 5, root_identities},
        {3, "grid factorization", 60, grid_factorization},
        {4, "finite modules", 60, finite_modules},
        {5, "finite loop module", 120, example_41},
        {6, "affine loop module", 300, example_42},
        {7, "support lattice", 30, gamma_machinery},
        {8, "automorphisms", 10, automorphism_suite},
        {9, "cli determinism", 60, cli_determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs <= c.limit;
        bool ok = v.pass && in_time;
        failed += !ok;
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(2);
        line << "criterion " << c.id << " (" << c.name << "): " << (ok ? "PASS" : "FAIL") << "  " << secs << " s / " << c.limit << " s";
        if (!v.detail.empty()) line << "  " << v.detail;
        else if (v.checks) line << "  " << v.checks << " checks";
        if (!in_time) line << "  over the time limit";
        std::cout << line.str() << std::endl;
    }
    return failed ? 1 : 0;
}
