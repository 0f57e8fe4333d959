#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>

#include "toroidal/automorphisms.hpp"
#include "toroidal/checks.hpp"
#include "toroidal/evaluation.hpp"
#include "toroidal/module_checks.hpp"

using json = nlohmann::json;
using namespace toroidal;

namespace {

constexpr int report_version = 1;

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& where, const std::string& what) : std::runtime_error(where + ": " + what) {}
};

struct Job {
    std::string name;
    json params;
};

struct Config {
    int d = 1, n = 2;
    std::optional<PointGrid> grid;
    std::optional<PsiSpec> spec;
    long depth = 2;
    std::uint64_t seed = 0;
    std::vector<Job> jobs;
};

struct JobSpec {
    std::string name;
    std::string summary;
    bool needs_module;
    std::vector<std::string> params;
};

const std::vector<JobSpec>& job_table() {
    static const std::vector<JobSpec> t = {
        {"build-tau", "basis sizes of tau up to a degree bound", false, {"bound"}},
        {"verify-bracket", "antisymmetry and Jacobi, exhaustive and seeded random", false, {"bound", "random", "range"}},
        {"grid-factorize", "determinant, block factorization and inverse of the evaluation map", false, {"samples"}},
        {"build-example-41", "loop module over finite sl(d+1), module axiom", true, {"bound", "window"}},
        {"build-example-42", "loop module over affine sl(d+1), module axiom and levels", true, {"bound", "window"}},
        {"gamma", "support lattice, periods and index", true, {}},
        {"decompose-loop", "direct sum decomposition into submodules", true, {"window"}},
        {"integrability", "local nilpotence of real root vectors", true, {"bound", "window", "cap"}},
        {"central-ops", "central operator scalars, injectivity and proportionality", true, {"bound", "window"}},
        {"twist", "module twisted by a GL(n, Z) automorphism", true, {"matrix", "bound", "window"}},
    };
    return t;
}

const JobSpec* find_job(const std::string& name) {
    for (const auto& j : job_table())
        if (j.name == name) return &j;
    return nullptr;
}

long get_int(const json& obj, const std::string& key, long dflt, long lo, long hi, const std::string& where) {
    if (!obj.contains(key)) return dflt;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key, "integer expected");
    long x = v.get<long>();
    if (x < lo || x > hi) throw ConfigError(where + "." + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

void only_keys(const json& obj, const std::vector<std::string>& keys, const std::string& where) {
    for (const auto& [k, v] : obj.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError(where, "unknown key \"" + k + "\"");
}

Q get_rational(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where, "exact fraction string \"p/q\" expected");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    }
}

IntMatrix get_matrix(const json& v, std::size_t n, const std::string& where) {
    if (!v.is_array() || v.size() != n) throw ConfigError(where, std::to_string(n) + " rows expected");
    IntMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = v[i];
        if (!row.is_array() || row.size() != n) throw ConfigError(where, "row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) {
            if (!row[j].is_number_integer()) throw ConfigError(where, "integer entries expected");
            a(i, j) = row[j].get<long>();
        }
    }
    return a;
}

Config parse_config(const json& root) {
    Config c;
    if (!root.is_object()) throw ConfigError("$", "object expected");
    only_keys(root, {"version", "algebra", "grid", "weights", "depth", "seed", "jobs"}, "$");
    if (root.contains("version") && root.at("version") != report_version) throw ConfigError("$.version", "unsupported version");

    if (!root.contains("algebra") || !root.at("algebra").is_object()) throw ConfigError("$.algebra", "object expected");
    const auto& alg = root.at("algebra");
    only_keys(alg, {"type", "rank", "loops"}, "$.algebra");
    if (!alg.contains("type") || alg.at("type") != "A") throw ConfigError("$.algebra.type", "only type \"A\" is supported");
    if (!alg.contains("rank") || !alg.contains("loops")) throw ConfigError("$.algebra", "rank and loops are required");
    c.d = static_cast<int>(get_int(alg, "rank", 1, 1, 6, "$.algebra"));
    c.n = static_cast<int>(get_int(alg, "loops", 2, 1, 6, "$.algebra"));
    c.depth = get_int(root, "depth", 2, 0, 8, "$");
    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned()) throw ConfigError("$.seed", "nonnegative integer expected");
        c.seed = root.at("seed").get<std::uint64_t>();
    }

    if (root.contains("grid")) {
        const auto& g = root.at("grid");
        if (!g.is_array() || g.empty()) throw ConfigError("$.grid", "nonempty list of axes expected");
        Grid axes;
        for (std::size_t j = 0; j < g.size(); ++j) {
            std::string w = "$.grid[" + std::to_string(j) + "]";
            if (!g[j].is_array()) throw ConfigError(w, "list of points expected");
            std::vector<Q> axis;
            for (std::size_t i = 0; i < g[j].size(); ++i) axis.push_back(get_rational(g[j][i], w + "[" + std::to_string(i) + "]"));
            axes.push_back(std::move(axis));
        }
        try {
            c.grid = PointGrid(axes);
        } catch (const invalid_grid& e) {
            throw ConfigError("$.grid", e.what());
        }
    }

    if (root.contains("weights")) {
        if (!c.grid) throw ConfigError("$.weights", "weights need a grid");
        const auto& ws = root.at("weights");
        if (!ws.is_array()) throw ConfigError("$.weights", "list expected");
        PsiSpec spec;
        spec.d = c.d;
        spec.grid = *c.grid;
        std::optional<std::string> basis;
        bool any_d = false;
        std::vector<Q> dvals;
        for (std::size_t I = 0; I < ws.size(); ++I) {
            std::string w = "$.weights[" + std::to_string(I) + "]";
            const auto& x = ws[I];
            if (!x.is_object()) throw ConfigError(w, "object expected");
            only_keys(x, {"basis", "coords", "d"}, w);
            if (!x.contains("basis") || !x.at("basis").is_string()) throw ConfigError(w + ".basis", "basis tag expected");
            std::string b = x.at("basis");
            if (b != "fundamental" && b != "affine-fundamental") throw ConfigError(w + ".basis", "\"fundamental\" or \"affine-fundamental\" expected");
            if (basis && *basis != b) throw ConfigError(w + ".basis", "all weights must use the same basis");
            basis = b;
            if (!x.contains("coords") || !x.at("coords").is_array()) throw ConfigError(w + ".coords", "list of labels expected");
            std::vector<long> labels;
            for (const auto& e : x.at("coords")) {
                if (!e.is_number_integer() || e.get<long>() < 0) throw ConfigError(w + ".coords", "nonnegative integer labels expected");
                labels.push_back(e.get<long>());
            }
            spec.labels.push_back(std::move(labels));
            if (x.contains("d")) {
                any_d = true;
                dvals.push_back(get_rational(x.at("d"), w + ".d"));
            } else {
                dvals.push_back(Q(0));
            }
        }
        spec.affine = basis && *basis == "affine-fundamental";
        if (any_d) {
            if (!spec.affine) throw ConfigError("$.weights", "d-values apply to affine weights only");
            spec.d_values = dvals;
        }
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw ConfigError("$.weights", e.what());
        }
        const int loops = static_cast<int>(c.grid->n()) + (spec.affine ? 1 : 0);
        if (loops != c.n)
            throw ConfigError("$.grid", spec.affine ? "affine weights need loops - 1 grid axes" : "finite weights need one grid axis per loop");
        c.spec = spec;
    }

    if (root.contains("jobs")) {
        const auto& js = root.at("jobs");
        if (!js.is_array()) throw ConfigError("$.jobs", "list expected");
        for (std::size_t k = 0; k < js.size(); ++k) {
            std::string w = "$.jobs[" + std::to_string(k) + "]";
            Job job;
            if (js[k].is_string()) {
                job.name = js[k];
                job.params = json::object();
            } else if (js[k].is_object() && js[k].contains("job") && js[k].at("job").is_string()) {
                job.name = js[k].at("job");
                job.params = js[k];
                job.params.erase("job");
            } else {
                throw ConfigError(w, "job name or {\"job\": name, ...} expected");
            }
            const JobSpec* spec = find_job(job.name);
            if (!spec) throw ConfigError(w, "unknown job \"" + job.name + "\"");
            only_keys(job.params, spec->params, w);
            get_int(job.params, "bound", 1, 0, 3, w);
            get_int(job.params, "window", 1, 0, 3, w);
            get_int(job.params, "random", 0, 0, 100000, w);
            get_int(job.params, "range", 2, 0, 4, w);
            get_int(job.params, "samples", 3, 0, 100, w);
            get_int(job.params, "cap", 16, 1, 64, w);
            if (job.name != "grid-factorize" && c.n < 2) throw ConfigError("$.algebra.loops", "tau needs at least two loop variables");
            if (job.name == "grid-factorize" && !c.grid) throw ConfigError(w, "grid-factorize needs a grid");
            if (spec->needs_module && !c.spec) throw ConfigError(w, "job needs grid and weights");
            if (job.name == "build-example-41" && c.spec->affine) throw ConfigError(w, "build-example-41 needs finite weights");
            if (job.name == "build-example-42" && !c.spec->affine) throw ConfigError(w, "build-example-42 needs affine weights");
            if (job.name == "twist") {
                if (!job.params.contains("matrix")) throw ConfigError(w, "twist needs a matrix");
                try {
                    TauAutomorphism(get_matrix(job.params.at("matrix"), static_cast<std::size_t>(c.n), w + ".matrix"));
                } catch (const not_unimodular& e) {
                    throw ConfigError(w + ".matrix", e.what());
                }
            }
            c.jobs.push_back(std::move(job));
        }
    }
    return c;
}

std::string qs(const Q& q) { return q.get_str(); }

json key_json(const std::vector<long>& k) { return json(k); }

json opt_scalar(const std::optional<Q>& q) { return q ? json(qs(*q)) : json(nullptr); }

struct Outcome {
    bool pass = true;
    json result = json::object();
    std::string witness;

    void require(bool ok, const std::string& w) {
        if (ok) return;
        if (pass) witness = w;
        pass = false;
    }
};

TauElement random_element(const ToroidalAlgebra& tau, std::mt19937_64& rng, long range) {
    std::uniform_int_distribution<long> num(-4, 4), den(1, 3), deg(-range, range);
    std::uniform_int_distribution<int> coin(0, 2), axis(0, tau.n() - 1);
    auto r = [&] { return frac(num(rng), den(rng)); };
    auto m = [&] {
        Monomial x(static_cast<std::size_t>(tau.n()));
        for (auto& e : x) e = deg(rng);
        return x;
    };
    TauElement x = tau.zero();
    for (int k = 0; k < 2; ++k) {
        MatrixG g(tau.size(), tau.size());
        for (std::size_t i = 0; i < tau.size(); ++i)
            for (std::size_t j = 0; j < tau.size(); ++j)
                if (coin(rng) == 0) g(i, j) = r();
        Q t = trace(g);
        g(tau.size() - 1, tau.size() - 1) -= t;
        x.add_g(m(), g);
        x.z.add(m(), static_cast<std::size_t>(axis(rng)), r());
    }
    if (coin(rng) == 0) x.dpart[static_cast<std::size_t>(axis(rng))] = r();
    return x;
}

json spaces_table(const TauModule& mod, long window) {
    json t = json::array();
    for (const auto& ws : mod.weight_spaces(window))
        t.push_back({{"key", key_json(ws.key)}, {"r", ws.r}, {"component", ws.component}, {"dim", ws.basis.size()}});
    return t;
}

void axiom_into(Outcome& out, const TauModule& mod, long bound, long window) {
    auto rep = check_module_axiom(mod, mod.algebra().basis(bound), mod.basis(window));
    out.result["axiom"] = {{"checked", rep.checked}, {"vacuous", rep.vacuous}, {"failures", rep.failures}};
    out.require(rep.ok(), rep.witness);
}

class Runner {
public:
    explicit Runner(const Config& c) : cfg_(c) {}

    Outcome run(const Job& job, std::size_t index) const {
        const auto& p = job.params;
        std::mt19937_64 rng(cfg_.seed + 0x9e3779b97f4a7c15ULL * (index + 1));
        Outcome out;
        const std::string& n = job.name;
        if (n == "build-tau") {
            ToroidalAlgebra tau(cfg_.d, cfg_.n);
            long bound = p.value("bound", 1L);
            out.result = {{"rank", cfg_.d},
                          {"loops", cfg_.n},
                          {"bound", bound},
                          {"degrees", tau.degrees(bound).size()},
                          {"finite_roots", tau.roots().finite_roots().size()},
                          {"basis_size", tau.basis(bound).size()}};
        } else if (n == "verify-bracket") {
            ToroidalAlgebra tau(cfg_.d, cfg_.n);
            auto ex = check_bracket_exhaustive(tau, p.value("bound", 1L));
            long range = p.value("range", 2L);
            auto rnd = check_bracket_random(tau, static_cast<std::size_t>(p.value("random", 0L)), [&] { return random_element(tau, rng, range); });
            out.result = {{"basis_size", ex.basis_size},
                          {"antisymmetry_pairs", ex.pairs},
                          {"jacobi_triples", ex.triples},
                          {"random_triples", rnd.triples},
                          {"failures", ex.failures + rnd.failures}};
            out.require(ex.ok(), ex.witness);
            out.require(rnd.ok(), rnd.witness);
        } else if (n == "grid-factorize") {
            grid_job(out, rng, p.value("samples", 3L));
        } else {
            module_job(out, job);
        }
        return out;
    }

private:
    void grid_job(Outcome& out, std::mt19937_64& rng, long samples) const {
        const PointGrid& grid = *cfg_.grid;
        EvalHom hom(grid);
        const auto& gm = hom.grid_matrix();
        Q dx = det(gm.X);
        out.result["N"] = grid.N();
        out.result["det"] = qs(dx);
        out.require(!is_zero(dx), "grid matrix is singular");
        json factors = json::array();
        for (const auto& f : gm.factors) factors.push_back(f.kind == GridFactor::vandermonde ? "vandermonde:" + std::to_string(f.axis + 1) : std::string("permutation"));
        out.result["factors"] = factors;
        bool prod = gm.unpermuted_product() == gm.X;
        out.result["factorization"] = prod;
        out.require(prod, "factor product differs from the grid matrix");
        const std::size_t size = static_cast<std::size_t>(cfg_.d + 1);
        std::uniform_int_distribution<long> num(-5, 5), den(1, 4);
        long roundtrips = 0;
        for (long s = 0; s < samples; ++s) {
            std::vector<MatrixG> target(grid.N(), MatrixG(size, size));
            for (auto& t : target) {
                for (std::size_t i = 0; i < size; ++i)
                    for (std::size_t j = 0; j < size; ++j) t(i, j) = frac(num(rng), den(rng));
                Q tr = trace(t);
                t(size - 1, size - 1) -= tr;
            }
            bool ok = phi_apply(hom, phi_preimage(hom, target), size) == target;
            roundtrips += ok;
            out.require(ok, "Phi(preimage(y)) != y on sample " + std::to_string(s));
        }
        out.result["roundtrips"] = roundtrips;
        auto q = quotient_iso_check(grid, size, 1);
        out.result["quotient"] = {{"ok", q.ok}, {"rank_on_T", q.rank_on_T}, {"expected", q.expected}};
        out.require(q.ok, q.failure);
    }

    std::shared_ptr<const LoopModule> module() const {
        const PsiSpec& s = *cfg_.spec;
        return s.affine ? build_example_42(s, cfg_.n, cfg_.depth) : build_example_41(s);
    }

    void module_job(Outcome& out, const Job& job) const {
        const auto& p = job.params;
        const std::string& n = job.name;
        long bound = p.value("bound", 1L), window = p.value("window", 1L);
        if (n == "gamma") {
            if (cfg_.spec->degenerate()) {
                out.require(false, "all weights vanish: psi is zero");
                return;
            }
            auto g = compute_gamma(*cfg_.spec);
            json basis = json::array();
            for (const auto& row : g.basis) {
                json r = json::array();
                for (const auto& x : row) r.push_back(x.get_si());
                basis.push_back(r);
            }
            out.result = {{"box", g.box}, {"generators", g.generators.size()}, {"basis", basis}, {"periods", g.periods}, {"index", g.index.get_str()}, {"closed", g.closed}};
            out.require(g.full_rank(), "support lattice is not of full rank");
            out.require(g.closed, "the support does not generate the lattice additively inside the box");
            const auto& axes = cfg_.spec->grid.axes();
            for (std::size_t j = 0; j < g.periods.size(); ++j)
                if (g.periods[j] != 0 && static_cast<long>(axes[j].size()) % g.periods[j] != 0)
                    out.result["period_warnings"].push_back("k_" + std::to_string(j + 1) + " does not divide N_" + std::to_string(j + 1));
            return;
        }
        auto mod = module();
        out.result["components"] = mod->component_count();
        if (n == "build-example-41" || n == "build-example-42") {
            out.result["spaces"] = spaces_table(*mod, window);
            axiom_into(out, *mod, bound, window);
            if (n == "build-example-42") out.result["level"] = qs(mod->tensor().level(mod->coefficients(Monomial(mod->spec().grid.n(), 0))));
        } else if (n == "decompose-loop") {
            auto rep = check_decomposition(*mod);
            out.result["index"] = rep.index.get_str();
            out.result["spans"] = rep.spans;
            out.result["direct"] = rep.direct;
            json dims = json::array();
            for (std::size_t c = 0; c < mod->component_count(); ++c)
                for (const auto& [slot, d] : graded_dimensions(*mod, c, window))
                    dims.push_back({{"component", c}, {"key", key_json(slot.first)}, {"r", slot.second}, {"dim", d}});
            out.result["dimensions"] = dims;
            out.require(rep.ok(), rep.witness.empty() ? "component count differs from the lattice index" : rep.witness);
        } else if (n == "integrability") {
            auto rep = check_integrability(*mod, real_root_vectors(mod->algebra(), bound), mod->basis(window), p.value("cap", 16L));
            out.result.update({{"nilpotent", rep.nilpotent}, {"vacuous", rep.vacuous}, {"failures", rep.failures}, {"max_power", rep.max_power}, {"all_nilpotent", rep.all_nilpotent()}});
            out.require(rep.ok(), rep.witness);
        } else if (n == "central-ops") {
            central_into(out, *mod, bound, window);
        } else if (n == "twist") {
            TauAutomorphism a(get_matrix(p.at("matrix"), static_cast<std::size_t>(cfg_.n), "matrix"));
            auto tw = twist_module(mod, a);
            axiom_into(out, *tw, bound, window);
            central_into(out, *tw, bound, window);
            auto back = twist_module(tw, a.inverse());
            std::size_t compared = 0, diffs = 0;
            for (const auto& x : mod->algebra().basis(bound))
                for (const auto& v : mod->basis(window)) {
                    ++compared;
                    if (back->act(x, v) != mod->act(x, v)) ++diffs;
                }
            out.result["roundtrip"] = {{"compared", compared}, {"differences", diffs}};
            out.require(diffs == 0, "twist by A then A^-1 differs from the module");
        }
    }

    static void central_into(Outcome& out, const TauModule& mod, long bound, long window) {
        auto rep = check_central_operators(mod, bound, window);
        json scalars = json::array();
        for (const auto& s : rep.zero_degree_scalars) scalars.push_back(opt_scalar(s));
        json nonzero = json::array();
        for (const auto& [m, i] : rep.nonzero) nonzero.push_back({{"degree", m}, {"axis", i + 1}});
        json ratios = json::array();
        for (const auto& [m, k] : rep.ratios) ratios.push_back({{"degree", m}, {"ratio", qs(k)}});
        out.result["central"] = {{"elements", rep.elements},
                                 {"acting_nonzero", rep.acting_nonzero},
                                 {"K_scalars", scalars},
                                 {"nonzero", nonzero},
                                 {"ratios", ratios},
                                 {"inverse_checked", rep.inverse_checked}};
        out.require(rep.ok(), rep.witness);
    }

    const Config& cfg_;
};

json run_jobs(const Config& cfg, bool parallel) {
    Runner runner(cfg);
    auto one = [&](std::size_t k) {
        const Job& job = cfg.jobs[k];
        auto start = std::chrono::steady_clock::now();
        json entry = {{"job", job.name}};
        try {
            Outcome o = runner.run(job, k);
            entry["status"] = o.pass ? "pass" : "fail";
            entry["result"] = o.result;
            if (!o.pass) entry["witness"] = o.witness;
        } catch (const std::exception& e) {
            entry["status"] = "fail";
            entry["result"] = json::object();
            entry["witness"] = std::string("exception: ") + e.what();
        }
        auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
        entry["elapsed_us"] = static_cast<long long>(us);
        return entry;
    };
    std::vector<json> entries(cfg.jobs.size());
    if (parallel) {
        std::vector<std::future<json>> fs;
        for (std::size_t k = 0; k < cfg.jobs.size(); ++k) fs.push_back(std::async(std::launch::async, one, k));
        for (std::size_t k = 0; k < fs.size(); ++k) entries[k] = fs[k].get();
    } else {
        for (std::size_t k = 0; k < cfg.jobs.size(); ++k) entries[k] = one(k);
    }
    bool pass = true;
    for (const auto& e : entries) pass = pass && e["status"] == "pass";
    return {{"version", report_version}, {"seed", cfg.seed}, {"status", pass ? "pass" : "fail"}, {"jobs", entries}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact computations for toroidal Lie algebras and their loop modules"};
    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    bool quiet = false, list = false, parallel = false;
    app.add_option("--config", config_path, "JSON job configuration");
    app.add_option("--out", out_path, "report path (stdout when omitted)");
    app.add_option("--seed", seed, "overrides the seed in the configuration");
    app.add_flag("--quiet", quiet, "no per-job summary");
    app.add_flag("--list-jobs", list, "print the available jobs and exit");
    app.add_flag("--parallel", parallel, "run independent jobs concurrently");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list) {
        for (const auto& j : job_table()) std::cout << j.name << "  " << j.summary << "\n";
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "config error: --config is required\n";
        return 2;
    }

    Config cfg;
    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError(config_path, "cannot open");
        json root;
        try {
            root = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(config_path, e.what());
        }
        cfg = parse_config(root);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (seed) cfg.seed = *seed;

    json report = run_jobs(cfg, parallel);
    std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        out << text;
    }
    if (!quiet) {
        std::ostream& log = out_path.empty() ? std::cerr : std::cout;
        for (const auto& e : report["jobs"]) {
            log << e["job"].get<std::string>() << ": " << e["status"].get<std::string>();
            if (e.contains("witness")) log << " (" << e["witness"].get<std::string>() << ")";
            log << "\n";
        }
    }
    return report["status"] == "pass" ? 0 : 1;
}
