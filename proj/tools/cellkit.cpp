#include <atomic>
#include <functional>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cellkit/io.hpp"
#include "cellkit/molecule.hpp"
#include "cellkit/necklace.hpp"
#include "cellkit/reduction.hpp"
#include "cellkit/refinement.hpp"
#include "cellkit/report.hpp"
#include "cellkit/separating.hpp"
#include "cellkit/shelling.hpp"
#include "cellkit/triangulation.hpp"
#include "cellkit/weaving.hpp"

using namespace cellkit;

namespace {

enum Exit { ok = 0, negative = 2, precondition = 3, io = 4 };

struct Options {
    std::string input;
    std::string out;
    std::string format = "json";
    std::string report = "json";
    unsigned seed = 0;
    int jobs = 1;
    int k = 1;
    long cap = 0;
    int q = -1;
    bool dbl = false;
    double b = 0.05;
    long m = 1700;
    double rho = 0;
    int starts = 32;
    int cross_starts = 128;
    int nodes = 1000;
    int per_axis = 400;
};

void emit(const Options& o, const std::string& text)
{
    if (o.out.empty()) std::cout << text;
    else write_file(o.out, text);
}

int finish(const Options& o, const RunReport& R)
{
    emit(o, R.to_json().dump(2) + "\n");
    return R.pass() ? ok : negative;
}

// Runs the tasks on at most `jobs` threads; the first exception is rethrown.
void run_all(int jobs, std::vector<std::function<void()>> tasks)
{
    if (jobs <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::vector<std::exception_ptr> errs(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            try {
                tasks[i]();
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(tasks.size())); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

json counts_of(const Complex& K)
{
    json c = json::array();
    for (int d = 0; d <= K.dimension(); ++d) c.push_back(K.count(d));
    return c;
}

Complex load(const Options& o, RunReport& R)
{
    const std::string text = read_file(o.input);
    R.set_input(text);
    return complex_from_json(parse_json(text, o.input));
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

// -- complex commands -----------------------------------------------------

int cmd_validate(const Options& o)
{
    RunReport R("validate");
    Complex K = load(o, R);
    R.check("structure", true);
    json res{{"dimension", K.dimension()}, {"mode", to_string(K.mode())}, {"counts", counts_of(K)},
             {"euler_characteristic", K.euler_characteristic()}, {"components", connected_components(K)},
             {"simplicially_connected", is_simplicially_connected(K)}, {"warnings", K.warnings()}};
    if (K.mode() == Mode::cubical && K.dimension() <= 3) res["cell_heuristic"] = is_cell(K);
    R.set_result(std::move(res));
    return finish(o, R);
}

int cmd_triangulate(const Options& o)
{
    RunReport R("triangulate");
    Complex K = load(o, R);
    auto tri = R.timed("triangulate", [&] { return canonical_triangulation(K); });
    const int n = K.dimension();
    const long want = factorial(n) * (1L << n) * static_cast<long>(K.count(n));
    const long got = static_cast<long>(tri.complex.count(n));
    R.check("top_simplices", got, want, got == want);
    R.set_result({{"counts", counts_of(tri.complex)}, {"complex", complex_to_json(tri.complex)}});
    return finish(o, R);
}

int cmd_shell(const Options& o)
{
    RunReport R("shell");
    Complex K = load(o, R);
    auto order = R.timed("search", [&] { return find_shelling(K); });
    R.check("shelling_found", order.has_value());
    if (order) {
        auto v = verify_shelling(K, *order);
        R.check("shelling_verified", v.ok, nullptr, v.ok);
        R.set_result({{"order", *order}});
    } else {
        R.set_result({{"order", nullptr}});
    }
    return finish(o, R);
}

int cmd_alexander(const Options& o)
{
    RunReport R("alexander");
    const std::string text = read_file(o.input);
    R.set_input(text);
    const json j = parse_json(text, o.input);
    Complex K = complex_from_json(j);
    AlexanderLabeling L;
    if (K.mode() == Mode::cubical) {
        auto tri = canonical_triangulation(K);
        if (o.dbl) tri = double_along_boundary(tri);
        L = alexander_label(tri);
    } else {
        auto labels = labels_from_json(j);
        if (labels.empty()) fail("MissingLabels", "a simplicial input needs \"alexander\".\"labels\"");
        L = alexander_label(K, labels);
    }
    R.check("labeling", true);
    json res = labeling_to_json(L);
    if (is_closed(L.complex)) {
        const long deg = degree(L);
        R.check("degree", deg, static_cast<long>(L.complex.count(L.complex.dimension()) / 2), true);
    } else {
        res["alexander"].erase("degree");
    }
    R.set_result(std::move(res));
    return finish(o, R);
}

int cmd_reduce(const Options& o)
{
    RunReport R("reduce");
    Complex K = load(o, R);
    const int n = K.dimension();
    auto run = R.timed("reduce", [&] { return cubical_reduction(K); });
    auto star = star_replacement(K);
    const long kd = run.initial_top, ks = static_cast<long>(star.complex.count(n));
    R.check("ledger_identity", run.ledger.total(), (kd - ks) / 2, 2 * run.ledger.total() == kd - ks);
    R.check("isomorphic_to_star_replacement", isomorphic(run.result.complex, star.complex));
    json steps = json::array();
    for (const auto& s : run.ledger.steps)
        steps.push_back({{"vertex", s.vertex}, {"star_top", s.star_top}, {"covers", s.covers}});
    R.set_result({{"shelling", run.shelling}, {"ledger", steps}, {"total", run.ledger.total()}});
    return finish(o, R);
}

int cmd_refine(const Options& o)
{
    RunReport R("refine");
    Complex K = load(o, R);
    auto Rf = R.timed("refine", [&] { return refine(K, o.k); });
    const int n = K.dimension();
    long want = static_cast<long>(K.count(n));
    for (int i = 0; i < n; ++i) want *= Rf.factor();
    R.check("top_cubes", static_cast<long>(Rf.complex.count(n)), want,
            static_cast<long>(Rf.complex.count(n)) == want);
    R.set_result({{"k", o.k}, {"similarity", Rf.similarity()}, {"counts", counts_of(Rf.complex)},
                  {"complex", complex_to_json(Rf.complex)}});
    return finish(o, R);
}

int cmd_separate(const Options& o)
{
    RunReport R("separate");
    Complex K = load(o, R);
    auto S = R.timed("search", [&] { return find_separating_complex(K); });
    const std::string why = check_separating(K, S);
    R.check("conditions", why.empty() ? json("ok") : json(why), nullptr, why.empty());
    R.check("pieces", S.pieces.size(), S.boundaries.size(), S.pieces.size() == S.boundaries.size());
    R.set_result({{"Z", S.Z}, {"pieces", S.pieces}, {"boundaries", S.boundaries}, {"collars", S.collars}});
    return finish(o, R);
}

int cmd_export(const Options& o)
{
    RunReport R("export");
    Complex K = load(o, R);
    std::ostringstream ss;
    if (o.format == "json") ss << complex_to_json(K).dump(2) << '\n';
    else if (o.format == "obj") export_complex_obj(K, ss);
    else if (o.format == "csv") export_complex_csv(K, ss);
    else fail("BadArgument", "export formats are json, obj and csv");
    emit(o, ss.str());
    return ok;
}

// -- molecules ------------------------------------------------------------

Molecule load_molecule(const Options& o, RunReport& R)
{
    const std::string text = read_file(o.input);
    R.set_input(text);
    return build_molecule(molecule_from_json(parse_json(text, o.input)));
}

int cmd_molecule(const std::string& what, const Options& o)
{
    RunReport R("molecule " + what);
    Molecule M = load_molecule(o, R);
    R.check("valid", true);
    if (what == "validate") {
        R.set_result({{"cubes", M.cubes.size()}, {"atoms", M.spec.atoms.size()}, {"ell", M.ell},
                      {"varrho", M.varrho}, {"leading_atom", M.leading_atom}});
    } else if (what == "levels") {
        auto a = level_top_down(M), b = level_bottom_up(M);
        R.check("levels_agree", a == b);
        const long lo = a.empty() ? 0 : *std::min_element(a.begin(), a.end());
        R.check("levels_nonnegative", lo, 0, lo >= 0);
        // stored as ell * lambda
        R.set_result({{"ell", M.ell}, {"levels", a}});
    } else {
        std::vector<int> qs;
        if (o.q >= 0) qs.push_back(o.q);
        else
            for (std::size_t q = 0; q < M.cubes.size(); ++q) qs.push_back(static_cast<int>(q));
        json out = json::array();
        long bad = 0;
        for (int q : qs) {
            if (q >= static_cast<int>(M.cubes.size())) fail("BadArgument", "no cube " + std::to_string(q));
            auto E = expansion_index(M, q);
            bad += E.leading_count != E.center_count;
            out.push_back({{"cube", q}, {"nu", E.nu}, {"leading", E.leading_count}, {"center", E.center_count}});
        }
        R.check("leading_center_counts", bad, 0, bad == 0);
        R.set_result({{"nu", out}});
    }
    return finish(o, R);
}

// -- weaving --------------------------------------------------------------

int cmd_weave(const Options& o)
{
    RunReport R("weave-rank");
    const std::string text = read_file(o.input);
    R.set_input(text);
    const json j = parse_json(text, o.input);
    SketchSpec S = sketch_from_json(j);
    validate_sketch(S);
    auto ranks = rank_function(S);
    R.check("rank_identity", ranks.pairs_checked, nullptr, true);
    auto Sp = sphericalize_counts(S, ranks);
    // the original pieces unless the sketch names its own roots
    std::vector<int> roots(S.colors.size());
    for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = static_cast<int>(i);
    if (j.contains("roots")) roots = j.at("roots").get<std::vector<int>>();
    auto F = neighborly_forest(Sp.colors, Sp.incidence, roots);
    if (o.format == "dot") {
        emit(o, forest_dot(F, Sp.colors));
        return ok;
    }
    long covered = 0;
    for (int r : F.root_of) covered += r >= 0;
    R.check("forest_covers", covered, static_cast<long>(F.root_of.size()),
            covered == static_cast<long>(F.root_of.size()));
    R.check("one_root_per_tree", F.roots.size(), nullptr,
            F.edges.size() + F.roots.size() == F.root_of.size());
    json rk = json::array();
    for (auto [s, r] : ranks.rank)
        rk.push_back({{"simplex", S.boundary.cell(s).verts}, {"r_sigma", ranks.r_sigma.at(s)}, {"rank", r}});
    json edges = json::array();
    for (const auto& e : F.edges) edges.push_back({{"parent", e.parent}, {"child", e.child}, {"designated", e.designated}});
    R.set_result({{"ranks", rk}, {"m", Sp.m}, {"m_prime", Sp.m_prime}, {"colors", Sp.colors}, {"forest", edges}});
    return finish(o, R);
}

// -- necklace -------------------------------------------------------------

NecklaceParams params_of(const Options& o)
{
    NecklaceParams P;
    P.b = o.b;
    P.m = o.m;
    P.rho = o.rho;
    check_params(P);
    return P;
}

json params_json(const NecklaceParams& P)
{
    return {{"b", P.b}, {"m", P.m}, {"rho", P.rho}, {"c0", P.c0}, {"c1", P.c1}, {"beta", P.beta()},
            {"conforming", P.m_in_range()}, {"s", P.jacobian_exponent()}};
}

const char* family_name(Family f) { return f == Family::Phi ? "phi" : "psi"; }

int cmd_disjoint(const Options& o)
{
    RunReport R("necklace verify-disjoint");
    NecklaceParams P = params_of(o);
    DisjointnessReport D[2], X[2];
    std::vector<std::function<void()>> tasks;
    for (int f = 0; f < 2; ++f) {
        tasks.push_back([&, f] { D[f] = verify_disjointness(P, Family(f), o.starts, o.seed); });
        if (o.cross_starts > 0)
            tasks.push_back([&, f] { X[f] = verify_disjointness(P, Family(f), o.cross_starts, o.seed + 7); });
    }
    R.timed("optimize", [&] { run_all(o.jobs, tasks); });
    P.c0 = D[0].c_emp;
    P.c1 = D[1].c_emp;
    if (P.rho <= 0) P.rho = std::min(P.c0, P.c1) / 10;
    R.set_params(params_json(P));
    json fams = json::array();
    for (int f = 0; f < 2; ++f) {
        const std::string n = family_name(Family(f));
        R.check(n + ".c_emp", D[f].c_emp, 2 * P.rho, D[f].c_emp > 2 * P.rho);
        R.check(n + ".equivariance", D[f].equivariance_error, 1e-9, D[f].equivariance_error <= 1e-9);
        if (o.cross_starts > 0) {
            const double rel = std::abs(X[f].min_dist - D[f].min_dist) / D[f].min_dist;
            R.check(n + ".multistart_agreement", rel, 1e-3, rel <= 1e-3);
        }
        json cls = json::array();
        for (const auto& c : D[f].classes) cls.push_back({{"i", c.i}, {"j", c.j}, {"dist", c.dist}});
        fams.push_back({{"family", n}, {"min_dist", D[f].min_dist}, {"pruned", D[f].pruned}, {"classes", cls}});
    }
    R.set_result({{"families", fams}});
    return finish(o, R);
}

int cmd_contain(const Options& o)
{
    RunReport R("necklace verify-contain");
    NecklaceParams P = params_of(o);
    P = R.timed("constants", [&] { return with_constants(P, o.starts, o.seed); });
    R.set_params(params_json(P));
    auto C = R.timed("sample", [&] { return verify_containment(P, o.per_axis); });
    R.check("rho_condition", P.b, P.rho / 10, P.rho_condition());
    R.check("radius_inequality", C.inequality_lhs, C.inequality_rhs, C.inequality);
    R.check("core_distance", C.ratio, 1 + 1e-3, C.ratio <= 1 + 1e-3);
    R.check("tubes_inside", C.max_core_dist + P.rho * P.b * P.b, P.rho * P.b, C.tubes_inside);
    R.set_result({{"max_core_dist", C.max_core_dist}, {"samples", C.samples}});
    return finish(o, R);
}

int cmd_link(const Options& o)
{
    RunReport R("necklace verify-link");
    NecklaceParams P = params_of(o);
    R.set_params(params_json(P));
    LinkingReport L[2];
    R.timed("integrate", [&] {
        run_all(o.jobs, {[&] { L[0] = verify_linking(P, Family::Phi, o.nodes); },
                         [&] { L[1] = verify_linking(P, Family::Psi, o.nodes); }});
    });
    for (int f = 0; f < 2; ++f)
        for (const auto& e : L[f].entries) {
            const double err = std::abs(std::abs(e.lk) - e.expected);
            R.check(std::string(family_name(Family(f))) + ".lk(" + std::to_string(e.i) + "," + std::to_string(e.j) + ")",
                    e.lk, e.expected, err <= 1e-3);
        }
    return finish(o, R);
}

int cmd_gen(const Options& o)
{
    RunReport R("necklace gen");
    NecklaceParams P = params_of(o);
    R.set_params(params_json(P));
    auto sys = R.timed("generate", [&] { return generate(o.k, P, o.cap); });
    const double want = std::pow(P.b, o.k);
    double worst = 0;
    for (const auto& t : sys.tubes) worst = std::max(worst, std::abs(t.S.scale - want) / want);
    R.check("scale", worst, 1e-12, worst <= 1e-12);
    json tubes = json::array();
    for (const auto& t : sys.tubes) tubes.push_back({{"word", t.word}, {"pattern", to_string(t.pattern)}, {"scale", t.S.scale}});
    R.set_result({{"k", o.k}, {"cap", o.cap}, {"tubes", tubes.size()}, {"list", tubes}});
    return finish(o, R);
}

int cmd_necklace_export(const Options& o)
{
    NecklaceParams P;
    P.b = o.b;
    P.m = o.m;
    auto sys = generate(o.k, P, o.cap);
    std::ostringstream ss;
    if (o.format == "csv") export_csv(sys, ss);
    else if (o.format == "obj") export_obj(sys, ss);
    else fail("BadArgument", "necklace export formats are csv and obj");
    emit(o, ss.str());
    return ok;
}

int exit_for(const Error& e)
{
    return e.code() == "IOError" || e.code() == "ParseError" ? io : precondition;
}

} // namespace

int main(int argc, char** argv)
{
    Options o;
    CLI::App app{"cellkit: cubical and simplicial complexes, Alexander labelings, molecules, weaving ranks, necklaces"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", o.out, "Write the report or export here instead of stdout");
    app.add_option("--seed", o.seed, "Seed for randomized searches");
    app.add_option("--jobs", o.jobs, "Worker threads for independent checks")->check(CLI::PositiveNumber);
    app.add_option("--format", o.format, "json|csv|obj|dot");
    app.add_option("--report", o.report, "Report format")->check(CLI::IsMember({"json"}));

    std::function<int()> run;
    auto file_cmd = [&](const std::string& name, const std::string& help, std::function<int(const Options&)> f) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("input", o.input, "Complex JSON")->required();
        s->callback([&o, &run, f] { run = [&o, f] { return f(o); }; });
        return s;
    };
    file_cmd("validate", "Check a complex", cmd_validate);
    file_cmd("triangulate", "Canonical triangulation of a cubical complex", cmd_triangulate);
    file_cmd("shell", "Find a shelling order", cmd_shell);
    file_cmd("alexander", "Alexander labeling and degree", cmd_alexander)
        ->add_flag("--double", o.dbl, "Double the triangulation along its boundary");
    file_cmd("reduce", "Cubical reduction with its ledger", cmd_reduce);
    file_cmd("refine", "Iterated 1/3-refinement", cmd_refine)->add_option("--k", o.k, "Refinement depth");
    file_cmd("separate", "Separating complex", cmd_separate);
    file_cmd("weave-rank", "Sphericalization ranks and neighborly forest of a sketch", cmd_weave)
        ->add_option("--format", o.format, "json|dot");
    file_cmd("export", "Export a complex as json, obj or csv", cmd_export)->add_option("--format", o.format, "json|obj|csv");

    auto* mol = app.add_subcommand("molecule", "Molecule checks");
    mol->require_subcommand(1);
    for (std::string what : {"validate", "levels", "nu"}) {
        auto* s = mol->add_subcommand(what);
        s->add_option("input", o.input, "Molecule JSON")->required();
        if (what == "nu") s->add_option("--q", o.q, "Only this cube");
        s->callback([&o, &run, what] { run = [&o, what] { return cmd_molecule(what, o); }; });
    }

    auto* neck = app.add_subcommand("necklace", "Necklace construction in R^4");
    neck->require_subcommand(1);
    neck->add_option("--b", o.b, "Scale b");
    neck->add_option("--m", o.m, "Tubes per level");
    neck->add_option("--rho", o.rho, "Tube radius factor; 0 derives it from the empirical constants");
    auto nk = [&](const std::string& name, const std::string& help, int (*f)(const Options&)) {
        auto* s = neck->add_subcommand(name, help);
        s->add_option("--b", o.b, "Scale b");
        s->add_option("--m", o.m, "Tubes per level");
        s->add_option("--rho", o.rho, "Tube radius factor");
        s->callback([&o, &run, f] { run = [&o, f] { return f(o); }; });
        return s;
    };
    auto* dj = nk("verify-disjoint", "Minimum core distances", cmd_disjoint);
    dj->add_option("--starts", o.starts, "Optimizer starts per pair class");
    dj->add_option("--cross-starts", o.cross_starts, "Starts of the cross-check run; 0 skips it");
    nk("verify-contain", "Children inside their parent tube", cmd_contain)
        ->add_option("--per-axis", o.per_axis, "Samples per torus angle");
    nk("verify-link", "Linking numbers of core circles", cmd_link)->add_option("--nodes", o.nodes, "Quadrature nodes");
    auto* gen = nk("gen", "Tube system at level k", cmd_gen);
    gen->add_option("--k", o.k, "Level");
    gen->add_option("--cap", o.cap, "Children per tube, 0 for all m");
    auto* ex = nk("export", "Export a tube system", cmd_necklace_export);
    ex->add_option("--k", o.k, "Level");
    ex->add_option("--cap", o.cap, "Children per tube, 0 for all m");
    for (auto* s : {gen, ex}) s->add_option("--format", o.format, "csv|obj");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : precondition;
    }
    try {
        return run();
    } catch (const Error& e) {
        std::cerr << json{{"error", {{"code", e.code()}, {"detail", e.what()}}}}.dump() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"code", "Internal"}, {"detail", e.what()}}}}.dump() << '\n';
        return precondition;
    }
}
