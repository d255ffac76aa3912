// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Usage: acceptance [corpus-dir]

#include "common.hpp"
#include "gen.hpp"
#include "walk.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace soundni;
using namespace soundni::testing;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome_ {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void fail(std::string msg) {
        pass = false;
        if (failures.size() < 5) {
            failures.push_back(std::move(msg));
        }
    }
};

std::string corpus_dir_arg;

PreciseStore initial(const Program& p) { return {initial_sym_store(p.all_vars), p_true()}; }

Valuation complete(Valuation nu, const SymStore& rho) {
    for (const auto& [x, e] : rho) {
        SymSet syms;
        collect_symbols(*e, syms);
        for (const auto& s : syms) {
            nu.emplace(s, 0);
        }
    }
    return nu;
}

// ---------------------------------------------------------------------------

Outcome_ grid() {
    Outcome_ out;
    const std::map<std::string, std::vector<std::string>> want{
        {"a_same_branches", {"False alarm", "Secure", "Secure", "Secure", "Secure"}},
        {"b_low_loop", {"Secure", "False alarm", "False alarm", "Secure", "Secure"}},
        {"c_sign_leak", {"Alarm", "Refutation", "Refutation", "Refutation", "Refutation"}},
        {"d_clamped_priv", {"False alarm", "False alarm", "Secure", "False alarm", "Secure"}},
        {"e_reset_counter", {"False alarm", "False alarm", "False alarm", "Secure", "Secure"}},
        {"g_dead_branch", {"False alarm", "False alarm", "False alarm", "False alarm", "Secure"}},
        {"h_late_leak", {"Alarm", "Refutation", "Refutation", "Refutation", "Refutation"}},
        {"i_deep_leak", {"Alarm", "Alarm", "Alarm", "Alarm", "Alarm"}},
    };
    auto programs = load_corpus(corpus_dir_arg);
    auto start = Clock::now();
    CorpusReport r = run_corpus(programs, default_matrix(), test_solver());
    double secs = since(start);
    std::cout << report_text(r);
    int cells = 0;
    if (r.rows.size() != want.size()) {
        out.fail("corpus has " + std::to_string(r.rows.size()) + " programs");
    }
    for (const auto& row : r.rows) {
        auto it = want.find(row.program);
        if (it == want.end()) {
            out.fail("unexpected program " + row.program);
            continue;
        }
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            ++cells;
            if (row.cells[i].label != it->second[i]) {
                out.fail(row.program + " / " + r.columns[i] + ": got " + row.cells[i].label + ", want " +
                         it->second[i]);
            }
        }
    }
    if (secs >= 60) {
        out.fail("grid took " + std::to_string(secs) + " s");
    }

    // Bounds: (h) needs four unrollings, (i) is never refuted below 100.
    const CorpusProgram* h = nullptr;
    const CorpusProgram* i = nullptr;
    for (const auto& cp : programs) {
        if (cp.name == "h_late_leak") h = &cp;
        if (cp.name == "i_deep_leak") i = &cp;
    }
    int extra = 0;
    for (AnalysisConfig cfg : default_matrix()) {
        if (cfg.engine == EngineKind::Dep) {
            continue;
        }
        if (h) {
            cfg.bound = 3;
            Verdict v = verify_ni(h->program, cfg, test_solver());
            ++extra;
            if (v.kind != Verdict::Kind::Inconclusive) {
                out.fail("h_late_leak at bound 3 under " + cfg.label() + " gave " + to_string(v.kind));
            }
        }
        if (i) {
            for (unsigned k : {10u, 50u, 99u}) {
                cfg.bound = k;
                Verdict v = verify_ni(i->program, cfg, test_solver());
                ++extra;
                if (v.kind != Verdict::Kind::Inconclusive) {
                    out.fail("i_deep_leak at bound " + std::to_string(k) + " under " + cfg.label() + " gave " +
                             to_string(v.kind));
                }
            }
        }
    }
    std::ostringstream d;
    d << cells << " cells in " << std::fixed;
    d.precision(2);
    d << secs << " s, " << extra << " bound checks";
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ trace_regression() {
    Outcome_ out;
    CorpusProgram d = load_corpus_program(corpus_dir_arg + "/d_clamped_priv.imp");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f, 1};
    // Explore until the loop summary, keeping only the false side of the
    // first conditional.
    struct Item {
        ProductState s;
        bool branched;
    };
    std::vector<ProductTransition> found;
    std::vector<Item> stack{
        {ProductState{d.program.body, initial(d.program), AbstractState::top(d.program.all_vars), {}, true}, false}};
    while (!stack.empty()) {
        Item it = std::move(stack.back());
        stack.pop_back();
        if (it.s.cmd->is_skip()) {
            continue;
        }
        for (auto& t : product_step(it.s, ctx)) {
            bool branch = t.rule == Rule::IfTrue || t.rule == Rule::IfFalse;
            if (!it.branched && t.rule == Rule::IfTrue) {
                continue;
            }
            if (t.rule == Rule::ApproxMany) {
                found.push_back(t);
                continue;
            }
            stack.push_back({std::move(t.state), it.branched || branch});
        }
    }
    if (found.size() != 1) {
        out.fail(std::to_string(found.size()) + " approximation steps on the false path");
        return out;
    }
    const ProductState& s = found[0].state;
    const SymExprPtr& priv = s.kappa.rho.at("priv");
    const SymExprPtr& i = s.kappa.rho.at("i");
    SymPathPtr claim = p_and(p_cmp(CmpOp::Ge, priv, s_const(2)), p_cmp(CmpOp::Eq, i, s_const(10)));
    SatResult r = test_solver().check_sat(p_and(s.kappa.path, p_not(claim)));
    if (!r.unsat()) {
        out.fail("path does not entail the loop exit bounds");
    }
    const Interval& ap = s.a.at("priv");
    if (!ap.lo || *ap.lo != 2) {
        out.fail("priv interval is " + to_string(ap));
    }
    if (!(s.a.at("i") == Interval::point(10))) {
        out.fail("i interval is " + to_string(s.a.at("i")));
    }
    out.detail = "priv -> " + to_string(*priv) + " in " + to_string(ap) + ", i -> " + to_string(*i) + " in " +
                 to_string(s.a.at("i"));
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ coverage() {
    Outcome_ out;
    Rng rng(1001);
    GenOptions o; // depth 4, up to 4 variables
    int programs = 0, single = 0, pairs = 0, approx = 0;
    std::vector<AnalysisConfig> rel;
    for (const auto& c : default_matrix()) {
        if (c.engine != EngineKind::Dep) {
            rel.push_back(c);
        }
    }
    while (programs < 600) {
        Program p = gen_program(rng, o);
        ++programs;
        for (int m = 0; m < 2; ++m) {
            Store mu = gen_store(rng, p.all_vars, -8, 8);
            if (!run(p, mu, 20000).terminated()) {
                continue;
            }
            unsigned bound = static_cast<unsigned>(uniform(rng, 0, 3));
            SymbolFactory f;
            EngineContext ctx{test_solver(), f, bound};
            WalkResult a = walk_se(p, mu, ctx);
            SymbolFactory g;
            EngineContext ctx2{test_solver(), g, bound};
            WalkResult b = walk_product(p, mu, ctx2);
            single += 2;
            approx += a.approximations > 0;
            if (!a.ok) out.fail("se: " + to_string(*p.body) + " from " + to_string(mu) + ": " + a.failure);
            if (!b.ok) out.fail("product: " + to_string(*p.body) + " from " + to_string(mu) + ": " + b.failure);
        }
        for (const auto& cfg : rel) {
            Store mu0 = gen_store(rng, p.all_vars, -8, 8);
            Store mu1 = gen_low_equal(rng, mu0, p.low_vars, -8, 8);
            if (!run(p, mu0, 20000).terminated() || !run(p, mu1, 20000).terminated()) {
                continue;
            }
            SymbolFactory f;
            EngineContext ctx{test_solver(), f, static_cast<unsigned>(uniform(rng, 0, 3))};
            RelOptions opts = rel_options(cfg, test_solver(), f);
            RelWalkResult r = walk_rel(p, initial_rel_store(p), mu0, mu1, ctx, opts);
            ++pairs;
            approx += r.approximations > 0;
            if (!r.ok) {
                out.fail(cfg.label() + ": " + to_string(*p.body) + " from " + to_string(mu0) + " / " +
                         to_string(mu1) + ": " + r.failure);
            }
        }
    }
    out.detail = std::to_string(programs) + " programs, " + std::to_string(single) + " single runs, " +
                 std::to_string(pairs) + " run pairs, " + std::to_string(approx) + " with loop summaries";
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ refutation_replay() {
    Outcome_ out;
    Solver& s = test_solver();
    int verdicts = 0, refutations = 0, precise_models = 0;

    auto check = [&](const Program& p, AnalysisConfig cfg, const std::string& name) {
        cfg.all_paths = true;
        try {
            Verdict v = verify_ni(p, cfg, s);
            ++verdicts;
            for (const auto& ce : v.counterexamples) {
                ++refutations;
                if (!low_equal(ce.mu0, ce.mu1, p.low_vars) || low_equal(ce.out0, ce.out1, p.low_vars)) {
                    out.fail(name + ": counterexample does not witness a leak");
                }
            }
        } catch (const ReplayFailure& e) {
            out.fail(name + " under " + cfg.label() + ": " + e.what());
        }
    };

    for (const auto& cp : load_corpus(corpus_dir_arg)) {
        for (AnalysisConfig cfg : default_matrix()) {
            if (cfg.engine == EngineKind::Dep) {
                continue;
            }
            cfg.bound = std::max(cfg.bound, cp.min_bound);
            check(cp.program, cfg, cp.name);
        }
    }
    Rng rng(1002);
    auto matrix = default_matrix();
    for (int n = 0; n < 300; ++n) {
        GenOptions o;
        o.max_depth = 2 + n % 2;
        Program p = gen_program(rng, o);
        AnalysisConfig cfg = matrix[static_cast<std::size_t>(1 + n % 4)];
        cfg.path_cap = 256;
        check(p, cfg, to_string(*p.body));
    }

    // Explorations without approximation: every satisfiable final has a
    // model whose concrete runs it describes.
    for (int n = 0; n < 200; ++n) {
        GenOptions o;
        o.max_depth = 3;
        o.loop_weight = n % 2 ? 0.0 : 0.5;
        Program p = gen_program(rng, o);
        SymbolFactory f;
        EngineContext ctx{s, f, 8, 256};
        try {
            for (const auto& fin : se_explore(p, initial(p), ctx)) {
                if (!fin.precise) continue;
                SatResult r = s.check_sat(fin.kappa.path);
                if (!r.sat()) continue;
                Valuation nu = complete(r.model, initial(p).rho);
                Store mu;
                for (const auto& x : p.all_vars) mu[x] = nu.at(initial_symbol(x));
                Outcome run1 = run(p, mu, 100000);
                ++precise_models;
                if (!run1.terminated() || !in_gamma_k(fin.kappa, *run1.final_store, nu)) {
                    out.fail("single-trace model does not replay: " + to_string(*p.body));
                }
            }
            RelSymStore rho0 = initial_rel_store(p);
            SymbolFactory g;
            EngineContext rctx{s, g, 8, 256};
            for (const auto& fin : srse_explore(p, rho0, rctx)) {
                if (!fin.precise) continue;
                SatResult r = s.check_sat(fin.kappa.path);
                if (!r.sat()) continue;
                Valuation nu = r.model;
                for (int side : {0, 1}) nu = complete(nu, proj(side, rho0));
                Store mu0, mu1;
                for (const auto& [x, e] : rho0) {
                    mu0[x] = eval_sym(*e.proj(0), nu);
                    mu1[x] = eval_sym(*e.proj(1), nu);
                }
                Outcome r0 = run(p, mu0, 100000), r1 = run(p, mu1, 100000);
                ++precise_models;
                bool ok = r0.terminated() && r1.terminated() && eval_path(*fin.kappa.path, nu) &&
                          in_gamma_m(proj(0, fin.kappa.rho), *r0.final_store, nu) &&
                          in_gamma_m(proj(1, fin.kappa.rho), *r1.final_store, nu);
                if (!ok) {
                    out.fail("relational model does not replay: " + to_string(*p.body));
                }
            }
        } catch (const PathCapExceeded&) {
        } catch (const MissingSymbol& e) {
            out.fail(std::string("model misses a symbol: ") + e.what());
        }
    }
    out.detail = std::to_string(verdicts) + " verdicts, " + std::to_string(refutations) + " refutations replayed, " +
                 std::to_string(precise_models) + " exact-path models replayed";
    if (refutations < 50) {
        out.fail("too few refutations to be meaningful");
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ reduction_equivalence() {
    Outcome_ out;
    Rng rng(1003);
    std::vector<SymValue> syms{initial_symbol("p"), initial_symbol("q")};
    auto vars = var_names(3);
    VarSet vs(vars.begin(), vars.end());
    long samples = 0, members = 0;
    for (int n = 0; n < 250; ++n) {
        PreciseStore k;
        for (const auto& x : vars) {
            k.rho[x] = fold(gen_sym_expr(rng, syms, 1));
        }
        k.path = gen_sym_path(rng, syms, 1);
        AbstractState a = gen_abstract(rng, vs, -3, 3, 0.25);
        auto [k2, a2] = reduction(k, a);
        for_each_valuation(syms, -4, 4, [&](const Valuation& nu) {
            Store exact;
            for (const auto& x : vars) exact[x] = eval_sym(*k.rho.at(x), nu);
            Store other = gen_store(rng, vs, -4, 4);
            for (const Store* mu : {&exact, &other}) {
                bool before = in_gamma_k(k, *mu, nu) && in_gamma_a(a, *mu);
                bool after = in_gamma_k(k2, *mu, nu) && in_gamma_a(a2, *mu);
                ++samples;
                members += before;
                if (before != after) {
                    out.fail("membership changed for " + to_string(*mu) + " under " + to_string(a));
                }
            }
            return true;
        });
    }
    out.detail = "250 pairs, " + std::to_string(samples) + " samples, " + std::to_string(members) + " members";
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ interval_soundness() {
    Outcome_ out;
    Rng rng(1004);
    GenOptions o;
    long checks = 0;
    for (int n = 0; n < 350; ++n) {
        auto vars = var_names(static_cast<unsigned>(uniform(rng, 1, 3)));
        VarSet vs(vars.begin(), vars.end());
        AbstractState a = gen_abstract(rng, vs, -4, 4, 0.0);
        auto stores = enumerate_stores(a, vs, -4, 4);

        ExprPtr e = gen_expr(rng, vars, o, 3);
        BExpr b = gen_cond(rng, vars, o);
        const std::string& x = vars.front();
        AbstractState asg = a_assign(x, *e, a);
        AbstractState gd = a_guard(b, a);
        for (const auto& mu : stores) {
            Store mu2 = mu;
            mu2[x] = eval_expr(*e, mu);
            ++checks;
            if (!in_gamma_a(asg, mu2)) out.fail("assign " + x + " := " + to_string(*e) + " on " + to_string(a));
            if (eval_bool(b, mu) && !in_gamma_a(gd, mu)) out.fail("guard " + to_string(b) + " on " + to_string(a));
        }

        GenOptions co;
        co.max_depth = 3;
        co.max_vars = static_cast<unsigned>(vars.size());
        CmdPtr c = gen_command(rng, vars, co);
        AbstractState res = analyze(*c, a);
        for (const auto& mu : stores) {
            Outcome r = run(c, mu, 5000);
            if (!r.terminated()) continue;
            ++checks;
            if (!in_gamma_a(res, *r.final_store)) {
                out.fail("analyze " + to_string(*c) + " from " + to_string(mu) + " gave " + to_string(res));
            }
        }
    }

    const char* nested[] = {
        "while (i < 100) { x := 0; while (x < i) { y := 0; while (y < x) { y := y + 1; } x := x + 1; } i := i + 1; }",
        "while (i != 5) { while (x > y) { while (y < 3 * x) { y := y + x; x := x - 1; } x := x + i; } i := i + 1; }",
        "while (i < x) { if (i > 0) { while (x < y) { while (y > 0) { y := y - i; } x := x + 2; } } i := i * 2; }",
    };
    double worst = 0;
    for (const char* src : nested) {
        Program p = parse_program(std::string("low i, x, y; ") + src);
        for (bool top : {true, false}) {
            AbstractState a = top ? AbstractState::top(p.all_vars)
                                  : AbstractState::of({{"i", Interval::point(0)}, {"x", Interval::point(0)},
                                                       {"y", Interval::point(0)}});
            auto start = Clock::now();
            analyze(*p.body, a);
            double secs = since(start);
            worst = std::max(worst, secs);
            if (secs >= 1.0) out.fail(std::string("analyze took ") + std::to_string(secs) + " s on " + src);
        }
    }
    out.detail = "350 commands, " + std::to_string(checks) + " store checks, nested loops in at most " +
                 std::to_string(worst * 1000).substr(0, 5) + " ms";
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ dependence_soundness() {
    Outcome_ out;
    Rng rng(1005);
    long pairs = 0;
    for (int n = 0; n < 320; ++n) {
        Program p = gen_program(rng);
        DepState d = dep_analyze(*p.body, PcLevel::Low, DepState{p.low_vars});
        for (int m = 0; m < 20; ++m) {
            Store mu0 = gen_store(rng, p.all_vars, -8, 8);
            Store mu1 = gen_low_equal(rng, mu0, p.low_vars, -8, 8);
            Outcome r0 = run(p, mu0, 20000), r1 = run(p, mu1, 20000);
            if (!r0.terminated() || !r1.terminated()) continue;
            ++pairs;
            if (!low_equal(*r0.final_store, *r1.final_store, d.low_agree)) {
                out.fail(to_string(*p.body) + " claims " + to_string(d));
            }
        }
    }
    out.detail = "320 programs, " + std::to_string(pairs) + " terminating pairs";
    return out;
}

// ---------------------------------------------------------------------------

Outcome_ pruning() {
    Outcome_ out;
    CorpusProgram g = load_corpus_program(corpus_dir_arg + "/g_dead_branch.imp");
    std::string summary;
    for (const auto& cfg : default_matrix()) {
        Verdict v = verify_ni(g.program, cfg, test_solver());
        bool want_secure = cfg.engine == EngineKind::RedSoundRSE && cfg.single_engine == SingleEngine::RedSoundSE;
        Verdict::Kind want = want_secure ? Verdict::Kind::Secure : Verdict::Kind::Inconclusive;
        summary += (summary.empty() ? "" : ", ") + cfg.label() + "=" + to_string(v.kind);
        if (v.kind != want) {
            out.fail(cfg.label() + " gave " + to_string(v.kind));
        }
    }
    out.detail = summary;
    return out;
}

} // namespace

int main(int argc, char** argv) {
    corpus_dir_arg = argc > 1 ? argv[1] : corpus_dir();
    std::cout << "solver: " << (have_external_solver() ? "external" : "brute force") << "\n";
    struct Criterion {
        const char* name;
        std::function<Outcome_()> run;
    };
    std::vector<Criterion> criteria{
        {"verdict grid", grid},
        {"trace regression on (d)", trace_regression},
        {"coverage of concrete runs", coverage},
        {"refutations replay", refutation_replay},
        {"reduction equivalence", reduction_equivalence},
        {"interval soundness", interval_soundness},
        {"dependence soundness", dependence_soundness},
        {"pruning on (g)", pruning},
    };
    std::vector<std::string> lines;
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = Clock::now();
        Outcome_ r;
        try {
            r = criteria[i].run();
        } catch (const std::exception& e) {
            r.fail(std::string("exception: ") + e.what());
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f s", since(start));
        std::string line = "criterion " + std::to_string(i + 1) + " " + (r.pass ? "PASS" : "FAIL") + ": " +
                           criteria[i].name + " (" + r.detail + ", " + buf + ")";
        std::cout << line << "\n";
        for (const auto& f : r.failures) {
            std::cout << "    " << f << "\n";
        }
        std::cout.flush();
        lines.push_back(line);
        all = all && r.pass;
    }
    std::cout << "\nsummary\n";
    for (const auto& l : lines) {
        std::cout << l << "\n";
    }
    return all ? 0 : 1;
}
