#include "common.hpp"
#include "gen.hpp"
#include "walk.hpp"

#include <doctest.h>

using namespace soundni;
using namespace soundni::testing;

namespace {

SymExprPtr s0(const char* x) { return s_sym(initial_symbol(x, 0)); }
SymExprPtr s1(const char* x) { return s_sym(initial_symbol(x, 1)); }

std::vector<RelTransition> first_steps(const Program& p, const EngineContext& ctx, const RelOptions& opts = {}) {
    return srse_step(initial_rel_state(p, initial_rel_store(p), opts), ctx, opts);
}

const RelTransition* with_rule(const std::vector<RelTransition>& ts, RelRule r) {
    for (const auto& t : ts) {
        if (t.rule == r) {
            return &t;
        }
    }
    return nullptr;
}

} // namespace

TEST_CASE("relational expressions") {
    RelSymExpr a = RelSymExpr::single(sym("i"));
    CHECK(a.is_single());
    CHECK(a.proj(0) == a.proj(1));
    CHECK(to_string(a) == "<i>");
    RelSymExpr b = RelSymExpr::pair(s0("priv"), s1("priv"));
    CHECK_FALSE(b.is_single());
    CHECK(to_string(b) == "<priv.0 | priv.1>");
    CHECK(RelSymExpr::merge(s_const(5), s_const(5)).is_single());
    CHECK_FALSE(RelSymExpr::merge(s0("x"), s1("x")).is_single());
}

TEST_CASE("proj and rel_eval") {
    RelSymStore rho{{"i", RelSymExpr::single(sym("i"))}, {"priv", RelSymExpr::pair(s0("priv"), s1("priv"))}};
    CHECK(equal(*proj(1, rho).at("priv"), *s1("priv")));
    CHECK(equal(*proj(0, rho).at("i"), *sym("i")));

    RelSymExpr e = rel_eval_expr(*e_bin(ArithOp::Add, e_var("i"), e_const(1)), rho);
    CHECK(e.is_single());
    CHECK(to_string(e) == "<i + 1>");
    RelSymExpr f = rel_eval_expr(*e_bin(ArithOp::Add, e_var("i"), e_var("priv")), rho);
    CHECK(to_string(f) == "<i + priv.0 | i + priv.1>");

    RelBool low = rel_eval_bool(BExpr{CmpOp::Lt, e_var("i"), e_const(10)}, rho);
    CHECK(low.single);
    CHECK(equal(*low.b0, *low.b1));
    RelBool high = rel_eval_bool(BExpr{CmpOp::Gt, e_var("priv"), e_const(0)}, rho);
    CHECK_FALSE(high.single);
    CHECK(to_string(*high.b1) == "priv.1 > 0");
}

TEST_CASE("pairing merges provably equal sides") {
    Solver& s = test_solver();
    SymStore r0{{"i", s0("i")}, {"y", s_const(5)}};
    SymStore r1{{"i", s1("i")}, {"y", s_const(5)}};
    RelSymStore loose = pairing(r0, r1, p_true(), s);
    CHECK(loose.at("y").is_single());
    CHECK_FALSE(loose.at("i").is_single());
    RelSymStore tight = pairing(r0, r1, p_cmp(CmpOp::Eq, s0("i"), s1("i")), s);
    CHECK(tight.at("i").is_single());
}

TEST_CASE("modif_rel") {
    CorpusProgram b = corpus_program("b_low_loop");
    SymbolFactory f;
    RelSymStore rho = initial_rel_store(b.program);
    RelSymStore out = modif_rel(rho, *b.program.body, f);
    CHECK_FALSE(out.at("i").is_single());
    CHECK_FALSE(out.at("priv").is_single());
    CHECK(out.at("z").is_single());
    CHECK_FALSE(equal(*out.at("i").proj(0), *out.at("i").proj(1)));
}

TEST_CASE("a high guard splits four ways") {
    CorpusProgram a = corpus_program("a_same_branches");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f};
    auto next = first_steps(a.program, ctx);
    REQUIRE(next.size() == 4);
    CHECK(next[0].rule == RelRule::IfTT);
    CHECK(std::holds_alternative<CmdPtr>(next[0].state.control));
    const RelTransition* tf = with_rule(next, RelRule::IfTF);
    REQUIRE(tf != nullptr);
    REQUIRE(std::holds_alternative<Diverged>(tf->state.control));
    SymValue p0 = initial_symbol("priv", 0), p1 = initial_symbol("priv", 1);
    CHECK(eval_path(*tf->state.kappa.path, {{p0, 1}, {p1, 0}}));
    CHECK_FALSE(eval_path(*tf->state.kappa.path, {{p0, 1}, {p1, 1}}));

    auto finals = srse_explore(a.program, initial_rel_store(a.program), ctx);
    REQUIRE(finals.size() == 4);
    for (const auto& fin : finals) {
        CHECK(fin.precise);
        CHECK(fin.kappa.rho.at("y").is_single());
        CHECK(to_string(fin.kappa.rho.at("y")) == "<5>");
    }
}

TEST_CASE("a low guard runs in lockstep") {
    Program p = parse_program("low x, y; high h; if (x > 0) { y := 1 } else { y := h }");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f};
    auto next = first_steps(p, ctx);
    REQUIRE(next.size() == 2);
    CHECK(next[0].rule == RelRule::IfTT);
    CHECK(next[1].rule == RelRule::IfFF);
    auto finals = srse_explore(p, initial_rel_store(p), ctx);
    REQUIRE(finals.size() == 2);
    CHECK(finals[0].kappa.rho.at("y").is_single());
    CHECK_FALSE(finals[1].kappa.rho.at("y").is_single());
}

TEST_CASE("diverged runs step left then right and rejoin") {
    Program p = parse_program("low y; high h; if (h > 0) { y := 1; y := y + 1 } else { y := 2 } y := y * 3;");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f};
    RelState s = with_rule(first_steps(p, ctx), RelRule::IfTF)->state;
    std::vector<RelRule> rules;
    while (!s.is_final()) {
        auto next = srse_step(s, ctx);
        REQUIRE(next.size() == 1);
        rules.push_back(next[0].rule);
        s = next[0].state;
    }
    std::vector<RelRule> want{RelRule::CompLeft, RelRule::CompLeft, RelRule::CompLeft, RelRule::CompRight,
                              RelRule::Exit,     RelRule::Assign};
    std::string got;
    for (RelRule r : rules) {
        got += std::string(to_string(r)) + " ";
    }
    INFO(got);
    CHECK(rules == want);
    CHECK(to_string(s.kappa.rho.at("y")) == "<6>");
}

TEST_CASE("skip explores to the initial store") {
    Program p = parse_program("low x; high h; skip");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f};
    auto finals = srse_explore(p, initial_rel_store(p), ctx);
    REQUIRE(finals.size() == 1);
    CHECK(to_string(finals[0].kappa.rho) == to_string(initial_rel_store(p)));
    CHECK(is_true(*finals[0].kappa.path));
}

TEST_CASE("the visitor can stop the exploration") {
    CorpusProgram a = corpus_program("a_same_branches");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f};
    int seen = 0;
    srse_explore(a.program, initial_rel_store(a.program), ctx, {}, [&](const RelFinal&) {
        ++seen;
        return false;
    });
    CHECK(seen == 1);
}

TEST_CASE("an exhausted low loop is summarized once") {
    CorpusProgram b = corpus_program("b_low_loop");
    SymbolFactory f;
    EngineContext ctx{test_solver(), f, 2};
    int approx = 0;
    for (const auto& fin : srse_explore(b.program, initial_rel_store(b.program), ctx)) {
        approx += !fin.precise;
    }
    CHECK(approx == 1);
}

TEST_CASE("property: pairing preserves both projections") {
    Solver& s = test_solver();
    Rng rng(51);
    std::vector<SymValue> syms{initial_symbol("a", 0), initial_symbol("a", 1), initial_symbol("b")};
    for (int n = 0; n < 150; ++n) {
        SymStore r0, r1;
        for (const char* x : {"u", "v"}) {
            r0[x] = fold(gen_sym_expr(rng, syms, 1));
            r1[x] = coin(rng, 0.3) ? r0[x] : fold(gen_sym_expr(rng, syms, 1));
        }
        SymPathPtr pi = gen_sym_path(rng, syms, 1);
        RelSymStore rho = pairing(r0, r1, pi, s);
        for_each_valuation(syms, -2, 2, [&](const Valuation& nu) {
            if (!eval_path(*pi, nu)) {
                return true;
            }
            for (const char* x : {"u", "v"}) {
                CHECK(eval_sym(*rho.at(x).proj(0), nu) == eval_sym(*r0.at(x), nu));
                CHECK(eval_sym(*rho.at(x).proj(1), nu) == eval_sym(*r1.at(x), nu));
            }
            return true;
        });
    }
}

TEST_CASE("property: coverage of concrete run pairs") {
    Rng rng(52);
    int walks = 0, approximated = 0, diverged = 0;
    for (int n = 0; n < 200; ++n) {
        Program p = gen_program(rng);
        Store mu0 = gen_store(rng, p.all_vars);
        Store mu1 = gen_low_equal(rng, mu0, p.low_vars);
        if (!run(p, mu0, 5000).terminated() || !run(p, mu1, 5000).terminated()) {
            continue;
        }
        SymbolFactory f;
        EngineContext ctx{test_solver(), f, static_cast<unsigned>(uniform(rng, 0, 3))};
        RelOptions opts;
        opts.product = coin(rng);
        RelWalkResult r = walk_rel(p, initial_rel_store(p), mu0, mu1, ctx, opts);
        INFO(to_string(*p.body), " from ", to_string(mu0), " / ", to_string(mu1));
        CHECK_MESSAGE(r.ok, r.failure);
        ++walks;
        approximated += r.approximations > 0;
        diverged += r.steps > 0 && mu0 != mu1;
    }
    CHECK(walks > 100);
    CHECK(approximated > 10);
    CHECK(diverged > 50);
}
