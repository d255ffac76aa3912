#include "soundni/relational.hpp"

namespace soundni {

RelSymExpr RelSymExpr::merge(SymExprPtr e0, SymExprPtr e1) {
    if (equal(*e0, *e1)) {
        return single(std::move(e0));
    }
    return pair(std::move(e0), std::move(e1));
}

std::string to_string(const RelSymExpr& e) {
    if (e.is_single()) {
        return "<" + to_string(*e.proj(0)) + ">";
    }
    return "<" + to_string(*e.proj(0)) + " | " + to_string(*e.proj(1)) + ">";
}

std::string to_string(const RelSymStore& rho) {
    std::string out = "[";
    bool first = true;
    for (const auto& [x, e] : rho) {
        out += (first ? "" : ", ") + x + " -> " + to_string(e);
        first = false;
    }
    return out + "]";
}

SymStore proj(int side, const RelSymStore& rho) {
    SymStore out;
    for (const auto& [x, e] : rho) {
        out.emplace(x, e.proj(side));
    }
    return out;
}

RelSymStore pairing(const SymStore& rho0, const SymStore& rho1, const SymPathPtr& pi, Solver& solver) {
    RelSymStore out;
    for (const auto& [x, e0] : rho0) {
        const SymExprPtr& e1 = rho1.at(x);
        if (prove_equal(solver, e0, e1, pi)) {
            out.emplace(x, RelSymExpr::single(e0));
        } else {
            out.emplace(x, RelSymExpr::pair(e0, e1));
        }
    }
    return out;
}

namespace {

SymExprPtr eval_side(const Expr& e, const RelSymStore& rho, int side) {
    if (const auto* c = std::get_if<Expr::Const>(&e.node)) {
        return s_const(c->value);
    }
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        auto it = rho.find(v->name);
        if (it == rho.end()) {
            throw EvalError("variable '" + v->name + "' missing from relational store");
        }
        return it->second.proj(side);
    }
    const auto& b = std::get<Expr::Bin>(e.node);
    return s_bin(b.op, eval_side(*b.lhs, rho, side), eval_side(*b.rhs, rho, side));
}

} // namespace

RelSymExpr rel_eval_expr(const Expr& e, const RelSymStore& rho) {
    return RelSymExpr::merge(eval_side(e, rho, 0), eval_side(e, rho, 1));
}

RelBool rel_eval_bool(const BExpr& b, const RelSymStore& rho) {
    RelBool out;
    out.b0 = p_cmp(b.op, eval_side(*b.lhs, rho, 0), eval_side(*b.rhs, rho, 0));
    out.b1 = p_cmp(b.op, eval_side(*b.lhs, rho, 1), eval_side(*b.rhs, rho, 1));
    out.single = equal(*out.b0, *out.b1);
    return out;
}

RelSymStore modif_rel(const RelSymStore& rho, const Command& c, SymbolFactory& symbols) {
    RelSymStore out = rho;
    for (const auto& x : assigned_vars(c)) {
        out.insert_or_assign(x, RelSymExpr::pair(s_sym(symbols.fresh(x)), s_sym(symbols.fresh(x))));
    }
    return out;
}

std::string to_string(const Control& c) {
    if (const auto* cmd = std::get_if<CmdPtr>(&c)) {
        return to_string(**cmd);
    }
    const auto& d = std::get<Diverged>(c);
    return "(" + to_string(*d.left) + ") <> (" + to_string(*d.right) + "); " + to_string(*d.cont);
}

bool RelState::is_final() const {
    const auto* cmd = std::get_if<CmdPtr>(&control);
    return cmd && (*cmd)->is_skip();
}

const char* to_string(RelRule r) {
    switch (r) {
    case RelRule::SeqExit: return "seq-exit";
    case RelRule::Assign: return "assign";
    case RelRule::IfTT: return "if-tt";
    case RelRule::IfTF: return "if-tf";
    case RelRule::IfFT: return "if-ft";
    case RelRule::IfFF: return "if-ff";
    case RelRule::LoopTT: return "loop-tt";
    case RelRule::LoopTF: return "loop-tf";
    case RelRule::LoopFT: return "loop-ft";
    case RelRule::LoopFF: return "loop-ff";
    case RelRule::ApproxMany: return "approx-many";
    case RelRule::CompLeft: return "comp-left";
    case RelRule::CompRight: return "comp-right";
    case RelRule::Exit: return "exit";
    }
    return "?";
}

namespace {

using AbsPair = std::optional<std::array<AbstractState, 2>>;

struct Branch {
    bool t0;
    bool t1;
    SymPathPtr path;
    AbsPair abs;
};

// Guard outcome (t0, t1) for the two runs, or nothing when infeasible.
std::optional<Branch> branch(const RelState& s, const BExpr& cond, const RelBool& beta, bool t0, bool t1,
                             const EngineContext& ctx) {
    if (beta.single && t0 != t1) {
        return std::nullopt;
    }
    SymPathPtr g0 = t0 ? beta.b0 : p_not(beta.b0);
    SymPathPtr g1 = t1 ? beta.b1 : p_not(beta.b1);
    SymPathPtr path = beta.single ? p_and(s.kappa.path, g0) : p_and(p_and(s.kappa.path, g0), g1);
    AbsPair abs;
    if (s.abs) {
        AbstractState a0 = a_guard(t0 ? cond : negate(cond), (*s.abs)[0]);
        AbstractState a1 = a_guard(t1 ? cond : negate(cond), (*s.abs)[1]);
        if (a0.is_bottom() || a1.is_bottom()) {
            return std::nullopt;
        }
        abs = std::array<AbstractState, 2>{std::move(a0), std::move(a1)};
    }
    if (!may_sat(ctx.solver, path)) {
        return std::nullopt;
    }
    if (abs) {
        path = p_and(path, reduction_constraint(proj(0, s.kappa.rho), (*abs)[0]));
        path = p_and(path, reduction_constraint(proj(1, s.kappa.rho), (*abs)[1]));
    }
    return Branch{t0, t1, std::move(path), std::move(abs)};
}

RelRule if_rule(bool t0, bool t1) {
    if (t0) return t1 ? RelRule::IfTT : RelRule::IfTF;
    return t1 ? RelRule::IfFT : RelRule::IfFF;
}

RelRule loop_rule(bool t0, bool t1) {
    if (t0) return t1 ? RelRule::LoopTT : RelRule::LoopTF;
    return t1 ? RelRule::LoopFT : RelRule::LoopFF;
}

std::vector<RelTransition> unified_step(const RelState& s, const CmdPtr& cmd, const EngineContext& ctx,
                                        const RelOptions& opts) {
    Redex r = decompose(cmd);
    const Command& c = *r.redex;
    std::vector<RelTransition> out;
    auto unified = [&](CmdPtr next) -> Control { return plug(r.context, std::move(next)); };
    auto diverged = [&](CmdPtr left, CmdPtr right) -> Control {
        return Diverged{std::move(left), std::move(right), continuation(r.context)};
    };
    auto emit = [&](Control control, SymPathPtr path, AbsPair abs, Counter w, bool precise, RelRule rule,
                    RelSymStore rho) {
        out.push_back({RelState{std::move(control), RelPreciseStore{std::move(rho), std::move(path)}, std::move(w),
                                precise, std::move(abs)},
                       rule});
    };

    if (const auto* seq = std::get_if<Command::Seq>(&c.node)) {
        emit(unified(seq->second), s.kappa.path, s.abs, s.w, s.precise, RelRule::SeqExit, s.kappa.rho);
    } else if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
        RelSymStore rho = s.kappa.rho;
        rho.insert_or_assign(a->var, rel_eval_expr(*a->rhs, s.kappa.rho));
        AbsPair abs = s.abs;
        if (abs) {
            for (auto& ai : *abs) {
                ai = a_assign(a->var, *a->rhs, ai);
            }
        }
        emit(unified(c_skip()), s.kappa.path, std::move(abs), s.w, s.precise, RelRule::Assign, std::move(rho));
    } else if (const auto* i = std::get_if<Command::If>(&c.node)) {
        RelBool beta = rel_eval_bool(i->cond, s.kappa.rho);
        for (auto [t0, t1] : {std::pair{true, true}, {true, false}, {false, true}, {false, false}}) {
            auto b = branch(s, i->cond, beta, t0, t1, ctx);
            if (!b) {
                continue;
            }
            Control next = t0 == t1 ? unified(t0 ? i->then_branch : i->else_branch)
                                    : diverged(t0 ? i->then_branch : i->else_branch,
                                               t1 ? i->then_branch : i->else_branch);
            emit(std::move(next), b->path, b->abs, s.w, s.precise, if_rule(t0, t1), s.kappa.rho);
        }
    } else if (const auto* w = std::get_if<Command::While>(&c.node)) {
        RelBool beta = rel_eval_bool(w->cond, s.kappa.rho);
        CmdPtr unroll = c_seq(w->body, c_while(w->cond, w->body, true));
        auto [ok, w_iter] = counter_step(c, *unroll, s.w, ctx.bound);
        Counter w_exit = counter_step(c, *c_skip(), s.w, ctx.bound).second;
        bool may_iterate = false;
        for (auto [t0, t1] : {std::pair{true, true}, {true, false}, {false, true}}) {
            auto b = branch(s, w->cond, beta, t0, t1, ctx);
            if (!b) {
                continue;
            }
            may_iterate = true;
            if (!ok) {
                break;
            }
            Control next = t0 && t1 ? unified(unroll) : diverged(t0 ? unroll : c_skip(), t1 ? unroll : c_skip());
            emit(std::move(next), b->path, b->abs, w_iter, s.precise, loop_rule(t0, t1), s.kappa.rho);
        }
        if (!ok && may_iterate) {
            RelSymStore rho = opts.havoc ? opts.havoc(s, c) : modif_rel(s.kappa.rho, c, ctx.symbols);
            RelBool after = rel_eval_bool(w->cond, rho);
            SymPathPtr path = p_and(s.kappa.path, p_not(after.b0));
            if (!after.single) {
                path = p_and(path, p_not(after.b1));
            }
            AbsPair abs = s.abs;
            bool alive = true;
            if (abs) {
                for (auto& ai : *abs) {
                    ai = analyze(c, ai, opts.product_opts.analyze);
                    alive = alive && !ai.is_bottom();
                }
                if (alive) {
                    path = p_and(path, reduction_constraint(proj(0, rho), (*abs)[0]));
                    path = p_and(path, reduction_constraint(proj(1, rho), (*abs)[1]));
                }
            }
            if (alive && may_sat(ctx.solver, path)) {
                emit(unified(c_skip()), std::move(path), std::move(abs), w_iter, false, RelRule::ApproxMany,
                     std::move(rho));
            }
        }
        if (auto b = branch(s, w->cond, beta, false, false, ctx)) {
            emit(unified(c_skip()), b->path, b->abs, w_exit, s.precise, RelRule::LoopFF, s.kappa.rho);
        }
    }
    return out;
}

std::vector<RelTransition> diverged_step(const RelState& s, const Diverged& d, const EngineContext& ctx,
                                         const RelOptions& opts) {
    std::vector<RelTransition> out;
    int side = !d.left->is_skip() ? 0 : !d.right->is_skip() ? 1 : -1;
    if (side < 0) {
        out.push_back({RelState{d.cont, s.kappa, s.w, s.precise, s.abs}, RelRule::Exit});
        return out;
    }
    const CmdPtr& cmd = side == 0 ? d.left : d.right;
    SymStore other = proj(1 - side, s.kappa.rho);
    RelRule rule = side == 0 ? RelRule::CompLeft : RelRule::CompRight;
    auto emit = [&](CmdPtr next, const PreciseStore& k, std::optional<AbstractState> a, Counter w, bool precise,
                    Rule inner) {
        RelSymStore rho = side == 0 ? pairing(k.rho, other, k.path, ctx.solver) : pairing(other, k.rho, k.path, ctx.solver);
        Control control = side == 0 ? Diverged{std::move(next), d.right, d.cont} : Diverged{d.left, std::move(next), d.cont};
        AbsPair abs = s.abs;
        if (abs && a) {
            (*abs)[side] = std::move(*a);
        }
        out.push_back({RelState{std::move(control), RelPreciseStore{std::move(rho), k.path}, std::move(w), precise,
                                std::move(abs)},
                       rule, inner});
    };
    PreciseStore mine{proj(side, s.kappa.rho), s.kappa.path};
    if (opts.product && s.abs) {
        ProductState ps{cmd, std::move(mine), (*s.abs)[side], s.w, s.precise};
        for (auto& t : product_step(ps, ctx, opts.product_opts)) {
            emit(std::move(t.state.cmd), t.state.kappa, std::move(t.state.a), std::move(t.state.w), t.state.precise,
                 t.rule);
        }
    } else {
        SEState ss{cmd, std::move(mine), s.w, s.precise};
        for (auto& t : bounded_step(ss, ctx)) {
            emit(std::move(t.state.cmd), t.state.kappa, std::nullopt, std::move(t.state.w), t.state.precise, t.rule);
        }
    }
    return out;
}

} // namespace

std::vector<RelTransition> srse_step(const RelState& s, const EngineContext& ctx, const RelOptions& opts) {
    if (const auto* d = std::get_if<Diverged>(&s.control)) {
        return diverged_step(s, *d, ctx, opts);
    }
    return unified_step(s, std::get<CmdPtr>(s.control), ctx, opts);
}

RelState initial_rel_state(const Program& p, const RelSymStore& rho0, const RelOptions& opts) {
    RelState s{p.body, RelPreciseStore{rho0, p_true()}, {}, true, std::nullopt};
    if (opts.product) {
        AbstractState top = AbstractState::top(p.all_vars);
        s.abs = std::array<AbstractState, 2>{top, top};
    }
    return s;
}

void srse_explore(const Program& p, const RelSymStore& rho0, const EngineContext& ctx, const RelOptions& opts,
                  const std::function<bool(const RelFinal&)>& visit) {
    std::vector<RelState> stack{initial_rel_state(p, rho0, opts)};
    std::size_t finals = 0;
    while (!stack.empty()) {
        RelState s = std::move(stack.back());
        stack.pop_back();
        if (s.is_final()) {
            ++finals;
            if (!visit(RelFinal{std::move(s.kappa), s.precise})) {
                return;
            }
            continue;
        }
        auto next = srse_step(s, ctx, opts);
        for (auto it = next.rbegin(); it != next.rend(); ++it) {
            stack.push_back(std::move(it->state));
        }
        if (stack.size() + finals > ctx.path_cap) {
            throw PathCapExceeded(ctx.path_cap);
        }
    }
}

std::vector<RelFinal> srse_explore(const Program& p, const RelSymStore& rho0, const EngineContext& ctx,
                                   const RelOptions& opts) {
    std::vector<RelFinal> out;
    srse_explore(p, rho0, ctx, opts, [&](const RelFinal& f) {
        out.push_back(f);
        return true;
    });
    return out;
}

} // namespace soundni
