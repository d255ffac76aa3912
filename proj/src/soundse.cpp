#include "soundni/soundse.hpp"

#include <algorithm>

namespace soundni {

std::string to_string(const Counter& w) {
    std::string out = "[";
    for (std::size_t i = 0; i < w.size(); ++i) {
        out += (i ? "," : "") + std::to_string(w[i]);
    }
    return out + "]";
}

PathCapExceeded::PathCapExceeded(std::size_t cap)
    : std::runtime_error("path cap of " + std::to_string(cap) + " exceeded") {}

std::vector<SEStep> se_step(const CmdPtr& cmd, const PreciseStore& kappa, Solver& solver) {
    Redex r = decompose(cmd);
    const Command& c = *r.redex;
    std::vector<SEStep> out;
    auto emit = [&](CmdPtr next, PreciseStore k, Rule rule) {
        out.push_back(SEStep{plug(r.context, next), std::move(k), rule, r.redex, next});
    };
    if (const auto* seq = std::get_if<Command::Seq>(&c.node)) {
        emit(seq->second, kappa, Rule::SeqExit);
    } else if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
        PreciseStore k = kappa;
        k.rho[a->var] = sym_eval_expr(*a->rhs, kappa.rho);
        emit(c_skip(), std::move(k), Rule::Assign);
    } else if (const auto* i = std::get_if<Command::If>(&c.node)) {
        SymPathPtr beta = sym_eval_bool(i->cond, kappa.rho);
        SymPathPtr pt = p_and(kappa.path, beta);
        if (may_sat(solver, pt)) {
            emit(i->then_branch, PreciseStore{kappa.rho, pt}, Rule::IfTrue);
        }
        SymPathPtr pf = p_and(kappa.path, p_not(beta));
        if (may_sat(solver, pf)) {
            emit(i->else_branch, PreciseStore{kappa.rho, pf}, Rule::IfFalse);
        }
    } else if (const auto* w = std::get_if<Command::While>(&c.node)) {
        SymPathPtr beta = sym_eval_bool(w->cond, kappa.rho);
        SymPathPtr pt = p_and(kappa.path, beta);
        if (may_sat(solver, pt)) {
            emit(c_seq(w->body, c_while(w->cond, w->body, true)), PreciseStore{kappa.rho, pt}, Rule::LoopTrue);
        }
        SymPathPtr pf = p_and(kappa.path, p_not(beta));
        if (may_sat(solver, pf)) {
            emit(c_skip(), PreciseStore{kappa.rho, pf}, Rule::LoopFalse);
        }
    }
    return out;
}

std::pair<bool, Counter> counter_step(const Command& c, const Command& c2, const Counter& w, unsigned k) {
    const auto* loop = std::get_if<Command::While>(&c.node);
    if (!loop) {
        return {true, w};
    }
    Counter out = w;
    if (c2.is_skip()) {
        if (loop->iterating && !out.empty()) {
            out.pop_back();
        }
        return {true, out};
    }
    if (!loop->iterating) {
        out.push_back(0);
    }
    if (out.back() < k) {
        ++out.back();
        return {true, out};
    }
    out.pop_back();
    return {false, out};
}

SymStore modif(const SymStore& rho, const Command& c, SymbolFactory& symbols) {
    SymStore out = rho;
    for (const auto& x : assigned_vars(c)) {
        out[x] = s_sym(symbols.fresh(x));
    }
    return out;
}

std::vector<SETransition> bounded_step(const SEState& s, const EngineContext& ctx) {
    std::vector<SETransition> out;
    for (auto& st : se_step(s.cmd, s.kappa, ctx.solver)) {
        auto [ok, w] = counter_step(*st.redex, *st.redex_next, s.w, ctx.bound);
        if (ok) {
            out.push_back({SEState{std::move(st.cmd), std::move(st.kappa), std::move(w), s.precise}, st.rule});
            continue;
        }
        Redex r = decompose(s.cmd);
        PreciseStore k{modif(s.kappa.rho, *r.redex, ctx.symbols), s.kappa.path};
        out.push_back({SEState{plug(r.context, c_skip()), std::move(k), std::move(w), false}, Rule::ApproxMany});
    }
    return out;
}

std::vector<SEFinal> se_explore(const Program& p, const PreciseStore& kappa0, const EngineContext& ctx) {
    std::vector<SEFinal> finals;
    std::vector<SEState> stack{SEState{p.body, kappa0, {}, true}};
    while (!stack.empty()) {
        SEState s = std::move(stack.back());
        stack.pop_back();
        if (s.cmd->is_skip()) {
            finals.push_back({std::move(s.kappa), s.precise});
            continue;
        }
        auto next = bounded_step(s, ctx);
        for (auto it = next.rbegin(); it != next.rend(); ++it) {
            stack.push_back(std::move(it->state));
        }
        if (stack.size() + finals.size() > ctx.path_cap) {
            throw PathCapExceeded(ctx.path_cap);
        }
    }
    return finals;
}

} // namespace soundni
