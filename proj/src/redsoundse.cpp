#include "soundni/redsoundse.hpp"

#include <stdexcept>

namespace soundni {

SymPathPtr reduction_constraint(const SymStore& rho, const AbstractState& a) {
    SymPathPtr out = p_true();
    for (const auto& b : constr(a)) {
        out = p_and(out, sym_eval_bool(b, rho));
    }
    return out;
}

std::pair<PreciseStore, AbstractState> reduction(const PreciseStore& kappa, const AbstractState& a) {
    if (a.is_bottom()) {
        throw std::invalid_argument("reduction of a bottom abstract state");
    }
    return {PreciseStore{kappa.rho, p_and(kappa.path, reduction_constraint(kappa.rho, a))}, a};
}

namespace {

bool is_branch(Rule r) { return r != Rule::SeqExit && r != Rule::Assign; }

} // namespace

std::vector<ProductTransition> product_step(const ProductState& s, const EngineContext& ctx,
                                            const ProductOptions& opts) {
    std::vector<ProductTransition> out;
    for (auto& st : se_step(s.cmd, s.kappa, ctx.solver)) {
        AbstractState a = a_transfer(st.rule, *st.redex, s.a);
        if (a.is_bottom()) {
            continue;
        }
        auto [ok, w] = counter_step(*st.redex, *st.redex_next, s.w, ctx.bound);
        if (ok) {
            PreciseStore k = std::move(st.kappa);
            if (is_branch(st.rule) || opts.reduce_every_step) {
                k = reduction(k, a).first;
            }
            out.push_back({ProductState{std::move(st.cmd), std::move(k), std::move(a), std::move(w), s.precise}, st.rule});
            continue;
        }
        Redex r = decompose(s.cmd);
        AbstractState summary = analyze(*r.redex, s.a, opts.analyze);
        if (summary.is_bottom()) {
            continue;
        }
        PreciseStore k{modif(s.kappa.rho, *r.redex, ctx.symbols), s.kappa.path};
        k = reduction(k, summary).first;
        out.push_back({ProductState{plug(r.context, c_skip()), std::move(k), std::move(summary), std::move(w), false},
                       Rule::ApproxMany});
    }
    return out;
}

std::vector<ProductFinal> product_explore(const Program& p, const PreciseStore& kappa0, const AbstractState& a0,
                                          const EngineContext& ctx, const ProductOptions& opts) {
    std::vector<ProductFinal> finals;
    if (a0.is_bottom()) {
        return finals;
    }
    std::vector<ProductState> stack{ProductState{p.body, kappa0, a0, {}, true}};
    while (!stack.empty()) {
        ProductState s = std::move(stack.back());
        stack.pop_back();
        if (s.cmd->is_skip()) {
            finals.push_back({std::move(s.kappa), std::move(s.a), s.precise});
            continue;
        }
        auto next = product_step(s, ctx, opts);
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
