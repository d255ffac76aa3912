#include "soundni/dependence.hpp"

#include <algorithm>
#include <iterator>

namespace soundni {

PcLevel join(PcLevel a, PcLevel b) { return a == PcLevel::High || b == PcLevel::High ? PcLevel::High : PcLevel::Low; }

const char* to_string(PcLevel l) { return l == PcLevel::Low ? "L" : "H"; }

std::string to_string(const DepState& d) {
    std::string out = "{";
    for (const auto& x : d.low_agree) {
        out += (out.size() > 1 ? ", " : "") + x;
    }
    return out + "}";
}

namespace {

PcLevel level_of_vars(const VarSet& vars, const DepState& d) {
    for (const auto& x : vars) {
        if (!d.low_agree.count(x)) {
            return PcLevel::High;
        }
    }
    return PcLevel::Low;
}

VarSet intersect(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

} // namespace

PcLevel level_of(const Expr& e, const DepState& d) { return level_of_vars(vars_of(e), d); }

PcLevel level_of(const BExpr& b, const DepState& d) { return level_of_vars(vars_of(b), d); }

DepState dep_analyze(const Command& c, PcLevel pc, const DepState& d) {
    if (std::holds_alternative<Command::Skip>(c.node)) {
        return d;
    }
    if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
        DepState out = d;
        if (pc == PcLevel::Low && level_of(*a->rhs, d) == PcLevel::Low) {
            out.low_agree.insert(a->var);
        } else {
            out.low_agree.erase(a->var);
        }
        return out;
    }
    if (const auto* s = std::get_if<Command::Seq>(&c.node)) {
        return dep_analyze(*s->second, pc, dep_analyze(*s->first, pc, d));
    }
    if (const auto* i = std::get_if<Command::If>(&c.node)) {
        PcLevel inner = join(pc, level_of(i->cond, d));
        DepState t = dep_analyze(*i->then_branch, inner, d);
        DepState f = dep_analyze(*i->else_branch, inner, d);
        return DepState{intersect(t.low_agree, f.low_agree)};
    }
    const auto& w = std::get<Command::While>(c.node);
    DepState cur = d;
    for (;;) {
        PcLevel inner = join(pc, level_of(w.cond, cur));
        DepState next{intersect(cur.low_agree, dep_analyze(*w.body, inner, cur).low_agree)};
        if (next == cur) {
            return cur;
        }
        cur = std::move(next);
    }
}

DepState tau_sym_to_dep(const RelSymStore& rho, const SymPathPtr& pi, Solver& solver) {
    DepState d;
    for (const auto& [x, e] : rho) {
        if (e.is_single() || prove_equal(solver, e.proj(0), e.proj(1), pi)) {
            d.low_agree.insert(x);
        }
    }
    return d;
}

VarSet lambda_dep_to_low(const DepState& d) { return d.low_agree; }

} // namespace soundni
