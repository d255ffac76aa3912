#include "soundni/absint.hpp"

#include <algorithm>
#include <stdexcept>

namespace soundni {

bool Interval::contains(const Value& v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }

std::string to_string(const Interval& i) {
    return "[" + (i.lo ? to_string(*i.lo) : std::string("-oo")) + ", " + (i.hi ? to_string(*i.hi) : std::string("+oo")) +
           "]";
}

namespace {

// Extended integer: sign of infinity, or a finite value when inf == 0.
struct Ext {
    int inf = 0;
    Value v;
};

Ext lo_ext(const Interval& i) { return i.lo ? Ext{0, *i.lo} : Ext{-1, 0}; }
Ext hi_ext(const Interval& i) { return i.hi ? Ext{0, *i.hi} : Ext{1, 0}; }

bool ext_less(const Ext& a, const Ext& b) {
    if (a.inf != b.inf) {
        return a.inf < b.inf;
    }
    return a.inf == 0 && a.v < b.v;
}

int sign(const Ext& e) {
    if (e.inf != 0) {
        return e.inf;
    }
    return sgn(e.v);
}

Ext ext_mul(const Ext& a, const Ext& b) {
    if ((a.inf == 0 && a.v == 0) || (b.inf == 0 && b.v == 0)) {
        return {0, 0};
    }
    if (a.inf != 0 || b.inf != 0) {
        return {sign(a) * sign(b), 0};
    }
    return {0, a.v * b.v};
}

std::optional<Value> finite(const Ext& e) {
    if (e.inf != 0) {
        return std::nullopt;
    }
    return e.v;
}

} // namespace

Interval operator+(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.lo) r.lo = *a.lo + *b.lo;
    if (a.hi && b.hi) r.hi = *a.hi + *b.hi;
    return r;
}

Interval operator-(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.hi) r.lo = *a.lo - *b.hi;
    if (a.hi && b.lo) r.hi = *a.hi - *b.lo;
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    Ext c[4] = {ext_mul(lo_ext(a), lo_ext(b)), ext_mul(lo_ext(a), hi_ext(b)), ext_mul(hi_ext(a), lo_ext(b)),
                ext_mul(hi_ext(a), hi_ext(b))};
    Ext mn = c[0], mx = c[0];
    for (const auto& e : c) {
        if (ext_less(e, mn)) mn = e;
        if (ext_less(mx, e)) mx = e;
    }
    return Interval{finite(mn), finite(mx)};
}

std::optional<Interval> meet(const Interval& a, const Interval& b) {
    Interval r;
    r.lo = !a.lo ? b.lo : !b.lo ? a.lo : std::optional<Value>(std::max(*a.lo, *b.lo));
    r.hi = !a.hi ? b.hi : !b.hi ? a.hi : std::optional<Value>(std::min(*a.hi, *b.hi));
    if (r.lo && r.hi && *r.lo > *r.hi) {
        return std::nullopt;
    }
    return r;
}

Interval hull(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.lo) r.lo = std::min(*a.lo, *b.lo);
    if (a.hi && b.hi) r.hi = std::max(*a.hi, *b.hi);
    return r;
}

bool subset(const Interval& a, const Interval& b) {
    bool lo_ok = !b.lo || (a.lo && *b.lo <= *a.lo);
    bool hi_ok = !b.hi || (a.hi && *a.hi <= *b.hi);
    return lo_ok && hi_ok;
}

AbstractState AbstractState::bottom() { return AbstractState{}; }

AbstractState AbstractState::top(const VarSet& vars) {
    AbstractState a;
    a.bottom_ = false;
    for (const auto& x : vars) {
        a.env_[x] = Interval::top();
    }
    return a;
}

AbstractState AbstractState::of(std::map<std::string, Interval> env) {
    AbstractState a;
    a.bottom_ = false;
    a.env_ = std::move(env);
    return a;
}

const Interval& AbstractState::at(const std::string& x) const {
    auto it = env_.find(x);
    if (it == env_.end()) {
        throw std::out_of_range("abstract state has no variable '" + x + "'");
    }
    return it->second;
}

std::string to_string(const AbstractState& a) {
    if (a.is_bottom()) {
        return "bottom";
    }
    std::string out = "{";
    bool first = true;
    for (const auto& [x, i] : a.env()) {
        out += (first ? "" : ", ") + x + " in " + to_string(i);
        first = false;
    }
    return out + "}";
}

bool in_gamma_a(const AbstractState& a, const Store& mu) {
    if (a.is_bottom()) {
        return false;
    }
    for (const auto& [x, i] : a.env()) {
        auto it = mu.find(x);
        if (it == mu.end() || !i.contains(it->second)) {
            return false;
        }
    }
    return true;
}

Interval a_eval(const Expr& e, const AbstractState& a) {
    if (const auto* c = std::get_if<Expr::Const>(&e.node)) {
        return Interval::point(c->value);
    }
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        return a.at(v->name);
    }
    const auto& b = std::get<Expr::Bin>(e.node);
    Interval l = a_eval(*b.lhs, a);
    Interval r = a_eval(*b.rhs, a);
    switch (b.op) {
    case ArithOp::Add: return l + r;
    case ArithOp::Sub: return l - r;
    case ArithOp::Mul: return l * r;
    }
    return Interval::top();
}

AbstractState a_assign(const std::string& x, const Expr& e, const AbstractState& a) {
    if (a.is_bottom()) {
        return a;
    }
    AbstractState out = a;
    out.set(x, a_eval(e, a));
    return out;
}

namespace {

// Narrows the variables of e so that e may still evaluate inside target.
// Returns false when no value of e can.
bool refine(const Expr& e, const Interval& target, AbstractState& a) {
    auto reachable = meet(a_eval(e, a), target);
    if (!reachable) {
        return false;
    }
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        a.set(v->name, *reachable);
        return true;
    }
    const auto* b = std::get_if<Expr::Bin>(&e.node);
    if (!b || b->op == ArithOp::Mul) {
        return true;
    }
    Interval l = a_eval(*b->lhs, a);
    Interval r = a_eval(*b->rhs, a);
    if (b->op == ArithOp::Add) {
        return refine(*b->lhs, *reachable - r, a) && refine(*b->rhs, *reachable - l, a);
    }
    return refine(*b->lhs, *reachable + r, a) && refine(*b->rhs, l - *reachable, a);
}

Interval at_most(const std::optional<Value>& v, int delta) {
    return v ? Interval{std::nullopt, *v + delta} : Interval::top();
}

Interval at_least(const std::optional<Value>& v, int delta) {
    return v ? Interval{*v + delta, std::nullopt} : Interval::top();
}

// Removes c from i when it sits on a bound.
Interval without(const Interval& i, const Value& c) {
    Interval r = i;
    if (r.lo && *r.lo == c) r.lo = c + 1;
    if (r.hi && *r.hi == c) r.hi = c - 1;
    return r;
}

} // namespace

AbstractState a_guard(const BExpr& b, const AbstractState& a) {
    if (a.is_bottom()) {
        return a;
    }
    Interval l = a_eval(*b.lhs, a);
    Interval r = a_eval(*b.rhs, a);
    Interval tl = Interval::top();
    Interval tr = Interval::top();
    switch (b.op) {
    case CmpOp::Lt:
        tl = at_most(r.hi, -1);
        tr = at_least(l.lo, 1);
        break;
    case CmpOp::Le:
        tl = at_most(r.hi, 0);
        tr = at_least(l.lo, 0);
        break;
    case CmpOp::Gt:
        tl = at_least(r.lo, 1);
        tr = at_most(l.hi, -1);
        break;
    case CmpOp::Ge:
        tl = at_least(r.lo, 0);
        tr = at_most(l.hi, 0);
        break;
    case CmpOp::Eq:
        tl = r;
        tr = l;
        break;
    case CmpOp::Ne:
        if (r.is_singleton()) tl = without(l, *r.lo);
        if (l.is_singleton()) tr = without(r, *l.lo);
        if (l.is_singleton() && r.is_singleton() && *l.lo == *r.lo) {
            return AbstractState::bottom();
        }
        break;
    }
    AbstractState out = a;
    if (!refine(*b.lhs, tl, out) || !refine(*b.rhs, tr, out)) {
        return AbstractState::bottom();
    }
    return out;
}

AbstractState a_join(const AbstractState& a0, const AbstractState& a1) {
    if (a0.is_bottom()) return a1;
    if (a1.is_bottom()) return a0;
    std::map<std::string, Interval> env;
    for (const auto& [x, i] : a0.env()) {
        env[x] = hull(i, a1.at(x));
    }
    return AbstractState::of(std::move(env));
}

AbstractState a_widen(const AbstractState& a0, const AbstractState& a1) {
    if (a0.is_bottom()) return a1;
    if (a1.is_bottom()) return a0;
    std::map<std::string, Interval> env;
    for (const auto& [x, i] : a0.env()) {
        const Interval& j = a1.at(x);
        Interval w = i;
        if (!j.lo || (i.lo && *j.lo < *i.lo)) w.lo.reset();
        if (!j.hi || (i.hi && *j.hi > *i.hi)) w.hi.reset();
        env[x] = w;
    }
    return AbstractState::of(std::move(env));
}

bool a_leq(const AbstractState& a0, const AbstractState& a1) {
    if (a0.is_bottom()) return true;
    if (a1.is_bottom()) return false;
    for (const auto& [x, i] : a0.env()) {
        if (!subset(i, a1.at(x))) {
            return false;
        }
    }
    return true;
}

AbstractState a_transfer(Rule r, const Command& redex, const AbstractState& a) {
    switch (r) {
    case Rule::SeqExit:
        return a;
    case Rule::Assign: {
        const auto& as = std::get<Command::Assign>(redex.node);
        return a_assign(as.var, *as.rhs, a);
    }
    case Rule::IfTrue:
        return a_guard(std::get<Command::If>(redex.node).cond, a);
    case Rule::IfFalse:
        return a_guard(negate(std::get<Command::If>(redex.node).cond), a);
    case Rule::LoopTrue:
        return a_guard(std::get<Command::While>(redex.node).cond, a);
    case Rule::LoopFalse:
        return a_guard(negate(std::get<Command::While>(redex.node).cond), a);
    case Rule::ApproxMany:
        break;
    }
    throw std::logic_error("a_transfer: no single-step transfer for approx-many");
}

std::vector<AStep> a_step(const CmdPtr& cmd, const AbstractState& a) {
    Redex r = decompose(cmd);
    const Command& c = *r.redex;
    std::vector<std::pair<CmdPtr, Rule>> cands;
    if (const auto* seq = std::get_if<Command::Seq>(&c.node)) {
        cands.push_back({seq->second, Rule::SeqExit});
    } else if (std::holds_alternative<Command::Assign>(c.node)) {
        cands.push_back({c_skip(), Rule::Assign});
    } else if (const auto* i = std::get_if<Command::If>(&c.node)) {
        cands.push_back({i->then_branch, Rule::IfTrue});
        cands.push_back({i->else_branch, Rule::IfFalse});
    } else if (const auto* w = std::get_if<Command::While>(&c.node)) {
        cands.push_back({c_seq(w->body, c_while(w->cond, w->body, true)), Rule::LoopTrue});
        cands.push_back({c_skip(), Rule::LoopFalse});
    }
    std::vector<AStep> out;
    for (auto& [next, rule] : cands) {
        AbstractState a2 = a_transfer(rule, c, a);
        if (!a2.is_bottom()) {
            out.push_back({plug(r.context, next), std::move(a2), rule});
        }
    }
    return out;
}

namespace {

AbstractState analyze_loop(const Command::While& w, const AbstractState& a, const AnalyzeOptions& opts) {
    BExpr exit_cond = negate(w.cond);
    AbstractState exits = AbstractState::bottom();
    AbstractState entry = a;
    for (unsigned p = 0; p < opts.peel && !entry.is_bottom(); ++p) {
        exits = a_join(exits, a_guard(exit_cond, entry));
        entry = analyze(*w.body, a_guard(w.cond, entry), opts);
    }
    auto body_effect = [&](const AbstractState& head) {
        return a_join(entry, analyze(*w.body, a_guard(w.cond, head), opts));
    };
    AbstractState head = entry;
    for (unsigned iter = 0;; ++iter) {
        AbstractState next = body_effect(head);
        if (a_leq(next, head)) {
            break;
        }
        head = iter < opts.widening_delay ? a_join(head, next) : a_widen(head, next);
    }
    // Keep a narrowed head only while it is still a post-fixpoint.
    for (unsigned n = 0; n < opts.narrowing_passes; ++n) {
        AbstractState narrowed = body_effect(head);
        if (!a_leq(body_effect(narrowed), narrowed)) {
            break;
        }
        head = std::move(narrowed);
    }
    return a_join(exits, a_guard(exit_cond, head));
}

} // namespace

AbstractState analyze(const Command& c, const AbstractState& a, const AnalyzeOptions& opts) {
    if (a.is_bottom()) {
        return a;
    }
    return std::visit(
        [&](const auto& n) -> AbstractState {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Command::Skip>) {
                return a;
            } else if constexpr (std::is_same_v<T, Command::Assign>) {
                return a_assign(n.var, *n.rhs, a);
            } else if constexpr (std::is_same_v<T, Command::If>) {
                return a_join(analyze(*n.then_branch, a_guard(n.cond, a), opts),
                              analyze(*n.else_branch, a_guard(negate(n.cond), a), opts));
            } else if constexpr (std::is_same_v<T, Command::While>) {
                return analyze_loop(n, a, opts);
            } else {
                return analyze(*n.second, analyze(*n.first, a, opts), opts);
            }
        },
        c.node);
}

std::vector<BExpr> constr(const AbstractState& a) {
    if (a.is_bottom()) {
        return {BExpr{CmpOp::Eq, e_const(0), e_const(1)}};
    }
    std::vector<BExpr> out;
    for (const auto& [x, i] : a.env()) {
        if (i.is_singleton()) {
            out.push_back(BExpr{CmpOp::Eq, e_var(x), e_const(*i.lo)});
            continue;
        }
        if (i.lo) out.push_back(BExpr{CmpOp::Ge, e_var(x), e_const(*i.lo)});
        if (i.hi) out.push_back(BExpr{CmpOp::Le, e_var(x), e_const(*i.hi)});
    }
    return out;
}

} // namespace soundni
