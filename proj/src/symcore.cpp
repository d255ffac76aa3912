#include "soundni/symcore.hpp"

#include <sstream>

namespace soundni {

SymValue initial_symbol(const std::string& var) { return SymValue{var, Origin::Initial, var, -1, 0}; }

SymValue initial_symbol(const std::string& var, int side) {
    return SymValue{var + "." + std::to_string(side), Origin::Initial, var, side, 0};
}

SymValue SymbolFactory::fresh(const std::string& hint) {
    std::uint64_t n = next_.fetch_add(1);
    return SymValue{hint + "#" + std::to_string(n), Origin::Fresh, hint, -1, n};
}

SymExprPtr s_const(Value v) { return std::make_shared<SymExpr>(SymExpr{SymExpr::Const{std::move(v)}}); }
SymExprPtr s_sym(SymValue v) { return std::make_shared<SymExpr>(SymExpr{SymExpr::Sym{std::move(v)}}); }

SymExprPtr s_bin_raw(ArithOp op, SymExprPtr lhs, SymExprPtr rhs) {
    return std::make_shared<SymExpr>(SymExpr{SymExpr::Bin{op, std::move(lhs), std::move(rhs)}});
}

const Value* as_const(const SymExpr& e) {
    if (const auto* c = std::get_if<SymExpr::Const>(&e.node)) {
        return &c->value;
    }
    return nullptr;
}

namespace {

std::pair<SymExprPtr, Value> split_offset(const SymExprPtr& e) {
    if (const auto* b = std::get_if<SymExpr::Bin>(&e->node)) {
        if (const Value* c = as_const(*b->rhs)) {
            if (b->op == ArithOp::Add) {
                return {b->lhs, *c};
            }
            if (b->op == ArithOp::Sub) {
                return {b->lhs, -*c};
            }
        }
    }
    return {e, Value(0)};
}

SymExprPtr with_offset(SymExprPtr base, const Value& off) {
    if (off == 0) {
        return base;
    }
    if (off > 0) {
        return s_bin_raw(ArithOp::Add, std::move(base), s_const(off));
    }
    return s_bin_raw(ArithOp::Sub, std::move(base), s_const(-off));
}

} // namespace

SymExprPtr s_bin(ArithOp op, SymExprPtr lhs, SymExprPtr rhs) {
    const Value* l = as_const(*lhs);
    const Value* r = as_const(*rhs);
    if (l && r) {
        return s_const(apply(op, *l, *r));
    }
    switch (op) {
    case ArithOp::Add:
        if (l) {
            auto [base, off] = split_offset(rhs);
            return with_offset(base, off + *l);
        }
        if (r) {
            auto [base, off] = split_offset(lhs);
            return with_offset(base, off + *r);
        }
        break;
    case ArithOp::Sub:
        if (r) {
            auto [base, off] = split_offset(lhs);
            return with_offset(base, off - *r);
        }
        break;
    case ArithOp::Mul:
        if ((l && *l == 0) || (r && *r == 0)) {
            return s_const(0);
        }
        if (l && *l == 1) {
            return rhs;
        }
        if (r && *r == 1) {
            return lhs;
        }
        break;
    }
    return s_bin_raw(op, std::move(lhs), std::move(rhs));
}

SymExprPtr fold(const SymExprPtr& e) {
    if (const auto* b = std::get_if<SymExpr::Bin>(&e->node)) {
        return s_bin(b->op, fold(b->lhs), fold(b->rhs));
    }
    return e;
}

namespace {

SymPathPtr make_path(SymPath::True t) { return std::make_shared<SymPath>(SymPath{t}); }

} // namespace

SymPathPtr p_true() {
    static const SymPathPtr t = make_path(SymPath::True{});
    return t;
}

SymPathPtr p_false() {
    static const SymPathPtr f = std::make_shared<SymPath>(SymPath{SymPath::Not{p_true()}});
    return f;
}

bool is_true(const SymPath& p) { return std::holds_alternative<SymPath::True>(p.node); }

bool is_false(const SymPath& p) {
    const auto* n = std::get_if<SymPath::Not>(&p.node);
    return n && is_true(*n->inner);
}

SymPathPtr p_cmp(CmpOp op, SymExprPtr lhs, SymExprPtr rhs) {
    const Value* l = as_const(*lhs);
    const Value* r = as_const(*rhs);
    if (l && r) {
        return apply(op, *l, *r) ? p_true() : p_false();
    }
    if (equal(*lhs, *rhs)) {
        bool reflexive = op == CmpOp::Eq || op == CmpOp::Le || op == CmpOp::Ge;
        return reflexive ? p_true() : p_false();
    }
    return std::make_shared<SymPath>(SymPath{SymPath::Cmp{op, std::move(lhs), std::move(rhs)}});
}

SymPathPtr p_and(SymPathPtr lhs, SymPathPtr rhs) {
    if (is_true(*lhs) || is_false(*rhs)) {
        return rhs;
    }
    if (is_true(*rhs) || is_false(*lhs)) {
        return lhs;
    }
    return std::make_shared<SymPath>(SymPath{SymPath::And{std::move(lhs), std::move(rhs)}});
}

SymPathPtr p_not(SymPathPtr p) {
    if (const auto* n = std::get_if<SymPath::Not>(&p->node)) {
        return n->inner;
    }
    return std::make_shared<SymPath>(SymPath{SymPath::Not{std::move(p)}});
}

SymPathPtr p_or(SymPathPtr lhs, SymPathPtr rhs) { return p_not(p_and(p_not(std::move(lhs)), p_not(std::move(rhs)))); }

SymPathPtr p_conj(const std::vector<SymPathPtr>& ps) {
    SymPathPtr acc = p_true();
    for (const auto& p : ps) {
        acc = p_and(acc, p);
    }
    return acc;
}

SymPathPtr p_disj(const std::vector<SymPathPtr>& ps) {
    SymPathPtr acc = p_false();
    for (const auto& p : ps) {
        acc = is_false(*acc) ? p : p_or(acc, p);
    }
    return acc;
}

namespace {

void flatten(const SymPathPtr& p, std::vector<SymPathPtr>& out) {
    if (const auto* a = std::get_if<SymPath::And>(&p->node)) {
        flatten(a->lhs, out);
        flatten(a->rhs, out);
    } else if (!is_true(*p)) {
        out.push_back(p);
    }
}

} // namespace

std::vector<SymPathPtr> conjuncts(const SymPathPtr& p) {
    std::vector<SymPathPtr> out;
    flatten(p, out);
    return out;
}

bool equal(const SymExpr& a, const SymExpr& b) {
    if (&a == &b) {
        return true;
    }
    if (a.node.index() != b.node.index()) {
        return false;
    }
    if (const auto* x = std::get_if<SymExpr::Const>(&a.node)) {
        return x->value == std::get<SymExpr::Const>(b.node).value;
    }
    if (const auto* x = std::get_if<SymExpr::Sym>(&a.node)) {
        return x->symbol == std::get<SymExpr::Sym>(b.node).symbol;
    }
    const auto& x = std::get<SymExpr::Bin>(a.node);
    const auto& y = std::get<SymExpr::Bin>(b.node);
    return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
}

bool equal(const SymPath& a, const SymPath& b) {
    if (&a == &b) {
        return true;
    }
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, SymPath::True>) {
                return true;
            } else if constexpr (std::is_same_v<T, SymPath::Cmp>) {
                return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
            } else if constexpr (std::is_same_v<T, SymPath::And>) {
                return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
            } else {
                return equal(*x.inner, *y.inner);
            }
        },
        a.node);
}

std::string to_string(const SymValue& v) { return v.name; }

namespace {

int precedence(const SymExpr& e) {
    if (const auto* b = std::get_if<SymExpr::Bin>(&e.node)) {
        return b->op == ArithOp::Mul ? 2 : 1;
    }
    return 3;
}

void print(const SymExpr& e, std::ostream& os) {
    if (const auto* c = std::get_if<SymExpr::Const>(&e.node)) {
        os << to_string(c->value);
    } else if (const auto* s = std::get_if<SymExpr::Sym>(&e.node)) {
        os << s->symbol.name;
    } else {
        const auto& b = std::get<SymExpr::Bin>(e.node);
        int p = precedence(e);
        bool lp = precedence(*b.lhs) < p;
        bool rp = precedence(*b.rhs) <= p;
        if (lp) os << '(';
        print(*b.lhs, os);
        if (lp) os << ')';
        os << ' ' << to_string(b.op) << ' ';
        if (rp) os << '(';
        print(*b.rhs, os);
        if (rp) os << ')';
    }
}

void print(const SymPath& p, std::ostream& os) {
    if (is_true(p)) {
        os << "true";
    } else if (is_false(p)) {
        os << "false";
    } else if (const auto* c = std::get_if<SymPath::Cmp>(&p.node)) {
        print(*c->lhs, os);
        os << ' ' << to_string(c->op) << ' ';
        print(*c->rhs, os);
    } else if (const auto* a = std::get_if<SymPath::And>(&p.node)) {
        print(*a->lhs, os);
        os << " && ";
        print(*a->rhs, os);
    } else {
        os << "!(";
        print(*std::get<SymPath::Not>(p.node).inner, os);
        os << ')';
    }
}

} // namespace

std::string to_string(const SymExpr& e) {
    std::ostringstream os;
    print(e, os);
    return os.str();
}

std::string to_string(const SymPath& p) {
    std::ostringstream os;
    print(p, os);
    return os.str();
}

std::string to_string(const SymStore& rho) {
    std::string out = "[";
    bool first = true;
    for (const auto& [x, e] : rho) {
        if (!first) {
            out += ", ";
        }
        first = false;
        out += x + " -> " + to_string(*e);
    }
    return out + "]";
}

void collect_symbols(const SymExpr& e, SymSet& out) {
    if (const auto* s = std::get_if<SymExpr::Sym>(&e.node)) {
        out.insert(s->symbol);
    } else if (const auto* b = std::get_if<SymExpr::Bin>(&e.node)) {
        collect_symbols(*b->lhs, out);
        collect_symbols(*b->rhs, out);
    }
}

void collect_symbols(const SymPath& p, SymSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymPath::Cmp>) {
                collect_symbols(*n.lhs, out);
                collect_symbols(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, SymPath::And>) {
                collect_symbols(*n.lhs, out);
                collect_symbols(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, SymPath::Not>) {
                collect_symbols(*n.inner, out);
            }
        },
        p.node);
}

SymSet symbols_of(const SymPath& p) {
    SymSet out;
    collect_symbols(p, out);
    return out;
}

namespace {

bool has_symbol(const SymExpr& e) {
    if (std::holds_alternative<SymExpr::Sym>(e.node)) {
        return true;
    }
    if (const auto* b = std::get_if<SymExpr::Bin>(&e.node)) {
        return has_symbol(*b->lhs) || has_symbol(*b->rhs);
    }
    return false;
}

bool nonlinear(const SymExpr& e) {
    if (const auto* b = std::get_if<SymExpr::Bin>(&e.node)) {
        if (b->op == ArithOp::Mul && has_symbol(*b->lhs) && has_symbol(*b->rhs)) {
            return true;
        }
        return nonlinear(*b->lhs) || nonlinear(*b->rhs);
    }
    return false;
}

} // namespace

bool has_nonlinear(const SymPath& p) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymPath::Cmp>) {
                return nonlinear(*n.lhs) || nonlinear(*n.rhs);
            } else if constexpr (std::is_same_v<T, SymPath::And>) {
                return has_nonlinear(*n.lhs) || has_nonlinear(*n.rhs);
            } else if constexpr (std::is_same_v<T, SymPath::Not>) {
                return has_nonlinear(*n.inner);
            } else {
                return false;
            }
        },
        p.node);
}

MissingSymbol::MissingSymbol(const SymValue& s)
    : std::runtime_error("valuation has no value for symbol " + s.name), symbol(s) {}

SymExprPtr sym_eval_expr(const Expr& e, const SymStore& rho) {
    return std::visit(
        [&](const auto& n) -> SymExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Const>) {
                return s_const(n.value);
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                auto it = rho.find(n.name);
                if (it == rho.end()) {
                    throw EvalError("variable '" + n.name + "' missing from symbolic store");
                }
                return it->second;
            } else {
                return s_bin(n.op, sym_eval_expr(*n.lhs, rho), sym_eval_expr(*n.rhs, rho));
            }
        },
        e.node);
}

SymPathPtr sym_eval_bool(const BExpr& b, const SymStore& rho) {
    return p_cmp(b.op, sym_eval_expr(*b.lhs, rho), sym_eval_expr(*b.rhs, rho));
}

Value eval_sym(const SymExpr& e, const Valuation& nu) {
    return std::visit(
        [&](const auto& n) -> Value {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymExpr::Const>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, SymExpr::Sym>) {
                auto it = nu.find(n.symbol);
                if (it == nu.end()) {
                    throw MissingSymbol(n.symbol);
                }
                return it->second;
            } else {
                return apply(n.op, eval_sym(*n.lhs, nu), eval_sym(*n.rhs, nu));
            }
        },
        e.node);
}

bool eval_path(const SymPath& p, const Valuation& nu) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymPath::True>) {
                return true;
            } else if constexpr (std::is_same_v<T, SymPath::Cmp>) {
                return apply(n.op, eval_sym(*n.lhs, nu), eval_sym(*n.rhs, nu));
            } else if constexpr (std::is_same_v<T, SymPath::And>) {
                return eval_path(*n.lhs, nu) && eval_path(*n.rhs, nu);
            } else {
                return !eval_path(*n.inner, nu);
            }
        },
        p.node);
}

bool in_gamma_m(const SymStore& rho, const Store& mu, const Valuation& nu) {
    if (rho.size() != mu.size()) {
        return false;
    }
    for (const auto& [x, e] : rho) {
        auto it = mu.find(x);
        if (it == mu.end() || it->second != eval_sym(*e, nu)) {
            return false;
        }
    }
    return true;
}

bool in_gamma_k(const PreciseStore& kappa, const Store& mu, const Valuation& nu) {
    return in_gamma_m(kappa.rho, mu, nu) && eval_path(*kappa.path, nu);
}

SymStore initial_sym_store(const VarSet& vars) {
    SymStore rho;
    for (const auto& x : vars) {
        rho[x] = s_sym(initial_symbol(x));
    }
    return rho;
}

} // namespace soundni
