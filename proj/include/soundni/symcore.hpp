#pragma once

#include "soundni/lang.hpp"

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace soundni {

enum class Origin { Initial, Fresh };

// Identity is the name. Initial symbols are named after their variable
// ("x", or "x.0"/"x.1" for the two runs of a relational analysis); fresh
// symbols are "x#n".
struct SymValue {
    std::string name;
    Origin origin = Origin::Initial;
    std::string var;
    int side = -1; // -1 shared, 0 or 1 per run
    std::uint64_t generation = 0;

    bool operator==(const SymValue& o) const { return name == o.name; }
    std::strong_ordering operator<=>(const SymValue& o) const { return name <=> o.name; }
};

SymValue initial_symbol(const std::string& var);
SymValue initial_symbol(const std::string& var, int side);

class SymbolFactory {
public:
    SymValue fresh(const std::string& hint);
    std::uint64_t issued() const { return next_.load(); }

private:
    std::atomic<std::uint64_t> next_{1};
};

struct SymExpr;
using SymExprPtr = std::shared_ptr<const SymExpr>;

struct SymExpr {
    struct Const {
        Value value;
    };
    struct Sym {
        SymValue symbol;
    };
    struct Bin {
        ArithOp op;
        SymExprPtr lhs;
        SymExprPtr rhs;
    };
    std::variant<Const, Sym, Bin> node;
};

SymExprPtr s_const(Value v);
SymExprPtr s_sym(SymValue v);
// Folds constants: constant operands are evaluated, neutral and absorbing
// constants are dropped, and constant offsets merge, so ((x + 1) + 1)
// becomes (x + 2).
SymExprPtr s_bin(ArithOp op, SymExprPtr lhs, SymExprPtr rhs);
// Builds the node without folding.
SymExprPtr s_bin_raw(ArithOp op, SymExprPtr lhs, SymExprPtr rhs);
SymExprPtr fold(const SymExprPtr& e);

const Value* as_const(const SymExpr& e);

struct SymPath;
using SymPathPtr = std::shared_ptr<const SymPath>;

struct SymPath {
    struct True {};
    struct Cmp {
        CmpOp op;
        SymExprPtr lhs;
        SymExprPtr rhs;
    };
    struct And {
        SymPathPtr lhs;
        SymPathPtr rhs;
    };
    struct Not {
        SymPathPtr inner;
    };
    std::variant<True, Cmp, And, Not> node;
};

SymPathPtr p_true();
SymPathPtr p_false();
// Comparisons between constants fold to true/false.
SymPathPtr p_cmp(CmpOp op, SymExprPtr lhs, SymExprPtr rhs);
SymPathPtr p_and(SymPathPtr lhs, SymPathPtr rhs);
SymPathPtr p_not(SymPathPtr p);
SymPathPtr p_or(SymPathPtr lhs, SymPathPtr rhs);
SymPathPtr p_conj(const std::vector<SymPathPtr>& ps);
SymPathPtr p_disj(const std::vector<SymPathPtr>& ps);

bool is_true(const SymPath& p);
bool is_false(const SymPath& p);
// Flattens nested conjunctions into a list of conjuncts.
std::vector<SymPathPtr> conjuncts(const SymPathPtr& p);

bool equal(const SymExpr& a, const SymExpr& b);
bool equal(const SymPath& a, const SymPath& b);

std::string to_string(const SymValue& v);
std::string to_string(const SymExpr& e);
std::string to_string(const SymPath& p);

using SymSet = std::set<SymValue>;
void collect_symbols(const SymExpr& e, SymSet& out);
void collect_symbols(const SymPath& p, SymSet& out);
SymSet symbols_of(const SymPath& p);
bool has_nonlinear(const SymPath& p);

using SymStore = std::map<std::string, SymExprPtr>;

struct PreciseStore {
    SymStore rho;
    SymPathPtr path;
};

std::string to_string(const SymStore& rho);

using Valuation = std::map<SymValue, Value>;

class MissingSymbol : public std::runtime_error {
public:
    explicit MissingSymbol(const SymValue& s);
    SymValue symbol;
};

SymExprPtr sym_eval_expr(const Expr& e, const SymStore& rho);
SymPathPtr sym_eval_bool(const BExpr& b, const SymStore& rho);

Value eval_sym(const SymExpr& e, const Valuation& nu);
bool eval_path(const SymPath& p, const Valuation& nu);

// (mu, nu) in gamma_M(rho)
bool in_gamma_m(const SymStore& rho, const Store& mu, const Valuation& nu);
// (mu, nu) in gamma_K(kappa): store match and path holds
bool in_gamma_k(const PreciseStore& kappa, const Store& mu, const Valuation& nu);

SymStore initial_sym_store(const VarSet& vars);

} // namespace soundni
