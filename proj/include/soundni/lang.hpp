#pragma once

#include "soundni/value.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace soundni {

enum class ArithOp { Add, Sub, Mul };
enum class CmpOp { Lt, Le, Eq, Ne, Gt, Ge };

const char* to_string(ArithOp op);
const char* to_string(CmpOp op);
CmpOp negate(CmpOp op);
// a op b  <=>  b (flip op) a
CmpOp flip(CmpOp op);
Value apply(ArithOp op, const Value& a, const Value& b);
bool apply(CmpOp op, const Value& a, const Value& b);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    struct Const {
        Value value;
    };
    struct Var {
        std::string name;
    };
    struct Bin {
        ArithOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    std::variant<Const, Var, Bin> node;
};

ExprPtr e_const(Value v);
ExprPtr e_var(std::string name);
ExprPtr e_bin(ArithOp op, ExprPtr lhs, ExprPtr rhs);

struct BExpr {
    CmpOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

BExpr negate(const BExpr& b);

struct Command;
using CmdPtr = std::shared_ptr<const Command>;

struct Command {
    struct Skip {};
    struct Assign {
        std::string var;
        ExprPtr rhs;
    };
    struct If {
        BExpr cond;
        CmdPtr then_branch;
        CmdPtr else_branch;
    };
    // `iterating` marks a loop that has been unrolled at least once in the
    // current activation. Concrete semantics ignores it; bounded symbolic
    // execution uses it to tell loop entry from loop continuation.
    struct While {
        BExpr cond;
        CmdPtr body;
        bool iterating = false;
    };
    struct Seq {
        CmdPtr first;
        CmdPtr second;
    };
    std::variant<Skip, Assign, If, While, Seq> node;

    bool is_skip() const { return std::holds_alternative<Skip>(node); }
};

CmdPtr c_skip();
CmdPtr c_assign(std::string var, ExprPtr rhs);
CmdPtr c_if(BExpr cond, CmdPtr then_branch, CmdPtr else_branch);
CmdPtr c_while(BExpr cond, CmdPtr body, bool iterating = false);
CmdPtr c_seq(CmdPtr first, CmdPtr second);
// Right-nested sequence; empty list gives skip.
CmdPtr c_block(const std::vector<CmdPtr>& stmts);

using VarSet = std::set<std::string>;
using Store = std::map<std::string, Value>;

struct Program {
    CmdPtr body;
    VarSet low_vars;
    VarSet all_vars;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line;
    std::size_t column;
};

Program parse_program(const std::string& text);
Program load_program(const std::string& path);

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Value eval_expr(const Expr& e, const Store& mu);
bool eval_bool(const BExpr& b, const Store& mu);

struct ConcreteState {
    CmdPtr cmd;
    Store store;
};

// Throws std::logic_error on a skip state.
ConcreteState concrete_step(const ConcreteState& s);

struct Outcome {
    std::optional<Store> final_store; // empty means out of fuel
    std::size_t steps = 0;

    bool terminated() const { return final_store.has_value(); }
};

Outcome run(const Program& p, const Store& mu, std::size_t fuel);
Outcome run(const CmdPtr& c, const Store& mu, std::size_t fuel);

bool low_equal(const Store& mu0, const Store& mu1, const VarSet& low);

VarSet assigned_vars(const Command& c);
VarSet vars_of(const Expr& e);
VarSet vars_of(const BExpr& b);

bool equal(const Expr& a, const Expr& b);
bool equal(const BExpr& a, const BExpr& b);
// Structural equality; the loop `iterating` marker is compared too.
bool equal(const Command& a, const Command& b);

std::string to_string(const Expr& e);
std::string to_string(const BExpr& b);
std::string to_string(const Command& c);
std::string to_string(const Store& mu);

// Splits a command into its next redex and the chain of pending
// continuations. `context` lists the right operands of the enclosing Seq
// nodes, innermost last. The redex is either a non-Seq command or
// Seq(skip, c).
struct Redex {
    CmdPtr redex;
    std::vector<CmdPtr> context;
};

Redex decompose(const CmdPtr& c);
CmdPtr plug(const std::vector<CmdPtr>& context, CmdPtr hole);
// The command left to run after the redex; skip when the context is empty.
CmdPtr continuation(const std::vector<CmdPtr>& context);

// Which rule produced a single-trace step. Shared by the symbolic, abstract
// and product step relations so their successors can be matched.
enum class Rule { SeqExit, Assign, IfTrue, IfFalse, LoopTrue, LoopFalse, ApproxMany };
const char* to_string(Rule r);

} // namespace soundni
