#pragma once

#include "soundni/redsoundse.hpp"
#include "soundni/soundse.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace soundni {

class RelSymExpr {
public:
    static RelSymExpr single(SymExprPtr e) { return RelSymExpr(e, e, true); }
    static RelSymExpr pair(SymExprPtr e0, SymExprPtr e1) { return RelSymExpr(std::move(e0), std::move(e1), false); }
    // Single when both sides are syntactically equal.
    static RelSymExpr merge(SymExprPtr e0, SymExprPtr e1);

    bool is_single() const { return single_; }
    const SymExprPtr& proj(int side) const { return side == 0 ? e0_ : e1_; }

private:
    RelSymExpr(SymExprPtr e0, SymExprPtr e1, bool single) : e0_(std::move(e0)), e1_(std::move(e1)), single_(single) {}
    SymExprPtr e0_;
    SymExprPtr e1_;
    bool single_;
};

std::string to_string(const RelSymExpr& e);

using RelSymStore = std::map<std::string, RelSymExpr>;

std::string to_string(const RelSymStore& rho);

struct RelPreciseStore {
    RelSymStore rho;
    SymPathPtr path;
};

SymStore proj(int side, const RelSymStore& rho);

// x -> Single when the sides are syntactically equal or provably equal
// under pi, Pair otherwise.
RelSymStore pairing(const SymStore& rho0, const SymStore& rho1, const SymPathPtr& pi, Solver& solver);

RelSymExpr rel_eval_expr(const Expr& e, const RelSymStore& rho);

struct RelBool {
    SymPathPtr b0;
    SymPathPtr b1;
    bool single = false;
};

RelBool rel_eval_bool(const BExpr& b, const RelSymStore& rho);

// Every variable assigned in c becomes a pair of fresh symbols.
RelSymStore modif_rel(const RelSymStore& rho, const Command& c, SymbolFactory& symbols);

struct Diverged {
    CmdPtr left;
    CmdPtr right;
    CmdPtr cont;
};

using Control = std::variant<CmdPtr, Diverged>;

std::string to_string(const Control& c);

struct RelState {
    Control control;
    RelPreciseStore kappa;
    Counter w;
    bool precise = true;
    // One interval state per run when the single-trace engine is the
    // product with intervals.
    std::optional<std::array<AbstractState, 2>> abs;

    bool is_final() const;
};

enum class RelRule {
    SeqExit,
    Assign,
    IfTT,
    IfTF,
    IfFT,
    IfFF,
    LoopTT,
    LoopTF,
    LoopFT,
    LoopFF,
    ApproxMany,
    CompLeft,
    CompRight,
    Exit
};

const char* to_string(RelRule r);

struct RelTransition {
    RelState state;
    RelRule rule;
    Rule inner = Rule::SeqExit; // single-trace rule for CompLeft/CompRight
};

// Store used after an exhausted loop in unified mode. `loop` is the While
// redex of s.
using LoopHavoc = std::function<RelSymStore(const RelState& s, const Command& loop)>;

struct RelOptions {
    bool product = false; // single-trace engine: product with intervals
    ProductOptions product_opts;
    LoopHavoc havoc; // empty: modif_rel
};

std::vector<RelTransition> srse_step(const RelState& s, const EngineContext& ctx, const RelOptions& opts = {});

struct RelFinal {
    RelPreciseStore kappa;
    bool precise = true;
};

RelState initial_rel_state(const Program& p, const RelSymStore& rho0, const RelOptions& opts);

// Depth-first. The visitor may return false to stop the exploration.
// Throws PathCapExceeded.
void srse_explore(const Program& p, const RelSymStore& rho0, const EngineContext& ctx, const RelOptions& opts,
                  const std::function<bool(const RelFinal&)>& visit);
std::vector<RelFinal> srse_explore(const Program& p, const RelSymStore& rho0, const EngineContext& ctx,
                                   const RelOptions& opts = {});

} // namespace soundni
