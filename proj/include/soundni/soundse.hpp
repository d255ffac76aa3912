#pragma once

#include "soundni/solver.hpp"
#include "soundni/symcore.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace soundni {

// One entry per active loop activation, innermost on top.
using Counter = std::vector<unsigned>;

std::string to_string(const Counter& w);

struct EngineContext {
    Solver& solver;
    SymbolFactory& symbols;
    unsigned bound = 3;
    std::size_t path_cap = 4096;
};

class PathCapExceeded : public std::runtime_error {
public:
    explicit PathCapExceeded(std::size_t cap);
};

struct SEState {
    CmdPtr cmd;
    PreciseStore kappa;
    Counter w;
    bool precise = true;
};

// A step of the plain symbolic relation on the redex of `cmd`.
struct SEStep {
    CmdPtr cmd;
    PreciseStore kappa;
    Rule rule;
    CmdPtr redex;
    CmdPtr redex_next;
};

// Successors ordered true branch first; infeasible branches are pruned with
// may_sat.
std::vector<SEStep> se_step(const CmdPtr& cmd, const PreciseStore& kappa, Solver& solver);

// Returns (tt, w') to allow the step c -> c2, or (ff, w') with the loop's
// entry popped once the iteration budget k is spent.
std::pair<bool, Counter> counter_step(const Command& c, const Command& c2, const Counter& w, unsigned k);

// Every variable assigned somewhere in c gets a fresh symbol.
SymStore modif(const SymStore& rho, const Command& c, SymbolFactory& symbols);

struct SETransition {
    SEState state;
    Rule rule;
};

std::vector<SETransition> bounded_step(const SEState& s, const EngineContext& ctx);

struct SEFinal {
    PreciseStore kappa;
    bool precise = true;
};

// Depth-first, true branch first. Throws PathCapExceeded.
std::vector<SEFinal> se_explore(const Program& p, const PreciseStore& kappa0, const EngineContext& ctx);

} // namespace soundni
