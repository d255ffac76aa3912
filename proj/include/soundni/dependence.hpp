#pragma once

#include "soundni/lang.hpp"
#include "soundni/relational.hpp"

#include <string>

namespace soundni {

// Variables known to agree across the two runs. Everything else is high.
struct DepState {
    VarSet low_agree;

    bool operator==(const DepState& o) const { return low_agree == o.low_agree; }
};

enum class PcLevel { Low, High };

PcLevel join(PcLevel a, PcLevel b);
const char* to_string(PcLevel l);
std::string to_string(const DepState& d);

PcLevel level_of(const Expr& e, const DepState& d);
PcLevel level_of(const BExpr& b, const DepState& d);

DepState dep_analyze(const Command& c, PcLevel pc, const DepState& d);

// x is low when its two projections are provably equal under pi.
DepState tau_sym_to_dep(const RelSymStore& rho, const SymPathPtr& pi, Solver& solver);

VarSet lambda_dep_to_low(const DepState& d);

} // namespace soundni
