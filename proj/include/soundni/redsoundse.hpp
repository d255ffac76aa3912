#pragma once

#include "soundni/absint.hpp"
#include "soundni/soundse.hpp"

#include <utility>
#include <vector>

namespace soundni {

struct ProductOptions {
    AnalyzeOptions analyze;
    bool reduce_every_step = false;
};

struct ProductState {
    CmdPtr cmd;
    PreciseStore kappa;
    AbstractState a;
    Counter w;
    bool precise = true;
};

// pi' = pi && constr(a)[x -> rho(x)]. Requires a non-bottom state.
std::pair<PreciseStore, AbstractState> reduction(const PreciseStore& kappa, const AbstractState& a);

// constr(a) evaluated in rho, as a single path formula.
SymPathPtr reduction_constraint(const SymStore& rho, const AbstractState& a);

struct ProductTransition {
    ProductState state;
    Rule rule;
};

std::vector<ProductTransition> product_step(const ProductState& s, const EngineContext& ctx,
                                            const ProductOptions& opts = {});

struct ProductFinal {
    PreciseStore kappa;
    AbstractState a;
    bool precise = true;
};

std::vector<ProductFinal> product_explore(const Program& p, const PreciseStore& kappa0, const AbstractState& a0,
                                          const EngineContext& ctx, const ProductOptions& opts = {});

} // namespace soundni
