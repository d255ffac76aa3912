#pragma once

#include "soundni/redsoundse.hpp"
#include "soundni/relational.hpp"

#include <optional>
#include <string>

namespace soundni::testing {

// Follows one concrete run through an engine's step relation. At every step
// the successor whose rule matches the concrete control flow is taken; when
// a loop is summarized, the loop is run concretely to the end and the fresh
// symbols are bound to the values it produced. After each step the concrete
// store must lie in the concretization of the symbolic (and abstract) state.
struct WalkResult {
    bool ok = true;
    std::string failure;
    std::size_t steps = 0;
    std::size_t approximations = 0;
};

WalkResult walk_se(const Program& p, const Store& mu, const EngineContext& ctx, std::size_t fuel = 100000);
WalkResult walk_product(const Program& p, const Store& mu, const EngineContext& ctx, const ProductOptions& opts = {},
                        std::size_t fuel = 100000);

struct RelWalkResult : WalkResult {
    std::optional<RelPreciseStore> final_kappa;
    bool precise = true;
    Valuation nu;
    Store out0;
    Store out1;
};

// mu0 and mu1 must agree on p.low_vars.
RelWalkResult walk_rel(const Program& p, const RelSymStore& rho0, const Store& mu0, const Store& mu1,
                       const EngineContext& ctx, const RelOptions& opts, std::size_t fuel = 100000);

// Binds the initial symbols of rho0 to the two stores.
Valuation initial_valuation(const RelSymStore& rho0, const Store& mu0, const Store& mu1);

} // namespace soundni::testing
