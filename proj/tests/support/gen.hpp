#pragma once

#include "soundni/absint.hpp"
#include "soundni/lang.hpp"
#include "soundni/symcore.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace soundni::testing {

using Rng = std::mt19937_64;

struct GenOptions {
    unsigned max_depth = 4;  // nesting of if/while
    unsigned max_vars = 4;
    int const_lo = -3;
    int const_hi = 3;
    unsigned max_block = 3;  // statements per block
    double loop_weight = 1.0;
    bool allow_var_mul = false;
    unsigned loop_nesting = 2; // at most this many nested loops
};

std::vector<std::string> var_names(unsigned n);

ExprPtr gen_expr(Rng& rng, const std::vector<std::string>& vars, const GenOptions& o, unsigned depth = 2);
BExpr gen_cond(Rng& rng, const std::vector<std::string>& vars, const GenOptions& o);
CmdPtr gen_command(Rng& rng, const std::vector<std::string>& vars, const GenOptions& o);

// Random program over 1..max_vars variables with a random low set.
Program gen_program(Rng& rng, const GenOptions& o = {});

Store gen_store(Rng& rng, const VarSet& vars, int lo = -8, int hi = 8);
// A store equal to mu on `low` and random elsewhere.
Store gen_low_equal(Rng& rng, const Store& mu, const VarSet& low, int lo = -8, int hi = 8);

// Random interval state whose bounds lie in [lo, hi] (or are infinite).
AbstractState gen_abstract(Rng& rng, const VarSet& vars, int lo = -4, int hi = 4, double inf_prob = 0.2);

// Every store with values in [lo, hi] that lies in gamma(a).
std::vector<Store> enumerate_stores(const AbstractState& a, const VarSet& vars, int lo, int hi);

// Unfolded symbolic terms over `symbols`, for oracle tests of folding and
// the solver.
SymExprPtr gen_sym_expr(Rng& rng, const std::vector<SymValue>& symbols, unsigned depth = 2, bool nonlinear = false);
SymPathPtr gen_sym_path(Rng& rng, const std::vector<SymValue>& symbols, unsigned depth = 2, bool nonlinear = false);
// Every valuation of `symbols` over [lo, hi], passed to f until f returns false.
void for_each_valuation(const std::vector<SymValue>& symbols, int lo, int hi,
                        const std::function<bool(const Valuation&)>& f);

int uniform(Rng& rng, int lo, int hi);
bool coin(Rng& rng, double p = 0.5);

} // namespace soundni::testing
