#pragma once

#include "soundni/lang.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace soundni {

// An empty optional bound is infinite on that side.
struct Interval {
    std::optional<Value> lo;
    std::optional<Value> hi;

    static Interval top() { return {}; }
    static Interval point(const Value& v) { return {v, v}; }
    static Interval range(const Value& lo, const Value& hi) { return {lo, hi}; }

    bool contains(const Value& v) const;
    bool is_top() const { return !lo && !hi; }
    bool is_singleton() const { return lo && hi && *lo == *hi; }
    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

std::string to_string(const Interval& i);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
std::optional<Interval> meet(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);
bool subset(const Interval& a, const Interval& b);

class AbstractState {
public:
    static AbstractState bottom();
    static AbstractState top(const VarSet& vars);
    static AbstractState of(std::map<std::string, Interval> env);

    bool is_bottom() const { return bottom_; }
    const std::map<std::string, Interval>& env() const { return env_; }
    const Interval& at(const std::string& x) const;
    void set(const std::string& x, Interval i) { env_[x] = std::move(i); }

    bool operator==(const AbstractState& o) const { return bottom_ == o.bottom_ && env_ == o.env_; }

private:
    bool bottom_ = true;
    std::map<std::string, Interval> env_;
};

std::string to_string(const AbstractState& a);

bool in_gamma_a(const AbstractState& a, const Store& mu);

Interval a_eval(const Expr& e, const AbstractState& a);
AbstractState a_assign(const std::string& x, const Expr& e, const AbstractState& a);
AbstractState a_guard(const BExpr& b, const AbstractState& a);
AbstractState a_join(const AbstractState& a0, const AbstractState& a1);
AbstractState a_widen(const AbstractState& a0, const AbstractState& a1);
bool a_leq(const AbstractState& a0, const AbstractState& a1);

// Abstract effect of one step of `redex` taken by rule r. Undefined for
// ApproxMany.
AbstractState a_transfer(Rule r, const Command& redex, const AbstractState& a);

struct AStep {
    CmdPtr cmd;
    AbstractState a;
    Rule rule;
};

// Successors whose abstract state is not bottom.
std::vector<AStep> a_step(const CmdPtr& cmd, const AbstractState& a);

struct AnalyzeOptions {
    unsigned widening_delay = 2;
    unsigned narrowing_passes = 1;
    unsigned peel = 1; // loop iterations analysed separately before the fixpoint
};

AbstractState analyze(const Command& c, const AbstractState& a, const AnalyzeOptions& opts = {});

// Bound constraints of a non-bottom state, one conjunct per finite bound
// (or one equality for a singleton). Bottom gives the single conjunct 0 == 1.
std::vector<BExpr> constr(const AbstractState& a);

} // namespace soundni
