#pragma once

#include "soundni/symcore.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace soundni {

struct SatResult {
    enum class Kind { Sat, Unsat, Unknown };
    Kind kind = Kind::Unknown;
    Valuation model; // total on the queried symbols when Sat

    bool sat() const { return kind == Kind::Sat; }
    bool unsat() const { return kind == Kind::Unsat; }
    bool unknown() const { return kind == Kind::Unknown; }
};

const char* to_string(SatResult::Kind k);

// Full SMT-LIB2 script for one satisfiability query: logic, declarations,
// a single assertion, (check-sat) and (get-model).
std::string emit_smtlib(const SymPath& pi, const SymSet& symbols);
std::string smt_term(const SymExpr& e);
std::string smt_term(const SymPath& p);
std::string smt_symbol(const std::string& name);

// Parses a (get-model) response into name -> value. Throws
// std::runtime_error on malformed input.
std::map<std::string, Value> parse_model(const std::string& text);

struct SolverStats {
    std::size_t queries = 0;
    std::size_t presolved = 0;
    std::size_t cache_hits = 0;
    std::size_t backend_calls = 0;
    std::size_t rejected_models = 0;
};

// Front end shared by all backends: trivial cases are decided locally,
// results are memoized by query text, and Sat models are checked against
// the path before being returned.
class Solver {
public:
    virtual ~Solver() = default;

    SatResult check_sat(const SymPathPtr& pi);
    SolverStats stats() const;
    virtual std::string name() const = 0;

protected:
    struct Query {
        std::string logic;
        std::vector<SymValue> symbols;
        std::string script; // declarations and assertion only
    };
    virtual SatResult solve(const Query& q, const SymPath& pi) = 0;

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, SatResult> cache_;
    SolverStats stats_;
};

bool may_sat(Solver& s, const SymPathPtr& pi);
bool prove_equal(Solver& s, const SymExprPtr& e0, const SymExprPtr& e1, const SymPathPtr& pi);

// Talks SMT-LIB2 to an external process over pipes. The process is kept
// alive across queries and each query starts with (reset), so queries do
// not share assertions.
class ProcessSolver : public Solver {
public:
    // `command` is a program path optionally followed by arguments. For a
    // z3 binary without arguments, "-in -smt2 -t:<timeout>" is supplied.
    ProcessSolver(std::string command, unsigned timeout_ms);
    ~ProcessSolver() override;
    ProcessSolver(const ProcessSolver&) = delete;
    ProcessSolver& operator=(const ProcessSolver&) = delete;

    std::string name() const override { return "smtlib:" + argv_.front(); }
    // Spawns the process once and checks that it answers a trivial query.
    bool available();

protected:
    SatResult solve(const Query& q, const SymPath& pi) override;

private:
    std::vector<std::string> argv_;
    unsigned timeout_ms_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;
    bool failed_to_start_ = false;

    bool start();
    void stop();
    bool send(const std::string& text);
    bool read_line(std::string& line, long deadline_ms);
    bool read_sexpr(std::string& out, long deadline_ms);
};

// Enumerates every symbol over [lo, hi]. Never answers Unsat for a path with
// symbols: a failed search only means no witness inside the box.
class BruteForceSolver : public Solver {
public:
    BruteForceSolver(Value lo = -8, Value hi = 8, std::size_t budget = 200000);
    std::string name() const override { return "brute-force"; }

protected:
    SatResult solve(const Query& q, const SymPath& pi) override;

private:
    Value lo_;
    Value hi_;
    std::size_t budget_;
};

struct SolverConfig {
    std::string command; // empty: look up z3 on PATH
    unsigned timeout_ms = 5000;
    bool brute_force = false;
};

// Falls back to BruteForceSolver when no external solver can be started.
std::unique_ptr<Solver> make_solver(const SolverConfig& cfg);
std::string find_default_solver();

} // namespace soundni
