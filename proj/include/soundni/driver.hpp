#pragma once

#include "soundni/dependence.hpp"
#include "soundni/relational.hpp"
#include "soundni/solver.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace soundni {

enum class EngineKind { Dep, SoundRSE, RedSoundRSE };
enum class SingleEngine { SoundSE, RedSoundSE };
enum class DomainKind { Intervals, None };

const char* to_string(EngineKind e);
const char* to_string(SingleEngine e);
const char* to_string(DomainKind d);
// Throw std::invalid_argument on unknown names.
EngineKind parse_engine(const std::string& s);
SingleEngine parse_single_engine(const std::string& s);
DomainKind parse_domain(const std::string& s);

struct AnalysisConfig {
    EngineKind engine = EngineKind::RedSoundRSE;
    SingleEngine single_engine = SingleEngine::SoundSE;
    DomainKind domain = DomainKind::Intervals;
    unsigned bound = 3;
    std::size_t path_cap = 4096;
    std::size_t fuel = 1000000; // concrete steps per replayed run
    bool all_paths = false;
    AnalyzeOptions analyze;
    SolverConfig solver;

    // Throws std::invalid_argument.
    void validate() const;
    // "dep", "soundrse+soundse", ...
    std::string label() const;
};

struct CounterExample {
    Valuation nu;
    Store mu0;
    Store mu1;
    Store out0;
    Store out1;
    std::string witness;
};

struct AlarmPath {
    std::string description;
    std::string store;
    std::string path;
    bool precise = true;
};

struct Verdict {
    enum class Kind { Secure, Insecure, Inconclusive };
    Kind kind = Kind::Inconclusive;
    std::vector<CounterExample> counterexamples; // first one is the reported witness
    std::vector<AlarmPath> alarms;
    std::size_t paths = 0;
    std::string reason;
};

const char* to_string(Verdict::Kind k);

// x in L -> Single(x), otherwise Pair(x.0, x.1).
RelSymStore initial_rel_store(const Program& p);

RelSymStore modif_dep(const RelSymStore& rho, const Command& c, const VarSet& low, SymbolFactory& symbols);

// Havoc for exhausted loops driven by the dependence analysis.
LoopHavoc dependence_havoc(Solver& solver, SymbolFactory& symbols);

RelOptions rel_options(const AnalysisConfig& cfg, Solver& solver, SymbolFactory& symbols);

std::vector<RelTransition> rsrse_step(const RelState& s, const EngineContext& ctx, const AnalysisConfig& cfg);

struct PathVerdict {
    enum class Kind { Infeasible, SecurePath, Refutation, Alarm };
    Kind kind = Kind::Alarm;
    Valuation model;
    std::string witness;
};

const char* to_string(PathVerdict::Kind k);

PathVerdict classify_path(const RelPreciseStore& kappa, bool precise, const VarSet& low, Solver& solver);

class ReplayFailure : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Missing initial symbols of rho0 are taken as 0.
CounterExample replay(const Valuation& nu, const RelSymStore& rho0, const Program& p, std::size_t fuel);

Verdict verify_ni(const Program& p, const AnalysisConfig& cfg, Solver& solver);
Verdict verify_ni(const Program& p, const AnalysisConfig& cfg);

// A program file plus the pragmas read from its comments:
//   // ni:bound N          minimum loop bound
//   // ni:expect secure    ground truth, used to label alarms
struct CorpusProgram {
    std::string name;
    std::string path;
    Program program;
    unsigned min_bound = 0;
    std::optional<bool> expect_secure;
};

CorpusProgram load_corpus_program(const std::string& path);
// *.imp files in name order. Throws std::runtime_error on a missing directory.
std::vector<CorpusProgram> load_corpus(const std::string& dir);

// The five columns: dep, then both relational engines over both
// single-trace engines.
std::vector<AnalysisConfig> default_matrix(const AnalysisConfig& base = {});

// "Secure", "Refutation", "False alarm" or "Alarm".
std::string cell_label(const Verdict& v, const std::optional<bool>& expect_secure);

struct CorpusCell {
    Verdict verdict;
    std::string label;
    double seconds = 0;
};

struct CorpusRow {
    std::string program;
    std::optional<bool> expect_secure;
    std::vector<CorpusCell> cells;
};

struct CorpusReport {
    std::vector<std::string> columns;
    std::vector<CorpusRow> rows;
};

CorpusReport run_corpus(const std::vector<CorpusProgram>& programs, const std::vector<AnalysisConfig>& matrix,
                        Solver& solver);
CorpusReport run_corpus(const std::string& dir, const std::vector<AnalysisConfig>& matrix, Solver& solver);

// Deterministic: no timings and no counterexample payloads.
std::string report_json(const CorpusReport& r);
std::string report_text(const CorpusReport& r);

std::string verdict_json(const std::string& program, const AnalysisConfig& cfg, const Verdict& v);
std::string verdict_text(const std::string& program, const AnalysisConfig& cfg, const Verdict& v);

} // namespace soundni
