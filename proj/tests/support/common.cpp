#include "common.hpp"

#include <cstdlib>

namespace soundni::testing {

namespace {

std::unique_ptr<Solver>& instance() {
    static std::unique_ptr<Solver> s = make_solver(SolverConfig{});
    return s;
}

} // namespace

Solver& test_solver() { return *instance(); }

bool have_external_solver() { return test_solver().name() != "brute-force"; }

std::string corpus_dir() {
    if (const char* env = std::getenv("SOUNDNI_CORPUS")) {
        return env;
    }
    return SOUNDNI_CORPUS_DIR;
}

CorpusProgram corpus_program(const std::string& stem) { return load_corpus_program(corpus_dir() + "/" + stem + ".imp"); }

SymExprPtr sym(const std::string& x) { return s_sym(initial_symbol(x)); }

} // namespace soundni::testing
