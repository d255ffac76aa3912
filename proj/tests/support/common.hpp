#pragma once

#include "soundni/driver.hpp"
#include "soundni/solver.hpp"

#include <string>

namespace soundni::testing {

// External solver when one is installed, brute force otherwise. Shared by
// all tests of a binary.
Solver& test_solver();
bool have_external_solver();

std::string corpus_dir();
CorpusProgram corpus_program(const std::string& stem);

// Symbol of variable x in an initial single-trace store.
SymExprPtr sym(const std::string& x);

} // namespace soundni::testing
