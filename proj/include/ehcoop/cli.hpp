#pragma once

#include <string>
#include <vector>

namespace ehcoop::cli {

/// Runs the solver command line. Exit status: 0 on success, 1 when the
/// computed policy is infeasible or --verify fails, 2 on input errors
/// (bad arguments, missing or malformed trace file).
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace ehcoop::cli
