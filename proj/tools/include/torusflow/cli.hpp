#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "torusflow/cycle_basis.hpp"

namespace torusflow::cli {

enum ExitCode : int {
    kFound = 0,
    kInputError = 1,
    kInternalError = 2,
    kNoSolution = 3,
    kVerificationFailure = 4,
};

struct RunConfig {
    std::string command;
    /// Problem, elastic problem or case JSON.
    std::string input;
    /// Built-in case name, used when no input file is given.
    std::string case_name;
    /// Case file backing rts24-mod.
    std::string data;
    std::optional<double> gamma;
    double rho = 1e-10;
    BasisKind basis = BasisKind::fundamental;
    /// json or csv; empty selects the command's default.
    std::string format;
    int jobs = 1;
    /// Output path; stdout when empty.
    std::string out;
    std::uint64_t seed = 1;
    /// Solutions report for check / decompose.
    std::string solutions;
    // sweep
    double tol = 1e-6;
    int samples = 11;
    // gen
    std::string family = "ring";
    int size = 5;
    double load = 0.1;

    /// Throws InputError on out-of-range settings.
    void validate() const;
};

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_windings(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_basis(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_decompose(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.command and maps library errors to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs; the executable's main.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace torusflow::cli
