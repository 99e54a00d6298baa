#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pks::cli {

/// Exit statuses of dispatch().
enum ExitCode : int {
    kOk = 0,
    kValidation = 2,     ///< bad flags or out-of-domain numbers
    kNotApplicable = 3,  ///< criterion unsatisfied, subcritical mass
    kNumerical = 4,      ///< non-convergence or failed self-check
};

/// Runs one command line (without the program name). Reports go to `out`
/// (or to --out), diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Rounds to 12 significant digits; the JSON writer then prints the shortest
/// representation of the rounded value.
double round12(double v);

}  // namespace pks::cli
