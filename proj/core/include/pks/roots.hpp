#pragma once

#include <functional>

namespace pks {

struct RootOptions {
    double x_tol = 1e-12;   ///< absolute tolerance on the abscissa
    double rel_tol = 4e-16; ///< relative tolerance on the abscissa
    int max_iterations = 400;
};

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ScalarFn = std::function<double(double)>;

/// Brent's method on a sign-changing bracket [a, b]: bisection safeguarded
/// by secant and inverse-quadratic steps. Throws DomainError if f(a) and
/// f(b) have the same strict sign.
RootResult brent(const ScalarFn& f, double a, double b, const RootOptions& opts = {});

/// Plain bisection; used where the caller needs the sign invariant of the
/// bracket to hold at every iterate.
RootResult bisect(const ScalarFn& f, double a, double b, const RootOptions& opts = {});

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// Geometric search for a sign change of an increasing function on (0, inf),
/// starting from `start` and multiplying/dividing by `factor`. Throws
/// NumericalError after `max_steps` in either direction.
Bracket bracket_increasing(const ScalarFn& f, double start, double factor = 2.0,
                           int max_steps = 1100);

}  // namespace pks
