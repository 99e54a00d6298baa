#pragma once

#include <functional>
#include <initializer_list>
#include <span>

namespace pks {

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|) or the interval budget
/// is exhausted. Error estimates use the QUADPACK scaling of |K15 - G7|.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});

/// Same as above, seeded with the sub-intervals delimited by `breakpoints`
/// (sorted, at least two entries). Use this to place known features of the
/// integrand on interval boundaries.
QuadResult integrate(const Integrand& f, std::span<const double> breakpoints,
                     const QuadOptions& opts = {});

inline QuadResult integrate(const Integrand& f, std::initializer_list<double> breakpoints,
                            const QuadOptions& opts = {}) {
    return integrate(f, std::span<const double>(breakpoints.begin(), breakpoints.size()), opts);
}

/// Integrates and throws NumericalError if the tolerance was not met.
double integrate_checked(const Integrand& f, std::span<const double> breakpoints,
                         const QuadOptions& opts, const char* what);

}  // namespace pks
