#include "pks/roots.hpp"

#include "pks/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pks {

RootResult brent(const ScalarFn& f, double a, double b, const RootOptions& opts) {
    double fa = f(a);
    double fb = f(b);
    RootResult out;
    if (fa == 0.0) {
        return {a, fa, 0, true};
    }
    if (fb == 0.0) {
        return {b, fb, 0, true};
    }
    if (!std::isfinite(fa) || !std::isfinite(fb)) {
        throw NumericalError("brent: non-finite function value at bracket end");
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw DomainError("brent: root is not bracketed");
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * opts.rel_tol * std::abs(b) + 0.5 * opts.x_tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) {
            return {b, fb, iter, true};
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p = 0.0;
            double q = 0.0;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if (!std::isfinite(fb)) {
            throw NumericalError("brent: non-finite function value during iteration");
        }
        out = {b, fb, iter, false};
    }
    return out;
}

RootResult bisect(const ScalarFn& f, double a, double b, const RootOptions& opts) {
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) {
        return {a, fa, 0, true};
    }
    if (fb == 0.0) {
        return {b, fb, 0, true};
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw DomainError("bisect: root is not bracketed");
    }
    RootResult out{0.5 * (a + b), 0.0, 0, false};
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        out = {mid, fm, iter, false};
        const double tol = 2.0 * opts.rel_tol * std::abs(mid) + 0.5 * opts.x_tol;
        if (fm == 0.0 || 0.5 * std::abs(b - a) <= tol || mid == a || mid == b) {
            out.converged = true;
            return out;
        }
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return out;
}

Bracket bracket_increasing(const ScalarFn& f, double start, double factor, int max_steps) {
    if (!(start > 0.0) || !(factor > 1.0)) {
        throw DomainError("bracket_increasing: start must be positive and factor > 1");
    }
    double lo = start;
    double hi = start;
    double flo = f(lo);
    if (std::isnan(flo)) {
        throw NumericalError("bracket_increasing: NaN at start point");
    }
    if (flo == 0.0) {
        return {lo, lo};
    }
    int steps = 0;
    if (flo < 0.0) {
        double fhi = flo;
        while (fhi < 0.0) {
            if (++steps > max_steps) {
                throw NumericalError("bracket_increasing: no sign change found above " +
                                     std::to_string(start));
            }
            lo = hi;
            hi *= factor;
            fhi = f(hi);
            if (std::isnan(fhi)) {
                throw NumericalError("bracket_increasing: NaN during expansion");
            }
        }
    } else {
        while (flo > 0.0) {
            if (++steps > max_steps) {
                throw NumericalError("bracket_increasing: no sign change found below " +
                                     std::to_string(start));
            }
            hi = lo;
            lo /= factor;
            flo = f(lo);
            if (std::isnan(flo)) {
                throw NumericalError("bracket_increasing: NaN during expansion");
            }
        }
    }
    return {lo, hi};
}

}  // namespace pks
