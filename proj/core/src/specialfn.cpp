#include "pks/specialfn.hpp"

#include "pks/error.hpp"
#include "pks/quadrature.hpp"
#include "pks/roots.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace pks {
namespace {

void require_finite_nonnegative(double r, const char* what) {
    if (!std::isfinite(r) || r < 0.0) {
        throw DomainError(std::string(what) + ": radius must be finite and >= 0, got " +
                          std::to_string(r));
    }
}

void require_positive_alpha(double alpha, const char* what) {
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw DomainError(std::string(what) + ": alpha must be finite and > 0, got " +
                          std::to_string(alpha));
    }
}

void require_tolerance(double rel_tol) {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
        throw DomainError("relative tolerance must be positive");
    }
}

std::vector<double> sorted_breakpoints(std::vector<double> pts, double lo, double hi) {
    pts.erase(std::remove_if(pts.begin(), pts.end(),
                             [&](double p) { return !(p > lo && p < hi); }),
              pts.end());
    pts.push_back(lo);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Upper integration limit for integrands dominated by exp(-s): the tail past
// it is below 1e-17 of g_1(r) for every r <= kGOneUnderflowRadius.
double tail_cutoff(double r) { return 1.5 * r + 40.0; }

}  // namespace

GEval g_one_eval(double r, double rel_tol) {
    require_finite_nonnegative(r, "g_one");
    require_tolerance(rel_tol);
    GEval out{r, 1.0, 1.0, 0.0, false};
    if (r == 0.0) {
        return out;
    }
    if (r > kGOneUnderflowRadius) {
        out.value = 0.0;
        out.underflow = true;
        return out;
    }
    const double quarter_r2 = 0.25 * r * r;
    const auto integrand = [quarter_r2](double s) {
        return s > 0.0 ? std::exp(-quarter_r2 / s - s) : 0.0;
    };
    // The integrand peaks at s = r/2; r^2/4 marks where exp(-r^2/4s) reaches 1/e.
    const double upper = tail_cutoff(r);
    const auto pts = sorted_breakpoints({0.5 * r, quarter_r2, 0.5 * r + 1.0}, 0.0, upper);
    const QuadResult q = integrate(integrand, pts, QuadOptions{rel_tol, 0.0, 4000});
    if (!q.converged) {
        throw NumericalError("g_one: quadrature did not converge at r = " + std::to_string(r));
    }
    out.value = std::min(q.value, 1.0);
    out.abs_error_estimate = q.abs_error;
    return out;
}

double g_one(double r, double rel_tol) { return g_one_eval(r, rel_tol).value; }

double one_minus_g_one(double r, double rel_tol) {
    require_finite_nonnegative(r, "one_minus_g_one");
    require_tolerance(rel_tol);
    if (r == 0.0) {
        return 0.0;
    }
    if (r > kGOneUnderflowRadius) {
        return 1.0;
    }
    const double quarter_r2 = 0.25 * r * r;
    const auto integrand = [quarter_r2](double s) {
        return s > 0.0 ? -std::expm1(-quarter_r2 / s) * std::exp(-s) : 1.0;
    };
    const double upper = tail_cutoff(r) + std::max(0.0, -2.0 * std::log(r));
    const auto pts = sorted_breakpoints({quarter_r2, 1.0, 0.5 * r}, 0.0, upper);
    const QuadResult q = integrate(integrand, pts, QuadOptions{rel_tol, 0.0, 4000});
    if (!q.converged) {
        throw NumericalError("one_minus_g_one: quadrature did not converge at r = " +
                             std::to_string(r));
    }
    return std::clamp(q.value, 0.0, 1.0);
}

GEval g_alpha_eval(double alpha, double r, double rel_tol) {
    require_positive_alpha(alpha, "g_alpha");
    require_finite_nonnegative(r, "g_alpha");
    GEval out = g_one_eval(std::sqrt(alpha) * r, rel_tol);
    out.r = r;
    out.alpha = alpha;
    return out;
}

double g_alpha(double alpha, double r, double rel_tol) {
    return g_alpha_eval(alpha, r, rel_tol).value;
}

double g_one_inv(double rho, double rel_tol) {
    if (!std::isfinite(rho) || !(rho > 0.0) || rho > 1.0) {
        throw DomainError("g_one_inv: rho must lie in (0, 1], got " + std::to_string(rho));
    }
    require_tolerance(rel_tol);
    if (rho == 1.0) {
        return 0.0;
    }
    // ln(1/rho) <= g_1^{-1}(rho) and the upper sandwich bound both sit below R.
    double upper = std::log(1.0 / rho) + std::log(std::log(kE + 1.0 / rho)) + 2.0;
    if (upper > kGOneUnderflowRadius) {
        throw OutOfRangeError("g_one_inv: rho = " + std::to_string(rho) +
                              " is below the representable range of g_1");
    }

    ScalarFn residual;
    if (rho <= 0.5) {
        residual = [rho, rel_tol](double r) { return g_one(r, rel_tol) - rho; };
    } else {
        // Solve 1 - g_1(r) = 1 - rho to keep relative accuracy when r is small.
        const double deficit = 1.0 - rho;
        residual = [deficit, rel_tol](double r) { return deficit - one_minus_g_one(r, rel_tol); };
    }
    while (residual(upper) > 0.0) {
        upper *= 1.25;
        if (upper > kGOneUnderflowRadius) {
            throw OutOfRangeError("g_one_inv: bracket exceeded the underflow radius");
        }
    }
    const RootResult root = brent(residual, 0.0, upper, RootOptions{1e-15, 1e-15, 400});
    if (!root.converged) {
        throw NumericalError("g_one_inv: root refinement did not converge for rho = " +
                             std::to_string(rho));
    }
    return root.x;
}

double bessel_kernel(double alpha, double z_norm, double rel_tol) {
    require_positive_alpha(alpha, "bessel_kernel");
    require_tolerance(rel_tol);
    if (!std::isfinite(z_norm) || !(z_norm > 0.0)) {
        throw DomainError("bessel_kernel: |z| must be finite and > 0 (the kernel diverges at 0)");
    }
    // u = |z|^2 / 4t, then u = e^x:  int exp(-e^x - a e^{-x}) dx with a = alpha |z|^2 / 4.
    // The integrand is a smooth bump centred at x0 = ln(a)/2 with peak exp(-2 sqrt(a)).
    const double a = 0.25 * alpha * z_norm * z_norm;
    const double sqrt_a = std::sqrt(a);
    const double x0 = 0.5 * std::log(a);
    const double half_width = std::acosh(1.0 + 22.5 / sqrt_a);
    const auto integrand = [a](double x) { return std::exp(-std::exp(x) - a * std::exp(-x)); };
    const QuadResult q = integrate(integrand, {x0 - half_width, x0, x0 + half_width},
                                   QuadOptions{rel_tol, 0.0, 4000});
    if (!q.converged) {
        throw NumericalError("bessel_kernel: quadrature did not converge");
    }
    return q.value / (4.0 * kPi);
}

Vec2 grad_bessel_kernel(double alpha, Vec2 z, double rel_tol) {
    const double r2 = norm2(z);
    if (!(r2 > 0.0) || !std::isfinite(r2)) {
        throw DomainError("grad_bessel_kernel: z must be finite and non-zero");
    }
    const double g = g_alpha(alpha, std::sqrt(r2), rel_tol);
    return (-g / (2.0 * kPi * r2)) * z;
}

Interval v_c_inv_bounds(double c, double rho) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError("v_c_inv_bounds: c must be positive");
    }
    if (!(rho > 0.0) || !(rho < c / kE)) {
        throw DomainError("v_c_inv_bounds: rho must lie in (0, c/e), got " + std::to_string(rho));
    }
    const double ratio_log = std::log(c / rho);
    const double lower = ratio_log + 0.5 * std::log(ratio_log);
    const double slack = 0.5 * std::log(2.0 * kE / (2.0 * kE - 1.0));
    return {lower, lower + slack};
}

double g_one_inv_asymptotic(double rho) {
    return v_c_inv_bounds(std::sqrt(kPi / 2.0), rho).lower;
}

InverseBounds g_inv_bounds(double eps, double rho, double threshold) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("g_inv_bounds: eps must lie in (0, 1)");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("g_inv_bounds: validity threshold must lie in (0, 1)");
    }
    if (!(rho > 0.0)) {
        throw DomainError("g_inv_bounds: rho must be positive");
    }
    if (rho >= threshold) {
        throw DomainError("g_inv_bounds: rho = " + std::to_string(rho) +
                          " is above the validity threshold " + std::to_string(threshold));
    }
    const double c_minus = (1.0 - eps) * std::sqrt(kPi / 2.0);
    const double c_plus = (1.0 + eps) * std::sqrt(kPi / 2.0);
    if (!(rho < c_minus / kE)) {
        throw DomainError("g_inv_bounds: rho must be below c_-/e for this eps");
    }
    const Interval lo = v_c_inv_bounds(c_minus, rho);
    const Interval hi = v_c_inv_bounds(c_plus, rho);
    return {rho, eps, lo.lower, hi.upper};
}

double dilog(double x) {
    if (!(x >= 0.0) || !(x < 1.0)) {
        throw DomainError("dilog: argument must lie in [0, 1), got " + std::to_string(x));
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x > 0.5) {
        // Euler reflection keeps the series argument at most 1/2.
        return kPi * kPi / 6.0 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    }
    double sum = 0.0;
    double power = 1.0;
    for (int n = 1; n < 200; ++n) {
        power *= x;
        const double term = power / (static_cast<double>(n) * n);
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

}  // namespace pks
