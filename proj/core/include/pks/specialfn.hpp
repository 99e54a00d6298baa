#pragma once

#include "pks/vec2.hpp"

namespace pks {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kE = 2.718281828459045235360287471352662498;
/// Critical mass of the two-dimensional PKS equation.
inline constexpr double kCriticalMass = 8.0 * kPi;

/// Arguments of g_1 beyond this radius underflow; g_one returns 0 and flags it.
inline constexpr double kGOneUnderflowRadius = 700.0;
inline constexpr double kDefaultRelTol = 1e-12;
/// Default upper limit on rho for the two-sided bound on g_1^{-1}.
inline constexpr double kDefaultInverseBoundThreshold = 1e-2;

/// Result of evaluating g_alpha(r) = int_0^inf exp(-alpha r^2 / 4s) exp(-s) ds.
struct GEval {
    double r = 0.0;
    double alpha = 1.0;
    double value = 1.0;
    double abs_error_estimate = 0.0;
    bool underflow = false;
};

GEval g_one_eval(double r, double rel_tol = kDefaultRelTol);

/// g_1(r) = int_0^inf exp(-r^2/4s - s) ds = r K_1(r), with g_1(0) = 1.
double g_one(double r, double rel_tol = kDefaultRelTol);

/// 1 - g_1(r), integrated directly so that it keeps full relative accuracy
/// as r -> 0.
double one_minus_g_one(double r, double rel_tol = kDefaultRelTol);

GEval g_alpha_eval(double alpha, double r, double rel_tol = kDefaultRelTol);

/// g_alpha(r) = g_1(sqrt(alpha) r).
double g_alpha(double alpha, double r, double rel_tol = kDefaultRelTol);

/// Inverse of g_1 on (0, 1]. Throws DomainError for rho outside (0, 1] and
/// OutOfRangeError when the root would lie beyond the underflow radius.
double g_one_inv(double rho, double rel_tol = kDefaultRelTol);

/// B_alpha(z) = (1/4pi) int_0^inf t^{-1} exp(-|z|^2/4t - alpha t) dt, the
/// fundamental solution of (-Laplacian + alpha) on the plane.
double bessel_kernel(double alpha, double z_norm, double rel_tol = kDefaultRelTol);

/// grad B_alpha(z) = -z g_alpha(|z|) / (2 pi |z|^2).
Vec2 grad_bessel_kernel(double alpha, Vec2 z, double rel_tol = kDefaultRelTol);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Two-sided bound on the inverse of v_c(r) = c sqrt(r) exp(-r), valid for
/// 0 < rho < c/e.
Interval v_c_inv_bounds(double c, double rho);

/// ln((c/rho) sqrt(ln(c/rho))) with c = sqrt(pi/2): asymptotic inverse of g_1.
double g_one_inv_asymptotic(double rho);

struct InverseBounds {
    double rho = 0.0;
    double eps = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Sandwich bound on g_1^{-1}(rho) with constants c_{+-} = (1 +- eps) sqrt(pi/2).
/// Only guaranteed for small rho, so rho >= threshold is rejected.
InverseBounds g_inv_bounds(double eps, double rho,
                           double threshold = kDefaultInverseBoundThreshold);

/// Li_2(x) = sum_{n>=1} x^n / n^2 for 0 <= x < 1.
double dilog(double x);

}  // namespace pks
