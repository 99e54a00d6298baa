#pragma once

#include "pks/quadrature.hpp"

#include <functional>
#include <limits>
#include <optional>

namespace pks {

/// A rate function f on (0, inf) for the scalar inequality V' <= f(V).
///
/// The blow-up argument needs f increasing with f(0+) < 0 < f(+inf). The
/// hypothesis is analytic, so construction spot-checks it: f must be
/// non-decreasing across a 64-point geometric grid around `scale`, and the
/// supplied limits must straddle zero.
class MonotoneRate {
public:
    using Fn = std::function<double(double)>;

    /// Throws InvalidRateError when the spot check fails.
    static MonotoneRate create(Fn f, double f0_plus, double f_inf, double scale = 1.0);

    /// f(lambda) = slope * lambda + intercept, slope > 0, intercept < 0.
    static MonotoneRate linear(double slope, double intercept);
    /// f(lambda) = ln(lambda).
    static MonotoneRate logarithmic();
    /// f = -c with c > 0. This is the degenerate boundary of the hypothesis
    /// (no zero), accepted so that the closed-form linear decay can be used;
    /// lambda_star() rejects it.
    static MonotoneRate constant_decay(double c);

    double operator()(double lambda) const { return f_(lambda); }
    double f0_plus() const noexcept { return f0_plus_; }
    double f_inf() const noexcept { return f_inf_; }
    double scale() const noexcept { return scale_; }
    bool is_constant() const noexcept { return constant_; }

private:
    MonotoneRate(Fn f, double f0, double finf, double scale, bool constant)
        : f_(std::move(f)), f0_plus_(f0), f_inf_(finf), scale_(scale), constant_(constant) {}

    Fn f_;
    double f0_plus_;
    double f_inf_;
    double scale_;
    bool constant_;
};

/// Unique zero of the rate. Throws InvalidRateError if no sign change is
/// found within the bracket-expansion limit.
double lambda_star(const MonotoneRate& rate);

struct EngineOptions {
    double theta_rel_tol = 1e-10;  ///< quadrature tolerance for Theta
    double inverse_x_tol = 1e-12;  ///< absolute root tolerance for Theta^{-1}
};

/// V' <= f(V) with V(0) = V0 in (0, lambda*).
class InequalityProblem {
public:
    /// Throws NotApplicableError when V0 >= lambda* (V0 within 1e-12 relative
    /// of lambda* counts as violating) or when f(V0) >= 0.
    static InequalityProblem create(MonotoneRate rate, double v0, EngineOptions opts = {});

    const MonotoneRate& rate() const noexcept { return rate_; }
    double v0() const noexcept { return v0_; }
    /// +inf for constant rates.
    double lambda_star() const noexcept { return lambda_star_; }
    const EngineOptions& options() const noexcept { return opts_; }
    /// V0 lies within 1e-6 relative of lambda*: the Theta integrand is
    /// near-singular at V0 and accuracy is reduced.
    bool near_boundary() const noexcept { return near_boundary_; }
    /// Theta(0), computed once at construction.
    double theta_zero() const noexcept { return theta_zero_; }

private:
    InequalityProblem(MonotoneRate rate, double v0, double lstar, EngineOptions opts)
        : rate_(std::move(rate)), v0_(v0), lambda_star_(lstar), opts_(opts) {}

    MonotoneRate rate_;
    double v0_;
    double lambda_star_;
    EngineOptions opts_;
    bool near_boundary_ = false;
    double theta_zero_ = 0.0;
};

/// Theta(x) = int_x^{V0} ds / (-f(s)), 0 <= x <= V0.
double theta(const InequalityProblem& problem, double x);

/// T*_c = Theta(0): upper bound on the maximal existence time.
double blowup_time_sharp(const InequalityProblem& problem);

/// T**_c = V0 / (-f(V0)) >= T*_c.
double blowup_time_simple(const InequalityProblem& problem);

/// Theta^{-1}(t) for 0 <= t < Theta(0): the sharp upper envelope of V(t).
/// Throws DomainError outside that range.
double envelope(const InequalityProblem& problem, double t);

struct WeakEnvelope {
    double value = 0.0;             ///< V0 + t f(V0)
    double derivative_bound = 0.0;  ///< f(V0 + t f(V0))
};

/// Affine envelope, valid for 0 <= t <= T**_c.
WeakEnvelope envelope_weak(const InequalityProblem& problem, double t);

/// The saturating solution of V' = f(V), V(0) = V0: V(t) = Theta^{-1}(t).
double exact_solution(const MonotoneRate& rate, double v0, double t);

}  // namespace pks
