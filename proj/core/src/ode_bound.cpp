#include "pks/ode_bound.hpp"

#include "pks/error.hpp"
#include "pks/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace pks {
namespace {

constexpr int kMonotoneGridPoints = 64;
constexpr double kGridSpan = 1e6;  // grid covers [scale / span, scale * span]
constexpr double kBoundaryRelTol = 1e-12;
constexpr double kNearBoundaryRel = 1e-6;

}  // namespace

MonotoneRate MonotoneRate::create(Fn f, double f0_plus, double f_inf, double scale) {
    if (!f) {
        throw InvalidRateError("rate: empty function");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidRateError("rate: scale hint must be positive");
    }
    if (!(f0_plus < 0.0) || !(f_inf > 0.0) || std::isnan(f0_plus) || std::isnan(f_inf)) {
        throw InvalidRateError("rate: need f(0+) < 0 < f(+inf), got f(0+) = " +
                               std::to_string(f0_plus) + ", f(+inf) = " + std::to_string(f_inf));
    }
    const double lo = std::log(scale / kGridSpan);
    const double hi = std::log(scale * kGridSpan);
    double prev = -std::numeric_limits<double>::infinity();
    double first = 0.0;
    bool varies = false;
    for (int i = 0; i < kMonotoneGridPoints; ++i) {
        const double lambda = std::exp(lo + (hi - lo) * i / (kMonotoneGridPoints - 1));
        const double v = f(lambda);
        if (std::isnan(v)) {
            throw InvalidRateError("rate: NaN at lambda = " + std::to_string(lambda));
        }
        // Allow evaluation noise relative to the value itself.
        if (v < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
            throw InvalidRateError("rate: not increasing near lambda = " + std::to_string(lambda));
        }
        if (i == 0) {
            first = v;
        } else if (v != first) {
            varies = true;
        }
        prev = v;
    }
    if (!varies) {
        throw InvalidRateError("rate: constant on the monotonicity grid");
    }
    return MonotoneRate(std::move(f), f0_plus, f_inf, scale, false);
}

MonotoneRate MonotoneRate::linear(double slope, double intercept) {
    if (!(slope > 0.0) || !(intercept < 0.0) || !std::isfinite(slope) || !std::isfinite(intercept)) {
        throw InvalidRateError("linear rate needs slope > 0 and intercept < 0");
    }
    return create([slope, intercept](double l) { return slope * l + intercept; }, intercept,
                  std::numeric_limits<double>::infinity(), -intercept / slope);
}

MonotoneRate MonotoneRate::logarithmic() {
    return create([](double l) { return std::log(l); }, -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), 1.0);
}

MonotoneRate MonotoneRate::constant_decay(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidRateError("constant rate needs c > 0");
    }
    return MonotoneRate([c](double) { return -c; }, -c, -c, 1.0, true);
}

double lambda_star(const MonotoneRate& rate) {
    if (rate.is_constant()) {
        throw InvalidRateError("lambda_star: constant rate has no zero");
    }
    Bracket b;
    try {
        b = bracket_increasing([&rate](double l) { return rate(l); }, rate.scale());
    } catch (const NumericalError& e) {
        throw InvalidRateError(std::string("lambda_star: ") + e.what());
    }
    if (b.lo == b.hi) {
        return b.lo;
    }
    const RootResult root = brent([&rate](double l) { return rate(l); }, b.lo, b.hi,
                                  RootOptions{1e-300, 1e-15, 400});
    if (!root.converged) {
        throw NumericalError("lambda_star: root refinement did not converge");
    }
    return root.x;
}

InequalityProblem InequalityProblem::create(MonotoneRate rate, double v0, EngineOptions opts) {
    if (!(v0 > 0.0) || !std::isfinite(v0)) {
        throw DomainError("initial value V0 must be finite and > 0");
    }
    const double lstar =
        rate.is_constant() ? std::numeric_limits<double>::infinity() : pks::lambda_star(rate);
    if (!(v0 < lstar * (1.0 - kBoundaryRelTol))) {
        throw NotApplicableError("hypothesis V0 < lambda* violated: V0 = " + std::to_string(v0) +
                                 ", lambda* = " + std::to_string(lstar));
    }
    if (!(rate(v0) < 0.0)) {
        throw NotApplicableError("hypothesis f(V0) < 0 violated");
    }
    InequalityProblem p(std::move(rate), v0, lstar, opts);
    p.near_boundary_ = std::isfinite(lstar) && (lstar - v0) <= kNearBoundaryRel * lstar;
    p.theta_zero_ = theta(p, 0.0);
    return p;
}

double theta(const InequalityProblem& problem, double x) {
    const double v0 = problem.v0();
    if (!(x >= 0.0) || !(x <= v0)) {
        throw DomainError("theta: x must lie in [0, V0]");
    }
    if (x == v0) {
        return 0.0;
    }
    const MonotoneRate& rate = problem.rate();
    if (rate.is_constant()) {
        return (v0 - x) / -rate(v0);
    }
    const auto integrand = [&rate](double s) {
        const double neg_f = -rate(s);
        if (!(neg_f > 0.0)) {
            throw NumericalError("theta: rate is not negative on [x, V0]");
        }
        return 1.0 / neg_f;
    };
    std::vector<double> pts{x};
    if (problem.near_boundary()) {
        // Cluster subintervals geometrically toward V0, where 1/(-f) is large.
        std::vector<double> tail;
        for (int k = 1; k <= 40; ++k) {
            tail.push_back(v0 - (v0 - x) * std::ldexp(1.0, -k));
        }
        pts.insert(pts.end(), tail.begin(), tail.end());
    }
    pts.push_back(v0);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return integrate_checked(integrand, pts,
                             QuadOptions{problem.options().theta_rel_tol, 0.0, 4000}, "theta");
}

double blowup_time_sharp(const InequalityProblem& problem) { return problem.theta_zero(); }

double blowup_time_simple(const InequalityProblem& problem) {
    const double fv0 = problem.rate()(problem.v0());
    if (!(fv0 < 0.0)) {
        throw NotApplicableError("blowup_time_simple: f(V0) >= 0");
    }
    return problem.v0() / -fv0;
}

double envelope(const InequalityProblem& problem, double t) {
    const double t_max = problem.theta_zero();
    if (!(t >= 0.0) || !(t < t_max)) {
        throw DomainError("envelope: t must lie in [0, Theta(0)) = [0, " + std::to_string(t_max) +
                          ")");
    }
    if (t == 0.0) {
        return problem.v0();
    }
    if (problem.rate().is_constant()) {
        return problem.v0() + t * problem.rate()(problem.v0());
    }
    const RootResult root =
        brent([&problem, t](double x) { return theta(problem, x) - t; }, 0.0, problem.v0(),
              RootOptions{problem.options().inverse_x_tol, 1e-15, 400});
    if (!root.converged) {
        throw NumericalError("envelope: inversion of Theta did not converge");
    }
    return root.x;
}

WeakEnvelope envelope_weak(const InequalityProblem& problem, double t) {
    const double t_simple = blowup_time_simple(problem);
    if (!(t >= 0.0) || !(t <= t_simple)) {
        throw DomainError("envelope_weak: t must lie in [0, V0 / -f(V0)]");
    }
    const double fv0 = problem.rate()(problem.v0());
    WeakEnvelope w;
    w.value = std::max(0.0, problem.v0() + t * fv0);
    w.derivative_bound = problem.rate()(w.value);
    return w;
}

double exact_solution(const MonotoneRate& rate, double v0, double t) {
    return envelope(InequalityProblem::create(rate, v0), t);
}

}  // namespace pks
