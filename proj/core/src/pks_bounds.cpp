#include "pks/pks_bounds.hpp"

#include "pks/criteria.hpp"
#include "pks/error.hpp"
#include "pks/quadrature.hpp"
#include "pks/roots.hpp"
#include "pks/specialfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace pks {
namespace {

constexpr long kSeriesTermCap = 1'000'000;
constexpr double kSeriesRelTol = 1e-15;
constexpr double kRootTol = 1e-14;

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw DomainError(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
    }
}

void require_mass_alpha(double mass, double alpha) {
    require_positive(alpha, "alpha");
    require_positive(mass, "mass");
    if (!(mass > kCriticalMass)) {
        throw SubcriticalMassError("mass M = " + std::to_string(mass) +
                                   " is not supercritical (M <= 8*pi)");
    }
}

// 1 + (x - 1) e^x, accurate for small x where it behaves like x^2 / 2.
double h_fn(double x) {
    if (x < 0.5) {
        double term = x * x / 2.0;  // x^j / j! for j = 2
        double sum = term;
        for (int j = 3; j < 40; ++j) {
            term *= x / j;
            const double add = (j - 1) * term;
            sum += add;
            if (add < 1e-17 * sum) {
                break;
            }
        }
        return sum;
    }
    return x * std::exp(x) - std::expm1(x);
}

// Exponent a = sqrt(2 alpha V2) and the geometric ratio (8pi/M) e^a of the
// series; throws unless the ratio is below one.
double series_exponent(double mass, double alpha, double variance) {
    require_mass_alpha(mass, alpha);
    require_positive(variance, "variance");
    const double a = std::sqrt(2.0 * alpha * variance);
    if (!(a < std::log(mass / kCriticalMass))) {
        throw NotApplicableError("requires V2 < gamma_log(alpha, M) = " +
                                 std::to_string(gamma_log(alpha, mass)));
    }
    return a;
}

}  // namespace

MonotoneRate pks_rate(double mass, double alpha) {
    require_mass_alpha(mass, alpha);
    const double c = mass / (2.0 * kPi);
    return MonotoneRate::create(
        [c, alpha](double lambda) { return 4.0 - c * g_one(std::sqrt(2.0 * alpha * lambda)); },
        4.0 - c, 4.0, 1.0 / alpha);
}

double psi_alpha(double alpha, double rho) {
    require_positive(alpha, "alpha");
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
        throw DomainError("psi_alpha: rho must be finite and >= 0");
    }
    return -g_alpha(alpha, std::sqrt(rho));
}

InequalityProblem pks_problem(double mass, double alpha, double variance) {
    require_positive(variance, "variance");
    const double gs = gamma_star(alpha, mass);
    if (!(variance < gs)) {
        throw NotApplicableError("criterion V2 < gamma_star unsatisfied: V2 = " +
                                 std::to_string(variance) + ", gamma_star = " + std::to_string(gs));
    }
    return InequalityProblem::create(pks_rate(mass, alpha), variance);
}

double t_star_alpha(double mass, double alpha, double variance) {
    return blowup_time_sharp(pks_problem(mass, alpha, variance));
}

double t_star_weak(double mass, double alpha, double variance) {
    require_mass_alpha(mass, alpha);
    require_positive(variance, "variance");
    const double denom = mass * g_one(std::sqrt(2.0 * alpha * variance)) - kCriticalMass;
    if (!(denom > 0.0)) {
        throw NotApplicableError("t_star_weak: M g_1(sqrt(2 alpha V2)) <= 8 pi");
    }
    return 2.0 * kPi * variance / denom;
}

std::optional<double> t_cc(double mass, double alpha, double i0, double cc_constant) {
    require_mass_alpha(mass, alpha);
    require_positive(i0, "I0");
    if (!(cc_constant >= 1.0) || !std::isfinite(cc_constant)) {
        throw DomainError("cc constant must be >= 1");
    }
    const double denom = 4.0 * mass * (mass / kCriticalMass - 1.0) -
                         cc_constant / kPi * std::sqrt(alpha) * std::pow(mass, 1.5) * std::sqrt(i0);
    if (!(denom > 0.0)) {
        return std::nullopt;
    }
    return i0 / denom;
}

double t_ks(double mass, double i0) {
    require_mass_alpha(mass, 1.0);
    require_positive(i0, "I0");
    return i0 / (mass * (mass / kCriticalMass - 1.0));
}

double t_classic(double mass, double i0) {
    require_mass_alpha(mass, 1.0);
    require_positive(i0, "I0");
    return 2.0 * kPi * i0 / (mass * (mass - kCriticalMass));
}

double t_variance(double mass, double variance) {
    require_mass_alpha(mass, 1.0);
    require_positive(variance, "variance");
    return 2.0 * kPi * variance / (mass - kCriticalMass);
}

std::optional<double> l_bound(double mass, double alpha, double variance) {
    require_mass_alpha(mass, alpha);
    require_positive(variance, "variance");
    const double denom = mass * std::exp(-std::sqrt(2.0 * alpha * variance)) - kCriticalMass;
    if (!(denom > 0.0)) {
        return std::nullopt;
    }
    return 2.0 * kPi * variance / denom;
}

double t_series(double mass, double alpha, double variance) {
    const double a = series_exponent(mass, alpha, variance);
    const double q = kCriticalMass / mass;
    const double r = q * std::exp(a);  // < 1
    const double ea = std::exp(a);
    // q^n h((n+1) a) = q^n + ((n+1) a - 1) e^a r^n keeps every factor bounded.
    double sum = 0.0;
    double q_pow = 1.0;  // q^n
    double r_pow = 1.0;  // r^n
    for (long n = 0; n < kSeriesTermCap; ++n) {
        const double k = static_cast<double>(n + 1);
        const double x = k * a;
        const double h_scaled = x < 0.5 ? q_pow * h_fn(x) : q_pow + (x - 1.0) * ea * r_pow;
        const double term = h_scaled / (k * k);
        sum += term;
        // Later terms shrink at least geometrically with ratio r once x > 1.
        if (x > 1.0 && term <= kSeriesRelTol * (1.0 - r) * sum) {
            return 2.0 * kPi / (alpha * mass) * sum;
        }
        q_pow *= q;
        r_pow *= r;
    }
    throw NumericalError("t_series: no convergence within 1e6 terms (ratio too close to 1)");
}

DilogForm t_dilog(double mass, double alpha, double variance) {
    const double a = series_exponent(mass, alpha, variance);
    const double q = kCriticalMass / mass;
    DilogForm out;
    out.u = (dilog(q) - dilog(q * std::exp(a))) / (4.0 * alpha);
    if (!(out.u < 0.0)) {
        throw NumericalError("t_dilog: U is not negative");
    }
    const double log_term = -std::log1p(-q * std::exp(a));  // ln(M / (M - 8pi e^a))
    out.value = a / (4.0 * alpha) * log_term + out.u;
    return out;
}

double k_bound(double mass, double alpha, double variance) {
    const double a = series_exponent(mass, alpha, variance);
    // (M - 8pi) / (M - 8pi e^a) = 1 + 8pi (e^a - 1) / (M - 8pi e^a)
    const double ratio_m1 = kCriticalMass * std::expm1(a) / (mass - kCriticalMass * std::exp(a));
    return a / (4.0 * alpha) * std::log1p(ratio_m1);
}

double y0_root() {
    const RootResult r = brent([](double y) { return (0.5 * y - 1.0) * std::exp(y) + 1.0; }, 1.0,
                               3.0, RootOptions{kRootTol, 1e-16, 400});
    return r.x;
}

double b1(double mass) {
    require_mass_alpha(mass, 1.0);
    return std::log(2.0 * mass / (mass + kCriticalMass));
}

double b2(double mass) {
    require_mass_alpha(mass, 1.0);
    const double s = mass / (4.0 * kPi) + 2.0;
    const double d = (mass - kCriticalMass) / kPi;
    return d / (2.0 * (std::sqrt(s * s + d) + s));  // rationalised to avoid cancellation
}

double y2_root(double mass) {
    require_mass_alpha(mass, 1.0);
    const double q = kCriticalMass / mass;
    const double one_minus_q = (mass - kCriticalMass) / mass;
    const RootResult r =
        brent([q, one_minus_q](double y) { return y + q * std::expm1(y) - one_minus_q; }, 0.0,
              std::log(mass / kCriticalMass), RootOptions{1e-300, 1e-16, 400});
    const double lo = b1(mass);
    const double hi = b2(mass);
    const double slack = 1e-9 * hi;
    if (!(r.x > lo - slack && r.x < hi + slack)) {
        throw NumericalError("y2: root " + std::to_string(r.x) + " outside (b1, b2) = (" +
                             std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    return r.x;
}

double y1_root(double mass) {
    require_mass_alpha(mass, 1.0);
    const auto h = [mass](double y) {
        const double denom = mass - kCriticalMass * std::exp(y);
        if (!(denom > 0.0)) {
            return std::numeric_limits<double>::max();
        }
        const double ratio_m1 = kCriticalMass * std::expm1(y) / denom;
        return 4.0 * kPi * y * std::exp(y) / denom - std::log1p(ratio_m1);
    };
    const double lo = y2_root(mass);
    const double hi = std::log(mass / kCriticalMass);
    if (!(h(lo) < 0.0)) {
        throw NumericalError("y1: H(y2) is not negative");
    }
    const RootResult r = bisect(h, lo, hi, RootOptions{kRootTol, 1e-16, 400});
    return r.x;
}

KLComparison compare_kl(double mass, double alpha, double variance) {
    KLComparison out;
    out.k = k_bound(mass, alpha, variance);
    out.l = *l_bound(mass, alpha, variance);
    out.a = std::sqrt(2.0 * alpha * variance);
    out.y0 = y0_root();
    out.y1 = y1_root(mass);
    out.k_le_l = out.y1 <= out.a;
    out.y0_sufficient = out.y0 < out.a;
    return out;
}

double t_scaled(double mass, double alpha, double variance, double lambda) {
    if (!(lambda >= 1.0) || !std::isfinite(lambda)) {
        throw DomainError("t_scaled: lambda must be >= 1");
    }
    const double relaxed = t_star_alpha(mass, alpha, variance) / lambda;
    if (lambda == 1.0) {
        return relaxed;
    }
    return std::min(relaxed, t_star_alpha(lambda * mass, alpha, variance));
}

double lambda_threshold(double mass0, double alpha, double variance) {
    require_positive(mass0, "mass");
    require_positive(alpha, "alpha");
    require_positive(variance, "variance");
    const double g = g_one(std::sqrt(2.0 * alpha * variance));
    if (!(g > 0.0)) {
        throw OutOfRangeError("lambda_threshold: g_1 underflows at sqrt(2 alpha v)");
    }
    return kCriticalMass / (mass0 * g);
}

double c_alpha_eps(double mass0, double alpha, double variance, double eps) {
    require_positive(eps, "eps");
    const double lam = lambda_threshold(mass0, alpha, variance);
    const double shift = kCriticalMass / (lam + eps);
    const auto integrand = [=](double s) {
        return 1.0 / (mass0 * g_one(std::sqrt(2.0 * alpha * s)) - shift);
    };
    const double value =
        2.0 * kPi * integrate_checked(integrand, std::array<double, 2>{0.0, variance},
                                      QuadOptions{1e-12, 0.0, 4000}, "c_alpha_eps");
    if (!std::isfinite(value) || !(value > 0.0)) {
        throw NumericalError("c_alpha_eps: non-positive or non-finite result");
    }
    return value;
}

VarianceEnvelope variance_envelope_pks(const InequalityProblem& problem, double t) {
    VarianceEnvelope out;
    out.t = t;
    out.v_bound = envelope(problem, t);
    out.vprime_bound = problem.rate()(out.v_bound);
    if (!(out.vprime_bound <= 4.0)) {
        throw NumericalError("variance envelope: derivative bound exceeds 4");
    }
    if (t <= blowup_time_simple(problem)) {
        const WeakEnvelope w = envelope_weak(problem, t);
        out.weak_v_bound = w.value;
        out.weak_vprime_bound = w.derivative_bound;
    }
    return out;
}

VarianceEnvelope variance_envelope_pks(double mass, double alpha, double variance, double t) {
    return variance_envelope_pks(pks_problem(mass, alpha, variance), t);
}

TimeBoundReport time_bounds(const BoundsInput& in) {
    require_mass_alpha(in.mass, in.alpha);
    require_positive(in.variance, "variance");
    if (!(in.cc_constant >= 1.0) || !std::isfinite(in.cc_constant)) {
        throw DomainError("cc constant must be >= 1");
    }
    if (in.lambda && !(*in.lambda >= 1.0)) {
        throw DomainError("lambda must be >= 1");
    }
    if (in.eps && !(*in.eps > 0.0)) {
        throw DomainError("eps must be > 0");
    }
    TimeBoundReport r;
    r.input = in;
    const double from_b0 = in.mass * (in.variance + norm2(in.b0));
    if (in.i0) {
        require_positive(*in.i0, "I0");
        if (*in.i0 < in.mass * in.variance * (1.0 - 1e-12)) {
            throw DomainError("I0 must be at least M * V2");
        }
    }
    r.i0 = in.i0.value_or(from_b0);
    r.gamma_star = gamma_star(in.alpha, in.mass);
    r.gamma_log = gamma_log(in.alpha, in.mass);

    const bool star_ok = in.variance < r.gamma_star;
    const bool log_ok = in.variance < r.gamma_log;
    const std::string star_note = "requires V2 < gamma_star";
    const std::string log_note = "requires V2 < gamma_log";

    if (star_ok) {
        const InequalityProblem p = pks_problem(in.mass, in.alpha, in.variance);
        r.t_alpha.value = blowup_time_sharp(p);
        r.t_weak.value = blowup_time_simple(p);
        r.near_boundary = p.near_boundary();
        if (in.lambda) {
            r.t_scaled.value = t_scaled(in.mass, in.alpha, in.variance, *in.lambda);
        } else {
            r.t_scaled.note = "requires lambda";
        }
    } else {
        r.t_alpha.note = star_note;
        r.t_weak.note = star_note;
        r.t_scaled.note = star_note;
    }

    r.t_cc.value = t_cc(in.mass, in.alpha, r.i0, in.cc_constant);
    if (!r.t_cc.value) {
        r.t_cc.note = "denominator not positive";
    }
    r.t_ks.value = t_ks(in.mass, r.i0);
    r.t_classic.value = t_classic(in.mass, r.i0);
    r.t_variance.value = t_variance(in.mass, in.variance);

    if (log_ok) {
        r.l.value = l_bound(in.mass, in.alpha, in.variance);
        r.k.value = k_bound(in.mass, in.alpha, in.variance);
        r.t_series.value = t_series(in.mass, in.alpha, in.variance);
        const DilogForm d = t_dilog(in.mass, in.alpha, in.variance);
        r.t_dilog.value = d.value;
        r.dilog_u = d.u;
        r.kl = compare_kl(in.mass, in.alpha, in.variance);
    } else {
        r.l.note = log_note;
        r.k.note = log_note;
        r.t_series.note = log_note;
        r.t_dilog.note = log_note;
    }

    r.lambda_alpha = lambda_threshold(in.mass, in.alpha, in.variance);
    if (in.eps) {
        r.c_alpha_eps.value = c_alpha_eps(in.mass, in.alpha, in.variance, *in.eps);
    } else {
        r.c_alpha_eps.note = "requires eps";
    }
    return r;
}

}  // namespace pks
