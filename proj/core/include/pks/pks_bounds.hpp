#pragma once

#include "pks/ode_bound.hpp"
#include "pks/vec2.hpp"

#include <optional>
#include <string>

namespace pks {

/// f(lambda) = 4 - (M / 2 pi) g_1(sqrt(2 alpha lambda)), the variance rate of
/// the PKS system. Its zero is gamma_star(alpha, M).
/// Throws SubcriticalMassError for M <= 8 pi.
MonotoneRate pks_rate(double mass, double alpha);

/// Psi_alpha(rho) = -g_alpha(sqrt(rho)), rho >= 0.
double psi_alpha(double alpha, double rho);

/// Engine instance V' <= f(V), V(0) = V2 for the PKS rate. Throws
/// NotApplicableError unless V2 < gamma_star(alpha, M).
InequalityProblem pks_problem(double mass, double alpha, double variance);

/// 2 pi int_0^{V2} ds / (M g_1(sqrt(2 alpha s)) - 8 pi).
double t_star_alpha(double mass, double alpha, double variance);

/// 2 pi V2 / (M g_1(sqrt(2 alpha V2)) - 8 pi) >= t_star_alpha.
double t_star_weak(double mass, double alpha, double variance);

/// Bound from the prior second-moment argument; absent when its
/// denominator 4M(M/8pi - 1) - (C/pi) sqrt(alpha) M^{3/2} sqrt(I0) is not positive.
std::optional<double> t_cc(double mass, double alpha, double i0, double cc_constant = 1.0);

/// I0 / (M (M/8pi - 1)).
double t_ks(double mass, double i0);

/// 2 pi I0 / (M (M - 8 pi)).
double t_classic(double mass, double i0);

/// 2 pi V2 / (M - 8 pi).
double t_variance(double mass, double variance);

/// 2 pi V2 / (M exp(-sqrt(2 alpha V2)) - 8 pi); absent unless V2 < gamma_log.
std::optional<double> l_bound(double mass, double alpha, double variance);

/// 2 pi int_0^{V2} ds / (M exp(-sqrt(2 alpha s)) - 8 pi) summed as a power
/// series in (8 pi / M) exp(sqrt(2 alpha V2)). Requires V2 < gamma_log
/// (NotApplicableError otherwise).
double t_series(double mass, double alpha, double variance);

struct DilogForm {
    double value = 0.0;
    /// (Li_2(8pi/M) - Li_2((8pi/M) e^a)) / (4 alpha), always negative.
    double u = 0.0;
};

/// The same integral written with dilogarithms.
DilogForm t_dilog(double mass, double alpha, double variance);

/// sqrt(V2) / (2 sqrt(2 alpha)) * ln((M - 8pi) / (M - 8pi e^a)), a = sqrt(2 alpha V2).
double k_bound(double mass, double alpha, double variance);

/// Root of (Y/2 - 1) e^Y + 1 = 0 with Y > 1.
double y0_root();

/// ln(2M / (M + 8 pi)).
double b1(double mass);
/// Positive root of Y^2 + (M/4pi + 2) Y - (M/4pi - 2) = 0.
double b2(double mass);

/// Root of Y - 1 + (8pi/M) e^Y on (0, ln(M/8pi)); lies strictly between b1 and b2.
double y2_root(double mass);

/// Root on (y2, ln(M/8pi)) of
/// H(Y) = 4 pi Y e^Y / (M - 8 pi e^Y) - ln((M - 8pi) / (M - 8pi e^Y)).
double y1_root(double mass);

struct KLComparison {
    double k = 0.0;
    double l = 0.0;
    double a = 0.0;  ///< sqrt(2 alpha V2)
    double y0 = 0.0;
    double y1 = 0.0;
    /// y1(M) <= a, equivalent to K <= L.
    bool k_le_l = false;
    /// y0 < a, a sufficient condition for K <= L.
    bool y0_sufficient = false;
};

/// Requires V2 < gamma_log.
KLComparison compare_kl(double mass, double alpha, double variance);

/// Bound for the dilated datum lambda * n0 (lambda >= 1): the smaller of
/// t_star_alpha(M) / lambda and t_star_alpha(lambda M).
double t_scaled(double mass, double alpha, double variance, double lambda);

/// 8 pi / (M0 g_1(sqrt(2 alpha v))): dilation factor beyond which lambda m0 is
/// guaranteed to blow up.
double lambda_threshold(double mass0, double alpha, double variance);

/// 2 pi int_0^v ds / (M0 g_1(sqrt(2 alpha s)) - 8 pi / (lambda_alpha + eps)).
/// C / lambda bounds the existence time of lambda m0 for lambda >= lambda_alpha + eps.
double c_alpha_eps(double mass0, double alpha, double variance, double eps);

struct VarianceEnvelope {
    double t = 0.0;
    double v_bound = 0.0;       ///< Theta^{-1}(t)
    double vprime_bound = 0.0;  ///< f(Theta^{-1}(t)) <= 4
    /// Affine envelope and its derivative bound; present for t <= t_star_weak.
    std::optional<double> weak_v_bound;
    std::optional<double> weak_vprime_bound;
};

/// For 0 <= t < t_star_alpha.
VarianceEnvelope variance_envelope_pks(const InequalityProblem& problem, double t);
VarianceEnvelope variance_envelope_pks(double mass, double alpha, double variance, double t);

struct BoundsInput {
    double mass = 0.0;
    double alpha = 0.0;
    double variance = 0.0;
    std::optional<double> i0;  ///< defaults to M (V2 + |B0|^2)
    Vec2 b0;
    double cc_constant = 1.0;
    std::optional<double> lambda;
    std::optional<double> eps;
};

/// A bound that may be inapplicable; `note` says why when `value` is absent.
struct BoundValue {
    std::optional<double> value;
    std::string note;
};

struct TimeBoundReport {
    BoundsInput input;
    double i0 = 0.0;
    double gamma_star = 0.0;
    double gamma_log = 0.0;
    BoundValue t_alpha;
    BoundValue t_weak;
    BoundValue t_cc;
    BoundValue t_ks;
    BoundValue t_classic;
    BoundValue t_variance;
    BoundValue l;
    BoundValue k;
    BoundValue t_series;
    BoundValue t_dilog;
    std::optional<double> dilog_u;
    std::optional<KLComparison> kl;
    BoundValue t_scaled;
    std::optional<double> lambda_alpha;
    BoundValue c_alpha_eps;
    /// V2 within 1e-6 relative of gamma_star: t_alpha has reduced accuracy.
    bool near_boundary = false;
};

/// Evaluates every bound; inapplicable ones are left empty with a note.
/// Throws DomainError on invalid inputs and SubcriticalMassError for M <= 8pi.
TimeBoundReport time_bounds(const BoundsInput& input);

}  // namespace pks
