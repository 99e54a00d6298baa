#pragma once

#include "pks/moments.hpp"

#include <optional>

namespace pks {

/// Variance thresholds below which finite-time blow-up is guaranteed, for
/// consumption rate alpha > 0 and supercritical mass M > 8 pi. All of them
/// throw SubcriticalMassError when M <= 8 pi and DomainError for alpha <= 0.

/// (1 / 2 alpha) * g_1^{-1}(8 pi / M)^2.
double gamma_star(double alpha, double mass);

/// (M - 8 pi)^2 / (4 alpha C^2 M^2), C >= 1 the constant of the prior
/// second-moment criterion.
double gamma_cc(double alpha, double mass, double cc_constant = 1.0);

/// (1 / 8 alpha) (M - 8 pi)/(M + 8 pi) ln^2(2M / (M + 8 pi)).
double gamma_ks(double alpha, double mass);

/// ln^2(M / 8 pi) / (2 alpha); never larger than gamma_star.
double gamma_log(double alpha, double mass);

struct GammaEps {
    double value = 0.0;
    /// Whether the value was checked to lie at or below gamma_star, i.e. the
    /// large-mass regime where the explicit threshold is a valid criterion.
    bool below_gamma_star = false;
};

/// Explicit large-mass threshold built from the lower sandwich bound on
/// g_1^{-1} with c_eps = (1 - eps) sqrt(pi/2). Absent when c_eps M / 8 pi <= e.
std::optional<GammaEps> gamma_eps(double alpha, double mass, double eps);

/// Upper end of the open interval of consumption rates (0, alpha_max) for
/// which the criterion V2 < gamma_star(alpha, M) holds.
double alpha_blowup_upper(const Moments& moments);

/// Lower bound C_beta * g_1^{-1}(8 pi / M)^{-(2 - 4 beta)} on gamma_star / gamma_cc,
/// 0 < beta < 1/2.
double ratio_lower_bound(double mass, double beta, double cc_constant = 1.0);

struct CriterionReport {
    double mass = 0.0;
    double alpha = 0.0;
    double cc_constant = 1.0;
    double gamma_star = 0.0;
    double gamma_cc = 0.0;
    double gamma_ks = 0.0;
    double gamma_log = 0.0;
    std::optional<GammaEps> gamma_eps;
    std::optional<double> eps;

    /// Set when a variance was supplied; strict inequality V2 < gamma.
    std::optional<double> variance;
    std::optional<bool> satisfies_star;
    std::optional<bool> satisfies_cc;
    std::optional<bool> satisfies_ks;
    std::optional<bool> satisfies_log;
    std::optional<bool> satisfies_eps;
    /// V2 within 1e-10 relative of gamma_star.
    bool near_boundary = false;
};

CriterionReport evaluate_criteria(double alpha, double mass, double cc_constant = 1.0,
                                  std::optional<double> variance = std::nullopt,
                                  std::optional<double> eps = std::nullopt);

struct GammaComparison {
    double gamma_star = 0.0;
    double gamma_cc = 0.0;
    double gamma_ks = 0.0;
    double gamma_log = 0.0;
    double ratio_star_cc = 0.0;
    double ratio_cc_ks = 0.0;
    double ratio_star_ks = 0.0;
    /// M within 1% of the critical mass.
    bool near_critical = false;
    /// M above 1000 times the critical mass.
    bool large_mass = false;
};

GammaComparison compare_gammas(double alpha, double mass, double cc_constant = 1.0);

}  // namespace pks
