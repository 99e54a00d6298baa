#include "pks/criteria.hpp"

#include "pks/error.hpp"
#include "pks/specialfn.hpp"

#include <cmath>
#include <string>

namespace pks {
namespace {

void require_supercritical(double alpha, double mass) {
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw DomainError("alpha must be finite and > 0, got " + std::to_string(alpha));
    }
    if (!std::isfinite(mass) || !(mass > 0.0)) {
        throw DomainError("mass must be finite and > 0, got " + std::to_string(mass));
    }
    if (!(mass > kCriticalMass)) {
        throw SubcriticalMassError("mass M = " + std::to_string(mass) +
                                   " is not supercritical (M <= 8*pi = " +
                                   std::to_string(kCriticalMass) + ")");
    }
}

void require_cc_constant(double c) {
    if (!std::isfinite(c) || !(c >= 1.0)) {
        throw DomainError("cc constant must be >= 1, got " + std::to_string(c));
    }
}

}  // namespace

double gamma_star(double alpha, double mass) {
    require_supercritical(alpha, mass);
    const double r = g_one_inv(kCriticalMass / mass);
    return r * r / (2.0 * alpha);
}

double gamma_cc(double alpha, double mass, double cc_constant) {
    require_supercritical(alpha, mass);
    require_cc_constant(cc_constant);
    const double excess = mass - kCriticalMass;
    return excess * excess / (4.0 * alpha * cc_constant * cc_constant * mass * mass);
}

double gamma_ks(double alpha, double mass) {
    require_supercritical(alpha, mass);
    const double l = std::log(2.0 * mass / (mass + kCriticalMass));
    return (mass - kCriticalMass) / (mass + kCriticalMass) * l * l / (8.0 * alpha);
}

double gamma_log(double alpha, double mass) {
    require_supercritical(alpha, mass);
    const double l = std::log(mass / kCriticalMass);
    return l * l / (2.0 * alpha);
}

std::optional<GammaEps> gamma_eps(double alpha, double mass, double eps) {
    require_supercritical(alpha, mass);
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("eps must lie in (0, 1), got " + std::to_string(eps));
    }
    const double c_eps = (1.0 - eps) * std::sqrt(kPi / 2.0);
    const double ratio = c_eps * mass / kCriticalMass;
    if (!(ratio > kE)) {
        return std::nullopt;
    }
    const double l = std::log(ratio) + 0.5 * std::log(std::log(ratio));
    GammaEps out;
    out.value = l * l / (2.0 * alpha);
    out.below_gamma_star = out.value <= gamma_star(alpha, mass);
    return out;
}

double alpha_blowup_upper(const Moments& moments) {
    if (!(moments.variance > 0.0)) {
        throw DomainError("alpha interval needs a positive variance");
    }
    // gamma_star(alpha, M) = gamma_star(1, M) / alpha.
    return gamma_star(1.0, moments.mass) / moments.variance;
}

double ratio_lower_bound(double mass, double beta, double cc_constant) {
    require_supercritical(1.0, mass);
    require_cc_constant(cc_constant);
    if (!(beta > 0.0 && beta < 0.5)) {
        throw DomainError("beta must lie in (0, 1/2), got " + std::to_string(beta));
    }
    // e^{-x} <= L_beta x^{-beta} with the optimal L_beta = beta^beta e^{-beta}, which
    // yields (1 - g_1(r)) / r <= K_beta r^{1 - 2 beta}.
    const double l_beta = std::pow(beta, beta) * std::exp(-beta);
    const double k_beta = l_beta / (1.0 - beta) * std::pow(4.0, beta - 1.0) * std::tgamma(beta);
    const double c_beta = 2.0 * cc_constant * cc_constant / (k_beta * k_beta);
    const double r = g_one_inv(kCriticalMass / mass);
    return c_beta * std::pow(r, -(2.0 - 4.0 * beta));
}

CriterionReport evaluate_criteria(double alpha, double mass, double cc_constant,
                                  std::optional<double> variance, std::optional<double> eps) {
    CriterionReport rep;
    rep.mass = mass;
    rep.alpha = alpha;
    rep.cc_constant = cc_constant;
    rep.gamma_star = gamma_star(alpha, mass);
    rep.gamma_cc = gamma_cc(alpha, mass, cc_constant);
    rep.gamma_ks = gamma_ks(alpha, mass);
    rep.gamma_log = gamma_log(alpha, mass);
    rep.eps = eps;
    if (eps) {
        rep.gamma_eps = gamma_eps(alpha, mass, *eps);
    }
    if (variance) {
        const double v = *variance;
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("variance must be finite and >= 0");
        }
        rep.variance = v;
        rep.satisfies_star = v < rep.gamma_star;
        rep.satisfies_cc = v < rep.gamma_cc;
        rep.satisfies_ks = v < rep.gamma_ks;
        rep.satisfies_log = v < rep.gamma_log;
        if (rep.gamma_eps) {
            rep.satisfies_eps = rep.gamma_eps->below_gamma_star && v < rep.gamma_eps->value;
        }
        rep.near_boundary = std::abs(v - rep.gamma_star) <= 1e-10 * rep.gamma_star;
    }
    return rep;
}

GammaComparison compare_gammas(double alpha, double mass, double cc_constant) {
    GammaComparison c;
    c.gamma_star = gamma_star(alpha, mass);
    c.gamma_cc = gamma_cc(alpha, mass, cc_constant);
    c.gamma_ks = gamma_ks(alpha, mass);
    c.gamma_log = gamma_log(alpha, mass);
    c.ratio_star_cc = c.gamma_star / c.gamma_cc;
    c.ratio_cc_ks = c.gamma_cc / c.gamma_ks;
    c.ratio_star_ks = c.gamma_star / c.gamma_ks;
    c.near_critical = mass < 1.01 * kCriticalMass;
    c.large_mass = mass > 1000.0 * kCriticalMass;
    return c;
}

}  // namespace pks
