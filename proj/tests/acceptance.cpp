// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cli.hpp"
#include "oracles.hpp"

#include "pks/criteria.hpp"
#include "pks/ode_bound.hpp"
#include "pks/pks_bounds.hpp"
#include "pks/simulator.hpp"
#include "pks/specialfn.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pks;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds; <= 0 means no limit
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

constexpr double kM16 = 16.0 * kPi;
constexpr double kM24 = 24.0 * kPi;

Outcome reference_values() {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::dispatch({"check-paper-values"}, out, err);
    const auto j = nlohmann::json::parse(out.str());
    double worst = 0.0;
    for (const auto& row : j["values"]) {
        worst = std::max(worst, row["deviation"].get<double>());
    }
    return {code == 0 && j["all_pass"] == true && j["values"].size() == 9,
            "rows " + std::to_string(j["values"].size()) + ", max deviation " + fmt("%.2e", worst)};
}

Outcome special_function_oracle() {
    double worst = 0.0;
    bool bounds_ok = true;
    for (double r : oracle::logspace(0.01, 20.0, 50)) {
        const double g = g_one(r);
        worst = std::max(worst, std::abs(g - r * std::cyl_bessel_k(1.0, r)) / g);
        bounds_ok = bounds_ok && std::exp(-r) <= g && g <= 1.0;
    }
    for (double r : oracle::logspace(1e-6, 600.0, 400)) {
        const double g = g_one(r);
        bounds_ok = bounds_ok && std::exp(-r) <= g && g <= 1.0;
    }
    const double asym = g_one(30.0) / (std::sqrt(kPi * 30.0 / 2.0) * std::exp(-30.0));
    const bool pass = worst <= 1e-10 && bounds_ok && std::abs(asym - 1.0) <= 0.01;
    return {pass, "max rel err " + fmt("%.2e", worst) + ", ratio at 30 " + fmt("%.5f", asym)};
}

Outcome closed_forms() {
    double worst_dilog = 0.0;
    double worst_quad = 0.0;
    for (double mass : {kM16, kM24}) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            for (double frac : {0.25, 0.75}) {
                const double v2 = frac * gamma_log(alpha, mass);
                const double s = t_series(mass, alpha, v2);
                const double k = std::sqrt(2.0 * alpha);
                // s = u^2 makes the integrand smooth at the origin.
                const double quad = 2.0 * kPi * oracle::simpson_richardson(
                    [&](double u) { return 2.0 * u / (mass * std::exp(-k * u) - 8.0 * kPi); },
                    0.0, std::sqrt(v2), 4000);
                worst_dilog = std::max(worst_dilog, oracle::rel_diff(t_dilog(mass, alpha, v2).value, s));
                worst_quad = std::max(worst_quad, oracle::rel_diff(quad, s));
            }
        }
    }
    return {worst_dilog <= 1e-9 && worst_quad <= 1e-9,
            "series/dilog " + fmt("%.2e", worst_dilog) + ", series/quadrature " + fmt("%.2e", worst_quad)};
}

Outcome bound_ordering() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 200; ++i) {
        const double mass = 8.0 * kPi * std::pow(8.0, 0.005 + 0.995 * u(rng));
        const double alpha = 0.05 * std::pow(400.0, u(rng));
        const double v2 = (0.02 + 0.96 * u(rng)) * gamma_log(alpha, mass);
        const KLComparison kl = compare_kl(mass, alpha, v2);
        const bool ok = t_star_alpha(mass, alpha, v2) <= t_star_weak(mass, alpha, v2) &&
                        t_series(mass, alpha, v2) <= std::min(kl.k, kl.l) &&
                        ((kl.l - kl.k > 0.0) == (kl.a - kl.y1 > 0.0)) &&
                        gamma_log(alpha, mass) <= gamma_star(alpha, mass);
        violations += ok ? 0 : 1;
    }
    int ratio_violations = 0;
    for (int i = 0; i < 200; ++i) {
        const double mass = 8.0 * kPi * (1.0 + 1e-3 + (1.0 - 1e-3) * u(rng));
        const double alpha = 0.05 * std::pow(400.0, u(rng));
        const double ratio = gamma_star(alpha, mass) / gamma_cc(alpha, mass);
        for (double beta : {0.1, 0.25, 0.4}) {
            ratio_violations += ratio >= ratio_lower_bound(mass, beta) ? 0 : 1;
        }
    }
    return {violations == 0 && ratio_violations == 0,
            "violations " + std::to_string(violations) + " ordering, " + std::to_string(ratio_violations) +
                " ratio"};
}

Outcome ode_exactness() {
    const auto lin = InequalityProblem::create(MonotoneRate::linear(1.0, -1.0), 0.5);
    const double e_lin = std::abs(blowup_time_sharp(lin) - std::log(2.0));
    const auto con = InequalityProblem::create(MonotoneRate::constant_decay(2.5), 0.75);
    const double e_con = std::abs(blowup_time_sharp(con) - 0.3);

    const auto rate = MonotoneRate::logarithmic();
    double residual = 0.0;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const double t = 0.2;
        const double d = (exact_solution(rate, 0.4, t + h) - exact_solution(rate, 0.4, t - h)) / (2.0 * h);
        residual = std::abs(d - rate(exact_solution(rate, 0.4, t)));
    }
    const auto p = InequalityProblem::create(rate, 0.3);
    double round_trip = 0.0;
    for (double frac : {0.0, 0.1, 0.5, 0.9, 0.999}) {
        const double t = frac * blowup_time_sharp(p);
        round_trip = std::max(round_trip, std::abs(theta(p, envelope(p, t)) - t));
    }
    return {e_lin <= 1e-12 && e_con <= 1e-12 && residual <= 1e-6 && round_trip <= 1e-9,
            "ln2 " + fmt("%.1e", e_lin) + ", V0/c " + fmt("%.1e", e_con) + ", residual " +
                fmt("%.1e", residual) + ", round trip " + fmt("%.1e", round_trip)};
}

Outcome small_alpha() {
    double worst = 0.0;
    for (double mass : {kM16, kM24}) {
        const double ratio = t_star_alpha(mass, 1e-8, 0.1) * (mass - 8.0 * kPi) / (2.0 * kPi * 0.1);
        worst = std::max(worst, std::abs(ratio - 1.0));
    }
    return {worst <= 1e-4, "max |ratio - 1| " + fmt("%.2e", worst)};
}

// Shared by criteria 7 and 8.
struct SupercriticalRun {
    SimTrace trace;
    double v2 = 0.0;
    double t_alpha = 0.0;
    EnvelopeReport env;
};

const SupercriticalRun& supercritical() {
    static const SupercriticalRun run_data = [] {
        SupercriticalRun r;
        const double radius = std::sqrt(gamma_star(1.0, kM16));  // V2 = R^2 / 2 = gamma_star / 2
        const Density ball = Density::from_primitives({UniformBall{{}, radius, kM16 / (kPi * radius * radius)}});
        SimConfig cfg;
        cfg.grid = {5.0, 128, 128};
        cfg.alpha = 1.0;
        cfg.dt0 = 1e-3;
        cfg.t_end = 1.0;
        cfg.cfl_safety = 0.5;
        cfg.blowup_density_factor = 50.0;
        cfg.dt_min = 1e-7;
        cfg.sample_interval = 0.01;
        r.trace = run(cfg, ball);
        // The envelope is stated for the discrete datum actually evolved.
        r.v2 = r.trace.samples.front().variance;
        r.t_alpha = t_star_alpha(r.trace.samples.front().mass, 1.0, r.v2);
        r.env = check_envelope(r.trace, r.trace.samples.front().mass, 1.0, r.v2, 0.05, 1e-8);
        return r;
    }();
    return run_data;
}

Outcome simulator_invariants() {
    const SupercriticalRun& r = supercritical();
    const auto& s = r.trace.samples;
    double com = 0.0;
    bool monotone = true;
    bool vprime_ok = true;
    for (std::size_t k = 0; k < s.size(); ++k) {
        com = std::max(com, norm(s[k].center - s.front().center));
        if (k > 0) {
            monotone = monotone && s[k].variance <= s[k - 1].variance;
        }
        if (s[k].resolved) {
            vprime_ok = vprime_ok && s[k].vprime_fd <= 4.0 + 1e-3;
        }
    }
    const bool stopped = r.trace.terminated_by != Termination::t_end &&
                         s.back().t <= 1.5 * r.t_alpha;
    const bool super_ok = r.trace.mass_drift <= 1e-10 && com <= 1e-6 * std::sqrt(r.v2) && monotone &&
                          vprime_ok && r.env.sharp_violations == 0 && r.env.checked > 0 && stopped;

    SimConfig sub_cfg;
    sub_cfg.grid = {6.0, 128, 128};
    sub_cfg.t_end = 1.0;
    sub_cfg.dt0 = 2e-3;
    sub_cfg.sample_interval = 0.05;
    const SimTrace sub = run(sub_cfg, Density::from_primitives({Gaussian{{}, 0.5, 4.0 * kPi}}));
    double sub_max = 0.0;
    for (const SimSample& x : sub.samples) {
        sub_max = std::max(sub_max, x.max_density);
    }
    const bool sub_ok = sub.terminated_by == Termination::t_end &&
                        sub_max <= sub.samples.front().max_density * (1.0 + 1e-12) &&
                        sub.mass_drift <= 1e-10;

    return {super_ok && sub_ok,
            "super: " + std::string(to_string(r.trace.terminated_by)) + " at t=" + fmt("%.4f", s.back().t) +
                " (1.5 t_alpha=" + fmt("%.4f", 1.5 * r.t_alpha) + "), drift " + fmt("%.1e", r.trace.mass_drift) +
                ", com " + fmt("%.1e", com) + ", envelope ratio " + fmt("%.3f", r.env.max_sharp_ratio) +
                " over " + std::to_string(r.env.checked) + " samples; sub: " +
                std::string(to_string(sub.terminated_by)) + ", max density " + fmt("%.3f", sub_max)};
}

Outcome jensen() {
    const SupercriticalRun& r = supercritical();
    return {r.env.jensen_violations == 0 && !r.trace.samples.empty(),
            std::to_string(r.trace.samples.size()) + " samples, max excess " + fmt("%.3e", r.env.max_jensen_excess)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "reference root values", 1.0, reference_values},
        {2, "g1 against independent Bessel K1", 1.0, special_function_oracle},
        {3, "series, dilogarithm and quadrature agree", 5.0, closed_forms},
        {4, "bound ordering on 200 random cases", 0.0, bound_ordering},
        {5, "ODE engine closed forms", 0.0, ode_exactness},
        {6, "small-alpha limit", 0.0, small_alpha},
        {7, "simulator invariants", 120.0, simulator_invariants},
        {8, "Jensen inequality along the supercritical run", 0.0, jensen},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0.0 && secs > c.time_limit) {
            o.pass = false;
            o.detail += "; over time limit " + fmt("%.0f s", c.time_limit);
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s  %d. %-46s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
