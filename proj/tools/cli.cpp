#include "cli.hpp"

#include "pks/criteria.hpp"
#include "pks/density_io.hpp"
#include "pks/error.hpp"
#include "pks/moments.hpp"
#include "pks/ode_bound.hpp"
#include "pks/pks_bounds.hpp"
#include "pks/sim_io.hpp"
#include "pks/simulator.hpp"
#include "pks/specialfn.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <thread>

namespace pks::cli {

double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) {
        return v;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

using Json = nlohmann::ordered_json;

Json num(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return round12(v);
}

Json num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json vec(Vec2 p) { return Json::array({num(p.x), num(p.y)}); }

/// A command result: the JSON document, plus an optional flat table used for
/// CSV output. Without a table, CSV output flattens the document to key,value rows.
struct Output {
    Json doc;
    std::optional<Json> table;
};

std::string csv_cell(const Json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_null()) {
        return "";
    }
    return v.dump();
}

void flatten(const Json& v, const std::string& prefix, std::ostream& os) {
    if (v.is_object()) {
        for (const auto& [k, child] : v.items()) {
            flatten(child, prefix.empty() ? k : prefix + "." + k, os);
        }
    } else if (v.is_array() && !v.empty() && v.front().is_structured()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            flatten(v[i], prefix + "." + std::to_string(i), os);
        }
    } else if (v.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) {
            joined += (i ? " " : "") + csv_cell(v[i]);
        }
        os << prefix << ',' << joined << '\n';
    } else {
        os << prefix << ',' << csv_cell(v) << '\n';
    }
}

void write_csv(const Output& o, std::ostream& os) {
    if (!o.table) {
        os << "key,value\n";
        flatten(o.doc, "", os);
        return;
    }
    const Json& rows = *o.table;
    if (rows.empty()) {
        return;
    }
    bool first = true;
    for (const auto& [k, v] : rows.front().items()) {
        os << (first ? "" : ",") << k;
        first = false;
    }
    os << '\n';
    for (const Json& row : rows) {
        first = true;
        for (const auto& [k, v] : row.items()) {
            os << (first ? "" : ",") << csv_cell(v);
            first = false;
        }
        os << '\n';
    }
}

struct Common {
    std::string format = "json";
    std::string out_path;
};

void emit(const Output& o, const Common& common, std::ostream& out) {
    std::ofstream file;
    std::ostream* os = &out;
    if (!common.out_path.empty()) {
        file.open(common.out_path);
        if (!file) {
            throw DomainError("cannot open output file " + common.out_path);
        }
        os = &file;
    }
    if (common.format == "csv") {
        write_csv(o, *os);
    } else {
        *os << o.doc.dump(2) << '\n';
    }
}

// ---------------------------------------------------------------- specialfn

struct SpecialfnArgs {
    std::string fn = "g1";
    std::vector<double> x;
    double alpha = 1.0;
    double eps = 0.1;
    double threshold = kDefaultInverseBoundThreshold;
    double rel_tol = kDefaultRelTol;
};

Output run_specialfn(const SpecialfnArgs& a) {
    Json rows = Json::array();
    for (double x : a.x) {
        Json row;
        row["x"] = num(x);
        if (a.fn == "g1" || a.fn == "g_alpha") {
            const GEval e = a.fn == "g1" ? g_one_eval(x, a.rel_tol) : g_alpha_eval(a.alpha, x, a.rel_tol);
            row["value"] = num(e.value);
            row["abs_error_estimate"] = num(e.abs_error_estimate);
            row["underflow"] = e.underflow;
        } else if (a.fn == "one_minus_g1") {
            row["value"] = num(one_minus_g_one(x, a.rel_tol));
        } else if (a.fn == "g1_inv") {
            row["value"] = num(g_one_inv(x, a.rel_tol));
        } else if (a.fn == "g1_inv_asymptotic") {
            row["value"] = num(g_one_inv_asymptotic(x));
        } else if (a.fn == "bessel_kernel") {
            row["value"] = num(bessel_kernel(a.alpha, x, a.rel_tol));
        } else if (a.fn == "g_inv_bounds") {
            const InverseBounds b = g_inv_bounds(a.eps, x, a.threshold);
            row["lower"] = num(b.lower);
            row["value"] = num(g_one_inv(x, a.rel_tol));
            row["upper"] = num(b.upper);
        } else if (a.fn == "dilog") {
            row["value"] = num(dilog(x));
        }
        rows.push_back(row);
    }
    Output o;
    o.doc["command"] = "specialfn-eval";
    o.doc["inputs"] = {{"fn", a.fn},
                       {"alpha", num(a.alpha)},
                       {"eps", num(a.eps)},
                       {"threshold", num(a.threshold)},
                       {"rel_tol", num(a.rel_tol)}};
    o.doc["results"] = rows;
    o.table = rows;
    return o;
}

void add_specialfn_options(CLI::App* sub, SpecialfnArgs& a) {
    sub->add_option("--fn", a.fn, "Function to evaluate")
        ->check(CLI::IsMember({"g1", "g_alpha", "one_minus_g1", "g1_inv", "g1_inv_asymptotic",
                               "bessel_kernel", "g_inv_bounds", "dilog"}))
        ->capture_default_str();
    sub->add_option("--x,-x", a.x, "Argument(s): r for g1/g_alpha/one_minus_g1, |z| for "
                                   "bessel_kernel, rho for the inverses, x for dilog")
        ->required();
    sub->add_option("--alpha", a.alpha, "Consumption rate for g_alpha and bessel_kernel")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--eps", a.eps, "Sandwich constant for g_inv_bounds")->capture_default_str();
    sub->add_option("--threshold", a.threshold, "Upper rho limit for g_inv_bounds")
        ->capture_default_str();
    sub->add_option("--rel-tol", a.rel_tol, "Quadrature relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

// ---------------------------------------------------------------- density helper

struct DensityInfo {
    Moments moments;
    std::string path;
};

std::optional<DensityInfo> load_moments(const std::string& path) {
    if (path.empty()) {
        return std::nullopt;
    }
    return DensityInfo{compute_moments(load_density(path)), path};
}

Json moments_json(const DensityInfo& d) {
    return {{"path", d.path},
            {"mass", num(d.moments.mass)},
            {"second_moment", num(d.moments.second_moment)},
            {"center", vec(d.moments.center)},
            {"variance", num(d.moments.variance)},
            {"boundary_mass_fraction", num(d.moments.boundary_mass_fraction)},
            {"boundary_warning", d.moments.boundary_warning}};
}

// ---------------------------------------------------------------- criteria

struct CriteriaArgs {
    std::optional<double> mass;
    double alpha = 1.0;
    std::optional<double> variance;
    double cc_constant = 1.0;
    std::optional<double> eps;
    std::vector<double> beta;
    std::string density;
};

Output run_criteria(const CriteriaArgs& a) {
    const auto dens = load_moments(a.density);
    if (!a.mass && !dens) {
        throw DomainError("criteria: give --mass or --density");
    }
    const double mass = a.mass ? *a.mass : dens->moments.mass;
    const std::optional<double> variance =
        a.variance ? a.variance : (dens ? std::optional<double>(dens->moments.variance) : std::nullopt);

    const CriterionReport r = evaluate_criteria(a.alpha, mass, a.cc_constant, variance, a.eps);
    const GammaComparison c = compare_gammas(a.alpha, mass, a.cc_constant);

    Output o;
    o.doc["command"] = "criteria";
    Json in{{"mass", num(mass)}, {"alpha", num(a.alpha)}, {"variance", num(variance)},
            {"cc_constant", num(a.cc_constant)}, {"eps", num(a.eps)}};
    if (dens) {
        in["density"] = moments_json(*dens);
    }
    o.doc["inputs"] = in;
    o.doc["gamma_star"] = num(r.gamma_star);
    o.doc["gamma_cc"] = num(r.gamma_cc);
    o.doc["gamma_ks"] = num(r.gamma_ks);
    o.doc["gamma_log"] = num(r.gamma_log);
    if (r.gamma_eps) {
        o.doc["gamma_eps"] = {{"value", num(r.gamma_eps->value)},
                              {"below_gamma_star", r.gamma_eps->below_gamma_star}};
    } else {
        o.doc["gamma_eps"] = nullptr;
    }
    o.doc["ratios"] = {{"star_over_cc", num(c.ratio_star_cc)},
                       {"cc_over_ks", num(c.ratio_cc_ks)},
                       {"star_over_ks", num(c.ratio_star_ks)}};
    o.doc["near_critical"] = c.near_critical;
    o.doc["large_mass"] = c.large_mass;
    if (variance) {
        const auto flag = [](const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); };
        o.doc["satisfies"] = {{"star", flag(r.satisfies_star)},
                              {"cc", flag(r.satisfies_cc)},
                              {"ks", flag(r.satisfies_ks)},
                              {"log", flag(r.satisfies_log)},
                              {"eps", flag(r.satisfies_eps)}};
        o.doc["near_boundary"] = r.near_boundary;
        if (*variance > 0.0) {
            Moments m;
            m.mass = mass;
            m.variance = *variance;
            o.doc["alpha_blowup_upper"] = num(alpha_blowup_upper(m));
        }
    }
    if (!a.beta.empty()) {
        Json lb = Json::array();
        for (double b : a.beta) {
            lb.push_back({{"beta", num(b)}, {"value", num(ratio_lower_bound(mass, b, a.cc_constant))}});
        }
        o.doc["ratio_lower_bound"] = lb;
    }
    return o;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    std::optional<double> mass;
    std::optional<double> alpha;
    std::optional<double> variance;
    std::optional<double> i0;
    double b0x = 0.0;
    double b0y = 0.0;
    double cc_constant = 1.0;
    std::optional<double> lambda;
    std::optional<double> eps;
    std::string density;
};

Json bound_json(const BoundValue& b) {
    Json j{{"value", num(b.value)}, {"applicable", b.value.has_value()}};
    if (!b.value) {
        j["note"] = b.note;
    }
    return j;
}

Output run_bounds(const BoundsArgs& a) {
    const auto dens = load_moments(a.density);
    BoundsInput in;
    if (dens) {
        in.mass = dens->moments.mass;
        in.variance = dens->moments.variance;
        in.b0 = dens->moments.center;
        in.i0 = dens->moments.second_moment;
    }
    if (a.mass) in.mass = *a.mass;
    if (a.variance) in.variance = *a.variance;
    if (!dens && (!a.mass || !a.variance)) {
        throw DomainError("bounds: give --mass and --variance, or --density");
    }
    if (!a.alpha) {
        throw DomainError("bounds: --alpha is required");
    }
    in.alpha = *a.alpha;
    if (!dens) {
        in.b0 = {a.b0x, a.b0y};
    }
    if (a.i0) in.i0 = a.i0;
    in.cc_constant = a.cc_constant;
    in.lambda = a.lambda;
    in.eps = a.eps;

    const TimeBoundReport r = time_bounds(in);
    Output o;
    o.doc["command"] = "bounds";
    Json inputs{{"mass", num(in.mass)},       {"alpha", num(in.alpha)},
                {"variance", num(in.variance)}, {"i0", num(r.i0)},
                {"b0", vec(in.b0)},           {"cc_constant", num(in.cc_constant)},
                {"lambda", num(in.lambda)},   {"eps", num(in.eps)}};
    if (dens) {
        inputs["density"] = moments_json(*dens);
    }
    o.doc["inputs"] = inputs;
    o.doc["gamma_star"] = num(r.gamma_star);
    o.doc["gamma_log"] = num(r.gamma_log);
    o.doc["criterion_satisfied"] = in.variance < r.gamma_star;
    o.doc["near_boundary"] = r.near_boundary;
    o.doc["bounds"] = {{"t_alpha", bound_json(r.t_alpha)},
                       {"t_weak", bound_json(r.t_weak)},
                       {"t_cc", bound_json(r.t_cc)},
                       {"t_ks", bound_json(r.t_ks)},
                       {"t_classic", bound_json(r.t_classic)},
                       {"t_variance", bound_json(r.t_variance)},
                       {"L", bound_json(r.l)},
                       {"K", bound_json(r.k)},
                       {"t_series", bound_json(r.t_series)},
                       {"t_dilog", bound_json(r.t_dilog)},
                       {"t_scaled", bound_json(r.t_scaled)},
                       {"c_alpha_eps", bound_json(r.c_alpha_eps)}};
    o.doc["dilog_u"] = num(r.dilog_u);
    o.doc["lambda_alpha"] = num(r.lambda_alpha);
    if (r.kl) {
        o.doc["kl_certificate"] = {{"K", num(r.kl->k)},
                                   {"L", num(r.kl->l)},
                                   {"sqrt_2_alpha_v2", num(r.kl->a)},
                                   {"y0", num(r.kl->y0)},
                                   {"y1", num(r.kl->y1)},
                                   {"k_le_l", r.kl->k_le_l},
                                   {"y0_sufficient", r.kl->y0_sufficient}};
    } else {
        o.doc["kl_certificate"] = nullptr;
    }
    return o;
}

// ---------------------------------------------------------------- ode

struct OdeArgs {
    std::string rate = "linear";
    double slope = 1.0;
    double intercept = -1.0;
    double c = 1.0;
    double mass = 16.0 * kPi;
    double alpha = 1.0;
    std::optional<double> v0;
    int points = 21;
    double theta_rel_tol = 1e-10;
    double inverse_tol = 1e-12;
};

Output run_ode(const OdeArgs& a) {
    if (!a.v0) {
        throw DomainError("ode: --v0 is required");
    }
    if (a.points < 2) {
        throw DomainError("ode: --points must be >= 2");
    }
    MonotoneRate rate = a.rate == "linear"     ? MonotoneRate::linear(a.slope, a.intercept)
                        : a.rate == "log"      ? MonotoneRate::logarithmic()
                        : a.rate == "constant" ? MonotoneRate::constant_decay(a.c)
                                               : pks_rate(a.mass, a.alpha);
    const InequalityProblem p =
        InequalityProblem::create(std::move(rate), *a.v0, EngineOptions{a.theta_rel_tol, a.inverse_tol});
    const double t_sharp = blowup_time_sharp(p);
    const double t_simple = blowup_time_simple(p);

    Json rows = Json::array();
    for (int k = 0; k < a.points; ++k) {
        const double t = t_sharp * k / a.points;
        Json row{{"t", num(t)}, {"envelope", num(envelope(p, t))}};
        if (t <= t_simple) {
            const WeakEnvelope w = envelope_weak(p, t);
            row["weak"] = num(w.value);
            row["weak_derivative_bound"] = num(w.derivative_bound);
        } else {
            row["weak"] = nullptr;
            row["weak_derivative_bound"] = nullptr;
        }
        rows.push_back(row);
    }

    Output o;
    o.doc["command"] = "ode";
    Json in{{"rate", a.rate}, {"v0", num(*a.v0)}, {"points", a.points},
            {"theta_rel_tol", num(a.theta_rel_tol)}, {"inverse_tol", num(a.inverse_tol)}};
    if (a.rate == "linear") {
        in["slope"] = num(a.slope);
        in["intercept"] = num(a.intercept);
    } else if (a.rate == "constant") {
        in["c"] = num(a.c);
    } else if (a.rate == "pks") {
        in["mass"] = num(a.mass);
        in["alpha"] = num(a.alpha);
    }
    o.doc["inputs"] = in;
    o.doc["lambda_star"] = num(p.lambda_star());
    o.doc["t_sharp"] = num(t_sharp);
    o.doc["t_simple"] = num(t_simple);
    o.doc["near_boundary"] = p.near_boundary();
    o.doc["envelope"] = rows;
    o.table = rows;
    return o;
}

// ---------------------------------------------------------------- roots

Output run_roots(double mass) {
    Output o;
    o.doc["command"] = "roots";
    o.doc["inputs"] = {{"mass", num(mass)}};
    o.doc["y0"] = num(y0_root());
    o.doc["y1"] = num(y1_root(mass));
    o.doc["y2"] = num(y2_root(mass));
    o.doc["b1"] = num(b1(mass));
    o.doc["b2"] = num(b2(mass));
    o.doc["ln_m_over_8pi"] = num(std::log(mass / kCriticalMass));
    return o;
}

// ---------------------------------------------------------------- check-paper-values

struct Reference {
    const char* quantity;
    const char* mass_label;
    double mass;  // 0 for mass-independent values
    double expected;
    std::function<double(double)> compute;
};

Output run_check_values(bool& all_pass) {
    const double m16 = 16.0 * kPi;
    const double m24 = 24.0 * kPi;
    const std::vector<Reference> refs{
        {"y0", "-", 0.0, 1.594, [](double) { return y0_root(); }},
        {"y1", "16pi", m16, 0.461, y1_root},
        {"y2", "16pi", m16, 0.315, y2_root},
        {"b1", "16pi", m16, 0.288, b1},
        {"b2", "16pi", m16, 0.316, b2},
        {"y1", "24pi", m24, 0.693, y1_root},
        {"y2", "24pi", m24, 0.468, y2_root},
        {"b1", "24pi", m24, 0.405, b1},
        {"b2", "24pi", m24, 0.472, b2},
    };
    constexpr double kTol = 5e-3;
    Json rows = Json::array();
    all_pass = true;
    for (const Reference& r : refs) {
        const double v = r.compute(r.mass);
        const double dev = std::abs(v - r.expected);
        const bool pass = dev <= kTol;
        all_pass = all_pass && pass;
        rows.push_back({{"quantity", r.quantity},
                        {"mass", r.mass_label},
                        {"expected", num(r.expected)},
                        {"computed", num(v)},
                        {"deviation", num(dev)},
                        {"tolerance", num(kTol)},
                        {"pass", pass}});
    }
    Output o;
    o.doc["command"] = "check-paper-values";
    o.doc["inputs"] = Json::object();
    o.doc["all_pass"] = all_pass;
    o.doc["values"] = rows;
    o.table = rows;
    return o;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::string density;
    double envelope_tol = 0.05;
    double jensen_tol = 1e-8;
};

Json sample_json(const SimSample& s) {
    return {{"t", num(s.t)},
            {"mass", num(s.mass)},
            {"I", num(s.second_moment)},
            {"V", num(s.variance)},
            {"Vprime_fd", num(s.vprime_fd)},
            {"max_density", num(s.max_density)},
            {"min_density", num(s.min_density)},
            {"center", vec(s.center)},
            {"interaction_rate", num(s.interaction_rate)},
            {"jensen_lhs", num(s.jensen_lhs)},
            {"jensen_rhs", num(s.jensen_rhs)},
            {"cell_peclet", num(s.cell_peclet)},
            {"resolved", s.resolved}};
}

int run_simulate(const SimulateArgs& a, const Common& common, std::ostream& out) {
    const SimConfig cfg = load_sim_config(a.config);
    const Density n0 = load_density(a.density);
    const GridDensity g0 = rasterize(n0, cfg.grid.half_width, cfg.grid.nx, cfg.grid.ny);
    const Moments m0 = compute_moments(g0);
    const SimTrace trace = run(cfg, g0);

    Output o;
    o.doc["command"] = "simulate";
    o.doc["inputs"] = {{"config", Json::parse(sim_config_to_json(cfg))},
                       {"density", a.density},
                       {"envelope_tol", num(a.envelope_tol)},
                       {"jensen_tol", num(a.jensen_tol)}};
    o.doc["initial"] = {{"mass", num(m0.mass)},
                        {"variance", num(m0.variance)},
                        {"center", vec(m0.center)},
                        {"boundary_mass_fraction", num(m0.boundary_mass_fraction)}};
    o.doc["terminated_by"] = std::string(to_string(trace.terminated_by));
    o.doc["blowup_proxy_time"] = num(trace.blowup_proxy_time);
    o.doc["final_time"] = num(trace.samples.back().t);
    o.doc["steps"] = trace.steps;
    o.doc["cfl_limited_steps"] = trace.cfl_limited_steps;
    o.doc["mass_drift"] = num(trace.mass_drift);
    o.doc["clipped_cells"] = trace.clipped_cells;
    o.doc["clipped_mass"] = num(trace.clipped_mass);
    o.doc["samples"] = trace.samples.size();

    if (m0.mass > kCriticalMass && m0.variance < gamma_star(cfg.alpha, m0.mass)) {
        const EnvelopeReport rep =
            check_envelope(trace, m0.mass, cfg.alpha, m0.variance, a.envelope_tol, a.jensen_tol);
        o.doc["envelope_check"] = {{"t_sharp", num(rep.t_sharp)},
                                   {"t_weak", num(rep.t_weak)},
                                   {"checked", rep.checked},
                                   {"sharp_violations", rep.sharp_violations},
                                   {"weak_violations", rep.weak_violations},
                                   {"jensen_violations", rep.jensen_violations},
                                   {"max_sharp_ratio", num(rep.max_sharp_ratio)},
                                   {"max_jensen_excess", num(rep.max_jensen_excess)}};
    } else {
        o.doc["envelope_check"] = nullptr;
    }

    if (!common.out_path.empty()) {
        std::ofstream file(common.out_path);
        if (!file) {
            throw DomainError("cannot open output file " + common.out_path);
        }
        write_trace_csv(trace, file);
        out << o.doc.dump(2) << '\n';
    } else if (common.format == "csv") {
        write_trace_csv(trace, out);
    } else {
        Json samples = Json::array();
        for (const SimSample& s : trace.samples) {
            samples.push_back(sample_json(s));
        }
        o.doc["trace"] = samples;
        out << o.doc.dump(2) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::vector<double> mass;
    std::vector<double> alpha{1.0};
    std::vector<double> fraction{0.5};
    unsigned jobs = 0;
};

Json sweep_row(double mass, double alpha, double fraction) {
    Json row{{"mass", num(mass)}, {"alpha", num(alpha)}, {"variance_fraction", num(fraction)}};
    try {
        const double gs = gamma_star(alpha, mass);
        const double v = fraction * gs;
        row["variance"] = num(v);
        row["gamma_star"] = num(gs);
        row["gamma_cc"] = num(gamma_cc(alpha, mass));
        row["gamma_ks"] = num(gamma_ks(alpha, mass));
        row["gamma_log"] = num(gamma_log(alpha, mass));
        const bool star_ok = v < gs;
        const bool log_ok = v < gamma_log(alpha, mass);
        row["t_alpha"] = star_ok ? num(t_star_alpha(mass, alpha, v)) : Json(nullptr);
        row["t_weak"] = star_ok ? num(t_star_weak(mass, alpha, v)) : Json(nullptr);
        row["t_series"] = log_ok ? num(t_series(mass, alpha, v)) : Json(nullptr);
        row["K"] = log_ok ? num(k_bound(mass, alpha, v)) : Json(nullptr);
        row["L"] = num(l_bound(mass, alpha, v));
        row["error"] = "";
    } catch (const Error& e) {
        for (const char* k : {"variance", "gamma_star", "gamma_cc", "gamma_ks", "gamma_log",
                              "t_alpha", "t_weak", "t_series", "K", "L"}) {
            row[k] = nullptr;
        }
        row["error"] = e.what();
    }
    return row;
}

Output run_sweep(const SweepArgs& a) {
    struct Point {
        double mass, alpha, fraction;
    };
    std::vector<Point> pts;
    for (double m : a.mass) {
        for (double al : a.alpha) {
            for (double f : a.fraction) {
                pts.push_back({m, al, f});
            }
        }
    }
    unsigned jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, pts.size())));
    // Each worker fills a disjoint strided subset; rows are merged by index.
    std::vector<Json> rows(pts.size());
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < pts.size(); i += jobs) {
                rows[i] = sweep_row(pts[i].mass, pts[i].alpha, pts[i].fraction);
            }
        }));
    }
    for (auto& f : workers) {
        f.get();
    }
    Json table = Json::array();
    for (Json& r : rows) {
        table.push_back(std::move(r));
    }
    Output o;
    o.doc["command"] = "sweep";
    o.doc["inputs"] = {{"mass", a.mass}, {"alpha", a.alpha}, {"variance_fraction", a.fraction}};
    for (const char* k : {"mass", "alpha", "variance_fraction"}) {
        for (Json& v : o.doc["inputs"][k]) {
            v = num(v.get<double>());
        }
    }
    o.doc["rows"] = table;
    o.table = table;
    return o;
}

int status_for(const std::exception& e) {
    if (dynamic_cast<const NotApplicableError*>(&e) != nullptr) {
        return kNotApplicable;
    }
    if (dynamic_cast<const DomainError*>(&e) != nullptr) {
        return kValidation;
    }
    return kNumerical;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Blow-up criteria and existence-time bounds for the 2D parabolic-elliptic "
                 "Keller-Segel system with consumption. All quantities are dimensionless.",
                 "pksbound"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--out", common.out_path, "Write the report (or the trace CSV) to a file");

    SpecialfnArgs sf;
    CLI::App* sf_flat = app.add_subcommand("specialfn-eval", "Evaluate g_1, its inverse and related functions");
    add_specialfn_options(sf_flat, sf);
    CLI::App* sf_group = app.add_subcommand("specialfn", "Special functions");
    sf_group->require_subcommand(1);
    CLI::App* sf_eval = sf_group->add_subcommand("eval", "Same as specialfn-eval");
    add_specialfn_options(sf_eval, sf);

    CriteriaArgs cr;
    CLI::App* crit = app.add_subcommand("criteria", "Variance thresholds for finite-time blow-up");
    crit->add_option("--mass", cr.mass, "Total mass M");
    crit->add_option("--alpha", cr.alpha, "Consumption rate")->capture_default_str();
    crit->add_option("--variance", cr.variance, "Initial variance V2");
    crit->add_option("--cc-constant", cr.cc_constant, "Constant C >= 1 of the prior criterion")
        ->capture_default_str();
    crit->add_option("--eps", cr.eps, "Constant for the explicit large-mass threshold");
    crit->add_option("--beta", cr.beta, "Exponent(s) in (0, 1/2) for the ratio lower bound");
    crit->add_option("--density", cr.density, "Density JSON; supplies M and V2 when not given");

    BoundsArgs bd;
    CLI::App* bounds = app.add_subcommand("bounds", "Upper bounds on the maximal existence time");
    bounds->add_option("--mass", bd.mass, "Total mass M");
    bounds->add_option("--alpha", bd.alpha, "Consumption rate");
    bounds->add_option("--variance", bd.variance, "Initial variance V2");
    bounds->add_option("--i0", bd.i0, "Initial second moment (default M (V2 + |B0|^2))");
    bounds->add_option("--b0x", bd.b0x, "Centre of mass, x")->capture_default_str();
    bounds->add_option("--b0y", bd.b0y, "Centre of mass, y")->capture_default_str();
    bounds->add_option("--cc-constant", bd.cc_constant, "Constant C >= 1")->capture_default_str();
    bounds->add_option("--lambda", bd.lambda, "Dilation factor >= 1");
    bounds->add_option("--eps", bd.eps, "Offset above the dilation threshold");
    bounds->add_option("--density", bd.density, "Density JSON; supplies M, V2, I0 and B0");

    OdeArgs od;
    CLI::App* ode = app.add_subcommand("ode", "Differential-inequality envelope for V' <= f(V)");
    ode->add_option("--rate", od.rate, "Rate function")
        ->check(CLI::IsMember({"linear", "log", "constant", "pks"}))
        ->capture_default_str();
    ode->add_option("--slope", od.slope, "linear: f = slope * x + intercept")->capture_default_str();
    ode->add_option("--intercept", od.intercept, "linear intercept (< 0)")->capture_default_str();
    ode->add_option("--c", od.c, "constant: f = -c")->capture_default_str();
    ode->add_option("--mass", od.mass, "pks: mass")->capture_default_str();
    ode->add_option("--alpha", od.alpha, "pks: consumption rate")->capture_default_str();
    ode->add_option("--v0", od.v0, "Initial value V0")->required();
    ode->add_option("--points", od.points, "Rows in the envelope table")->capture_default_str();
    ode->add_option("--theta-rel-tol", od.theta_rel_tol, "Quadrature tolerance for Theta")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    ode->add_option("--inverse-tol", od.inverse_tol, "Root tolerance for the inverse of Theta")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    double roots_mass = 0.0;
    CLI::App* roots = app.add_subcommand("roots", "Roots Y0, Y1, Y2 and brackets B1, B2");
    roots->add_option("--mass", roots_mass, "Total mass M > 8 pi")->required();

    SimulateArgs sm;
    CLI::App* sim = app.add_subcommand("simulate", "Run the grid solver and check the envelopes");
    sim->add_option("--config", sm.config, "Simulation config JSON")->required();
    sim->add_option("--density", sm.density, "Initial density JSON")->required();
    sim->add_option("--envelope-tol", sm.envelope_tol, "Relative tolerance of the envelope check")
        ->capture_default_str();
    sim->add_option("--jensen-tol", sm.jensen_tol, "Absolute tolerance of the Jensen check")
        ->capture_default_str();

    SweepArgs sw;
    CLI::App* sweep = app.add_subcommand("sweep", "Thresholds and bounds on a parameter grid");
    sweep->add_option("--mass", sw.mass, "Mass values")->required();
    sweep->add_option("--alpha", sw.alpha, "Consumption rates")->capture_default_str();
    sweep->add_option("--variance-fraction", sw.fraction, "V2 as fractions of gamma_star")
        ->capture_default_str();
    sweep->add_option("--jobs", sw.jobs, "Worker threads (0 = hardware concurrency)");

    CLI::App* check = app.add_subcommand("check-paper-values",
                                         "Recompute the published three-decimal reference values");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kValidation;
    }

    try {
        if (sf_flat->parsed() || sf_eval->parsed()) {
            emit(run_specialfn(sf), common, out);
        } else if (crit->parsed()) {
            const Output o = run_criteria(cr);
            emit(o, common, out);
            if (o.doc.contains("satisfies") && o.doc["satisfies"]["star"] == false) {
                err << "criterion not satisfied: V2 >= gamma_star\n";
                return kNotApplicable;
            }
        } else if (bounds->parsed()) {
            emit(run_bounds(bd), common, out);
        } else if (ode->parsed()) {
            emit(run_ode(od), common, out);
        } else if (roots->parsed()) {
            emit(run_roots(roots_mass), common, out);
        } else if (sim->parsed()) {
            return run_simulate(sm, common, out);
        } else if (sweep->parsed()) {
            emit(run_sweep(sw), common, out);
        } else if (check->parsed()) {
            bool all_pass = false;
            emit(run_check_values(all_pass), common, out);
            return all_pass ? kOk : kNumerical;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return status_for(e);
    }
    return kOk;
}

}  // namespace pks::cli
