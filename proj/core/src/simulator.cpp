#include "pks/simulator.hpp"

#include "pks/error.hpp"
#include "pks/ode_bound.hpp"
#include "pks/pks_bounds.hpp"
#include "pks/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace pks {
namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_grid(const GridSpec& g) {
    if (!(g.half_width > 0.0) || !std::isfinite(g.half_width)) {
        throw DomainError("grid: L must be finite and > 0");
    }
    if (!is_power_of_two(g.nx) || !is_power_of_two(g.ny) || g.nx < 4 || g.ny < 4) {
        throw DomainError("grid: nx and ny must be powers of two >= 4");
    }
}

void validate_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("alpha must be finite and > 0 (alpha = 0 has no periodic solve)");
    }
}

void require_matching(const GridDensity& n, const GridSpec& g) {
    if (n.nx != g.nx || n.ny != g.ny || n.half_width != g.half_width ||
        n.values.size() != static_cast<std::size_t>(g.nx) * g.ny) {
        throw DomainError("density grid does not match the simulation grid");
    }
}

GridSpec spec_of(const GridDensity& n) { return {n.half_width, n.nx, n.ny}; }

// Signed integer wave number for index i of an n-point transform.
int wave_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

void SimConfig::validate() const {
    validate_grid(grid);
    validate_alpha(alpha);
    if (!(dt0 > 0.0) || !(t_end > 0.0) || !std::isfinite(dt0) || !std::isfinite(t_end)) {
        throw DomainError("dt0 and t_end must be finite and > 0");
    }
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) {
        throw DomainError("cfl_safety must lie in (0, 1)");
    }
    if (!(blowup_density_factor > 1.0)) {
        throw DomainError("blowup_density_factor must be > 1");
    }
    if (!(dt_min > 0.0 && dt_min < dt0)) {
        throw DomainError("dt_min must satisfy 0 < dt_min < dt0");
    }
    if (!(sample_interval >= 0.0) || !std::isfinite(sample_interval)) {
        throw DomainError("sample_interval must be finite and >= 0");
    }
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::t_end: return "t_end";
        case Termination::blowup_proxy: return "blowup_proxy";
        case Termination::dt_collapse: return "dt_collapse";
    }
    return "unknown";
}

GridDensity solve_concentration(const GridDensity& n, double alpha) {
    validate_alpha(alpha);
    validate_grid(spec_of(n));
    Fft2d fft(n.nx, n.ny);
    std::vector<std::complex<double>> spec;
    fft.forward(n.values, spec);
    const int w = fft.spectrum_width();
    const double k0 = kPi / n.half_width;
    for (int iy = 0; iy < n.ny; ++iy) {
        const double ky = k0 * wave_index(iy, n.ny);
        for (int ix = 0; ix < w; ++ix) {
            const double kx = k0 * ix;
            spec[static_cast<std::size_t>(iy) * w + ix] /= kx * kx + ky * ky + alpha;
        }
    }
    GridDensity c{n.half_width, n.nx, n.ny, {}};
    fft.inverse(spec, c.values);
    return c;
}

InteractionKernel::InteractionKernel(double alpha, const GridSpec& grid)
    : alpha_(alpha), grid_(grid), fft_(2 * grid.nx, 2 * grid.ny) {
    validate_alpha(alpha);
    validate_grid(grid);
    const int px = 2 * grid.nx;
    const int py = 2 * grid.ny;
    const double dx = 2.0 * grid.half_width / grid.nx;
    const double dy = 2.0 * grid.half_width / grid.ny;
    std::vector<double> kernel(static_cast<std::size_t>(px) * py, 0.0);
    std::map<std::pair<int, int>, double> cache;
    const bool square = dx == dy;
    for (int jy = -(grid.ny - 1); jy <= grid.ny - 1; ++jy) {
        for (int jx = -(grid.nx - 1); jx <= grid.nx - 1; ++jx) {
            int a = std::abs(jx);
            int b = std::abs(jy);
            if (square && b < a) {
                std::swap(a, b);
            }
            auto it = cache.find({a, b});
            if (it == cache.end()) {
                const double r = square ? dx * std::hypot(a, b) : std::hypot(a * dx, b * dy);
                it = cache.emplace(std::make_pair(a, b), r == 0.0 ? 1.0 : g_alpha(alpha, r)).first;
            }
            const int ix = (jx + px) % px;
            const int iy = (jy + py) % py;
            kernel[static_cast<std::size_t>(iy) * px + ix] = it->second;
        }
    }
    fft_.forward(kernel, kernel_hat_);
    padded_.assign(kernel.size(), 0.0);
}

double InteractionKernel::double_integral(const GridDensity& n) {
    require_matching(n, grid_);
    const int px = 2 * grid_.nx;
    std::fill(padded_.begin(), padded_.end(), 0.0);
    for (int iy = 0; iy < n.ny; ++iy) {
        std::copy_n(n.values.begin() + static_cast<std::ptrdiff_t>(iy) * n.nx, n.nx,
                    padded_.begin() + static_cast<std::ptrdiff_t>(iy) * px);
    }
    fft_.forward(padded_, work_hat_);
    for (std::size_t i = 0; i < work_hat_.size(); ++i) {
        work_hat_[i] *= kernel_hat_[i];
    }
    fft_.inverse(work_hat_, padded_);
    double sum = 0.0;
    double comp = 0.0;
    for (int iy = 0; iy < n.ny; ++iy) {
        for (int ix = 0; ix < n.nx; ++ix) {
            const double term = n.at(ix, iy) * padded_[static_cast<std::size_t>(iy) * px + ix];
            const double s = sum + term;
            comp += std::abs(sum) >= std::abs(term) ? (sum - s) + term : (term - s) + sum;
            sum = s;
        }
    }
    const double area = n.cell_area();
    return (sum + comp) * area * area;
}

double interaction_integral(const GridDensity& n, double alpha) {
    InteractionKernel kernel(alpha, spec_of(n));
    const double mass = compute_moments(n).mass;
    return 4.0 * mass - kernel.double_integral(n) / (2.0 * kPi);
}

Simulator::Simulator(const SimConfig& config, GridDensity n0)
    : config_(config),
      n_(std::move(n0)),
      fft_(config.grid.nx, config.grid.ny),
      kernel_(config.alpha, config.grid) {
    config_.validate();
    require_matching(n_, config_.grid);
    const int w = fft_.spectrum_width();
    const int ny = config_.grid.ny;
    const double k0 = kPi / config_.grid.half_width;
    const double dx = n_.dx();
    const double dy = n_.dy();
    inv_helmholtz_.resize(static_cast<std::size_t>(w) * ny);
    lap_symbol_.resize(inv_helmholtz_.size());
    for (int iy = 0; iy < ny; ++iy) {
        const int my = wave_index(iy, ny);
        const double ky = k0 * my;
        const double sy = std::sin(kPi * my / ny);
        for (int ix = 0; ix < w; ++ix) {
            const double kx = k0 * ix;
            const double sx = std::sin(kPi * ix / config_.grid.nx);
            const std::size_t i = static_cast<std::size_t>(iy) * w + ix;
            inv_helmholtz_[i] = 1.0 / (kx * kx + ky * ky + config_.alpha);
            lap_symbol_[i] = 4.0 * sx * sx / (dx * dx) + 4.0 * sy * sy / (dy * dy);
        }
    }
}

void Simulator::concentration(const std::vector<double>& n, std::vector<double>& c) {
    fft_.forward(n, spec_);
    for (std::size_t i = 0; i < spec_.size(); ++i) {
        spec_[i] *= inv_helmholtz_[i];
    }
    fft_.inverse(spec_, c);
}

void Simulator::diffuse(std::vector<double>& v, double dt) {
    fft_.forward(v, spec_);
    for (std::size_t i = 0; i < spec_.size(); ++i) {
        spec_[i] *= std::exp(-lap_symbol_[i] * dt);
    }
    fft_.inverse(spec_, v);
}

void Simulator::advection(const std::vector<double>& n, std::vector<double>& out,
                          double& max_grad) {
    concentration(n, c_);
    const int nx = n_.nx;
    const int ny = n_.ny;
    const double dx = n_.dx();
    const double dy = n_.dy();
    const std::size_t total = n.size();
    // scratch_ holds x-face fluxes then y-face fluxes; face i sits on the +side of cell i.
    scratch_.resize(2 * total);
    double* fx = scratch_.data();
    double* fy = scratch_.data() + total;
    max_grad = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        const int iy_up = (iy + 1) % ny;
        for (int ix = 0; ix < nx; ++ix) {
            const int ix_up = (ix + 1) % nx;
            const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
            const std::size_t ir = static_cast<std::size_t>(iy) * nx + ix_up;
            const std::size_t iu = static_cast<std::size_t>(iy_up) * nx + ix;
            const double gx = (c_[ir] - c_[i]) / dx;
            const double gy = (c_[iu] - c_[i]) / dy;
            fx[i] = 0.5 * (n[i] + n[ir]) * gx;
            fy[i] = 0.5 * (n[i] + n[iu]) * gy;
            max_grad = std::max(max_grad, std::hypot(gx, gy));
        }
    }
    out.resize(total);
    for (int iy = 0; iy < ny; ++iy) {
        const int iy_dn = (iy + ny - 1) % ny;
        for (int ix = 0; ix < nx; ++ix) {
            const int ix_dn = (ix + nx - 1) % nx;
            const std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
            const std::size_t il = static_cast<std::size_t>(iy) * nx + ix_dn;
            const std::size_t id = static_cast<std::size_t>(iy_dn) * nx + ix;
            out[i] = -(fx[i] - fx[il]) / dx - (fy[i] - fy[id]) / dy;
        }
    }
}

double Simulator::max_stable_dt() {
    if (!grad_valid_) {
        advection(n_.values, adv_, last_max_grad_);
        grad_valid_ = true;
    }
    const double h = std::min(n_.dx(), n_.dy());
    const double limit = last_max_grad_ > 0.0 ? std::min(h * h / 4.0, h / last_max_grad_)
                                              : h * h / 4.0;
    return config_.cfl_safety * limit;
}

bool Simulator::step(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("step: dt must be finite and > 0");
    }
    const double allowed = max_stable_dt();  // also leaves N(n) in adv_
    if (dt > allowed * (1.0 + 1e-12)) {
        return false;
    }
    std::vector<double>& n = n_.values;
    const std::size_t total = n.size();

    // Integrating-factor Heun with E = exp(dt Laplacian):
    //   n1 = E (n + dt N(n)),  n_new = (E n + n1) / 2 + dt/2 N(n1).
    stage_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        stage_[i] = n[i] + dt * adv_[i];
    }
    diffuse(stage_, dt);
    diffuse(n, dt);
    double grad_unused = 0.0;
    advection(stage_, adv_, grad_unused);
    double max_val = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        n[i] = 0.5 * (n[i] + stage_[i]) + 0.5 * dt * adv_[i];
        if (!std::isfinite(n[i])) {
            throw NumericalError("simulator: non-finite density at t = " + std::to_string(t_ + dt) +
                                 ", cell " + std::to_string(i));
        }
        max_val = std::max(max_val, n[i]);
    }
    const double floor = -1e-12 * max_val;
    const double area = n_.cell_area();
    for (double& v : n) {
        if (v < floor) {
            ++clipped_cells_;
            clipped_mass_ += (floor - v) * area;
            v = floor;
        }
    }
    t_ += dt;
    grad_valid_ = false;
    return true;
}

SimSample Simulator::sample() {
    const Moments m = compute_moments(n_);
    SimSample s;
    s.t = t_;
    s.mass = m.mass;
    s.second_moment = m.second_moment;
    s.variance = m.variance;
    s.center = m.center;
    const auto [lo, hi] = std::minmax_element(n_.values.begin(), n_.values.end());
    s.min_density = *lo;
    s.max_density = *hi;
    const double integral = kernel_.double_integral(n_);
    s.interaction_rate = 4.0 * m.mass - integral / (2.0 * kPi);
    s.jensen_lhs = -integral / (m.mass * m.mass);
    s.jensen_rhs = -g_alpha(config_.alpha, std::sqrt(2.0 * m.variance));
    max_stable_dt();
    s.cell_peclet = last_max_grad_ * std::max(n_.dx(), n_.dy());
    s.resolved = clipped_cells_ == 0 && s.cell_peclet < 2.0;
    return s;
}

SimTrace run(const SimConfig& config, const Density& n0) {
    config.validate();
    return run(config, rasterize(n0, config.grid.half_width, config.grid.nx, config.grid.ny));
}

SimTrace run(const SimConfig& config, GridDensity n0) {
    config.validate();
    const Moments m0 = compute_moments(n0);
    if (m0.boundary_warning) {
        throw DomainError("initial density has mass fraction " +
                          std::to_string(m0.boundary_mass_fraction) +
                          " near the box edge; enlarge L");
    }
    Simulator sim(config, std::move(n0));
    SimTrace trace;
    bool resolved = true;
    const auto record = [&]() {
        SimSample s = sim.sample();
        resolved = resolved && s.resolved;
        s.resolved = resolved;
        trace.samples.push_back(s);
    };
    record();
    const double max0 = trace.samples.front().max_density;
    double last_sample = 0.0;
    bool recorded_last = true;
    for (;;) {
        const double remaining = config.t_end - sim.time();
        if (remaining <= 1e-12 * config.t_end) {
            trace.terminated_by = Termination::t_end;
            break;
        }
        const double cap = sim.max_stable_dt();
        if (cap < config.dt_min) {
            trace.terminated_by = Termination::dt_collapse;
            break;
        }
        const double dt_try = std::min({config.dt0, remaining, cap});
        if (!sim.step(dt_try)) {
            throw NumericalError("simulator: step rejected at its own stability limit");
        }
        ++trace.steps;
        if (cap < config.dt0 && dt_try == cap) {
            ++trace.cfl_limited_steps;
        }
        recorded_last = false;
        const double max_now = *std::max_element(sim.density().values.begin(),
                                                  sim.density().values.end());
        if (max_now >= config.blowup_density_factor * max0) {
            trace.terminated_by = Termination::blowup_proxy;
            trace.blowup_proxy_time = sim.time();
            break;
        }
        if (sim.time() - last_sample >= config.sample_interval) {
            record();
            last_sample = sim.time();
            recorded_last = true;
        }
    }
    if (!recorded_last) {
        record();
    }

    auto& s = trace.samples;
    const double mass0 = s.front().mass;
    for (std::size_t k = 0; k < s.size(); ++k) {
        trace.mass_drift = std::max(trace.mass_drift, std::abs(s[k].mass / mass0 - 1.0));
        if (k > 0) {
            s[k].vprime_fd = (s[k].variance - s[k - 1].variance) / (s[k].t - s[k - 1].t);
        }
    }
    if (s.size() > 1) {
        s[0].vprime_fd = s[1].vprime_fd;
    }
    trace.clipped_cells = sim.clipped_cells();
    trace.clipped_mass = sim.clipped_mass();
    return trace;
}

EnvelopeReport check_envelope(const SimTrace& trace, double mass, double alpha, double variance,
                              double tol, double jensen_tol) {
    const InequalityProblem p = pks_problem(mass, alpha, variance);
    EnvelopeReport rep;
    rep.t_sharp = blowup_time_sharp(p);
    rep.t_weak = blowup_time_simple(p);
    const double f0 = p.rate()(variance);
    for (const SimSample& s : trace.samples) {
        const double excess = s.jensen_lhs - s.jensen_rhs;
        rep.max_jensen_excess = std::max(rep.max_jensen_excess, excess);
        if (excess > jensen_tol) {
            ++rep.jensen_violations;
        }
        if (!s.resolved || !(s.t < rep.t_sharp)) {
            continue;
        }
        ++rep.checked;
        const double env = envelope(p, s.t);
        rep.max_sharp_ratio = std::max(rep.max_sharp_ratio, s.variance / env);
        if (s.variance > env * (1.0 + tol)) {
            ++rep.sharp_violations;
        }
        if (s.t <= rep.t_weak && s.variance > variance + s.t * f0 + tol) {
            ++rep.weak_violations;
        }
    }
    return rep;
}

}  // namespace pks
