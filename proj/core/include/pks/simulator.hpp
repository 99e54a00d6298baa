#pragma once

#include "pks/fft.hpp"
#include "pks/moments.hpp"

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace pks {

/// Periodic box [-L, L]^2 with nx x ny cells; both counts powers of two.
struct GridSpec {
    double half_width = 5.0;
    int nx = 128;
    int ny = 128;
};

struct SimConfig {
    GridSpec grid;
    double alpha = 1.0;
    double dt0 = 1e-3;
    double t_end = 1.0;
    double cfl_safety = 0.5;
    /// Blow-up proxy: stop once max density reaches this multiple of the initial max.
    double blowup_density_factor = 1e3;
    double dt_min = 1e-8;
    /// Minimum time between recorded samples; 0 records every step.
    double sample_interval = 0.0;

    /// Throws DomainError when an invariant does not hold.
    void validate() const;
};

enum class Termination { t_end, blowup_proxy, dt_collapse };

std::string_view to_string(Termination t);

struct SimSample {
    double t = 0.0;
    double mass = 0.0;
    double second_moment = 0.0;  ///< I(t)
    double variance = 0.0;       ///< V(t)
    double vprime_fd = 0.0;      ///< backward difference; forward at t = 0
    double max_density = 0.0;
    double min_density = 0.0;
    Vec2 center;
    /// 4M - (1/2pi) sum n (G_alpha * n) dA, the exact rate of I for the
    /// continuous equation evaluated on the grid measure.
    double interaction_rate = 0.0;
    /// -(1/M^2) sum n (G_alpha * n) dA^2 and -g_alpha(sqrt(2V)).
    double jensen_lhs = 0.0;
    double jensen_rhs = 0.0;
    /// max |grad c| dx; central advection is monotone below 2.
    double cell_peclet = 0.0;
    /// No undershoot clipped so far and cell Peclet number below 2.
    bool resolved = true;
};

struct SimTrace {
    std::vector<SimSample> samples;
    Termination terminated_by = Termination::t_end;
    std::optional<double> blowup_proxy_time;
    /// max over samples of |mass(t)/mass(0) - 1|.
    double mass_drift = 0.0;
    long steps = 0;
    /// Steps whose size was set by the CFL limit rather than dt0 or t_end.
    long cfl_limited_steps = 0;
    long clipped_cells = 0;
    double clipped_mass = 0.0;
};

/// Spectral solution of (-Laplacian + alpha) c = n on the periodic box.
/// Throws DomainError for alpha <= 0 or non power-of-two sizes.
GridDensity solve_concentration(const GridDensity& n, double alpha);

/// G_alpha(z) = g_alpha(|z|) sampled on every cell offset of a grid, applied
/// by zero-padded FFT convolution (no periodic images).
class InteractionKernel {
public:
    InteractionKernel(double alpha, const GridSpec& grid);

    /// sum_{i,j} n_i n_j G_alpha(x_i - x_j) dA^2, i.e. the double integral of
    /// g_alpha(|x - y|) n(x) n(y) for the grid measure.
    double double_integral(const GridDensity& n);

    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
    GridSpec grid_;
    Fft2d fft_;
    std::vector<std::complex<double>> kernel_hat_;
    std::vector<double> padded_;
    std::vector<std::complex<double>> work_hat_;
};

/// I'(t) = 4M - (1/2pi) * double integral of g_alpha(|x - y|) n n.
double interaction_integral(const GridDensity& n, double alpha);

/// One PKS state on the periodic box. Diffusion uses the exact exponential of
/// the five-point Laplacian (applied spectrally, positivity preserving);
/// advection is the flux-form central difference of n grad c with c from the
/// spectral solve. Integrating-factor Heun gives second order in time.
class Simulator {
public:
    Simulator(const SimConfig& config, GridDensity n0);

    double time() const noexcept { return t_; }
    const GridDensity& density() const noexcept { return n_; }

    /// cfl_safety * min(dx^2/4, dx / max|grad c|) for the current state.
    double max_stable_dt();

    /// Advances by dt. Returns false, leaving the state untouched, when dt
    /// violates the CFL rule. Throws NumericalError on non-finite values.
    bool step(double dt);

    /// Diagnostics of the current state (vprime_fd is left at 0).
    SimSample sample();

    long clipped_cells() const noexcept { return clipped_cells_; }
    double clipped_mass() const noexcept { return clipped_mass_; }

private:
    // -div(n grad c), and max |grad c| over faces.
    void advection(const std::vector<double>& n, std::vector<double>& out, double& max_grad);
    void concentration(const std::vector<double>& n, std::vector<double>& c);
    void diffuse(std::vector<double>& v, double dt);

    SimConfig config_;
    GridDensity n_;
    double t_ = 0.0;
    Fft2d fft_;
    InteractionKernel kernel_;
    std::vector<double> inv_helmholtz_;  // 1 / (|k|^2 + alpha), half spectrum
    std::vector<double> lap_symbol_;     // -(five-point Laplacian symbol) >= 0
    std::vector<std::complex<double>> spec_;
    std::vector<double> c_;
    std::vector<double> adv_;
    std::vector<double> stage_;
    std::vector<double> scratch_;
    double last_max_grad_ = 0.0;
    bool grad_valid_ = false;
    long clipped_cells_ = 0;
    double clipped_mass_ = 0.0;
};

/// Runs from a density rasterized onto the configured grid until t_end,
/// the blow-up proxy, or dt < dt_min. Throws DomainError when the initial
/// mass within three cells of the box edge exceeds kBoundaryMassWarning.
SimTrace run(const SimConfig& config, const Density& n0);
SimTrace run(const SimConfig& config, GridDensity n0);

struct EnvelopeReport {
    double t_sharp = 0.0;  ///< Theta(0) for the given data
    double t_weak = 0.0;   ///< V2 / -f(V2)
    int checked = 0;       ///< resolved samples with t < t_sharp
    int sharp_violations = 0;
    int weak_violations = 0;
    int jensen_violations = 0;
    /// max over checked samples of V(t) / Theta^{-1}(t).
    double max_sharp_ratio = 0.0;
    /// max over all samples of jensen_lhs - jensen_rhs (<= 0 when it holds).
    double max_jensen_excess = -1.0;
};

/// Compares resolved samples with t < Theta(0) against V <= Theta^{-1}(t)(1 + tol)
/// and, for t <= V2/-f(V2), V <= V2 + t f(V2) + tol; checks the Jensen inequality
/// at every sample to `jensen_tol`. Throws NotApplicableError unless
/// V2 < gamma_star(alpha, M).
EnvelopeReport check_envelope(const SimTrace& trace, double mass, double alpha, double variance,
                              double tol = 0.05, double jensen_tol = 1e-8);

}  // namespace pks
