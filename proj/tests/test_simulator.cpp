#include "oracles.hpp"

#include "pks/error.hpp"
#include "pks/sim_io.hpp"
#include "pks/simulator.hpp"
#include "pks/specialfn.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

using namespace pks;

namespace {

GridDensity make_grid(double half_width, int n) {
    GridDensity g;
    g.half_width = half_width;
    g.nx = n;
    g.ny = n;
    g.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    return g;
}

SimConfig config_for(const GridDensity& g, double alpha) {
    SimConfig c;
    c.grid = {g.half_width, g.nx, g.ny};
    c.alpha = alpha;
    return c;
}

}  // namespace

TEST_CASE("Helmholtz solve is exact on a Fourier mode") {
    const double L = 2.0;
    const double alpha = 0.7;
    GridDensity n = make_grid(L, 32);
    const double k = 3.0 * kPi / L;
    for (int iy = 0; iy < n.ny; ++iy) {
        for (int ix = 0; ix < n.nx; ++ix) {
            n.at(ix, iy) = 1.0 + 0.5 * std::cos(k * n.x(ix));
        }
    }
    const GridDensity c = solve_concentration(n, alpha);
    double err = 0.0;
    for (int iy = 0; iy < n.ny; ++iy) {
        for (int ix = 0; ix < n.nx; ++ix) {
            const double exact = 1.0 / alpha + 0.5 * std::cos(k * n.x(ix)) / (k * k + alpha);
            err = std::max(err, std::abs(c.at(ix, iy) - exact));
        }
    }
    CHECK(err < 1e-13);
}

TEST_CASE("constant density gives c = n / alpha") {
    GridDensity n = make_grid(3.0, 16);
    n.values.assign(n.values.size(), 2.5);
    const GridDensity c = solve_concentration(n, 0.5);
    for (double v : c.values) {
        CHECK(v == doctest::Approx(5.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(solve_concentration(n, 0.0), DomainError);
    GridDensity odd = make_grid(3.0, 12);
    odd.values.assign(odd.values.size(), 1.0);
    CHECK_THROWS_AS(solve_concentration(odd, 1.0), DomainError);
}

TEST_CASE("narrow Gaussian source reproduces the Bessel kernel") {
    const double alpha = 1.0;
    GridDensity n = make_grid(8.0, 256);
    const double x0 = n.x(128);
    const double sigma = 0.15;
    double mass = 0.0;
    for (int iy = 0; iy < n.ny; ++iy) {
        for (int ix = 0; ix < n.nx; ++ix) {
            const double r2 = std::pow(n.x(ix) - x0, 2) + std::pow(n.y(iy) - x0, 2);
            n.at(ix, iy) = std::exp(-r2 / (2 * sigma * sigma));
            mass += n.at(ix, iy) * n.cell_area();
        }
    }
    const GridDensity c = solve_concentration(n, alpha);
    for (int offset : {16, 32, 48}) {
        const double r = offset * n.dx();
        const double expected = mass * bessel_kernel(alpha, r);
        CHECK(oracle::rel_diff(c.at(128 + offset, 128), expected) < 0.02);
    }
}

TEST_CASE("uniform density is a steady state") {
    GridDensity n = make_grid(2.0, 16);
    n.values.assign(n.values.size(), 3.0);
    SimConfig cfg = config_for(n, 1.0);
    Simulator sim(cfg, n);
    for (int i = 0; i < 20; ++i) {
        REQUIRE(sim.step(0.25 * sim.max_stable_dt()));
    }
    for (double v : sim.density().values) {
        CHECK(std::abs(v - 3.0) < 1e-13);
    }
}

TEST_CASE("small Fourier mode decays at the discrete diffusion rate") {
    const double L = kPi;
    const int N = 64;
    const double b = 1e-6;
    GridDensity n = make_grid(L, N);
    for (int iy = 0; iy < N; ++iy) {
        for (int ix = 0; ix < N; ++ix) {
            n.at(ix, iy) = b * (1.0 + 0.5 * std::cos(n.x(ix)));
        }
    }
    SimConfig cfg = config_for(n, 1.0);
    Simulator sim(cfg, n);
    const double t_end = 0.5;
    while (sim.time() < t_end - 1e-14) {
        REQUIRE(sim.step(std::min(sim.max_stable_dt(), t_end - sim.time())));
    }
    // Five-point symbol of -Laplacian at unit wavenumber.
    const double dx = n.dx();
    const double lambda = 4.0 / (dx * dx) * std::pow(std::sin(dx / 2.0), 2);
    const double expected = 0.5 * b * std::exp(-lambda * t_end);
    double amp = 0.0;
    for (int ix = 0; ix < N; ++ix) {
        amp += sim.density().at(ix, 7) * std::cos(n.x(ix));
    }
    amp *= 2.0 / N;
    CHECK(std::abs(amp / expected - 1.0) < 1e-4);
}

TEST_CASE("mass and center of mass are conserved") {
    SimConfig cfg;
    cfg.grid = {8.0, 64, 64};
    cfg.alpha = 1.0;
    const Density d = Density::from_primitives({Gaussian{{0.4, -0.2}, 0.6, 6.0 * kPi}});
    const GridDensity g = rasterize(d, cfg.grid.half_width, cfg.grid.nx, cfg.grid.ny);
    const Moments m0 = compute_moments(g);
    Simulator sim(cfg, g);
    // Long enough for the spreading density to wrap around the periodic box.
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(sim.step(sim.max_stable_dt()));
        if (i == 19) {
            // Negligible mass at the box edge yet: the centre has not moved.
            const Moments early = compute_moments(sim.density());
            CHECK(std::abs(early.center.x - m0.center.x) < 1e-10);
            CHECK(std::abs(early.center.y - m0.center.y) < 1e-10);
        }
    }
    const Moments m1 = compute_moments(sim.density());
    CHECK(std::abs(m1.mass / m0.mass - 1.0) < 1e-12);
    CHECK(sim.clipped_cells() == 0);
}

TEST_CASE("step refuses sizes beyond the CFL limit") {
    GridDensity n = make_grid(2.0, 16);
    n.values.assign(n.values.size(), 1.0);
    Simulator sim(config_for(n, 1.0), n);
    const double limit = sim.max_stable_dt();
    CHECK_FALSE(sim.step(2.0 * limit));
    CHECK(sim.time() == 0.0);
    CHECK_THROWS_AS(sim.step(-1.0), DomainError);
}

TEST_CASE("single occupied cell interacts only with itself") {
    GridDensity n = make_grid(2.0, 16);
    n.at(5, 9) = 4.0;
    const double m = 4.0 * n.cell_area();
    InteractionKernel k(1.0, {n.half_width, n.nx, n.ny});
    CHECK(k.double_integral(n) == doctest::Approx(m * m).epsilon(1e-12));
    CHECK(interaction_integral(n, 1.0) == doctest::Approx(4.0 * m - m * m / (2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("FFT interaction sum equals the direct double sum") {
    const double alpha = 1.7;
    const int N = 32;
    GridDensity n = make_grid(3.0, N);
    for (int iy = 0; iy < N; ++iy) {
        for (int ix = 0; ix < N; ++ix) {
            const double x = n.x(ix);
            const double y = n.y(iy);
            n.at(ix, iy) = std::exp(-((x - 0.5) * (x - 0.5) + y * y) / 0.5) +
                           0.3 * std::exp(-((x + 1.0) * (x + 1.0) + (y - 1.0) * (y - 1.0)) / 0.2);
        }
    }
    const double s = std::sqrt(alpha);
    double direct = 0.0;
    for (int a = 0; a < N * N; ++a) {
        for (int b = 0; b < N * N; ++b) {
            const double r = std::hypot(n.x(a % N) - n.x(b % N), n.y(a / N) - n.y(b / N));
            const double g = r == 0.0 ? 1.0 : s * r * std::cyl_bessel_k(1.0, s * r);
            direct += n.values[a] * n.values[b] * g;
        }
    }
    direct *= n.cell_area() * n.cell_area();
    InteractionKernel k(alpha, {n.half_width, N, N});
    CHECK(oracle::rel_diff(k.double_integral(n), direct) < 1e-10);
}

TEST_CASE("second moment changes at the interaction rate") {
    SimConfig cfg;
    cfg.grid = {5.0, 128, 128};
    cfg.alpha = 1.0;
    const Density d = Density::from_primitives({Gaussian{{}, 0.6, 4.0 * kPi}});
    Simulator sim(cfg, rasterize(d, 5.0, 128, 128));
    const SimSample before = sim.sample();
    const double h = 1e-3;
    while (sim.time() < h - 1e-15) {
        REQUIRE(sim.step(std::min(sim.max_stable_dt(), h - sim.time())));
    }
    const SimSample after = sim.sample();
    const double fd = (after.second_moment - before.second_moment) / h;
    const double mid = 0.5 * (before.interaction_rate + after.interaction_rate);
    CHECK(std::abs(fd / mid - 1.0) < 0.05);
}

TEST_CASE("run rejects densities touching the box edge") {
    SimConfig cfg;
    cfg.grid = {2.0, 32, 32};
    const Density d = Density::from_primitives({Gaussian{{}, 1.0, 1.0}});
    CHECK_THROWS_AS(run(cfg, d), DomainError);
}

TEST_CASE("subcritical run spreads and reaches t_end") {
    SimConfig cfg;
    cfg.grid = {6.0, 64, 64};
    cfg.t_end = 0.2;
    cfg.dt0 = 0.005;
    cfg.sample_interval = 0.05;
    const Density d = Density::from_primitives({Gaussian{{}, 0.5, 4.0 * kPi}});
    const SimTrace trace = run(cfg, d);
    CHECK(trace.terminated_by == Termination::t_end);
    CHECK(trace.samples.back().t == doctest::Approx(0.2));
    CHECK(trace.samples.back().max_density < trace.samples.front().max_density);
    CHECK(trace.mass_drift < 1e-12);
    CHECK(trace.samples.size() >= 5);
    for (const SimSample& s : trace.samples) {
        CHECK(s.jensen_lhs <= s.jensen_rhs + 1e-8);
    }
}

TEST_CASE("envelope check flags synthetic violations") {
    const double mass = 16.0 * kPi;
    SimTrace trace;
    SimSample s;
    s.mass = mass;
    s.variance = 0.1;
    s.jensen_lhs = -0.5;
    s.jensen_rhs = -0.4;
    trace.samples.push_back(s);
    s.t = 0.01;
    s.variance = 0.2;
    s.jensen_lhs = -0.3;
    trace.samples.push_back(s);
    const EnvelopeReport r = check_envelope(trace, mass, 1.0, 0.1);
    CHECK(r.checked == 2);
    CHECK(r.sharp_violations == 1);
    CHECK(r.weak_violations == 1);
    CHECK(r.jensen_violations == 1);
    CHECK(r.max_jensen_excess == doctest::Approx(0.1));
    CHECK_THROWS_AS(check_envelope(trace, mass, 1.0, 10.0), NotApplicableError);
}

TEST_CASE("config documents") {
    const SimConfig c = parse_sim_config(R"({"grid": {"L": 4.0, "nx": 64}, "alpha": 2.0, "sample_interval": 0.01})");
    CHECK(c.grid.half_width == 4.0);
    CHECK(c.grid.nx == 64);
    CHECK(c.grid.ny == 128);
    CHECK(c.alpha == 2.0);
    CHECK(c.dt0 == SimConfig{}.dt0);
    const SimConfig again = parse_sim_config(sim_config_to_json(c));
    CHECK(again.sample_interval == 0.01);
    CHECK(again.grid.nx == 64);
    CHECK_THROWS_AS(parse_sim_config(R"({"gird": {}})"), DomainError);
    CHECK_THROWS_AS(parse_sim_config(R"({"grid": {"nx": 100}})"), DomainError);
    CHECK_THROWS_AS(parse_sim_config(R"({"cfl_safety": 1.5})"), DomainError);
    CHECK_THROWS_AS(parse_sim_config("[1, 2]"), DomainError);
}

TEST_CASE("trace CSV layout") {
    SimTrace trace;
    SimSample s;
    s.t = 0.5;
    s.mass = 2.0;
    s.second_moment = 1.25;
    s.variance = 0.625;
    s.vprime_fd = -0.1;
    s.max_density = 3.0;
    trace.samples.push_back(s);
    std::ostringstream out;
    write_trace_csv(trace, out);
    CHECK(out.str() == "t,mass,I,V,Vprime_fd,max_density\n0.5,2,1.25,0.625,-0.1,3\n");
}
