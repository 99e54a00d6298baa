#include "oracles.hpp"

#include "pks/density_io.hpp"
#include "pks/error.hpp"
#include "pks/moments.hpp"
#include "pks/specialfn.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace pks;

TEST_CASE("closed-form moments of a uniform ball") {
    const Density d = Density::from_primitives({UniformBall{{1.0, -2.0}, 0.8, 3.0}});
    const Moments m = compute_moments(d);
    CHECK(m.mass == doctest::Approx(3.0 * kPi * 0.64).epsilon(1e-15));
    CHECK(m.center.x == doctest::Approx(1.0));
    CHECK(m.center.y == doctest::Approx(-2.0));
    CHECK(m.variance == doctest::Approx(0.32).epsilon(1e-14));
    CHECK(m.second_moment == doctest::Approx(m.mass * (0.32 + 5.0)).epsilon(1e-14));
}

TEST_CASE("moments of a Gaussian mixture combine by the parallel-axis rule") {
    const Density d = Density::from_primitives({Gaussian{{-1.0, 0.0}, 0.3, 2.0}, Gaussian{{1.0, 0.0}, 0.3, 2.0}});
    const Moments m = compute_moments(d);
    CHECK(m.mass == doctest::Approx(4.0));
    CHECK(std::abs(m.center.x) < 1e-15);
    // Each component contributes 2 sigma^2 about its own centre plus unit offset.
    CHECK(m.variance == doctest::Approx(2.0 * 0.09 + 1.0).epsilon(1e-14));
}

TEST_CASE("grid moments converge to the analytic ones") {
    const Density d = Density::from_primitives({Gaussian{{0.3, 0.1}, 0.5, 6.0}});
    const Moments exact = compute_moments(d);
    const GridDensity g = rasterize(d, 5.0, 128, 128);
    const Moments approx = compute_moments(g);
    CHECK(oracle::rel_diff(approx.mass, exact.mass) < 1e-10);
    CHECK(oracle::rel_diff(approx.variance, exact.variance) < 1e-8);
    CHECK(std::abs(approx.center.x - 0.3) < 1e-10);
    CHECK_FALSE(approx.boundary_warning);

    const GridDensity ball = rasterize(Density::from_primitives({UniformBall{{}, 1.0, 1.0}}), 2.0, 256, 256);
    const Moments mb = compute_moments(ball);
    CHECK(oracle::rel_diff(mb.mass, kPi) < 1e-3);
    CHECK(oracle::rel_diff(mb.variance, 0.5) < 2e-3);
}

TEST_CASE("mass near the box edge raises the warning") {
    const GridDensity g = rasterize(Density::from_primitives({Gaussian{{0.0, 0.0}, 1.0, 1.0}}), 2.0, 32, 32);
    const Moments m = compute_moments(g);
    CHECK(m.boundary_warning);
    CHECK(m.boundary_mass_fraction > kBoundaryMassWarning);
}

TEST_CASE("scaling and translation") {
    const Density d = Density::from_primitives({UniformBall{{}, 1.0, 2.0}, Gaussian{{1.0, 1.0}, 0.2, 1.0}});
    const Moments m = compute_moments(d);
    const Moments s = compute_moments(scale(d, 2.5));
    CHECK(s.mass == doctest::Approx(2.5 * m.mass));
    CHECK(s.variance == doctest::Approx(m.variance));
    const Moments t = compute_moments(translate(d, {3.0, -1.0}));
    CHECK(t.center.x == doctest::Approx(m.center.x + 3.0));
    CHECK(t.variance == doctest::Approx(m.variance).epsilon(1e-13));
    CHECK_THROWS_AS(scale(d, 0.0), DomainError);
    const Density grid = Density::from_grid(rasterize(d, 4.0, 16, 16));
    CHECK_THROWS_AS(translate(grid, {1.0, 0.0}), DomainError);
}

TEST_CASE("density validation") {
    GridDensity g{1.0, 2, 2, {0.0, 1.0, -1.0, 0.0}};
    CHECK_THROWS_AS(Density::from_grid(g), DomainError);
    g.values = {0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(Density::from_grid(g), DomainError);
    g.values = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(Density::from_grid(g), DomainError);
    CHECK_THROWS_AS(Density::from_primitives({}), DomainError);
    CHECK_THROWS_AS(Density::from_primitives({UniformBall{{}, -1.0, 1.0}}), DomainError);
}

TEST_CASE("point evaluation") {
    const Density ball = Density::from_primitives({UniformBall{{}, 1.0, 2.0}});
    CHECK(ball.value_at({1.0, 0.0}) == 2.0);
    CHECK(ball.value_at({1.0, 0.01}) == 0.0);
    const Density g = Density::from_grid(GridDensity{1.0, 2, 2, {1.0, 2.0, 3.0, 4.0}});
    CHECK(g.value_at({0.5, -0.5}) == 2.0);
    CHECK(g.value_at({-0.5, 0.5}) == 3.0);
    CHECK(g.value_at({2.0, 0.0}) == 0.0);
}

TEST_CASE("density documents round trip") {
    const std::string text = R"({"analytic": [
        {"type": "ball", "center": [0, 0], "radius": 0.5, "amplitude": 2.0},
        {"type": "gaussian", "center": [1, 0], "std": 0.3, "mass": 4.0}]})";
    const Density d = parse_density_json(text);
    REQUIRE_FALSE(d.is_grid());
    CHECK(d.primitives().size() == 2);
    const Density again = parse_density_json(density_to_json(d));
    CHECK(compute_moments(again).variance == doctest::Approx(compute_moments(d).variance));

    const Density grid = parse_density_json(R"({"grid": {"L": 1.0, "nx": 2, "ny": 2, "values": [0, 1, 1, 0]}})");
    REQUIRE(grid.is_grid());
    CHECK(grid.grid().at(1, 0) == 1.0);
    CHECK(compute_moments(grid).mass == doctest::Approx(2.0));

    CHECK_THROWS_AS(parse_density_json("{"), DomainError);
    CHECK_THROWS_AS(parse_density_json(R"({"analytic": [{"type": "square"}]})"), DomainError);
    CHECK_THROWS_AS(parse_density_json(R"({"grid": {"L": 1.0, "nx": 2, "ny": 2, "values": [1]}})"), DomainError);
}
