#include "oracles.hpp"

#include "pks/error.hpp"
#include "pks/roots.hpp"
#include "pks/specialfn.hpp"

#include <doctest.h>

#include <cmath>

using namespace pks;

TEST_CASE("g_one equals r K_1(r) from the standard library") {
    for (double r : oracle::logspace(0.01, 20.0, 50)) {
        const double ref = r * std::cyl_bessel_k(1.0, r);
        CHECK(oracle::rel_diff(g_one(r), ref) <= 1e-10);
    }
}

TEST_CASE("g_one against 40-digit reference values") {
    CHECK(oracle::rel_diff(g_one(0.01), 0.99973894118296247643) < 1e-13);
    CHECK(oracle::rel_diff(g_one(0.5), 0.82822056000165044685) < 1e-13);
    CHECK(oracle::rel_diff(g_one(1.0), 0.60190723019723457474) < 1e-13);
    CHECK(oracle::rel_diff(g_one(5.0), 0.020223067227260821042) < 1e-12);
    CHECK(oracle::rel_diff(g_one(20.0), 1.1766115939114076355e-8) < 1e-11);
}

TEST_CASE("g_one bounds and monotonicity") {
    double prev = 1.0;
    for (double r : oracle::logspace(1e-4, 50.0, 200)) {
        const double g = g_one(r);
        CHECK(g <= 1.0);
        CHECK(g >= std::exp(-r));
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("g_one edge cases") {
    CHECK(g_one(0.0) == 1.0);
    const GEval far = g_one_eval(800.0);
    CHECK(far.underflow);
    CHECK(far.value == 0.0);
    CHECK_FALSE(g_one_eval(3.0).underflow);
    CHECK_THROWS_AS(g_one(-1.0), DomainError);
    CHECK_THROWS_AS(g_one(std::nan("")), DomainError);
}

TEST_CASE("g_one follows its large-r expansion") {
    // r K_1(r) ~ sqrt(pi r / 2) e^{-r} (1 + 3/(8r) - 15/(128 r^2) + ...).
    const auto ratio = [](double r) { return g_one(r) / (std::sqrt(kPi * r / 2.0) * std::exp(-r)); };
    for (double r : {30.0, 100.0, 400.0}) {
        const double two_term = 1.0 + 3.0 / (8.0 * r) - 15.0 / (128.0 * r * r);
        CHECK(std::abs(ratio(r) - two_term) < 1.0 / (r * r * r));
    }
    CHECK(ratio(400.0) - 1.0 < ratio(30.0) - 1.0);
}

TEST_CASE("one_minus_g_one keeps relative accuracy near zero") {
    CHECK(oracle::rel_diff(one_minus_g_one(1e-3), 3.7618439144257220466e-6) < 1e-11);
    CHECK(oracle::rel_diff(one_minus_g_one(0.1), 0.014615521912939386515) < 1e-12);
    CHECK(one_minus_g_one(0.0) == 0.0);
}

TEST_CASE("g_alpha is g_one at the rescaled radius") {
    for (double alpha : {0.01, 0.5, 3.0}) {
        for (double r : {0.1, 1.0, 4.0}) {
            CHECK(g_alpha(alpha, r) == doctest::Approx(g_one(std::sqrt(alpha) * r)).epsilon(1e-14));
        }
    }
    const GEval e = g_alpha_eval(2.0, 1.5);
    CHECK(e.alpha == 2.0);
    CHECK(e.r == 1.5);
    CHECK_THROWS_AS(g_alpha(0.0, 1.0), DomainError);
}

TEST_CASE("g_one_inv against reference roots") {
    CHECK(oracle::rel_diff(g_one_inv(0.5), 1.2571513906775704597) < 1e-12);
    CHECK(oracle::rel_diff(g_one_inv(1e-3), 8.2305216351426441905) < 1e-12);
    CHECK(oracle::rel_diff(g_one_inv(1e-8), 20.166639828592221189) < 1e-12);
    CHECK(oracle::rel_diff(g_one_inv(0.999), 0.021146561275118059694) < 1e-10);
    CHECK(g_one_inv(1.0) == 0.0);
}

TEST_CASE("g_one_inv round trip and domain") {
    for (double rho : oracle::logspace(1e-12, 0.99, 40)) {
        CHECK(oracle::rel_diff(g_one(g_one_inv(rho)), rho) < 1e-10);
    }
    CHECK_THROWS_AS(g_one_inv(0.0), DomainError);
    CHECK_THROWS_AS(g_one_inv(1.5), DomainError);
    CHECK_THROWS_AS(g_one_inv(1e-306), OutOfRangeError);
}

TEST_CASE("bessel_kernel equals K_0(sqrt(alpha) |z|) / 2 pi") {
    CHECK(oracle::rel_diff(bessel_kernel(2.0, 0.7), 0.06797920702410157891) < 1e-11);
    for (double alpha : {0.1, 1.0, 10.0}) {
        for (double z : {0.05, 0.5, 2.0, 6.0}) {
            const double ref = std::cyl_bessel_k(0.0, std::sqrt(alpha) * z) / (2.0 * kPi);
            CHECK(oracle::rel_diff(bessel_kernel(alpha, z), ref) < 1e-9);
        }
    }
    CHECK_THROWS_AS(bessel_kernel(1.0, 0.0), DomainError);
}

TEST_CASE("grad_bessel_kernel is the gradient of bessel_kernel and odd in z") {
    const double alpha = 1.3;
    const Vec2 z{0.4, -0.9};
    const double h = 1e-5;
    const auto b = [&](Vec2 p) { return bessel_kernel(alpha, norm(p)); };
    const Vec2 g = grad_bessel_kernel(alpha, z);
    CHECK(std::abs(g.x - (b({z.x + h, z.y}) - b({z.x - h, z.y})) / (2 * h)) < 1e-7);
    CHECK(std::abs(g.y - (b({z.x, z.y + h}) - b({z.x, z.y - h})) / (2 * h)) < 1e-7);
    const Vec2 gm = grad_bessel_kernel(alpha, {-z.x, -z.y});
    CHECK(gm.x == doctest::Approx(-g.x));
    CHECK(gm.y == doctest::Approx(-g.y));
}

TEST_CASE("v_c_inv_bounds brackets the inverse on the decreasing branch") {
    for (double c : {0.5, 1.0, 3.0}) {
        for (double frac : {0.9, 0.3, 1e-2, 1e-5}) {
            const double rho = frac * c / kE;
            const double root = oracle::bisect_root(
                [&](double r) { return c * std::sqrt(r) * std::exp(-r) - rho; }, 0.5, 800.0);
            const Interval iv = v_c_inv_bounds(c, rho);
            CHECK(iv.lower <= root * (1 + 1e-12));
            CHECK(root <= iv.upper * (1 + 1e-12));
        }
    }
    CHECK_THROWS_AS(v_c_inv_bounds(1.0, 1.0), DomainError);
}

TEST_CASE("g_inv_bounds sandwiches g_one_inv for small rho") {
    for (double eps : {0.05, 0.1, 0.5}) {
        for (double rho : {5e-3, 1e-3, 1e-4, 1e-6}) {
            const InverseBounds b = g_inv_bounds(eps, rho);
            const double exact = g_one_inv(rho);
            CHECK(b.lower <= exact);
            CHECK(exact <= b.upper);
        }
    }
    CHECK_THROWS_AS(g_inv_bounds(0.1, 0.02), DomainError);
    CHECK_THROWS_AS(g_inv_bounds(1.5, 1e-4), DomainError);
}

TEST_CASE("g_one_inv_asymptotic becomes accurate as rho decreases") {
    const double e1 = oracle::rel_diff(g_one_inv_asymptotic(1e-4), g_one_inv(1e-4));
    const double e2 = oracle::rel_diff(g_one_inv_asymptotic(1e-12), g_one_inv(1e-12));
    CHECK(e2 < e1);
    CHECK(e2 < 0.01);
}

TEST_CASE("dilog against reference values and identities") {
    CHECK(dilog(0.0) == 0.0);
    CHECK(oracle::rel_diff(dilog(0.3), 0.32612951007547606953) < 1e-15);
    CHECK(oracle::rel_diff(dilog(0.9), 1.2997147230049587252) < 1e-14);
    CHECK(oracle::rel_diff(dilog(0.999), 1.6370226052761177427) < 1e-14);
    const double ln2 = std::log(2.0);
    CHECK(std::abs(dilog(0.5) - (kPi * kPi / 12.0 - ln2 * ln2 / 2.0)) < 1e-15);
    double direct = 0.0;
    for (int n = 1; n < 200; ++n) {
        direct += std::pow(0.2, n) / (static_cast<double>(n) * n);
    }
    CHECK(std::abs(dilog(0.2) - direct) < 1e-16);
    CHECK_THROWS_AS(dilog(1.0), DomainError);
    CHECK_THROWS_AS(dilog(-0.1), DomainError);
}
