#include "oracles.hpp"
#include "orient/circmath.hpp"
#include "orient/error.hpp"

#include <doctest.h>

#include <random>

using namespace orient;

TEST_CASE("canonicalize reduces into [0, 360)") {
    CHECK(canonicalize(360.0).degrees() == 0.0);
    CHECK(canonicalize(-90.0).degrees() == 270.0);
    CHECK(canonicalize(725.0).degrees() == 5.0);
    CHECK(canonicalize(-1e-17).degrees() == 0.0);
    CHECK(canonicalize(0.0).degrees() == 0.0);
}

TEST_CASE("canonicalize rejects non-finite input") {
    CHECK_THROWS_AS(canonicalize(std::nan("")), Error);
    try {
        canonicalize(INFINITY);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_input);
    }
}

TEST_CASE("canonicalize is idempotent and ignores whole turns") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> raw(-5000.0, 5000.0);
    std::uniform_int_distribution<int> turns(-20, 20);
    for (int i = 0; i < 2000; ++i) {
        const double r = raw(rng);
        const Angle a = canonicalize(r);
        CHECK(a.degrees() >= 0.0);
        CHECK(a.degrees() < 360.0);
        CHECK(canonicalize(a.degrees()) == a);
        const Angle shifted = canonicalize(r + 360.0 * turns(rng));
        CHECK(angular_distance(a, shifted) < 1e-9);
    }
}

TEST_CASE("angular_distance examples") {
    CHECK(angular_distance(canonicalize(350), canonicalize(10)) == doctest::Approx(20.0));
    CHECK(angular_distance(canonicalize(0), canonicalize(180)) == 180.0);
    CHECK(angular_distance(canonicalize(45), canonicalize(45)) == 0.0);
}

TEST_CASE("angular_distance is a metric on sampled triples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 360.0);
    for (int i = 0; i < 3000; ++i) {
        const Angle a = canonicalize(u(rng));
        const Angle b = canonicalize(u(rng));
        const Angle c = canonicalize(u(rng));
        CHECK(angular_distance(a, b) == angular_distance(b, a));
        CHECK(angular_distance(a, b) <= 180.0);
        CHECK(angular_distance(a, c) <= angular_distance(a, b) + angular_distance(b, c) + 1e-12);
        CHECK(angular_distance(a, b) == doctest::Approx(oracle::circular_distance(a.degrees(), b.degrees())));
    }
    CHECK(angular_distance(canonicalize(12.5), canonicalize(12.5)) == 0.0);
}

TEST_CASE("to_unit_vector and from_vector") {
    const auto p0 = to_unit_vector(canonicalize(0));
    CHECK(p0.x == 1.0);
    CHECK(p0.y == 0.0);
    const auto p90 = to_unit_vector(canonicalize(90));
    CHECK(p90.x == 0.0);
    CHECK(p90.y == 1.0);
    const auto p45 = to_unit_vector(canonicalize(45));
    CHECK(p45.x == doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(p45.y == doctest::Approx(0.70710678).epsilon(1e-8));

    CHECK(from_vector({0, 1}).degrees() == doctest::Approx(90.0));
    CHECK(from_vector({-1, 0}).degrees() == doctest::Approx(180.0));
    CHECK(from_vector({0.5, 0.5}).degrees() == doctest::Approx(45.0));
}

TEST_CASE("from_vector rejects the origin") {
    try {
        from_vector({1e-7, 0.0});
        FAIL("expected degenerate-vector error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_vector);
    }
}

TEST_CASE("unit vector round trip and scale invariance") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 360.0);
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        const Angle a = canonicalize(u(rng));
        const auto v = to_unit_vector(a);
        CHECK(std::fabs(v.squared_norm() - 1.0) < 1e-12);
        CHECK(angular_distance(from_vector(v), a) < 1e-9);
        const double s = scale(rng);
        CHECK(angular_distance(from_vector({s * v.x, s * v.y}), from_vector(v)) < 1e-9);
    }
}

TEST_CASE("bessel_i0 matches the power series and known values") {
    CHECK(bessel_i0(0.0) == 1.0);
    CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777).epsilon(1e-10));
    CHECK(bessel_i0(2.0) == doctest::Approx(2.2795853023).epsilon(1e-10));
    for (double nu = 0.0; nu <= 20.0; nu += 0.25) {
        CHECK(oracle::relative_error(bessel_i0(nu), oracle::i0_power_series(nu, 120)) < 1e-7);
    }
}

TEST_CASE("bessel_i0 above the series range agrees with std::cyl_bessel_i") {
    for (double nu = 15.0; nu <= 500.0; nu += 2.5) {
        CHECK(oracle::relative_error(bessel_i0(nu), std::cyl_bessel_i(0.0, nu)) < 1e-7);
        CHECK(oracle::relative_error(bessel_i0_scaled(nu), std::cyl_bessel_i(0.0, nu) * std::exp(-nu)) < 1e-7);
    }
}

TEST_CASE("bessel_i0 is monotone and guards its domain") {
    double prev = bessel_i0(0.0);
    for (double nu = 0.01; nu <= 500.0; nu += 0.37) {
        const double cur = bessel_i0(nu);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK_THROWS_AS(bessel_i0(-0.1), Error);
    CHECK_THROWS_AS(bessel_i0(500.5), Error);
    CHECK_THROWS_AS(Concentration(-1.0), Error);
}

TEST_CASE("von_mises_kernel values") {
    CHECK(von_mises_kernel(0.0, Concentration(0.0)) == doctest::Approx(0.15915494309).epsilon(1e-10));
    CHECK(von_mises_kernel(180.0, Concentration(1.0)) == doctest::Approx(0.0462454858).epsilon(1e-8));
    CHECK(von_mises_kernel(0.0, Concentration(1.0)) == doctest::Approx(0.3417104887).epsilon(1e-8));
    for (double nu : {0.0, 0.5, 3.0, 40.0}) {
        for (double t = -400; t < 400; t += 7.3) {
            CHECK(oracle::relative_error(von_mises_kernel(t, Concentration(nu)), oracle::von_mises(t, nu)) < 1e-7);
        }
    }
}

TEST_CASE("von_mises_kernel is symmetric, periodic, peaked at zero and normalized") {
    for (double nu : {0.0, 0.5, 1.0, 5.0, 20.0}) {
        const Concentration c(nu);
        const double peak = von_mises_kernel(0.0, c);
        for (double t = 0.5; t < 360.0; t += 3.1) {
            CHECK(von_mises_kernel(t, c) == doctest::Approx(von_mises_kernel(-t, c)).epsilon(1e-14));
            CHECK(von_mises_kernel(t, c) == doctest::Approx(von_mises_kernel(t + 360.0, c)).epsilon(1e-12));
            CHECK(von_mises_kernel(t, c) <= peak);
        }
        // composite Simpson over one period, in radians
        const int n = 20000;
        const double h = 360.0 / n;
        double sum = von_mises_kernel(0.0, c) + von_mises_kernel(360.0, c);
        for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * von_mises_kernel(i * h, c);
        const double integral = sum * h / 3.0 * kDegToRad;
        CHECK(std::fabs(integral - 1.0) < 1e-6);
    }
}

TEST_CASE("sincos_degrees is exact on quadrant boundaries") {
    for (int q = -8; q <= 8; ++q) {
        const auto sc = sincos_degrees(90.0 * q);
        CHECK((sc.sin == 0.0 || std::fabs(sc.sin) == 1.0));
        CHECK((sc.cos == 0.0 || std::fabs(sc.cos) == 1.0));
    }
    for (double d = -720.0; d < 720.0; d += 0.77) {
        CHECK(sincos_degrees(d).sin == doctest::Approx(std::sin(d * kDegToRad)).epsilon(1e-12));
        CHECK(sincos_degrees(d).cos == doctest::Approx(std::cos(d * kDegToRad)).epsilon(1e-12));
    }
}
