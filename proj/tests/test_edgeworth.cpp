#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "tcurve/edgeworth.hpp"
#include "tcurve/hermite.hpp"
#include "tcurve/stats.hpp"

using namespace tcurve;

TEST_CASE("edgeworth_correction roots and direct value") {
    EdgeworthSpec spec{1.0, 100};
    CHECK(edgeworth_correction(spec, 0.0) == 0.0);
    CHECK(edgeworth_correction(spec, std::sqrt(3.0)) == doctest::Approx(0.0).epsilon(1e-15));
    // phi(3) * 18 / 60
    CHECK(edgeworth_correction(spec, 3.0) == doctest::Approx(0.0013295).epsilon(1e-4));
    CHECK(edgeworth_correction(spec, 3.0) ==
          doctest::Approx(gaussian_pdf(3.0, 1.0) * 18.0 / 60.0).epsilon(1e-14));
    CHECK_THROWS_AS(edgeworth_correction(EdgeworthSpec{1.0, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("edgeworth_correction integrates to zero") {
    EdgeworthSpec spec{0.8, 50};
    const double mass = oracles::integrate(
        [&](double z) { return edgeworth_correction(spec, z); }, -40.0, 40.0, 1e-13);
    CHECK(std::abs(mass) < 1e-10);
}

TEST_CASE("delta_upper_bound") {
    CHECK(delta_upper_bound(EdgeworthSpec{0.0, 100}, 1.0) == 0.0);
    // || (z^3-3z) phi ||_Y = sqrt(14/9 / (2 pi sqrt(3)))
    const double norm = std::sqrt(14.0 / 9.0 / (2.0 * M_PI * std::sqrt(3.0)));
    CHECK_THROWS_AS(delta_upper_bound(EdgeworthSpec{1.0, 1}, 1.0), std::invalid_argument);
    // the production rule is the fixed wide-interval Gauss-Legendre grid;
    // ~1e-6 relative on this narrow integrand
    CHECK(delta_upper_bound(EdgeworthSpec{1.0, 400}, 1.0) ==
          doctest::Approx(norm / 120.0).epsilon(1e-5));
    CHECK(delta_upper_bound(EdgeworthSpec{1.0, 400}, 1.0) ==
          doctest::Approx(0.0031507).epsilon(1e-4));
    // independent quadrature oracle for the Y-norm factor vs closed form
    const double quad = std::sqrt(oracles::integrate(
        [](double z) {
            const double g = (z * z * z - 3.0 * z) * gaussian_pdf(z, 1.0);
            return g * g * gaussian_pdf(z, 1.0);
        },
        -40.0, 40.0, 1e-15));
    CHECK(quad == doctest::Approx(norm).epsilon(1e-10));
}

TEST_CASE("size_distortion closed form") {
    EdgeworthSpec spec{1.0, 36};  // factor 1/36
    SUBCASE("cutoff 1.96 tail factor") {
        CHECK(size_distortion(spec, 1.96) * 36.0 ==
              doctest::Approx(0.16607).epsilon(1e-4));
    }
    SUBCASE("cutoff 1 is a root of z^2-1") {
        CHECK(size_distortion(spec, 1.0) == doctest::Approx(0.0).epsilon(1e-16));
    }
    SUBCASE("zero skew") { CHECK(size_distortion(EdgeworthSpec{0.0, 36}, 1.7) == 0.0); }
    SUBCASE("equals the quadrature of the correction over the tail") {
        for (double cutoff : {0.5, 1.96, 3.0}) {
            const double quad = oracles::integrate(
                [&](double z) { return edgeworth_correction(spec, z); }, cutoff, 42.0, 1e-14);
            CHECK(size_distortion(spec, cutoff) == doctest::Approx(quad).epsilon(1e-10));
        }
    }
}

TEST_CASE("bsd constants") {
    CHECK(bsd_constant() == 1.7506);
    // reporting arithmetic on reference breakdown values
    CHECK(1.7506 * 0.0030 == doctest::Approx(0.00525).epsilon(1e-3));
    // the audited ratio under the Y-norm reading is a different pure number;
    // keep it pinned so any change is visible
    CHECK(bsd_constant_audit() == doctest::Approx(0.4392).epsilon(1e-3));
}

TEST_CASE("delta_student_t") {
    SUBCASE("near-normal for huge nu") { CHECK(delta_student_t(1000000, 1.0) < 1e-6); }
    SUBCASE("nu = 50 sits in the reference band") {
        CHECK(delta_student_t(50, 1.0) == doctest::Approx(0.0022).epsilon(0.0005 / 0.0022));
    }
    SUBCASE("heavier tails increase the distance") {
        CHECK(delta_student_t(5, 1.0) > delta_student_t(50, 1.0));
    }
    SUBCASE("nonincreasing in nu") {
        double previous = 1e9;
        for (int nu : {5, 10, 50, 200}) {
            const double value = delta_student_t(nu, 1.0);
            CHECK(value <= previous);
            previous = value;
        }
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(delta_student_t(2, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(delta_student_t(50, 0.0), std::invalid_argument);
    }
}

TEST_CASE("student t distribution helpers") {
    SUBCASE("density normalizes") {
        for (int nu : {3, 5, 50}) {
            const double mass = oracles::integrate(
                [nu](double x) { return student_t_pdf(nu, x); }, -300.0, 300.0, 1e-11);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    SUBCASE("cdf/quantile round-trip") {
        for (int nu : {3, 8, 50})
            for (double p : {0.01, 0.2, 0.5, 0.9, 0.975}) {
                const double x = student_t_quantile(nu, p);
                CHECK(student_t_cdf(nu, x) == doctest::Approx(p).epsilon(1e-10));
            }
    }
    SUBCASE("t(5) 97.5% point matches the tabulated 2.5706") {
        CHECK(student_t_quantile(5, 0.975) == doctest::Approx(2.5706).epsilon(1e-4));
    }
    SUBCASE("normal quantile round-trip") {
        for (double p : {1e-8, 0.025, 0.5, 0.8, 1 - 1e-8})
            CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}
