#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "tcurve/hermite.hpp"
#include "tcurve/quadrature.hpp"

using namespace tcurve;

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}
}  // namespace

TEST_CASE("eval_psi_weighted identity cases") {
    HermiteContext ctx(1.0, 10);
    CHECK(eval_psi_weighted(ctx, 0, 0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
    CHECK(eval_psi_weighted(ctx, 1, 0.0) == 0.0);
}

TEST_CASE("eval_psi_weighted matches the explicit polynomial expansion") {
    HermiteContext ctx(1.0, 10);
    // He_5(2.3) phi(2.3) / sqrt(5!)
    const double direct =
        oracles::hermite_he_direct(5, 2.3) / std::sqrt(factorial(5)) * gaussian_pdf(2.3, 1.0);
    CHECK(eval_psi_weighted(ctx, 5, 2.3) == doctest::Approx(direct).epsilon(1e-13));

    for (int j = 0; j <= 10; ++j)
        for (double t : {-3.7, -0.9, 0.4, 1.96, 5.5}) {
            const double expect =
                oracles::hermite_he_direct(j, t) / std::sqrt(factorial(j)) * gaussian_pdf(t, 1.0);
            CHECK(eval_psi_weighted(ctx, j, t) == doctest::Approx(expect).epsilon(1e-11));
        }
}

TEST_CASE("eval_chi_weighted values and bound") {
    HermiteContext ctx(1.0, 10);
    CHECK(eval_chi_weighted(ctx, 0, 0.0) == doctest::Approx(gaussian_pdf(0.0, 2.0)).epsilon(1e-12));
    // He_2(0) = -1, scaled by 1/sqrt(2)
    CHECK(eval_chi_weighted(ctx, 2, 0.0) ==
          doctest::Approx(-gaussian_pdf(0.0, 2.0) / std::numbers::sqrt2).epsilon(1e-12));

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> h_dist(-40.0, 40.0);
    std::uniform_int_distribution<int> j_dist(0, 10);
    for (int trial = 0; trial < 2000; ++trial)
        CHECK(std::abs(eval_chi_weighted(ctx, j_dist(gen), h_dist(gen))) <= kInvSqrt2Pi + 1e-12);
}

TEST_CASE("argument errors") {
    HermiteContext ctx(1.0, 5);
    CHECK_THROWS_AS(eval_psi_weighted(ctx, -1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_psi_weighted(ctx, 6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_chi_weighted(ctx, 6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(HermiteContext(0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(HermiteContext(1.0, 0), std::invalid_argument);
}

TEST_CASE("eta values") {
    HermiteContext ctx(1.0, 30);
    CHECK(eta(ctx, 0) == 1.0);
    CHECK(eta(ctx, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eta(ctx, 30) == doctest::Approx(std::pow(2.0, -15.0)).epsilon(1e-13));
    // strictly decreasing
    for (int j = 1; j <= 30; ++j) CHECK(eta(ctx, j) < eta(ctx, j - 1));
}

TEST_CASE("uniform bound holds up to j=60, |t|<=40") {
    HermiteContext ctx(1.0, 60);
    std::vector<double> values(61);
    double worst = 0.0;
    for (double t = -40.0; t <= 40.0; t += 0.02) {
        psi_weighted_all(ctx, t, values);
        for (double v : values) {
            CHECK(std::isfinite(v));
            worst = std::max(worst, std::abs(v));
        }
    }
    CHECK(worst <= kInvSqrt2Pi + 1e-12);
}

TEST_CASE("psi orthonormal under the Y-weight (spot pairs vs independent quadrature)") {
    HermiteContext ctx(1.0, 30);
    auto inner = [&](int j, int k) {
        return oracles::integrate(
            [&](double t) {
                return eval_psi_weighted(ctx, j, t) * eval_psi_weighted(ctx, k, t) /
                       gaussian_pdf(t, 1.0);
            },
            -37.0, 37.0, 1e-13);
    };
    CHECK(inner(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(inner(7, 7) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(inner(30, 30) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(inner(0, 2)) < 1e-10);
    CHECK(std::abs(inner(13, 29)) < 1e-10);
}

TEST_CASE("chi orthonormal under the source-side weight") {
    HermiteContext ctx(1.0, 30);
    // full j,k <= 30 sweep; chi_30^2 phi_2 lives inside |h| < ~13
    double worst = 0.0;
    for (int j = 0; j <= 30; ++j)
        for (int k = j; k <= 30; ++k) {
            const double value = integrate(
                [&](double h) {
                    return eval_chi_weighted(ctx, j, h) * eval_chi_weighted(ctx, k, h) /
                           gaussian_pdf(h, 2.0);
                },
                -30.0, 30.0, 512);
            worst = std::max(worst, std::abs(value - (j == k ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("truncated singular expansion reconstructs the Gaussian convolution") {
    // pi = standard normal; the convolution is N(0, 2). Moments from the
    // independent quadrature oracle, reconstruction through the library.
    const int J = 40;
    HermiteContext ctx(1.0, J);
    std::vector<double> moments(J + 1);
    for (int j = 0; j <= J; ++j)
        moments[j] = oracles::integrate(
            [&](double h) { return eval_chi_weighted(ctx, j, h) * gaussian_pdf(h, 1.0); }, -40.0,
            40.0, 1e-14);
    double worst = 0.0;
    std::vector<double> psis(J + 1);
    for (double t = -6.0; t <= 6.0; t += 0.04) {
        psi_weighted_all(ctx, t, psis);
        const double phi = gaussian_pdf(t, 1.0);
        double sum = 0.0;
        for (int j = 0; j <= J; ++j) sum += eta(ctx, j) * moments[j] * (psis[j] / phi);
        worst = std::max(worst, std::abs(sum - gaussian_pdf(t, 2.0)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("y_norm_gaussian_diff closed form") {
    SUBCASE("identical means give zero") {
        CHECK(y_norm_gaussian_diff(1.3, 1.3, 1.0) == 0.0);
        CHECK(y_norm_gaussian_diff(-4.0, -4.0, 0.7) == 0.0);
    }
    SUBCASE("grid-spacing term") {
        const double delta = 13.0 / 2999.0;
        CHECK(y_norm_gaussian_diff(1.0, 1.0 - delta / 2.0, 1.0) ==
              doctest::Approx(0.000371).epsilon(1e-5 / 0.000371));
    }
    SUBCASE("single-Gaussian tail term") {
        const double expect = std::sqrt(gaussian_pdf(0.0, 2.0) * gaussian_pdf(6.5, 1.5));
        const double got = y_norm_gaussian_diff(6.5, std::numeric_limits<double>::infinity(), 1.0);
        CHECK(got == doctest::Approx(expect).epsilon(1e-13));
        CHECK(got == doctest::Approx(0.000265).epsilon(0.01));
    }
}

TEST_CASE("y_norm_gaussian_diff agrees with quadrature on random pairs") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> mu(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double m1 = mu(gen), m2 = mu(gen);
        const double closed = y_norm_gaussian_diff(m1, m2, 1.0);
        const double quad = std::sqrt(std::max(0.0, oracles::integrate(
            [&](double t) {
                const double d = gaussian_pdf(t - m1, 1.0) - gaussian_pdf(t - m2, 1.0);
                return gaussian_pdf(t, 1.0) * d * d;
            },
            -40.0, 40.0, 1e-15)));
        if (closed > 1e-8)
            CHECK(quad == doctest::Approx(closed).epsilon(1e-10));
        else
            CHECK(std::abs(quad - closed) < 1e-12);
    }
}
