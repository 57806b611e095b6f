#include <doctest.h>

#include <cmath>

#include "specv/asymptotics.hpp"

using namespace specv;

TEST_SUITE("asymptotics") {

TEST_CASE("gaussian product variance") {
    CHECK(gaussian_product_variance(1.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gaussian_product_variance(1.0, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(gaussian_product_variance(2.0, 3.0, 0.5) == doctest::Approx(45.0).epsilon(1e-15));
}

TEST_CASE("equal-volatility integral closed form") {
    CHECK(integral_f2_closed(0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(integral_f2_closed(0.0, 2.0) == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
    CHECK(integral_f2_closed(0.5, 1.0) ==
          doctest::Approx(0.21728689675164018).epsilon(1e-13));
    // Depends on rho only through rho^2.
    for (double rho : {0.3, 0.7, 0.95})
        CHECK(integral_f2_closed(rho, 1.2) ==
              doctest::Approx(integral_f2_closed(-rho, 1.2)).epsilon(1e-12));
}

TEST_CASE("general integral closed form and quadrature oracle") {
    CHECK(integral_f1_closed(2.0, 4.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(integral_f1_closed(2.0, 0.0), DegenerateInput);

    // Branch switch neighborhood |A^2 - B| in {1e-6, 1e-3}, both signs.
    for (double delta : {-1e-3, -1e-6, 1e-6, 1e-3}) {
        const double B = 4.0;
        const double A = std::sqrt(B + delta);
        const double closed = integral_f1_closed(A, B);
        const double quad = quadrature_oracle(QuarticCoefficients::f1(A, B), 1e-12);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
        CHECK(closed > 0.0);
    }

    // Wide grid against quadrature.
    for (double A : {0.1, 0.5, 1.0, 3.0, 10.0})
        for (double B : {0.1, 1.0, 4.0, 10.0}) {
            const double closed = integral_f1_closed(A, B);
            const double quad = quadrature_oracle(QuarticCoefficients::f1(A, B), 1e-13);
            CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
        }
}

TEST_CASE("specialization consistency: f1 reproduces f2 at equal volatilities") {
    // f1 with A = 2 sigma^2, B = 4 sigma^4 (1 + rho^2) coincides with f2 at
    // sigma_x = sigma_y = sigma, eta_x = eta_y = 1, eta_xy = 0.
    for (double rho : {0.0, 0.5, -0.5, 0.9, -0.9})
        CHECK(integral_f1_closed(2.0, 4.0 * (1.0 + rho * rho)) ==
              doctest::Approx(integral_f2_closed(rho, 1.0)).epsilon(1e-10));
}

TEST_CASE("quadrature oracle on a known quartic") {
    const double pi4 = std::pow(M_PI, 4);
    CHECK(quadrature_oracle(QuarticCoefficients{pi4, 0.0, 1.0}, 1e-12) ==
          doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-10));
    CHECK(quadrature_oracle(QuarticCoefficients::f2(0.0, 1.0), 1e-12) ==
          doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("local variance and reciprocity") {
    const NoiseCovariance unit{1.0, 1.0, 0.0};
    // A = 2, B = 4: the degenerate-branch limit sqrt(2AB) = 4.
    CHECK(local_variance(1.0, 1.0, 0.0, unit) == doctest::Approx(4.0).epsilon(1e-10));
    // A = 2, B = 5 (rho = 1/2), frozen from the quadrature of f2.
    CHECK(local_variance(1.0, 1.0, 0.5, unit) ==
          doctest::Approx(4.60221032629963018).epsilon(1e-12));

    for (double sx : {0.5, 1.0, 2.0})
        for (double rho : {-0.8, -0.3, 0.0, 0.3, 0.8}) {
            const NoiseCovariance H{0.01, 0.02, 0.005};
            const auto terms = VarianceTerms::from(sx, 1.3, rho, H);
            const double v = local_variance(sx, 1.3, rho, H);
            CHECK(v * integral_f1_closed(terms.A, terms.B) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
}

TEST_CASE("variance terms require a nonzero noise scale") {
    CHECK_THROWS_AS(VarianceTerms::from(1.0, 1.0, 0.5, NoiseCovariance{}), DegenerateInput);
    const auto t = VarianceTerms::from(1.0, 1.0, 0.5, NoiseCovariance{1.0, 1.0, 0.0});
    CHECK(t.A == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(t.B == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(t.scale == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("clt variance: constant design and eta proportionality") {
    SpotPath flat{[](double) { return 1.0; }, [](double) { return 1.0; },
                  [](double) { return 0.0; }, "flat"};
    CHECK(clt_variance(flat, NoiseCovariance{1.0, 1.0, 0.0}) ==
          doctest::Approx(4.0).epsilon(1e-8));

    // Doubling eta doubles every value (eta_x = eta_y = eta, eta_xy = 0).
    for (double rho : {-0.5, 0.0, 0.5}) {
        SpotPath p{[](double) { return 2.0; }, [](double) { return 1.0; },
                   [rho](double) { return rho; }, "flat"};
        const double v1 = clt_variance(p, NoiseCovariance{1.0, 1.0, 0.0});
        const double v2 = clt_variance(p, NoiseCovariance{4.0, 4.0, 0.0});
        CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(1e-6));
    }

    // Parametric study design: theoretical value about 0.46.
    const double v = clt_variance(parametric_design(), NoiseCovariance{0.01, 0.01, 0.0});
    CHECK(std::abs(v - 0.46) < 0.01);
}

TEST_CASE("tuning constant") {
    CHECK(tuning_constant(3.0, 1.0, 0.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(tuning_constant(1.0, 1.0, 0.0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-12));
    CHECK_THROWS_AS(tuning_constant(0.0, 1.0, 0.0), NonPositiveInputs);

    for (double C : {0.0, 0.5, 2.0}) {
        const double N = 1.3, D = 0.7;
        const double c = tuning_constant(N, D, C);
        // First-order condition D c^4 - C c^2 - 3 N = 0.
        CHECK(D * std::pow(c, 4) - C * c * c - 3.0 * N ==
              doctest::Approx(0.0).epsilon(1e-10));
        const auto obj = [&](double u) { return N / (u * u * u) + D * u + C / u; };
        CHECK(obj(c) <= obj(0.9 * c));
        CHECK(obj(c) <= obj(1.1 * c));
    }
}

}  // TEST_SUITE
