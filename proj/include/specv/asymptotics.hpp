#pragma once

#include "specv/model.hpp"

namespace specv {

/// A_t and B_t of the covolatility CLT, plus the noise scale
/// (eta_X^2 eta_Y^2 + eta_XY^2)^{1/4}.
struct VarianceTerms {
    double A = 0.0;
    double B = 0.0;
    double scale = 0.0;

    static VarianceTerms from(double sigma_x, double sigma_y, double rho,
                              const NoiseCovariance& noise);
};

/// Quartic f(z) = c4 z^4 + c2 z^2 + c0 with c4, c0 >= 0; the integrand
/// denominators f1 (general) and f2 (equal-volatility specialization).
struct QuarticCoefficients {
    double c4 = 0.0;
    double c2 = 0.0;
    double c0 = 0.0;

    double operator()(double z) const { return (c4 * z * z + c2) * z * z + c0; }

    /// f1(z) = pi^4 z^4 + pi^2 A z^2 + B/4.
    static QuarticCoefficients f1(double A, double B);
    /// f2(z) = pi^4 z^4 + 2 sigma^2 pi^2 z^2 + (1+rho^2) sigma^4.
    static QuarticCoefficients f2(double rho, double sigma);
};

/// Var(XY) = (1 + rho^2) sigma_x^2 sigma_y^2 for a centred bivariate Gaussian.
double gaussian_product_variance(double sigma_x, double sigma_y, double rho);

/// int_0^infty dz / f2(z), closed form (residue theorem).
double integral_f2_closed(double rho, double sigma);

/// int_0^infty dz / f1(z), closed form; requires A > 0, B > 0. Near A^2 = B
/// the formula switches to a series limit around 1/sqrt(2AB).
double integral_f1_closed(double A, double B);

/// Local asymptotic variance v_t = 1 / int_0^infty f1(z)^{-1} dz.
double local_variance(double sigma_x, double sigma_y, double rho,
                      const NoiseCovariance& noise);

/// (eta_X^2 eta_Y^2 + eta_XY^2)^{1/4} * int_0^1 v_s ds, the CLT variance in
/// the n^{1/4} normalization.
double clt_variance(const SpotPath& path, const NoiseCovariance& noise,
                    int quad_points = 201);

/// int_0^infty dz / f(z) by the substitution z = u/(1-u) and adaptive
/// quadrature; the independent verification oracle for the closed forms.
double quadrature_oracle(const QuarticCoefficients& coeffs, double tol);

/// Minimizer of N c^{-3} + D c + C c^{-1}:
/// c = ((-C + sqrt(C^2 + 12 N D)) / (6 N))^{-1/2}.
double tuning_constant(double N, double D, double C);

}  // namespace specv
