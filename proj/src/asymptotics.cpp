#include "specv/asymptotics.hpp"

#include <cmath>

#include "specv/quadrature.hpp"

namespace specv {

VarianceTerms VarianceTerms::from(double sigma_x, double sigma_y, double rho,
                                  const NoiseCovariance& noise) {
    VarianceTerms v;
    const double q = noise.eta_x_sq * noise.eta_y_sq + noise.eta_xy * noise.eta_xy;
    v.scale = std::pow(q, 0.25);
    if (q <= 0.0) throw DegenerateInput("VarianceTerms: H = 0 has no CLT normalization");
    v.A = (noise.eta_y_sq * sigma_x * sigma_x + noise.eta_x_sq * sigma_y * sigma_y +
           2.0 * rho * sigma_x * sigma_y * noise.eta_xy) /
          std::sqrt(q);
    v.B = 4.0 * (sigma_x * sigma_y) * (sigma_x * sigma_y) * (1.0 + rho * rho);
    return v;
}

QuarticCoefficients QuarticCoefficients::f1(double A, double B) {
    const double pi2 = M_PI * M_PI;
    return {pi2 * pi2, pi2 * A, 0.25 * B};
}

QuarticCoefficients QuarticCoefficients::f2(double rho, double sigma) {
    const double pi2 = M_PI * M_PI;
    const double s2 = sigma * sigma;
    return {pi2 * pi2, 2.0 * s2 * pi2, (1.0 + rho * rho) * s2 * s2};
}

double gaussian_product_variance(double sigma_x, double sigma_y, double rho) {
    if (std::abs(rho) > 1.0) throw DegenerateInput("gaussian_product_variance: |rho| > 1");
    return (1.0 + rho * rho) * sigma_x * sigma_x * sigma_y * sigma_y;
}

double integral_f2_closed(double rho, double sigma) {
    if (!(sigma > 0.0)) throw DegenerateInput("integral_f2_closed: sigma > 0 required");
    if (rho == 0.0) return 1.0 / (4.0 * sigma * sigma * sigma);
    const double arg = std::atan2(1.0, -rho);  // Arg(i - rho)
    return std::sin(0.5 * (arg - 0.5 * M_PI)) /
           (2.0 * sigma * sigma * sigma * rho * std::pow(1.0 + rho * rho, 0.25));
}

double integral_f1_closed(double A, double B) {
    if (!(B > 0.0)) throw DegenerateInput("integral_f1_closed: B > 0 required");
    if (!(A > 0.0)) throw DegenerateInput("integral_f1_closed: A > 0 required");
    const double D = A * A - B;
    // Near the branch switch the closed form is 0/0; use the series limit.
    if (std::abs(D) < 1e-7 * std::max(A * A, B))
        return (1.0 + D / (8.0 * A * A)) / std::sqrt(2.0 * A * B);
    if (D > 0.0) {
        const double s = std::sqrt(D);
        return (std::sqrt(A + s) - std::sqrt(A - s)) / (std::sqrt(2.0 * D) * std::sqrt(B));
    }
    // Complex-conjugate root pair: upper-half-plane root convention reduces to
    // sqrt(2) sin(theta/2) / (sqrt(B - A^2) B^{1/4}) with theta = Arg(A + i sqrt(B - A^2)).
    const double theta = std::atan2(std::sqrt(-D), A);
    return std::sqrt(2.0) * std::sin(0.5 * theta) / (std::sqrt(-D) * std::pow(B, 0.25));
}

double local_variance(double sigma_x, double sigma_y, double rho,
                      const NoiseCovariance& noise) {
    if (noise.is_zero()) throw DegenerateInput("local_variance: H = 0 not admissible");
    const auto terms = VarianceTerms::from(sigma_x, sigma_y, rho, noise);
    if (!(terms.B > 0.0)) throw DegenerateInput("local_variance: B = 0 (zero volatility)");
    return 1.0 / integral_f1_closed(terms.A, terms.B);
}

double clt_variance(const SpotPath& path, const NoiseCovariance& noise, int quad_points) {
    if (noise.is_zero()) throw DegenerateInput("clt_variance: H = 0 not admissible");
    (void)quad_points;
    const double q = noise.eta_x_sq * noise.eta_y_sq + noise.eta_xy * noise.eta_xy;
    auto v = [&](double t) {
        return local_variance(path.sigma_x(t), path.sigma_y(t), path.rho(t), noise);
    };
    return std::pow(q, 0.25) * adaptive_simpson(v, 0.0, 1.0, 1e-10);
}

double quadrature_oracle(const QuarticCoefficients& f, double tol) {
    if (!(f.c4 > 0.0) || !(f.c0 > 0.0))
        throw DegenerateInput("quadrature_oracle: positive leading/constant coefficients required");
    auto g = [&f](double u) {
        if (u >= 1.0) return 0.0;
        const double z = u / (1.0 - u);
        const double w = 1.0 - u;
        return 1.0 / (f(z) * w * w);
    };
    return adaptive_simpson(g, 0.0, 1.0, tol);
}

double tuning_constant(double N, double D, double C) {
    if (!(N > 0.0) || !(D > 0.0)) throw NonPositiveInputs("tuning_constant: N > 0 and D > 0 required");
    const double inv_c_sq = (-C + std::sqrt(C * C + 12.0 * N * D)) / (6.0 * N);
    return 1.0 / std::sqrt(inv_c_sq);
}

}  // namespace specv
