#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "specv/errors.hpp"

namespace specv {

using ScalarPath = std::function<double(double)>;

/// Deterministic spot volatility/correlation paths on [0,1].
/// The implied spot covariance matrix is
///   Sigma_t = [ sx^2, rho*sx*sy ; rho*sx*sy, sy^2 ].
struct SpotPath {
    ScalarPath sigma_x;
    ScalarPath sigma_y;
    ScalarPath rho;
    std::string holder_note;

    /// Entries of Sigma_t as {sxx, sxy, syy}.
    std::array<double, 3> covariance(double t) const;

    /// Smaller eigenvalue of Sigma_t.
    double min_eigenvalue(double t) const;

    /// Checks sigma > 0 and |rho| <= 1 on a uniform grid; throws on violation.
    void validate_on_grid(int grid_points = 1000) const;
};

/// Builds a SpotPath from tabulated values with linear interpolation.
/// Grids are uniform on [0,1] with values.size() points (>= 2).
SpotPath tabulated_path(std::vector<double> sigma_x, std::vector<double> sigma_y,
                        std::vector<double> rho, std::string holder_note = "tabulated");

/// Noise covariance matrix H = [eta_x_sq, eta_xy; eta_xy, eta_y_sq].
struct NoiseCovariance {
    double eta_x_sq = 0.0;
    double eta_y_sq = 0.0;
    double eta_xy = 0.0;

    bool is_psd(double tol = 0.0) const;
    void require_psd() const;  // throws NotPSD
    bool is_zero() const { return eta_x_sq == 0.0 && eta_y_sq == 0.0 && eta_xy == 0.0; }
    double min_eigenvalue() const;
};

enum class SchemeKind { Equidistant, Quantile };

/// Deterministic observation-time design t_i = F^{-1}(i/n).
/// For quantile schemes the user supplies F^{-1} and F' explicitly.
struct SamplingScheme {
    SchemeKind kind = SchemeKind::Equidistant;
    ScalarPath f_inverse;  // F^{-1}: [0,1] -> [0,1], used only for Quantile
    ScalarPath f_prime;    // design density F' > 0

    static SamplingScheme equidistant();
    static SamplingScheme quantile(ScalarPath f_inverse, ScalarPath f_prime);

    double time_of(int i, int n) const;
    /// Throws NonMonotoneScheme if f_inverse is not strictly increasing on
    /// the i/n evaluation grid.
    void require_monotone(int n) const;
};

/// Block geometry: n observations (n+1 points), blocks of length h = 1/h_inv
/// with nh samples each, spectral cutoff J, coarse blocks of length r =
/// r_over_h * h, pilot smoothing window K.
struct BlockGeometry {
    long n = 0;
    int h_inv = 1;       // 1/h
    long nh = 0;         // n * h
    int J = 0;           // spectral cutoff, 1 <= J <= nh
    int r_over_h = 1;    // r / h
    int K = 1;

    BlockGeometry() = default;
    /// J = 0 selects the default cutoff J = nh.
    BlockGeometry(long n, int h_inv, int J = 0, int r_over_h = 3, int K = 5);

    double h() const { return 1.0 / h_inv; }
    double r() const { return static_cast<double>(r_over_h) / h_inv; }
    int n_blocks() const { return h_inv; }
    int n_coarse() const;  // number of coarse blocks r^{-1} (rounded up)

    void validate() const;  // throws BadGeometry

    /// h_inv chosen as the divisor of n nearest to round(sqrt(n)/log(n)).
    static int default_h_inv(long n);
};

/// Returns the time-changed path with Sigma^F_s = Sigma_{F^{-1}(s)} (F^{-1})'(s),
/// i.e. sigma^F(s) = sigma(F^{-1}(s)) * sqrt((F^{-1})'(s)) and unchanged rho.
SpotPath quantile_transform(const SpotPath& path, const SamplingScheme& scheme);

/// Ground-truth integral of rho_t sigma^X_t sigma^Y_t over [0,1] by adaptive
/// Simpson quadrature (absolute tolerance 1e-12).
double true_integrated_covolatility(const SpotPath& path, int quad_points = 3);

/// Ground-truth integral of (sigma^X_t)^2 (or Y) over [0,1].
double true_integrated_volatility(const SpotPath& path, bool x_side);

/// The two simulation designs of the study.
SpotPath parametric_design();   // sigma^X = sigma^Y = 1, rho = 1/2
SpotPath timevarying_design();  // slowly varying sigmas and rho

}  // namespace specv
