#pragma once

#include <vector>

#include "specv/model.hpp"
#include "specv/simulate.hpp"

namespace specv {

/// Blockwise statistics x~_{jk}, y~_{jk} with block geometry and the
/// (block-independent) empirical norms ||Phi_{jk}||_n^2.
struct SpectralCoefficients {
    BlockGeometry geometry;
    std::vector<double> xt;        // [h_inv x J], row-major by block
    std::vector<double> yt;        // same shape
    std::vector<double> norms_sq;  // [J]

    double x(int k, int j) const { return xt[static_cast<size_t>(k) * geometry.J + (j - 1)]; }
    double y(int k, int j) const { return yt[static_cast<size_t>(k) * geometry.J + (j - 1)]; }
};

/// Cosine basis function on block k: sqrt(2/h) cos(j pi h^{-1} (t - kh)) on
/// [kh, (k+1)h], zero elsewhere.
double phi(int j, int k, int h_inv, double t);

/// Renormalized sine antiderivative: (sqrt(2h) n sin(j pi/(2nh)))^{-1}
/// sin(j pi h^{-1} (t - kh)) on [kh, (k+1)h], zero elsewhere.
double phi_antiderivative(int j, int k, int h_inv, long n, double t);

/// (4 n^2 sin^2(j pi / (2nh)))^{-1}. Block independent.
/// Note: at j = nh the grid evaluations of Phi_{jk} vanish identically, so
/// the corresponding coefficients are exactly zero regardless of this value.
double empirical_norm_sq(int j, long n, int h_inv);

/// Coefficients of all blocks for frequencies 1..J. Uses a discrete sine
/// transform (FFTW DST-I) per block when J is large, direct sums otherwise;
/// both routes agree to 1e-12 (see compute_coefficients_direct).
SpectralCoefficients compute_coefficients(const ObservationSet& obs, const BlockGeometry& geometry);

/// Reference O(nh * J) evaluation by direct summation.
SpectralCoefficients compute_coefficients_direct(const ObservationSet& obs,
                                                 const BlockGeometry& geometry);

/// |sum_l dY_l Phi_jk(l/n) + (1/n) sum_{l=0}^{n-1} Y_{l/n} phi_jk((l+1/2)/n)|:
/// the summation-by-parts identity, exact up to rounding. A correctness
/// probe, not used in estimation.
double sbp_residual(const ObservationSet& obs, const BlockGeometry& geometry, int j, int k);

/// Empirical scalar products used by the discrete analysis.
/// on_grid:  (1/n) sum_{l=1}^n f(l/n) g(l/n)
/// midpoint: (1/n) sum_{l=1}^n f((l-1/2)/n) g((l-1/2)/n)
double scalar_product_grid(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, long n);
double scalar_product_midpoint(const std::function<double(double)>& f,
                               const std::function<double(double)>& g, long n);

}  // namespace specv
