#pragma once

#include <string>
#include <vector>

#include "specv/model.hpp"
#include "specv/spectral.hpp"

namespace specv {

/// Per-block, per-frequency weights w_jk (each row sums to 1) together with
/// the precision terms I_jk they are proportional to.
struct WeightTable {
    BlockGeometry geometry;
    std::vector<double> w;          // [h_inv x J], row-major by block
    std::vector<double> precision;  // same shape, I_jk

    double weight(int k, int j) const { return w[static_cast<size_t>(k) * geometry.J + (j - 1)]; }
    double prec(int k, int j) const {
        return precision[static_cast<size_t>(k) * geometry.J + (j - 1)];
    }
    void validate() const;  // nonnegativity and row normalization
};

/// Pilot spot (co)volatility on the coarse grid l*r, clamped to valid
/// covariance matrices.
struct SpotEstimate {
    std::vector<double> grid;  // coarse times l*r
    std::vector<double> sigma_x_sq_hat;
    std::vector<double> sigma_y_sq_hat;
    std::vector<double> covol_hat;
    int K = 0;
    long clamp_report = 0;  // number of cells where clamping changed the matrix
};

enum class NoiseSource { Known, Estimated };
enum class NoiseVariant { HalfQuadratic, LagOne };

/// How an estimator obtains the noise covariance H.
struct NoiseSpec {
    NoiseSource source = NoiseSource::Known;
    NoiseCovariance known;
    NoiseVariant variant = NoiseVariant::LagOne;

    static NoiseSpec known_h(const NoiseCovariance& h) { return {NoiseSource::Known, h, NoiseVariant::LagOne}; }
    static NoiseSpec estimated(NoiseVariant v = NoiseVariant::LagOne) { return {NoiseSource::Estimated, {}, v}; }
};

struct TuningRecord {
    long n = 0;
    int h_inv = 0;
    int J = 0;
    int r_over_h = 0;
    int K = 0;
    Seed seed;
    NoiseSource noise_source = NoiseSource::Known;
};

/// Point estimate with plug-in asymptotic variance in the sqrt(n)-scaled
/// normalization: Var(value) is approximately plugin_avar / sqrt(n), and
/// ci95 = value -+ 1.96 sqrt(plugin_avar / sqrt(n)) for spectral modes.
struct EstimateReport {
    double value = 0.0;
    double plugin_avar = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::string mode;  // oracle | adaptive | j1 | spev_x | spev_y | uniform | realized | msrc
    TuningRecord tuning;
    long clamp_report = 0;  // pilot corrections, adaptive modes only
};

/// Fills ci_lo/ci_hi from value, plugin_avar and n.
void attach_ci(EstimateReport& rep);

/// Quadratic-variation (half_quadratic) or lag-one autocovariance (lag_one)
/// estimates of the noise covariance, clamped to the PSD cone.
NoiseCovariance estimate_noise_covariance(const ObservationSet& obs, NoiseVariant variant);

/// Variance-optimal frequency weights for spot covariance (sigma_x, sigma_y,
/// rho) and noise H:
///   I_j^{-1} = |Phi_j|^{-4} (eta_x^2 eta_y^2 + eta_xy^2)/n^2
///            + (1+rho^2)(sigma_x sigma_y)^2
///            + |Phi_j|^{-2} n^{-1} (sigma_x^2 eta_y^2 + sigma_y^2 eta_x^2
///                                   + 2 rho sigma_x sigma_y eta_xy),
/// w_j = I_j / sum_r I_r. Optionally reports the I_j themselves.
std::vector<double> oracle_weights(double sigma_x, double sigma_y, double rho,
                                   const NoiseCovariance& noise, const BlockGeometry& geometry,
                                   std::vector<double>* precision_out = nullptr);

/// Weight tables evaluated at the true spot matrix Sigma_{kh} per block, or
/// at the pilot estimate on the coarse grid containing the block.
WeightTable weights_from_path(const SpotPath& path, const NoiseCovariance& noise,
                              const BlockGeometry& geometry);
WeightTable weights_from_pilot(const SpotEstimate& pilot, const NoiseCovariance& noise,
                               const BlockGeometry& geometry);

/// Core weighted estimator
///   value = sum_k h sum_j w_jk |Phi_jk|^{-2} (xt_jk yt_jk - eta_xy / n)
/// with plug-in variance sum_k h^2 sum_j w_jk^2 / I_jk (sqrt(n)-scaled).
EstimateReport specv_with_weights(const SpectralCoefficients& coeffs, const WeightTable& weights,
                                  const NoiseCovariance& noise, const std::string& mode,
                                  NoiseSource source);

/// Oracle SPECV: weights from the true path; plugin_avar from the closed-form
/// CLT variance when H != 0, otherwise the finite-sum plug-in.
EstimateReport specv_oracle(const SpectralCoefficients& coeffs, const SpotPath& path,
                            const NoiseCovariance& noise);

/// Uniform weights w_j = 1/J; with H = 0 and J = nh this is the realized
/// covariance over within-block increments (Parseval).
EstimateReport specv_uniform(const SpectralCoefficients& coeffs, const NoiseCovariance& noise);

/// First-frequency-only estimator h sum_k |Phi_1k|^{-2} (xt yt - eta_xy/n);
/// plugin_avar is a moment plug-in from the cross-block sample variance.
EstimateReport specv_j1(const SpectralCoefficients& coeffs, const NoiseCovariance& noise);

/// Blockwise j=1 pilot spot estimates smoothed over a window of K adjacent
/// blocks centered on the block containing each coarse time, truncated at
/// the interval ends and renormalized by the actual window size, then
/// clamped: variances floored at eps_sigma and eigenvalues clipped there.
SpotEstimate spot_pilot(const SpectralCoefficients& coeffs, const NoiseCovariance& noise,
                        const BlockGeometry& geometry);

/// Adaptive SPECV: coefficients -> (noise estimation if requested) -> pilot
/// on the coarse grid -> weights -> weighted sum.
EstimateReport specv_adaptive(const ObservationSet& obs, const BlockGeometry& geometry,
                              const NoiseSpec& noise_spec);

/// Adaptive SPECV from precomputed coefficients and pilot (the MC harness
/// shares both across estimators within a replication).
EstimateReport specv_adaptive_from(const SpectralCoefficients& coeffs, const SpotEstimate& pilot,
                                   const NoiseCovariance& noise, NoiseSource source);

/// Univariate spectral volatility estimator for X (x_side) or Y, weights
/// w_j proportional to (|Phi_j|^{-2} eta^2 / n + sigma^2)^{-2}.
EstimateReport spev_oracle(const SpectralCoefficients& coeffs, bool x_side, const SpotPath& path,
                           const NoiseCovariance& noise);
EstimateReport spev_adaptive(const ObservationSet& obs, const BlockGeometry& geometry, bool x_side,
                             const NoiseSpec& noise_spec);
EstimateReport spev_with_pilot(const SpectralCoefficients& coeffs, bool x_side,
                               const SpotEstimate& pilot, const NoiseCovariance& noise,
                               NoiseSource source);

/// Variance floor used by the pilot clamping.
inline constexpr double kSpotVarianceFloor = 1e-8;

std::string to_string(NoiseSource s);

}  // namespace specv
