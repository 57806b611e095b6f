#pragma once

#include <vector>

#include "specv/estimators.hpp"

namespace specv {

/// sum_{l=1}^n dX_l dY_l.
double realized_covariance(const ObservationSet& obs);

/// Realized covariance over within-block increments only (the last increment
/// of each block is skipped). This is the exact discrete counterpart of the
/// uniform-weight spectral estimator with H = 0 and J = nh.
double blockwise_realized_covariance(const ObservationSet& obs, const BlockGeometry& geometry);

/// Lag-m subsample average m^{-1} sum_{i=m}^n (X_i - X_{i-m})(Y_i - Y_{i-m}).
double subsampled_rc(const ObservationSet& obs, long m);

/// subsampled_rc for every m = 1..m_max in one pass (FFT cross-correlation,
/// O(n log n)); entry [m-1] equals subsampled_rc(obs, m) to round-off.
std::vector<double> subsampled_rc_all(const ObservationSet& obs, long m_max);

/// Multi-scale weights and tuning. The standard family a_m = alpha m / M^2 +
/// beta m^2 / M^3 is pinned down by the two bias-cancellation constraints
/// sum a_m = 1 and sum a_m / m = 0.
struct MsrcConfig {
    long M = 0;
    std::vector<double> weights;  // length M
    enum class Tuning { Explicit, GridOracle } tuned_by = Tuning::Explicit;

    static MsrcConfig standard(long M);
    /// Throws WeightConstraintViolation unless both constraints hold within
    /// 1e-10 (waived at M = 1, where the estimator degenerates to realized
    /// covariance).
    void validate() const;
};

/// value = sum_m a_m subsampled_rc(m) + 2 eta_xy_hat. The additive term
/// removes the residual noise bias -2 eta_XY left over after the two weight
/// constraints; eta_xy_hat is taken from known_noise when given, else from
/// the lag-one noise estimator. plugin_avar is not defined for this mode
/// (reported as NaN).
EstimateReport msrc(const ObservationSet& obs, const MsrcConfig& cfg,
                    const NoiseCovariance* known_noise = nullptr);

/// Candidate scale counts M = ceil(c sqrt(n)) over a geometric grid of c;
/// duplicates removed, all entries in [2, n].
std::vector<long> msrc_scale_grid(long n);

}  // namespace specv
