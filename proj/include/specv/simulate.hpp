#pragma once

#include <string>
#include <vector>

#include "specv/model.hpp"
#include "specv/rng.hpp"

namespace specv {

struct ObservationMeta {
    long n = 0;
    SchemeKind scheme = SchemeKind::Equidistant;
    Seed seed;
    std::string model_tag = "E0";  // E0 (smooth) or E3 (blockwise-constant)
    int h_inv = 0;                 // only meaningful for E3
};

/// Two aligned noisy series on a grid of n+1 times; the estimators' only input.
struct ObservationSet {
    std::vector<double> times;  // strictly increasing, times[0]=0, times[n]=1
    std::vector<double> x;
    std::vector<double> y;
    ObservationMeta meta;

    long n() const { return meta.n; }
    void validate() const;  // shape and monotonicity invariants
};

/// Per-step lower-triangular Cholesky factors of the integrated covariance
/// int_{t_{i-1}}^{t_i} Sigma_s ds. Depends only on (path, n, scheme), so MC
/// loops precompute it once and reuse it across seeds.
struct SignalSampler {
    std::vector<double> l11, l21, l22;  // n entries each
    std::vector<double> times;          // n+1 grid times

    /// Per-step integrals by composite Simpson with 9 nodes; throws
    /// DegenerateStep if a step covariance is not PSD within 1e-12.
    static SignalSampler prepare(const SpotPath& path, long n, const SamplingScheme& scheme);
    /// Blockwise-constant volatility: covariance Sigma_{kh}/n on block k, exact.
    static SignalSampler prepare_blockwise(const SpotPath& path, long n, int h_inv);

    void draw(const Seed& seed, std::vector<double>& x, std::vector<double>& y) const;
};

/// Exact Gaussian signal samples at the grid times; Z_0 = (0,0).
std::pair<std::vector<double>, std::vector<double>> simulate_signal(
    const SpotPath& path, long n, const SamplingScheme& scheme, const Seed& seed);

/// Same law with Sigma held constant at Sigma_{kh} within block k.
std::pair<std::vector<double>, std::vector<double>> simulate_signal_blockwise(
    const SpotPath& path, long n, int h_inv, const Seed& seed);

/// Adds i.i.d. centred bivariate Gaussian noise with covariance H to all
/// n+1 points; the noise stream is independent of the signal stream.
ObservationSet add_noise(std::vector<double> x_signal, std::vector<double> y_signal,
                         const NoiseCovariance& noise, const Seed& seed,
                         ObservationMeta meta = {}, std::vector<double> times = {});

namespace rng_purpose {
inline constexpr std::uint64_t kSignal = 1;
inline constexpr std::uint64_t kNoise = 2;
}  // namespace rng_purpose

}  // namespace specv
