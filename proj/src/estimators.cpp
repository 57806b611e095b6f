#include "specv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "specv/asymptotics.hpp"

namespace specv {

std::string to_string(NoiseSource s) {
    return s == NoiseSource::Known ? "known" : "estimated";
}

void WeightTable::validate() const {
    const int J = geometry.J;
    for (int k = 0; k < geometry.h_inv; ++k) {
        double row = 0.0;
        for (int j = 1; j <= J; ++j) {
            const double wj = weight(k, j);
            if (wj < 0.0) throw WeightConstraintViolation("negative frequency weight");
            row += wj;
        }
        if (std::abs(row - 1.0) > 1e-12)
            throw WeightConstraintViolation("frequency weights do not sum to 1");
    }
}

void attach_ci(EstimateReport& rep) {
    const double hw = 1.96 * std::sqrt(rep.plugin_avar / std::sqrt(static_cast<double>(rep.tuning.n)));
    rep.ci_lo = rep.value - hw;
    rep.ci_hi = rep.value + hw;
}

namespace {

TuningRecord tuning_of(const BlockGeometry& g, const Seed& seed, NoiseSource source) {
    TuningRecord t;
    t.n = g.n;
    t.h_inv = g.h_inv;
    t.J = g.J;
    t.r_over_h = g.r_over_h;
    t.K = g.K;
    t.seed = seed;
    t.noise_source = source;
    return t;
}

// Clamp a noise covariance estimate to the PSD cone: variances floored at 0,
// covariance capped at the geometric mean.
NoiseCovariance clamp_noise(double ex, double ey, double exy) {
    NoiseCovariance h;
    h.eta_x_sq = std::max(ex, 0.0);
    h.eta_y_sq = std::max(ey, 0.0);
    const double cap = std::sqrt(h.eta_x_sq * h.eta_y_sq);
    h.eta_xy = std::clamp(exy, -cap, cap);
    return h;
}

// value = sum_k h sum_j w_jk |Phi_j|^{-2} (a_jk b_jk - bias/n); also returns
// the per-block inner sums for moment-based variance plug-ins.
double weighted_sum(const SpectralCoefficients& c, const std::vector<double>& a,
                    const std::vector<double>& b, const WeightTable& wt, double bias,
                    std::vector<double>* per_block = nullptr) {
    const BlockGeometry& g = c.geometry;
    const int J = g.J;
    double total = 0.0;
    if (per_block) per_block->assign(g.h_inv, 0.0);
    for (int k = 0; k < g.h_inv; ++k) {
        double s = 0.0;
        const size_t base = static_cast<size_t>(k) * J;
        for (int j = 0; j < J; ++j) {
            const double prod = a[base + j] * b[base + j];
            s += wt.w[base + j] * (prod - bias / g.n) / c.norms_sq[j];
        }
        if (per_block) (*per_block)[k] = s;
        total += g.h() * s;
    }
    return total;
}

// sqrt(n)-scaled plug-in variance sum_k h^2 sum_j w_jk^2 / I_jk.
double plugin_from_precision(const WeightTable& wt) {
    const BlockGeometry& g = wt.geometry;
    double v = 0.0;
    for (int k = 0; k < g.h_inv; ++k) {
        double s = 0.0;
        const size_t base = static_cast<size_t>(k) * g.J;
        for (int j = 0; j < g.J; ++j) {
            const double p = wt.precision[base + j];
            if (p > 0.0) s += wt.w[base + j] * wt.w[base + j] / p;
        }
        v += g.h() * g.h() * s;
    }
    return v * std::sqrt(static_cast<double>(g.n));
}

// sqrt(n)-scaled moment plug-in from the cross-block spread of inner sums.
double plugin_from_blocks(const std::vector<double>& per_block, const BlockGeometry& g) {
    const size_t m = per_block.size();
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double mean = std::accumulate(per_block.begin(), per_block.end(), 0.0) / m;
    double ss = 0.0;
    for (double z : per_block) ss += (z - mean) * (z - mean);
    const double var_block = ss / (m - 1);
    return g.h() * g.h() * m * var_block * std::sqrt(static_cast<double>(g.n));
}

// Nearest positive semi-definite 2x2 matrix with eigenvalues clipped at
// floor_ev. Returns true when the input needed adjustment.
bool clip_spot_matrix(double& vx, double& vy, double& c, double floor_ev) {
    const double mean = 0.5 * (vx + vy);
    const double d = std::sqrt(0.25 * (vx - vy) * (vx - vy) + c * c);
    const double lo = mean - d;
    if (lo >= floor_ev) return false;
    const double hi_clipped = std::max(mean + d, floor_ev);
    const double lo_clipped = floor_ev;
    // Eigenvector for the larger eigenvalue.
    double ux, uy;
    if (c == 0.0) {
        ux = vx >= vy ? 1.0 : 0.0;
        uy = vx >= vy ? 0.0 : 1.0;
    } else {
        ux = c;
        uy = (mean + d) - vx;
        const double norm = std::sqrt(ux * ux + uy * uy);
        ux /= norm;
        uy /= norm;
    }
    vx = hi_clipped * ux * ux + lo_clipped * uy * uy;
    vy = hi_clipped * uy * uy + lo_clipped * ux * ux;
    c = (hi_clipped - lo_clipped) * ux * uy;
    return true;
}

std::vector<double> spev_weights(double sigma_sq, double eta_sq, const BlockGeometry& g,
                                 std::vector<double>* precision_out) {
    double sum = 0.0;
    std::vector<double> I(g.J);
    for (int j = 1; j <= g.J; ++j) {
        const double v = eta_sq / (empirical_norm_sq(j, g.n, g.h_inv) * g.n) + sigma_sq;
        I[j - 1] = 1.0 / (2.0 * v * v);
        sum += I[j - 1];
    }
    if (!(sum > 0.0)) throw DegenerateDenominator("spev weights: all precisions vanish");
    std::vector<double> w(g.J);
    for (int j = 0; j < g.J; ++j) w[j] = I[j] / sum;
    if (precision_out) *precision_out = std::move(I);
    return w;
}

}  // namespace

NoiseCovariance estimate_noise_covariance(const ObservationSet& obs, NoiseVariant variant) {
    const long n = obs.n();
    if (n < 2) throw TooFewObservations("estimate_noise_covariance: n >= 2 required");
    if (variant == NoiseVariant::HalfQuadratic) {
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (long l = 1; l <= n; ++l) {
            const double dx = obs.x[l] - obs.x[l - 1];
            const double dy = obs.y[l] - obs.y[l - 1];
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        const double c = 1.0 / (2.0 * n);
        return clamp_noise(c * sxx, c * syy, c * sxy);
    }
    // Lag-one: minus the autocovariance of increments at lag 1; the signal
    // contribution has mean zero exactly, so there is no finite-sample bias.
    double sxx = 0.0, syy = 0.0, sxy = 0.0, syx = 0.0;
    for (long l = 1; l < n; ++l) {
        const double dx = obs.x[l] - obs.x[l - 1];
        const double dy = obs.y[l] - obs.y[l - 1];
        const double dx1 = obs.x[l + 1] - obs.x[l];
        const double dy1 = obs.y[l + 1] - obs.y[l];
        sxx += dx * dx1;
        syy += dy * dy1;
        sxy += dy * dx1;
        syx += dx * dy1;
    }
    const double c = -1.0 / n;
    return clamp_noise(c * sxx, c * syy, 0.5 * c * (sxy + syx));
}

std::vector<double> oracle_weights(double sigma_x, double sigma_y, double rho,
                                   const NoiseCovariance& noise, const BlockGeometry& geometry,
                                   std::vector<double>* precision_out) {
    noise.require_psd();
    geometry.validate();
    const BlockGeometry& g = geometry;
    const double q = noise.eta_x_sq * noise.eta_y_sq + noise.eta_xy * noise.eta_xy;
    const double cross = sigma_x * sigma_x * noise.eta_y_sq + sigma_y * sigma_y * noise.eta_x_sq +
                         2.0 * rho * sigma_x * sigma_y * noise.eta_xy;
    const double prod = (1.0 + rho * rho) * (sigma_x * sigma_y) * (sigma_x * sigma_y);
    std::vector<double> I(g.J);
    double sum = 0.0;
    for (int j = 1; j <= g.J; ++j) {
        const double inv_norm = 1.0 / empirical_norm_sq(j, g.n, g.h_inv);
        const double inv_I = inv_norm * inv_norm * q / (static_cast<double>(g.n) * g.n) + prod +
                             inv_norm * cross / g.n;
        if (!(inv_I > 0.0))
            throw DegenerateDenominator("oracle_weights: vanishing variance term");
        I[j - 1] = 1.0 / inv_I;
        sum += I[j - 1];
    }
    std::vector<double> w(g.J);
    for (int j = 0; j < g.J; ++j) w[j] = I[j] / sum;
    if (precision_out) *precision_out = std::move(I);
    return w;
}

WeightTable weights_from_path(const SpotPath& path, const NoiseCovariance& noise,
                              const BlockGeometry& geometry) {
    WeightTable wt;
    wt.geometry = geometry;
    wt.w.resize(static_cast<size_t>(geometry.h_inv) * geometry.J);
    wt.precision.resize(wt.w.size());
    for (int k = 0; k < geometry.h_inv; ++k) {
        const double t = static_cast<double>(k) / geometry.h_inv;
        std::vector<double> I;
        const auto w = oracle_weights(path.sigma_x(t), path.sigma_y(t), path.rho(t), noise,
                                      geometry, &I);
        std::copy(w.begin(), w.end(), wt.w.begin() + static_cast<size_t>(k) * geometry.J);
        std::copy(I.begin(), I.end(), wt.precision.begin() + static_cast<size_t>(k) * geometry.J);
    }
    return wt;
}

WeightTable weights_from_pilot(const SpotEstimate& pilot, const NoiseCovariance& noise,
                               const BlockGeometry& geometry) {
    WeightTable wt;
    wt.geometry = geometry;
    wt.w.resize(static_cast<size_t>(geometry.h_inv) * geometry.J);
    wt.precision.resize(wt.w.size());
    for (int k = 0; k < geometry.h_inv; ++k) {
        const size_t cell = std::min<size_t>(k / geometry.r_over_h, pilot.grid.size() - 1);
        const double sx = std::sqrt(pilot.sigma_x_sq_hat[cell]);
        const double sy = std::sqrt(pilot.sigma_y_sq_hat[cell]);
        const double denom = sx * sy;
        const double rho = denom > 0.0 ? std::clamp(pilot.covol_hat[cell] / denom, -1.0, 1.0) : 0.0;
        std::vector<double> I;
        const auto w = oracle_weights(sx, sy, rho, noise, geometry, &I);
        std::copy(w.begin(), w.end(), wt.w.begin() + static_cast<size_t>(k) * geometry.J);
        std::copy(I.begin(), I.end(), wt.precision.begin() + static_cast<size_t>(k) * geometry.J);
    }
    return wt;
}

EstimateReport specv_with_weights(const SpectralCoefficients& coeffs, const WeightTable& weights,
                                  const NoiseCovariance& noise, const std::string& mode,
                                  NoiseSource source) {
    if (weights.geometry.J != coeffs.geometry.J || weights.geometry.h_inv != coeffs.geometry.h_inv)
        throw BadGeometry("specv_with_weights: weight table does not match coefficients");
    EstimateReport rep;
    rep.mode = mode;
    rep.tuning = tuning_of(coeffs.geometry, Seed{}, source);
    rep.value = weighted_sum(coeffs, coeffs.xt, coeffs.yt, weights, noise.eta_xy);
    rep.plugin_avar = plugin_from_precision(weights);
    attach_ci(rep);
    return rep;
}

EstimateReport specv_oracle(const SpectralCoefficients& coeffs, const SpotPath& path,
                            const NoiseCovariance& noise) {
    const auto wt = weights_from_path(path, noise, coeffs.geometry);
    auto rep = specv_with_weights(coeffs, wt, noise, "oracle", NoiseSource::Known);
    if (!noise.is_zero()) {
        rep.plugin_avar = clt_variance(path, noise);
        attach_ci(rep);
    }
    return rep;
}

EstimateReport specv_uniform(const SpectralCoefficients& coeffs, const NoiseCovariance& noise) {
    const BlockGeometry& g = coeffs.geometry;
    WeightTable wt;
    wt.geometry = g;
    wt.w.assign(static_cast<size_t>(g.h_inv) * g.J, 1.0 / g.J);
    wt.precision.assign(wt.w.size(), 0.0);
    EstimateReport rep;
    rep.mode = "uniform";
    rep.tuning = tuning_of(g, Seed{}, NoiseSource::Known);
    std::vector<double> per_block;
    rep.value = weighted_sum(coeffs, coeffs.xt, coeffs.yt, wt, noise.eta_xy, &per_block);
    rep.plugin_avar = plugin_from_blocks(per_block, g);
    attach_ci(rep);
    return rep;
}

EstimateReport specv_j1(const SpectralCoefficients& coeffs, const NoiseCovariance& noise) {
    const BlockGeometry& g = coeffs.geometry;
    EstimateReport rep;
    rep.mode = "j1";
    rep.tuning = tuning_of(g, Seed{}, NoiseSource::Known);
    std::vector<double> per_block(g.h_inv);
    double total = 0.0;
    for (int k = 0; k < g.h_inv; ++k) {
        const double z = (coeffs.x(k, 1) * coeffs.y(k, 1) - noise.eta_xy / g.n) / coeffs.norms_sq[0];
        per_block[k] = z;
        total += g.h() * z;
    }
    rep.value = total;
    rep.plugin_avar = plugin_from_blocks(per_block, g);
    attach_ci(rep);
    return rep;
}

SpotEstimate spot_pilot(const SpectralCoefficients& coeffs, const NoiseCovariance& noise,
                        const BlockGeometry& geometry) {
    geometry.validate();
    const BlockGeometry& g = geometry;
    if (g.K > g.h_inv) throw BadGeometry("spot_pilot: K exceeds the number of blocks");
    SpotEstimate est;
    est.K = g.K;
    const int n_cells = g.n_coarse();
    est.grid.resize(n_cells);
    est.sigma_x_sq_hat.resize(n_cells);
    est.sigma_y_sq_hat.resize(n_cells);
    est.covol_hat.resize(n_cells);
    const double inv_norm = 1.0 / coeffs.norms_sq[0];
    for (int cell = 0; cell < n_cells; ++cell) {
        const double t = cell * g.r();
        est.grid[cell] = t;
        // Window of K adjacent blocks centered on the block containing t,
        // truncated (not shifted) at the interval ends and renormalized by
        // the actual window size.
        const int b = std::min(static_cast<int>(t * g.h_inv), g.h_inv - 1);
        const int lo = std::max(0, b - (g.K - 1) / 2);
        const int hi = std::min(g.h_inv - 1, b + g.K / 2);
        const int m = hi - lo + 1;
        double vx = 0.0, vy = 0.0, c = 0.0;
        for (int k = lo; k <= hi; ++k) {
            const double xc = coeffs.x(k, 1), yc = coeffs.y(k, 1);
            vx += inv_norm * (xc * xc - noise.eta_x_sq / g.n);
            vy += inv_norm * (yc * yc - noise.eta_y_sq / g.n);
            c += inv_norm * (xc * yc - noise.eta_xy / g.n);
        }
        vx /= m;
        vy /= m;
        c /= m;
        bool touched = false;
        if (vx < kSpotVarianceFloor) {
            vx = kSpotVarianceFloor;
            touched = true;
        }
        if (vy < kSpotVarianceFloor) {
            vy = kSpotVarianceFloor;
            touched = true;
        }
        touched |= clip_spot_matrix(vx, vy, c, kSpotVarianceFloor);
        if (touched) ++est.clamp_report;
        est.sigma_x_sq_hat[cell] = vx;
        est.sigma_y_sq_hat[cell] = vy;
        est.covol_hat[cell] = c;
    }
    return est;
}

EstimateReport specv_adaptive_from(const SpectralCoefficients& coeffs, const SpotEstimate& pilot,
                                   const NoiseCovariance& noise, NoiseSource source) {
    const auto wt = weights_from_pilot(pilot, noise, coeffs.geometry);
    auto rep = specv_with_weights(coeffs, wt, noise, "adaptive", source);
    rep.clamp_report = pilot.clamp_report;
    return rep;
}

EstimateReport specv_adaptive(const ObservationSet& obs, const BlockGeometry& geometry,
                              const NoiseSpec& noise_spec) {
    const auto coeffs = compute_coefficients(obs, geometry);
    const NoiseCovariance noise = noise_spec.source == NoiseSource::Known
                                      ? noise_spec.known
                                      : estimate_noise_covariance(obs, noise_spec.variant);
    const auto pilot = spot_pilot(coeffs, noise, geometry);
    auto rep = specv_adaptive_from(coeffs, pilot, noise, noise_spec.source);
    rep.tuning.seed = obs.meta.seed;
    return rep;
}

namespace {

EstimateReport spev_core(const SpectralCoefficients& coeffs,
                         const std::vector<double>& sigma_sq_by_block, bool x_side,
                         const NoiseCovariance& noise, NoiseSource source) {
    const BlockGeometry& g = coeffs.geometry;
    const double eta_sq = x_side ? noise.eta_x_sq : noise.eta_y_sq;
    const auto& series = x_side ? coeffs.xt : coeffs.yt;
    WeightTable wt;
    wt.geometry = g;
    wt.w.resize(static_cast<size_t>(g.h_inv) * g.J);
    wt.precision.resize(wt.w.size());
    for (int k = 0; k < g.h_inv; ++k) {
        std::vector<double> I;
        const auto w = spev_weights(sigma_sq_by_block[k], eta_sq, g, &I);
        std::copy(w.begin(), w.end(), wt.w.begin() + static_cast<size_t>(k) * g.J);
        std::copy(I.begin(), I.end(), wt.precision.begin() + static_cast<size_t>(k) * g.J);
    }
    EstimateReport rep;
    rep.mode = x_side ? "spev_x" : "spev_y";
    rep.tuning = tuning_of(g, Seed{}, source);
    rep.value = weighted_sum(coeffs, series, series, wt, eta_sq);
    rep.plugin_avar = plugin_from_precision(wt);
    attach_ci(rep);
    return rep;
}

}  // namespace

EstimateReport spev_oracle(const SpectralCoefficients& coeffs, bool x_side, const SpotPath& path,
                           const NoiseCovariance& noise) {
    const BlockGeometry& g = coeffs.geometry;
    std::vector<double> sig(g.h_inv);
    for (int k = 0; k < g.h_inv; ++k) {
        const double s = x_side ? path.sigma_x(k * g.h()) : path.sigma_y(k * g.h());
        sig[k] = s * s;
    }
    return spev_core(coeffs, sig, x_side, noise, NoiseSource::Known);
}

EstimateReport spev_with_pilot(const SpectralCoefficients& coeffs, bool x_side,
                               const SpotEstimate& pilot, const NoiseCovariance& noise,
                               NoiseSource source) {
    const BlockGeometry& g = coeffs.geometry;
    std::vector<double> sig(g.h_inv);
    for (int k = 0; k < g.h_inv; ++k) {
        const size_t cell = std::min<size_t>(k / g.r_over_h, pilot.grid.size() - 1);
        sig[k] = x_side ? pilot.sigma_x_sq_hat[cell] : pilot.sigma_y_sq_hat[cell];
    }
    auto rep = spev_core(coeffs, sig, x_side, noise, source);
    rep.clamp_report = pilot.clamp_report;
    return rep;
}

EstimateReport spev_adaptive(const ObservationSet& obs, const BlockGeometry& geometry, bool x_side,
                             const NoiseSpec& noise_spec) {
    const auto coeffs = compute_coefficients(obs, geometry);
    const NoiseCovariance noise = noise_spec.source == NoiseSource::Known
                                      ? noise_spec.known
                                      : estimate_noise_covariance(obs, noise_spec.variant);
    const auto pilot = spot_pilot(coeffs, noise, geometry);
    auto rep = spev_with_pilot(coeffs, x_side, pilot, noise, noise_spec.source);
    rep.tuning.seed = obs.meta.seed;
    return rep;
}

}  // namespace specv
