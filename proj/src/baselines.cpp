#include "specv/baselines.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>

namespace specv {

double realized_covariance(const ObservationSet& obs) {
    const long n = obs.n();
    if (n < 1) throw TooFewObservations("realized_covariance: n >= 1 required");
    double s = 0.0;
    for (long l = 1; l <= n; ++l)
        s += (obs.x[l] - obs.x[l - 1]) * (obs.y[l] - obs.y[l - 1]);
    return s;
}

double blockwise_realized_covariance(const ObservationSet& obs, const BlockGeometry& geometry) {
    geometry.validate();
    if (geometry.n != obs.n()) throw BadGeometry("geometry n does not match observations");
    const long nh = geometry.nh;
    double s = 0.0;
    for (long l = 1; l <= geometry.n; ++l) {
        if (l % nh == 0) continue;
        s += (obs.x[l] - obs.x[l - 1]) * (obs.y[l] - obs.y[l - 1]);
    }
    return s;
}

double subsampled_rc(const ObservationSet& obs, long m) {
    const long n = obs.n();
    if (m < 1 || m > n) throw BadLag("subsampled_rc: 1 <= m <= n required");
    double s = 0.0;
    for (long i = m; i <= n; ++i)
        s += (obs.x[i] - obs.x[i - m]) * (obs.y[i] - obs.y[i - m]);
    return s / m;
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

}  // namespace

std::vector<double> subsampled_rc_all(const ObservationSet& obs, long m_max) {
    const long n = obs.n();
    if (m_max < 1 || m_max > n) throw BadLag("subsampled_rc_all: 1 <= m_max <= n required");
    const long len = n + 1;
    long L = 1;
    while (L < 2 * len) L <<= 1;
    const long Lc = L / 2 + 1;

    std::vector<double> in(L, 0.0);
    std::vector<std::complex<double>> fx(Lc), fy(Lc);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(L), in.data(),
                                   reinterpret_cast<fftw_complex*>(fx.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(L),
                                   reinterpret_cast<fftw_complex*>(fx.data()), in.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    std::copy(obs.x.begin(), obs.x.end(), in.begin());
    fftw_execute_dft_r2c(fwd, in.data(), reinterpret_cast<fftw_complex*>(fx.data()));
    std::fill(in.begin(), in.end(), 0.0);
    std::copy(obs.y.begin(), obs.y.end(), in.begin());
    fftw_execute_dft_r2c(fwd, in.data(), reinterpret_cast<fftw_complex*>(fy.data()));
    for (long i = 0; i < Lc; ++i) fx[i] *= std::conj(fy[i]);
    fftw_execute_dft_c2r(bwd, reinterpret_cast<fftw_complex*>(fx.data()), in.data());
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    // in[m]/L   = sum_{i=m}^n x_i y_{i-m}
    // in[L-m]/L = sum_{i=m}^n y_i x_{i-m}
    std::vector<double> prefix(len);
    double acc = 0.0;
    for (long i = 0; i < len; ++i) {
        acc += obs.x[i] * obs.y[i];
        prefix[i] = acc;
    }
    std::vector<double> rc(m_max);
    const double inv_L = 1.0 / L;
    for (long m = 1; m <= m_max; ++m) {
        const double p = prefix[n] - prefix[m - 1];  // sum_{i>=m} x_i y_i
        const double q = prefix[n - m];              // sum_{i<=n-m} x_i y_i
        const double cxy = in[m] * inv_L;
        const double cyx = in[L - m] * inv_L;
        rc[m - 1] = (p + q - cxy - cyx) / m;
    }
    return rc;
}

MsrcConfig MsrcConfig::standard(long M) {
    if (M < 1) throw BadLag("MsrcConfig: M >= 1 required");
    MsrcConfig cfg;
    cfg.M = M;
    cfg.weights.resize(M);
    if (M == 1) {
        cfg.weights[0] = 1.0;
        return cfg;
    }
    // a_m = alpha m / M^2 + beta m^2 / M^3 with sum a_m = 1, sum a_m / m = 0.
    const double Md = static_cast<double>(M);
    const double s1 = Md * (Md + 1.0) / 2.0;
    const double s2 = Md * (Md + 1.0) * (2.0 * Md + 1.0) / 6.0;
    const double a11 = s1 / (Md * Md), a12 = s2 / (Md * Md * Md);
    const double a21 = 1.0 / Md, a22 = s1 / (Md * Md * Md);
    const double det = a11 * a22 - a12 * a21;
    const double alpha = a22 / det;
    const double beta = -a21 / det;
    for (long m = 1; m <= M; ++m)
        cfg.weights[m - 1] = alpha * m / (Md * Md) + beta * m * m / (Md * Md * Md);
    return cfg;
}

void MsrcConfig::validate() const {
    if (M < 1 || static_cast<long>(weights.size()) != M)
        throw WeightConstraintViolation("MsrcConfig: weight count does not match M");
    if (M == 1) return;  // degenerate realized-covariance case, constraints waived
    double s = 0.0, s_inv = 0.0;
    for (long m = 1; m <= M; ++m) {
        s += weights[m - 1];
        s_inv += weights[m - 1] / m;
    }
    if (std::abs(s - 1.0) > 1e-10 || std::abs(s_inv) > 1e-10)
        throw WeightConstraintViolation("MsrcConfig: bias-cancellation constraints violated");
}

EstimateReport msrc(const ObservationSet& obs, const MsrcConfig& cfg,
                    const NoiseCovariance* known_noise) {
    cfg.validate();
    const long n = obs.n();
    if (cfg.M > n) throw BadLag("msrc: M <= n required");
    const auto rc = subsampled_rc_all(obs, cfg.M);
    double value = 0.0;
    for (long m = 1; m <= cfg.M; ++m) value += cfg.weights[m - 1] * rc[m - 1];
    if (cfg.M > 1) {
        const double eta_xy = known_noise
                                  ? known_noise->eta_xy
                                  : estimate_noise_covariance(obs, NoiseVariant::LagOne).eta_xy;
        value += 2.0 * eta_xy;
    }
    EstimateReport rep;
    rep.mode = "msrc";
    rep.value = value;
    rep.plugin_avar = std::numeric_limits<double>::quiet_NaN();
    rep.ci_lo = rep.ci_hi = std::numeric_limits<double>::quiet_NaN();
    rep.tuning.n = n;
    rep.tuning.seed = obs.meta.seed;
    rep.tuning.noise_source = known_noise ? NoiseSource::Known : NoiseSource::Estimated;
    return rep;
}

std::vector<long> msrc_scale_grid(long n) {
    const double root = std::sqrt(static_cast<double>(n));
    std::vector<long> grid;
    for (double c = 0.25; c <= 4.0 + 1e-9; c *= std::sqrt(2.0)) {
        long M = static_cast<long>(std::ceil(c * root));
        M = std::clamp<long>(M, 2, n);
        if (grid.empty() || M != grid.back()) grid.push_back(M);
    }
    return grid;
}

}  // namespace specv
