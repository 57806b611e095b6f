#include "specv/simulate.hpp"

#include <cmath>

#include "specv/quadrature.hpp"

namespace specv {

void ObservationSet::validate() const {
    const size_t m = times.size();
    if (m < 2 || x.size() != m || y.size() != m || meta.n != static_cast<long>(m) - 1)
        throw DegenerateInput("ObservationSet: inconsistent lengths");
    for (size_t i = 1; i < m; ++i)
        if (!(times[i] > times[i - 1]))
            throw DegenerateInput("ObservationSet: times not strictly increasing");
}

namespace {

// Lower-triangular Cholesky of a 2x2 PSD matrix, clamping round-off
// negatives at zero. Throws if the matrix is indefinite beyond tol.
void chol2x2(double c11, double c12, double c22, double tol,
             double& l11, double& l21, double& l22) {
    const double scale = std::max({std::abs(c11), std::abs(c22), 1.0});
    if (c11 < -tol * scale || c22 < -tol * scale ||
        c12 * c12 > c11 * c22 + tol * scale * scale)
        throw DegenerateStep("per-step integrated covariance is not PSD");
    c11 = std::max(c11, 0.0);
    l11 = std::sqrt(c11);
    l21 = (l11 > 0.0) ? c12 / l11 : 0.0;
    l22 = std::sqrt(std::max(c22 - l21 * l21, 0.0));
}

}  // namespace

SignalSampler SignalSampler::prepare(const SpotPath& path, long n, const SamplingScheme& scheme) {
    if (n < 2) throw DegenerateInput("simulate_signal: n >= 2 required");
    scheme.require_monotone(static_cast<int>(std::min<long>(n, 4096)));
    SignalSampler s;
    s.times.resize(n + 1);
    for (long i = 0; i <= n; ++i) s.times[i] = scheme.time_of(static_cast<int>(i), static_cast<int>(n));
    s.l11.resize(n);
    s.l21.resize(n);
    s.l22.resize(n);
    auto cxx = [&path](double t) { return path.covariance(t)[0]; };
    auto cxy = [&path](double t) { return path.covariance(t)[1]; };
    auto cyy = [&path](double t) { return path.covariance(t)[2]; };
    for (long i = 0; i < n; ++i) {
        const double a = s.times[i], b = s.times[i + 1];
        const double c11 = composite_simpson(cxx, a, b, 9);
        const double c12 = composite_simpson(cxy, a, b, 9);
        const double c22 = composite_simpson(cyy, a, b, 9);
        chol2x2(c11, c12, c22, 1e-12, s.l11[i], s.l21[i], s.l22[i]);
    }
    return s;
}

SignalSampler SignalSampler::prepare_blockwise(const SpotPath& path, long n, int h_inv) {
    if (h_inv <= 0 || n % h_inv != 0)
        throw BadGeometry("simulate_signal_blockwise: nh must be an integer");
    SignalSampler s;
    s.times.resize(n + 1);
    for (long i = 0; i <= n; ++i) s.times[i] = static_cast<double>(i) / n;
    s.l11.resize(n);
    s.l21.resize(n);
    s.l22.resize(n);
    const long nh = n / h_inv;
    for (int k = 0; k < h_inv; ++k) {
        const auto c = path.covariance(static_cast<double>(k) / h_inv);
        double l11, l21, l22;
        chol2x2(c[0] / n, c[1] / n, c[2] / n, 1e-12, l11, l21, l22);
        for (long m = 0; m < nh; ++m) {
            const long i = static_cast<long>(k) * nh + m;
            s.l11[i] = l11;
            s.l21[i] = l21;
            s.l22[i] = l22;
        }
    }
    return s;
}

void SignalSampler::draw(const Seed& seed, std::vector<double>& x, std::vector<double>& y) const {
    const long n = static_cast<long>(l11.size());
    CounterRng rng(seed.with_purpose(rng_purpose::kSignal));
    x.assign(n + 1, 0.0);
    y.assign(n + 1, 0.0);
    for (long i = 0; i < n; ++i) {
        const double z1 = rng.next_gaussian();
        const double z2 = rng.next_gaussian();
        x[i + 1] = x[i] + l11[i] * z1;
        y[i + 1] = y[i] + l21[i] * z1 + l22[i] * z2;
    }
}

std::pair<std::vector<double>, std::vector<double>> simulate_signal(
    const SpotPath& path, long n, const SamplingScheme& scheme, const Seed& seed) {
    const auto sampler = SignalSampler::prepare(path, n, scheme);
    std::vector<double> x, y;
    sampler.draw(seed, x, y);
    return {std::move(x), std::move(y)};
}

std::pair<std::vector<double>, std::vector<double>> simulate_signal_blockwise(
    const SpotPath& path, long n, int h_inv, const Seed& seed) {
    const auto sampler = SignalSampler::prepare_blockwise(path, n, h_inv);
    std::vector<double> x, y;
    sampler.draw(seed, x, y);
    return {std::move(x), std::move(y)};
}

ObservationSet add_noise(std::vector<double> x_signal, std::vector<double> y_signal,
                         const NoiseCovariance& noise, const Seed& seed,
                         ObservationMeta meta, std::vector<double> times) {
    if (x_signal.size() != y_signal.size() || x_signal.empty())
        throw DegenerateInput("add_noise: series must have equal nonzero length");
    noise.require_psd();
    const long n = static_cast<long>(x_signal.size()) - 1;
    ObservationSet obs;
    obs.meta = meta;
    obs.meta.n = n;
    obs.meta.seed = seed;
    if (times.empty()) {
        obs.times.resize(n + 1);
        for (long i = 0; i <= n; ++i) obs.times[i] = static_cast<double>(i) / n;
    } else {
        if (times.size() != x_signal.size())
            throw DegenerateInput("add_noise: times length mismatch");
        obs.times = std::move(times);
    }
    if (!noise.is_zero()) {
        double l11, l21, l22;
        chol2x2(noise.eta_x_sq, noise.eta_xy, noise.eta_y_sq, 1e-14, l11, l21, l22);
        CounterRng rng(seed.with_purpose(rng_purpose::kNoise));
        for (long i = 0; i <= n; ++i) {
            const double z1 = rng.next_gaussian();
            const double z2 = rng.next_gaussian();
            x_signal[i] += l11 * z1;
            y_signal[i] += l21 * z1 + l22 * z2;
        }
    }
    obs.x = std::move(x_signal);
    obs.y = std::move(y_signal);
    return obs;
}

}  // namespace specv
