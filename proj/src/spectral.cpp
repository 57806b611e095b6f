#include "specv/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace specv {

double phi(int j, int k, int h_inv, double t) {
    const double h = 1.0 / h_inv;
    const double lo = k * h, hi = (k + 1) * h;
    if (t < lo || t > hi) return 0.0;
    return std::sqrt(2.0 / h) * std::cos(j * M_PI * h_inv * (t - lo));
}

double phi_antiderivative(int j, int k, int h_inv, long n, double t) {
    const double h = 1.0 / h_inv;
    const double lo = k * h, hi = (k + 1) * h;
    if (t < lo || t > hi) return 0.0;
    const double norm = std::sqrt(2.0 * h) * n * std::sin(j * M_PI / (2.0 * n * h));
    return std::sin(j * M_PI * h_inv * (t - lo)) / norm;
}

double empirical_norm_sq(int j, long n, int h_inv) {
    const double s = std::sin(j * M_PI * h_inv / (2.0 * n));
    return 1.0 / (4.0 * n * n * s * s);
}

namespace {

// Cached FFTW DST-I plans by transform length. Plan creation is not
// thread-safe; new-array execution with distinct buffers is.
class DstPlanCache {
public:
    static fftw_plan get(int len) {
        static DstPlanCache cache;
        std::lock_guard<std::mutex> lock(cache.mu_);
        auto it = cache.plans_.find(len);
        if (it != cache.plans_.end()) return it->second;
        std::vector<double> buf(len);
        fftw_plan p = fftw_plan_r2r_1d(len, buf.data(), buf.data(), FFTW_RODFT00,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache.plans_.emplace(len, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<int, fftw_plan> plans_;
};

void check_geometry(const ObservationSet& obs, const BlockGeometry& g) {
    if (g.n != obs.n()) throw BadGeometry("geometry n does not match observations");
    g.validate();
}

}  // namespace

SpectralCoefficients compute_coefficients_direct(const ObservationSet& obs,
                                                 const BlockGeometry& g) {
    check_geometry(obs, g);
    SpectralCoefficients c;
    c.geometry = g;
    const int J = g.J;
    const long nh = g.nh;
    c.xt.assign(static_cast<size_t>(g.h_inv) * J, 0.0);
    c.yt.assign(static_cast<size_t>(g.h_inv) * J, 0.0);
    c.norms_sq.resize(J);
    for (int j = 1; j <= J; ++j) c.norms_sq[j - 1] = empirical_norm_sq(j, g.n, g.h_inv);
    for (int k = 0; k < g.h_inv; ++k) {
        for (int j = 1; j <= J; ++j) {
            if (j == nh) continue;  // Phi_{nh,k} vanishes on the grid
            const double norm = std::sqrt(2.0 / g.h_inv) * g.n *
                                std::sin(j * M_PI / (2.0 * nh));
            double sx = 0.0, sy = 0.0;
            for (long m = 1; m < nh; ++m) {
                const long l = static_cast<long>(k) * nh + m;
                const double w = std::sin(j * M_PI * static_cast<double>(m) / nh);
                sx += (obs.x[l] - obs.x[l - 1]) * w;
                sy += (obs.y[l] - obs.y[l - 1]) * w;
            }
            c.xt[static_cast<size_t>(k) * J + (j - 1)] = sx / norm;
            c.yt[static_cast<size_t>(k) * J + (j - 1)] = sy / norm;
        }
    }
    return c;
}

SpectralCoefficients compute_coefficients(const ObservationSet& obs, const BlockGeometry& g) {
    check_geometry(obs, g);
    const long nh = g.nh;
    if (g.J < 32 || nh < 8) return compute_coefficients_direct(obs, g);

    SpectralCoefficients c;
    c.geometry = g;
    const int J = g.J;
    c.xt.assign(static_cast<size_t>(g.h_inv) * J, 0.0);
    c.yt.assign(static_cast<size_t>(g.h_inv) * J, 0.0);
    c.norms_sq.resize(J);
    for (int j = 1; j <= J; ++j) c.norms_sq[j - 1] = empirical_norm_sq(j, g.n, g.h_inv);

    const int len = static_cast<int>(nh) - 1;
    fftw_plan plan = DstPlanCache::get(len);
    std::vector<double> in(len), out(len);
    // RODFT00 of length nh-1 computes out_j = 2 sum_m in_m sin(j pi m / nh).
    for (int k = 0; k < g.h_inv; ++k) {
        for (int series = 0; series < 2; ++series) {
            const auto& v = series == 0 ? obs.x : obs.y;
            auto* coef = series == 0 ? c.xt.data() : c.yt.data();
            for (long m = 1; m < nh; ++m) {
                const long l = static_cast<long>(k) * nh + m;
                in[m - 1] = v[l] - v[l - 1];
            }
            fftw_execute_r2r(plan, in.data(), out.data());
            const int jmax = std::min<long>(J, nh - 1);
            for (int j = 1; j <= jmax; ++j) {
                const double norm = std::sqrt(2.0 / g.h_inv) * g.n *
                                    std::sin(j * M_PI / (2.0 * nh));
                coef[static_cast<size_t>(k) * J + (j - 1)] = 0.5 * out[j - 1] / norm;
            }
        }
    }
    return c;
}

double sbp_residual(const ObservationSet& obs, const BlockGeometry& g, int j, int k) {
    check_geometry(obs, g);
    const long n = g.n;
    double incr_sum = 0.0;
    for (long l = 1; l <= n; ++l)
        incr_sum += (obs.y[l] - obs.y[l - 1]) *
                    phi_antiderivative(j, k, g.h_inv, n, static_cast<double>(l) / n);
    double level_sum = 0.0;
    for (long l = 0; l < n; ++l)
        level_sum += obs.y[l] * phi(j, k, g.h_inv, (l + 0.5) / n);
    return std::abs(incr_sum + level_sum / n);
}

double scalar_product_grid(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, long n) {
    double s = 0.0;
    for (long l = 1; l <= n; ++l) {
        const double t = static_cast<double>(l) / n;
        s += f(t) * g(t);
    }
    return s / n;
}

double scalar_product_midpoint(const std::function<double(double)>& f,
                               const std::function<double(double)>& g, long n) {
    double s = 0.0;
    for (long l = 1; l <= n; ++l) {
        const double t = (l - 0.5) / n;
        s += f(t) * g(t);
    }
    return s / n;
}

}  // namespace specv
