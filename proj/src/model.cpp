#include "specv/model.hpp"

#include <algorithm>
#include <cmath>

#include "specv/quadrature.hpp"

namespace specv {

double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         int nodes) {
    if (nodes < 3 || nodes % 2 == 0) throw DegenerateInput("composite_simpson: nodes must be odd >= 3");
    const int panels = (nodes - 1) / 2;
    const double w = (b - a) / (nodes - 1);
    double sum = f(a) + f(b);
    for (int p = 0; p < panels; ++p) {
        sum += 4.0 * f(a + w * (2 * p + 1));
        if (p > 0) sum += 2.0 * f(a + w * (2 * p));
    }
    return sum * w / 3.0;
}

namespace detail {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, a, m);
    const double right = simpson_rule(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0) throw ToleranceNotMet("adaptive_simpson: max recursion depth reached");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson_rule(fa, fm, fb, a, b);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

std::array<double, 3> SpotPath::covariance(double t) const {
    const double sx = sigma_x(t), sy = sigma_y(t), r = rho(t);
    return {sx * sx, r * sx * sy, sy * sy};
}

double SpotPath::min_eigenvalue(double t) const {
    const auto c = covariance(t);
    const double tr = c[0] + c[2];
    const double disc = std::sqrt(0.25 * (c[0] - c[2]) * (c[0] - c[2]) + c[1] * c[1]);
    return 0.5 * tr - disc;
}

void SpotPath::validate_on_grid(int grid_points) const {
    for (int i = 0; i <= grid_points; ++i) {
        const double t = static_cast<double>(i) / grid_points;
        if (!(sigma_x(t) > 0.0)) throw DegenerateInput("SpotPath: sigma_x <= 0 at t=" + std::to_string(t));
        if (!(sigma_y(t) > 0.0)) throw DegenerateInput("SpotPath: sigma_y <= 0 at t=" + std::to_string(t));
        if (std::abs(rho(t)) > 1.0) throw DegenerateInput("SpotPath: |rho| > 1 at t=" + std::to_string(t));
    }
}

namespace {

ScalarPath interp(std::vector<double> v) {
    return [v = std::move(v)](double t) {
        const size_t m = v.size() - 1;
        double u = std::clamp(t, 0.0, 1.0) * m;
        size_t i = std::min(static_cast<size_t>(u), m - 1);
        double w = u - i;
        return v[i] * (1.0 - w) + v[i + 1] * w;
    };
}

}  // namespace

SpotPath tabulated_path(std::vector<double> sigma_x, std::vector<double> sigma_y,
                        std::vector<double> rho, std::string holder_note) {
    if (sigma_x.size() < 2 || sigma_x.size() != sigma_y.size() || sigma_x.size() != rho.size())
        throw DegenerateInput("tabulated_path: grids must share a size >= 2");
    return SpotPath{interp(std::move(sigma_x)), interp(std::move(sigma_y)),
                    interp(std::move(rho)), std::move(holder_note)};
}

bool NoiseCovariance::is_psd(double tol) const {
    return eta_x_sq >= -tol && eta_y_sq >= -tol &&
           eta_xy * eta_xy <= eta_x_sq * eta_y_sq + tol;
}

void NoiseCovariance::require_psd() const {
    if (!is_psd(1e-14)) throw NotPSD("NoiseCovariance: H is not positive semi-definite");
}

double NoiseCovariance::min_eigenvalue() const {
    const double tr = eta_x_sq + eta_y_sq;
    const double disc = std::sqrt(0.25 * (eta_x_sq - eta_y_sq) * (eta_x_sq - eta_y_sq) +
                                  eta_xy * eta_xy);
    return 0.5 * tr - disc;
}

SamplingScheme SamplingScheme::equidistant() {
    SamplingScheme s;
    s.kind = SchemeKind::Equidistant;
    return s;
}

SamplingScheme SamplingScheme::quantile(ScalarPath f_inverse, ScalarPath f_prime) {
    SamplingScheme s;
    s.kind = SchemeKind::Quantile;
    s.f_inverse = std::move(f_inverse);
    s.f_prime = std::move(f_prime);
    return s;
}

double SamplingScheme::time_of(int i, int n) const {
    const double u = static_cast<double>(i) / n;
    return kind == SchemeKind::Equidistant ? u : f_inverse(u);
}

void SamplingScheme::require_monotone(int n) const {
    if (kind == SchemeKind::Equidistant) return;
    double prev = f_inverse(0.0);
    for (int i = 1; i <= n; ++i) {
        const double cur = f_inverse(static_cast<double>(i) / n);
        if (!(cur > prev))
            throw NonMonotoneScheme("SamplingScheme: F^{-1} not strictly increasing at i=" +
                                    std::to_string(i));
        prev = cur;
    }
}

BlockGeometry::BlockGeometry(long n_, int h_inv_, int J_, int r_over_h_, int K_)
    : n(n_), h_inv(h_inv_), r_over_h(r_over_h_), K(K_) {
    if (h_inv <= 0 || n <= 0 || n % h_inv != 0)
        throw BadGeometry("BlockGeometry: n*h must be an integer (n=" + std::to_string(n) +
                          ", 1/h=" + std::to_string(h_inv) + ")");
    nh = n / h_inv;
    J = (J_ == 0) ? static_cast<int>(nh) : J_;
    validate();
}

int BlockGeometry::n_coarse() const { return (h_inv + r_over_h - 1) / r_over_h; }

void BlockGeometry::validate() const {
    if (n <= 0 || h_inv <= 0 || n % h_inv != 0)
        throw BadGeometry("BlockGeometry: nh not integral");
    if (J < 1 || J > nh) throw BadGeometry("BlockGeometry: J out of range [1, nh]");
    if (r_over_h < 1) throw BadGeometry("BlockGeometry: r/h must be a positive integer");
    if (K < 1) throw BadGeometry("BlockGeometry: K >= 1 required");
}

int BlockGeometry::default_h_inv(long n) {
    const double target = std::round(std::sqrt(static_cast<double>(n)) / std::log(static_cast<double>(n)));
    int best = 1;
    double best_gap = std::abs(1.0 - target);
    for (int d = 1; static_cast<long>(d) * d <= n; ++d) {
        if (n % d != 0) continue;
        for (long cand : {static_cast<long>(d), n / d}) {
            const double gap = std::abs(static_cast<double>(cand) - target);
            if (gap < best_gap && cand <= n) {
                best_gap = gap;
                best = static_cast<int>(cand);
            }
        }
    }
    return best;
}

SpotPath quantile_transform(const SpotPath& path, const SamplingScheme& scheme) {
    if (scheme.kind != SchemeKind::Quantile)
        throw DegenerateInput("quantile_transform: scheme must be of quantile kind");
    scheme.require_monotone(1024);
    auto finv = scheme.f_inverse;
    auto fprime = scheme.f_prime;
    // (F^{-1})'(s) = 1 / F'(F^{-1}(s))
    auto dilation = [finv, fprime](double s) { return 1.0 / fprime(finv(s)); };
    SpotPath out;
    out.sigma_x = [sx = path.sigma_x, finv, dilation](double s) {
        return sx(finv(s)) * std::sqrt(dilation(s));
    };
    out.sigma_y = [sy = path.sigma_y, finv, dilation](double s) {
        return sy(finv(s)) * std::sqrt(dilation(s));
    };
    out.rho = [r = path.rho, finv](double s) { return r(finv(s)); };
    out.holder_note = path.holder_note + " (quantile-transformed)";
    return out;
}

double true_integrated_covolatility(const SpotPath& path, int quad_points) {
    if (quad_points < 3) throw DegenerateInput("true_integrated_covolatility: quad_points >= 3");
    auto f = [&path](double t) { return path.rho(t) * path.sigma_x(t) * path.sigma_y(t); };
    return adaptive_simpson(f, 0.0, 1.0, 1e-12);
}

double true_integrated_volatility(const SpotPath& path, bool x_side) {
    auto f = [&path, x_side](double t) {
        const double s = x_side ? path.sigma_x(t) : path.sigma_y(t);
        return s * s;
    };
    return adaptive_simpson(f, 0.0, 1.0, 1e-12);
}

SpotPath parametric_design() {
    return SpotPath{[](double) { return 1.0; }, [](double) { return 1.0; },
                    [](double) { return 0.5; }, "constant"};
}

SpotPath timevarying_design() {
    return SpotPath{
        [](double t) { return 0.1 - 0.08 * std::sin(M_PI * t); },
        [](double t) { return 0.15 - 0.07 * std::sin(6.0 * M_PI * t / 7.0); },
        [](double t) { return 0.5 + 0.01 * std::sin(M_PI * t); },
        "smooth sinusoidal"};
}

}  // namespace specv
