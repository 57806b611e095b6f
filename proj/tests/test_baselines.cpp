#include <doctest.h>

#include <cmath>
#include <numeric>

#include "specv/baselines.hpp"
#include "specv/simulate.hpp"

using namespace specv;

namespace {

ObservationSet from_series(std::vector<double> x, std::vector<double> y) {
    ObservationSet obs;
    const long n = static_cast<long>(x.size()) - 1;
    obs.meta.n = n;
    for (long i = 0; i <= n; ++i) obs.times.push_back(static_cast<double>(i) / n);
    obs.x = std::move(x);
    obs.y = std::move(y);
    return obs;
}

ObservationSet pure_noise(long n, const NoiseCovariance& H, std::uint64_t master,
                          std::uint64_t stream) {
    std::vector<double> zx(n + 1, 0.0), zy(n + 1, 0.0);
    return add_noise(std::move(zx), std::move(zy), H, Seed{master, stream});
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("realized covariance on hand-computed data") {
    const auto obs = from_series({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0});
    CHECK(realized_covariance(obs) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(subsampled_rc(obs, 1) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("blockwise realized covariance skips block-edge increments") {
    // n = 4, h_inv = 2: increments l = 2 and l = 4 cross or close a block.
    const auto obs = from_series({0.0, 1.0, 2.0, 4.0, 5.0}, {0.0, 1.0, 3.0, 4.0, 6.0});
    const BlockGeometry g(4, 2);
    // Kept increments l = 1 (1*1) and l = 3 (2*1).
    CHECK(blockwise_realized_covariance(obs, g) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(realized_covariance(obs) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("lag-m subsample averages: FFT path equals direct sums") {
    auto [x, y] = simulate_signal(parametric_design(), 500, SamplingScheme::equidistant(),
                                  Seed{61, 0});
    const auto obs = add_noise(std::move(x), std::move(y), NoiseCovariance{0.01, 0.01, 0.003},
                               Seed{61, 0});
    const auto all = subsampled_rc_all(obs, 120);
    REQUIRE(all.size() == 120);
    for (long m : {1L, 2L, 3L, 17L, 60L, 119L, 120L})
        CHECK(all[m - 1] == doctest::Approx(subsampled_rc(obs, m)).epsilon(1e-12));
    CHECK_THROWS_AS(subsampled_rc(obs, 0), BadLag);
    CHECK_THROWS_AS(subsampled_rc(obs, 501), BadLag);
}

TEST_CASE("multi-scale weights satisfy the bias-cancellation constraints") {
    for (long M : {2L, 5L, 50L, 693L}) {
        const auto cfg = MsrcConfig::standard(M);
        REQUIRE(cfg.weights.size() == static_cast<size_t>(M));
        CHECK_NOTHROW(cfg.validate());
        double s = 0.0, si = 0.0;
        for (long m = 1; m <= M; ++m) {
            s += cfg.weights[m - 1];
            si += cfg.weights[m - 1] / m;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(si) < 1e-10);
    }
    auto corrupt = MsrcConfig::standard(10);
    corrupt.weights[0] += 0.1;
    CHECK_THROWS_AS(corrupt.validate(), WeightConstraintViolation);
}

TEST_CASE("single-scale estimator degenerates to realized covariance") {
    const auto obs = from_series({0.0, 1.0, 3.0, 4.0}, {0.0, 2.0, 2.0, 5.0});
    const auto rep = msrc(obs, MsrcConfig::standard(1));
    CHECK(rep.value == doctest::Approx(realized_covariance(obs)).epsilon(1e-14));
    CHECK(rep.mode == "msrc");
    CHECK(std::isnan(rep.plugin_avar));
}

TEST_CASE("residual noise bias cancels on pure noise") {
    // The two weight constraints kill the O(n) and O(1) noise biases except
    // for a residual -2 eta_xy, which the correction term restores.
    const NoiseCovariance H{0.0001, 0.0001, 0.00005};
    const int reps = 200;
    const long n = 5000;
    double mean_known = 0.0, mean_est = 0.0;
    std::vector<double> vals(reps);
    for (int r = 0; r < reps; ++r) {
        const auto obs = pure_noise(n, H, 62, r);
        const auto cfg = MsrcConfig::standard(60);
        const double v = msrc(obs, cfg, &H).value;
        mean_known += v;
        mean_est += msrc(obs, cfg).value;  // lag-one estimated correction
        vals[r] = v;
    }
    mean_known /= reps;
    mean_est /= reps;
    double var = 0.0;
    for (double v : vals) var += (v - mean_known) * (v - mean_known);
    var /= reps - 1;
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean_known) < 4.0 * se);
    CHECK(std::abs(mean_est) < 5.0 * se);
}

TEST_CASE("scale grid is geometric, deduplicated and in range") {
    const auto grid = msrc_scale_grid(30000);
    REQUIRE(!grid.empty());
    CHECK(grid.front() == 44);   // ceil(0.25 sqrt(30000))
    CHECK(grid.back() == 693);   // ceil(4 sqrt(30000))
    for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    for (long m : grid) {
        CHECK(m >= 2);
        CHECK(m <= 30000);
    }
    // Small n: entries clamped into [2, n].
    for (long m : msrc_scale_grid(16)) {
        CHECK(m >= 2);
        CHECK(m <= 16);
    }
}

}  // TEST_SUITE
