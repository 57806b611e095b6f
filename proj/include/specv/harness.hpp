#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specv/estimators.hpp"

namespace specv {

/// Flat key=value experiment configuration. Unknown keys are rejected.
/// Recognized keys (see README for the schema): model, n, h_inv, J,
/// r_over_h, K, eta_x, eta_y, eta_xy, sigma_x, sigma_y, rho, estimators,
/// replications, master_seed, noise_source, workers, blockwise, out_dir.
struct ExperimentConfig {
    std::string model = "parametric_s4";  // parametric_s4 | timevarying_s4 | constant
    long n = 30000;
    int h_inv = 30;
    int J = 0;  // 0 selects the default cutoff J = nh
    int r_over_h = 3;
    int K = 5;
    double eta_x = 0.1;   // noise standard deviations
    double eta_y = 0.1;
    double eta_xy = 0.0;  // noise covariance
    double sigma_x = 1.0;  // used only by model=constant
    double sigma_y = 1.0;
    double rho = 0.5;
    std::vector<std::string> estimators = {"specv_oracle", "msrc"};
    long replications = 1000;
    std::uint64_t master_seed = 1;
    std::string noise_source = "known";  // known | estimated
    int workers = 1;
    bool blockwise = false;  // blockwise-constant volatility simulation
    std::string out_dir = ".";

    /// Named presets; `_small` variants use n=7500 and 1000 replications.
    static ExperimentConfig preset(const std::string& name);
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_lines(const std::vector<std::string>& lines);

    void validate() const;  // throws ConfigError with the offending field
    SpotPath path() const;
    NoiseCovariance noise() const;
    BlockGeometry geometry() const;
};

struct EstimatorStats {
    std::string mode;
    double truth = 0.0;
    double mean = 0.0;
    double bias = 0.0;
    double variance = 0.0;
    double rmse = 0.0;                 // rmse^2 = bias^2 + variance exactly
    double ks_p = 0.0;                 // KS p-value of the standardized values
                                       // (sample mean/sd; a QQ-plot shape check)
    double runtime_sec = 0.0;          // wall time, excluded from CSV output
    long selected_scale = 0;           // msrc only: grid-oracle M
    std::vector<double> values;        // one per replication
    std::vector<double> standardized;  // values standardized for the KS check
};

struct McReport {
    ExperimentConfig config;
    std::vector<EstimatorStats> stats;
    std::vector<std::string> warnings;

    const EstimatorStats& by_mode(const std::string& mode) const;
};

/// Runs the Monte Carlo experiment: per-replication seeds are derived up
/// front and results aggregated in replication order, so the report does not
/// depend on the worker count.
McReport run_experiment(const ExperimentConfig& cfg);

/// Canonical CSV serializations. Runtime is deliberately not serialized so
/// that output is byte-identical across worker counts.
std::string mc_summary_csv(const McReport& report);
std::string mc_rows_csv(const McReport& report);

/// Asymptotic-variance curve over a correlation grid: rows
/// (rho, specv_avar[, msrc_avar]); the msrc column appears only when the
/// variance constants (N, D, C) are supplied.
struct MsrcVarianceConstants {
    double N = 0.0, D = 0.0, C = 0.0;
};
std::string figure1_csv(const std::vector<double>& rho_grid, double sigma_x, double sigma_y,
                        const NoiseCovariance& noise,
                        const std::optional<MsrcVarianceConstants>& msrc_constants = std::nullopt);

/// Two-sided Kolmogorov-Smirnov test of a sample against N(0,1);
/// returns the asymptotic p-value.
double ks_normal_pvalue(std::vector<double> sample);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace specv
