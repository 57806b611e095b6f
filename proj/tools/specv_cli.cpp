#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "specv/asymptotics.hpp"
#include "specv/baselines.hpp"
#include "specv/csv_io.hpp"
#include "specv/harness.hpp"
#include "specv/simulate.hpp"

namespace {

using namespace specv;

ObservationSet simulate_from_config(const ExperimentConfig& cfg, std::uint64_t stream) {
    const Seed seed{cfg.master_seed, stream};
    auto [x, y] = cfg.blockwise
                      ? simulate_signal_blockwise(cfg.path(), cfg.n, cfg.h_inv, seed)
                      : simulate_signal(cfg.path(), cfg.n, SamplingScheme::equidistant(), seed);
    ObservationMeta meta;
    meta.model_tag = cfg.blockwise ? "E3" : "E0";
    meta.h_inv = cfg.blockwise ? cfg.h_inv : 0;
    return add_noise(std::move(x), std::move(y), cfg.noise(), seed, meta);
}

int cmd_check() {
    bool ok = true;
    auto gate = [&ok](const std::string& name, double residual, double tol) {
        const bool pass = residual < tol;
        ok = ok && pass;
        std::cout << name << ": max residual " << residual << " (tolerance " << tol << ") "
                  << (pass ? "ok" : "FAIL") << "\n";
    };

    // Discrete orthogonality of the cosine/sine systems. The corner j = r =
    // nh is excluded: both basis systems vanish identically on their
    // evaluation grids at the top frequency, so the discrete products are 0.
    double worst_o1 = 0.0, worst_o2 = 0.0;
    for (long nh : {4L, 16L, 100L}) {
        const long n = nh;  // single block, h = 1
        std::vector<std::vector<double>> phi_mid(nh + 1), Phi_grid(nh + 1);
        for (long j = 1; j <= nh; ++j) {
            phi_mid[j].resize(n);
            Phi_grid[j].resize(n);
            for (long l = 1; l <= n; ++l) {
                phi_mid[j][l - 1] = phi(static_cast<int>(j), 0, 1, (l - 0.5) / n);
                Phi_grid[j][l - 1] =
                    phi_antiderivative(static_cast<int>(j), 0, 1, n, static_cast<double>(l) / n);
            }
        }
        for (long j = 1; j <= nh; ++j)
            for (long r = j; r <= nh; ++r) {
                double s1 = 0.0, s2 = 0.0;
                for (long l = 0; l < n; ++l) {
                    s1 += phi_mid[j][l] * phi_mid[r][l];
                    s2 += Phi_grid[j][l] * Phi_grid[r][l];
                }
                s1 /= n;
                s2 /= n;
                if (j == nh && r == nh) {
                    worst_o1 = std::max(worst_o1, std::abs(s1));
                    worst_o2 = std::max(worst_o2, std::abs(s2));
                    continue;
                }
                const double d = j == r ? 1.0 : 0.0;
                worst_o1 = std::max(worst_o1, std::abs(s1 - d));
                worst_o2 = std::max(worst_o2,
                                    std::abs(s2 - d * empirical_norm_sq(static_cast<int>(j), n, 1)) /
                                        empirical_norm_sq(static_cast<int>(j), n, 1));
            }
    }
    gate("orthogonality o1", worst_o1, 1e-10);
    gate("orthogonality o2 (relative)", worst_o2, 1e-10);

    // Summation by parts on random data.
    {
        ExperimentConfig cfg = ExperimentConfig::preset("constant");
        cfg.n = 240;
        cfg.h_inv = 4;
        double worst = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            cfg.master_seed = 100 + rep;
            const auto obs = simulate_from_config(cfg, 0);
            const BlockGeometry g = cfg.geometry();
            double scale = 0.0;
            for (double v : obs.y) scale = std::max(scale, std::abs(v));
            for (int j : {1, 2, static_cast<int>(g.nh)})
                for (int k : {0, g.h_inv - 1})
                    worst = std::max(worst, sbp_residual(obs, g, j, k) / scale);
        }
        gate("summation by parts (relative)", worst, 1e-10);
    }

    // Parseval: uniform weights, no noise, J = nh equals the realized
    // covariance over within-block increments.
    {
        ExperimentConfig cfg = ExperimentConfig::preset("constant");
        cfg.n = 600;
        cfg.h_inv = 6;
        cfg.eta_x = cfg.eta_y = cfg.eta_xy = 0.0;
        double worst = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            cfg.master_seed = 300 + rep;
            const auto obs = simulate_from_config(cfg, 0);
            const auto coeffs = compute_coefficients(obs, cfg.geometry());
            const double lhs = specv_uniform(coeffs, cfg.noise()).value;
            const double rhs = blockwise_realized_covariance(obs, cfg.geometry());
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        }
        gate("parseval reduction (relative)", worst, 1e-10);
    }

    // Reciprocity of the local CLT variance and the quartic integral.
    {
        double worst = 0.0;
        for (double sx : {0.5, 1.0, 2.0})
            for (double rho : {-0.5, 0.0, 0.5}) {
                const NoiseCovariance H{0.01, 0.02, 0.005};
                const double v = local_variance(sx, 1.3, rho, H);
                const auto terms = VarianceTerms::from(sx, 1.3, rho, H);
                worst = std::max(worst, std::abs(v * integral_f1_closed(terms.A, terms.B) - 1.0));
            }
        gate("reciprocity", worst, 1e-10);
    }

    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral covolatility estimation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, in_path, mode = "specv_adaptive";
    std::uint64_t seed = 1, stream = 0;

    auto* sim = app.add_subcommand("simulate", "simulate a noisy observation set and emit CSV");
    sim->add_option("--config", config_path, "experiment config file");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--stream", stream, "replication stream index");
    sim->add_option("--out", out_path, "output CSV path")->required();

    auto* est = app.add_subcommand("estimate", "estimate from an observation CSV");
    est->add_option("--in", in_path, "observation CSV (from `simulate`)")->required();
    est->add_option("--config", config_path, "experiment config file (geometry and noise)");
    est->add_option("--mode", mode,
                    "estimator: specv_oracle|specv_adaptive|specv_j1|spev_x|spev_y|realized|msrc");
    est->add_option("--out", out_path, "output CSV path (default stdout)");

    auto* mc = app.add_subcommand("mc", "run a Monte Carlo experiment from a config file");
    mc->add_option("--config", config_path, "experiment config file")->required();
    std::string mc_out;
    int workers = 0;
    mc->add_option("--out", mc_out, "output directory (overrides out_dir)");
    mc->add_option("--workers", workers, "worker threads (overrides config)");
    mc->add_option("--seed", seed, "master seed override");

    auto* avar = app.add_subcommand("avar", "emit asymptotic-variance curves over a rho grid");
    double rho_min = -0.9, rho_max = 0.9, sx = 1.0, sy = 1.0, ex = 0.1, ey = 0.1, exy = 0.0;
    int steps = 19;
    avar->add_option("--rho-min", rho_min);
    avar->add_option("--rho-max", rho_max);
    avar->add_option("--steps", steps);
    avar->add_option("--sigma-x", sx);
    avar->add_option("--sigma-y", sy);
    avar->add_option("--eta-x", ex, "noise std of X");
    avar->add_option("--eta-y", ey, "noise std of Y");
    avar->add_option("--eta-xy", exy, "noise covariance");
    double mN = 0.0, mD = 0.0, mC = 0.0;
    auto* optN = avar->add_option("--msrc-n", mN, "MSRC variance constant N");
    avar->add_option("--msrc-d", mD, "MSRC variance constant D");
    avar->add_option("--msrc-c", mC, "MSRC variance constant C");
    avar->add_option("--out", out_path, "output CSV path (default stdout)");

    app.add_subcommand("check", "run the exact-identity probes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            ExperimentConfig cfg = config_path.empty() ? ExperimentConfig::preset("parametric_s4")
                                                       : ExperimentConfig::from_file(config_path);
            if (sim->count("--seed")) cfg.master_seed = seed;
            write_observations(out_path, simulate_from_config(cfg, stream));
            return 0;
        }
        if (est->parsed()) {
            ExperimentConfig cfg = config_path.empty() ? ExperimentConfig::preset("parametric_s4")
                                                       : ExperimentConfig::from_file(config_path);
            const auto obs = read_observations(in_path);
            cfg.n = obs.n();
            if (cfg.n % cfg.h_inv != 0) cfg.h_inv = BlockGeometry::default_h_inv(cfg.n);
            const BlockGeometry g = cfg.geometry();
            const NoiseSpec spec = cfg.noise_source == "known" ? NoiseSpec::known_h(cfg.noise())
                                                               : NoiseSpec::estimated();
            EstimateReport rep;
            if (mode == "specv_oracle") {
                rep = specv_oracle(compute_coefficients(obs, g), cfg.path(), cfg.noise());
            } else if (mode == "specv_adaptive") {
                rep = specv_adaptive(obs, g, spec);
            } else if (mode == "specv_j1") {
                rep = specv_j1(compute_coefficients(obs, g),
                               spec.source == NoiseSource::Known
                                   ? spec.known
                                   : estimate_noise_covariance(obs, spec.variant));
            } else if (mode == "spev_x" || mode == "spev_y") {
                rep = spev_adaptive(obs, g, mode == "spev_x", spec);
            } else if (mode == "realized") {
                rep.mode = "realized";
                rep.value = realized_covariance(obs);
                rep.plugin_avar = rep.ci_lo = rep.ci_hi = std::nan("");
                rep.tuning.n = obs.n();
            } else if (mode == "msrc") {
                const auto grid = msrc_scale_grid(obs.n());
                const long M = grid[grid.size() / 2];
                rep = msrc(obs, MsrcConfig::standard(M),
                           spec.source == NoiseSource::Known ? &spec.known : nullptr);
            } else {
                throw ConfigError("unknown estimator mode: " + mode);
            }
            rep.tuning.seed = obs.meta.seed;
            if (out_path.empty())
                std::cout << report_header() << "\n" << report_row(rep) << "\n";
            else
                write_reports(out_path, {rep});
            return 0;
        }
        if (mc->parsed()) {
            ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
            if (workers > 0) cfg.workers = workers;
            if (mc->count("--seed")) cfg.master_seed = seed;
            if (!mc_out.empty()) cfg.out_dir = mc_out;
            std::filesystem::create_directories(cfg.out_dir);
            const McReport report = run_experiment(cfg);
            {
                std::ofstream s(cfg.out_dir + "/mc_summary.csv");
                s << mc_summary_csv(report);
                std::ofstream r(cfg.out_dir + "/mc_rows.csv");
                r << mc_rows_csv(report);
            }
            std::cout << mc_summary_csv(report);
            for (const auto& s : report.stats)
                std::cerr << "runtime[" << s.mode << "] = " << s.runtime_sec << " s\n";
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
            return 0;
        }
        if (avar->parsed()) {
            std::vector<double> grid;
            for (int i = 0; i < steps; ++i)
                grid.push_back(steps == 1 ? rho_min
                                          : rho_min + (rho_max - rho_min) * i / (steps - 1));
            std::optional<MsrcVarianceConstants> mcc;
            if (optN->count()) mcc = MsrcVarianceConstants{mN, mD, mC};
            const NoiseCovariance H{ex * ex, ey * ey, exy};
            const std::string csv = figure1_csv(grid, sx, sy, H, mcc);
            if (out_path.empty())
                std::cout << csv;
            else {
                std::ofstream out(out_path);
                out << csv;
            }
            return 0;
        }
        return cmd_check();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
