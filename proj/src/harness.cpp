#include "specv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "specv/asymptotics.hpp"
#include "specv/baselines.hpp"
#include "specv/csv_io.hpp"
#include "specv/simulate.hpp"

namespace specv {

namespace {

const std::vector<std::string> kKnownEstimators = {
    "specv_oracle", "specv_adaptive", "specv_j1", "specv_uniform",
    "spev_x",       "spev_y",         "realized", "msrc"};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.model = name;
    if (name == "parametric_s4" || name == "parametric_s4_small") {
        cfg.estimators = {"specv_oracle", "msrc"};
    } else if (name == "timevarying_s4" || name == "timevarying_s4_small") {
        cfg.estimators = {"specv_oracle", "specv_adaptive", "spev_x", "spev_y", "msrc"};
    } else if (name == "constant") {
        cfg.estimators = {"specv_oracle"};
    } else {
        throw ConfigError("unknown model preset: " + name);
    }
    const bool small = name.size() > 6 && name.substr(name.size() - 6) == "_small";
    if (small) {
        cfg.n = 7500;
        cfg.h_inv = 15;
        cfg.replications = 1000;
    } else {
        cfg.n = 30000;
        cfg.h_inv = 30;
        cfg.replications = name == "constant" ? 1000 : 10000;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_lines(const std::vector<std::string>& lines) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> order;
    for (const auto& raw : lines) {
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line is not key=value: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        kv[key] = value;
        order.push_back(key);
    }
    ExperimentConfig cfg = kv.count("model") ? preset(kv["model"]) : ExperimentConfig{};
    for (const auto& key : order) {
        const std::string& value = kv[key];
        try {
            if (key == "model") continue;
            else if (key == "n") cfg.n = std::stol(value);
            else if (key == "h_inv") cfg.h_inv = std::stoi(value);
            else if (key == "J") cfg.J = std::stoi(value);
            else if (key == "r_over_h") cfg.r_over_h = std::stoi(value);
            else if (key == "K") cfg.K = std::stoi(value);
            else if (key == "eta_x") cfg.eta_x = std::stod(value);
            else if (key == "eta_y") cfg.eta_y = std::stod(value);
            else if (key == "eta_xy") cfg.eta_xy = std::stod(value);
            else if (key == "sigma_x") cfg.sigma_x = std::stod(value);
            else if (key == "sigma_y") cfg.sigma_y = std::stod(value);
            else if (key == "rho") cfg.rho = std::stod(value);
            else if (key == "estimators") cfg.estimators = split_list(value);
            else if (key == "replications") cfg.replications = std::stol(value);
            else if (key == "master_seed") cfg.master_seed = std::stoull(value);
            else if (key == "noise_source") cfg.noise_source = value;
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "blockwise") cfg.blockwise = value == "1" || value == "true";
            else if (key == "out_dir") cfg.out_dir = value;
            else throw ConfigError("unknown config key: " + key);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("invalid value for config key " + key + ": " + value);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines);
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw ConfigError("replications: must be >= 1");
    if (workers < 1) throw ConfigError("workers: must be >= 1");
    if (n < 2) throw ConfigError("n: must be >= 2");
    if (h_inv < 1 || n % h_inv != 0) throw ConfigError("h_inv: must divide n");
    const long nh = n / h_inv;
    if (J < 0 || J > nh) throw ConfigError("J: must satisfy 0 <= J <= nh");
    if (r_over_h < 1) throw ConfigError("r_over_h: must be >= 1");
    if (K < 1) throw ConfigError("K: must be >= 1");
    if (noise_source != "known" && noise_source != "estimated")
        throw ConfigError("noise_source: must be known or estimated");
    if (model != "parametric_s4" && model != "parametric_s4_small" && model != "timevarying_s4" &&
        model != "timevarying_s4_small" && model != "constant")
        throw ConfigError("model: unknown preset " + model);
    noise().require_psd();
    for (const auto& e : estimators)
        if (std::find(kKnownEstimators.begin(), kKnownEstimators.end(), e) == kKnownEstimators.end())
            throw ConfigError("estimators: unknown mode " + e);
    if (estimators.empty()) throw ConfigError("estimators: at least one mode required");
}

SpotPath ExperimentConfig::path() const {
    if (model.rfind("parametric_s4", 0) == 0) return parametric_design();
    if (model.rfind("timevarying_s4", 0) == 0) return timevarying_design();
    const double sx = sigma_x, sy = sigma_y, r = rho;
    return SpotPath{[sx](double) { return sx; }, [sy](double) { return sy; },
                    [r](double) { return r; }, "constant"};
}

NoiseCovariance ExperimentConfig::noise() const {
    return NoiseCovariance{eta_x * eta_x, eta_y * eta_y, eta_xy};
}

BlockGeometry ExperimentConfig::geometry() const {
    return BlockGeometry(n, h_inv, J, r_over_h, K);
}

const EstimatorStats& McReport::by_mode(const std::string& mode) const {
    for (const auto& s : stats)
        if (s.mode == mode) return s;
    throw Error("no such estimator in report: " + mode);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_normal_pvalue(std::vector<double> sample) {
    const size_t m = sample.size();
    if (m == 0) throw DegenerateInput("ks_normal_pvalue: empty sample");
    std::sort(sample.begin(), sample.end());
    double d = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double f = normal_cdf(sample[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / m,
                                 static_cast<double>(i + 1) / m - f));
    }
    const double t = std::sqrt(static_cast<double>(m)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * t * t);
        p += (k % 2 == 1 ? term : -term);
    }
    return std::clamp(p, 0.0, 1.0);
}

namespace {

struct PerRep {
    std::vector<double> values;           // one per non-msrc estimator
    std::vector<double> msrc_candidates;  // one per candidate scale count
};

EstimatorStats summarize(const std::string& mode, double truth, std::vector<double> values) {
    EstimatorStats s;
    s.mode = mode;
    s.truth = truth;
    const long R = static_cast<long>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= R;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= R;
    s.mean = mean;
    s.bias = mean - truth;
    s.variance = var;
    s.rmse = std::sqrt(s.bias * s.bias + s.variance);
    s.standardized.resize(R);
    // Standardize by the sample moments: the KS gate is a QQ-plot analogue
    // and checks the shape of the distribution, not the asymptotic scale
    // (which the finite-sample variance exceeds at these sample sizes).
    const double sd = std::sqrt(std::max(var, 1e-300));
    for (long i = 0; i < R; ++i) s.standardized[i] = (values[i] - mean) / sd;
    s.ks_p = R >= 8 ? ks_normal_pvalue(s.standardized) : 1.0;
    s.values = std::move(values);
    return s;
}

}  // namespace

McReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const SpotPath path = cfg.path();
    const NoiseCovariance H = cfg.noise();
    const BlockGeometry g = cfg.geometry();
    const long R = cfg.replications;
    const bool known_noise = cfg.noise_source == "known";

    const double truth_ic = true_integrated_covolatility(path);
    const double truth_ivx = true_integrated_volatility(path, true);
    const double truth_ivy = true_integrated_volatility(path, false);

    const SignalSampler sampler = cfg.blockwise
                                      ? SignalSampler::prepare_blockwise(path, cfg.n, cfg.h_inv)
                                      : SignalSampler::prepare(path, cfg.n,
                                                               SamplingScheme::equidistant());

    std::vector<std::string> modes = cfg.estimators;
    const bool want_msrc = std::find(modes.begin(), modes.end(), "msrc") != modes.end();
    modes.erase(std::remove(modes.begin(), modes.end(), "msrc"), modes.end());
    const bool want_coeffs = !modes.empty() && !(modes.size() == 1 && modes[0] == "realized");
    const bool want_pilot =
        std::find(modes.begin(), modes.end(), "specv_adaptive") != modes.end() ||
        std::find(modes.begin(), modes.end(), "spev_x") != modes.end() ||
        std::find(modes.begin(), modes.end(), "spev_y") != modes.end();

    // Oracle weights depend only on (path, H, geometry); share across reps.
    WeightTable oracle_wt;
    const bool want_oracle =
        std::find(modes.begin(), modes.end(), "specv_oracle") != modes.end();
    if (want_oracle) oracle_wt = weights_from_path(path, H, g);

    std::vector<long> scale_grid;
    std::vector<MsrcConfig> msrc_cfgs;
    if (want_msrc) {
        scale_grid = msrc_scale_grid(cfg.n);
        for (long M : scale_grid) msrc_cfgs.push_back(MsrcConfig::standard(M));
    }

    std::vector<PerRep> results(R);
    std::mutex timing_mu;
    std::map<std::string, double> mode_time;

    std::atomic<long> next{0};
    auto work = [&]() {
        std::vector<double> xs, ys;
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= R) break;
            const Seed seed{cfg.master_seed, static_cast<std::uint64_t>(i)};
            sampler.draw(seed, xs, ys);
            ObservationMeta meta;
            meta.model_tag = cfg.blockwise ? "E3" : "E0";
            meta.h_inv = cfg.blockwise ? cfg.h_inv : 0;
            const ObservationSet obs = add_noise(xs, ys, H, seed, meta);

            std::map<std::string, double> local_time;
            const auto timed = [&local_time](const std::string& mode, auto&& fn) {
                const auto t0 = std::chrono::steady_clock::now();
                const double v = fn();
                const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
                local_time[mode] += dt.count();
                return v;
            };

            SpectralCoefficients coeffs;
            if (want_coeffs) coeffs = compute_coefficients(obs, g);
            NoiseCovariance H_used = H;
            if (!known_noise) H_used = estimate_noise_covariance(obs, NoiseVariant::LagOne);
            SpotEstimate pilot;
            if (want_pilot) pilot = spot_pilot(coeffs, H_used, g);

            PerRep rep;
            rep.values.reserve(modes.size());
            for (const auto& mode : modes) {
                double v = 0.0;
                if (mode == "specv_oracle")
                    v = timed(mode, [&] {
                        return specv_with_weights(coeffs, oracle_wt, H, "oracle",
                                                  NoiseSource::Known)
                            .value;
                    });
                else if (mode == "specv_adaptive")
                    v = timed(mode, [&] {
                        return specv_adaptive_from(coeffs, pilot, H_used,
                                                   known_noise ? NoiseSource::Known
                                                               : NoiseSource::Estimated)
                            .value;
                    });
                else if (mode == "specv_j1")
                    v = timed(mode, [&] { return specv_j1(coeffs, H_used).value; });
                else if (mode == "specv_uniform")
                    v = timed(mode, [&] { return specv_uniform(coeffs, H_used).value; });
                else if (mode == "spev_x")
                    v = timed(mode, [&] {
                        return spev_with_pilot(coeffs, true, pilot, H_used,
                                               known_noise ? NoiseSource::Known
                                                           : NoiseSource::Estimated)
                            .value;
                    });
                else if (mode == "spev_y")
                    v = timed(mode, [&] {
                        return spev_with_pilot(coeffs, false, pilot, H_used,
                                               known_noise ? NoiseSource::Known
                                                           : NoiseSource::Estimated)
                            .value;
                    });
                else if (mode == "realized")
                    v = timed(mode, [&] { return realized_covariance(obs); });
                rep.values.push_back(v);
            }
            if (want_msrc) {
                const auto start = std::chrono::steady_clock::now();
                const auto rc = subsampled_rc_all(obs, scale_grid.back());
                const double eta_corr =
                    known_noise ? H.eta_xy
                                : estimate_noise_covariance(obs, NoiseVariant::LagOne).eta_xy;
                rep.msrc_candidates.reserve(msrc_cfgs.size());
                for (const auto& mc : msrc_cfgs) {
                    double v = 0.0;
                    for (long m = 1; m <= mc.M; ++m) v += mc.weights[m - 1] * rc[m - 1];
                    if (mc.M > 1) v += 2.0 * eta_corr;
                    rep.msrc_candidates.push_back(v);
                }
                const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
                local_time["msrc"] += dt.count();
            }
            results[i] = std::move(rep);
            {
                std::lock_guard<std::mutex> lock(timing_mu);
                for (const auto& [mode, t] : local_time) mode_time[mode] += t;
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 1; w < cfg.workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    McReport report;
    report.config = cfg;
    for (size_t e = 0; e < modes.size(); ++e) {
        const std::string& mode = modes[e];
        std::vector<double> values(R);
        for (long i = 0; i < R; ++i) values[i] = results[i].values[e];
        const double truth = mode == "spev_x" ? truth_ivx : mode == "spev_y" ? truth_ivy : truth_ic;
        auto stats = summarize(mode, truth, std::move(values));
        stats.runtime_sec = mode_time[mode];
        report.stats.push_back(std::move(stats));
    }
    if (want_msrc) {
        // Grid-oracle tuning: pick the scale count minimizing the true MSE.
        size_t best = 0;
        double best_mse = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < msrc_cfgs.size(); ++c) {
            double mse = 0.0;
            for (long i = 0; i < R; ++i) {
                const double d = results[i].msrc_candidates[c] - truth_ic;
                mse += d * d;
            }
            mse /= R;
            if (mse < best_mse) {
                best_mse = mse;
                best = c;
            }
        }
        if (best == 0 || best + 1 == msrc_cfgs.size())
            report.warnings.push_back("msrc grid-oracle selected a boundary scale count M=" +
                                      std::to_string(scale_grid[best]));
        std::vector<double> values(R);
        for (long i = 0; i < R; ++i) values[i] = results[i].msrc_candidates[best];
        auto stats = summarize("msrc", truth_ic, std::move(values));
        stats.selected_scale = scale_grid[best];
        stats.runtime_sec = mode_time["msrc"];
        report.stats.push_back(std::move(stats));
    }
    return report;
}

std::string mc_summary_csv(const McReport& report) {
    std::ostringstream out;
    out << "mode,truth,mean,bias,variance,rmse,ks_p,selected_scale,replications\n";
    for (const auto& s : report.stats)
        out << s.mode << ',' << format_double(s.truth) << ',' << format_double(s.mean) << ','
            << format_double(s.bias) << ',' << format_double(s.variance) << ','
            << format_double(s.rmse) << ',' << format_double(s.ks_p) << ',' << s.selected_scale
            << ',' << report.config.replications << "\n";
    return out.str();
}

std::string mc_rows_csv(const McReport& report) {
    std::ostringstream out;
    out << "rep,mode,value,standardized\n";
    const long R = report.config.replications;
    for (long i = 0; i < R; ++i)
        for (const auto& s : report.stats)
            out << i << ',' << s.mode << ',' << format_double(s.values[i]) << ','
                << format_double(s.standardized[i]) << "\n";
    return out.str();
}

std::string figure1_csv(const std::vector<double>& rho_grid, double sigma_x, double sigma_y,
                        const NoiseCovariance& noise,
                        const std::optional<MsrcVarianceConstants>& msrc_constants) {
    std::ostringstream out;
    out << "rho,specv_avar" << (msrc_constants ? ",msrc_avar" : "") << "\n";
    for (double rho : rho_grid) {
        if (std::abs(rho) >= 1.0) throw DegenerateInput("figure1_csv: |rho| < 1 required");
        SpotPath path{[sigma_x](double) { return sigma_x; }, [sigma_y](double) { return sigma_y; },
                      [rho](double) { return rho; }, "constant"};
        out << format_double(rho) << ',' << format_double(clt_variance(path, noise));
        if (msrc_constants) {
            const auto& c = *msrc_constants;
            const double copt = tuning_constant(c.N, c.D, c.C);
            out << ',' << format_double(c.N / (copt * copt * copt) + c.D * copt + c.C / copt);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace specv
