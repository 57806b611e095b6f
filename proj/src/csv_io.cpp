#include "specv/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace specv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, sep)) fields.push_back(f);
    return fields;
}

}  // namespace

void write_observations(const std::string& path, const ObservationSet& obs) {
    obs.validate();
    auto out = open_out(path);
    out << "# n=" << obs.meta.n << "\n";
    out << "# scheme=" << (obs.meta.scheme == SchemeKind::Equidistant ? "equidistant" : "quantile")
        << "\n";
    out << "# seed_master=" << obs.meta.seed.master << "\n";
    out << "# seed_stream=" << obs.meta.seed.stream << "\n";
    out << "# model_tag=" << obs.meta.model_tag << "\n";
    out << "# h_inv=" << obs.meta.h_inv << "\n";
    out << "t,x,y\n";
    for (size_t i = 0; i < obs.times.size(); ++i)
        out << format_double(obs.times[i]) << ',' << format_double(obs.x[i]) << ','
            << format_double(obs.y[i]) << "\n";
}

ObservationSet read_observations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path);
    ObservationSet obs;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            const std::string value = line.substr(eq + 1);
            if (key == "n") obs.meta.n = std::stol(value);
            else if (key == "scheme")
                obs.meta.scheme = value == "quantile" ? SchemeKind::Quantile : SchemeKind::Equidistant;
            else if (key == "seed_master") obs.meta.seed.master = std::stoull(value);
            else if (key == "seed_stream") obs.meta.seed.stream = std::stoull(value);
            else if (key == "model_tag") obs.meta.model_tag = value;
            else if (key == "h_inv") obs.meta.h_inv = std::stoi(value);
            continue;
        }
        if (!header_seen) {
            if (line != "t,x,y") throw Error("observation CSV: expected header t,x,y");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3) throw Error("observation CSV: malformed row: " + line);
        obs.times.push_back(std::stod(fields[0]));
        obs.x.push_back(std::stod(fields[1]));
        obs.y.push_back(std::stod(fields[2]));
    }
    if (obs.meta.n == 0 && !obs.times.empty()) obs.meta.n = static_cast<long>(obs.times.size()) - 1;
    obs.validate();
    return obs;
}

std::string report_header() {
    return "mode,value,plugin_avar,ci_lo,ci_hi,n,h_inv,J,r_inv,K,seed,noise_source";
}

std::string report_row(const EstimateReport& rep) {
    const auto& t = rep.tuning;
    std::ostringstream out;
    const int r_inv = t.r_over_h > 0 ? t.h_inv / t.r_over_h : 0;
    out << rep.mode << ',' << format_double(rep.value) << ',' << format_double(rep.plugin_avar)
        << ',' << format_double(rep.ci_lo) << ',' << format_double(rep.ci_hi) << ',' << t.n << ','
        << t.h_inv << ',' << t.J << ',' << r_inv << ',' << t.K << ',' << t.seed.master << ':'
        << t.seed.stream << ',' << to_string(t.noise_source);
    return out.str();
}

void write_reports(const std::string& path, const std::vector<EstimateReport>& reports) {
    auto out = open_out(path);
    out << report_header() << "\n";
    for (const auto& rep : reports) out << report_row(rep) << "\n";
}

void write_coefficients(const std::string& path, const SpectralCoefficients& coeffs) {
    auto out = open_out(path);
    out << "k,j,x_coef,y_coef,norm_sq\n";
    const auto& g = coeffs.geometry;
    for (int k = 0; k < g.h_inv; ++k)
        for (int j = 1; j <= g.J; ++j)
            out << k << ',' << j << ',' << format_double(coeffs.x(k, j)) << ','
                << format_double(coeffs.y(k, j)) << ',' << format_double(coeffs.norms_sq[j - 1])
                << "\n";
}

}  // namespace specv
