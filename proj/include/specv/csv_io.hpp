#pragma once

#include <string>
#include <vector>

#include "specv/estimators.hpp"
#include "specv/spectral.hpp"

namespace specv {

/// Decimal serialization at 17 significant digits (round-trips doubles).
std::string format_double(double v);

/// Observation CSV: `# key=value` meta lines, then header `t,x,y` and one
/// row per time point.
void write_observations(const std::string& path, const ObservationSet& obs);
ObservationSet read_observations(const std::string& path);

/// One CSV row per report:
/// mode,value,plugin_avar,ci_lo,ci_hi,n,h_inv,J,r_inv,K,seed,noise_source
std::string report_header();
std::string report_row(const EstimateReport& rep);
void write_reports(const std::string& path, const std::vector<EstimateReport>& reports);

/// Coefficient dump: rows (k, j, x_coef, y_coef, norm_sq).
void write_coefficients(const std::string& path, const SpectralCoefficients& coeffs);

}  // namespace specv
