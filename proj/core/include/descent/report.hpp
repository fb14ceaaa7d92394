#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "descent/experiment.hpp"
#include "descent/spectrum.hpp"

namespace descent {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

// Flat key=value text, one field per line. Lines starting with '#' and blank
// lines are ignored. Keys: case_id, epsilon, generator_kind, N, n_max, r_z,
// replicates, base_seed, estimator, lambda, alpha_mode.
std::string serialize_config(const ExperimentConfig& cfg);

// Starts from the A-D preset when case_id names one, otherwise from the
// defaults, then applies every key in the text. `present` (optional)
// receives the keys that appeared. Throws std::invalid_argument on unknown
// keys or malformed values.
ExperimentConfig parse_config(std::string_view text, std::set<std::string>* present = nullptr);

inline constexpr std::string_view kCaseCsvHeader =
    "case,family,order,nmse_noisy_mean,nmse_noisefree_mean,inv_sigma_min,theta_star_norm";
inline constexpr std::string_view kDiagnosticsCsvHeader =
    "case,family,order,nmse_noisy_median,failure";
inline constexpr std::string_view kSpectrumCsvHeader =
    "family,order,sigma_min,inv_sigma_min,theta_star_norm,is_peak";

// One row per (family, order); linear rows first. LF line endings.
std::string case_csv(const CaseResult& result);
// Extra diagnostics outside the main schema: median noisy NMSE and per-order failure messages.
std::string diagnostics_csv(const CaseResult& result);
std::string spectrum_csv(const SpectrumSweep& sweep, OrderingKind family);

// Inverse of case_csv. Restores case_id and every CSV column; other fields
// keep their defaults.
CaseResult parse_case_csv(std::string_view text);

// RFC 4180 field splitting of a single record (no embedded newlines).
std::vector<std::string> split_csv_record(std::string_view line);

// Static SVG line chart of noisy and noise-free mean NMSE against model
// order on a log scale.
std::string nmse_svg(const CaseResult& result, OrderingKind family);
// 1/sigma_min against model order on a log scale.
std::string spectrum_svg(const SpectrumSweep& sweep, OrderingKind family, std::size_t N);

struct RunManifest {
  ExperimentConfig config;
  std::string tool_version;
  std::string timestamp;
  std::vector<std::string> outputs;
};

// Comment lines with metadata followed by the config echo, so the manifest
// is itself a loadable config file.
std::string manifest_text(const RunManifest& manifest);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace descent
