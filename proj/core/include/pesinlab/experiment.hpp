#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/config.hpp"

namespace pesinlab {

inline constexpr const char* toolkit_version = "0.1.0";

struct OutputFile {
    std::string path;    // relative to the output directory
    std::string sha256;  // hex digest of the file contents
};

struct RunManifest {
    nlohmann::json config;
    std::string version;
    double duration_seconds = 0.0;
    std::vector<OutputFile> outputs;
    std::vector<std::string> warnings;  // Inconclusive / Indeterminate / uncertified outcomes
    std::string error;                  // set when the task failed; the manifest is still written

    bool has_warning() const { return !warnings.empty(); }
};

void to_json(nlohmann::json& j, const RunManifest& m);

/// Hex SHA-256 of a file's contents.
std::string file_sha256(const std::filesystem::path& file);

/// Run one task, write its artifacts plus manifest.json into config.out, and return the
/// manifest. Artifacts depend only on (config, seed, version), never on the worker count.
/// A failing task still leaves a manifest (with `error` set) before the exception propagates.
RunManifest run_experiment(const ExperimentConfig& config);

/// Flatten bowen_estimate.json into bowen_plot.csv (n, -log measure) and
/// graph_report.json into graph_plot.csv (step, dispersion). Returns the written files.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& report_dir);

}  // namespace pesinlab
