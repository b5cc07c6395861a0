#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/error.hpp"

namespace pesinlab {

enum class Task { Lyap, Dominate, Dichotomy, Bowen, Graph, Pesin };

std::string to_string(Task task);
std::optional<Task> parse_task(const std::string& name);

/// Validated experiment configuration. Only the fields of the selected task are read
/// from (and written back to) JSON; the others keep their defaults.
struct ExperimentConfig {
    nlohmann::json system;
    Task task = Task::Lyap;
    std::uint64_t seed = 0;
    std::string out = "runs/default";
    unsigned workers = 0;  // 0: PESINLAB_WORKERS or 1

    std::optional<std::vector<double>> point;  // explicit base point
    std::size_t points = 1;                    // Lebesgue sample size; 20 for pesin

    long n = 2000;          // lyap/dichotomy horizon, dominate splitting horizon, graph steps
    int qr_stride = 1;
    int n_max = 10;         // "N_max"
    long window = 10;
    int j = 1;              // dim F for dominate/graph
    double gap_threshold = 1e-2;
    long splitting_horizon = 40;

    double delta = 0.1;
    std::vector<double> deltas{0.05, 0.1, 0.2};
    long n_min_fit = 2;     // "n_range"[0]
    long n_max_fit = 6;     // "n_range"[1]
    std::string method = "grid";
    int resolution = 4096;
    std::size_t population = 2000;
    int mcmc_sweeps = 4;

    double c = 0.3;
    std::size_t samples = 200;

    long lyapunov_n = 2000;
    double tol = 0.1;

    bool operator==(const ExperimentConfig&) const = default;
};

struct FieldError {
    std::string path;
    std::string message;
};

/// Rejected configuration; carries one entry per offending field.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<FieldError> errors);
    ConfigError(const std::string& path, const std::string& message);
    const std::vector<FieldError>& errors() const noexcept { return errors_; }

private:
    std::vector<FieldError> errors_;
};

/// Parse and validate a JSON config. Unknown keys, wrong types and out-of-range values
/// are all reported (by JSON pointer path) in a single ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& doc);
inline ExperimentConfig parse_config(const char* text) { return parse_config(std::string(text)); }

nlohmann::json serialize_config(const ExperimentConfig& config);

}  // namespace pesinlab
