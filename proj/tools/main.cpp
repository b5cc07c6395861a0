// pesinlab command-line front end.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pesinlab/config.hpp"
#include "pesinlab/experiment.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
};

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pesinlab::InvalidArgument("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw pesinlab::ConfigError("", std::string("malformed JSON: ") + e.what());
    }
}

int run_task(const std::string& task, const Overrides& o) {
    nlohmann::json doc = load_json(o.config_path);
    if (!doc.is_object()) throw pesinlab::ConfigError("", "config must be a JSON object");
    if (doc.contains("task") && doc["task"] != task)
        throw pesinlab::ConfigError("/task", "config is for task " + doc["task"].dump() + " but '" + task + "' was requested");
    doc["task"] = task;
    if (o.seed) doc["seed"] = *o.seed;
    if (o.workers) doc["workers"] = *o.workers;
    if (o.out) doc["out"] = *o.out;

    const auto config = pesinlab::parse_config(doc);
    const auto manifest = pesinlab::run_experiment(config);
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << config.out << "/manifest.json\n";
    for (const auto& f : manifest.outputs) std::cout << "  " << f.path << "  " << f.sha256 << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on Pesin's entropy formula for volume-preserving torus maps"};
    app.set_version_flag("--version", std::string(pesinlab::toolkit_version));
    app.require_subcommand(1);

    Overrides overrides;
    std::string selected;
    const std::vector<std::pair<std::string, std::string>> tasks{
        {"lyap", "Lyapunov spectra by QR iteration"},
        {"dominate", "search for a domination time N along an orbit window"},
        {"dichotomy", "classify the Oseledec splitting as trivial, dominated or neither"},
        {"bowen", "Bowen-ball measures and the local entropy slope"},
        {"graph", "dispersion of a graph pushed along a Bowen ball"},
        {"pesin", "Mane lower bound against the Ruelle upper bound"},
    };
    for (const auto& [name, help] : tasks) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", overrides.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", overrides.seed, "master seed (overrides the config)");
        sub->add_option("--workers", overrides.workers, "worker threads (default: PESINLAB_WORKERS or 1)")
            ->check(CLI::Range(1u, 1024u));
        sub->add_option("--out", overrides.out, "output directory (overrides the config)");
        sub->callback([&selected, name = name] { selected = name; });
    }

    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "flatten bowen/graph reports to two-column CSV");
    plot->add_option("--in", plot_dir, "report directory")->required();
    plot->callback([&selected] { selected = "plot"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (selected == "plot") {
            for (const auto& f : pesinlab::emit_plot_data(plot_dir)) std::cout << f.string() << "\n";
            return 0;
        }
        return run_task(selected, overrides);
    } catch (const pesinlab::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
