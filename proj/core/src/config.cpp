#include "pesinlab/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "pesinlab/systems.hpp"

namespace pesinlab {

namespace {

using nlohmann::json;

const std::set<std::string>& task_keys(Task task) {
    static const std::set<std::string> lyap{"n", "qr_stride", "points", "point"};
    static const std::set<std::string> dominate{"n", "N_max", "window", "j", "point"};
    static const std::set<std::string> dichotomy{"n", "N_max", "window", "gap_threshold", "splitting_horizon", "points", "point"};
    static const std::set<std::string> bowen{"delta", "n_range", "method", "resolution", "population", "mcmc_sweeps", "point"};
    static const std::set<std::string> graph{"delta", "c", "n", "samples", "j", "splitting_horizon", "point"};
    static const std::set<std::string> pesin{"deltas", "n_range", "method", "resolution", "population", "mcmc_sweeps",
                                             "points", "lyapunov_n", "gap_threshold", "tol"};
    switch (task) {
        case Task::Lyap: return lyap;
        case Task::Dominate: return dominate;
        case Task::Dichotomy: return dichotomy;
        case Task::Bowen: return bowen;
        case Task::Graph: return graph;
        case Task::Pesin: return pesin;
    }
    return lyap;
}

class Reader {
public:
    Reader(const json& doc, std::vector<FieldError>& errors) : doc_(doc), errors_(errors) {}

    bool has(const char* key) const { return doc_.contains(key); }

    void fail(const std::string& key, const std::string& message) { errors_.push_back({"/" + key, message}); }

    template <class Int>
    void integer(const char* key, Int& target, long long lo, long long hi) {
        if (!has(key)) return;
        const json& v = doc_[key];
        if (!v.is_number_integer()) return fail(key, "must be an integer");
        const long long x = v.is_number_unsigned() && v.get<unsigned long long>() > static_cast<unsigned long long>(std::numeric_limits<long long>::max())
                                ? std::numeric_limits<long long>::max()
                                : v.get<long long>();
        if (x < lo || x > hi)
            return fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        target = static_cast<Int>(x);
    }

    void real(const char* key, double& target, double lo, double hi, bool open_lo, bool open_hi) {
        if (!has(key)) return;
        const json& v = doc_[key];
        if (!v.is_number()) return fail(key, "must be a number");
        const double x = v.get<double>();
        if (!in_range(x, lo, hi, open_lo, open_hi)) return fail(key, "must be in " + range_text(lo, hi, open_lo, open_hi));
        target = x;
    }

    static bool in_range(double x, double lo, double hi, bool open_lo, bool open_hi) {
        if (!std::isfinite(x)) return false;
        if (open_lo ? !(x > lo) : !(x >= lo)) return false;
        if (open_hi ? !(x < hi) : !(x <= hi)) return false;
        return true;
    }

    static std::string range_text(double lo, double hi, bool open_lo, bool open_hi) {
        auto fmt = [](double v) {
            if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
            json j = v;
            return j.dump();
        };
        return std::string(open_lo ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + (open_hi ? ")" : "]");
    }

    const json& doc() const { return doc_; }

private:
    const json& doc_;
    std::vector<FieldError>& errors_;
};

std::string join_errors(const std::vector<FieldError>& errors) {
    std::string out = "invalid config:";
    for (const auto& e : errors) out += "\n  " + (e.path.empty() ? std::string("/") : e.path) + ": " + e.message;
    return out;
}

}  // namespace

std::string to_string(Task task) {
    switch (task) {
        case Task::Lyap: return "lyap";
        case Task::Dominate: return "dominate";
        case Task::Dichotomy: return "dichotomy";
        case Task::Bowen: return "bowen";
        case Task::Graph: return "graph";
        case Task::Pesin: return "pesin";
    }
    return "lyap";
}

std::optional<Task> parse_task(const std::string& name) {
    for (Task t : {Task::Lyap, Task::Dominate, Task::Dichotomy, Task::Bowen, Task::Graph, Task::Pesin}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

ConfigError::ConfigError(std::vector<FieldError> errors) : InvalidArgument(join_errors(errors)), errors_(std::move(errors)) {}

ConfigError::ConfigError(const std::string& path, const std::string& message)
    : ConfigError(std::vector<FieldError>{{path, message}}) {}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig parse_config(const json& doc) {
    std::vector<FieldError> errors;
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

    ExperimentConfig cfg;
    if (!doc.contains("task") || !doc["task"].is_string()) {
        throw ConfigError("/task", "required string field (lyap, dominate, dichotomy, bowen, graph, pesin)");
    }
    const auto task = parse_task(doc["task"].get<std::string>());
    if (!task) throw ConfigError("/task", "unknown task '" + doc["task"].get<std::string>() + "'");
    cfg.task = *task;
    if (cfg.task == Task::Dominate) cfg.n = 50;
    if (cfg.task == Task::Graph) cfg.n = 10;
    if (cfg.task == Task::Pesin) cfg.points = 20;

    static const std::set<std::string> common{"system", "task", "seed", "out", "workers"};
    const auto& allowed = task_keys(cfg.task);
    for (const auto& [key, _] : doc.items()) {
        if (!common.contains(key) && !allowed.contains(key))
            errors.push_back({"/" + key, "unknown field for task '" + to_string(cfg.task) + "'"});
    }

    Reader r(doc, errors);
    int dimension = 0;
    if (!doc.contains("system")) {
        r.fail("system", "required");
    } else {
        try {
            dimension = make_system(doc["system"]).dimension();
            cfg.system = doc["system"];
        } catch (const Error& e) {
            r.fail("system", e.what());
        }
    }

    r.integer("seed", cfg.seed, 0, std::numeric_limits<long long>::max());
    if (doc.contains("out")) {
        if (!doc["out"].is_string() || doc["out"].get<std::string>().empty())
            r.fail("out", "must be a non-empty string");
        else
            cfg.out = doc["out"].get<std::string>();
    }
    r.integer("workers", cfg.workers, 1, 1024);

    switch (cfg.task) {
        case Task::Lyap: r.integer("n", cfg.n, 100, 100'000'000); break;
        case Task::Dichotomy: r.integer("n", cfg.n, 500, 100'000'000); break;
        case Task::Dominate: r.integer("n", cfg.n, 1, 500); break;
        case Task::Graph: r.integer("n", cfg.n, 0, 1000); break;
        default: break;
    }
    r.integer("qr_stride", cfg.qr_stride, 1, 10);
    r.integer("points", cfg.points, 1, 1'000'000);
    r.integer("N_max", cfg.n_max, 1, 1000);
    r.integer("window", cfg.window, 0, 10'000);
    r.integer("j", cfg.j, 1, 64);
    r.real("gap_threshold", cfg.gap_threshold, 0.0, 1e3, true, false);
    r.integer("splitting_horizon", cfg.splitting_horizon, 1, 500);
    r.real("delta", cfg.delta, 0.0, 0.5, true, true);
    r.integer("resolution", cfg.resolution, 2, 65536);
    r.integer("population", cfg.population, 10, 10'000'000);
    r.integer("mcmc_sweeps", cfg.mcmc_sweeps, 0, 1000);
    r.real("c", cfg.c, 0.0, 1e6, true, false);
    r.integer("samples", cfg.samples, 2, 5000);
    r.integer("lyapunov_n", cfg.lyapunov_n, 100, 100'000'000);
    r.real("tol", cfg.tol, 0.0, 1e3, true, false);

    if (doc.contains("method")) {
        const json& m = doc["method"];
        if (!m.is_string() || (m != "grid" && m != "nested_mc"))
            r.fail("method", "must be \"grid\" or \"nested_mc\"");
        else
            cfg.method = m.get<std::string>();
    }
    if (doc.contains("n_range")) {
        const json& nr = doc["n_range"];
        if (!nr.is_array() || nr.size() != 2 || !nr[0].is_number_integer() || !nr[1].is_number_integer()) {
            r.fail("n_range", "must be an array of two integers");
        } else {
            const long a = nr[0].get<long>();
            const long b = nr[1].get<long>();
            if (a < 0 || b - a < 3 || b > 100'000)
                r.fail("n_range", "needs 0 <= n_min, n_max - n_min >= 3 and n_max <= 100000");
            else {
                cfg.n_min_fit = a;
                cfg.n_max_fit = b;
            }
        }
    }
    if (doc.contains("deltas")) {
        const json& ds = doc["deltas"];
        if (!ds.is_array() || ds.empty()) {
            r.fail("deltas", "must be a non-empty array of numbers");
        } else {
            std::vector<double> values;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                if (!ds[i].is_number() || !Reader::in_range(ds[i].get<double>(), 0.0, 0.5, true, true))
                    errors.push_back({"/deltas/" + std::to_string(i), "must be a number in (0, 0.5)"});
                else
                    values.push_back(ds[i].get<double>());
            }
            if (values.size() == ds.size()) cfg.deltas = values;
        }
    }
    if (doc.contains("point")) {
        const json& p = doc["point"];
        if (!p.is_array() || p.empty()) {
            r.fail("point", "must be a non-empty array of numbers");
        } else {
            std::vector<double> coords;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (!p[i].is_number() || !std::isfinite(p[i].get<double>()))
                    errors.push_back({"/point/" + std::to_string(i), "must be a finite number"});
                else
                    coords.push_back(p[i].get<double>());
            }
            if (dimension > 0 && static_cast<int>(p.size()) != dimension)
                r.fail("point", "has " + std::to_string(p.size()) + " coordinates but the system has dimension " +
                                    std::to_string(dimension));
            else if (coords.size() == p.size())
                cfg.point = coords;
        }
    }
    if (dimension > 0 && (cfg.task == Task::Dominate || cfg.task == Task::Graph) && cfg.j >= dimension)
        r.fail("j", "must be smaller than the system dimension");
    if (dimension > 2 && cfg.method == "grid" && (cfg.task == Task::Bowen || cfg.task == Task::Pesin))
        r.fail("method", "grid requires a system of dimension <= 2");

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

json serialize_config(const ExperimentConfig& cfg) {
    json j{{"system", cfg.system}, {"task", to_string(cfg.task)}, {"seed", cfg.seed}, {"out", cfg.out}};
    if (cfg.workers > 0) j["workers"] = cfg.workers;
    const auto& keys = task_keys(cfg.task);
    auto put = [&](const char* key, const json& value) {
        if (keys.contains(key)) j[key] = value;
    };
    put("n", cfg.n);
    put("qr_stride", cfg.qr_stride);
    put("points", cfg.points);
    if (cfg.point) put("point", *cfg.point);
    put("N_max", cfg.n_max);
    put("window", cfg.window);
    put("j", cfg.j);
    put("gap_threshold", cfg.gap_threshold);
    put("splitting_horizon", cfg.splitting_horizon);
    put("delta", cfg.delta);
    put("deltas", cfg.deltas);
    put("n_range", json::array({cfg.n_min_fit, cfg.n_max_fit}));
    put("method", cfg.method);
    put("resolution", cfg.resolution);
    put("population", cfg.population);
    put("mcmc_sweeps", cfg.mcmc_sweeps);
    put("c", cfg.c);
    put("samples", cfg.samples);
    put("lyapunov_n", cfg.lyapunov_n);
    put("tol", cfg.tol);
    return j;
}

}  // namespace pesinlab
