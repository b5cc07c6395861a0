#include "pesinlab/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pesinlab/bowen.hpp"
#include "pesinlab/cocycle.hpp"
#include "pesinlab/domination.hpp"
#include "pesinlab/entropy.hpp"
#include "pesinlab/graph_transform.hpp"
#include "pesinlab/parallel.hpp"
#include "pesinlab/systems.hpp"

namespace pesinlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json point_json(const TorusPoint& p) {
    json out = json::array();
    for (int i = 0; i < p.dimension(); ++i) out.push_back(p[i]);
    return out;
}

std::vector<TorusPoint> base_points(const ExperimentConfig& cfg, int d, std::size_t count) {
    if (cfg.point) {
        Vector v(static_cast<Eigen::Index>(cfg.point->size()));
        for (std::size_t i = 0; i < cfg.point->size(); ++i) v[static_cast<Eigen::Index>(i)] = (*cfg.point)[i];
        return {TorusPoint(v)};
    }
    return sample_lebesgue(cfg.seed, count, d);
}

class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void text(const std::string& name, const std::string& content) {
        const fs::path file = dir_ / name;
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + file.string() + " for writing");
        out << content;
        out.close();
        if (!out) throw Error("failed writing " + file.string());
        outputs_.push_back({name, file_sha256(file)});
    }

    void json_file(const std::string& name, const json& doc) { text(name, doc.dump(2) + "\n"); }

    const fs::path& dir() const { return dir_; }
    const std::vector<OutputFile>& outputs() const { return outputs_; }

private:
    fs::path dir_;
    std::vector<OutputFile> outputs_;
};

BowenParams bowen_params(const ExperimentConfig& cfg) {
    BowenParams p;
    p.method = parse_bowen_method(cfg.method);
    p.resolution = cfg.resolution;
    p.population = cfg.population;
    p.mcmc_sweeps = cfg.mcmc_sweeps;
    return p;
}

// Bundles at x and along its orbit: transported when the cocycle is constant, recomputed otherwise.
SplittingAlongOrbit orbit_splitting(const SmoothSystem& system, const SplittingField& at_x, long horizon, int j) {
    if (system.constant_jacobian()) return pushed_splitting(system, at_x);
    return oseledec_splitting_along(system, horizon, j);
}

SplittingField coordinate_splitting(const TorusPoint& x, int j) {
    const int d = x.dimension();
    const Matrix id = Matrix::Identity(d, d);
    return make_splitting(x, id.rightCols(d - j), id.leftCols(j));
}

void run_lyap(const SmoothSystem& system, const ExperimentConfig& cfg, unsigned workers, Writer& w, RunManifest&) {
    const auto points = base_points(cfg, system.dimension(), cfg.points);
    std::vector<LyapunovSpectrum> spectra(points.size());
    parallel_for(points.size(), workers,
                 [&](std::size_t i) { spectra[i] = lyapunov_spectrum_qr(system, points[i], cfg.n, cfg.qr_stride); });
    json rows = json::array();
    std::vector<double> mean(static_cast<std::size_t>(system.dimension()), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        json row = spectra[i];
        row["x"] = point_json(points[i]);
        rows.push_back(row);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += spectra[i].exponents[k] / static_cast<double>(points.size());
    }
    w.json_file("spectra.json", {{"system", cfg.system}, {"mean_exponents", mean}, {"spectra", rows}});
}

void run_dominate(const SmoothSystem& system, const ExperimentConfig& cfg, unsigned, Writer& w, RunManifest& m) {
    const TorusPoint x = base_points(cfg, system.dimension(), 1).front();
    auto ftos = finite_time_oseledec_splitting(system, x, cfg.n, cfg.j);
    std::string source = "finite_time_oseledec";
    SplittingAlongOrbit along;
    if (ftos.determinate()) {
        along = orbit_splitting(system, *ftos.splitting, cfg.n, cfg.j);
    } else {
        // No spectral gap at x: any fixed splitting is as good as another.
        source = "coordinate";
        along = pushed_splitting(system, coordinate_splitting(x, cfg.j));
    }
    const auto found = minimal_domination_n(system, x, along, cfg.n_max, cfg.window);
    const DominationReport report = domination_ratio(system, x, along, found.value_or(cfg.n_max), cfg.window);
    if (!report.certified())
        m.warnings.push_back("no domination time N <= " + std::to_string(cfg.n_max) + " certified (worst ratio " +
                             json(report.worst_ratio).dump() + ")");
    w.json_file("domination_report.json",
                {{"x", point_json(x)}, {"j", cfg.j}, {"splitting", source}, {"gap", ftos.gap}, {"report", report}});
}

void run_dichotomy(const SmoothSystem& system, const ExperimentConfig& cfg, unsigned workers, Writer& w,
                   RunManifest& m) {
    const auto points = base_points(cfg, system.dimension(), cfg.points);
    DichotomyParams params;
    params.n = cfg.n;
    params.n_max = cfg.n_max;
    params.window = cfg.window;
    params.gap_threshold = cfg.gap_threshold;
    params.splitting_horizon = cfg.splitting_horizon;
    std::vector<DichotomyVerdict> verdicts(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) { verdicts[i] = dichotomy_classify(system, points[i], params); });
    json rows = json::array();
    std::size_t indeterminate = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        json row = verdicts[i];
        row["x"] = point_json(points[i]);
        rows.push_back(row);
        if (verdicts[i].kind == DichotomyKind::Indeterminate) ++indeterminate;
    }
    if (indeterminate > 0)
        m.warnings.push_back(std::to_string(indeterminate) + " of " + std::to_string(points.size()) +
                             " points classified Indeterminate");
    w.json_file("dichotomy.json", {{"system", cfg.system}, {"verdicts", rows}});
}

void run_bowen(const SmoothSystem& system, const ExperimentConfig& cfg, unsigned, Writer& w, RunManifest&) {
    const TorusPoint x = base_points(cfg, system.dimension(), 1).front();
    const BowenEstimate est =
        local_entropy_estimate(system, x, cfg.delta, cfg.n_min_fit, cfg.n_max_fit, bowen_params(cfg), derive_seed(cfg.seed, 0));
    json doc = est;
    doc["system"] = cfg.system;
    w.json_file("bowen_estimate.json", doc);
    w.text("bowen_estimate.csv", to_csv(est));
}

void run_graph(const SmoothSystem& system, const ExperimentConfig& cfg, unsigned, Writer& w, RunManifest& m) {
    const TorusPoint x = base_points(cfg, system.dimension(), 1).front();
    auto ftos = finite_time_oseledec_splitting(system, x, cfg.splitting_horizon, cfg.j);
    if (!ftos.determinate())
        throw NumericalError("graph: no finite-time splitting with dim F = " + std::to_string(cfg.j) + " at the base point (gap " +
                             json(ftos.gap).dump() + ")");
    const SplittingField& at_x = *ftos.splitting;
    const auto along = orbit_splitting(system, at_x, cfg.splitting_horizon, cfg.j);

    Matrix slope = Matrix::Zero(at_x.dim_e(), at_x.dim_f());
    slope(0, 0) = cfg.c;
    // Shrink the domain until every sample stays in the Bowen ball.
    double radius = cfg.delta / 2.0;
    std::optional<PropagationResult> result;
    for (int attempt = 0; attempt < 200 && !result; ++attempt) {
        try {
            result = propagate_along_bowen(system, cfg.n, cfg.delta, linear_graph(at_x, slope, radius, cfg.samples, cfg.seed),
                                           along);
        } catch (const BowenBallExit&) {
            radius /= 2.0;
        }
    }
    if (!result) throw NumericalError("graph: no domain radius keeps the samples inside the Bowen ball");
    if (!result->bounded) m.warnings.push_back("dispersion exceeded its initial value along the orbit");

    w.json_file("graph_report.json", {{"system", cfg.system},
                                      {"x", point_json(x)},
                                      {"j", cfg.j},
                                      {"c", cfg.c},
                                      {"delta", cfg.delta},
                                      {"n", cfg.n},
                                      {"radius", radius},
                                      {"samples", cfg.samples},
                                      {"trace", result->trace},
                                      {"bounded", result->bounded},
                                      {"final_dispersion", result->trace.back()}});
    std::ostringstream csv;
    csv.precision(17);
    csv << "step,dispersion\n";
    for (std::size_t i = 0; i < result->trace.size(); ++i) csv << i << ',' << result->trace[i] << '\n';
    w.text("dispersion_trace.csv", csv.str());
}

void run_pesin(const SmoothSystem& system, const ExperimentConfig& cfg, unsigned workers, Writer& w, RunManifest& m) {
    PesinConfig pc;
    pc.deltas = cfg.deltas;
    pc.n_min = cfg.n_min_fit;
    pc.n_max = cfg.n_max_fit;
    pc.bowen = bowen_params(cfg);
    pc.points = cfg.points;
    pc.lyapunov_n = cfg.lyapunov_n;
    pc.gap_threshold = cfg.gap_threshold;
    pc.tol = cfg.tol;
    pc.seed = cfg.seed;
    const PesinReport report = pesin_report(system, pc, workers);
    if (report.verdict == PesinVerdict::Inconclusive) m.warnings.push_back("pesin verdict Inconclusive: " + report.note);
    if (report.excluded > 0)
        m.warnings.push_back(std::to_string(report.excluded) + " points excluded from the Mane bound");
    w.json_file("pesin_report.json", report);
}

std::string hex(const unsigned char* data, unsigned len) {
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(data[i]);
    return out.str();
}

json read_json(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("malformed report " + file.string() + ": " + e.what());
    }
}

}  // namespace

void to_json(json& j, const RunManifest& m) {
    json outputs = json::array();
    for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    j = json{{"config", m.config},
             {"version", m.version},
             {"duration_seconds", m.duration_seconds},
             {"outputs", outputs},
             {"warnings", m.warnings},
             {"warning", m.has_warning()}};
    if (!m.error.empty()) j["error"] = m.error;
}

std::string file_sha256(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read " + file.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 unavailable");
    }
    char buffer[1 << 15];
    while (in) {
        in.read(buffer, sizeof buffer);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    return hex(digest, len);
}

RunManifest run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.config = serialize_config(config);
    manifest.version = toolkit_version;
    Writer writer(config.out);
    const unsigned workers = resolve_workers(config.workers);

    auto finish = [&] {
        manifest.outputs = writer.outputs();
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream out(writer.dir() / "manifest.json", std::ios::trunc);
        out << json(manifest).dump(2) << "\n";
        if (!out) throw Error("failed writing manifest.json");
    };

    try {
        const SmoothSystem system = make_system(config.system);
        switch (config.task) {
            case Task::Lyap: run_lyap(system, config, workers, writer, manifest); break;
            case Task::Dominate: run_dominate(system, config, workers, writer, manifest); break;
            case Task::Dichotomy: run_dichotomy(system, config, workers, writer, manifest); break;
            case Task::Bowen: run_bowen(system, config, workers, writer, manifest); break;
            case Task::Graph: run_graph(system, config, workers, writer, manifest); break;
            case Task::Pesin: run_pesin(system, config, workers, writer, manifest); break;
        }
    } catch (const std::exception& e) {
        manifest.error = e.what();
        finish();
        throw;
    }
    finish();
    return manifest;
}

std::vector<fs::path> emit_plot_data(const fs::path& report_dir) {
    const fs::path bowen = report_dir / "bowen_estimate.json";
    const fs::path graph = report_dir / "graph_report.json";
    const bool has_bowen = fs::exists(bowen);
    const bool has_graph = fs::exists(graph);
    if (!has_bowen && !has_graph)
        throw Error("no plottable reports in " + report_dir.string() +
                    "; expected bowen_estimate.json and/or graph_report.json");

    std::vector<fs::path> written;
    auto write = [&](const fs::path& file, const std::string& content) {
        std::ofstream out(file, std::ios::trunc);
        out << content;
        if (!out) throw Error("failed writing " + file.string());
        written.push_back(file);
    };
    if (has_bowen) {
        const json doc = read_json(bowen);
        std::ostringstream csv;
        csv.precision(17);
        csv << "n,neg_log_measure\n";
        for (const auto& r : doc.at("records")) csv << r.at("n").get<long>() << ',' << -std::log(r.at("measure").get<double>()) << '\n';
        write(report_dir / "bowen_plot.csv", csv.str());
    }
    if (has_graph) {
        const json doc = read_json(graph);
        std::ostringstream csv;
        csv.precision(17);
        csv << "step,dispersion\n";
        long step = 0;
        for (const auto& v : doc.at("trace")) csv << step++ << ',' << v.get<double>() << '\n';
        write(report_dir / "graph_plot.csv", csv.str());
    }
    return written;
}

}  // namespace pesinlab
