#include "pesinlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pesinlab/error.hpp"
#include "pesinlab/linalg.hpp"
#include "pesinlab/parallel.hpp"

namespace pesinlab {

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& v) {
    MeanSe out;
    if (v.empty()) return out;
    for (double x : v) out.mean += x;
    out.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return out;
}

nlohmann::json point_json(const TorusPoint& p) {
    return std::vector<double>(p.coords().data(), p.coords().data() + p.dimension());
}

void require_volume_preserving(const SmoothSystem& system, const char* who) {
    if (!system.volume_preserving())
        throw InvalidArgument(std::string(who) + ": the system must be volume preserving (Lebesgue must be invariant)");
}

}  // namespace

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& weights) {
    if (xs.size() != ys.size() || xs.size() != weights.size()) throw InvalidArgument("fit_slope: length mismatch");
    if (xs.size() < 2) throw InvalidArgument("fit_slope: at least two points are required");
    double w = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        w += weights[i];
        mx += weights[i] * xs[i];
        my += weights[i] * ys[i];
    }
    mx /= w;
    my /= w;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += weights[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += weights[i] * (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0)) throw InvalidArgument("fit_slope: abscissae are all equal");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        rss += weights[i] * r * r;
    }
    fit.residual = std::sqrt(rss / w);
    return fit;
}

void to_json(nlohmann::json& j, const BowenEstimate& e) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : e.records) {
        records.push_back({{"n", r.n}, {"measure", r.measure}, {"stderr", r.standard_error}, {"method", to_string(r.method)}});
    }
    j = nlohmann::json{{"x", point_json(e.x)},     {"delta", e.delta},     {"records", records},
                       {"fit_range", {e.fit_min, e.fit_max}}, {"slope", e.slope}, {"residual", e.residual}};
}

std::string to_csv(const BowenEstimate& e) {
    std::ostringstream out;
    out.precision(17);
    out << "n,measure,stderr,method\n";
    for (const auto& r : e.records) out << r.n << ',' << r.measure << ',' << r.standard_error << ',' << to_string(r.method) << '\n';
    return out.str();
}

BowenEstimate local_entropy_estimate(const SmoothSystem& system, const TorusPoint& x, double delta, long n_min,
                                     long n_max, const BowenParams& params, std::uint64_t seed) {
    if (n_min < 0 || n_max - n_min < 3)
        throw InvalidArgument("local_entropy_estimate: need 0 <= n_min and n_max - n_min >= 3");
    const auto profile = bowen_ball_profile(system, x, n_max, delta, params, seed);

    BowenEstimate est;
    est.x = x;
    est.delta = delta;
    est.fit_min = n_min;
    est.fit_max = n_max;
    std::vector<double> ns, ys, ws;
    for (long n = n_min; n <= n_max; ++n) {
        const auto& rec = profile[static_cast<std::size_t>(n)];
        if (!(rec.measure > 0))
            throw NumericalError("local_entropy_estimate: Bowen ball estimate is zero at n = " + std::to_string(n) +
                                 "; increase the resolution or population");
        est.records.push_back(rec);
        const double rel = rec.standard_error / rec.measure;
        ns.push_back(static_cast<double>(n));
        ys.push_back(-std::log(rec.measure));
        ws.push_back(1.0 / std::max(rel * rel, 1e-6));
    }
    const auto fit = fit_slope(ns, ys, ws);
    est.slope = fit.slope;
    est.residual = fit.residual;
    return est;
}

double slice_bowen_measure(const SmoothSystem& system, const SplittingField& splitting, double offset, long n,
                           double delta, std::size_t resolution) {
    if (system.dimension() != 2 || splitting.dim_e() != 1 || splitting.dim_f() != 1)
        throw InvalidArgument("slice_bowen_measure: requires d = 2 with one-dimensional E and F");
    if (resolution < 1000) throw InvalidArgument("slice_bowen_measure: resolution must be at least 1000");
    if (n < 0) throw InvalidArgument("slice_bowen_measure: n must be non-negative");
    if (!(delta > 0) || !(delta < 0.5)) throw InvalidArgument("slice_bowen_measure: delta must lie in (0, 1/2)");

    const auto orbit = forward_orbit(system, splitting.base, n);
    const Vector e = splitting.e.col(0);
    const Vector f = splitting.f.col(0);
    const double step = 2.0 * delta / static_cast<double>(resolution);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < resolution; ++i) {
        const double t = -delta + (static_cast<double>(i) + 0.5) * step;
        const TorusPoint y = splitting.base.shifted(offset * e + t * f);
        if (bowen_exit_step(system, orbit, y, n, delta) > n) ++inside;
    }
    return static_cast<double>(inside) * step;
}

DistortionEstimate distortion_epsilon(const SmoothSystem& system, const SplittingField& splitting, double radius,
                                      double c, std::size_t sample_count, std::uint64_t seed) {
    if (!(radius > 0)) throw InvalidArgument("distortion_epsilon: radius must be positive");
    if (!(c >= 0)) throw InvalidArgument("distortion_epsilon: c must be non-negative");
    if (sample_count < 1) throw InvalidArgument("distortion_epsilon: sample_count must be at least 1");

    const int d = system.dimension();
    const Eigen::Index k = splitting.e.cols();
    const Eigen::Index j = splitting.f.cols();
    const double reference = log_volume(system.jacobian(splitting.base) * splitting.f) - log_volume(splitting.f);

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> gauss;
    constexpr std::size_t batches = 10;
    std::vector<double> batch_max(batches, 0.0);
    double worst = 0.0;
    for (std::size_t s = 0; s < sample_count; ++s) {
        Vector dir(d);
        for (int i = 0; i < d; ++i) dir[i] = gauss(engine);
        const double r = radius * std::pow(uniform01(engine), 1.0 / d);
        const TorusPoint y = splitting.base.shifted(dir.normalized() * r);

        Matrix tilt(k, j);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < j; ++b) tilt(a, b) = gauss(engine);
        const double size = c * uniform01(engine);
        tilt *= size / operator_norm(tilt);
        const Matrix basis = splitting.f + splitting.e * tilt;

        const double value = std::abs(log_volume(system.jacobian(y) * basis) - log_volume(basis) - reference);
        worst = std::max(worst, value);
        batch_max[s % batches] = std::max(batch_max[s % batches], value);
    }
    DistortionEstimate out;
    out.epsilon = worst;
    out.samples = sample_count;
    if (sample_count >= batches) out.standard_error = mean_and_se(batch_max).se;
    return out;
}

double radius_for_distortion(const SmoothSystem& system, const SplittingField& splitting, double c, double target,
                             double r_max, std::size_t sample_count, std::uint64_t seed, int iterations) {
    if (!(target > 0) || !(r_max > 0)) throw InvalidArgument("radius_for_distortion: target and r_max must be positive");
    if (distortion_epsilon(system, splitting, r_max, c, sample_count, seed).epsilon < target) return r_max;
    double lo = 0.0, hi = r_max;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (distortion_epsilon(system, splitting, mid, c, sample_count, seed).epsilon < target)
            lo = mid;
        else
            hi = mid;
    }
    if (!(lo > 0))
        throw NumericalError("radius_for_distortion: target is below the distortion of the tilt alone; reduce c");
    return lo;
}

void to_json(nlohmann::json& j, const ManeBound& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : m.per_point) {
        rows.push_back({{"index", p.index},
                        {"x", point_json(p.x)},
                        {"local_entropy", p.local_entropy ? nlohmann::json(*p.local_entropy) : nlohmann::json(nullptr)},
                        {"error", p.error}});
    }
    j = nlohmann::json{{"bound", m.bound},
                       {"standard_error", m.standard_error},
                       {"used", m.used},
                       {"excluded", m.excluded},
                       {"per_point", rows}};
}

ManeBound mane_lower_bound(const SmoothSystem& system, double delta, std::size_t point_count, long n_min, long n_max,
                           const BowenParams& params, std::uint64_t seed, unsigned workers) {
    require_volume_preserving(system, "mane_lower_bound");
    if (point_count < 1) throw InvalidArgument("mane_lower_bound: point_count must be at least 1");
    const auto points = sample_lebesgue(seed, point_count, system.dimension());

    ManeBound out;
    out.per_point.resize(point_count);
    parallel_for(point_count, workers, [&](std::size_t i) {
        PointEntropy& row = out.per_point[i];
        row.index = i;
        row.x = points[i];
        try {
            row.local_entropy =
                local_entropy_estimate(system, points[i], delta, n_min, n_max, params, derive_seed(seed, i)).slope;
        } catch (const Error& e) {
            row.error = e.what();
        }
    });

    std::vector<double> values;
    for (const auto& row : out.per_point) {
        if (row.local_entropy) values.push_back(*row.local_entropy);
    }
    out.used = values.size();
    out.excluded = point_count - values.size();
    const auto ms = mean_and_se(values);
    out.bound = ms.mean;
    out.standard_error = ms.se;
    return out;
}

int nonnegative_count(const LyapunovSpectrum& spectrum, double gap_threshold) {
    return static_cast<int>(std::count_if(spectrum.exponents.begin(), spectrum.exponents.end(),
                                          [&](double l) { return l >= -gap_threshold; }));
}

std::map<int, double> sigma_partition(const SmoothSystem& system, std::size_t samples, long n, double gap_threshold,
                                      std::uint64_t seed, unsigned workers) {
    if (samples < 1) throw InvalidArgument("sigma_partition: samples must be at least 1");
    const auto points = sample_lebesgue(seed, samples, system.dimension());
    std::vector<int> classes(samples);
    parallel_for(samples, workers, [&](std::size_t i) {
        classes[i] = nonnegative_count(lyapunov_spectrum_qr(system, points[i], n), gap_threshold);
    });
    std::map<int, std::size_t> counts;
    for (int c : classes) ++counts[c];
    std::map<int, double> weights;
    for (const auto& [j, count] : counts) weights[j] = static_cast<double>(count) / static_cast<double>(samples);
    return weights;
}

std::string to_string(PesinVerdict v) {
    switch (v) {
        case PesinVerdict::FormulaHolds: return "FormulaHolds";
        case PesinVerdict::InequalityOnly: return "InequalityOnly";
        case PesinVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

void to_json(nlohmann::json& j, const PesinReport& r) {
    nlohmann::json per_delta = nlohmann::json::array();
    for (std::size_t i = 0; i < r.per_delta.size(); ++i) {
        per_delta.push_back({{"delta", r.config.deltas[i]},
                             {"bound", r.per_delta[i].bound},
                             {"standard_error", r.per_delta[i].standard_error},
                             {"used", r.per_delta[i].used},
                             {"excluded", r.per_delta[i].excluded}});
    }
    nlohmann::json weights = nlohmann::json::object();
    for (const auto& [k, w] : r.sigma_weights) weights[std::to_string(k)] = w;
    nlohmann::json classes = nlohmann::json::object();
    for (const auto& [k, b] : r.class_bounds) classes[std::to_string(k)] = b;
    const auto& c = r.config;
    j = nlohmann::json{
        {"system", r.system},
        {"config",
         {{"deltas", c.deltas},
          {"n_range", {c.n_min, c.n_max}},
          {"method", to_string(c.bowen.method)},
          {"resolution", c.bowen.resolution},
          {"population", c.bowen.population},
          {"mcmc_sweeps", c.bowen.mcmc_sweeps},
          {"points", c.points},
          {"lyapunov_n", c.lyapunov_n},
          {"gap_threshold", c.gap_threshold},
          {"tol", c.tol},
          {"seed", c.seed}}},
        {"mane_lower_bound", r.mane_lower_bound},
        {"mane_standard_error", r.mane_standard_error},
        {"best_delta", r.best_delta},
        {"per_delta", per_delta},
        {"ruelle_upper_bound", r.ruelle_upper_bound},
        {"ruelle_standard_error", r.ruelle_standard_error},
        {"chi_integral", r.chi_integral},
        {"sigma_weights", weights},
        {"class_bounds", classes},
        {"excluded", r.excluded},
        {"verdict", to_string(r.verdict)},
        {"tol", c.tol},
        {"note", r.note}};
}

PesinReport pesin_report(const SmoothSystem& system, const PesinConfig& config, unsigned workers) {
    require_volume_preserving(system, "pesin_report");
    if (config.points < 1) throw InvalidArgument("pesin_report: points must be at least 1");
    if (config.deltas.empty()) throw InvalidArgument("pesin_report: at least one delta is required");

    const std::size_t m = config.points;
    const std::size_t nd = config.deltas.size();
    const auto points = sample_lebesgue(config.seed, m, system.dimension());

    struct PointData {
        int j = 0;
        double nonnegative_sum = 0.0;
        double chi = 0.0;
        std::vector<std::optional<double>> entropy;
        std::vector<std::string> errors;
    };
    std::vector<PointData> data(m);
    parallel_for(m, workers, [&](std::size_t i) {
        PointData& p = data[i];
        const auto spectrum = lyapunov_spectrum_qr(system, points[i], config.lyapunov_n);
        p.j = nonnegative_count(spectrum, config.gap_threshold);
        p.chi = chi(spectrum, p.j);
        for (double l : spectrum.exponents) {
            if (l >= 0) p.nonnegative_sum += l;
        }
        p.entropy.resize(nd);
        p.errors.resize(nd);
        const std::uint64_t point_seed = derive_seed(config.seed, i);
        for (std::size_t k = 0; k < nd; ++k) {
            try {
                p.entropy[k] = local_entropy_estimate(system, points[i], config.deltas[k], config.n_min, config.n_max,
                                                      config.bowen, derive_seed(point_seed, k))
                                   .slope;
            } catch (const Error& e) {
                p.errors[k] = e.what();
            }
        }
    });

    PesinReport report;
    report.system = system.descriptor();
    report.config = config;

    std::vector<double> upper, chis;
    std::map<int, std::size_t> class_size;
    for (const auto& p : data) {
        upper.push_back(p.nonnegative_sum);
        chis.push_back(p.chi);
        ++class_size[p.j];
    }
    const auto ruelle = mean_and_se(upper);
    report.ruelle_upper_bound = ruelle.mean;
    report.ruelle_standard_error = ruelle.se;
    report.chi_integral = mean_and_se(chis).mean;
    for (const auto& [j, count] : class_size) report.sigma_weights[j] = static_cast<double>(count) / static_cast<double>(m);

    // Mane bound per delta: class means recombined with the Sigma_j weights
    bool any = false;
    std::size_t best = 0;
    std::vector<std::map<int, double>> class_means(nd);
    for (std::size_t k = 0; k < nd; ++k) {
        ManeBound mb;
        std::map<int, std::vector<double>> by_class;
        for (std::size_t i = 0; i < m; ++i) {
            PointEntropy row{i, points[i], data[i].entropy[k], data[i].errors[k]};
            if (row.local_entropy) by_class[data[i].j].push_back(*row.local_entropy);
            mb.per_point.push_back(std::move(row));
        }
        double weight = 0.0, acc = 0.0, var = 0.0;
        for (const auto& [j, values] : by_class) {
            const auto ms = mean_and_se(values);
            const double w = report.sigma_weights[j];
            class_means[k][j] = ms.mean;
            weight += w;
            acc += w * ms.mean;
            var += w * w * ms.se * ms.se;
            mb.used += values.size();
        }
        mb.excluded = m - mb.used;
        if (weight > 0) {
            mb.bound = acc / weight;
            mb.standard_error = std::sqrt(var) / weight;
            if (!any || mb.bound > report.per_delta[best].bound) best = k;
            any = true;
        }
        report.per_delta.push_back(std::move(mb));
    }

    if (!any) {
        report.verdict = PesinVerdict::Inconclusive;
        report.excluded = m;
        report.note = "every local entropy estimate failed";
        return report;
    }

    const auto& chosen = report.per_delta[best];
    report.best_delta = config.deltas[best];
    report.mane_lower_bound = chosen.bound;
    report.mane_standard_error = chosen.standard_error;
    report.class_bounds = class_means[best];
    report.excluded = chosen.excluded;

    const double gap = std::abs(report.mane_lower_bound - report.ruelle_upper_bound);
    const double sigma = std::hypot(report.mane_standard_error, report.ruelle_standard_error);
    if (gap <= config.tol) {
        report.verdict = PesinVerdict::FormulaHolds;
        report.note = "lower and upper bounds agree within tol";
    } else if (report.mane_lower_bound <= report.ruelle_upper_bound + config.tol + 3.0 * sigma) {
        report.verdict = PesinVerdict::InequalityOnly;
        report.note = "lower bound below upper bound by more than tol";
    } else {
        report.verdict = PesinVerdict::Inconclusive;
        report.note = "lower bound exceeds the upper bound beyond tol + 3 sigma";
    }
    return report;
}

}  // namespace pesinlab
