#include "pesinlab/bowen.hpp"

#include <cmath>
#include <optional>
#include <random>

#include "pesinlab/error.hpp"

namespace pesinlab {

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0) || !(delta < 0.5)) throw InvalidArgument("Bowen ball radius delta must lie in (0, 1/2)");
}

std::vector<BowenRecord> grid_profile(const SmoothSystem& system, const TorusPoint& x, long n_max, double delta,
                                      int resolution) {
    const int d = system.dimension();
    if (d > 2) throw InvalidArgument("grid Bowen estimator supports d <= 2 only (got d = " + std::to_string(d) + ")");
    if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2");

    const auto orbit = forward_orbit(system, x, n_max);
    std::vector<long> exits(static_cast<std::size_t>(n_max) + 2, 0);
    const double r = resolution;

    auto axis_range = [&](int axis) {
        const long lo = static_cast<long>(std::floor((x[axis] - delta) * r)) - 1;
        const long hi = static_cast<long>(std::floor((x[axis] + delta) * r)) + 1;
        return std::pair{lo, hi};
    };
    auto centre = [&](long i) {
        long w = i % resolution;
        if (w < 0) w += resolution;
        return (static_cast<double>(w) + 0.5) / r;
    };

    const auto [lo0, hi0] = axis_range(0);
    if (d == 1) {
        for (long i = lo0; i <= hi0; ++i) {
            const TorusPoint y{centre(i)};
            ++exits[static_cast<std::size_t>(bowen_exit_step(system, orbit, y, n_max, delta))];
        }
    } else {
        const auto [lo1, hi1] = axis_range(1);
        for (long i = lo0; i <= hi0; ++i) {
            for (long k = lo1; k <= hi1; ++k) {
                const TorusPoint y{centre(i), centre(k)};
                ++exits[static_cast<std::size_t>(bowen_exit_step(system, orbit, y, n_max, delta))];
            }
        }
    }

    const double cell = std::pow(r, -d);
    std::vector<BowenRecord> out(static_cast<std::size_t>(n_max) + 1);
    long inside = 0;
    for (long k = n_max; k >= 0; --k) {
        inside += exits[static_cast<std::size_t>(k) + 1];  // exit step > k means y in B_k
        out[static_cast<std::size_t>(k)] = {k, inside * cell, std::sqrt(static_cast<double>(inside)) * cell,
                                            BowenMethod::Grid};
    }
    return out;
}

struct Particle {
    Vector offset;   // lifted displacement from x
    TorusPoint image;  // f^k(x + offset) at the current stage k
};

std::vector<BowenRecord> nested_mc_profile(const SmoothSystem& system, const TorusPoint& x, long n_max, double delta,
                                           const BowenParams& params, std::uint64_t seed) {
    const int d = system.dimension();
    const std::size_t m = params.population;
    if (m < 10) throw InvalidArgument("nested_mc population must be at least 10");

    const auto orbit = forward_orbit(system, x, n_max);
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> gauss;

    auto gaussian = [&] {
        Vector g(d);
        for (int i = 0; i < d; ++i) g[i] = gauss(engine);
        return g;
    };

    // image f^k(x + offset) if the point stays in B_k
    auto track = [&](const Vector& offset, long k) -> std::optional<TorusPoint> {
        TorusPoint y = x.shifted(offset);
        for (long j = 0;; ++j) {
            if (torus_distance(orbit[static_cast<std::size_t>(j)], y) > delta) return std::nullopt;
            if (j == k) return y;
            y = system.forward(y);
        }
    };

    std::vector<Particle> pop;
    pop.reserve(m);
    while (pop.size() < m) {
        const double radius = delta * std::pow(uniform01(engine), 1.0 / d);
        Vector offset = gaussian().normalized() * radius;
        pop.push_back({offset, x.shifted(offset)});
    }

    std::vector<BowenRecord> out;
    double measure = ball_volume(d, delta);
    double rel_var = 0.0;
    out.push_back({0, measure, 0.0, BowenMethod::NestedMC});

    for (long k = 0; k < n_max; ++k) {
        const TorusPoint& target = orbit[static_cast<std::size_t>(k) + 1];
        std::vector<Particle> survivors;
        for (auto& p : pop) {
            TorusPoint next = system.forward(p.image);
            if (torus_distance(target, next) <= delta) survivors.push_back({p.offset, std::move(next)});
        }
        if (survivors.empty())
            throw NumericalError("nested_mc: survivor extinction at stage " + std::to_string(k + 1) +
                                 "; increase the stage population");
        const double frac = static_cast<double>(survivors.size()) / static_cast<double>(m);
        measure *= frac;
        rel_var += (1.0 - frac) / (frac * static_cast<double>(m));
        out.push_back({k + 1, measure, measure * std::sqrt(rel_var), BowenMethod::NestedMC});
        if (k + 1 == n_max) break;

        // proposal shaped like the survivor cloud
        Vector mean = Vector::Zero(d);
        for (const auto& s : survivors) mean += s.offset;
        mean /= static_cast<double>(survivors.size());
        Matrix cov = Matrix::Zero(d, d);
        for (const auto& s : survivors) cov += (s.offset - mean) * (s.offset - mean).transpose();
        cov /= static_cast<double>(survivors.size());
        const double floor = std::max(1e-10 * cov.trace() / d, 1e-300);
        cov += Matrix::Identity(d, d) * (cov.trace() > 0 ? floor : 1e-12 * delta * delta);
        const Matrix chol = cov.llt().matrixL();

        std::uniform_int_distribution<std::size_t> pick(0, survivors.size() - 1);
        pop.clear();
        for (std::size_t i = 0; i < m; ++i) pop.push_back(survivors[pick(engine)]);
        for (int sweep = 0; sweep < params.mcmc_sweeps; ++sweep) {
            for (auto& p : pop) {
                Vector proposal = p.offset + 0.5 * (chol * gaussian());
                if (auto image = track(proposal, k + 1)) {
                    p.offset = std::move(proposal);
                    p.image = std::move(*image);
                }
            }
        }
    }
    return out;
}

}  // namespace

bool in_bowen_ball(const SmoothSystem& system, const TorusPoint& x, const TorusPoint& y, long n, double delta) {
    if (n < 0) throw InvalidArgument("in_bowen_ball: n must be non-negative");
    if (!(delta > 0)) throw InvalidArgument("in_bowen_ball: delta must be positive");
    TorusPoint a = x;
    TorusPoint b = y;
    for (long j = 0; j <= n; ++j) {
        if (torus_distance(a, b) > delta) return false;
        if (j == n) break;
        a = system.forward(a);
        b = system.forward(b);
    }
    return true;
}

long bowen_exit_step(const SmoothSystem& system, const std::vector<TorusPoint>& orbit, const TorusPoint& y, long n,
                     double delta) {
    if (static_cast<long>(orbit.size()) < n + 1) throw InvalidArgument("bowen_exit_step: orbit is too short");
    TorusPoint b = y;
    for (long j = 0; j <= n; ++j) {
        if (torus_distance(orbit[static_cast<std::size_t>(j)], b) > delta) return j;
        if (j < n) b = system.forward(b);
    }
    return n + 1;
}

std::string to_string(BowenMethod method) {
    return method == BowenMethod::Grid ? "grid" : "nested_mc";
}

BowenMethod parse_bowen_method(const std::string& name) {
    if (name == "grid") return BowenMethod::Grid;
    if (name == "nested_mc") return BowenMethod::NestedMC;
    throw InvalidArgument("unknown Bowen estimator '" + name + "' (expected grid or nested_mc)");
}

std::vector<BowenRecord> bowen_ball_profile(const SmoothSystem& system, const TorusPoint& x, long n_max, double delta,
                                            const BowenParams& params, std::uint64_t seed) {
    if (n_max < 0) throw InvalidArgument("Bowen profile: n must be non-negative");
    check_delta(delta);
    if (params.method == BowenMethod::Grid) return grid_profile(system, x, n_max, delta, params.resolution);
    return nested_mc_profile(system, x, n_max, delta, params, seed);
}

MeasureEstimate bowen_ball_measure(const SmoothSystem& system, const TorusPoint& x, long n, double delta,
                                   const BowenParams& params, std::uint64_t seed) {
    const auto profile = bowen_ball_profile(system, x, n, delta, params, seed);
    return {profile.back().measure, profile.back().standard_error};
}

}  // namespace pesinlab
