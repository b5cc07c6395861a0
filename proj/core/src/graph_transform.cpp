#include "pesinlab/graph_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pesinlab/bowen.hpp"
#include "pesinlab/error.hpp"

namespace pesinlab {

double dispersion(const std::vector<Vector>& u, const std::vector<Vector>& psi) {
    if (u.size() != psi.size()) throw InvalidArgument("dispersion: sample arrays differ in length");
    if (u.size() < 2) throw InvalidArgument("dispersion: at least two samples are required");
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t l = i + 1; l < u.size(); ++l) {
            const double du = (u[i] - u[l]).norm();
            worst = std::max(worst, (psi[i] - psi[l]).norm() / du);
        }
    }
    return worst;
}

GraphOverF::GraphOverF(SplittingField splitting, std::vector<Vector> u, std::vector<Vector> psi, double radius)
    : splitting_(std::move(splitting)), u_(std::move(u)), psi_(std::move(psi)), radius_(radius) {
    if (u_.size() < 2) throw InvalidArgument("GraphOverF: at least two samples are required");
    if (u_.size() != psi_.size()) throw InvalidArgument("GraphOverF: sample arrays differ in length");
    for (std::size_t i = 0; i < u_.size(); ++i) {
        if (u_[i].size() != splitting_.f.cols() || psi_[i].size() != splitting_.e.cols())
            throw InvalidArgument("GraphOverF: sample dimensions do not match the splitting");
        for (std::size_t l = i + 1; l < u_.size(); ++l) {
            if ((u_[i] - u_[l]).norm() <= 1e-12)
                throw InvalidArgument("GraphOverF: duplicate domain samples");
        }
    }
    dispersion_ = pesinlab::dispersion(u_, psi_);
}

double GraphOverF::sample_spacing() const {
    double spacing = 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < u_.size(); ++l) {
            if (l != i) nearest = std::min(nearest, (u_[i] - u_[l]).norm());
        }
        spacing = std::max(spacing, nearest);
    }
    return spacing;
}

Vector GraphOverF::displacement(std::size_t i) const {
    return splitting_.e * psi_[i] + splitting_.f * u_[i];
}

TorusPoint GraphOverF::embedded(std::size_t i) const {
    return splitting_.base.shifted(displacement(i));
}

GraphOverF sample_graph(const SplittingField& splitting, double radius, std::size_t count,
                        const std::function<Vector(const Vector&)>& psi, std::uint64_t seed) {
    if (!(radius > 0)) throw InvalidArgument("sample_graph: radius must be positive");
    if (count < 2) throw InvalidArgument("sample_graph: at least two samples are required");
    const int j = splitting.dim_f();
    std::vector<Vector> us;
    us.reserve(count);
    if (j == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            const double t = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(count - 1);
            us.push_back(Vector::Constant(1, t));
        }
    } else {
        std::mt19937_64 engine(seed);
        std::normal_distribution<double> gauss;
        while (us.size() < count) {
            Vector g(j);
            for (int i = 0; i < j; ++i) g[i] = gauss(engine);
            const double r = radius * std::pow(uniform01(engine), 1.0 / j);
            us.push_back(g.normalized() * r);
        }
    }
    std::vector<Vector> ps;
    ps.reserve(count);
    for (const auto& u : us) ps.push_back(psi(u));
    return GraphOverF(splitting, std::move(us), std::move(ps), radius);
}

GraphOverF linear_graph(const SplittingField& splitting, const Matrix& slope, double radius, std::size_t count,
                        std::uint64_t seed) {
    if (slope.rows() != splitting.dim_e() || slope.cols() != splitting.dim_f())
        throw InvalidArgument("linear_graph: slope must be dim E x dim F");
    return sample_graph(splitting, radius, count, [&](const Vector& u) { return Vector(slope * u); }, seed);
}

double graph_contraction_factor(double alpha, double beta, double c, double tau) {
    const double s = tau * alpha * (1.0 + c);
    return (0.5 + s / (c * beta)) / (1.0 - s / beta);
}

double critical_tau(double alpha, double beta, double c) {
    if (!(alpha > 0) || !(beta > 0) || !(c > 0))
        throw InvalidArgument("critical_tau: alpha, beta and c must be positive");
    // factor < 1  <=>  tau a (1+c) (1/(c b) + 1/b) < 1/2; this also implies b - tau a (1+c) > 0
    return c * beta / (2.0 * alpha * (1.0 + c) * (1.0 + c));
}

double lemma2_tau_bound(double alpha, double beta, double c) {
    return 0.5 * critical_tau(alpha, beta, c);
}

GraphOverF transform_graph(const SmoothSystem& system, const GraphOverF& graph, const SplittingField& splitting_at_fx) {
    const TorusPoint& x = graph.base();
    const TorusPoint fx = system.forward(x);
    if (torus_distance(fx, splitting_at_fx.base) > 1e-9)
        throw InvalidArgument("transform_graph: target splitting is not anchored at f(base)");
    if (splitting_at_fx.dim_f() != graph.splitting().dim_f())
        throw InvalidArgument("transform_graph: target splitting has a different dim F");

    const Eigen::PartialPivLU<Matrix> coords(splitting_at_fx.combined());
    const Eigen::Index k = splitting_at_fx.e.cols();
    const Eigen::Index j = splitting_at_fx.f.cols();
    const Vector fx_lift = system.forward_lift(x.coords());

    std::vector<Vector> us;
    std::vector<Vector> ps;
    us.reserve(graph.size());
    ps.reserve(graph.size());
    double radius = 0.0;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        Vector delta = system.forward_lift(x.coords() + graph.displacement(i)) - fx_lift;
        for (Eigen::Index c = 0; c < delta.size(); ++c) delta[c] = wrap_centered(delta[c]);
        const Vector c = coords.solve(delta);
        ps.emplace_back(c.head(k));
        us.emplace_back(c.tail(j));
        radius = std::max(radius, us.back().norm());
    }
    for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t l = i + 1; l < us.size(); ++l) {
            if ((us[i] - us[l]).norm() <= 1e-10)
                throw GraphFolded("transform_graph: samples " + std::to_string(i) + " and " + std::to_string(l) +
                                  " share their F-coordinate; the image is not a graph at this scale");
        }
    }
    return GraphOverF(SplittingField{fx, splitting_at_fx.e, splitting_at_fx.f}, std::move(us), std::move(ps), radius);
}

PropagationResult propagate_along_bowen(const SmoothSystem& system, long n, double delta, const GraphOverF& graph,
                                        const SplittingAlongOrbit& splitting) {
    if (n < 0) throw InvalidArgument("propagate_along_bowen: n must be non-negative");
    if (!(delta > 0)) throw InvalidArgument("propagate_along_bowen: delta must be positive");

    const auto orbit = forward_orbit(system, graph.base(), n);
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const long exit = bowen_exit_step(system, orbit, graph.embedded(i), n, delta);
        if (exit <= n)
            throw BowenBallExit("propagate_along_bowen: sample " + std::to_string(i) + " leaves B_n(f, delta, x) at step " +
                                    std::to_string(exit),
                                exit);
    }

    PropagationResult result{graph, {graph.dispersion()}, true};
    for (long step = 1; step <= n; ++step) {
        const SplittingField target = splitting(orbit[static_cast<std::size_t>(step)], step);
        result.final_graph = transform_graph(system, result.final_graph, target);
        result.trace.push_back(result.final_graph.dispersion());
    }
    result.bounded = std::all_of(result.trace.begin(), result.trace.end(),
                                 [&](double v) { return v <= result.trace.front(); });
    return result;
}

}  // namespace pesinlab
