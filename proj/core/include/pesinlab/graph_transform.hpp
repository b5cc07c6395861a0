#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pesinlab/cocycle.hpp"

namespace pesinlab {

/// A sampled (E, F)-graph {x + F u + E psi(u)} over a domain U in F, anchored at the
/// base point of its splitting. Coordinates u (dim F) and psi(u) (dim E) are taken in
/// the orthonormal bases of the splitting.
class GraphOverF {
public:
    GraphOverF(SplittingField splitting, std::vector<Vector> u, std::vector<Vector> psi, double radius);

    const SplittingField& splitting() const noexcept { return splitting_; }
    const TorusPoint& base() const noexcept { return splitting_.base; }
    const std::vector<Vector>& u() const noexcept { return u_; }
    const std::vector<Vector>& psi() const noexcept { return psi_; }
    std::size_t size() const noexcept { return u_.size(); }
    double radius() const noexcept { return radius_; }
    double dispersion() const noexcept { return dispersion_; }

    /// Largest nearest-neighbour distance among the u samples (sample density diagnostic).
    double sample_spacing() const;

    /// Lifted displacement E psi_i + F u_i from the base point.
    Vector displacement(std::size_t i) const;
    TorusPoint embedded(std::size_t i) const;

private:
    SplittingField splitting_;
    std::vector<Vector> u_;
    std::vector<Vector> psi_;
    double radius_;
    double dispersion_;
};

/// max over sample pairs of |psi_i - psi_l| / |u_i - u_l|. Needs at least two samples.
double dispersion(const std::vector<Vector>& u, const std::vector<Vector>& psi);

/// Samples `count` points of U = {|u| <= radius} (evenly spaced when dim F = 1, seeded
/// uniform otherwise) and evaluates psi on them.
GraphOverF sample_graph(const SplittingField& splitting, double radius, std::size_t count,
                        const std::function<Vector(const Vector&)>& psi, std::uint64_t seed = 0);

/// Graph of the linear map u -> slope * u (slope is dim E x dim F).
GraphOverF linear_graph(const SplittingField& splitting, const Matrix& slope, double radius,
                        std::size_t count = 200, std::uint64_t seed = 0);

/// Factor multiplying the dispersion bound c after one graph transform step,
/// (1/2 + tau a (1+c) / (c b)) / (1 - tau a (1+c) / b).
double graph_contraction_factor(double alpha, double beta, double c, double tau);

/// Supremum of the tau for which the contraction factor is < 1 and b - tau a (1+c) > 0.
double critical_tau(double alpha, double beta, double c);

/// Half of critical_tau: a tau certifying strict dispersion contraction.
double lemma2_tau_bound(double alpha, double beta, double c);

/// Image of `graph` under the system, as a graph over the bundles of `splitting_at_fx`
/// (which must be anchored at f(base)). Throws GraphFolded when two samples land on the
/// same F-coordinate within 1e-10.
GraphOverF transform_graph(const SmoothSystem& system, const GraphOverF& graph, const SplittingField& splitting_at_fx);

struct PropagationResult {
    GraphOverF final_graph;
    std::vector<double> trace;  // dispersion after 0, 1, ..., n steps
    bool bounded = false;       // every entry <= trace[0]
};

/// Push `graph` n times along the orbit of its base point, re-anchoring on
/// splitting(f^i x, i) at every step. All samples must lie in B_n(f, delta, x);
/// otherwise BowenBallExit names the first step at which one leaves.
PropagationResult propagate_along_bowen(const SmoothSystem& system, long n, double delta, const GraphOverF& graph,
                                        const SplittingAlongOrbit& splitting);

}  // namespace pesinlab
