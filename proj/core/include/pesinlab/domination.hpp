#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/cocycle.hpp"

namespace pesinlab {

/// Threshold of the N-domination test, ||Df^N|E|| / m(Df^N|F) <= 1/2.
inline constexpr double domination_threshold = 0.5;

/// m(A) = ||A^{-1}||^{-1}, the smallest singular value. Throws NumericalError on rank deficiency.
double minimal_norm(const Matrix& a);

/// m(A|_span(basis)): smallest singular value of A * basis (basis orthonormal).
double minimal_norm(const Matrix& a, const Matrix& basis);

/// ||A|_span(basis)||: largest singular value of A * basis.
double restricted_norm(const Matrix& a, const Matrix& basis);

struct DominationReport {
    int tested_n = 0;
    std::optional<int> n;  // set iff worst_ratio <= 1/2
    double worst_ratio = 0.0;
    long window = 0;  // indices j in [-window, window]
    std::vector<double> per_index_ratios;  // index -window first

    bool certified() const { return n.has_value(); }
};

void to_json(nlohmann::json& j, const DominationReport& r);

/// Evaluate the N-domination ratio at f^j(x) for every j in [-window, window].
/// Throws NumericalError naming the orbit index if the splitting cannot be obtained there.
DominationReport domination_ratio(const SmoothSystem& system, const TorusPoint& x,
                                  const SplittingAlongOrbit& splitting, int n, long window);

/// Smallest N <= n_max certified by domination_ratio, or nullopt.
std::optional<int> minimal_domination_n(const SmoothSystem& system, const TorusPoint& x,
                                        const SplittingAlongOrbit& splitting, int n_max, long window);

/// gamma(E, F): larger of the norms of the two oblique projections of the splitting. Always >= 1.
double gamma_projection_norm(const SplittingField& splitting);

struct DichotomyParams {
    long n = 2000;               // Lyapunov horizon
    int n_max = 10;              // largest domination time searched
    long window = 10;            // orbit window for the domination test
    double gap_threshold = 1e-2;
    long splitting_horizon = 40; // horizon of the finite-time Oseledec bundles
};

enum class DichotomyKind { TrivialSpectrum, Dominated, Indeterminate };

std::string to_string(DichotomyKind kind);

/// Finite-horizon classification of the Oseledec splitting at x as trivial, dominated or neither.
struct DichotomyVerdict {
    DichotomyKind kind = DichotomyKind::Indeterminate;
    std::optional<int> n;  // certified domination time (Dominated only)
    std::optional<int> j;  // dim F (Dominated only)
    LyapunovSpectrum spectrum;
    std::vector<double> gaps;          // lambda_i - lambda_{i+1}
    std::vector<double> worst_ratios;  // worst ratio at the largest N tried, per gap index tested
    std::string note;
};

void to_json(nlohmann::json& j, const DichotomyVerdict& v);

DichotomyVerdict dichotomy_classify(const SmoothSystem& system, const TorusPoint& x, const DichotomyParams& params = {});

}  // namespace pesinlab
