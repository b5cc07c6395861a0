#include "pesinlab/domination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pesinlab/error.hpp"
#include "pesinlab/linalg.hpp"

namespace pesinlab {

double minimal_norm(const Matrix& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("minimal_norm: matrix must be square");
    return minimal_norm(a, Matrix::Identity(a.rows(), a.cols()));
}

double minimal_norm(const Matrix& a, const Matrix& basis) {
    const Vector s = singular_values(a * basis);
    const double smallest = s[s.size() - 1];
    if (!(smallest > 1e-14 * std::max(s[0], 1e-300)))
        throw NumericalError("minimal_norm: restricted map is rank deficient");
    return smallest;
}

double restricted_norm(const Matrix& a, const Matrix& basis) {
    return operator_norm(a * basis);
}

void to_json(nlohmann::json& j, const DominationReport& r) {
    j = nlohmann::json{{"tested_N", r.tested_n},
                       {"N", r.n ? nlohmann::json(*r.n) : nlohmann::json(nullptr)},
                       {"worst_ratio", r.worst_ratio},
                       {"window", r.window},
                       {"per_index_ratios", r.per_index_ratios}};
}

DominationReport domination_ratio(const SmoothSystem& system, const TorusPoint& x,
                                  const SplittingAlongOrbit& splitting, int n, long window) {
    if (n < 1) throw InvalidArgument("domination_ratio: N must be at least 1");
    if (window < 0) throw InvalidArgument("domination_ratio: window must be non-negative");

    DominationReport report;
    report.tested_n = n;
    report.window = window;
    report.per_index_ratios.reserve(static_cast<std::size_t>(2 * window + 1));

    const auto past = backward_orbit(system, x, window);
    TorusPoint y = past.back();
    for (long j = -window; j <= window; ++j) {
        if (j <= 0) y = past[static_cast<std::size_t>(-j)];
        SplittingField s;
        try {
            s = splitting(y, j);
        } catch (const Error& e) {
            throw NumericalError("domination_ratio: splitting unavailable at orbit index " + std::to_string(j) +
                                 ": " + e.what());
        }
        const Matrix dfn = cocycle_product(system, y, n);
        const double top = restricted_norm(dfn, s.e);
        const double bottom = minimal_norm(dfn, s.f);
        report.per_index_ratios.push_back(top / bottom);
        if (j >= 0) y = system.forward(y);
    }
    report.worst_ratio = *std::max_element(report.per_index_ratios.begin(), report.per_index_ratios.end());
    if (report.worst_ratio <= domination_threshold) report.n = n;
    return report;
}

std::optional<int> minimal_domination_n(const SmoothSystem& system, const TorusPoint& x,
                                        const SplittingAlongOrbit& splitting, int n_max, long window) {
    if (n_max < 1) throw InvalidArgument("minimal_domination_N: N_max must be at least 1");
    for (int n = 1; n <= n_max; ++n) {
        if (domination_ratio(system, x, splitting, n, window).certified()) return n;
    }
    return std::nullopt;
}

double gamma_projection_norm(const SplittingField& splitting) {
    const Matrix basis = splitting.combined();
    if (std::abs(basis.determinant()) <= 1e-8)
        throw NumericalError("gamma_projection_norm: splitting is nearly degenerate");
    const Matrix coords = basis.inverse();
    const Eigen::Index k = splitting.e.cols();
    const Matrix pi_e = splitting.e * coords.topRows(k);
    const Matrix pi_f = splitting.f * coords.bottomRows(basis.cols() - k);
    return std::max(operator_norm(pi_e), operator_norm(pi_f));
}

std::string to_string(DichotomyKind kind) {
    switch (kind) {
        case DichotomyKind::TrivialSpectrum: return "TrivialSpectrum";
        case DichotomyKind::Dominated: return "Dominated";
        case DichotomyKind::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

void to_json(nlohmann::json& j, const DichotomyVerdict& v) {
    j = nlohmann::json{{"verdict", to_string(v.kind)},
                       {"N", v.n ? nlohmann::json(*v.n) : nlohmann::json(nullptr)},
                       {"j", v.j ? nlohmann::json(*v.j) : nlohmann::json(nullptr)},
                       {"spectrum", v.spectrum},
                       {"gaps", v.gaps},
                       {"worst_ratios", v.worst_ratios},
                       {"note", v.note}};
}

DichotomyVerdict dichotomy_classify(const SmoothSystem& system, const TorusPoint& x, const DichotomyParams& params) {
    if (params.n < 500) throw InvalidArgument("dichotomy_classify: n must be at least 500");
    if (params.n_max < 1) throw InvalidArgument("dichotomy_classify: N_max must be at least 1");
    if (params.window < 0) throw InvalidArgument("dichotomy_classify: window must be non-negative");
    if (!(params.gap_threshold > 0)) throw InvalidArgument("dichotomy_classify: gap_threshold must be positive");

    DichotomyVerdict verdict;
    verdict.spectrum = lyapunov_spectrum_qr(system, x, params.n);
    const auto& ex = verdict.spectrum.exponents;
    const int d = static_cast<int>(ex.size());
    for (int i = 0; i + 1 < d; ++i) verdict.gaps.push_back(ex[static_cast<std::size_t>(i)] - ex[static_cast<std::size_t>(i + 1)]);

    double largest = 0.0;
    for (double l : ex) largest = std::max(largest, std::abs(l));
    if (largest < params.gap_threshold) {
        verdict.kind = DichotomyKind::TrivialSpectrum;
        verdict.note = "all exponents below the gap threshold";
        return verdict;
    }

    for (int j = 1; j < d; ++j) {
        if (verdict.gaps[static_cast<std::size_t>(j - 1)] < params.gap_threshold) continue;
        const auto splitting = oseledec_splitting_along(system, params.splitting_horizon, j);
        try {
            double last_ratio = std::numeric_limits<double>::infinity();
            for (int n = 1; n <= params.n_max; ++n) {
                const auto report = domination_ratio(system, x, splitting, n, params.window);
                last_ratio = report.worst_ratio;
                if (report.certified()) {
                    verdict.worst_ratios.push_back(report.worst_ratio);
                    verdict.kind = DichotomyKind::Dominated;
                    verdict.n = n;
                    verdict.j = j;
                    verdict.note = "finite-window certificate";
                    return verdict;
                }
            }
            verdict.worst_ratios.push_back(last_ratio);
        } catch (const NumericalError&) {
            verdict.worst_ratios.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    verdict.kind = DichotomyKind::Indeterminate;
    verdict.note = "spectrum is non-trivial but no gap index was certified dominated within N_max";
    return verdict;
}

}  // namespace pesinlab
