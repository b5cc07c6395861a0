#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/systems.hpp"

namespace pesinlab {

/// Finite-time Lyapunov exponents along one orbit.
struct LyapunovSpectrum {
    std::vector<double> exponents;  // descending, nats per iterate
    long horizon = 0;
    double residual = 0.0;          // max drift of any running estimate over the last 10% of steps
};

void to_json(nlohmann::json& j, const LyapunovSpectrum& s);

/// A splitting T_x T^d = E (+) F with orthonormal bases for both bundles.
struct SplittingField {
    TorusPoint base;
    Matrix e;  // d x k
    Matrix f;  // d x j

    int dim_e() const { return static_cast<int>(e.cols()); }
    int dim_f() const { return static_cast<int>(f.cols()); }
    /// [E | F]
    Matrix combined() const;
};

/// Orthonormalize both bases and check transversality (|det[E|F]| > 1e-8).
SplittingField make_splitting(TorusPoint base, const Matrix& e, const Matrix& f);

/// Splitting at f^index(x), given the orbit point itself.
using SplittingAlongOrbit = std::function<SplittingField(const TorusPoint& point, long index)>;

/// D_x f^n = J(f^{n-1} x) ... J(x). Throws NumericalError once entries leave double range.
Matrix cocycle_product(const SmoothSystem& system, const TorusPoint& x, long n);

/// Benettin QR algorithm. The frame is first relaxed along the `warmup` preimages of x
/// (default min(n/10, 100)) so that accumulation starts from an adapted frame at x.
LyapunovSpectrum lyapunov_spectrum_qr(const SmoothSystem& system, const TorusPoint& x, long n,
                                      int qr_stride = 1, std::optional<long> warmup = std::nullopt);

struct OseledecResult {
    std::optional<SplittingField> splitting;  // empty when the spectral gap is too small
    std::vector<double> finite_time_exponents;  // (1/n) sum log|R_ii| of the QR-factored D_x f^n, descending
    double gap = 0.0;                           // lambda_j - lambda_{j+1}

    bool determinate() const { return splitting.has_value(); }
};

/// Finite-time Oseledec splitting with dim F = j.
///
/// F(x) is the top-j left singular subspace of D_{f^{-n}x} f^n (directions that the past
/// expanded the most); E(x) is the bottom-(d-j) right singular subspace of D_x f^n
/// (directions the future contracts the most).
OseledecResult finite_time_oseledec_splitting(const SmoothSystem& system, const TorusPoint& x, long n, int j,
                                              double gap_threshold = 1e-3);

/// Sum of the j largest exponents.
double chi(const LyapunovSpectrum& spectrum, int j);

/// (1/n) log |det D_x f^n restricted to span(f)|, through per-step volume ratios.
double det_growth_rate(const SmoothSystem& system, const TorusPoint& x, const Matrix& f, long n);

/// Splitting transported by the derivative cocycle from `at_x`. Bundles that a constant
/// cocycle maps into themselves are kept fixed.
SplittingAlongOrbit pushed_splitting(const SmoothSystem& system, const SplittingField& at_x);

/// Splitting recomputed with finite_time_oseledec_splitting at every orbit point.
/// Throws NumericalError if the gap closes somewhere.
SplittingAlongOrbit oseledec_splitting_along(const SmoothSystem& system, long n, int j,
                                             double gap_threshold = 1e-3);

}  // namespace pesinlab
