#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pesinlab/systems.hpp"

namespace pesinlab {

/// True iff d(f^j x, f^j y) <= delta for 0 <= j <= n.
bool in_bowen_ball(const SmoothSystem& system, const TorusPoint& x, const TorusPoint& y, long n, double delta);

/// First j in [0, n] with d(orbit[j], f^j y) > delta, or n + 1 if y stays in B_n.
/// `orbit` must hold at least n + 1 points of the orbit of x.
long bowen_exit_step(const SmoothSystem& system, const std::vector<TorusPoint>& orbit, const TorusPoint& y, long n,
                     double delta);

enum class BowenMethod { Grid, NestedMC };

std::string to_string(BowenMethod method);
BowenMethod parse_bowen_method(const std::string& name);

struct BowenParams {
    BowenMethod method = BowenMethod::Grid;
    int resolution = 4096;         // grid cells per axis (grid, d <= 2)
    std::size_t population = 2000; // points per stage (nested_mc)
    int mcmc_sweeps = 4;           // Metropolis sweeps after each resampling (nested_mc)
};

struct MeasureEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

struct BowenRecord {
    long n = 0;
    double measure = 0.0;
    double standard_error = 0.0;
    BowenMethod method = BowenMethod::Grid;
};

/// Lebesgue measure of B_k(f, delta, x) for every k in [0, n_max] from one scan.
///
/// Grid: Riemann count of cell centres on an R^d grid (d <= 2); the reported standard
/// error is sqrt(count) / R^d. Nested MC: B_0 has its exact volume, then each ratio
/// nu(B_{k+1}) / nu(B_k) is estimated from a population spread over B_k, survivors are
/// resampled and decorrelated by Metropolis moves restricted to B_{k+1}.
std::vector<BowenRecord> bowen_ball_profile(const SmoothSystem& system, const TorusPoint& x, long n_max, double delta,
                                            const BowenParams& params, std::uint64_t seed);

/// Estimate of nu(B_n(f, delta, x)).
MeasureEstimate bowen_ball_measure(const SmoothSystem& system, const TorusPoint& x, long n, double delta,
                                   const BowenParams& params, std::uint64_t seed);

}  // namespace pesinlab
