#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/bowen.hpp"
#include "pesinlab/cocycle.hpp"

namespace pesinlab {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // weighted RMS residual
};

/// Weighted least-squares line through (xs, ys).
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& weights);

/// Bowen-ball measures over a fit range and the fitted decay rate of -log nu(B_n).
struct BowenEstimate {
    TorusPoint x;
    double delta = 0.0;
    std::vector<BowenRecord> records;  // n in [fit_min, fit_max]
    long fit_min = 0;
    long fit_max = 0;
    double slope = 0.0;
    double residual = 0.0;
};

void to_json(nlohmann::json& j, const BowenEstimate& e);

/// CSV with columns n,measure,stderr,method.
std::string to_csv(const BowenEstimate& e);

/// Finite-horizon local entropy: inverse-variance weighted slope of -log nu(B_n) over
/// n in [n_min, n_max]. Throws NumericalError if some measure estimate is zero.
BowenEstimate local_entropy_estimate(const SmoothSystem& system, const TorusPoint& x, double delta, long n_min,
                                     long n_max, const BowenParams& params, std::uint64_t seed);

/// Length of {t in [-delta, delta] : x + offset e_E + t e_F in B_n(f, delta, x)} on a
/// midpoint grid of `resolution` points (d = 2, one-dimensional bundles).
double slice_bowen_measure(const SmoothSystem& system, const SplittingField& splitting, double offset, long n,
                           double delta, std::size_t resolution);

struct DistortionEstimate {
    double epsilon = 0.0;
    double standard_error = 0.0;  // spread of batch maxima
    std::size_t samples = 0;
};

/// Empirical sup of |log|det D_y f|_L| - log|det D_x f|_F(x)|| over points y with
/// d(x, y) < radius and subspaces L that are graphs over F(x) with dispersion < c.
DistortionEstimate distortion_epsilon(const SmoothSystem& system, const SplittingField& splitting, double radius,
                                      double c, std::size_t sample_count, std::uint64_t seed);

/// Largest radius (by bisection below r_max) whose distortion estimate stays below target.
double radius_for_distortion(const SmoothSystem& system, const SplittingField& splitting, double c, double target,
                             double r_max, std::size_t sample_count, std::uint64_t seed, int iterations = 30);

struct PointEntropy {
    std::size_t index = 0;
    TorusPoint x;
    std::optional<double> local_entropy;
    std::string error;
};

struct ManeBound {
    double bound = 0.0;
    double standard_error = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    std::vector<PointEntropy> per_point;
};

void to_json(nlohmann::json& j, const ManeBound& m);

/// Monte-Carlo estimate of the integral of h_nu(f, delta, x) over Lebesgue-distributed
/// points. Points whose estimator fails are reported and excluded.
ManeBound mane_lower_bound(const SmoothSystem& system, double delta, std::size_t point_count, long n_min, long n_max,
                           const BowenParams& params, std::uint64_t seed, unsigned workers = 1);

/// Number of exponents >= -gap_threshold.
int nonnegative_count(const LyapunovSpectrum& spectrum, double gap_threshold);

/// Fractions of Lebesgue points by the number j of nonnegative finite-time exponents.
std::map<int, double> sigma_partition(const SmoothSystem& system, std::size_t samples, long n, double gap_threshold,
                                      std::uint64_t seed, unsigned workers = 1);

struct PesinConfig {
    std::vector<double> deltas{0.05, 0.1, 0.2};
    long n_min = 2;
    long n_max = 6;
    BowenParams bowen;
    std::size_t points = 20;
    long lyapunov_n = 2000;
    double gap_threshold = 1e-2;
    double tol = 0.1;
    std::uint64_t seed = 0;
};

enum class PesinVerdict { FormulaHolds, InequalityOnly, Inconclusive };

std::string to_string(PesinVerdict v);

struct PesinReport {
    nlohmann::json system;
    PesinConfig config;
    double mane_lower_bound = 0.0;
    double mane_standard_error = 0.0;
    double best_delta = 0.0;
    std::vector<ManeBound> per_delta;  // aligned with config.deltas
    double ruelle_upper_bound = 0.0;
    double ruelle_standard_error = 0.0;
    double chi_integral = 0.0;
    std::map<int, double> sigma_weights;
    std::map<int, double> class_bounds;  // Mane bound per Sigma_j at best_delta
    std::size_t excluded = 0;
    PesinVerdict verdict = PesinVerdict::Inconclusive;
    std::string note;
};

void to_json(nlohmann::json& j, const PesinReport& r);

/// Both sides of the entropy formula on one Lebesgue sample: the Mane lower bound
/// (sup over the configured deltas, aggregated over Sigma_j classes by their weights)
/// and the Ruelle upper bound (mean sum of nonnegative exponents).
PesinReport pesin_report(const SmoothSystem& system, const PesinConfig& config, unsigned workers = 1);

}  // namespace pesinlab
