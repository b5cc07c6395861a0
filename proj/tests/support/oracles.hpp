// Independent reference computations used by the tests. Nothing here calls into the
// library's numerical routines beyond evaluating the maps themselves.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pesinlab/systems.hpp"

namespace oracle {

using pesinlab::Matrix;
using pesinlab::Vector;

inline const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
inline const double cat_lambda_u = (3.0 + std::sqrt(5.0)) / 2.0;
inline const double cat_lambda_s = (3.0 - std::sqrt(5.0)) / 2.0;
inline const double cat_entropy = std::log(cat_lambda_u);
inline const double cat_ratio = cat_lambda_s / cat_lambda_u;

// Unit eigenvectors of [[2,1],[1,1]].
inline Vector cat_unstable() {
    Vector v(2);
    v << 1.0, (std::sqrt(5.0) - 1.0) / 2.0;
    return v.normalized();
}
inline Vector cat_stable() {
    Vector v(2);
    v << -(std::sqrt(5.0) - 1.0) / 2.0, 1.0;
    return v.normalized();
}

inline Matrix column(const Vector& v) { return Matrix(v); }

// Central differences of the n-step lifted map.
inline Matrix fd_jacobian(const pesinlab::SmoothSystem& system, const Vector& x, int steps, double h = 1e-6) {
    auto lifted = [&](Vector y) {
        for (int i = 0; i < steps; ++i) y = system.forward_lift(y);
        return y;
    };
    const auto d = x.size();
    Matrix jac(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Vector dx = Vector::Zero(d);
        dx[k] = h;
        jac.col(k) = (lifted(x + dx) - lifted(x - dx)) / (2.0 * h);
    }
    return jac;
}

// Angle between two lines in R^d, from the dot product of unit vectors.
inline double line_angle(const Vector& a, const Vector& b) {
    const double c = std::abs(a.normalized().dot(b.normalized()));
    const double s = (b.normalized() - c * a.normalized()).norm();
    return std::atan2(s, c);
}

// Largest of the two oblique projection norms for lines spanned by e and f in R^2,
// maximised over `samples` unit vectors; decomposition by Cramer's rule.
inline double brute_projection_norm(const Vector& e, const Vector& f, long samples) {
    const double det = e[0] * f[1] - e[1] * f[0];
    double best = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double t = M_PI * static_cast<double>(i) / static_cast<double>(samples);
        const double v0 = std::cos(t), v1 = std::sin(t);
        const double a = (v0 * f[1] - v1 * f[0]) / det;
        const double b = (e[0] * v1 - e[1] * v0) / det;
        best = std::max({best, std::abs(a) * e.norm(), std::abs(b) * f.norm()});
    }
    return best;
}

// Contraction factor written out directly, and its critical tau by bisection.
inline double contraction_factor(double alpha, double beta, double c, double tau) {
    const double s = tau * alpha * (1.0 + c);
    return (0.5 + s / (c * beta)) / (1.0 - s / beta);
}

inline double critical_tau_bisection(double alpha, double beta, double c) {
    double lo = 0.0;
    double hi = beta / (alpha * (1.0 + c));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (contraction_factor(alpha, beta, c, mid) < 1.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Distortion of the cat map for lines tilted off the unstable direction by slope s in
// [-c, c], on a dense deterministic grid.
inline double cat_tilt_distortion(double c, long grid) {
    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    double worst = 0.0;
    for (long i = 0; i <= grid; ++i) {
        const double s = -c + 2.0 * c * static_cast<double>(i) / static_cast<double>(grid);
        const Vector l = cat_unstable() + s * cat_stable();
        worst = std::max(worst, std::abs(std::log((a * l).norm() / l.norm()) - cat_entropy));
    }
    return worst;
}

// Area of the cat-map Bowen ball B_n(delta) by 1-D quadrature in eigencoordinates.
// Valid for delta <= 0.15, where no orbit segment inside the ball can wrap around.
inline double cat_bowen_area(double delta, int n, long quad = 200000) {
    double area = 0.0;
    const double h = 2.0 * delta / static_cast<double>(quad);
    for (long i = 0; i < quad; ++i) {
        const double s = -delta + (static_cast<double>(i) + 0.5) * h;
        double half = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= n; ++j) {
            const double ls = std::pow(cat_lambda_s, j) * s;
            const double r2 = delta * delta - ls * ls;
            if (r2 <= 0) { half = 0; break; }
            half = std::min(half, std::sqrt(r2) / std::pow(cat_lambda_u, j));
        }
        area += 2.0 * half * h;
    }
    return area;
}

}  // namespace oracle
