#include "pesinlab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pesinlab/error.hpp"
#include "pesinlab/linalg.hpp"

namespace pesinlab {

namespace {

// Householder QR of `frame`; replaces it with Q (positive-diagonal convention) and
// returns log|R_ii|.
Vector reorthonormalize(Matrix& frame) {
    const Eigen::Index k = frame.cols();
    Eigen::HouseholderQR<Matrix> qr(frame);
    Matrix q = qr.householderQ() * Matrix::Identity(frame.rows(), k);
    Vector logs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double rii = qr.matrixQR()(i, i);
        if (!(std::abs(rii) >= 1e-300) || !std::isfinite(rii))
            throw NumericalError("Lyapunov frame degenerated (|R_ii| < 1e-300); reduce the QR stride");
        logs[i] = std::log(std::abs(rii));
        if (rii < 0) q.col(i) = -q.col(i);
    }
    frame = std::move(q);
    return logs;
}

bool maps_into_itself(const Matrix& a, const Matrix& basis) {
    const Matrix image = a * basis;
    const Matrix residual = image - basis * (basis.transpose() * image);
    return residual.norm() <= 1e-12 * std::max(1.0, image.norm());
}

}  // namespace

void to_json(nlohmann::json& j, const LyapunovSpectrum& s) {
    j = nlohmann::json{{"exponents", s.exponents}, {"horizon", s.horizon}, {"residual", s.residual}};
}

Matrix SplittingField::combined() const {
    Matrix m(e.rows(), e.cols() + f.cols());
    m << e, f;
    return m;
}

SplittingField make_splitting(TorusPoint base, const Matrix& e, const Matrix& f) {
    const int d = base.dimension();
    if (e.rows() != d || f.rows() != d || e.cols() + f.cols() != d)
        throw InvalidArgument("make_splitting: bundle dimensions do not add up to the ambient dimension");
    if (e.cols() == 0 || f.cols() == 0) throw InvalidArgument("make_splitting: both bundles must be non-trivial");
    SplittingField s{std::move(base), orthonormalize(e), orthonormalize(f)};
    if (std::abs(s.combined().determinant()) <= 1e-8)
        throw NumericalError("make_splitting: E and F are nearly parallel (|det[E|F]| <= 1e-8)");
    return s;
}

Matrix cocycle_product(const SmoothSystem& system, const TorusPoint& x, long n) {
    if (n < 1) throw InvalidArgument("cocycle_product: n must be at least 1");
    const int d = system.dimension();
    Matrix product = Matrix::Identity(d, d);
    TorusPoint y = x;
    for (long i = 0; i < n; ++i) {
        product = system.jacobian(y) * product;
        if (!product.allFinite() || product.cwiseAbs().maxCoeff() > 1e300)
            throw NumericalError("cocycle_product: entries overflow at step " + std::to_string(i + 1) +
                                 "; use the QR-factored form (lyapunov_spectrum_qr / det_growth_rate)");
        y = system.forward(y);
    }
    return product;
}

LyapunovSpectrum lyapunov_spectrum_qr(const SmoothSystem& system, const TorusPoint& x, long n, int qr_stride,
                                      std::optional<long> warmup) {
    if (n < 100) throw InvalidArgument("lyapunov_spectrum_qr: n must be at least 100");
    if (qr_stride < 1 || qr_stride > 10) throw InvalidArgument("lyapunov_spectrum_qr: qr_stride must be in [1, 10]");
    const long relax = warmup.value_or(std::min<long>(n / 10, 100));
    if (relax < 0) throw InvalidArgument("lyapunov_spectrum_qr: warmup must be non-negative");

    const int d = system.dimension();
    Matrix frame = Matrix::Identity(d, d);

    // relax along the backward orbit of x, pushing forward through the stored preimages
    std::vector<TorusPoint> preimages;
    preimages.reserve(static_cast<std::size_t>(relax));
    TorusPoint back = x;
    for (long i = 0; i < relax; ++i) {
        back = system.inverse(back);
        preimages.push_back(back);
    }
    for (long i = relax; i >= 1; --i) {
        frame = system.jacobian(preimages[static_cast<std::size_t>(i - 1)]) * frame;
        if ((relax - i + 1) % qr_stride == 0 || i == 1) reorthonormalize(frame);
    }

    TorusPoint y = x;
    Vector sums = Vector::Zero(d);
    const long tail_start = n - n / 10;
    std::vector<Vector> tail;
    for (long step = 1; step <= n; ++step) {
        frame = system.jacobian(y) * frame;
        y = system.forward(y);
        if (step % qr_stride == 0 || step == n) {
            sums += reorthonormalize(frame);
            if (step >= tail_start) tail.emplace_back(sums / static_cast<double>(step));
        }
    }

    const Vector final_estimate = sums / static_cast<double>(n);
    double residual = 0.0;
    for (const auto& est : tail) residual = std::max(residual, (est - final_estimate).cwiseAbs().maxCoeff());

    LyapunovSpectrum out;
    out.exponents.assign(final_estimate.data(), final_estimate.data() + d);
    std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
    out.horizon = n;
    out.residual = residual;
    return out;
}

OseledecResult finite_time_oseledec_splitting(const SmoothSystem& system, const TorusPoint& x, long n, int j,
                                              double gap_threshold) {
    const int d = system.dimension();
    if (j < 1 || j > d - 1) throw InvalidArgument("finite_time_oseledec_splitting: j must be in [1, d-1]");
    if (n < 1) throw InvalidArgument("finite_time_oseledec_splitting: n must be at least 1");

    // Exponents from QR accumulation: the smallest singular values of the raw product
    // sink below double precision relative to the largest after a few dozen steps.
    OseledecResult result;
    Matrix frame = Matrix::Identity(d, d);
    Vector sums = Vector::Zero(d);
    TorusPoint y = x;
    for (long i = 0; i < n; ++i) {
        frame = system.jacobian(y) * frame;
        y = system.forward(y);
        sums += reorthonormalize(frame);
    }
    result.finite_time_exponents.assign(sums.data(), sums.data() + d);
    for (double& v : result.finite_time_exponents) v /= static_cast<double>(n);
    std::sort(result.finite_time_exponents.begin(), result.finite_time_exponents.end(), std::greater<>());
    result.gap = result.finite_time_exponents[static_cast<std::size_t>(j - 1)] -
                 result.finite_time_exponents[static_cast<std::size_t>(j)];
    if (!(result.gap > gap_threshold)) return result;

    Matrix future = cocycle_product(system, x, n);
    future /= future.cwiseAbs().maxCoeff();
    const Eigen::JacobiSVD<Matrix> svd_future(future, Eigen::ComputeFullV);

    const auto preimages = backward_orbit(system, x, n);
    Matrix past = Matrix::Identity(d, d);
    for (long i = n; i >= 1; --i) {
        past = system.jacobian(preimages[static_cast<std::size_t>(i)]) * past;
        past /= past.cwiseAbs().maxCoeff();
    }
    const Eigen::JacobiSVD<Matrix> svd_past(past, Eigen::ComputeFullU);

    const Matrix e = svd_future.matrixV().rightCols(d - j);
    const Matrix f = svd_past.matrixU().leftCols(j);
    result.splitting = make_splitting(x, e, f);
    return result;
}

double chi(const LyapunovSpectrum& spectrum, int j) {
    if (j < 0 || j > static_cast<int>(spectrum.exponents.size()))
        throw InvalidArgument("chi: j must be in [0, d]");
    double acc = 0.0;
    for (int i = 0; i < j; ++i) acc += spectrum.exponents[static_cast<std::size_t>(i)];
    return acc;
}

double det_growth_rate(const SmoothSystem& system, const TorusPoint& x, const Matrix& f, long n) {
    if (n < 10) throw InvalidArgument("det_growth_rate: n must be at least 10");
    if (f.rows() != system.dimension() || f.cols() < 1)
        throw InvalidArgument("det_growth_rate: subspace basis has the wrong shape");
    const Matrix gram = f.transpose() * f;
    if (!gram.isIdentity(1e-10)) throw InvalidArgument("det_growth_rate: basis columns must be orthonormal");

    Matrix frame = f;
    TorusPoint y = x;
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        frame = system.jacobian(y) * frame;
        y = system.forward(y);
        acc += reorthonormalize(frame).sum();
    }
    return acc / static_cast<double>(n);
}

SplittingAlongOrbit pushed_splitting(const SmoothSystem& system, const SplittingField& at_x) {
    if (system.constant_jacobian()) {
        const Matrix a = system.jacobian(at_x.base);
        if (maps_into_itself(a, at_x.e) && maps_into_itself(a, at_x.f)) {
            return [at_x](const TorusPoint& point, long) {
                return SplittingField{point, at_x.e, at_x.f};
            };
        }
    }
    return [system, at_x](const TorusPoint& point, long index) {
        Matrix e = at_x.e;
        Matrix f = at_x.f;
        TorusPoint y = at_x.base;
        if (index >= 0) {
            for (long i = 0; i < index; ++i) {
                const Matrix jac = system.jacobian(y);
                e = orthonormalize(jac * e);
                f = orthonormalize(jac * f);
                y = system.forward(y);
            }
        } else {
            for (long i = 0; i < -index; ++i) {
                y = system.inverse(y);
                const Matrix jac_inv = system.jacobian(y).inverse();
                e = orthonormalize(jac_inv * e);
                f = orthonormalize(jac_inv * f);
            }
        }
        return make_splitting(point, e, f);
    };
}

SplittingAlongOrbit oseledec_splitting_along(const SmoothSystem& system, long n, int j, double gap_threshold) {
    return [system, n, j, gap_threshold](const TorusPoint& point, long index) {
        auto result = finite_time_oseledec_splitting(system, point, n, j, gap_threshold);
        if (!result.determinate())
            throw NumericalError("finite-time splitting unavailable at orbit index " + std::to_string(index) +
                                 " (gap " + std::to_string(result.gap) + ")");
        return *result.splitting;
    };
}

}  // namespace pesinlab
