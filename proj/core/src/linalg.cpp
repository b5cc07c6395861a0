#include "pesinlab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "pesinlab/error.hpp"

namespace pesinlab {

Matrix orthonormalize(const Matrix& basis) {
    const Eigen::Index k = basis.cols();
    Eigen::HouseholderQR<Matrix> qr(basis);
    const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const double scale = std::max(basis.norm(), 1e-300);
    for (Eigen::Index i = 0; i < k; ++i) {
        if (std::abs(r(i, i)) <= 1e-13 * scale)
            throw NumericalError("orthonormalize: columns are linearly dependent");
    }
    Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), k);
    // fix signs so that the basis is a continuous function of the input
    for (Eigen::Index i = 0; i < k; ++i) {
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    }
    return q;
}

Vector singular_values(const Matrix& a) {
    return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a)[0];
}

double log_volume(const Matrix& frame) {
    Eigen::HouseholderQR<Matrix> qr(frame);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < frame.cols(); ++i) acc += std::log(std::abs(qr.matrixQR()(i, i)));
    return acc;
}

double subspace_angle(const Matrix& a, const Matrix& b) {
    const Vector cosines = singular_values(a.transpose() * b);
    const double sine = operator_norm(b - a * (a.transpose() * b));
    return std::atan2(sine, cosines[cosines.size() - 1]);
}

}  // namespace pesinlab
