#pragma once

#include "pesinlab/torus.hpp"

namespace pesinlab {

/// Orthonormal basis of the column span of `basis`. Throws NumericalError when the
/// columns are (numerically) linearly dependent.
Matrix orthonormalize(const Matrix& basis);

/// Singular values in descending order.
Vector singular_values(const Matrix& a);

/// Largest singular value (operator 2-norm).
double operator_norm(const Matrix& a);

/// log of the k-dimensional volume spanned by the columns of `frame`.
double log_volume(const Matrix& frame);

/// Largest principal angle between two column spans of equal dimension (orthonormal inputs).
double subspace_angle(const Matrix& a, const Matrix& b);

}  // namespace pesinlab
