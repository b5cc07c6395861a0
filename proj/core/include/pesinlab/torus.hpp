#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pesinlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Reduce a real number to [0, 1).
double wrap_unit(double v) noexcept;

/// Reduce a real number to the shortest representative in [-1/2, 1/2).
double wrap_centered(double v) noexcept;

/// A point of the flat torus T^d = R^d / Z^d. Coordinates are always kept in [0, 1).
class TorusPoint {
public:
    TorusPoint() = default;
    explicit TorusPoint(Vector coords);
    TorusPoint(std::initializer_list<double> coords);

    int dimension() const noexcept { return static_cast<int>(coords_.size()); }
    const Vector& coords() const noexcept { return coords_; }
    double operator[](int i) const { return coords_[i]; }

    /// The point x + v, wrapped back onto the torus.
    TorusPoint shifted(const Vector& v) const;

    friend bool operator==(const TorusPoint& a, const TorusPoint& b) {
        return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
    }

private:
    Vector coords_;
};

/// Shortest lift of b - a, each coordinate in [-1/2, 1/2).
Vector torus_difference(const TorusPoint& a, const TorusPoint& b);

/// Flat-metric distance on T^d.
double torus_distance(const TorusPoint& a, const TorusPoint& b);

/// Deterministic i.i.d. uniform points on T^d. Identical (seed, count, d) gives identical output.
std::vector<TorusPoint> sample_lebesgue(std::uint64_t seed, std::size_t count, int d);

/// Seed for the index-th independent job of a run; depends only on (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Volume of the Euclidean ball of the given radius in R^d.
double ball_volume(int d, double radius);

}  // namespace pesinlab
