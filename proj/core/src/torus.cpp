#include "pesinlab/torus.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pesinlab/error.hpp"

namespace pesinlab {

double wrap_unit(double v) noexcept {
    double w = v - std::floor(v);
    // v slightly below an integer can round up to exactly 1.0
    return w >= 1.0 ? 0.0 : w;
}

double wrap_centered(double v) noexcept {
    return v - std::floor(v + 0.5);
}

TorusPoint::TorusPoint(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 1) throw InvalidArgument("TorusPoint: dimension must be at least 1");
    for (Eigen::Index i = 0; i < coords_.size(); ++i) {
        if (!std::isfinite(coords_[i])) throw InvalidArgument("TorusPoint: non-finite coordinate");
        coords_[i] = wrap_unit(coords_[i]);
    }
}

TorusPoint::TorusPoint(std::initializer_list<double> coords)
    : TorusPoint(Eigen::Map<const Vector>(coords.begin(), static_cast<Eigen::Index>(coords.size()))) {}

TorusPoint TorusPoint::shifted(const Vector& v) const {
    if (v.size() != coords_.size()) throw InvalidArgument("TorusPoint::shifted: dimension mismatch");
    return TorusPoint(Vector(coords_ + v));
}

Vector torus_difference(const TorusPoint& a, const TorusPoint& b) {
    if (a.dimension() != b.dimension()) {
        throw InvalidArgument("torus_difference: dimension mismatch (" + std::to_string(a.dimension()) +
                              " vs " + std::to_string(b.dimension()) + ")");
    }
    Vector diff = b.coords() - a.coords();
    for (Eigen::Index i = 0; i < diff.size(); ++i) diff[i] = wrap_centered(diff[i]);
    return diff;
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
    return torus_difference(a, b).norm();
}

std::vector<TorusPoint> sample_lebesgue(std::uint64_t seed, std::size_t count, int d) {
    if (count == 0) throw InvalidArgument("sample_lebesgue: count must be at least 1");
    if (d < 1) throw InvalidArgument("sample_lebesgue: dimension must be at least 1");
    std::mt19937_64 engine(seed);
    std::vector<TorusPoint> points;
    points.reserve(count);
    Vector c(d);
    for (std::size_t k = 0; k < count; ++k) {
        for (int i = 0; i < d; ++i) c[i] = uniform01(engine);
        points.emplace_back(c);
    }
    return points;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    // splitmix64 finalizer of the index, xored into the master seed
    std::uint64_t z = index + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return master ^ z;
}

double ball_volume(int d, double radius) {
    const double half = 0.5 * d;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(radius, d);
}

}  // namespace pesinlab
