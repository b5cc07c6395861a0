#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/torus.hpp"

namespace pesinlab {

/// A diffeomorphism of T^d given by a lift to R^d, its inverse and its Jacobian.
///
/// Instances are immutable and cheap to copy (shared implementation), so they
/// can be handed to worker threads freely.
class SmoothSystem {
public:
    /// Implementation interface. `forward_lift` and `inverse_lift` act on R^d and
    /// must commute with integer translations up to an integer vector.
    class Model {
    public:
        virtual ~Model() = default;
        virtual int dimension() const = 0;
        virtual Vector forward_lift(const Vector& x) const = 0;
        virtual Vector inverse_lift(const Vector& x) const = 0;
        virtual Matrix jacobian(const Vector& x) const = 0;
        /// True when the Jacobian does not depend on the point.
        virtual bool constant_jacobian() const { return false; }
    };

    SmoothSystem(std::shared_ptr<const Model> model, nlohmann::json descriptor, bool volume_preserving);

    /// Wrap arbitrary callables; used for test stubs and user-defined maps.
    static SmoothSystem custom(std::string name, int dimension,
                               std::function<Vector(const Vector&)> forward,
                               std::function<Vector(const Vector&)> inverse,
                               std::function<Matrix(const Vector&)> jacobian,
                               bool volume_preserving, bool constant_jacobian = false);

    int dimension() const { return model_->dimension(); }
    TorusPoint forward(const TorusPoint& x) const;
    TorusPoint inverse(const TorusPoint& x) const;
    Vector forward_lift(const Vector& x) const { return model_->forward_lift(x); }
    Vector inverse_lift(const Vector& x) const { return model_->inverse_lift(x); }
    Matrix jacobian(const TorusPoint& x) const { return model_->jacobian(x.coords()); }
    Matrix jacobian_lift(const Vector& x) const { return model_->jacobian(x); }

    bool constant_jacobian() const { return model_->constant_jacobian(); }
    bool volume_preserving() const noexcept { return volume_preserving_; }
    const nlohmann::json& descriptor() const noexcept { return descriptor_; }
    std::string name() const;

    const std::shared_ptr<const Model>& model() const noexcept { return model_; }

private:
    std::shared_ptr<const Model> model_;
    nlohmann::json descriptor_;
    bool volume_preserving_;
};

/// Descriptor builders for the built-in systems (JSON objects accepted by make_system).
namespace builtin {
nlohmann::json cat_map();
nlohmann::json linear_automorphism(const std::vector<std::vector<long>>& matrix);
nlohmann::json identity(int dimension);
nlohmann::json perturbed_cat(double epsilon);
nlohmann::json rotation(const std::vector<double>& angles);
nlohmann::json standard_map(double k);
nlohmann::json block(const std::vector<nlohmann::json>& parts);
nlohmann::json power(const nlohmann::json& base, int n);
}  // namespace builtin

/// Instantiate a system from its descriptor. Throws InvalidArgument with the reason
/// on unknown names, unknown keys, non-integer matrices or |det| != 1.
SmoothSystem make_system(const nlohmann::json& descriptor);

/// f^steps(x); negative steps iterate the inverse.
TorusPoint apply_map(const SmoothSystem& system, const TorusPoint& x, long steps);

/// The orbit x, f(x), ..., f^n(x).
std::vector<TorusPoint> forward_orbit(const SmoothSystem& system, const TorusPoint& x, long n);

/// The preimages x, f^{-1}(x), ..., f^{-n}(x). Re-iterating forward from f^{-n}(x) does
/// not return to x for expanding maps, so cocycles over the past must use these points.
std::vector<TorusPoint> backward_orbit(const SmoothSystem& system, const TorusPoint& x, long n);

/// The system g = f^n, with Jacobian by the chain rule.
SmoothSystem power_system(const SmoothSystem& system, int n);

/// The system f^{-1}.
SmoothSystem inverse_system(const SmoothSystem& system);

/// Largest |log|det Df|| over `samples` Lebesgue points. Throws NumericalError naming
/// the point if a singular Jacobian is met.
double check_volume_preserving(const SmoothSystem& system, std::size_t samples, std::uint64_t seed);

}  // namespace pesinlab
