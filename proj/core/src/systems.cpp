#include "pesinlab/systems.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "pesinlab/error.hpp"

namespace pesinlab {

namespace {

using nlohmann::json;

constexpr double two_pi = 2.0 * std::numbers::pi;

class LinearModel final : public SmoothSystem::Model {
public:
    LinearModel(Matrix m, Matrix inv) : m_(std::move(m)), inv_(std::move(inv)) {}
    int dimension() const override { return static_cast<int>(m_.rows()); }
    Vector forward_lift(const Vector& x) const override { return m_ * x; }
    Vector inverse_lift(const Vector& x) const override { return inv_ * x; }
    Matrix jacobian(const Vector&) const override { return m_; }
    bool constant_jacobian() const override { return true; }

private:
    Matrix m_;
    Matrix inv_;
};

class RotationModel final : public SmoothSystem::Model {
public:
    explicit RotationModel(Vector angles) : angles_(std::move(angles)) {}
    int dimension() const override { return static_cast<int>(angles_.size()); }
    Vector forward_lift(const Vector& x) const override { return x + angles_; }
    Vector inverse_lift(const Vector& x) const override { return x - angles_; }
    Matrix jacobian(const Vector&) const override { return Matrix::Identity(dimension(), dimension()); }
    bool constant_jacobian() const override { return true; }

private:
    Vector angles_;
};

// Cat map composed after the shear (x, y) -> (x + eps sin(2 pi y), y).
class PerturbedCatModel final : public SmoothSystem::Model {
public:
    explicit PerturbedCatModel(double eps) : eps_(eps) {}
    int dimension() const override { return 2; }
    Vector forward_lift(const Vector& p) const override {
        const double sx = p[0] + eps_ * std::sin(two_pi * p[1]);
        const double sy = p[1];
        return Vector{{2.0 * sx + sy, sx + sy}};
    }
    Vector inverse_lift(const Vector& q) const override {
        const double sx = q[0] - q[1];
        const double sy = -q[0] + 2.0 * q[1];
        return Vector{{sx - eps_ * std::sin(two_pi * sy), sy}};
    }
    Matrix jacobian(const Vector& p) const override {
        const double shear = two_pi * eps_ * std::cos(two_pi * p[1]);
        Matrix j(2, 2);
        j << 2.0, 2.0 * shear + 1.0,
             1.0, shear + 1.0;
        return j;
    }

private:
    double eps_;
};

// (x, y) -> (x + y', y') with y' = y + (K / 2 pi) sin(2 pi x)
class StandardMapModel final : public SmoothSystem::Model {
public:
    explicit StandardMapModel(double k) : k_(k) {}
    int dimension() const override { return 2; }
    Vector forward_lift(const Vector& p) const override {
        const double kick = k_ / two_pi * std::sin(two_pi * p[0]);
        const double y = p[1] + kick;
        return Vector{{p[0] + y, y}};
    }
    Vector inverse_lift(const Vector& q) const override {
        const double x = q[0] - q[1];
        const double y = q[1] - k_ / two_pi * std::sin(two_pi * x);
        return Vector{{x, y}};
    }
    Matrix jacobian(const Vector& p) const override {
        const double kc = k_ * std::cos(two_pi * p[0]);
        Matrix j(2, 2);
        j << 1.0 + kc, 1.0,
             kc, 1.0;
        return j;
    }
    bool constant_jacobian() const override { return k_ == 0.0; }

private:
    double k_;
};

class BlockModel final : public SmoothSystem::Model {
public:
    explicit BlockModel(std::vector<SmoothSystem> parts) : parts_(std::move(parts)) {
        for (const auto& p : parts_) {
            offsets_.push_back(dim_);
            dim_ += p.dimension();
        }
    }
    int dimension() const override { return dim_; }
    Vector forward_lift(const Vector& x) const override {
        Vector out(dim_);
        for (std::size_t b = 0; b < parts_.size(); ++b) {
            const int d = parts_[b].dimension();
            out.segment(offsets_[b], d) = parts_[b].forward_lift(x.segment(offsets_[b], d));
        }
        return out;
    }
    Vector inverse_lift(const Vector& x) const override {
        Vector out(dim_);
        for (std::size_t b = 0; b < parts_.size(); ++b) {
            const int d = parts_[b].dimension();
            out.segment(offsets_[b], d) = parts_[b].inverse_lift(x.segment(offsets_[b], d));
        }
        return out;
    }
    Matrix jacobian(const Vector& x) const override {
        Matrix j = Matrix::Zero(dim_, dim_);
        for (std::size_t b = 0; b < parts_.size(); ++b) {
            const int d = parts_[b].dimension();
            j.block(offsets_[b], offsets_[b], d, d) = parts_[b].jacobian_lift(x.segment(offsets_[b], d));
        }
        return j;
    }
    bool constant_jacobian() const override {
        for (const auto& p : parts_)
            if (!p.constant_jacobian()) return false;
        return true;
    }

private:
    std::vector<SmoothSystem> parts_;
    std::vector<int> offsets_;
    int dim_ = 0;
};

class PowerModel final : public SmoothSystem::Model {
public:
    PowerModel(SmoothSystem base, int n) : base_(std::move(base)), n_(n) {}
    int dimension() const override { return base_.dimension(); }
    // Iterates are wrapped between steps: an unwrapped lift of f^n grows like the
    // expansion rate and loses every significant digit of the fractional part.
    Vector forward_lift(const Vector& x) const override {
        Vector y = x;
        for (int i = 0; i < n_; ++i) y = TorusPoint(base_.forward_lift(y)).coords();
        return y;
    }
    Vector inverse_lift(const Vector& x) const override {
        Vector y = x;
        for (int i = 0; i < n_; ++i) y = TorusPoint(base_.inverse_lift(y)).coords();
        return y;
    }
    Matrix jacobian(const Vector& x) const override {
        TorusPoint y(x);
        Matrix j = Matrix::Identity(dimension(), dimension());
        for (int i = 0; i < n_; ++i) {
            j = base_.jacobian(y) * j;
            y = base_.forward(y);
        }
        return j;
    }
    bool constant_jacobian() const override { return base_.constant_jacobian(); }

private:
    SmoothSystem base_;
    int n_;
};

class InverseModel final : public SmoothSystem::Model {
public:
    explicit InverseModel(SmoothSystem base) : base_(std::move(base)) {}
    int dimension() const override { return base_.dimension(); }
    Vector forward_lift(const Vector& x) const override { return base_.inverse_lift(x); }
    Vector inverse_lift(const Vector& x) const override { return base_.forward_lift(x); }
    Matrix jacobian(const Vector& x) const override {
        return base_.jacobian_lift(base_.inverse_lift(x)).inverse();
    }
    bool constant_jacobian() const override { return base_.constant_jacobian(); }

private:
    SmoothSystem base_;
};

class CustomModel final : public SmoothSystem::Model {
public:
    CustomModel(int d, std::function<Vector(const Vector&)> f, std::function<Vector(const Vector&)> g,
                std::function<Matrix(const Vector&)> j, bool constant)
        : d_(d), f_(std::move(f)), g_(std::move(g)), j_(std::move(j)), constant_(constant) {}
    int dimension() const override { return d_; }
    Vector forward_lift(const Vector& x) const override { return f_(x); }
    Vector inverse_lift(const Vector& x) const override { return g_(x); }
    Matrix jacobian(const Vector& x) const override { return j_(x); }
    bool constant_jacobian() const override { return constant_; }

private:
    int d_;
    std::function<Vector(const Vector&)> f_;
    std::function<Vector(const Vector&)> g_;
    std::function<Matrix(const Vector&)> j_;
    bool constant_;
};

void require_keys(const json& d, std::initializer_list<const char*> allowed, const std::string& name) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : d.items()) {
        if (key != "name" && !ok.contains(key))
            throw InvalidArgument("system '" + name + "': unknown field '" + key + "'");
    }
    for (const char* key : allowed) {
        if (!d.contains(key)) throw InvalidArgument("system '" + name + "': missing field '" + key + "'");
    }
}

double require_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw InvalidArgument(what + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidArgument(what + " must be finite");
    return x;
}

SmoothSystem make_linear(const json& desc, const json& matrix) {
    if (!matrix.is_array() || matrix.empty())
        throw InvalidArgument("linear_automorphism: matrix must be a non-empty array of rows");
    const auto d = static_cast<Eigen::Index>(matrix.size());
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const json& row = matrix[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
            throw InvalidArgument("linear_automorphism: matrix must be square");
        for (Eigen::Index c = 0; c < d; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_number()) throw InvalidArgument("linear_automorphism: matrix entries must be numbers");
            const double v = e.get<double>();
            if (!std::isfinite(v) || v != std::round(v))
                throw InvalidArgument("linear_automorphism: matrix entries must be integers");
            m(r, c) = v;
        }
    }
    const double det = std::round(m.determinant());
    if (std::abs(det) != 1.0)
        throw InvalidArgument("linear_automorphism: |det| must be 1 (got " + std::to_string(static_cast<long>(det)) + ")");
    Matrix inv = m.inverse().array().round().matrix();
    if (!(m * inv).isIdentity(0.0))
        throw NumericalError("linear_automorphism: integer inverse could not be formed");
    return SmoothSystem(std::make_shared<LinearModel>(m, inv), desc, true);
}

}  // namespace

SmoothSystem::SmoothSystem(std::shared_ptr<const Model> model, nlohmann::json descriptor, bool volume_preserving)
    : model_(std::move(model)), descriptor_(std::move(descriptor)), volume_preserving_(volume_preserving) {
    if (!model_) throw InvalidArgument("SmoothSystem: null model");
    if (model_->dimension() < 1) throw InvalidArgument("SmoothSystem: dimension must be at least 1");
}

SmoothSystem SmoothSystem::custom(std::string name, int dimension, std::function<Vector(const Vector&)> forward,
                                  std::function<Vector(const Vector&)> inverse,
                                  std::function<Matrix(const Vector&)> jacobian, bool volume_preserving,
                                  bool constant_jacobian) {
    auto model = std::make_shared<CustomModel>(dimension, std::move(forward), std::move(inverse),
                                               std::move(jacobian), constant_jacobian);
    return SmoothSystem(std::move(model), json{{"name", std::move(name)}}, volume_preserving);
}

TorusPoint SmoothSystem::forward(const TorusPoint& x) const {
    return TorusPoint(model_->forward_lift(x.coords()));
}

TorusPoint SmoothSystem::inverse(const TorusPoint& x) const {
    return TorusPoint(model_->inverse_lift(x.coords()));
}

std::string SmoothSystem::name() const {
    return descriptor_.value("name", std::string("custom"));
}

namespace builtin {

json cat_map() { return json{{"name", "cat_map"}}; }

json linear_automorphism(const std::vector<std::vector<long>>& matrix) {
    return json{{"name", "linear_automorphism"}, {"matrix", matrix}};
}

json identity(int dimension) { return json{{"name", "identity"}, {"dimension", dimension}}; }

json perturbed_cat(double epsilon) { return json{{"name", "perturbed_cat"}, {"epsilon", epsilon}}; }

json rotation(const std::vector<double>& angles) { return json{{"name", "rotation"}, {"angles", angles}}; }

json standard_map(double k) { return json{{"name", "standard_map"}, {"K", k}}; }

json block(const std::vector<json>& parts) { return json{{"name", "block"}, {"blocks", parts}}; }

json power(const json& base, int n) { return json{{"name", "power"}, {"base", base}, {"N", n}}; }

}  // namespace builtin

SmoothSystem make_system(const json& desc) {
    if (!desc.is_object()) throw InvalidArgument("system descriptor must be a JSON object");
    if (!desc.contains("name") || !desc["name"].is_string())
        throw InvalidArgument("system descriptor needs a string field 'name'");
    const std::string name = desc["name"].get<std::string>();

    if (name == "cat_map") {
        require_keys(desc, {}, name);
        return make_linear(desc, json::array({json::array({2, 1}), json::array({1, 1})}));
    }
    if (name == "linear_automorphism") {
        require_keys(desc, {"matrix"}, name);
        return make_linear(desc, desc["matrix"]);
    }
    if (name == "identity") {
        require_keys(desc, {"dimension"}, name);
        if (!desc["dimension"].is_number_integer() || desc["dimension"].get<int>() < 1)
            throw InvalidArgument("identity: dimension must be a positive integer");
        const int d = desc["dimension"].get<int>();
        const Matrix eye = Matrix::Identity(d, d);
        return SmoothSystem(std::make_shared<LinearModel>(eye, eye), desc, true);
    }
    if (name == "perturbed_cat") {
        require_keys(desc, {"epsilon"}, name);
        const double eps = require_number(desc["epsilon"], "perturbed_cat: epsilon");
        return SmoothSystem(std::make_shared<PerturbedCatModel>(eps), desc, true);
    }
    if (name == "rotation") {
        require_keys(desc, {"angles"}, name);
        const json& a = desc["angles"];
        if (!a.is_array() || a.empty()) throw InvalidArgument("rotation: angles must be a non-empty array");
        Vector angles(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) angles[static_cast<Eigen::Index>(i)] = require_number(a[i], "rotation: angle");
        return SmoothSystem(std::make_shared<RotationModel>(angles), desc, true);
    }
    if (name == "standard_map") {
        require_keys(desc, {"K"}, name);
        const double k = require_number(desc["K"], "standard_map: K");
        return SmoothSystem(std::make_shared<StandardMapModel>(k), desc, true);
    }
    if (name == "block") {
        require_keys(desc, {"blocks"}, name);
        const json& b = desc["blocks"];
        if (!b.is_array() || b.empty()) throw InvalidArgument("block: blocks must be a non-empty array");
        std::vector<SmoothSystem> parts;
        bool vp = true;
        for (const auto& part : b) {
            parts.push_back(make_system(part));
            vp = vp && parts.back().volume_preserving();
        }
        return SmoothSystem(std::make_shared<BlockModel>(std::move(parts)), desc, vp);
    }
    if (name == "power") {
        require_keys(desc, {"base", "N"}, name);
        if (!desc["N"].is_number_integer() || desc["N"].get<int>() < 1)
            throw InvalidArgument("power: N must be a positive integer");
        return power_system(make_system(desc["base"]), desc["N"].get<int>());
    }
    throw InvalidArgument("unknown system '" + name + "'");
}

TorusPoint apply_map(const SmoothSystem& system, const TorusPoint& x, long steps) {
    constexpr long max_steps = 1'000'000'000L;
    if (steps > max_steps || steps < -max_steps) throw InvalidArgument("apply_map: |steps| must be at most 1e9");
    TorusPoint y = x;
    if (steps >= 0) {
        for (long i = 0; i < steps; ++i) y = system.forward(y);
    } else {
        for (long i = 0; i < -steps; ++i) y = system.inverse(y);
    }
    return y;
}

std::vector<TorusPoint> forward_orbit(const SmoothSystem& system, const TorusPoint& x, long n) {
    std::vector<TorusPoint> orbit;
    orbit.reserve(static_cast<std::size_t>(n) + 1);
    orbit.push_back(x);
    for (long i = 0; i < n; ++i) orbit.push_back(system.forward(orbit.back()));
    return orbit;
}

std::vector<TorusPoint> backward_orbit(const SmoothSystem& system, const TorusPoint& x, long n) {
    std::vector<TorusPoint> orbit;
    orbit.reserve(static_cast<std::size_t>(n) + 1);
    orbit.push_back(x);
    for (long i = 0; i < n; ++i) orbit.push_back(system.inverse(orbit.back()));
    return orbit;
}

SmoothSystem power_system(const SmoothSystem& system, int n) {
    if (n < 1) throw InvalidArgument("power_system: N must be at least 1");
    return SmoothSystem(std::make_shared<PowerModel>(system, n), builtin::power(system.descriptor(), n),
                        system.volume_preserving());
}

SmoothSystem inverse_system(const SmoothSystem& system) {
    return SmoothSystem(std::make_shared<InverseModel>(system),
                        json{{"name", "inverse"}, {"base", system.descriptor()}}, system.volume_preserving());
}

double check_volume_preserving(const SmoothSystem& system, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidArgument("check_volume_preserving: samples must be at least 1");
    double worst = 0.0;
    for (const auto& p : sample_lebesgue(seed, samples, system.dimension())) {
        const double det = std::abs(system.jacobian(p).determinant());
        if (!(det > 1e-12)) {
            std::string where;
            for (int i = 0; i < p.dimension(); ++i) where += (i ? ", " : "") + std::to_string(p[i]);
            throw NumericalError("singular Jacobian at (" + where + ")");
        }
        worst = std::max(worst, std::abs(std::log(det)));
    }
    return worst;
}

}  // namespace pesinlab
