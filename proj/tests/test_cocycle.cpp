#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pesinlab/cocycle.hpp"
#include "pesinlab/error.hpp"
#include "pesinlab/linalg.hpp"

using namespace pesinlab;
namespace b = pesinlab::builtin;

TEST_CASE("cocycle products") {
    Matrix sq(2, 2);
    sq << 5, 3, 3, 2;
    CHECK(cocycle_product(fixture::cat(), TorusPoint{0.4, 0.1}, 2) == sq);
    CHECK(cocycle_product(make_system(b::rotation({0.3, 0.7})), TorusPoint{0.4, 0.1}, 7) == Matrix::Identity(2, 2));

    const auto pc = make_system(b::perturbed_cat(0.05));
    Vector x(2);
    x << 0.1, 0.2;
    const Matrix fd = oracle::fd_jacobian(pc, x, 3);
    const Matrix prod = cocycle_product(pc, TorusPoint(x), 3);
    CHECK((fd - prod).cwiseAbs().maxCoeff() < 1e-4 * prod.cwiseAbs().maxCoeff());

    CHECK_THROWS_AS(cocycle_product(fixture::cat(), TorusPoint{0.4, 0.1}, 0), InvalidArgument);
    CHECK_THROWS_WITH_AS(cocycle_product(fixture::cat(), TorusPoint{0.4, 0.1}, 800), doctest::Contains("QR"), NumericalError);
}

TEST_CASE("QR Lyapunov spectra") {
    const auto cat = lyapunov_spectrum_qr(fixture::cat(), TorusPoint{0.3, 0.4}, 2000);
    REQUIRE(cat.exponents.size() == 2);
    CHECK(std::abs(cat.exponents[0] - oracle::cat_entropy) < 1e-6);
    CHECK(std::abs(cat.exponents[1] + oracle::cat_entropy) < 1e-6);
    CHECK(cat.horizon == 2000);
    CHECK(cat.residual < 1e-6);

    const auto rot = lyapunov_spectrum_qr(make_system(b::rotation({0.3, 0.7})), TorusPoint{0.3, 0.4}, 1000);
    CHECK(rot.exponents == std::vector<double>{0.0, 0.0});

    const auto blk = lyapunov_spectrum_qr(make_system(b::block({b::cat_map(), b::rotation({0.3})})),
                                          TorusPoint{0.3, 0.4, 0.5}, 2000);
    REQUIRE(blk.exponents.size() == 3);
    CHECK(std::abs(blk.exponents[0] - oracle::cat_entropy) < 1e-6);
    CHECK(std::abs(blk.exponents[1]) < 1e-6);
    CHECK(std::abs(blk.exponents[2] + oracle::cat_entropy) < 1e-6);

    for (int stride : {2, 5, 10}) {
        const auto s = lyapunov_spectrum_qr(fixture::cat(), TorusPoint{0.3, 0.4}, 2000, stride);
        CHECK(std::abs(s.exponents[0] - oracle::cat_entropy) < 1e-6);
    }
    CHECK_THROWS_AS(lyapunov_spectrum_qr(fixture::cat(), TorusPoint{0.3, 0.4}, 99), InvalidArgument);
    CHECK_THROWS_AS(lyapunov_spectrum_qr(fixture::cat(), TorusPoint{0.3, 0.4}, 1000, 11), InvalidArgument);
    CHECK_THROWS_AS(lyapunov_spectrum_qr(fixture::cat(), TorusPoint{0.3, 0.4}, 1000, 0), InvalidArgument);
}

TEST_CASE("a huge QR stride degenerates the frame") {
    const auto fast = make_system(b::linear_automorphism({{100001, 100000}, {1, 1}}));
    CHECK_THROWS_AS(lyapunov_spectrum_qr(fast, TorusPoint{0.3, 0.4}, 200, 10), NumericalError);
}

TEST_CASE("finite-time Oseledec splitting of the cat map") {
    const auto res = finite_time_oseledec_splitting(fixture::cat(), TorusPoint{0.3, 0.4}, 50, 1);
    REQUIRE(res.determinate());
    CHECK(oracle::line_angle(res.splitting->f.col(0), oracle::cat_unstable()) < 1e-10);
    CHECK(oracle::line_angle(res.splitting->e.col(0), oracle::cat_stable()) < 1e-10);
    CHECK(res.gap == doctest::Approx(2 * oracle::cat_entropy).epsilon(1e-2));
}

TEST_CASE("rotation has no finite-time splitting") {
    const auto res = finite_time_oseledec_splitting(make_system(b::rotation({0.3, 0.7})), TorusPoint{0.3, 0.4}, 50, 1);
    CHECK_FALSE(res.determinate());
    CHECK(res.gap == 0.0);
    CHECK_THROWS_AS(finite_time_oseledec_splitting(fixture::cat(), TorusPoint{0.3, 0.4}, 50, 2), InvalidArgument);
}

TEST_CASE("perturbed cat splitting stays near the cat eigendirections") {
    const auto pc = make_system(b::perturbed_cat(0.01));
    const TorusPoint x{0.3, 0.4};
    const auto r50 = finite_time_oseledec_splitting(pc, x, 50, 1);
    const auto r30 = finite_time_oseledec_splitting(pc, x, 30, 1);
    REQUIRE(r50.determinate());
    REQUIRE(r30.determinate());
    CHECK(oracle::line_angle(r50.splitting->f.col(0), oracle::cat_unstable()) < 0.1);
    CHECK(oracle::line_angle(r50.splitting->e.col(0), oracle::cat_stable()) < 0.1);
    // stabilised in n
    CHECK(oracle::line_angle(r50.splitting->f.col(0), r30.splitting->f.col(0)) < 1e-8);
    CHECK(oracle::line_angle(r50.splitting->e.col(0), r30.splitting->e.col(0)) < 1e-8);
}

TEST_CASE("splittings along an orbit are invariant") {
    const auto pc = make_system(b::perturbed_cat(0.02));
    const TorusPoint x{0.3, 0.4};
    const auto along = oseledec_splitting_along(pc, 40, 1);
    const auto s0 = along(x, 0);
    const auto s1 = along(pc.forward(x), 1);
    const Matrix j = pc.jacobian(x);
    CHECK(oracle::line_angle(j * s0.f.col(0), s1.f.col(0)) < 1e-8);
    CHECK(oracle::line_angle(j * s0.e.col(0), s1.e.col(0)) < 1e-8);

    const auto rot = make_system(b::rotation({0.3, 0.7}));
    CHECK_THROWS_WITH_AS(oseledec_splitting_along(rot, 40, 1)(x, 7), doctest::Contains("index 7"), NumericalError);
}

TEST_CASE("make_splitting checks transversality") {
    Matrix e(2, 1), f(2, 1);
    e << 1, 0;
    f << 1, 1e-10;
    CHECK_THROWS_AS(make_splitting(TorusPoint{0.1, 0.1}, e, f), NumericalError);
    f << 1, 1;
    const auto s = make_splitting(TorusPoint{0.1, 0.1}, e, f);
    CHECK(s.f.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_splitting(TorusPoint{0.1, 0.1}, e, Matrix(2, 0)), InvalidArgument);
}

TEST_CASE("chi") {
    LyapunovSpectrum s{{0.962424, -0.962424}, 2000, 0.0};
    CHECK(chi(s, 1) == doctest::Approx(0.962424));
    CHECK(chi(s, 0) == 0.0);
    CHECK(chi(s, 2) == doctest::Approx(0.0));
    CHECK_THROWS_AS(chi(s, 3), InvalidArgument);
    CHECK_THROWS_AS(chi(s, -1), InvalidArgument);

    LyapunovSpectrum t{{0.7, 0.2, -0.1, -0.8}, 1000, 0.0};
    for (int j = 0; j < 4; ++j)
        CHECK(chi(t, j + 1) - chi(t, j) == doctest::Approx(t.exponents[static_cast<std::size_t>(j)]).epsilon(1e-15));
}

TEST_CASE("determinant growth rates") {
    const TorusPoint x{0.3, 0.4};
    CHECK(std::abs(det_growth_rate(fixture::cat(), x, oracle::column(oracle::cat_unstable()), 100) - oracle::cat_entropy) <
          1e-9);
    Matrix line(2, 1);
    line << 0.6, 0.8;
    CHECK(std::abs(det_growth_rate(make_system(b::rotation({0.3, 0.7})), x, line, 100)) < 1e-14);

    Matrix plane = Matrix::Zero(3, 2);
    plane.block(0, 0, 2, 1) = oracle::column(oracle::cat_unstable());
    plane(2, 1) = 1.0;
    const auto blk = make_system(b::block({b::cat_map(), b::rotation({0.3})}));
    CHECK(std::abs(det_growth_rate(blk, TorusPoint{0.3, 0.4, 0.5}, plane, 200) - oracle::cat_entropy) < 1e-3);

    CHECK_THROWS_AS(det_growth_rate(fixture::cat(), x, line, 5), InvalidArgument);
    CHECK_THROWS_AS(det_growth_rate(fixture::cat(), x, 2.0 * line, 50), InvalidArgument);
}

TEST_CASE("cocycle additivity on every built-in") {
    for (const auto& desc : fixture::builtins()) {
        const auto sys = make_system(desc);
        INFO(desc.dump());
        const TorusPoint x = sample_lebesgue(31, 1, sys.dimension()).front();
        for (int m : {1, 5, 13, 25}) {
            for (int n : {1, 8, 25}) {
                const Matrix whole = cocycle_product(sys, x, m + n);
                const Matrix split = cocycle_product(sys, apply_map(sys, x, m), n) * cocycle_product(sys, x, m);
                CHECK((whole - split).norm() <= 1e-6 * whole.norm());
            }
        }
    }
}

TEST_CASE("volume-preserving spectra sum to zero and match the full determinant rate") {
    for (const auto& desc : fixture::builtins()) {
        const auto sys = make_system(desc);
        INFO(desc.dump());
        const int d = sys.dimension();
        const TorusPoint x = sample_lebesgue(37, 1, d).front();
        const auto s = lyapunov_spectrum_qr(sys, x, 2000);
        double total = 0.0;
        for (double v : s.exponents) total += v;
        CHECK(std::abs(total) < 5e-3);
        CHECK(std::is_sorted(s.exponents.rbegin(), s.exponents.rend()));
        const double full = det_growth_rate(sys, x, Matrix::Identity(d, d), 2000);
        CHECK(std::abs(full - total) < (sys.constant_jacobian() ? 1e-6 : 5e-3));
    }
}

TEST_CASE("pushed splittings") {
    const auto cat = fixture::cat();
    const TorusPoint x{0.3, 0.4};
    const auto res = finite_time_oseledec_splitting(cat, x, 50, 1);
    const auto along = pushed_splitting(cat, *res.splitting);
    const auto far = along(apply_map(cat, x, 30), 30);
    CHECK(oracle::line_angle(far.f.col(0), oracle::cat_unstable()) < 1e-10);
    CHECK(oracle::line_angle(far.e.col(0), oracle::cat_stable()) < 1e-10);

    const auto pc = make_system(b::perturbed_cat(0.02));
    const auto at_x = *finite_time_oseledec_splitting(pc, x, 40, 1).splitting;
    const auto pushed = pushed_splitting(pc, at_x)(apply_map(pc, x, 3), 3);
    const auto fresh = *finite_time_oseledec_splitting(pc, apply_map(pc, x, 3), 40, 1).splitting;
    CHECK(oracle::line_angle(pushed.f.col(0), fresh.f.col(0)) < 1e-8);
    const auto back = pushed_splitting(pc, at_x)(apply_map(pc, x, -3), -3);
    const auto fresh_back = *finite_time_oseledec_splitting(pc, apply_map(pc, x, -3), 40, 1).splitting;
    CHECK(oracle::line_angle(back.e.col(0), fresh_back.e.col(0)) < 1e-8);
}

TEST_CASE("subspace angles resolve tiny separations") {
    Matrix a(2, 1), c(2, 1);
    a << 1, 0;
    c << 1, 1e-12;
    CHECK(subspace_angle(a, orthonormalize(c)) == doctest::Approx(1e-12).epsilon(1e-6));
    CHECK_THROWS_AS(orthonormalize(Matrix::Zero(2, 1)), NumericalError);
}
