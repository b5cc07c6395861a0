#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pesinlab/bowen.hpp"
#include "pesinlab/entropy.hpp"
#include "pesinlab/error.hpp"

using namespace pesinlab;
namespace b = pesinlab::builtin;

namespace {

BowenParams grid(int resolution = 4096) {
    BowenParams p;
    p.resolution = resolution;
    return p;
}

BowenParams nested(std::size_t population = 2000) {
    BowenParams p;
    p.method = BowenMethod::NestedMC;
    p.population = population;
    return p;
}

SplittingField cat_split(const TorusPoint& x) {
    return make_splitting(x, oracle::column(oracle::cat_stable()), oracle::column(oracle::cat_unstable()));
}

}  // namespace

TEST_CASE("Bowen ball membership") {
    const auto cat = fixture::cat();
    const TorusPoint x{0.2, 0.3};
    for (long n : {0L, 5L, 40L}) CHECK(in_bowen_ball(cat, x, x, n, 0.05));
    const TorusPoint near{0.23, 0.3};
    CHECK(in_bowen_ball(cat, x, near, 0, 0.05) == (torus_distance(x, near) <= 0.05));
    CHECK_FALSE(in_bowen_ball(cat, x, TorusPoint{0.26, 0.3}, 0, 0.05));

    const double delta = 0.05;
    const auto along_stable = x.shifted(0.9 * delta * oracle::cat_stable());
    const auto along_unstable = x.shifted(0.9 * delta * oracle::cat_unstable());
    CHECK(in_bowen_ball(cat, x, along_stable, 20, delta));
    CHECK_FALSE(in_bowen_ball(cat, x, along_unstable, 20, delta));
    CHECK_THROWS_AS(in_bowen_ball(cat, x, x, -1, delta), InvalidArgument);
}

TEST_CASE("Bowen balls are nested") {
    const auto pc = make_system(b::perturbed_cat(0.05));
    const TorusPoint x{0.4, 0.7};
    const double delta = 0.1;
    const auto orbit = forward_orbit(pc, x, 12);
    for (int i = 0; i < 120; ++i) {
        for (int k = 0; k < 120; ++k) {
            Vector offset(2);
            offset << -delta + i * 2 * delta / 119, -delta + k * 2 * delta / 119;
            const TorusPoint y = x.shifted(offset);
            const long exit = bowen_exit_step(pc, orbit, y, 12, delta);
            for (long n = 0; n < 12; ++n) {
                if (in_bowen_ball(pc, x, y, n + 1, delta)) REQUIRE(in_bowen_ball(pc, x, y, n, delta));
                REQUIRE(in_bowen_ball(pc, x, y, n, delta) == (exit > n));
            }
        }
    }
}

TEST_CASE("grid estimates of small Bowen balls") {
    const TorusPoint x{0.2, 0.3};
    const double disk = M_PI * 0.05 * 0.05;
    for (const auto& desc : fixture::builtins()) {
        const auto sys = make_system(desc);
        if (sys.dimension() != 2) continue;
        CHECK(std::abs(bowen_ball_measure(sys, x, 0, 0.05, grid(), 0).estimate - disk) < 1e-4);
    }
    const auto id = make_system(b::identity(2));
    CHECK(bowen_ball_measure(id, x, 50, 0.05, grid(), 0).estimate == bowen_ball_measure(id, x, 0, 0.05, grid(), 0).estimate);

    const auto cat = fixture::cat();
    const auto profile = bowen_ball_profile(cat, x, 6, 0.1, grid(), 0);
    CHECK(profile[6].measure / profile[5].measure == doctest::Approx(1 / oracle::cat_lambda_u).epsilon(0.15));
    for (int n = 0; n <= 6; ++n) {
        INFO("n = " << n);
        CHECK(profile[static_cast<std::size_t>(n)].measure ==
              doctest::Approx(oracle::cat_bowen_area(0.1, n)).epsilon(0.03));
    }
    CHECK(profile[0].measure <= M_PI * 0.01 + 3 * profile[0].standard_error);

    const auto blk = make_system(b::block({b::cat_map(), b::rotation({0.3})}));
    CHECK_THROWS_AS(bowen_ball_measure(blk, TorusPoint{0.1, 0.2, 0.3}, 2, 0.1, grid(), 0), InvalidArgument);
    CHECK_THROWS_AS(bowen_ball_measure(cat, x, 2, 0.6, grid(), 0), InvalidArgument);
    CHECK_THROWS_AS(parse_bowen_method("sobol"), InvalidArgument);
    CHECK(parse_bowen_method("nested_mc") == BowenMethod::NestedMC);
}

TEST_CASE("nested Monte Carlo agrees with the grid") {
    const auto cat = fixture::cat();
    const TorusPoint x{0.2, 0.3};
    const auto g = bowen_ball_profile(cat, x, 5, 0.1, grid(), 0);
    const auto mc = bowen_ball_profile(cat, x, 5, 0.1, nested(4000), 11);
    for (int n = 0; n <= 5; ++n) {
        const auto& a = g[static_cast<std::size_t>(n)];
        const auto& m = mc[static_cast<std::size_t>(n)];
        INFO("n = " << n << " grid " << a.measure << " mc " << m.measure << " se " << m.standard_error);
        CHECK(std::abs(a.measure - m.measure) <= 3 * std::hypot(a.standard_error, m.standard_error));
    }
    CHECK(mc[0].measure == doctest::Approx(M_PI * 0.01));
    CHECK(bowen_ball_profile(cat, x, 5, 0.1, nested(500), 3)[5].measure ==
          bowen_ball_profile(cat, x, 5, 0.1, nested(500), 3)[5].measure);
}

TEST_CASE("nested Monte Carlo monotonicity and extinction") {
    const auto pc = make_system(b::perturbed_cat(0.05));
    const auto prof = bowen_ball_profile(pc, TorusPoint{0.6, 0.1}, 12, 0.1, nested(), 5);
    for (std::size_t n = 0; n + 1 < prof.size(); ++n) {
        const double se = std::hypot(prof[n].standard_error, prof[n + 1].standard_error) / prof[n].measure;
        CHECK(prof[n + 1].measure <= prof[n].measure * (1 + 3 * se));
    }
    const auto fast = make_system(b::linear_automorphism({{1001, 1000}, {1, 1}}));
    CHECK_THROWS_WITH_AS(bowen_ball_profile(fast, TorusPoint{0.2, 0.3}, 20, 0.1, nested(10), 1),
                         doctest::Contains("population"), NumericalError);
}

TEST_CASE("local entropy slopes") {
    const TorusPoint x{0.2, 0.3};
    CHECK(std::abs(local_entropy_estimate(make_system(b::identity(2)), x, 0.1, 2, 6, grid(), 0).slope) < 2e-2);
    CHECK(std::abs(local_entropy_estimate(make_system(b::rotation({0.37, 0.58})), x, 0.1, 2, 6, grid(), 0).slope) < 2e-2);
    const auto cat = local_entropy_estimate(fixture::cat(), x, 0.1, 2, 6, grid(), 0);
    CHECK(cat.slope >= 0.87);
    CHECK(cat.slope <= 1.06);
    CHECK(cat.records.size() == 5);
    CHECK(cat.records.front().n == 2);
    const auto csv = to_csv(cat);
    CHECK(csv.rfind("n,measure,stderr,method\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    nlohmann::json j = cat;
    CHECK(j["fit_range"] == nlohmann::json::array({2, 6}));

    CHECK_THROWS_AS(local_entropy_estimate(fixture::cat(), x, 0.1, 2, 4, grid(), 0), InvalidArgument);
    CHECK_THROWS_WITH_AS(local_entropy_estimate(fixture::cat(), x, 0.1, 20, 24, grid(64), 0), doctest::Contains("zero"),
                         NumericalError);
}

TEST_CASE("weighted slope fit") {
    const auto fit = fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}, {1, 1, 1, 1});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.residual == doctest::Approx(0.0));
    const auto weighted = fit_slope({0, 1, 2}, {0, 1, 10}, {1, 1, 1e-12});
    CHECK(weighted.slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("slice measures") {
    const auto cat = fixture::cat();
    const auto s = cat_split(TorusPoint{0.2, 0.3});
    CHECK(slice_bowen_measure(cat, s, 0.0, 5, 0.05, 100000) ==
          doctest::Approx(2 * 0.05 * std::pow(oracle::cat_lambda_u, -5)).epsilon(0.05));
    CHECK(slice_bowen_measure(cat, s, 0.0, 0, 0.05, 1000) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(slice_bowen_measure(cat, s, 0.06, 0, 0.05, 1000) == 0.0);

    std::vector<double> ns, ys, ws;
    for (int n = 2; n <= 8; ++n) {
        ns.push_back(n);
        ys.push_back(-std::log(slice_bowen_measure(cat, s, 0.0, n, 0.1, 200000)));
        ws.push_back(1.0);
    }
    CHECK(std::abs(fit_slope(ns, ys, ws).slope - oracle::cat_entropy) < 5e-2);
    CHECK_THROWS_AS(slice_bowen_measure(cat, s, 0.0, 2, 0.05, 999), InvalidArgument);
}

TEST_CASE("distortion budget") {
    for (const auto& desc : fixture::linear_builtins()) {
        const auto sys = make_system(desc);
        if (sys.dimension() != 2) continue;
        const TorusPoint x{0.2, 0.3};
        Matrix e(2, 1), f(2, 1);
        e << 0.3, 1;
        f << 1, 0.2;
        CHECK(distortion_epsilon(sys, make_splitting(x, e, f), 0.1, 0.0, 500, 1).epsilon == 0.0);
    }

    const auto cat = fixture::cat();
    const auto split = cat_split(TorusPoint{0.2, 0.3});
    const double oracle_value = oracle::cat_tilt_distortion(0.3, 2'000'000);
    const auto est = distortion_epsilon(cat, split, 0.05, 0.3, 100000, 4);
    CHECK(est.epsilon <= oracle_value + 1e-12);
    CHECK(est.epsilon == doctest::Approx(oracle_value).epsilon(1e-3));
    CHECK(est.samples == 100000);

    const auto pc = make_system(b::perturbed_cat(0.05));
    const auto pc_split = *finite_time_oseledec_splitting(pc, TorusPoint{0.2, 0.3}, 40, 1).splitting;
    double previous = std::numeric_limits<double>::infinity();
    double previous_se = 0.0;
    for (double r : {0.08, 0.04, 0.02, 0.01}) {
        const auto e = distortion_epsilon(pc, pc_split, r, 0.1, 20000, 8);
        CHECK(e.epsilon <= previous + 2 * std::hypot(e.standard_error, previous_se));
        previous = e.epsilon;
        previous_se = e.standard_error;
    }
    const double r = radius_for_distortion(pc, pc_split, 0.0, 0.05, 0.2, 2000, 3);
    CHECK(r > 0);
    CHECK(distortion_epsilon(pc, pc_split, r, 0.0, 2000, 3).epsilon < 0.05);
}

TEST_CASE("Mane lower bound") {
    const auto cat = mane_lower_bound(fixture::cat(), 0.1, 20, 2, 6, grid(), 1);
    CHECK(cat.bound >= 0.87);
    CHECK(cat.bound <= 1.02);
    CHECK(cat.used == 20);
    CHECK(cat.excluded == 0);
    CHECK(std::abs(mane_lower_bound(make_system(b::identity(2)), 0.1, 5, 2, 6, grid(), 1).bound) < 2e-2);

    const auto blk = mane_lower_bound(make_system(b::block({b::cat_map(), b::rotation({0.3})})), 0.1, 10, 2, 6, nested(), 2);
    CHECK(blk.bound == doctest::Approx(oracle::cat_entropy).epsilon(0.15));

    const auto failing = mane_lower_bound(fixture::cat(), 0.1, 3, 20, 24, grid(64), 1);
    CHECK(failing.excluded == 3);
    CHECK_FALSE(failing.per_point[0].error.empty());

    Matrix a(2, 2);
    a << 1.1, 0, 0, 1;
    const auto dissipative = SmoothSystem::custom(
        "stretch", 2, [a](const Vector& v) -> Vector { return a * v; }, [a](const Vector& v) -> Vector { return a.inverse() * v; },
        [a](const Vector&) -> Matrix { return a; }, false, true);
    CHECK_THROWS_AS(mane_lower_bound(dissipative, 0.1, 2, 2, 6, grid(), 1), InvalidArgument);
}

TEST_CASE("Sigma_j partition") {
    auto sums_to_one = [](const std::map<int, double>& w) {
        double total = 0;
        for (const auto& [_, v] : w) total += v;
        return total == 1.0;
    };
    const auto cat = sigma_partition(fixture::cat(), 20, 1000, 1e-2, 1);
    CHECK(cat == std::map<int, double>{{1, 1.0}});
    const auto rot = sigma_partition(make_system(b::rotation({0.3, 0.7})), 20, 1000, 1e-2, 1);
    CHECK(rot == std::map<int, double>{{2, 1.0}});
    const auto blk = sigma_partition(make_system(b::block({b::cat_map(), b::rotation({0.3})})), 20, 1000, 1e-2, 1);
    CHECK(blk == std::map<int, double>{{2, 1.0}});
    const auto sm = sigma_partition(make_system(b::standard_map(1.0)), 30, 1000, 1e-2, 1);
    CHECK(sums_to_one(sm));
    CHECK(sums_to_one(cat));
}

TEST_CASE("Pesin reports") {
    PesinConfig cfg;
    cfg.points = 20;
    const auto cat = pesin_report(fixture::cat(), cfg);
    CHECK(cat.verdict == PesinVerdict::FormulaHolds);
    CHECK(std::abs(cat.mane_lower_bound - oracle::cat_entropy) < 0.1);
    CHECK(std::abs(cat.ruelle_upper_bound - oracle::cat_entropy) < 1e-6);
    CHECK(cat.chi_integral == doctest::Approx(cat.ruelle_upper_bound));

    const auto rot = pesin_report(make_system(b::rotation({0.3, 0.7})), cfg);
    CHECK(rot.verdict == PesinVerdict::FormulaHolds);
    CHECK(std::abs(rot.mane_lower_bound) < 2e-2);
    CHECK(rot.ruelle_upper_bound == 0.0);

    cfg.tol = 0.12;
    const auto pc = pesin_report(make_system(b::perturbed_cat(0.05)), cfg);
    CHECK(pc.mane_lower_bound <= pc.ruelle_upper_bound + cfg.tol);
    CHECK(std::abs(pc.mane_lower_bound - pc.ruelle_upper_bound) <= cfg.tol);
    CHECK(std::abs(pc.ruelle_upper_bound - oracle::cat_entropy) < 0.1);
    nlohmann::json j = pc;
    CHECK(j["config"]["tol"] == 0.12);
    CHECK(j["verdict"] == "FormulaHolds");

    PesinConfig broken;
    broken.points = 3;
    broken.n_min = 20;
    broken.n_max = 24;
    broken.bowen.resolution = 64;
    const auto inconclusive = pesin_report(fixture::cat(), broken);
    CHECK(inconclusive.verdict == PesinVerdict::Inconclusive);
    CHECK(inconclusive.excluded == 3);
}

TEST_CASE("worker count does not change results") {
    PesinConfig cfg;
    cfg.points = 8;
    cfg.deltas = {0.05, 0.1};
    cfg.bowen = nested(800);
    cfg.seed = 99;
    const auto sys = make_system(b::perturbed_cat(0.05));
    const nlohmann::json one = pesin_report(sys, cfg, 1);
    const nlohmann::json four = pesin_report(sys, cfg, 4);
    CHECK(one.dump() == four.dump());
    CHECK(sigma_partition(sys, 16, 500, 1e-2, 3, 1) == sigma_partition(sys, 16, 500, 1e-2, 3, 4));
}

TEST_CASE("local entropy scales with the power of the map") {
    const TorusPoint x{0.2, 0.3};
    const double h1 = local_entropy_estimate(fixture::cat(), x, 0.1, 2, 6, grid(), 0).slope;
    const double h2 = local_entropy_estimate(power_system(fixture::cat(), 2), x, 0.1, 1, 4, grid(), 0).slope;
    CHECK(h2 == doctest::Approx(2 * h1).epsilon(0.15));
}
