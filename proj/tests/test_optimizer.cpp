#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "bellmag/optimizer.hpp"

using namespace bellmag;
using core::Complex;
using optimizer::Objective;

TEST_CASE("product state cannot violate") {
    const auto res = optimizer::optimize_settings({Objective::Kind::ChshT, 0.0, 1.0});
    CHECK(res.best_S == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.converged);
    CHECK(res.starts_used == 5);
}

TEST_CASE("peak violation at p = 0.3935") {
    const auto res = optimizer::optimize_settings({Objective::Kind::ChshT, 0.3935, 1.0});
    CHECK(res.best_S == doctest::Approx(2.45).epsilon(0.02 / 2.45));
    CHECK(res.best_S <= core::tsirelson_bound + 1e-9);
    CHECK(res.converged);

    // one-shot dense grid cross-check
    optimizer::OptimizerConfig dense;
    dense.grid_step = 0.05;
    dense.refine_starts = 3;
    const auto res2 =
        optimizer::optimize_settings({Objective::Kind::ChshT, 0.3935, 1.0}, dense);
    CHECK(std::abs(res2.best_S - res.best_S) <= 1e-6);
}

TEST_CASE("regression fixture") {
    std::ifstream in(std::string(BELLMAG_FIXTURE_DIR) + "/optimum_p3935.csv");
    REQUIRE(in.good());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<double> cols;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 11);

    const auto res =
        optimizer::optimize_settings({Objective::Kind::ChshT, cols[0], cols[1]});
    CHECK(std::abs(res.best_S - cols[2]) <= 1e-9);
    const double fixture[8] = {cols[3], cols[4], cols[5], cols[6],
                               cols[7], cols[8], cols[9], cols[10]};
    const double measured[8] = {
        res.settings.alpha1.real(), res.settings.alpha1.imag(),
        res.settings.alpha2.real(), res.settings.alpha2.imag(),
        res.settings.beta1.real(),  res.settings.beta1.imag(),
        res.settings.beta2.real(),  res.settings.beta2.imag()};
    for (int i = 0; i < 8; ++i) CHECK(std::abs(measured[i] - fixture[i]) <= 1e-6);
}

TEST_CASE("determinism is bit-exact") {
    const Objective obj{Objective::Kind::ChshEta, 0.37, 0.93};
    const auto a = optimizer::optimize_settings(obj);
    const auto b = optimizer::optimize_settings(obj);
    CHECK(std::memcmp(&a.best_S, &b.best_S, sizeof(double)) == 0);
    CHECK(a.settings.alpha1 == b.settings.alpha1);
    CHECK(a.settings.alpha2 == b.settings.alpha2);
    CHECK(a.settings.beta1 == b.settings.beta1);
    CHECK(a.settings.beta2 == b.settings.beta2);
    CHECK(a.evals == b.evals);
}

TEST_CASE("Tsirelson bound holds for optimized results") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        const double p = 0.9 * uni(rng);
        const auto res = optimizer::optimize_settings({Objective::Kind::ChshT, p, 1.0});
        CHECK(res.best_S <= core::tsirelson_bound + 1e-9);
        CHECK(res.best_S >= 2.0 - 1e-9);  // zero settings already achieve 2
    }
}

TEST_CASE("sign symmetry and canonical form") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    for (int i = 0; i < 50; ++i) {
        const core::MeasurementSettings s{{uni(rng), uni(rng)},
                                          {uni(rng), uni(rng)},
                                          {uni(rng), uni(rng)},
                                          {uni(rng), uni(rng)}};
        const core::MeasurementSettings neg{-s.alpha1, -s.alpha2, -s.beta1, -s.beta2};
        CHECK(core::chsh_S(0.45, 1.0, s) ==
              doctest::Approx(core::chsh_S(0.45, 1.0, neg)).epsilon(1e-13));
        CHECK(core::chsh_S_eta(0.45, 0.85, s) ==
              doctest::Approx(core::chsh_S_eta(0.45, 0.85, neg)).epsilon(1e-13));
        const auto canon = optimizer::canonicalize(s);
        const auto canon_neg = optimizer::canonicalize(neg);
        CHECK(canon.alpha1 == canon_neg.alpha1);
        CHECK(canon.beta2 == canon_neg.beta2);
    }
}

TEST_CASE("real settings suffice") {
    // Re-running the refinement with full complex settings must not improve
    // the real-restricted optimum beyond 1e-6.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double p = 0.8 * uni(rng);
        Objective obj;
        if (i % 2 == 0)
            obj = {Objective::Kind::ChshT, p, 0.5 + 0.5 * uni(rng)};
        else
            obj = {Objective::Kind::ChshEta, p, 0.55 + 0.45 * uni(rng)};
        const auto real_res = optimizer::optimize_settings(obj);
        optimizer::OptimizerConfig cfg;
        cfg.complex_settings = true;
        const auto complex_res = optimizer::refine_from(obj, real_res.settings, cfg);
        worst = std::max(worst, complex_res.best_S - real_res.best_S);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("linspace_grid") {
    const auto grid = optimizer::linspace_grid(0.01, 1.0, 0.01);
    REQUIRE(grid.size() == 100);
    CHECK(grid.front() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(grid.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(optimizer::linspace_grid(0.5, 1.0, 0.01).size() == 51);
    CHECK_THROWS_AS(optimizer::linspace_grid(1.0, 0.5, 0.01), std::domain_error);
    CHECK_THROWS_AS(optimizer::linspace_grid(0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("sweep_g1tau warm start never loses to cold start") {
    optimizer::SweepSpec spec;
    spec.axis_name = "g1tau";
    spec.axis_min = 0.2;
    spec.axis_max = 0.3;
    spec.axis_step = 0.02;
    spec.curves = {1.0};
    const auto rows = optimizer::sweep_g1tau(spec, 1);
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
        const auto cold = optimizer::optimize_settings(
            {Objective::Kind::ChshT, row.p, row.T}, spec.opt);
        CHECK(row.S >= cold.best_S - 1e-8);
    }
}

TEST_CASE("sweep_g2tau monotone in the read-pulse area") {
    optimizer::SweepSpec spec;
    spec.axis_name = "g2tau";
    spec.axis_min = 0.1;
    spec.axis_max = 3.0;
    spec.axis_step = 0.1;
    spec.curves = {0.39, 0.2};
    const auto rows = optimizer::sweep_g2tau(spec, 2);
    REQUIRE(rows.size() == 60);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i % 30 == 0) continue;  // new curve
        CHECK(rows[i].S >= rows[i - 1].S - 1e-6);
        CHECK(rows[i].p == rows[i - 1].p);
    }
}

TEST_CASE("optimization at T = 0 cannot violate") {
    const auto res = optimizer::optimize_settings({Objective::Kind::ChshT, 0.39, 0.0});
    CHECK(res.best_S <= 2.0 + 1e-9);
    CHECK(res.best_S == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("weak squeezing violates at lower efficiency") {
    // Marginal violations (S - 2 of order 1e-4) survive well below the
    // efficiency threshold of the strong-violation regime; the threshold
    // rises with the pair parameter.  Verified against the loss-channel
    // oracle in the core_model tests.
    const double p_small = core::p_from_g1tau(0.01);
    const auto low = optimizer::optimize_settings(
        {Objective::Kind::ChshEta, p_small, 0.69});
    CHECK(low.best_S > 2.0);
    CHECK(low.best_S < 2.001);
    const auto below = optimizer::optimize_settings(
        {Objective::Kind::ChshEta, p_small, 0.65});
    CHECK(below.best_S < 2.0);

    const double p_peak = core::p_from_g1tau(0.25);
    const auto peak_low = optimizer::optimize_settings(
        {Objective::Kind::ChshEta, p_peak, 0.77});
    CHECK(peak_low.best_S < 2.0);
    const auto peak_high = optimizer::optimize_settings(
        {Objective::Kind::ChshEta, p_peak, 0.78});
    CHECK(peak_high.best_S > 2.0);
}

TEST_CASE("eta threshold on a coarse contour") {
    const auto rows = optimizer::contour_eta({0.2, 0.25, 0.3}, {0.7, 0.8, 0.9}, {}, 2);
    REQUIRE(rows.size() == 9);
    CHECK(optimizer::eta_threshold(rows) == doctest::Approx(0.8).epsilon(1e-12));
    // eta = 1 column of a contour equals the T = 1 sweep values
    const auto col = optimizer::contour_eta({0.25}, {1.0}, {}, 1);
    const auto direct = optimizer::optimize_settings(
        {Objective::Kind::ChshT, core::p_from_g1tau(0.25), 1.0});
    CHECK(std::abs(col[0].S - direct.best_S) <= 1e-6);
}

TEST_CASE("SweepSpec validation") {
    optimizer::SweepSpec spec;
    spec.axis_min = 1.0;
    spec.axis_max = 0.5;
    spec.curves = {1.0};
    CHECK_THROWS_AS(spec.validate(), std::domain_error);
    spec.axis_min = 0.1;
    spec.axis_max = 0.5;
    spec.curves.clear();
    CHECK_THROWS_AS(spec.validate(), std::domain_error);
    CHECK_THROWS_AS(optimizer::sweep_g2tau(
                        [] {
                            optimizer::SweepSpec s;
                            s.axis_min = 0.1;
                            s.axis_max = 1.0;
                            s.axis_step = 0.1;
                            s.curves = {0.3};
                            s.eta = 0.9;
                            return s;
                        }(),
                        1),
                    std::domain_error);
}
