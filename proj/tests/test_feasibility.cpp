#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bellmag/core_model.hpp"
#include "bellmag/experiment_config.hpp"
#include "bellmag/feasibility.hpp"

using namespace bellmag;
namespace feas = bellmag::feasibility;

namespace {

// The quoted reference chain: kappa ~ 1 GHz, G1 ~ 20 MHz, G2 ~ 100 MHz,
// tau1 ~ 31 ns, tau2 ~ 75 ns, gamma ~ 1 MHz, read as angular rates.
feas::ExperimentParams reference_params() {
    feas::ExperimentParams prm;
    prm.kappa1 = 1e9;
    prm.kappa2 = 1e9;
    prm.kappa_ex1 = 1e9;
    prm.kappa_ex2 = 1e9;
    prm.G1 = 2e7;
    prm.G2 = 1e8;
    prm.tau1 = 31e-9;
    prm.tau2 = 75e-9;
    prm.gamma = 1e6;
    prm.n_th = 0.026;
    prm.g = 10.4;
    return prm;
}

}  // namespace

TEST_CASE("pump_amplitude") {
    CHECK(std::abs(feas::pump_amplitude(1.0, 4.0, 0.0)) ==
          doctest::Approx(0.5).epsilon(1e-15));  // 2 eps / kappa_ex
    CHECK(std::abs(feas::pump_amplitude(0.0, 4.0, 1.0)) == 0.0);
    CHECK(std::abs(feas::pump_amplitude(2.0, 4.0, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-15));  // eps = kappa_ex / 2
    CHECK_THROWS_AS(feas::pump_amplitude(1.0, 0.0, 0.0), std::domain_error);
    // detuned drive
    const auto amp = feas::pump_amplitude(3.0, 2.0, 5.0);
    CHECK(std::abs(amp) == doctest::Approx(3.0 / std::hypot(1.0, 5.0)).epsilon(1e-14));
}

TEST_CASE("effective_couplings") {
    feas::ExperimentParams prm;
    prm.g = 0.0;
    prm.alpha1 = 100.0;
    prm.alpha2 = 50.0;
    auto [G1, G2] = feas::effective_couplings(prm);
    CHECK(G1 == 0.0);
    CHECK(G2 == 0.0);

    prm.g = 10.4;  // reference chain: G = g alpha = 73 kHz
    prm.alpha1 = 73000.0 / 10.4;
    auto [G1b, G2b] = feas::effective_couplings(prm);
    CHECK(G2b == doctest::Approx(73000.0).epsilon(1e-12));

    // doubling the drive doubles G
    prm.alpha1 = std::nan("");
    prm.alpha2 = std::nan("");
    prm.eps1 = 5.0;
    prm.kappa_ex1 = 100.0;
    prm.delta1 = 0.0;
    auto [G1c, G2c] = feas::effective_couplings(prm);
    prm.eps1 = 10.0;
    auto [G1d, G2d] = feas::effective_couplings(prm);
    CHECK(G2d == doctest::Approx(2.0 * G2c).epsilon(1e-14));
}

TEST_CASE("thermal_occupation") {
    constexpr double hbar = 1.054571817e-34, kb = 1.380649e-23;
    const double omega = 1e10;
    // hbar w / kB T = ln 2  =>  n = 1
    const double t_ln2 = hbar * omega / (kb * std::log(2.0));
    CHECK(feas::thermal_occupation(omega, t_ln2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(feas::thermal_occupation(omega, 1e-4) < 1e-30);
    CHECK_THROWS_AS(feas::thermal_occupation(omega, 0.0), std::domain_error);
    CHECK_THROWS_AS(feas::thermal_occupation(0.0, 1.0), std::domain_error);

    // strictly increasing in temperature, decreasing in frequency
    double prev = 0.0;
    for (double t = 0.05; t <= 0.5; t += 0.05) {
        const double n = feas::thermal_occupation(omega, t);
        CHECK(n > prev);
        prev = n;
    }
    CHECK(feas::thermal_occupation(2.0 * omega, 0.1) <
          feas::thermal_occupation(omega, 0.1));
    // ordinary-frequency flag applies the 2 pi
    CHECK(feas::thermal_occupation(omega, 0.1, false) ==
          doctest::Approx(feas::thermal_occupation(2.0 * core::pi * omega, 0.1))
              .epsilon(1e-12));
}

TEST_CASE("analyze on the reference chain") {
    const auto rep = feas::analyze(reference_params());
    CHECK(rep.g2tau == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.T == doctest::Approx(0.95).epsilon(0.005 / 0.95));
    CHECK(rep.g1tau == doctest::Approx(0.0248).epsilon(1e-12));
    CHECK(rep.p == doctest::Approx(1.0 - std::exp(-2.0 * 0.0248)).epsilon(1e-12));
    CHECK(rep.decoherence.value == doctest::Approx(2.756e-3).epsilon(1e-3));
    CHECK(rep.decoherence.pass);
    CHECK(rep.weak_coupling_1.pass);
    CHECK(rep.weak_coupling_2.pass);
    CHECK(rep.over_coupling_1.pass);
    // the far-from-optimum warning fires for g1tau = 0.0248
    bool warned = false;
    for (const auto& w : rep.warnings)
        if (w.find("far from the violation optimum") != std::string::npos) warned = true;
    CHECK(warned);
    // derived amplitudes follow from G = g alpha
    CHECK(rep.alpha2 == doctest::Approx(2e7 / 10.4).epsilon(1e-12));
}

TEST_CASE("analyze round-trip and scale consistency") {
    const auto prm = reference_params();
    const auto rep = feas::analyze(prm);
    // recompute independently
    CHECK(rep.Gt1 == doctest::Approx(2.0 * prm.G1 * prm.G1 / prm.kappa1).epsilon(1e-12));
    CHECK(rep.g1tau == doctest::Approx(rep.Gt1 * prm.tau1).epsilon(1e-12));
    CHECK(rep.weak_coupling_1.value ==
          doctest::Approx(prm.G1 / prm.kappa1).epsilon(1e-12));

    // rates * s, durations / s leaves the dimensionless outputs unchanged
    const double s = 3.7;
    feas::ExperimentParams scaled = prm;
    scaled.kappa1 *= s;
    scaled.kappa2 *= s;
    scaled.kappa_ex1 *= s;
    scaled.kappa_ex2 *= s;
    scaled.G1 *= s;
    scaled.G2 *= s;
    scaled.gamma *= s;
    scaled.tau1 /= s;
    scaled.tau2 /= s;
    const auto rep2 = feas::analyze(scaled);
    CHECK(rep2.g1tau == doctest::Approx(rep.g1tau).epsilon(1e-12));
    CHECK(rep2.g2tau == doctest::Approx(rep.g2tau).epsilon(1e-12));
    CHECK(rep2.p == doctest::Approx(rep.p).epsilon(1e-12));
    CHECK(rep2.T == doctest::Approx(rep.T).epsilon(1e-12));
    CHECK(rep2.decoherence.value == doctest::Approx(rep.decoherence.value).epsilon(1e-12));
    CHECK(rep2.weak_coupling_2.value ==
          doctest::Approx(rep.weak_coupling_2.value).epsilon(1e-12));
}

TEST_CASE("optimized S on request") {
    feas::ExperimentParams prm = reference_params();
    prm.G1 = 6.3507e7;  // g1tau ~ 0.25 -> near the violation optimum
    const auto rep = feas::analyze(prm, {}, true);
    CHECK(rep.g1tau == doctest::Approx(0.25).epsilon(1e-3));
    // optimum at the preset's T = 0.9502, slightly below the T = 1 value 2.4547
    CHECK(rep.optimized_S == doctest::Approx(2.4398).epsilon(1e-3));
    CHECK(rep.optimized_S > 2.0);
}

TEST_CASE("config parsing") {
    std::vector<std::string> errors;

    SUBCASE("valid config with units") {
        const nlohmann::json config = {
            {"angular", true},   {"kappa1", "1 GHz"}, {"kappa2", "1 GHz"},
            {"gamma", "1 MHz"},  {"G1", "20 MHz"},    {"G2", "100 MHz"},
            {"tau1", "31 ns"},   {"tau2", "75 ns"},   {"n_th", 0.026}};
        const auto prm = feas::params_from_json(config, errors);
        CHECK(errors.empty());
        CHECK(prm.kappa1 == doctest::Approx(1e9).epsilon(1e-15));
        CHECK(prm.G1 == doctest::Approx(2e7).epsilon(1e-15));
        CHECK(prm.tau1 == doctest::Approx(31e-9).epsilon(1e-15));
        CHECK(prm.n_th == doctest::Approx(0.026).epsilon(1e-15));
    }

    SUBCASE("ordinary-frequency convention multiplies by 2 pi") {
        const nlohmann::json config = {{"angular", false}, {"kappa1", "1 GHz"},
                                       {"kappa2", "1 GHz"}, {"gamma", "1 MHz"},
                                       {"G1", "20 MHz"},    {"G2", "100 MHz"},
                                       {"tau1", "31 ns"},   {"tau2", "75 ns"}};
        const auto prm = feas::params_from_json(config, errors);
        CHECK(errors.empty());
        CHECK(prm.kappa1 == doctest::Approx(2.0 * core::pi * 1e9).epsilon(1e-12));
        CHECK(prm.tau1 == doctest::Approx(31e-9).epsilon(1e-15));  // durations untouched
    }

    SUBCASE("empty config lists the missing keys") {
        feas::params_from_json(nlohmann::json::object(), errors);
        CHECK(errors.size() >= 5);
    }

    SUBCASE("unknown key and bad unit are reported") {
        const nlohmann::json config = {{"kappa1", "1 lightyear"}, {"frobnicate", 3}};
        feas::params_from_json(config, errors);
        bool bad_unit = false, unknown = false;
        for (const auto& e : errors) {
            if (e.find("unknown unit") != std::string::npos) bad_unit = true;
            if (e.find("unknown key") != std::string::npos) unknown = true;
        }
        CHECK(bad_unit);
        CHECK(unknown);
    }
}

TEST_CASE("report serialization") {
    const auto rep = feas::analyze(reference_params());
    const auto j = feas::report_to_json(rep);
    CHECK(j["g2tau"].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(j["T"].get<double>() == doctest::Approx(0.950213).epsilon(1e-5));
    CHECK(j["checks"]["decoherence"]["pass"].get<bool>());
    CHECK(j.contains("warnings"));
    const auto text = feas::format_report(rep);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("g2tau") != std::string::npos);
}
