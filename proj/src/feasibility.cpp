#include "bellmag/feasibility.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bellmag/core_model.hpp"
#include "bellmag/optimizer.hpp"

namespace bellmag::feasibility {

namespace {

constexpr double kHbar = 1.054571817e-34;   // J s
constexpr double kBoltzmann = 1.380649e-23;  // J / K

bool has(double v) { return !std::isnan(v); }

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

std::complex<double> pump_amplitude(double eps, double kappa_ex, double delta) {
    if (kappa_ex < 0.0) throw std::domain_error("pump_amplitude: kappa_ex must be >= 0");
    if (kappa_ex == 0.0 && delta == 0.0)
        throw std::domain_error("pump_amplitude: kappa_ex = 0 and delta = 0 is singular");
    return eps / std::complex<double>(-delta, 0.5 * kappa_ex);
}

std::pair<double, double> effective_couplings(const ExperimentParams& params) {
    double a1 = params.alpha1, a2 = params.alpha2;
    if (!has(a2) && has(params.eps2))
        a2 = std::abs(pump_amplitude(params.eps2,
                                     has(params.kappa_ex2) ? params.kappa_ex2
                                                           : params.kappa2,
                                     params.delta2));
    if (!has(a1) && has(params.eps1))
        a1 = std::abs(pump_amplitude(params.eps1,
                                     has(params.kappa_ex1) ? params.kappa_ex1
                                                           : params.kappa1,
                                     params.delta1));
    const double g = has(params.g) ? params.g : 0.0;
    return {has(a2) ? g * std::abs(a2) : nan_value,
            has(a1) ? g * std::abs(a1) : nan_value};
}

double thermal_occupation(double omega, double temperature_K, bool angular_frequency) {
    if (!(temperature_K > 0.0))
        throw std::domain_error("thermal_occupation: temperature must be > 0");
    if (!(omega > 0.0)) throw std::domain_error("thermal_occupation: omega must be > 0");
    const double w = angular_frequency ? omega : 2.0 * core::pi * omega;
    const double x = kHbar * w / (kBoltzmann * temperature_K);
    return 1.0 / std::expm1(x);
}

FeasibilityReport analyze(const ExperimentParams& params, const Thresholds& thresholds,
                          bool optimize_S) {
    FeasibilityReport rep;

    // Effective couplings: direct G wins, then alpha, then eps.
    auto [G1_derived, G2_derived] = effective_couplings(params);
    rep.G1 = has(params.G1) ? params.G1 : G1_derived;
    rep.G2 = has(params.G2) ? params.G2 : G2_derived;
    if (has(params.g) && params.g > 0.0) {
        rep.alpha2 = has(params.alpha2) ? params.alpha2
                                        : (has(rep.G1) ? rep.G1 / params.g : nan_value);
        rep.alpha1 = has(params.alpha1) ? params.alpha1
                                        : (has(rep.G2) ? rep.G2 / params.g : nan_value);
    } else {
        rep.alpha1 = params.alpha1;
        rep.alpha2 = params.alpha2;
    }

    if (has(rep.G1) && has(params.kappa1)) {
        rep.Gt1 = 2.0 * rep.G1 * rep.G1 / params.kappa1;
        if (has(params.tau1)) rep.g1tau = rep.Gt1 * params.tau1;
    }
    if (has(rep.G2) && has(params.kappa2)) {
        rep.Gt2 = 2.0 * rep.G2 * rep.G2 / params.kappa2;
        if (has(params.tau2)) rep.g2tau = rep.Gt2 * params.tau2;
    }
    if (has(rep.g1tau)) {
        rep.p = core::p_from_g1tau(rep.g1tau);
        rep.squeeze_r = std::atanh(std::sqrt(rep.p));
    }
    if (has(rep.g2tau)) rep.T = core::T_from_g2tau(rep.g2tau);

    rep.n_th = params.n_th;
    if (!has(rep.n_th) && has(params.temperature) && has(params.omega_m))
        rep.n_th = thermal_occupation(params.omega_m, params.temperature);

    if (has(rep.G1) && has(params.kappa1)) {
        rep.weak_coupling_1.value = rep.G1 / params.kappa1;
        rep.weak_coupling_1.threshold = thresholds.weak_coupling;
        rep.weak_coupling_1.pass = rep.weak_coupling_1.value <= thresholds.weak_coupling;
    }
    if (has(rep.G2) && has(params.kappa2)) {
        rep.weak_coupling_2.value = rep.G2 / params.kappa2;
        rep.weak_coupling_2.threshold = thresholds.weak_coupling;
        rep.weak_coupling_2.pass = rep.weak_coupling_2.value <= thresholds.weak_coupling;
    }
    if (has(params.gamma) && has(rep.n_th) && has(params.tau1) && has(params.tau2)) {
        rep.decoherence.value = (params.tau1 + params.tau2) * params.gamma * rep.n_th;
        rep.decoherence.threshold = thresholds.decoherence;
        rep.decoherence.pass = rep.decoherence.value <= thresholds.decoherence;
    }
    auto over_coupling = [&](double kappa_i, double kappa_ex) {
        ConditionCheck check;
        if (has(kappa_ex) && kappa_ex > 0.0) {
            check.value = (has(kappa_i) ? kappa_i : 0.0) / kappa_ex;
            check.threshold = thresholds.over_coupling;
            check.pass = check.value <= thresholds.over_coupling;
        }
        return check;
    };
    rep.over_coupling_1 = over_coupling(params.kappa_i1, has(params.kappa_ex1)
                                                             ? params.kappa_ex1
                                                             : params.kappa1);
    rep.over_coupling_2 = over_coupling(params.kappa_i2, has(params.kappa_ex2)
                                                             ? params.kappa_ex2
                                                             : params.kappa2);

    // Consistency warnings.
    if (has(params.kappa_ex1) && has(params.kappa_i1) && has(params.kappa1) &&
        std::abs(params.kappa_ex1 + params.kappa_i1 - params.kappa1) >
            1e-9 * params.kappa1)
        rep.warnings.push_back("kappa1 != kappa_ex1 + kappa_i1");
    if (has(params.kappa_ex2) && has(params.kappa_i2) && has(params.kappa2) &&
        std::abs(params.kappa_ex2 + params.kappa_i2 - params.kappa2) >
            1e-9 * params.kappa2)
        rep.warnings.push_back("kappa2 != kappa_ex2 + kappa_i2");

    // The CHSH optimum sits near g1tau ~ 0.25 (p ~ 0.39); flag operating
    // points far from it.
    if (has(rep.g1tau) && (rep.g1tau < 0.1 || rep.g1tau > 0.6)) {
        rep.warnings.push_back(
            "g1tau = " + format_double(rep.g1tau) +
            " is far from the violation optimum near 0.25; no significant CHSH "
            "violation is expected at this operating point");
    }

    // Direct n_th vs Bose-Einstein occupation from (omega_m, temperature).
    if (has(params.n_th) && has(params.temperature) && has(params.omega_m)) {
        const double n_angular =
            thermal_occupation(params.omega_m, params.temperature, true);
        const double n_ordinary =
            thermal_occupation(params.omega_m, params.temperature, false);
        const bool consistent =
            std::abs(params.n_th - n_angular) <= 0.2 * std::max(params.n_th, 1e-30) ||
            std::abs(params.n_th - n_ordinary) <= 0.2 * std::max(params.n_th, 1e-30);
        if (!consistent)
            rep.warnings.push_back(
                "configured n_th = " + format_double(params.n_th) +
                " does not match the Bose-Einstein occupation at omega_m and "
                "temperature: " +
                format_double(n_angular) + " (angular) / " + format_double(n_ordinary) +
                " (ordinary-frequency reading)");
    }

    if (optimize_S && has(rep.p) && has(rep.T)) {
        const auto result = optimizer::optimize_settings(
            optimizer::Objective{optimizer::Objective::Kind::ChshT, rep.p, rep.T});
        rep.optimized_S = result.best_S;
    }
    return rep;
}

}  // namespace bellmag::feasibility
