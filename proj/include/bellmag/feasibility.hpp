#ifndef BELLMAG_FEASIBILITY_HPP
#define BELLMAG_FEASIBILITY_HPP

// Mapping from physical experiment parameters (rates, pump amplitudes,
// pulse durations) to the dimensionless protocol parameters (p, T), plus
// checks of every approximation the protocol relies on: weak coupling,
// magnon decoherence margin, and cavity over-coupling.
//
// All rates are stored in angular units (rad/s) internally.  The JSON
// config layer accepts unit-suffixed strings ("1 GHz", "31 ns") with a
// per-file `angular` flag; when angular is false (the default), rate values
// are interpreted as ordinary frequencies and multiplied by 2*pi on input.

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace bellmag::feasibility {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct ExperimentParams {
    double g = nan_value;          // intrinsic optomagnonic coupling (rad/s)
    double kappa1 = nan_value;     // total cavity linewidths (rad/s)
    double kappa2 = nan_value;
    double kappa_ex1 = nan_value;  // external / intrinsic splits (rad/s)
    double kappa_ex2 = nan_value;
    double kappa_i1 = nan_value;
    double kappa_i2 = nan_value;
    double gamma = nan_value;      // magnon decay (rad/s)
    double omega_m = nan_value;    // magnon frequency (rad/s)
    double temperature = nan_value;  // K
    double n_th = nan_value;       // direct thermal occupation
    double eps1 = nan_value;       // drive amplitudes (rad/s)
    double eps2 = nan_value;
    double alpha1 = nan_value;     // pump amplitude moduli (direct input)
    double alpha2 = nan_value;
    double G1 = nan_value;         // effective couplings (direct input, rad/s)
    double G2 = nan_value;
    double delta1 = 0.0;           // detunings (rad/s)
    double delta2 = 0.0;
    double tau1 = nan_value;       // pulse durations (s)
    double tau2 = nan_value;
};

struct ConditionCheck {
    double value = nan_value;
    double threshold = nan_value;
    bool pass = false;
};

struct FeasibilityReport {
    double alpha1 = nan_value;  // pump amplitude moduli
    double alpha2 = nan_value;
    double G1 = nan_value, G2 = nan_value;        // rad/s
    double Gt1 = nan_value, Gt2 = nan_value;      // 2 G^2 / kappa (rad/s)
    double g1tau = nan_value, g2tau = nan_value;  // pulse areas
    double p = nan_value, T = nan_value;
    double n_th = nan_value;
    double squeeze_r = nan_value;
    ConditionCheck weak_coupling_1;   // G1 / kappa1
    ConditionCheck weak_coupling_2;   // G2 / kappa2
    ConditionCheck decoherence;       // (tau1 + tau2) * gamma * n_th
    ConditionCheck over_coupling_1;   // kappa_i1 / kappa_ex1
    ConditionCheck over_coupling_2;
    double optimized_S = nan_value;   // filled on request
    std::vector<std::string> warnings;
};

struct Thresholds {
    double weak_coupling = 0.1;
    double decoherence = 0.1;
    double over_coupling = 0.1;
};

/// Steady pump amplitude eps / (i kappa_ex / 2 - delta).
std::complex<double> pump_amplitude(double eps, double kappa_ex, double delta);

/// (G1, G2) = (g * |alpha2|, g * |alpha1|): each pulse's coupling is set by
/// the pump on the *other* cavity mode.
std::pair<double, double> effective_couplings(const ExperimentParams& params);

/// Bose-Einstein occupation 1 / (e^{hbar w / kB T} - 1).  `omega` is an
/// angular frequency by default; pass angular_frequency = false for an
/// ordinary frequency in Hz.
double thermal_occupation(double omega, double temperature_K,
                          bool angular_frequency = true);

/// Derive every protocol quantity and evaluate the approximation checks.
/// Failures are report flags, never exceptions.  When optimize_S is set the
/// report includes the optimized CHSH value at the derived (p, T).
FeasibilityReport analyze(const ExperimentParams& params,
                          const Thresholds& thresholds = {},
                          bool optimize_S = false);

}  // namespace bellmag::feasibility

#endif  // BELLMAG_FEASIBILITY_HPP
