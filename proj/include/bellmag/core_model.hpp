#ifndef BELLMAG_CORE_MODEL_HPP
#define BELLMAG_CORE_MODEL_HPP

// Closed-form kernel for the two-pulse photon-pair protocol: click
// probabilities of displaced on-off detection, CHSH functionals, and the
// detection-efficiency (Q function) variants.
//
// The photon-pair state is parameterized by
//   p = 1 - exp(-2*g1tau)   pair-generation parameter of the write pulse,
//   T = 1 - exp(-2*g2tau)   magnon->photon conversion efficiency of the
//                           read pulse.
// For T < 1 the closed forms below describe the conversion-selected
// component of the two-pulse output; its total weight is (1-p)/(1-pT) < 1,
// so the "probabilities" are deliberately sub-normalized.  No
// renormalization is applied anywhere; use within_unit_interval() when a
// genuine probability is required.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bellmag::core {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double tsirelson_bound = 2.0 * std::numbers::sqrt2;

namespace detail {
inline void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}
}  // namespace detail

/// p = 1 - exp(-2*g1tau), strictly increasing, maps 0 -> 0.
inline double p_from_g1tau(double g1tau) {
    detail::require(std::isfinite(g1tau) && g1tau >= 0.0,
                    "p_from_g1tau: pulse area must be finite and >= 0");
    return -std::expm1(-2.0 * g1tau);
}

/// T = 1 - exp(-2*g2tau); g2tau = +inf is the T = 1 sentinel.
inline double T_from_g2tau(double g2tau) {
    detail::require(!(g2tau < 0.0) && !std::isnan(g2tau),
                    "T_from_g2tau: pulse area must be >= 0");
    if (std::isinf(g2tau)) return 1.0;
    return -std::expm1(-2.0 * g2tau);
}

/// Write-pulse parameters: pulse area g1tau and p = 1 - e^{-2 g1tau}.
struct SqueezeParam {
    double g1tau = 0.0;
    double p = 0.0;

    static SqueezeParam from_g1tau(double g1tau) {
        return {g1tau, p_from_g1tau(g1tau)};
    }
    static SqueezeParam from_p(double p) {
        detail::require(p >= 0.0 && p < 1.0, "SqueezeParam: p must be in [0,1)");
        return {-0.5 * std::log1p(-p), p};
    }
    /// Equivalent squeezing parameter r = atanh(sqrt(p)).
    double squeeze_r() const { return std::atanh(std::sqrt(p)); }
};

/// Read-pulse parameters: pulse area g2tau and T = 1 - e^{-2 g2tau}.
/// T = 1 exactly is allowed; g2tau is then stored as +inf.
struct ConversionParam {
    double g2tau = 0.0;
    double T = 0.0;

    static ConversionParam from_g2tau(double g2tau) {
        return {g2tau, T_from_g2tau(g2tau)};
    }
    static ConversionParam from_T(double T) {
        detail::require(T >= 0.0 && T <= 1.0, "ConversionParam: T must be in [0,1]");
        if (T == 1.0) return {std::numeric_limits<double>::infinity(), 1.0};
        return {-0.5 * std::log1p(-T), T};
    }
    /// T' = e^{2 g2tau} T = e^{2 g2tau} - 1 (infinite at T = 1).
    double t_prime() const {
        if (std::isinf(g2tau)) return std::numeric_limits<double>::infinity();
        return std::expm1(2.0 * g2tau);
    }
};

/// Overall detection efficiency eta = eta_d * lambda_t.
struct Efficiency {
    double eta = 1.0;
    double eta_d = std::numeric_limits<double>::quiet_NaN();
    double lambda_t = std::numeric_limits<double>::quiet_NaN();

    static Efficiency total(double eta) {
        detail::require(eta > 0.0 && eta <= 1.0, "Efficiency: eta must be in (0,1]");
        return {eta, std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
    }
    static Efficiency from_parts(double eta_d, double lambda_t) {
        detail::require(eta_d > 0.0 && eta_d <= 1.0 && lambda_t > 0.0 && lambda_t <= 1.0,
                        "Efficiency: components must be in (0,1]");
        return {eta_d * lambda_t, eta_d, lambda_t};
    }
};

/// CHSH setting quadruple: displacement amplitudes of the on-off POVM
/// P_alpha = |alpha><alpha| on each arm.  (Not the pump amplitudes.)
struct MeasurementSettings {
    Complex alpha1{0.0, 0.0};
    Complex alpha2{0.0, 0.0};
    Complex beta1{0.0, 0.0};
    Complex beta2{0.0, 0.0};
};

namespace detail {
inline void check_pT(double p, double T) {
    require(p >= 0.0 && p < 1.0, "p must be in [0,1)");
    require(T >= 0.0 && T <= 1.0, "T must be in [0,1]");
}
inline void check_p_eta(double p, double eta) {
    require(p >= 0.0 && p < 1.0, "p must be in [0,1)");
    require(eta > 0.0 && eta <= 1.0, "eta must be in (0,1]");
}
}  // namespace detail

/// P(+1 +1 | alpha beta) = (1-p) e^{-|a|^2-|b|^2} e^{-sqrt(pT)(a*b* + ab)}.
inline double joint_click_prob(double p, double T, Complex alpha, Complex beta) {
    detail::check_pT(p, T);
    const double cross = 2.0 * (alpha * beta).real();  // a*b* + ab
    return (1.0 - p) * std::exp(-std::norm(alpha) - std::norm(beta)
                                - std::sqrt(p * T) * cross);
}

/// P(+1 | alpha) = (1-p) e^{-(1-pT)|a|^2}; same form for either arm.
inline double marginal_click_prob(double p, double T, Complex alpha) {
    detail::check_pT(p, T);
    return (1.0 - p) * std::exp(-(1.0 - p * T) * std::norm(alpha));
}

/// E(alpha,beta) = 4 P(++) - 2 [P(+|a) + P(+|b)] + 1.
inline double correlation(double p, double T, Complex alpha, Complex beta) {
    return 4.0 * joint_click_prob(p, T, alpha, beta)
         - 2.0 * (marginal_click_prob(p, T, alpha) + marginal_click_prob(p, T, beta))
         + 1.0;
}

/// S = |E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|.
inline double chsh_S(double p, double T, const MeasurementSettings& s) {
    return std::abs(correlation(p, T, s.alpha1, s.beta1)
                  + correlation(p, T, s.alpha1, s.beta2)
                  + correlation(p, T, s.alpha2, s.beta1)
                  - correlation(p, T, s.alpha2, s.beta2));
}

/// R(eta) = (1-2/eta)^2 - 2(1-2/eta)(1+p)/(1-p) + 1.  R(1) = 4/(1-p).
inline double R_of_eta(double p, double eta) {
    detail::check_p_eta(p, eta);
    const double x = 1.0 - 2.0 / eta;
    const double s = (1.0 + p) / (1.0 - p);
    return x * x - 2.0 * x * s + 1.0;
}

/// S(eta) = (1+p)/(1-p) + 2/eta - 1.  S(1) = 2/(1-p).
inline double S_of_eta(double p, double eta) {
    detail::check_p_eta(p, eta);
    return (1.0 + p) / (1.0 - p) + 2.0 / eta - 1.0;
}

/// Two-mode detection Q function at overall efficiency eta (T = 1 assumed).
inline double q2_eta(double p, double eta, Complex alpha, Complex beta) {
    const double R = R_of_eta(p, eta);
    const double S = S_of_eta(p, eta);
    const double cross = 2.0 * (alpha * beta).real();
    return 4.0 / (pi * pi * R)
         * std::exp(-2.0 * (S / R) * (std::norm(alpha) + std::norm(beta))
                    - 4.0 * std::sqrt(p) / (R * (1.0 - p)) * cross);
}

/// Single-mode detection Q function at overall efficiency eta.
inline double q1_eta(double p, double eta, Complex alpha) {
    const double S = S_of_eta(p, eta);
    return 2.0 / (pi * S) * std::exp(-2.0 / S * std::norm(alpha));
}

/// CHSH combination in Q-function form; reduces to chsh_S(p, 1, s) at eta = 1.
inline double chsh_S_eta(double p, double eta, const MeasurementSettings& s) {
    const double q_sum = q2_eta(p, eta, s.alpha1, s.beta1)
                       + q2_eta(p, eta, s.alpha1, s.beta2)
                       + q2_eta(p, eta, s.alpha2, s.beta1)
                       - q2_eta(p, eta, s.alpha2, s.beta2);
    return std::abs(4.0 * pi * pi / (eta * eta) * q_sum
                  - 4.0 * pi / eta * (q1_eta(p, eta, s.alpha1) + q1_eta(p, eta, s.beta1))
                  + 2.0);
}

/// Single-pair correlation in Q form; the CHSH combination of these equals
/// chsh_S_eta.  Used by the optimizer's coarse grid.
inline double correlation_eta(double p, double eta, Complex alpha, Complex beta) {
    return 4.0 * pi * pi / (eta * eta) * q2_eta(p, eta, alpha, beta)
         - 2.0 * pi / eta * (q1_eta(p, eta, alpha) + q1_eta(p, eta, beta))
         + 1.0;
}

/// Validity check for probability-like outputs; values are never clamped.
inline bool within_unit_interval(double value, double tol = 1e-12) {
    return value >= -tol && value <= 1.0 + tol;
}

}  // namespace bellmag::core

#endif  // BELLMAG_CORE_MODEL_HPP
