#include "bellmag/dynamics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace bellmag::dynamics {

namespace {

using Complex = std::complex<double>;

// State vector layout for the RK4 step.
// y[0] = <a+a>, y[1] = <m+m>, y[2..3] = cross, y[4..5] = <B+a>,
// y[6..7] = <B+ m(+)>, y[8] = <B+B>.
using StateVec = std::array<double, 9>;

StateVec rhs(const StateVec& y, double t, const LangevinParams& prm, double weight_sign) {
    const double G = prm.G, kappa = prm.kappa, gamma = prm.gamma;
    const double w = std::exp(weight_sign * prm.g_tilde() * t);
    const double sqk = std::sqrt(kappa);
    const Complex cross(y[2], y[3]);
    const Complex acc_cav(y[4], y[5]);
    const Complex acc_mag(y[6], y[7]);
    const bool squeezer = prm.pulse_kind == PulseKind::Squeezer;

    StateVec dy{};
    Complex dcross, dacc_cav, dacc_mag;
    if (squeezer) {
        dy[0] = -2.0 * G * cross.imag() - kappa * y[0];
        dy[1] = -2.0 * G * cross.imag() - gamma * y[1] + gamma * prm.n_th;
        dcross = Complex(0.0, -G) * (y[0] + y[1] + 1.0) - 0.5 * (kappa + gamma) * cross;
        // acc_mag = <B+m+>, sourced by conj(<a m>)
        dacc_cav = w * sqk * y[0] - Complex(0.0, G) * acc_mag - 0.5 * kappa * acc_cav;
        dacc_mag = w * sqk * std::conj(cross) + Complex(0.0, G) * acc_cav -
                   0.5 * gamma * acc_mag;
    } else {
        dy[0] = 2.0 * G * cross.imag() - kappa * y[0];
        dy[1] = -2.0 * G * cross.imag() - gamma * y[1] + gamma * prm.n_th;
        dcross = Complex(0.0, G) * (y[1] - y[0]) - 0.5 * (kappa + gamma) * cross;
        // acc_mag = <B+m>, sourced by <a+m>
        dacc_cav = w * sqk * y[0] - Complex(0.0, G) * acc_mag - 0.5 * kappa * acc_cav;
        dacc_mag = w * sqk * cross - Complex(0.0, G) * acc_cav - 0.5 * gamma * acc_mag;
    }
    dy[2] = dcross.real();
    dy[3] = dcross.imag();
    dy[4] = dacc_cav.real();
    dy[5] = dacc_cav.imag();
    dy[6] = dacc_mag.real();
    dy[7] = dacc_mag.imag();
    dy[8] = 2.0 * w * sqk * acc_cav.real();
    return dy;
}

double normalization2(const LangevinParams& prm, double t) {
    const double gt = prm.g_tilde();
    if (gt * t <= 0.0) return 0.0;
    if (prm.pulse_kind == PulseKind::Squeezer)
        return 2.0 * gt / std::expm1(2.0 * gt * t);
    return 2.0 * gt / (-std::expm1(-2.0 * gt * t));
}

double cs_excess(const StateVec& y, const LangevinParams& prm) {
    const double c2 = y[2] * y[2] + y[3] * y[3];
    // |<am>|^2 <= (<a+a>+1)<m+m>  /  |<a+m>|^2 <= <a+a><m+m>
    const double bound = (prm.pulse_kind == PulseKind::Squeezer)
                             ? (y[0] + 1.0) * y[1]
                             : y[0] * y[1];
    return c2 - bound;
}

MomentState integrate(const LangevinParams& prm, double tau, double dt, double m_occ0,
                      std::vector<TimeSeriesPoint>* trace, int trace_points) {
    if (!(tau > 0.0) || !(dt > 0.0))
        throw std::domain_error("dynamics: tau and dt must be positive");
    if (dt > 0.01 / prm.kappa)
        throw std::domain_error("dynamics: dt must be <= 0.01/kappa");
    if (prm.G < 0.0 || prm.kappa <= 0.0 || prm.gamma < 0.0 || prm.n_th < 0.0)
        throw std::domain_error("dynamics: rates must be non-negative, kappa > 0");

    const long long n_steps = std::llround(std::ceil(tau / dt));
    const double h = tau / double(n_steps);
    const double weight_sign = (prm.pulse_kind == PulseKind::Squeezer) ? 1.0 : -1.0;
    // Linear-theory bound used for the blow-up guard.
    const double occ_bound =
        20.0 * (std::exp(2.0 * prm.g_tilde() * tau) + m_occ0 + prm.n_th + 1.0);

    StateVec y{};
    y[1] = m_occ0;
    double worst_cs = 0.0;

    const long long stride =
        std::max<long long>(1, n_steps / std::max(1, trace_points));
    if (trace) {
        trace->clear();
        trace->push_back({0.0, y[0], y[1], 0.0});
    }

    for (long long i = 0; i < n_steps; ++i) {
        const double t = i * h;
        const StateVec k1 = rhs(y, t, prm, weight_sign);
        StateVec y2;
        for (int j = 0; j < 9; ++j) y2[j] = y[j] + 0.5 * h * k1[j];
        const StateVec k2 = rhs(y2, t + 0.5 * h, prm, weight_sign);
        for (int j = 0; j < 9; ++j) y2[j] = y[j] + 0.5 * h * k2[j];
        const StateVec k3 = rhs(y2, t + 0.5 * h, prm, weight_sign);
        for (int j = 0; j < 9; ++j) y2[j] = y[j] + h * k3[j];
        const StateVec k4 = rhs(y2, t + h, prm, weight_sign);
        for (int j = 0; j < 9; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        if (!std::isfinite(y[1]) || y[0] > occ_bound || y[1] > occ_bound)
            throw std::runtime_error("dynamics: moment blow-up, reduce dt");
        worst_cs = std::max(worst_cs, cs_excess(y, prm));

        if (trace && ((i + 1) % stride == 0 || i + 1 == n_steps)) {
            const double tn = (i + 1) * h;
            trace->push_back({tn, y[0], y[1], normalization2(prm, tn) * y[8]});
        }
    }

    MomentState out;
    out.time = tau;
    out.cavity_occ = y[0];
    out.magnon_occ = y[1];
    out.cross = Complex(y[2], y[3]);
    out.acc_occ = y[8];
    out.acc_cavity = Complex(y[4], y[5]);
    out.acc_magnon = Complex(y[6], y[7]);
    out.out_mode_occ = normalization2(prm, tau) * y[8];
    out.cs_violation = std::max(0.0, worst_cs);
    return out;
}

}  // namespace

double default_dt(const LangevinParams& params, double tau) {
    return std::min(0.005 / params.kappa, tau / 2000.0);
}

MomentState integrate_first_pulse(const LangevinParams& params, double tau1, double dt,
                                  std::vector<TimeSeriesPoint>* trace, int trace_points) {
    if (params.pulse_kind != PulseKind::Squeezer)
        throw std::invalid_argument("integrate_first_pulse: params must be a squeezer pulse");
    return integrate(params, tau1, dt, 0.0, trace, trace_points);
}

MomentState integrate_second_pulse(const LangevinParams& params, double tau2, double dt,
                                   double m_occ0, std::vector<TimeSeriesPoint>* trace,
                                   int trace_points) {
    if (params.pulse_kind != PulseKind::BeamSplitter)
        throw std::invalid_argument(
            "integrate_second_pulse: params must be a beam-splitter pulse");
    if (m_occ0 < 0.0) throw std::domain_error("integrate_second_pulse: m_occ0 must be >= 0");
    return integrate(params, tau2, dt, m_occ0, trace, trace_points);
}

double output_mode_moment(const LangevinParams& params, double tau, double dt,
                          double m_occ0) {
    const MomentState final_state =
        (params.pulse_kind == PulseKind::Squeezer)
            ? integrate_first_pulse(params, tau, dt)
            : integrate_second_pulse(params, tau, dt, m_occ0);
    return final_state.out_mode_occ;
}

std::vector<AdiabaticScanRow> adiabatic_error_scan(const std::vector<double>& ratios,
                                                   double g_tau) {
    if (!(g_tau > 0.0)) throw std::domain_error("adiabatic_error_scan: g_tau must be > 0");
    std::vector<AdiabaticScanRow> rows;
    rows.reserve(ratios.size());
    const double target = std::expm1(2.0 * g_tau);  // both <m+m> and <B+B> targets
    for (double ratio : ratios) {
        LangevinParams prm;
        prm.kappa = 1.0;
        prm.G = ratio;
        prm.pulse_kind = PulseKind::Squeezer;
        const double tau = g_tau / prm.g_tilde();
        const MomentState ms = integrate_first_pulse(prm, tau, default_dt(prm, tau));
        AdiabaticScanRow row;
        row.ratio = ratio;
        row.g_tau = g_tau;
        row.target = target;
        row.measured = ms.magnon_occ;
        row.rel_deviation = std::abs(ms.magnon_occ - target) / target;
        row.out_target = target;
        row.out_measured = ms.out_mode_occ;
        row.out_rel_deviation = std::abs(ms.out_mode_occ - target) / target;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace bellmag::dynamics
