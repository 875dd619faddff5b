#ifndef BELLMAG_DYNAMICS_HPP
#define BELLMAG_DYNAMICS_HPP

// Un-eliminated linear Langevin dynamics for the two pulses, integrated as
// closed equations for normally-ordered second moments.  This is the
// verification target for the adiabatic (G << kappa) closed forms used by
// the protocol:
//
//   write pulse:   <m+m>(tau)  -> e^{2 Gt tau} - 1,
//                  <B+B>(tau)  -> e^{2 Gt tau} - 1   (temporal output mode),
//   read pulse:    <m+m>(tau)  -> e^{-2 Gt tau} m0,
//                  <B+B>(tau)  -> (1 - e^{-2 Gt tau}) m0,
//
// with Gt = 2 G^2 / kappa.  Because the equations of motion are linear, the
// normally-ordered moments obey a closed deterministic ODE system; no
// stochastic sampling is involved.
//
// Moment system (write pulse; a is the cavity mode, m the magnon mode,
// c = <a m>, vacuum optical input, magnon input at occupation n_th):
//
//   d<a+a>/dt = -2 G Im c - kappa <a+a>
//   d<m+m>/dt = -2 G Im c - gamma <m+m> + gamma n_th
//   dc/dt     = -i G (<a+a> + <m+m> + 1) - (kappa+gamma)/2 c
//
// Read pulse (d = <a+m>):
//
//   d<a+a>/dt = +2 G Im d - kappa <a+a>
//   d<m+m>/dt = -2 G Im d - gamma <m+m> + gamma n_th
//   dd/dt     = i G (<m+m> - <a+a>) - (kappa+gamma)/2 d
//
// Output accumulator B(t) = int_0^t w(s) a_out(s) ds with the exponential
// weight w(t) = e^{+Gt t} (write) or e^{-Gt t} (read), and
// a_out = -a_in + sqrt(kappa) a.  For vacuum optical input every
// normally-ordered moment with a_in+ on the left vanishes under the Ito
// convention, so the white-noise feedthrough contributes no diffusion term
// and the accumulator moments close as
//
//   d<B+B>/dt  = 2 w(t) sqrt(kappa) Re <B+a>
//   d<B+a>/dt  = w(t) sqrt(kappa) <a+a> - i G X - kappa/2 <B+a>
//   dX/dt      = w(t) sqrt(kappa) Y +/- i G <B+a> - gamma/2 X
//
// where for the write pulse X = <B+m+>, Y = conj(<a m>) with the + sign
// (dm+ = +iG a dt - ...), and for the read pulse X = <B+m>, Y = <a+m> with
// the - sign (dm = -iG a dt - ...).  At G = 0 the output moment is identically
// zero (reflected vacuum), which pins the absence of extra diffusion terms.
//
// The reported out-mode occupation is <B+B> times the squared temporal-mode
// normalization 2 Gt / (e^{2 Gt t} - 1) (write) or 2 Gt / (1 - e^{-2 Gt t})
// (read).

#include <complex>
#include <vector>

namespace bellmag::dynamics {

enum class PulseKind { Squeezer, BeamSplitter };

struct LangevinParams {
    double G = 0.0;       // effective coupling (rad/s)
    double kappa = 1.0;   // cavity linewidth (rad/s); over-coupled, kappa = kappa_ex
    double gamma = 0.0;   // magnon decay (rad/s)
    double n_th = 0.0;    // magnon bath occupation
    PulseKind pulse_kind = PulseKind::Squeezer;

    double g_tilde() const { return 2.0 * G * G / kappa; }
};

struct MomentState {
    double time = 0.0;
    double cavity_occ = 0.0;             // <a+a>
    double magnon_occ = 0.0;             // <m+m>
    std::complex<double> cross{0.0, 0.0};  // <a m> (write) or <a+m> (read)
    double out_mode_occ = 0.0;           // normalized temporal-mode occupation
    double acc_occ = 0.0;                // raw <B+B>
    std::complex<double> acc_cavity{0.0, 0.0};  // <B+a>
    std::complex<double> acc_magnon{0.0, 0.0};  // <B+m+> (write) or <B+m> (read)
    double cs_violation = 0.0;  // worst Cauchy-Schwarz excess seen, >=0
};

struct TimeSeriesPoint {
    double t;
    double cavity_occ;
    double magnon_occ;
    double out_mode_occ;
};

/// dt = min(0.005/kappa, tau/2000).
double default_dt(const LangevinParams& params, double tau);

/// Integrate the write-pulse moment system from vacuum over [0, tau1].
/// Fixed-step RK4; requires dt <= 0.01/kappa.  Throws on moment blow-up.
MomentState integrate_first_pulse(const LangevinParams& params, double tau1, double dt,
                                  std::vector<TimeSeriesPoint>* trace = nullptr,
                                  int trace_points = 200);

/// Integrate the read-pulse system with the magnon starting at m_occ0.
MomentState integrate_second_pulse(const LangevinParams& params, double tau2, double dt,
                                   double m_occ0,
                                   std::vector<TimeSeriesPoint>* trace = nullptr,
                                   int trace_points = 200);

/// Final normalized occupation of the filtered output mode.
double output_mode_moment(const LangevinParams& params, double tau, double dt,
                          double m_occ0 = 0.0);

struct AdiabaticScanRow {
    double ratio;          // G / kappa
    double g_tau;          // fixed pulse area
    double target;         // closed-form <m+m>
    double measured;       // integrated <m+m>
    double rel_deviation;  // |measured - target| / target
    double out_target;     // closed-form output-mode occupation
    double out_measured;
    double out_rel_deviation;
};

/// Run the write pulse across G/kappa ratios at fixed pulse area and report
/// the deviation from the adiabatic closed forms.
std::vector<AdiabaticScanRow> adiabatic_error_scan(const std::vector<double>& ratios,
                                                   double g_tau);

}  // namespace bellmag::dynamics

#endif  // BELLMAG_DYNAMICS_HPP
