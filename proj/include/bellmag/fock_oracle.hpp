#ifndef BELLMAG_FOCK_ORACLE_HPP
#define BELLMAG_FOCK_ORACLE_HPP

// Brute-force verification layer: truncated photon-number-basis states,
// propagator application by exponential series, per-arm loss channels, and
// direct-summation click probabilities.  Everything here is independent of
// the closed forms in core_model; agreement between the two is what the
// oracle checks establish.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bellmag::fock {

using Complex = std::complex<double>;

enum class Arm { A1, A2 };

/// Two-mode density operator truncated at photon number `cutoff` per mode.
///
/// Two storage layouts:
///  - PairDiagonal: coefficients c[n][n'] over |n,n><n',n'| only.  The
///    pair-correlated states produced by the protocol have this form.
///  - Dense: full matrix over |n1,n2><m1,m2|, flattened as n1*(N+1)+n2.
///    General states, e.g. after a loss channel.
class TruncatedState {
public:
    enum class Layout { PairDiagonal, Dense };

    static TruncatedState pair_diagonal(int cutoff, Eigen::MatrixXcd coeff,
                                        bool tail_warning = false);
    static TruncatedState dense(int cutoff, Eigen::MatrixXcd rho,
                                bool tail_warning = false);

    Layout layout() const { return layout_; }
    int cutoff() const { return cutoff_; }
    int dim() const { return cutoff_ + 1; }
    bool tail_warning() const { return tail_warning_; }

    /// Raw storage: pair coefficients or dense matrix depending on layout.
    const Eigen::MatrixXcd& matrix() const { return mat_; }

    /// <n1,n2| rho |m1,m2> in either layout.
    Complex element(int n1, int n2, int m1, int m2) const;

    double trace() const;
    double hermiticity_error() const;   // max |c - c^dagger| entry
    double min_eigenvalue() const;      // PSD check: smallest eigenvalue

    TruncatedState to_dense() const;

    /// Partial trace over one arm; returns a single-mode dense matrix.
    Eigen::MatrixXcd reduce(Arm keep) const;

private:
    TruncatedState(Layout layout, int cutoff, Eigen::MatrixXcd mat, bool warn);

    Layout layout_;
    int cutoff_;
    Eigen::MatrixXcd mat_;
    bool tail_warning_;
};

/// Smallest cutoff with geometric tail (pT)^{N+1}/(1-pT) and coherent tail
/// |alpha|^{2(N+1)}/(N+1)! both below 1e-12, floored at 20.
int required_cutoff(double p, double T, double alpha_max);

/// |alpha|^{2(N+1)} / (N+1)!  (norm^2 of the discarded coherent tail).
double coherent_tail_bound(double abs_alpha, int cutoff);

/// First N+1 number-basis amplitudes <n|alpha> of a coherent state.
Eigen::VectorXcd coherent_amplitudes(Complex alpha, int cutoff);

/// rho_1 on the (A1, m) pair: c[n][n'] = (1-p)(-1)^n (i sqrt(p))^{n+n'}.
TruncatedState build_rho1(double p, int cutoff);

/// rho_{A1 A2}: c[n][n'] = (1-p)(-sqrt(pT))^{n+n'}.
TruncatedState build_rho_pair(double p, double T, int cutoff);

/// <alpha,beta| rho |alpha,beta> by direct summation.
double oracle_joint_prob(const TruncatedState& state, Complex alpha, Complex beta);

/// Partial trace over the other arm, then <alpha| . |alpha>.
double oracle_marginal_prob(const TruncatedState& state, Complex alpha, Arm which_arm);

/// Same quantity computed without the partial trace, as the sum of
/// <alpha, k| rho |alpha, k> over the other arm's number basis.  Used for
/// the no-signaling bookkeeping check.
double marginal_by_outcome_sum(const TruncatedState& state, Complex alpha, Arm which_arm);

/// Per-mode pure-loss channel of transmissivity eta applied to both arms.
TruncatedState apply_loss(const TruncatedState& state, double eta);

/// Pure state of the (A1, A2, m) register truncated at `cutoff` per mode.
class ThreeModeState {
public:
    static ThreeModeState vacuum(int cutoff);

    int cutoff() const { return cutoff_; }
    Complex amplitude(int n_a1, int n_a2, int n_m) const;
    double norm2() const;

    /// Weight of the magnon |0> sector.
    double magnon_vacuum_weight() const;

    /// Pair coefficients c[n][n'] = psi(n,n,0) conj(psi(n',n',0)) of the
    /// magnon-vacuum block, as a PairDiagonal state over (A1, A2).
    TruncatedState magnon_vacuum_block() const;

    /// Max |psi(n1,n2,0)| with n1 != n2 (leakage off the pair sector).
    double off_pair_leakage() const;

    /// True partial trace over the magnon, dense over (A1, A2).
    TruncatedState reduce_optical() const;

    friend ThreeModeState apply_u1(const ThreeModeState& psi, double p);
    friend ThreeModeState apply_u2(const ThreeModeState& psi, double g2tau);

private:
    explicit ThreeModeState(int cutoff);
    int idx(int n1, int n2, int nm) const {
        return (n1 * (cutoff_ + 1) + n2) * (cutoff_ + 1) + nm;
    }
    int cutoff_;
    Eigen::VectorXcd amp_;
};

/// Write-pulse propagator applied by truncated exponential series:
/// exp(-i sqrt(p) A1+ m+) exp(-g1tau (1 + A1+A1 + m+m)) exp(i sqrt(p) A1 m).
ThreeModeState apply_u1(const ThreeModeState& psi, double p);

/// Read-pulse propagator, with T' = e^{2 g2tau} - 1:
/// exp(-i sqrt(T') A2+ m) exp(g2tau (A2+A2 - m+m)) exp(i sqrt(T') A2 m+).
ThreeModeState apply_u2(const ThreeModeState& psi, double g2tau);

/// U1 |000>, reduced to the (A1, m) pair (A2 stays exactly vacuum).
/// Must reproduce build_rho1(p, cutoff) entrywise.
TruncatedState apply_U1_vacuum(double p, int cutoff);

}  // namespace bellmag::fock

#endif  // BELLMAG_FOCK_ORACLE_HPP
