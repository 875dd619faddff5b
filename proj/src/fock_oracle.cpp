#include "bellmag/fock_oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bellmag::fock {

namespace {

constexpr double kTailTol = 1e-12;
constexpr double kSeriesTol = 1e-14;

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// sqrt(C(n,k) C(n',k)) (1-eta)^k eta^{(n+n')/2 - k}
double loss_kernel(int n, int nprime, int k, double eta) {
    const double b = std::exp(0.5 * (log_choose(n, k) + log_choose(nprime, k)));
    return b * std::pow(1.0 - eta, k) * std::pow(eta, 0.5 * (n + nprime) - k);
}

void check_probability_params(double p, double T) {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("fock: p must be in [0,1)");
    if (!(T >= 0.0 && T <= 1.0)) throw std::domain_error("fock: T must be in [0,1]");
}

}  // namespace

TruncatedState::TruncatedState(Layout layout, int cutoff, Eigen::MatrixXcd mat, bool warn)
    : layout_(layout), cutoff_(cutoff), mat_(std::move(mat)), tail_warning_(warn) {}

TruncatedState TruncatedState::pair_diagonal(int cutoff, Eigen::MatrixXcd coeff,
                                             bool tail_warning) {
    if (cutoff < 1) throw std::invalid_argument("TruncatedState: cutoff must be >= 1");
    if (coeff.rows() != cutoff + 1 || coeff.cols() != cutoff + 1)
        throw std::invalid_argument("TruncatedState: pair coefficient shape mismatch");
    return TruncatedState(Layout::PairDiagonal, cutoff, std::move(coeff), tail_warning);
}

TruncatedState TruncatedState::dense(int cutoff, Eigen::MatrixXcd rho, bool tail_warning) {
    if (cutoff < 1) throw std::invalid_argument("TruncatedState: cutoff must be >= 1");
    const int dim2 = (cutoff + 1) * (cutoff + 1);
    if (rho.rows() != dim2 || rho.cols() != dim2)
        throw std::invalid_argument("TruncatedState: dense shape mismatch");
    return TruncatedState(Layout::Dense, cutoff, std::move(rho), tail_warning);
}

Complex TruncatedState::element(int n1, int n2, int m1, int m2) const {
    if (layout_ == Layout::PairDiagonal) {
        if (n1 == n2 && m1 == m2) return mat_(n1, m1);
        return {0.0, 0.0};
    }
    const int d = dim();
    return mat_(n1 * d + n2, m1 * d + m2);
}

double TruncatedState::trace() const {
    return mat_.trace().real();  // pair-diagonal trace equals sum of c[n][n]
}

double TruncatedState::hermiticity_error() const {
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double TruncatedState::min_eigenvalue() const {
    // The pair-diagonal operator is the coefficient matrix on span{|n,n>}
    // and zero elsewhere, so its spectrum is that of the coefficient matrix
    // (plus zeros).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

TruncatedState TruncatedState::to_dense() const {
    if (layout_ == Layout::Dense) return *this;
    const int d = dim();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m)
            rho(n * d + n, m * d + m) = mat_(n, m);
    return TruncatedState(Layout::Dense, cutoff_, std::move(rho), tail_warning_);
}

Eigen::MatrixXcd TruncatedState::reduce(Arm keep) const {
    const int d = dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    if (layout_ == Layout::PairDiagonal) {
        // Tr_B |n,n><n',n'| = delta_{nn'} |n><n'|, either arm.
        for (int n = 0; n < d; ++n) out(n, n) = mat_(n, n);
        return out;
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int k = 0; k < d; ++k)
                out(a, b) += (keep == Arm::A1) ? mat_(a * d + k, b * d + k)
                                               : mat_(k * d + a, k * d + b);
    return out;
}

int required_cutoff(double p, double T, double alpha_max) {
    check_probability_params(p, T);
    int n_geo = 0;
    const double q = p * T;
    if (q > 0.0) {
        // (pT)^{N+1} / (1-pT) < 1e-12
        const double rhs = std::log(kTailTol * (1.0 - q)) / std::log(q);
        n_geo = static_cast<int>(std::ceil(rhs));
    }
    int n_coh = 0;
    while (coherent_tail_bound(alpha_max, n_coh) >= kTailTol) ++n_coh;
    return std::max({20, n_geo, n_coh});
}

double coherent_tail_bound(double abs_alpha, int cutoff) {
    if (abs_alpha == 0.0) return 0.0;
    return std::exp(2.0 * (cutoff + 1) * std::log(abs_alpha) - std::lgamma(cutoff + 2.0));
}

Eigen::VectorXcd coherent_amplitudes(Complex alpha, int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("coherent_amplitudes: cutoff must be >= 1");
    Eigen::VectorXcd amps(cutoff + 1);
    amps(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= cutoff; ++n) amps(n) = amps(n - 1) * alpha / std::sqrt(double(n));
    return amps;
}

TruncatedState build_rho1(double p, int cutoff) {
    check_probability_params(p, 1.0);
    const int d = cutoff + 1;
    Eigen::VectorXcd u(d);
    u(0) = 1.0;
    const Complex ratio(0.0, -std::sqrt(p));  // -i sqrt(p)
    for (int n = 1; n < d; ++n) u(n) = u(n - 1) * ratio;
    Eigen::MatrixXcd coeff = (1.0 - p) * (u * u.adjoint());
    const bool warn = p > 0.0 &&
        std::pow(p, cutoff + 1) / (1.0 - p) >= kTailTol;
    return TruncatedState::pair_diagonal(cutoff, std::move(coeff), warn);
}

TruncatedState build_rho_pair(double p, double T, int cutoff) {
    check_probability_params(p, T);
    const int d = cutoff + 1;
    Eigen::VectorXcd v(d);
    v(0) = 1.0;
    const double ratio = -std::sqrt(p * T);
    for (int n = 1; n < d; ++n) v(n) = v(n - 1) * ratio;
    Eigen::MatrixXcd coeff = (1.0 - p) * (v * v.adjoint());
    const double q = p * T;
    const bool warn = q > 0.0 && std::pow(q, cutoff + 1) / (1.0 - q) >= kTailTol;
    return TruncatedState::pair_diagonal(cutoff, std::move(coeff), warn);
}

namespace {

void check_coherent_tail(double abs_alpha, int cutoff) {
    if (coherent_tail_bound(abs_alpha, cutoff) < kTailTol) return;
    int needed = cutoff;
    while (coherent_tail_bound(abs_alpha, needed) >= kTailTol) ++needed;
    std::ostringstream msg;
    msg << "fock oracle: cutoff " << cutoff << " too small for |alpha| = " << abs_alpha
        << "; need at least N = " << needed;
    throw std::runtime_error(msg.str());
}

}  // namespace

double oracle_joint_prob(const TruncatedState& state, Complex alpha, Complex beta) {
    check_coherent_tail(std::max(std::abs(alpha), std::abs(beta)), state.cutoff());
    const Eigen::VectorXcd a = coherent_amplitudes(alpha, state.cutoff());
    const Eigen::VectorXcd b = coherent_amplitudes(beta, state.cutoff());
    if (state.layout() == TruncatedState::Layout::PairDiagonal) {
        const Eigen::VectorXcd z = a.cwiseProduct(b);  // z_n = <n|alpha><n|beta>
        return (z.adjoint() * state.matrix() * z)(0).real();
    }
    const int d = state.dim();
    Eigen::VectorXcd v(d * d);
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2) v(n1 * d + n2) = a(n1) * b(n2);
    return (v.adjoint() * state.matrix() * v)(0).real();
}

double oracle_marginal_prob(const TruncatedState& state, Complex alpha, Arm which_arm) {
    check_coherent_tail(std::abs(alpha), state.cutoff());
    const Eigen::MatrixXcd reduced = state.reduce(which_arm);
    const Eigen::VectorXcd a = coherent_amplitudes(alpha, state.cutoff());
    return (a.adjoint() * reduced * a)(0).real();
}

double marginal_by_outcome_sum(const TruncatedState& state, Complex alpha, Arm which_arm) {
    check_coherent_tail(std::abs(alpha), state.cutoff());
    const Eigen::VectorXcd a = coherent_amplitudes(alpha, state.cutoff());
    const int d = state.dim();
    double total = 0.0;
    if (state.layout() == TruncatedState::Layout::PairDiagonal) {
        for (int k = 0; k < d; ++k)
            total += (state.matrix()(k, k) * std::norm(a(k))).real();
        return total;
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
    for (int k = 0; k < d; ++k) {
        v.setZero();
        for (int n = 0; n < d; ++n)
            v((which_arm == Arm::A1) ? n * d + k : k * d + n) = a(n);
        total += (v.adjoint() * state.matrix() * v)(0).real();
    }
    return total;
}

TruncatedState apply_loss(const TruncatedState& state, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::domain_error("apply_loss: eta must be in (0,1]");
    if (eta == 1.0) return state;
    const int d = state.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * d, d * d);

    if (state.layout() == TruncatedState::Layout::PairDiagonal) {
        const Eigen::MatrixXcd& c = state.matrix();
        for (int n = 0; n < d; ++n)
            for (int np = 0; np < d; ++np) {
                if (c(n, np) == Complex(0.0, 0.0)) continue;
                const int kmax = std::min(n, np);
                for (int k = 0; k <= kmax; ++k) {
                    const double fk = loss_kernel(n, np, k, eta);
                    for (int l = 0; l <= kmax; ++l) {
                        const double fl = loss_kernel(n, np, l, eta);
                        out((n - k) * d + (n - l), (np - k) * d + (np - l)) +=
                            c(n, np) * fk * fl;
                    }
                }
            }
        return TruncatedState::dense(state.cutoff(), std::move(out), state.tail_warning());
    }

    // Dense: per-arm application, arm A1 then arm A2.
    Eigen::MatrixXcd rho = state.matrix();
    for (int arm = 0; arm < 2; ++arm) {
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(d * d, d * d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int ap = 0; ap < d; ++ap)
                    for (int bp = 0; bp < d; ++bp) {
                        Complex acc(0.0, 0.0);
                        const int n0 = (arm == 0) ? a : b;
                        const int m0 = (arm == 0) ? ap : bp;
                        for (int k = 0; n0 + k < d && m0 + k < d; ++k) {
                            const int n = n0 + k, m = m0 + k;
                            const int row = (arm == 0) ? n * d + b : a * d + n;
                            const int col = (arm == 0) ? m * d + bp : ap * d + m;
                            acc += loss_kernel(n, m, k, eta) * rho(row, col);
                        }
                        next(a * d + b, ap * d + bp) = acc;
                    }
        rho = std::move(next);
    }
    return TruncatedState::dense(state.cutoff(), std::move(rho), state.tail_warning());
}

ThreeModeState::ThreeModeState(int cutoff)
    : cutoff_(cutoff),
      amp_(Eigen::VectorXcd::Zero((cutoff + 1) * (cutoff + 1) * (cutoff + 1))) {
    if (cutoff < 1) throw std::invalid_argument("ThreeModeState: cutoff must be >= 1");
}

ThreeModeState ThreeModeState::vacuum(int cutoff) {
    ThreeModeState psi(cutoff);
    psi.amp_(0) = 1.0;
    return psi;
}

Complex ThreeModeState::amplitude(int n_a1, int n_a2, int n_m) const {
    return amp_(idx(n_a1, n_a2, n_m));
}

double ThreeModeState::norm2() const { return amp_.squaredNorm(); }

double ThreeModeState::magnon_vacuum_weight() const {
    const int d = cutoff_ + 1;
    double w = 0.0;
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2) w += std::norm(amp_(idx(n1, n2, 0)));
    return w;
}

TruncatedState ThreeModeState::magnon_vacuum_block() const {
    const int d = cutoff_ + 1;
    Eigen::VectorXcd phi(d);
    for (int n = 0; n < d; ++n) phi(n) = amp_(idx(n, n, 0));
    Eigen::MatrixXcd coeff = phi * phi.adjoint();
    return TruncatedState::pair_diagonal(cutoff_, std::move(coeff));
}

double ThreeModeState::off_pair_leakage() const {
    const int d = cutoff_ + 1;
    double leak = 0.0;
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
            if (n1 != n2) leak = std::max(leak, std::abs(amp_(idx(n1, n2, 0))));
    return leak;
}

TruncatedState ThreeModeState::reduce_optical() const {
    const int d = cutoff_ + 1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d * d, d * d);
    Eigen::VectorXcd slice(d * d);
    for (int nm = 0; nm < d; ++nm) {
        for (int n1 = 0; n1 < d; ++n1)
            for (int n2 = 0; n2 < d; ++n2) slice(n1 * d + n2) = amp_(idx(n1, n2, nm));
        rho.noalias() += slice * slice.adjoint();
    }
    return TruncatedState::dense(cutoff_, std::move(rho));
}

namespace {

enum class Ladder { Raise, Lower, None };

// One application of (op_a1 on A1) * (op_a2 on A2) * (op_m on m) with the
// usual sqrt(n) matrix elements; amplitudes pushed past the cutoff are
// dropped (that is the truncation).
Eigen::VectorXcd apply_ladder(const Eigen::VectorXcd& in, int cutoff,
                              Ladder op_a1, Ladder op_a2, Ladder op_m) {
    const int d = cutoff + 1;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
    auto index = [d](int n1, int n2, int nm) { return (n1 * d + n2) * d + nm; };
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
            for (int nm = 0; nm < d; ++nm) {
                const Complex value = in(index(n1, n2, nm));
                if (value == Complex(0.0, 0.0)) continue;
                int m1 = n1, m2 = n2, mm = nm;
                double factor = 1.0;
                auto step = [&](Ladder op, int& n) {
                    switch (op) {
                        case Ladder::Raise:
                            factor *= std::sqrt(double(n + 1));
                            ++n;
                            break;
                        case Ladder::Lower:
                            factor *= std::sqrt(double(n));
                            --n;
                            break;
                        case Ladder::None: break;
                    }
                };
                step(op_a1, m1);
                step(op_a2, m2);
                step(op_m, mm);
                if (factor == 0.0) continue;
                if (m1 < 0 || m1 > cutoff || m2 < 0 || m2 > cutoff || mm < 0 ||
                    mm > cutoff)
                    continue;
                out(index(m1, m2, mm)) += factor * value;
            }
    return out;
}

// exp(coeff * Op) |psi> as a truncated power series; terms are accumulated
// until the next term's norm falls below 1e-14 of the input norm.  The
// ladder structure makes every series here terminate within cutoff+1 terms.
Eigen::VectorXcd exp_series(const Eigen::VectorXcd& psi, int cutoff, Complex coeff,
                            Ladder op_a1, Ladder op_a2, Ladder op_m) {
    Eigen::VectorXcd result = psi;
    Eigen::VectorXcd term = psi;
    const double scale = psi.norm();
    for (int k = 1; k <= cutoff + 2; ++k) {
        term = apply_ladder(term, cutoff, op_a1, op_a2, op_m);
        term *= coeff / double(k);
        result += term;
        if (term.norm() < kSeriesTol * scale) break;
    }
    return result;
}

}  // namespace

ThreeModeState apply_u1(const ThreeModeState& psi, double p) {
    check_probability_params(p, 1.0);
    const double g1tau = -0.5 * std::log1p(-p);
    const double sp = std::sqrt(p);
    const int d = psi.cutoff_ + 1;

    Eigen::VectorXcd amp =
        exp_series(psi.amp_, psi.cutoff_, Complex(0.0, sp), Ladder::Lower,
                   Ladder::None, Ladder::Lower);  // exp(+i sqrt(p) A1 m)
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
            for (int nm = 0; nm < d; ++nm)
                amp((n1 * d + n2) * d + nm) *= std::exp(-g1tau * (1.0 + n1 + nm));
    amp = exp_series(amp, psi.cutoff_, Complex(0.0, -sp), Ladder::Raise,
                     Ladder::None, Ladder::Raise);  // exp(-i sqrt(p) A1+ m+)

    ThreeModeState out(psi.cutoff_);
    out.amp_ = std::move(amp);
    return out;
}

ThreeModeState apply_u2(const ThreeModeState& psi, double g2tau) {
    if (!(g2tau >= 0.0) || std::isinf(g2tau))
        throw std::domain_error("apply_u2: g2tau must be finite and >= 0");
    const double st = std::sqrt(std::expm1(2.0 * g2tau));  // sqrt(T')
    const int d = psi.cutoff_ + 1;

    Eigen::VectorXcd amp =
        exp_series(psi.amp_, psi.cutoff_, Complex(0.0, st), Ladder::None,
                   Ladder::Lower, Ladder::Raise);  // exp(+i sqrt(T') A2 m+)
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
            for (int nm = 0; nm < d; ++nm)
                amp((n1 * d + n2) * d + nm) *= std::exp(g2tau * (n2 - nm));
    amp = exp_series(amp, psi.cutoff_, Complex(0.0, -st), Ladder::None,
                     Ladder::Raise, Ladder::Lower);  // exp(-i sqrt(T') A2+ m)

    ThreeModeState out(psi.cutoff_);
    out.amp_ = std::move(amp);
    return out;
}

TruncatedState apply_U1_vacuum(double p, int cutoff) {
    const ThreeModeState chain = apply_u1(ThreeModeState::vacuum(cutoff), p);
    // A2 is untouched by U1; reduce to the (A1, m) pair coefficients.
    const int d = cutoff + 1;
    Eigen::VectorXcd phi(d);
    for (int n = 0; n < d; ++n) phi(n) = chain.amplitude(n, 0, n);
    Eigen::MatrixXcd coeff = phi * phi.adjoint();
    const bool warn = p > 0.0 && std::pow(p, cutoff + 1) / (1.0 - p) >= kTailTol;
    return TruncatedState::pair_diagonal(cutoff, std::move(coeff), warn);
}

}  // namespace bellmag::fock
