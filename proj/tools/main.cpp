// bellmag command-line front end: parameter sweeps, CHSH optimization,
// oracle verification, Langevin moment dynamics, and feasibility reports.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage/config error,
// 3 verification failure.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellmag/core_model.hpp"
#include "bellmag/dynamics.hpp"
#include "bellmag/experiment_config.hpp"
#include "bellmag/feasibility.hpp"
#include "bellmag/fock_oracle.hpp"
#include "bellmag/optimizer.hpp"

namespace {

using bellmag::core::Complex;
using bellmag::core::MeasurementSettings;

std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // strip negative-zero sign
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* kSettingsHeader =
    "alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta1_re,beta1_im,beta2_re,beta2_im";

std::string settings_cols(const MeasurementSettings& s) {
    return fmt(s.alpha1.real()) + "," + fmt(s.alpha1.imag()) + "," +
           fmt(s.alpha2.real()) + "," + fmt(s.alpha2.imag()) + "," +
           fmt(s.beta1.real()) + "," + fmt(s.beta1.imag()) + "," +
           fmt(s.beta2.real()) + "," + fmt(s.beta2.imag());
}

int with_output(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file " << path << "\n";
        return 1;
    }
    write(out);
    out.flush();
    if (!out) {
        std::cerr << "error: write failed on " << path << "\n";
        return 1;
    }
    return 0;
}

struct AxisOpts {
    double min, max, step;
};

int run_sweep_g1tau(const std::vector<double>& t_list, const AxisOpts& axis,
                    const std::string& out_path, int parallel) {
    bellmag::optimizer::SweepSpec spec;
    spec.axis_name = "g1tau";
    spec.axis_min = axis.min;
    spec.axis_max = axis.max;
    spec.axis_step = axis.step;
    spec.curves = t_list;
    const auto rows = bellmag::optimizer::sweep_g1tau(spec, parallel);
    return with_output(out_path, [&](std::ostream& os) {
        os << "g1tau,T,p,S," << kSettingsHeader << "\n";
        for (const auto& row : rows)
            os << fmt(row.g1tau) << "," << fmt(row.T) << "," << fmt(row.p) << ","
               << fmt(row.S) << "," << settings_cols(row.settings) << "\n";
    });
}

int run_sweep_g2tau(const std::vector<double>& p_list, const AxisOpts& axis,
                    const std::string& out_path, int parallel) {
    bellmag::optimizer::SweepSpec spec;
    spec.axis_name = "g2tau";
    spec.axis_min = axis.min;
    spec.axis_max = axis.max;
    spec.axis_step = axis.step;
    spec.curves = p_list;
    const auto rows = bellmag::optimizer::sweep_g2tau(spec, parallel);
    return with_output(out_path, [&](std::ostream& os) {
        os << "g2tau,p,T,S," << kSettingsHeader << "\n";
        for (const auto& row : rows)
            os << fmt(row.g2tau) << "," << fmt(row.p) << "," << fmt(row.T) << ","
               << fmt(row.S) << "," << settings_cols(row.settings) << "\n";
    });
}

int run_contour_eta(const AxisOpts& g1tau_axis, const AxisOpts& eta_axis,
                    const std::string& out_path, const std::string& summary_path,
                    int parallel) {
    const auto g1tau_grid =
        bellmag::optimizer::linspace_grid(g1tau_axis.min, g1tau_axis.max, g1tau_axis.step);
    const auto eta_grid =
        bellmag::optimizer::linspace_grid(eta_axis.min, eta_axis.max, eta_axis.step);
    const auto rows =
        bellmag::optimizer::contour_eta(g1tau_grid, eta_grid, {}, parallel);
    const int rc = with_output(out_path, [&](std::ostream& os) {
        os << "g1tau,eta,S," << kSettingsHeader << "\n";
        for (const auto& row : rows)
            os << fmt(row.g1tau) << "," << fmt(row.eta) << "," << fmt(row.S) << ","
               << settings_cols(row.settings) << "\n";
    });
    if (rc != 0) return rc;

    const double threshold = bellmag::optimizer::eta_threshold(rows);
    std::cout << "eta_threshold=" << fmt(threshold) << "\n";
    if (!summary_path.empty()) {
        nlohmann::json summary;
        summary["eta_threshold"] = threshold;
        summary["eta_grid_step"] = eta_axis.step;
        return with_output(summary_path,
                           [&](std::ostream& os) { os << summary.dump(2) << "\n"; });
    }
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-check

struct CheckResult {
    std::string name;
    double max_dev = 0.0;
    double tol;
    std::string worst;  // description of the extremal tuple
};

void track(CheckResult& check, double dev, const std::string& tuple) {
    if (dev > check.max_dev) {
        check.max_dev = dev;
        check.worst = tuple;
    }
}

int run_oracle_check(int samples, double tol, unsigned long long seed) {
    namespace core = bellmag::core;
    namespace fock = bellmag::fock;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto random_amp = [&](double radius) {
        const double r = radius * std::sqrt(uni(rng));
        const double phi = 2.0 * core::pi * uni(rng);
        return Complex(r * std::cos(phi), r * std::sin(phi));
    };

    CheckResult joint{"joint_prob", 0.0, tol, ""};
    CheckResult marginal{"marginal_prob", 0.0, tol, ""};
    CheckResult corr{"correlation", 0.0, tol, ""};
    CheckResult chsh{"chsh_S", 0.0, tol, ""};
    CheckResult nosig{"no_signaling_sum", 0.0, 1e-10, ""};

    for (int i = 0; i < samples; ++i) {
        const double p = 0.8 * uni(rng);
        const double T = (uni(rng) < 0.25) ? 1.0 : uni(rng);
        const Complex alpha = random_amp(2.0);
        const Complex beta = random_amp(2.0);
        const int N = fock::required_cutoff(p, T, 2.0);
        const auto state = fock::build_rho_pair(p, T, N);
        std::ostringstream tuple;
        tuple << "p=" << p << " T=" << T << " alpha=" << alpha << " beta=" << beta;

        track(joint,
              std::abs(core::joint_click_prob(p, T, alpha, beta) -
                       fock::oracle_joint_prob(state, alpha, beta)),
              tuple.str());
        const double om = fock::oracle_marginal_prob(state, alpha, fock::Arm::A1);
        track(marginal, std::abs(core::marginal_click_prob(p, T, alpha) - om),
              tuple.str());
        track(nosig,
              std::abs(fock::marginal_by_outcome_sum(state, alpha, fock::Arm::A1) - om),
              tuple.str());
        const double oracle_corr =
            4.0 * fock::oracle_joint_prob(state, alpha, beta) -
            2.0 * (fock::oracle_marginal_prob(state, alpha, fock::Arm::A1) +
                   fock::oracle_marginal_prob(state, beta, fock::Arm::A2)) +
            1.0;
        track(corr, std::abs(core::correlation(p, T, alpha, beta) - oracle_corr),
              tuple.str());

        if (i % 4 == 0) {
            MeasurementSettings s{random_amp(2.0), random_amp(2.0), random_amp(2.0),
                                  random_amp(2.0)};
            auto oracle_E = [&](Complex a, Complex b) {
                return 4.0 * fock::oracle_joint_prob(state, a, b) -
                       2.0 * (fock::oracle_marginal_prob(state, a, fock::Arm::A1) +
                              fock::oracle_marginal_prob(state, b, fock::Arm::A2)) +
                       1.0;
            };
            const double oracle_S =
                std::abs(oracle_E(s.alpha1, s.beta1) + oracle_E(s.alpha1, s.beta2) +
                         oracle_E(s.alpha2, s.beta1) - oracle_E(s.alpha2, s.beta2));
            track(chsh, std::abs(core::chsh_S(p, T, s) - oracle_S), tuple.str());
        }
    }

    // Propagator chain vs the closed-form coefficient matrices, guard band of
    // 10 levels below the cutoff excluded.
    CheckResult chain{"propagator_chain", 0.0, 1e-9, ""};
    CheckResult u1_check{"u1_closed_form", 0.0, 1e-10, ""};
    const int chain_cutoff = 40, guard = 10;
    for (const auto& [p, g2tau] : std::vector<std::pair<double, double>>{
             {0.3935, 1.5}, {0.6, 0.6}}) {
        const double T = core::T_from_g2tau(g2tau);
        const auto chain_state = fock::apply_u2(
            fock::apply_u1(fock::ThreeModeState::vacuum(chain_cutoff), p), g2tau);
        const auto block = chain_state.magnon_vacuum_block();
        const auto closed = fock::build_rho_pair(p, T, chain_cutoff);
        std::ostringstream tuple;
        tuple << "p=" << p << " g2tau=" << g2tau;
        for (int n = 0; n <= chain_cutoff - guard; ++n)
            for (int m = 0; m <= chain_cutoff - guard; ++m)
                track(chain, std::abs(block.matrix()(n, m) - closed.matrix()(n, m)),
                      tuple.str());
        track(chain, chain_state.off_pair_leakage(), tuple.str() + " (off-pair leak)");

        const auto u1_state = fock::apply_U1_vacuum(p, chain_cutoff);
        const auto rho1 = fock::build_rho1(p, chain_cutoff);
        for (int n = 0; n <= chain_cutoff - guard; ++n)
            for (int m = 0; m <= chain_cutoff - guard; ++m)
                track(u1_check, std::abs(u1_state.matrix()(n, m) - rho1.matrix()(n, m)),
                      tuple.str());
    }

    // Loss channel vs the efficiency-dressed Q functions (T = 1).
    CheckResult loss_q2{"loss_q2", 0.0, 1e-8, ""};
    CheckResult loss_q1{"loss_q1", 0.0, 1e-8, ""};
    for (const auto& [p, eta] :
         std::vector<std::pair<double, double>>{{0.3935, 0.9}, {0.3935, 0.8}, {0.2, 0.7}}) {
        const int N = fock::required_cutoff(p, 1.0, 1.0);
        const auto lossy = fock::apply_loss(fock::build_rho_pair(p, 1.0, N), eta);
        const double se = std::sqrt(eta);
        for (const Complex alpha : {Complex(0.4, 0.0), Complex(0.5, -0.3)}) {
            for (const Complex beta : {Complex(0.4, 0.0), Complex(-0.2, 0.6)}) {
                const double q2_model = core::q2_eta(p, eta, alpha, beta);
                const double q2_oracle =
                    eta * eta / (core::pi * core::pi) *
                    fock::oracle_joint_prob(lossy, se * alpha, se * beta);
                std::ostringstream tuple;
                tuple << "p=" << p << " eta=" << eta << " alpha=" << alpha
                      << " beta=" << beta;
                track(loss_q2, std::abs(q2_model - q2_oracle), tuple.str());
            }
            const double q1_model = core::q1_eta(p, eta, alpha);
            const double q1_oracle =
                eta / core::pi *
                fock::oracle_marginal_prob(lossy, se * alpha, fock::Arm::A1);
            std::ostringstream tuple;
            tuple << "p=" << p << " eta=" << eta << " alpha=" << alpha;
            track(loss_q1, std::abs(q1_model - q1_oracle), tuple.str());
        }
    }

    bool all_ok = true;
    for (const CheckResult* check :
         {&joint, &marginal, &corr, &chsh, &nosig, &chain, &u1_check, &loss_q2,
          &loss_q1}) {
        const bool ok = check->max_dev <= check->tol;
        all_ok = all_ok && ok;
        std::printf("%-18s max_dev=%.3e tol=%.0e %s\n", check->name.c_str(),
                    check->max_dev, check->tol, ok ? "OK" : "FAIL");
        if (!ok) std::printf("  worst tuple: %s\n", check->worst.c_str());
    }
    return all_ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// dynamics

int run_dynamics(const std::string& pulse, double g_over_kappa, double gtau,
                 double gamma_over_kappa, double n_th, double m_occ0, double tau_in,
                 const std::string& out_path, bool json_summary) {
    namespace dyn = bellmag::dynamics;
    dyn::LangevinParams prm;
    prm.kappa = 1.0;
    prm.G = g_over_kappa;
    prm.gamma = gamma_over_kappa;
    prm.n_th = n_th;
    prm.pulse_kind =
        (pulse == "squeezer") ? dyn::PulseKind::Squeezer : dyn::PulseKind::BeamSplitter;

    double tau = tau_in;
    if (tau <= 0.0) {
        if (prm.G <= 0.0) {
            tau = 50.0;  // units of 1/kappa; closed-form targets are zero anyway
        } else {
            tau = gtau / prm.g_tilde();
        }
    }
    const double dt = dyn::default_dt(prm, tau);
    std::vector<dyn::TimeSeriesPoint> trace;
    const dyn::MomentState final_state =
        (prm.pulse_kind == dyn::PulseKind::Squeezer)
            ? dyn::integrate_first_pulse(prm, tau, dt, &trace)
            : dyn::integrate_second_pulse(prm, tau, dt, m_occ0, &trace);

    const int rc = with_output(out_path, [&](std::ostream& os) {
        os << "t,occ_cav,occ_mag,out_mode_occ\n";
        for (const auto& point : trace)
            os << fmt(point.t) << "," << fmt(point.cavity_occ) << ","
               << fmt(point.magnon_occ) << "," << fmt(point.out_mode_occ) << "\n";
    });
    if (rc != 0) return rc;

    const double area = prm.g_tilde() * tau;
    double magnon_target, out_target;
    if (prm.pulse_kind == dyn::PulseKind::Squeezer) {
        magnon_target = std::expm1(2.0 * area);
        out_target = std::expm1(2.0 * area);
    } else {
        magnon_target = std::exp(-2.0 * area) * m_occ0;
        out_target = -std::expm1(-2.0 * area) * m_occ0;
    }
    auto deviation = [](double measured, double target) {
        return target > 1e-12 ? std::abs(measured - target) / target
                              : std::abs(measured - target);
    };
    nlohmann::json summary;
    summary["pulse"] = pulse;
    summary["g_over_kappa"] = g_over_kappa;
    summary["pulse_area"] = area;
    summary["magnon_occ"] = final_state.magnon_occ;
    summary["magnon_target"] = magnon_target;
    summary["magnon_deviation"] = deviation(final_state.magnon_occ, magnon_target);
    summary["out_mode_occ"] = final_state.out_mode_occ;
    summary["out_target"] = out_target;
    summary["out_deviation"] = deviation(final_state.out_mode_occ, out_target);
    summary["cs_violation"] = final_state.cs_violation;
    if (json_summary) {
        std::cout << summary.dump(2) << "\n";
    } else {
        std::cout << "pulse=" << pulse << " area=" << fmt(area)
                  << " magnon_occ=" << fmt(final_state.magnon_occ) << " (closed form "
                  << fmt(magnon_target)
                  << ", rel dev=" << fmt(summary["magnon_deviation"].get<double>())
                  << ")\n"
                  << "out_mode_occ=" << fmt(final_state.out_mode_occ) << " (closed form "
                  << fmt(out_target)
                  << ", rel dev=" << fmt(summary["out_deviation"].get<double>()) << ")\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// feasibility

int run_feasibility(const std::string& config_path, bool json_output, bool optimize) {
    namespace feas = bellmag::feasibility;
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return 1;
    }
    nlohmann::json config;
    try {
        in >> config;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 2;
    }
    std::vector<std::string> errors;
    const feas::ExperimentParams params = feas::params_from_json(config, errors);
    if (!errors.empty()) {
        std::cerr << "config schema violations:\n";
        for (const auto& message : errors) std::cerr << "  " << message << "\n";
        return 2;
    }
    const feas::FeasibilityReport report = feas::analyze(params, {}, optimize);
    if (json_output)
        std::cout << feas::report_to_json(report).dump(2) << "\n";
    else
        std::cout << feas::format_report(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CHSH Bell-test calculator for the pulsed optomagnonic protocol"};
    app.require_subcommand(1);

    unsigned long long seed = 12345;
    int parallel = 0;
    app.add_option("--seed", seed, "random seed for sampled checks")
        ->envname("BELLMAG_SEED");
    app.add_option("--parallel", parallel,
                   "max concurrent sweep curves (default: logical cores)");

    auto* g1 = app.add_subcommand("sweep-g1tau", "optimal S versus write-pulse area");
    std::vector<double> t_list = {1.0, 0.99, 0.95, 0.9, 0.8};
    AxisOpts g1_axis{0.01, 1.0, 0.01};
    std::string g1_out = "-";
    g1->add_option("--t-list", t_list, "conversion efficiencies")->delimiter(',');
    g1->add_option("--g1tau-min", g1_axis.min);
    g1->add_option("--g1tau-max", g1_axis.max);
    g1->add_option("--g1tau-step", g1_axis.step);
    g1->add_option("--out", g1_out, "output CSV path or -");

    auto* g2 = app.add_subcommand("sweep-g2tau", "optimal S versus read-pulse area");
    std::vector<double> p_list = {0.39, 0.3, 0.2, 0.1};
    AxisOpts g2_axis{0.05, 3.0, 0.05};
    std::string g2_out = "-";
    g2->add_option("--p-list", p_list, "pair-generation parameters")->delimiter(',');
    g2->add_option("--g2tau-min", g2_axis.min);
    g2->add_option("--g2tau-max", g2_axis.max);
    g2->add_option("--g2tau-step", g2_axis.step);
    g2->add_option("--out", g2_out, "output CSV path or -");

    auto* contour =
        app.add_subcommand("contour-eta", "optimal S over the (g1tau, eta) grid");
    AxisOpts c_g1_axis{0.01, 1.0, 0.01};
    AxisOpts c_eta_axis{0.5, 1.0, 0.01};
    std::string contour_out = "-";
    std::string summary_out;
    contour->add_option("--g1tau-min", c_g1_axis.min);
    contour->add_option("--g1tau-max", c_g1_axis.max);
    contour->add_option("--g1tau-step", c_g1_axis.step);
    contour->add_option("--eta-min", c_eta_axis.min);
    contour->add_option("--eta-max", c_eta_axis.max);
    contour->add_option("--eta-step", c_eta_axis.step);
    contour->add_option("--out", contour_out, "output CSV path or -");
    contour->add_option("--summary-out", summary_out, "JSON summary path");

    auto* oracle = app.add_subcommand("oracle-check",
                                      "closed forms vs truncated Fock-space oracle");
    int samples = 200;
    double tol = 1e-9;
    oracle->add_option("--samples", samples, "random parameter tuples");
    oracle->add_option("--tol", tol, "tolerance for the probability checks");

    auto* dyn_cmd =
        app.add_subcommand("dynamics", "Langevin moment integration vs closed forms");
    std::string pulse = "squeezer";
    double g_over_kappa = 0.02, gtau = 0.25, gamma_over_kappa = 0.0, nth = 0.0;
    double m_occ0 = 1.0, tau_in = 0.0;
    std::string dyn_out = "-";
    bool dyn_json = false;
    dyn_cmd->add_option("--pulse", pulse)
        ->check(CLI::IsMember({"squeezer", "beamsplitter"}));
    dyn_cmd->add_option("--g-over-kappa", g_over_kappa);
    dyn_cmd->add_option("--gtau", gtau, "target pulse area Gt*tau");
    dyn_cmd->add_option("--gamma-over-kappa", gamma_over_kappa);
    dyn_cmd->add_option("--n-th", nth);
    dyn_cmd->add_option("--m-occ0", m_occ0, "initial magnon occupation (beamsplitter)");
    dyn_cmd->add_option("--tau", tau_in, "pulse duration in 1/kappa (overrides --gtau)");
    dyn_cmd->add_option("--out", dyn_out, "time-series CSV path or -");
    dyn_cmd->add_flag("--json", dyn_json, "JSON summary");

    auto* feas_cmd = app.add_subcommand("feasibility", "experiment parameter report");
    std::string config_path;
    bool feas_json = false, feas_opt = false;
    feas_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    feas_cmd->add_flag("--json", feas_json, "machine-readable output");
    feas_cmd->add_flag("--optimize", feas_opt, "include the optimized CHSH value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*g1) return run_sweep_g1tau(t_list, g1_axis, g1_out, parallel);
        if (*g2) return run_sweep_g2tau(p_list, g2_axis, g2_out, parallel);
        if (*contour)
            return run_contour_eta(c_g1_axis, c_eta_axis, contour_out, summary_out,
                                   parallel);
        if (*oracle) return run_oracle_check(samples, tol, seed);
        if (*dyn_cmd)
            return run_dynamics(pulse, g_over_kappa, gtau, gamma_over_kappa, nth, m_occ0,
                                tau_in, dyn_out, dyn_json);
        if (*feas_cmd) return run_feasibility(config_path, feas_json, feas_opt);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
