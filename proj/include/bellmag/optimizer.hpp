#ifndef BELLMAG_OPTIMIZER_HPP
#define BELLMAG_OPTIMIZER_HPP

// Maximization of the CHSH functionals over measurement settings, and the
// parameter sweeps built on top of it.  Coarse multi-start grid over real
// settings followed by Nelder-Mead refinement; fully deterministic.

#include <string>
#include <vector>

#include "bellmag/core_model.hpp"

namespace bellmag::optimizer {

/// Which CHSH functional is being maximized, with its fixed parameters.
struct Objective {
    enum class Kind { ChshT, ChshEta };
    Kind kind = Kind::ChshT;
    double p = 0.0;
    double second = 1.0;  // T for ChshT, eta for ChshEta

    double evaluate(const core::MeasurementSettings& s) const {
        return kind == Kind::ChshT ? core::chsh_S(p, second, s)
                                   : core::chsh_S_eta(p, second, s);
    }
    double pair_correlation(core::Complex a, core::Complex b) const {
        return kind == Kind::ChshT ? core::correlation(p, second, a, b)
                                   : core::correlation_eta(p, second, a, b);
    }
};

struct OptimizerConfig {
    double grid_min = -2.0;
    double grid_max = 2.0;
    double grid_step = 0.25;
    int refine_starts = 5;       // simplex runs from the best grid points
    double tol = 1e-8;           // relative tolerance on S
    int budget = 600;            // max simplex iterations per start
    bool complex_settings = false;  // refine over 8 real parameters
};

struct OptimizationResult {
    double best_S = 0.0;
    core::MeasurementSettings settings;
    int starts_used = 0;
    bool converged = false;
    Objective objective;
    long long evals = 0;
};

/// Canonical sign: flip all four settings so the first nonzero component of
/// (Re a1, Im a1, Re a2, ...) is positive.  S is invariant under the flip.
core::MeasurementSettings canonicalize(const core::MeasurementSettings& s);

/// Grid stage + Nelder-Mead refinement from the best grid quadruples.
OptimizationResult optimize_settings(const Objective& objective,
                                     const OptimizerConfig& config = {});

/// Nelder-Mead only, from a given start (warm start along a sweep).
OptimizationResult refine_from(const Objective& objective,
                               const core::MeasurementSettings& start,
                               const OptimizerConfig& config = {});

/// Inclusive arithmetic grid min, min+step, ..., max.
std::vector<double> linspace_grid(double min, double max, double step);

/// Sweep axis + curve list; `curves` holds T values (g1tau sweep), p values
/// (g2tau sweep), or is unused (eta contour takes its own grid).
struct SweepSpec {
    std::string axis_name;
    double axis_min = 0.0;
    double axis_max = 1.0;
    double axis_step = 0.01;
    std::vector<double> curves;
    double eta = 1.0;
    OptimizerConfig opt;

    void validate() const;
    std::vector<double> axis_values() const {
        return linspace_grid(axis_min, axis_max, axis_step);
    }
};

struct SweepRow {
    double g1tau = 0.0;
    double g2tau = 0.0;
    double p = 0.0;
    double T = 1.0;
    double eta = 1.0;
    double S = 0.0;
    core::MeasurementSettings settings;
    bool converged = true;
};

/// Optimal S versus g1tau for each conversion efficiency in `curves`.
std::vector<SweepRow> sweep_g1tau(const SweepSpec& spec, int parallel = 0);

/// Optimal S versus g2tau for each pair parameter p in `curves`.
std::vector<SweepRow> sweep_g2tau(const SweepSpec& spec, int parallel = 0);

/// Optimal S over the (g1tau, eta) grid at T = 1.
std::vector<SweepRow> contour_eta(const std::vector<double>& g1tau_grid,
                                  const std::vector<double>& eta_grid,
                                  const OptimizerConfig& config = {}, int parallel = 0);

/// Smallest eta in the contour with S > 2 anywhere along g1tau; NaN if none.
double eta_threshold(const std::vector<SweepRow>& contour_rows);

}  // namespace bellmag::optimizer

#endif  // BELLMAG_OPTIMIZER_HPP
