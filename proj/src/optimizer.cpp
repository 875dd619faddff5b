#include "bellmag/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace bellmag::optimizer {

namespace {

using core::Complex;
using core::MeasurementSettings;

std::vector<double> settings_to_vector(const MeasurementSettings& s, bool complex_mode) {
    if (!complex_mode)
        return {s.alpha1.real(), s.alpha2.real(), s.beta1.real(), s.beta2.real()};
    return {s.alpha1.real(), s.alpha1.imag(), s.alpha2.real(), s.alpha2.imag(),
            s.beta1.real(), s.beta1.imag(), s.beta2.real(), s.beta2.imag()};
}

MeasurementSettings vector_to_settings(const std::vector<double>& x) {
    MeasurementSettings s;
    if (x.size() == 4) {
        s.alpha1 = {x[0], 0.0};
        s.alpha2 = {x[1], 0.0};
        s.beta1 = {x[2], 0.0};
        s.beta2 = {x[3], 0.0};
    } else {
        s.alpha1 = {x[0], x[1]};
        s.alpha2 = {x[2], x[3]};
        s.beta1 = {x[4], x[5]};
        s.beta2 = {x[6], x[7]};
    }
    return s;
}

double settings_norm2(const MeasurementSettings& s) {
    return std::norm(s.alpha1) + std::norm(s.alpha2) + std::norm(s.beta1) +
           std::norm(s.beta2);
}

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;  // maximized objective value
    bool converged = false;
    long long evals = 0;
};

// Standard Nelder-Mead maximization (reflection / expansion / contraction /
// shrink), deterministic.
NelderMeadResult nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& start, double init_step,
                                 double tol, int max_iter) {
    const int d = static_cast<int>(start.size());
    long long evals = 0;
    auto neg = [&](const std::vector<double>& x) {
        ++evals;
        return -f(x);
    };

    std::vector<std::vector<double>> xs(d + 1, start);
    std::vector<double> fs(d + 1);
    for (int i = 1; i <= d; ++i) xs[i][i - 1] += init_step;
    for (int i = 0; i <= d; ++i) fs[i] = neg(xs[i]);

    auto order = [&] {
        std::vector<int> idx(d + 1);
        for (int i = 0; i <= d; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> nxs(d + 1);
        std::vector<double> nfs(d + 1);
        for (int i = 0; i <= d; ++i) {
            nxs[i] = xs[idx[i]];
            nfs[i] = fs[idx[i]];
        }
        xs = std::move(nxs);
        fs = std::move(nfs);
    };

    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::abs(fs[d] - fs[0]) <= tol * (std::abs(fs[0]) + 1e-12)) {
            converged = true;
            break;
        }
        std::vector<double> centroid(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) centroid[j] += xs[i][j] / d;

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (int j = 0; j < d; ++j)
                x[j] = centroid[j] + coef * (centroid[j] - xs[d][j]);
            return x;
        };

        const std::vector<double> xr = blend(1.0);
        const double fr = neg(xr);
        if (fr < fs[0]) {
            const std::vector<double> xe = blend(2.0);
            const double fe = neg(xe);
            if (fe < fr) {
                xs[d] = xe;
                fs[d] = fe;
            } else {
                xs[d] = xr;
                fs[d] = fr;
            }
        } else if (fr < fs[d - 1]) {
            xs[d] = xr;
            fs[d] = fr;
        } else if (fr < fs[d]) {
            const std::vector<double> xc = blend(0.5);
            const double fc = neg(xc);
            if (fc <= fr) {
                xs[d] = xc;
                fs[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    for (int j = 0; j < d; ++j)
                        xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
                    fs[i] = neg(xs[i]);
                }
            }
        } else {
            const std::vector<double> xc = blend(-0.5);
            const double fc = neg(xc);
            if (fc < fs[d]) {
                xs[d] = xc;
                fs[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    for (int j = 0; j < d; ++j)
                        xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
                    fs[i] = neg(xs[i]);
                }
            }
        }
    }
    order();
    return {xs[0], -fs[0], converged, evals};
}

struct GridCandidate {
    double S = -1.0;
    double norm2 = std::numeric_limits<double>::infinity();
    std::array<int, 4> idx{0, 0, 0, 0};
};

bool better_candidate(double S, double norm2, const GridCandidate& other) {
    if (S > other.S + 1e-12) return true;
    if (S < other.S - 1e-12) return false;
    return norm2 < other.norm2 - 1e-15;
}

void run_parallel(int n_items, int parallel, const std::function<void(int)>& work) {
    int threads = parallel > 0 ? parallel
                               : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_items));
    if (threads == 1) {
        for (int i = 0; i < n_items; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

OptimizationResult pick_better(OptimizationResult a, OptimizationResult b) {
    if (b.best_S > a.best_S + 1e-12) return b;
    if (a.best_S > b.best_S + 1e-12) return a;
    return settings_norm2(b.settings) < settings_norm2(a.settings) - 1e-15 ? b : a;
}

}  // namespace

MeasurementSettings canonicalize(const MeasurementSettings& s) {
    const double comps[8] = {s.alpha1.real(), s.alpha1.imag(), s.alpha2.real(),
                             s.alpha2.imag(), s.beta1.real(),  s.beta1.imag(),
                             s.beta2.real(),  s.beta2.imag()};
    auto flip = [](Complex z) {  // adding 0.0 turns -0 into +0
        return Complex(-z.real() + 0.0, -z.imag() + 0.0);
    };
    for (double c : comps) {
        if (c > 0.0) return s;
        if (c < 0.0)
            return {flip(s.alpha1), flip(s.alpha2), flip(s.beta1), flip(s.beta2)};
    }
    return s;
}

std::vector<double> linspace_grid(double min, double max, double step) {
    if (!(step > 0.0) || !(min < max))
        throw std::domain_error("grid: need step > 0 and min < max");
    const int n = static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> values(n);
    for (int k = 0; k < n; ++k) values[k] = min + k * step;
    return values;
}

void SweepSpec::validate() const {
    if (!(axis_step > 0.0) || !(axis_min < axis_max))
        throw std::domain_error("SweepSpec: need step > 0 and min < max");
    if (curves.empty()) throw std::domain_error("SweepSpec: curve list is empty");
}

OptimizationResult optimize_settings(const Objective& objective,
                                     const OptimizerConfig& config) {
    const std::vector<double> xs =
        linspace_grid(config.grid_min, config.grid_max, config.grid_step);
    const int n = static_cast<int>(xs.size());
    long long evals = 0;

    // Pair-correlation table; the 4-d grid scan then needs only additions.
    std::vector<std::vector<double>> corr(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            corr[i][j] = objective.pair_correlation(Complex(xs[i], 0.0),
                                                    Complex(xs[j], 0.0));
            ++evals;
        }

    const int keep = std::max(1, config.refine_starts);
    std::vector<GridCandidate> best(keep);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int j1 = 0; j1 < n; ++j1) {
                const double e11 = corr[i1][j1];
                const double e21 = corr[i2][j1];
                for (int j2 = 0; j2 < n; ++j2) {
                    const double S = std::abs(e11 + corr[i1][j2] + e21 - corr[i2][j2]);
                    if (!better_candidate(S, 0.0, best[keep - 1])) continue;
                    const double norm2 = xs[i1] * xs[i1] + xs[i2] * xs[i2] +
                                         xs[j1] * xs[j1] + xs[j2] * xs[j2];
                    GridCandidate cand{S, norm2, {i1, i2, j1, j2}};
                    int pos = keep - 1;
                    if (!better_candidate(cand.S, cand.norm2, best[pos])) continue;
                    while (pos > 0 && better_candidate(cand.S, cand.norm2, best[pos - 1])) {
                        best[pos] = best[pos - 1];
                        --pos;
                    }
                    best[pos] = cand;
                }
            }

    OptimizationResult result;
    result.objective = objective;
    result.best_S = -1.0;
    for (int k = 0; k < keep; ++k) {
        if (best[k].S < 0.0) continue;
        std::vector<double> x0 = {xs[best[k].idx[0]], xs[best[k].idx[1]],
                                  xs[best[k].idx[2]], xs[best[k].idx[3]]};
        if (config.complex_settings) x0 = settings_to_vector(vector_to_settings(x0), true);
        auto f = [&](const std::vector<double>& x) {
            return objective.evaluate(vector_to_settings(x));
        };
        const NelderMeadResult nm =
            nelder_mead_max(f, x0, config.grid_step, config.tol, config.budget);
        evals += nm.evals;
        ++result.starts_used;
        OptimizationResult cand;
        cand.best_S = nm.value;
        cand.settings = vector_to_settings(nm.x);
        cand.converged = nm.converged;
        if (result.starts_used == 1) {
            cand.objective = objective;
            cand.starts_used = result.starts_used;
            cand.evals = 0;
            result = cand;
        } else {
            const int starts = result.starts_used;
            result = pick_better(result, cand);
            result.starts_used = starts;
        }
    }
    result.objective = objective;
    result.evals = evals;
    result.settings = canonicalize(result.settings);
    return result;
}

OptimizationResult refine_from(const Objective& objective,
                               const MeasurementSettings& start,
                               const OptimizerConfig& config) {
    auto f = [&](const std::vector<double>& x) {
        return objective.evaluate(vector_to_settings(x));
    };
    const std::vector<double> x0 = settings_to_vector(start, config.complex_settings);
    const NelderMeadResult nm =
        nelder_mead_max(f, x0, 0.05, config.tol, config.budget);
    OptimizationResult result;
    result.best_S = nm.value;
    result.settings = canonicalize(vector_to_settings(nm.x));
    result.starts_used = 1;
    result.converged = nm.converged;
    result.objective = objective;
    result.evals = nm.evals;
    return result;
}

namespace {

// One curve of a sweep: walk the axis, cold-start every point and also warm
// start from the previous optimum; keep whichever is better.
template <typename MakeObjective, typename FillRow>
void sweep_curve(const std::vector<double>& axis, const OptimizerConfig& config,
                 MakeObjective make_objective, FillRow fill_row,
                 std::vector<SweepRow>& rows, int row_offset) {
    bool have_prev = false;
    MeasurementSettings prev;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        const Objective obj = make_objective(axis[k]);
        OptimizationResult res = optimize_settings(obj, config);
        if (have_prev) res = pick_better(res, refine_from(obj, prev, config));
        prev = res.settings;
        have_prev = true;
        SweepRow row;
        row.S = res.best_S;
        row.settings = res.settings;
        row.converged = res.converged;
        fill_row(row, axis[k], obj);
        rows[row_offset + static_cast<int>(k)] = row;
    }
}

}  // namespace

std::vector<SweepRow> sweep_g1tau(const SweepSpec& spec, int parallel) {
    spec.validate();
    if (spec.eta != 1.0)
        for (double T : spec.curves)
            if (T != 1.0)
                throw std::domain_error("sweep_g1tau: eta < 1 requires T = 1");
    const std::vector<double> axis = spec.axis_values();
    const int per_curve = static_cast<int>(axis.size());
    std::vector<SweepRow> rows(spec.curves.size() * axis.size());

    run_parallel(static_cast<int>(spec.curves.size()), parallel, [&](int c) {
        const double T = spec.curves[c];
        sweep_curve(
            axis, spec.opt,
            [&](double g1tau) {
                const double p = core::p_from_g1tau(g1tau);
                if (spec.eta == 1.0) return Objective{Objective::Kind::ChshT, p, T};
                return Objective{Objective::Kind::ChshEta, p, spec.eta};
            },
            [&](SweepRow& row, double g1tau, const Objective& obj) {
                row.g1tau = g1tau;
                row.p = obj.p;
                row.T = T;
                row.eta = spec.eta;
            },
            rows, c * per_curve);
    });
    return rows;
}

std::vector<SweepRow> sweep_g2tau(const SweepSpec& spec, int parallel) {
    spec.validate();
    if (spec.eta != 1.0)
        throw std::domain_error("sweep_g2tau: the efficiency form assumes T = 1");
    const std::vector<double> axis = spec.axis_values();
    const int per_curve = static_cast<int>(axis.size());
    std::vector<SweepRow> rows(spec.curves.size() * axis.size());

    run_parallel(static_cast<int>(spec.curves.size()), parallel, [&](int c) {
        const double p = spec.curves[c];
        sweep_curve(
            axis, spec.opt,
            [&](double g2tau) {
                return Objective{Objective::Kind::ChshT, p, core::T_from_g2tau(g2tau)};
            },
            [&](SweepRow& row, double g2tau, const Objective& obj) {
                row.g2tau = g2tau;
                row.p = p;
                row.T = obj.second;
                row.eta = 1.0;
            },
            rows, c * per_curve);
    });
    return rows;
}

std::vector<SweepRow> contour_eta(const std::vector<double>& g1tau_grid,
                                  const std::vector<double>& eta_grid,
                                  const OptimizerConfig& config, int parallel) {
    std::vector<SweepRow> rows(eta_grid.size() * g1tau_grid.size());
    const int per_curve = static_cast<int>(g1tau_grid.size());

    run_parallel(static_cast<int>(eta_grid.size()), parallel, [&](int c) {
        const double eta = eta_grid[c];
        sweep_curve(
            g1tau_grid, config,
            [&](double g1tau) {
                return Objective{Objective::Kind::ChshEta, core::p_from_g1tau(g1tau),
                                 eta};
            },
            [&](SweepRow& row, double g1tau, const Objective& obj) {
                row.g1tau = g1tau;
                row.p = obj.p;
                row.T = 1.0;
                row.eta = eta;
            },
            rows, c * per_curve);
    });
    return rows;
}

double eta_threshold(const std::vector<SweepRow>& contour_rows) {
    double threshold = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : contour_rows)
        if (row.S > 2.0 && (!(threshold == threshold) || row.eta < threshold))
            threshold = row.eta;
    return threshold;
}

}  // namespace bellmag::optimizer
