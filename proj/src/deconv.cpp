#include "uir/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>

namespace uir {

EstimatorGrid build_grid(double V, double sigma, int n) {
    if (!(V > 0.0) || !std::isfinite(V)) throw std::invalid_argument("build_grid: V must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("build_grid: sigma must be nonnegative");
    if (n < 3) throw std::invalid_argument("build_grid: need n >= 3");

    const double scale = V + sigma;
    const double logn = std::log(static_cast<double>(n));
    const double quarter = std::pow(static_cast<double>(n), 0.25);

    Grid g;
    g.alpha0 = -scale * logn;
    g.spacing = scale / quarter;
    g.N = static_cast<int>(std::ceil(2.0 * quarter * logn));

    EstimatorGrid eg;
    eg.grid = g;
    const double tol = 1e-9 * scale;
    for (int k = 0; k <= g.N; ++k) {
        const double a = g.atom(k);
        if (a >= -V - tol && a <= V + tol) eg.feasible.push_back(k);
    }
    if (eg.feasible.empty())
        throw std::invalid_argument("build_grid: no grid atom falls inside [-V, V]");
    return eg;
}

ProjectionKernel make_kernel(const NoiseModel& noise, const EstimatorGrid& eg) {
    ProjectionKernel K;
    K.grid_atoms.reserve(eg.grid.size());
    for (int k = 0; k <= eg.grid.N; ++k) K.grid_atoms.push_back(eg.grid.atom(k));
    K.feasible_atoms.reserve(eg.feasible.size());
    K.cols.reserve(eg.feasible.size());
    for (int k : eg.feasible) {
        K.feasible_atoms.push_back(eg.grid.atom(k));
        K.cols.push_back(cell_probabilities(noise, eg.grid.atom(k), eg.grid));
    }
    return K;
}

namespace {

// Kw as raw weights over the grid atoms. No normalization here; callers
// tolerate the O(eps) slack a validated w leaves.
std::vector<double> apply_kernel(std::span<const double> w, const ProjectionKernel& K) {
    std::vector<double> nu(K.n_cells(), 0.0);
    for (std::size_t j = 0; j < K.cols.size(); ++j) {
        const double wj = w[j];
        if (wj == 0.0) continue;
        const std::vector<double>& col = K.cols[j];
        for (std::size_t k = 0; k < col.size(); ++k) nu[k] += wj * col[k];
    }
    return nu;
}

double w2_squared(const std::vector<double>& atoms, const std::vector<double>& weights,
                  const EmpiricalMeasure& pi_hat) {
    const double w = wasserstein_p(MeasureView(atoms, weights), pi_hat, 2.0);
    return w * w;
}

}  // namespace

ObjectiveEval objective_and_subgradient(std::span<const double> w, const ProjectionKernel& K,
                                        const EmpiricalMeasure& pi_hat) {
    if (w.size() != K.n_feasible())
        throw std::invalid_argument("objective_and_subgradient: weight length does not match kernel");
    double sum = 0.0;
    for (double v : w) {
        if (!std::isfinite(v)) throw std::invalid_argument("objective_and_subgradient: nonfinite weight");
        if (v < -1e-9) throw std::invalid_argument("objective_and_subgradient: negative weight");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("objective_and_subgradient: weights must sum to 1");

    const std::vector<double> nu = apply_kernel(w, K);
    const CouplingWithPotentials cp =
        monotone_coupling_with_potentials(MeasureView(K.grid_atoms, nu), pi_hat, 2.0);

    ObjectiveEval out;
    out.objective = cp.primal_cost(MeasureView(K.grid_atoms, nu), pi_hat);
    out.subgradient.assign(K.n_feasible(), 0.0);
    for (std::size_t j = 0; j < K.cols.size(); ++j) {
        const std::vector<double>& col = K.cols[j];
        double g = 0.0;
        for (std::size_t k = 0; k < col.size(); ++k) g += col[k] * cp.phi[k];
        out.subgradient[j] = g;
    }
    return out;
}

namespace {

struct LineSearchHit {
    double t;
    double value;
};

// Golden-section minimum of a convex section over [0, t_max], reporting the
// best point actually evaluated (t = 0 and t = t_max included), so accepting
// the result can never increase the objective.
template <typename F>
LineSearchHit golden_min(const F& eval, double t_max, double value_at_zero) {
    LineSearchHit best{0.0, value_at_zero};
    auto consider = [&best](double t, double v) {
        if (v < best.value) best = {t, v};
    };
    consider(t_max, eval(t_max));

    constexpr double invphi = 0.6180339887498949;
    double a = 0.0, b = t_max;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    consider(x1, f1);
    consider(x2, f2);
    for (int it = 0; it < 56; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = eval(x1);
            consider(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = eval(x2);
            consider(x2, f2);
        }
    }
    return best;
}

void renormalize(std::vector<double>& w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    if (sum > 0.0)
        for (double& v : w) v /= sum;
}

}  // namespace

SolveResult solve_simplex(const ProjectionKernel& K, const EmpiricalMeasure& pi_hat,
                          const EstimatorConfig& config) {
    const std::size_t F = K.n_feasible();
    if (F == 0) throw std::invalid_argument("solve_simplex: kernel has no feasible atoms");
    if (config.max_iterations < 1)
        throw std::invalid_argument("solve_simplex: need max_iterations >= 1");
    if (config.fw_gap_tolerance && !(*config.fw_gap_tolerance >= 0.0))
        throw std::invalid_argument("solve_simplex: gap tolerance must be nonnegative");

    const double gap_tol =
        config.fw_gap_tolerance ? *config.fw_gap_tolerance : -std::numeric_limits<double>::infinity();

    std::vector<double> w(F, 1.0 / static_cast<double>(F));
    std::vector<double> best_w = w;
    double best_obj = std::numeric_limits<double>::infinity();

    std::vector<IterationStat> trace;
    trace.reserve(static_cast<std::size_t>(config.max_iterations) + 1);
    StopReason reason = StopReason::iterations;

    std::vector<double> blend(K.n_cells());
    std::vector<std::size_t> order(F);

    for (int iter = 0;; ++iter) {
        const ObjectiveEval ev = objective_and_subgradient(w, K, pi_hat);
        if (ev.objective < best_obj) {
            best_obj = ev.objective;
            best_w = w;
        }

        // FW gap: <g, w> - min_j g_j (linear minimum over the simplex).
        double gw = 0.0;
        std::size_t s = 0;
        double gmin = ev.subgradient[0];
        for (std::size_t j = 0; j < F; ++j) {
            gw += ev.subgradient[j] * w[j];
            if (ev.subgradient[j] < gmin) {
                gmin = ev.subgradient[j];
                s = j;
            }
        }
        const double gap = gw - gmin;
        trace.push_back({ev.objective, gap});

        if (gap <= gap_tol) {
            reason = StopReason::gap;
            break;
        }
        if (iter >= config.max_iterations) break;

        if (!config.line_search) {
            const double step = 2.0 / static_cast<double>(iter + 2);
            for (std::size_t j = 0; j < F; ++j) w[j] *= 1.0 - step;
            w[s] += step;
            renormalize(w);
            continue;
        }

        // Steps below float-noise size would keep the loop alive without
        // real progress; treat them as stalls.
        const double min_gain = 1e-13 * (1.0 + std::fabs(ev.objective));

        const std::vector<double> nu = apply_kernel(w, K);
        auto vertex_obj = [&](double t) {
            const std::vector<double>& col = K.cols[s];
            for (std::size_t k = 0; k < blend.size(); ++k)
                blend[k] = (1.0 - t) * nu[k] + t * col[k];
            return w2_squared(K.grid_atoms, blend, pi_hat);
        };
        const LineSearchHit vertex = golden_min(vertex_obj, 1.0, ev.objective);
        if (vertex.t > 0.0 && vertex.value < ev.objective - min_gain) {
            for (std::size_t j = 0; j < F; ++j) w[j] *= 1.0 - vertex.t;
            w[s] += vertex.t;
            renormalize(w);
            continue;
        }

        // The objective is piecewise linear, so at a kink the one returned
        // subgradient can point at a vertex whose whole segment ascends even
        // though the gap is still large. Fall back to pairwise transfers
        // (donor mass moved to one receiver), scanned most-promising first;
        // any accepted move still lowers the objective, keeping the trace
        // nonincreasing.
        for (std::size_t j = 0; j < F; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return ev.subgradient[x] < ev.subgradient[y];
        });
        bool moved = false;
        for (std::size_t di = F; di-- > 0 && !moved;) {
            const std::size_t d = order[di];
            if (w[d] <= 1e-15) continue;
            for (std::size_t ri = 0; ri < F && !moved; ++ri) {
                const std::size_t r = order[ri];
                if (r == d) continue;
                const std::vector<double>& col_r = K.cols[r];
                const std::vector<double>& col_d = K.cols[d];
                auto pair_obj = [&](double t) {
                    for (std::size_t k = 0; k < blend.size(); ++k)
                        blend[k] = nu[k] + t * (col_r[k] - col_d[k]);
                    return w2_squared(K.grid_atoms, blend, pi_hat);
                };
                const LineSearchHit hit = golden_min(pair_obj, w[d], ev.objective);
                if (hit.t > 0.0 && hit.value < ev.objective - min_gain) {
                    w[r] += hit.t;
                    w[d] = std::max(0.0, w[d] - hit.t);
                    renormalize(w);
                    moved = true;
                }
            }
        }
        if (!moved) break;  // no single transfer improves; out of moves
    }

    renormalize(best_w);
    return SolveResult{GridMeasure(K.feasible_atoms, std::move(best_w)), std::move(trace), reason};
}

DeconvResult estimate(const DesignPoints& x, std::vector<double> y, const NoiseModel& noise,
                      double V, EstimatorConfig config) {
    if (y.size() != x.size()) throw std::invalid_argument("estimate: x and y sizes differ");
    const int n = static_cast<int>(y.size());

    const EstimatorGrid eg = build_grid(V, noise.sigma(), n);
    const ProjectionKernel K = make_kernel(noise, eg);
    if (!config.fw_gap_tolerance) {
        const double scale = V + noise.sigma();
        config.fw_gap_tolerance = 1e-6 * scale * scale;
    }

    const EmpiricalMeasure pi_hat(std::move(y));
    SolveResult sr = solve_simplex(K, pi_hat, config);
    IsotonicFn g_hat = round_to_isotonic(sr.mu_hat, x, V);
    return DeconvResult{std::move(sr.mu_hat), std::move(g_hat), std::move(sr.trace),
                        sr.terminated_by};
}

}  // namespace uir
