#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uir/isotonic.hpp"
#include "uir/measures.hpp"
#include "uir/noise.hpp"

namespace uir {

// Projection grid sized for a sample of n observations from a target with
// |f| <= V and noise scale sigma:
//   alpha0  = -(V + sigma) log n
//   spacing = (V + sigma) / n^{1/4}
//   N       = ceil(2 n^{1/4} log n)
// feasible holds the indices of the atoms lying in [-V, V]; candidate
// estimates put mass only there.
struct EstimatorGrid {
    Grid grid;
    std::vector<int> feasible;
};

EstimatorGrid build_grid(double V, double sigma, int n);

// Column j = distribution of the floor-projected noisy emission from
// feasible atom j over all grid atoms.
struct ProjectionKernel {
    std::vector<double> grid_atoms;
    std::vector<double> feasible_atoms;
    std::vector<std::vector<double>> cols;  // cols[j][k]

    std::size_t n_cells() const { return grid_atoms.size(); }
    std::size_t n_feasible() const { return feasible_atoms.size(); }
};

ProjectionKernel make_kernel(const NoiseModel& noise, const EstimatorGrid& eg);

struct EstimatorConfig {
    int max_iterations = 2000;
    // Frank-Wolfe duality-gap stop. estimate() resolves an unset value to
    // 1e-6 (V + sigma)^2; a direct solve_simplex call with it unset runs on
    // the iteration budget alone.
    std::optional<double> fw_gap_tolerance;
    bool line_search = true;  // false: classic 2/(t+2) step sizes
};

struct IterationStat {
    double objective;
    double fw_gap;
};

enum class StopReason { gap, iterations };

struct ObjectiveEval {
    double objective;  // W_2^2(Kw, pi_hat)
    std::vector<double> subgradient;
};

// w must lie on the probability simplex over feasible atoms (checked to
// 1e-9). The subgradient is K^T phi for the first-marginal potential phi of
// the squared-cost monotone coupling.
ObjectiveEval objective_and_subgradient(std::span<const double> w, const ProjectionKernel& K,
                                        const EmpiricalMeasure& pi_hat);

struct SolveResult {
    GridMeasure mu_hat;  // on feasible atoms
    std::vector<IterationStat> trace;
    StopReason terminated_by = StopReason::iterations;
};

// Frank-Wolfe over the simplex from uniform weights, coordinate linear
// oracle, exact line search by golden section (tracking endpoint evals, so
// the objective trace never increases). Always returns the best iterate.
SolveResult solve_simplex(const ProjectionKernel& K, const EmpiricalMeasure& pi_hat,
                          const EstimatorConfig& config);

struct DeconvResult {
    GridMeasure mu_hat;
    IsotonicFn g_hat;
    std::vector<IterationStat> trace;
    StopReason terminated_by = StopReason::iterations;
};

// Full pipeline: grid + kernel from (V, noise.sigma, n), empirical measure
// of the y multiset (pairing with x is irrelevant by design), simplex
// solve, then quantile rounding onto the design.
DeconvResult estimate(const DesignPoints& x, std::vector<double> y, const NoiseModel& noise,
                      double V, EstimatorConfig config = {});

}  // namespace uir
