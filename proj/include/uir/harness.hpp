#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uir/deconv.hpp"
#include "uir/isotonic.hpp"
#include "uir/noise.hpp"

namespace uir {

// Flat experiment description, loadable from a flat JSON record with the
// same field names. Unknown keys are rejected.
struct ExperimentConfig {
    std::string function = "linear";  // linear | step | clipped_exp
    double f_lo = -1.0;
    double f_hi = 1.0;
    int f_steps = 4;      // step: number of constant pieces
    double f_rate = 5.0;  // clipped_exp: exponential growth rate
    double V = 1.0;
    std::string noise_family = "gaussian";  // gaussian | laplace | uniform | point_mass
    double noise_param = 0.3;
    std::vector<int> sizes = {100};
    int replications = 1;
    std::uint64_t seed = 1;
    std::vector<double> p_list = {1.0};
    int max_iterations = 2000;
    double fw_gap_tolerance = -1.0;  // negative: estimator default
    bool line_search = true;
};

ExperimentConfig parse_config(const std::string& json_text);
void validate(const ExperimentConfig& cfg);

NoiseModel make_noise(const ExperimentConfig& cfg);

// The configured regression function sampled at the design points.
IsotonicFn true_function(const ExperimentConfig& cfg, const DesignPoints& design);

struct Dataset {
    DesignPoints x;
    std::vector<double> y;          // shuffled: the unordered multiset, in stream order
    std::vector<double> y_coupled;  // y value generated at x[i], for the coupled baseline
    IsotonicFn truth;
};

// x_i = i/n, y_i = f(x_i) + xi_i, then a seeded shuffle. Same seed, same
// output.
Dataset generate_dataset(const ExperimentConfig& cfg, int n, std::uint64_t seed);

struct BenchmarkRow {
    int n = 0;
    std::string method;  // deconv | naive_sorted | pava_coupled
    double p = 1.0;
    int rep = 0;
    double error = 0.0;  // empirical l_p distance to the true f; +inf if the fit failed
    double seconds = 0.0;
    std::uint64_t seed = 0;
};

// One row per (size, replication, method, p), errors against the true f.
// Replication r draws from stream seed+r. Deterministic except the seconds
// column.
std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig& cfg);

std::string to_csv(const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> parse_csv(const std::string& text);

// Log-log plot of median error vs n, one polyline per (method, p) series.
std::string to_svg(const std::vector<BenchmarkRow>& rows);

}  // namespace uir
