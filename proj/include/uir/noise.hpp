#pragma once

#include <vector>

#include "uir/measures.hpp"
#include "uir/rng.hpp"

namespace uir {

enum class NoiseFamily { gaussian, laplace, uniform, point_mass };

// Centered noise distribution with an attached sub-exponential scale.
// sigma is an upper bound on the Orlicz psi_1-norm inf{t : E e^{|X|/t} <= 2}:
// exact 2*scale for Laplace, the bounded-support bound 2*half_width for
// uniform, 0 for a point mass, and the numerically solved norm for Gaussian.
class NoiseModel {
public:
    static NoiseModel gaussian(double sd);
    static NoiseModel laplace(double scale);
    static NoiseModel uniform(double half_width);
    static NoiseModel point_mass();

    NoiseFamily family() const { return family_; }
    double param() const { return param_; }
    double sigma() const { return sigma_; }

    // For the point mass the CDF is evaluated in the left-limit convention
    // P(X < t), so that floor-projection cells [a_k, a_{k+1}) bin an atom
    // sitting exactly on a_k into its own cell. Continuous families are
    // unaffected.
    double cdf(double t) const;
    double density(double t) const;  // 0 everywhere for the point mass
    double quantile(double u) const; // u in [0,1]; may return +-infinity
    double sample(Rng& rng) const;
    double raw_moment(int k) const;  // E X^k, closed form

    // Exact squared W_2 between this distribution and an empirical measure,
    // by integrating the quantile gap cell by cell in closed form.
    double w2_squared_to_empirical(const EmpiricalMeasure& e) const;

private:
    NoiseModel(NoiseFamily f, double param, double sigma)
        : family_(f), param_(param), sigma_(sigma) {}

    // partial moment H_k(x) = integral of t^k f(t) over (-inf, x], k <= 2
    double partial_moment(int k, double x) const;

    NoiseFamily family_;
    double param_;
    double sigma_;
};

NoiseModel make_noise(NoiseFamily family, double param);

// Uniform projection grid: atoms alpha_k = alpha0 + k * spacing, k = 0..N.
struct Grid {
    double alpha0 = 0.0;
    double spacing = 1.0;
    int N = 1;

    double atom(int k) const { return alpha0 + k * spacing; }
    int size() const { return N + 1; }

    // index of the floor-projection cell of x (clamped at both ends)
    int floor_cell(double x) const;
};

// Distribution of the projected noisy atom Pi_A(a + xi): weight of cell k.
// Cells are right-open, the two end cells absorb the tails.
std::vector<double> cell_probabilities(const NoiseModel& noise, double a, const Grid& grid);

// Pushforward of mu * noise under the floor projection. Every atom of mu
// must coincide with a grid atom.
GridMeasure convolve_pushforward(const GridMeasure& mu, const NoiseModel& noise,
                                 const Grid& grid);

}  // namespace uir
