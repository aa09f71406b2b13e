#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uir {

// Uniform empirical measure: n atoms of mass 1/n each, kept sorted.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::vector<double> atoms);

    std::span<const double> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<double> atoms_;
};

// Finitely supported measure on a strictly increasing atom sequence.
// Weights are nonnegative and sum to one (validated to 1e-12); individual
// weights may be zero.
class GridMeasure {
public:
    GridMeasure(std::vector<double> atoms, std::vector<double> weights);

    std::span<const double> atoms() const { return atoms_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<double> atoms_;
    std::vector<double> weights_;
};

// Non-owning uniform view over either measure type. An empty weight span
// means "uniform 1/n".
class MeasureView {
public:
    MeasureView(std::span<const double> atoms, std::span<const double> weights)
        : atoms_(atoms), weights_(weights) {}
    MeasureView(const EmpiricalMeasure& m) : atoms_(m.atoms()) {}
    MeasureView(const GridMeasure& m) : atoms_(m.atoms()), weights_(m.weights()) {}

    std::size_t size() const { return atoms_.size(); }
    bool uniform() const { return weights_.empty(); }
    double atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const {
        return weights_.empty() ? 1.0 / static_cast<double>(atoms_.size()) : weights_[i];
    }

private:
    std::span<const double> atoms_;
    std::span<const double> weights_;
};

struct CoupledPair {
    std::size_t i;  // index into the first measure's atoms
    std::size_t j;  // index into the second measure's atoms
    double mass;
};

// Monotone (quantile) coupling together with Kantorovich potentials for the
// cost |x-y|^p. phi is anchored at phi[0] = 0; phi_i + psi_j equals the cost
// on every stored pair and stays <= cost off the support.
struct CouplingWithPotentials {
    std::vector<CoupledPair> pairs;
    std::vector<double> phi;
    std::vector<double> psi;
    double p = 2.0;

    double primal_cost(MeasureView a, MeasureView b) const;
};

// Exact W_p via the shared refinement of the two quantile partitions of
// [0,1]. p >= 1.
double wasserstein_p(MeasureView a, MeasureView b, double p);

// Left-continuous generalized inverse CDF: Q(u) = inf{ t : F(t) >= u } for
// u in (0, 1]. Accumulated rounding in the final cumulative weight is
// forgiven: u above the last cumulative weight maps to the top atom.
double quantile(MeasureView m, double u);

CouplingWithPotentials monotone_coupling_with_potentials(MeasureView a, MeasureView b,
                                                         double p);

}  // namespace uir
