#include "uir/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uir {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double cost_pow(double d, double p) {
    d = std::fabs(d);
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    if (p == 3.0) return d * d * d;
    return std::pow(d, p);
}

// Shared refinement of the two quantile partitions. Emits every (i, j) cell
// with its mass (possibly zero, so each atom appears in at least one pair).
// Rounding residue at either end is absorbed into the last atom.
template <typename Emit>
void sweep(MeasureView a, MeasureView b, Emit&& emit) {
    const std::size_t na = a.size(), nb = b.size();
    std::size_t i = 0, j = 0;
    double wa = a.weight(0), wb = b.weight(0);
    while (true) {
        double m = std::min(wa, wb);
        emit(i, j, m);
        wa -= m;
        wb -= m;
        const bool a_more = i + 1 < na, b_more = j + 1 < nb;
        const bool a_done = wa <= 0.0, b_done = wb <= 0.0;
        if (a_done && b_done) {
            if (a_more && b_more) {
                ++i; ++j;
                wa = a.weight(i);
                wb = b.weight(j);
            } else if (a_more) {
                ++i;
                wa = a.weight(i);
            } else if (b_more) {
                ++j;
                wb = b.weight(j);
            } else {
                break;
            }
        } else if (a_done) {
            if (a_more) {
                ++i;
                wa = a.weight(i);
            } else {
                wa = wb;  // absorb the residue on the top atom
            }
        } else {
            if (b_more) {
                ++j;
                wb = b.weight(j);
            } else {
                wb = wa;
            }
        }
    }
}

void validate_pair(MeasureView a, MeasureView b, double p) {
    require(a.size() > 0 && b.size() > 0, "wasserstein: empty measure");
    require(p >= 1.0, "wasserstein: order p must be >= 1");
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
    require(!atoms_.empty(), "EmpiricalMeasure: no atoms");
    for (double v : atoms_) require(std::isfinite(v), "EmpiricalMeasure: non-finite atom");
    std::sort(atoms_.begin(), atoms_.end());
}

GridMeasure::GridMeasure(std::vector<double> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    require(!atoms_.empty(), "GridMeasure: no atoms");
    require(atoms_.size() == weights_.size(), "GridMeasure: atom/weight size mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        require(std::isfinite(atoms_[k]), "GridMeasure: non-finite atom");
        if (k > 0) require(atoms_[k] > atoms_[k - 1], "GridMeasure: atoms not strictly increasing");
        require(weights_[k] >= 0.0, "GridMeasure: negative weight");
        sum += weights_[k];
    }
    require(std::fabs(sum - 1.0) <= 1e-12, "GridMeasure: weights do not sum to 1");
}

double wasserstein_p(MeasureView a, MeasureView b, double p) {
    validate_pair(a, b, p);
    double total = 0.0;
    sweep(a, b, [&](std::size_t i, std::size_t j, double m) {
        if (m > 0.0) total += m * cost_pow(a.atom(i) - b.atom(j), p);
    });
    return (p == 1.0) ? total : (p == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / p));
}

double quantile(MeasureView m, double u) {
    require(m.size() > 0, "quantile: empty measure");
    require(u > 0.0 && u <= 1.0, "quantile: u outside (0,1]");
    const std::size_t n = m.size();
    if (m.uniform()) {
        // cumulative weight after atom i is exactly (i+1)/n; evaluating it
        // as a quotient keeps F(atom_i) >= i/n exact for u of the form i/n
        std::size_t lo = 0, hi = n - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (static_cast<double>(mid + 1) / static_cast<double>(n) >= u) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return m.atom(lo);
    }
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += m.weight(i);
        if (cum >= u) return m.atom(i);
    }
    return m.atom(n - 1);  // cumulative rounding fell short of u
}

double CouplingWithPotentials::primal_cost(MeasureView a, MeasureView b) const {
    double total = 0.0;
    for (const CoupledPair& pr : pairs) {
        total += pr.mass * cost_pow(a.atom(pr.i) - b.atom(pr.j), p);
    }
    return total;
}

CouplingWithPotentials monotone_coupling_with_potentials(MeasureView a, MeasureView b,
                                                         double p) {
    validate_pair(a, b, p);
    CouplingWithPotentials out;
    out.p = p;
    sweep(a, b, [&](std::size_t i, std::size_t j, double m) {
        if (!out.pairs.empty() && out.pairs.back().i == i && out.pairs.back().j == j) {
            out.pairs.back().mass += m;
        } else {
            out.pairs.push_back({i, j, m});
        }
    });

    const auto cost = [&](std::size_t i, std::size_t j) {
        return cost_pow(a.atom(i) - b.atom(j), p);
    };

    out.phi.assign(a.size(), 0.0);
    out.psi.assign(b.size(), 0.0);
    out.phi[0] = 0.0;
    out.psi[0] = cost(0, 0);
    for (std::size_t t = 1; t < out.pairs.size(); ++t) {
        const auto& prev = out.pairs[t - 1];
        const auto& cur = out.pairs[t];
        if (cur.i == prev.i) {
            out.psi[cur.j] = cost(cur.i, cur.j) - out.phi[cur.i];
        } else if (cur.j == prev.j) {
            out.phi[cur.i] = cost(cur.i, cur.j) - out.psi[cur.j];
        } else {
            // Both indices advanced: the support splits into two components
            // and the new one carries a free additive constant. Feasibility
            // pins it to [lower, upper] via the two corner constraints
            // (Monge inequality makes the interval nonempty); we keep the
            // value closest to zero so potentials stay small.
            double lower = out.phi[prev.i] + cost(cur.i, cur.j) - cost(prev.i, cur.j);
            double upper = cost(cur.i, prev.j) - out.psi[prev.j];
            double c0;
            if (lower <= upper) {
                c0 = std::clamp(0.0, lower, upper);
            } else {
                c0 = 0.5 * (lower + upper);  // interval collapsed by rounding
            }
            out.phi[cur.i] = c0;
            out.psi[cur.j] = cost(cur.i, cur.j) - c0;
        }
    }
    return out;
}

}  // namespace uir
