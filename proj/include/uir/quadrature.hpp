#pragma once

#include <functional>
#include <vector>

namespace uir {

// Adaptive Gauss-Kronrod (G7,K15) integration on a finite interval.
// Bisects until the K15-G7 discrepancy on each panel is below the panel's
// share of abs_tol. Depth is capped; hitting the cap raises.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 48);

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1), symmetric
    std::vector<double> weights;  // sum to 2
};

// Nodes/weights by Newton iteration on the Legendre polynomial; exact for
// polynomials of degree <= 2k-1. Supports k up to 64.
GaussLegendreRule gauss_legendre(int k);

}  // namespace uir
