#pragma once

#include "uir/measures.hpp"
#include "uir/noise.hpp"

namespace uir {

// E X^l under a discrete measure, by direct summation over atoms.
double raw_moment(MeasureView m, int l);

// Moment gap |E X^l - E Y^l|^{1/l}, l >= 1.
double delta_l(MeasureView a, MeasureView b, int l);

// p * max_{1 <= l <= Lmax} delta_l / l: the moment-matching transport bound
// stripped of its unknown universal constant.
double wasserstein_moment_surrogate(MeasureView a, MeasureView b, double p, int Lmax);

// (2l)^l * psi1_bound^{l-1} * W_2(a, b). With psi1_bound at least the
// Orlicz norm of both measures, delta_l^l never exceeds this.
double w2_to_moments_rhs(MeasureView a, MeasureView b, int l, double psi1_bound);

// E (X + xi)^l for X ~ m and independent noise xi, via the binomial
// expansion with the noise family's analytic raw moments.
double convolved_moment(MeasureView m, const NoiseModel& noise, int l);

// (4 l ||noise||_psi1)^l * sup_{1 <= m <= l} |E(X+xi)^m - E(Y+xi)^m|.
// delta_l^l of the clean measures never exceeds this. Noise must have
// positive dispersion.
double deconv_moment_rhs(MeasureView a, MeasureView b, const NoiseModel& noise, int l);

// Normalizer C_m of the squared-sinc-power density, such that the density
// below integrates to 1 (within 1e-8).
double sinc_normalizer(int m);

// f_m(t) = C_m (sin(u)/u)^{2m} with u = t/(4em); f_m(0) = C_m.
double sinc_density(int m, double t);

// (8em)^{2m} / ((2e)^n (4em + |t|)^{2m}): envelope for |f_m^(n)(t)|.
double sinc_derivative_envelope(int m, int n, double t);

struct DerivativeCheck {
    double estimate;  // central differences with Richardson extrapolation
    double bound;
    bool ok;  // |estimate| <= 1.05 * bound
};

// Checks |f_m^(n)(t)| against the envelope. n <= 5, m <= 3 (finite
// differences degrade beyond that).
DerivativeCheck sinc_derivative_check(int m, int n, double t);

// Same check for the base inequality |d^n/dt^n sin(t)/t| <= 2/(1+|t|),
// n <= 4.
DerivativeCheck sinc_base_derivative_check(int n, double t);

struct MomentMatchedPair {
    GridMeasure P;
    GridMeasure Q;
};

// Two centered measures on [-V, V] whose raw moments agree up to order
// 2k-1 within 1e-8 yet which stay W_1-separated on the order of V/k:
// P is the k-node Gauss-Legendre discretization of the uniform law, Q the
// uniform law on 4096 equispaced atoms with composite Newton-Cotes weights
// (positive, symmetric, fourth-order accurate).
MomentMatchedPair moment_matched_pair(int k, double V);

struct Chi2TvResult {
    double chi_square;      // chi^2(P*N(0,1) || Q*N(0,1)), numeric
    double tv_squared;      // TV(P*N(0,1), Q*N(0,1))^2, numeric
    double rhs;             // e^{5V^2/2} (2V^2)^k / k!
    double rhs_tensorized;  // (1 + rhs)^n - 1
};

// Smooths both measures by a standard normal and integrates the divergence
// between the mixtures. Requires raw moment gaps <= 1e-8 for orders below k
// and support inside [-V, V].
Chi2TvResult chi2_tv_bound(const GridMeasure& P, const GridMeasure& Q, int n, double V, int k);

}  // namespace uir
