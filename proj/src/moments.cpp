#include "uir/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "uir/quadrature.hpp"

namespace uir {

namespace {

double pow_int(double x, int k) {
    double out = 1.0;
    double base = x;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) out *= base;
        base *= base;
    }
    return out;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

constexpr double kE = 2.718281828459045;

}  // namespace

double raw_moment(MeasureView m, int l) {
    if (l < 0) throw std::invalid_argument("raw_moment: negative order");
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) sum += m.weight(i) * pow_int(m.atom(i), l);
    return sum;
}

double delta_l(MeasureView a, MeasureView b, int l) {
    if (l < 1) throw std::invalid_argument("delta_l: order must be >= 1");
    const double gap = std::fabs(raw_moment(a, l) - raw_moment(b, l));
    return std::pow(gap, 1.0 / static_cast<double>(l));
}

double wasserstein_moment_surrogate(MeasureView a, MeasureView b, double p, int Lmax) {
    if (Lmax < 1) throw std::invalid_argument("wasserstein_moment_surrogate: Lmax must be >= 1");
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_moment_surrogate: p must be >= 1");
    double best = 0.0;
    for (int l = 1; l <= Lmax; ++l) best = std::max(best, delta_l(a, b, l) / l);
    return p * best;
}

double w2_to_moments_rhs(MeasureView a, MeasureView b, int l, double psi1_bound) {
    if (l < 1) throw std::invalid_argument("w2_to_moments_rhs: order must be >= 1");
    if (!(psi1_bound >= 0.0)) throw std::invalid_argument("w2_to_moments_rhs: negative bound");
    return pow_int(2.0 * l, l) * std::pow(psi1_bound, l - 1) * wasserstein_p(a, b, 2.0);
}

double convolved_moment(MeasureView m, const NoiseModel& noise, int l) {
    if (l < 0) throw std::invalid_argument("convolved_moment: negative order");
    double sum = 0.0;
    for (int j = 0; j <= l; ++j)
        sum += binom(l, j) * raw_moment(m, j) * noise.raw_moment(l - j);
    return sum;
}

double deconv_moment_rhs(MeasureView a, MeasureView b, const NoiseModel& noise, int l) {
    if (l < 1) throw std::invalid_argument("deconv_moment_rhs: order must be >= 1");
    if (!(noise.sigma() > 0.0))
        throw std::invalid_argument("deconv_moment_rhs: noise must have positive dispersion");
    // E(X+xi)^m - E(Y+xi)^m expanded against the shared noise moments, so
    // only the clean-moment gaps enter and nothing large cancels.
    double sup = 0.0;
    for (int m = 1; m <= l; ++m) {
        double gap = 0.0;
        for (int j = 0; j <= m; ++j)
            gap += binom(m, j) * (raw_moment(a, j) - raw_moment(b, j)) * noise.raw_moment(m - j);
        sup = std::max(sup, std::fabs(gap));
    }
    return pow_int(4.0 * l * noise.sigma(), l) * sup;
}

namespace {

// Integral of sinc^{2m} beyond U, from the 1/u^{2m} envelope with the
// oscillation averaged out; m = 1 keeps the slowly decaying correction
// terms explicitly since they enter at order U^{-2}.
double sinc_power_tail(int m, double U) {
    if (m == 1) {
        return 1.0 / (2.0 * U) + std::sin(2.0 * U) / (4.0 * U * U) -
               std::cos(2.0 * U) / (4.0 * U * U * U);
    }
    const double mean = binom(2 * m, m) / pow_int(4.0, m);
    return mean * std::pow(U, 1.0 - 2.0 * m) / (2.0 * m - 1.0);
}

double compute_normalizer(int m) {
    const double U = 2000.0;
    const double body = integrate([m](double u) { return pow_int(sinc(u) * sinc(u), m); }, 0.0,
                                  U, 1e-12);
    const double full = 2.0 * (body + sinc_power_tail(m, U));
    return 1.0 / (4.0 * kE * m * full);
}

}  // namespace

double sinc_normalizer(int m) {
    if (m < 1) throw std::invalid_argument("sinc_normalizer: m must be >= 1");
    static const std::array<double, 9> small = [] {
        std::array<double, 9> t{};
        for (int mm = 1; mm <= 8; ++mm) t[mm] = compute_normalizer(mm);
        return t;
    }();
    if (m <= 8) return small[static_cast<std::size_t>(m)];
    return compute_normalizer(m);
}

double sinc_density(int m, double t) {
    const double c = sinc_normalizer(m);
    if (t == 0.0) return c;
    const double u = t / (4.0 * kE * m);
    const double s = sinc(u);
    return c * pow_int(s * s, m);
}

double sinc_derivative_envelope(int m, int n, double t) {
    if (m < 1) throw std::invalid_argument("sinc_derivative_envelope: m must be >= 1");
    if (n < 0) throw std::invalid_argument("sinc_derivative_envelope: negative order");
    const double scale = 4.0 * kE * m;
    return pow_int(2.0 * scale, 2 * m) /
           (pow_int(2.0 * kE, n) * pow_int(scale + std::fabs(t), 2 * m));
}

namespace {

// Central-difference stencils of order O(h^2) for derivatives 1..5.
template <typename F>
double central_difference(const F& f, int n, double t, double h) {
    switch (n) {
        case 1:
            return (f(t + h) - f(t - h)) / (2.0 * h);
        case 2:
            return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        case 3:
            return (f(t + 2 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2 * h)) /
                   (2.0 * h * h * h);
        case 4:
            return (f(t + 2 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2 * h)) /
                   (h * h * h * h);
        case 5:
            return (f(t + 3 * h) - 4.0 * f(t + 2 * h) + 5.0 * f(t + h) - 5.0 * f(t - h) +
                    4.0 * f(t - 2 * h) - f(t - 3 * h)) /
                   (2.0 * h * h * h * h * h);
        default:
            throw std::invalid_argument("central_difference: order outside 1..5");
    }
}

template <typename F>
double richardson_derivative(const F& f, int n, double t, double h) {
    if (n == 0) return f(t);
    const double coarse = central_difference(f, n, t, h);
    const double fine = central_difference(f, n, t, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;  // cancels the O(h^2) term
}

}  // namespace

DerivativeCheck sinc_derivative_check(int m, int n, double t) {
    if (m < 1 || m > 3) throw std::invalid_argument("sinc_derivative_check: m outside 1..3");
    if (n < 0 || n > 5) throw std::invalid_argument("sinc_derivative_check: n outside 0..5");
    const double est =
        richardson_derivative([m](double x) { return sinc_density(m, x); }, n, t, 0.5);
    const double bound = sinc_derivative_envelope(m, n, t);
    return DerivativeCheck{est, bound, std::fabs(est) <= 1.05 * bound};
}

DerivativeCheck sinc_base_derivative_check(int n, double t) {
    if (n < 0 || n > 4) throw std::invalid_argument("sinc_base_derivative_check: n outside 0..4");
    const double est = richardson_derivative([](double x) { return sinc(x); }, n, t, 0.05);
    const double bound = 2.0 / (1.0 + std::fabs(t));
    return DerivativeCheck{est, bound, std::fabs(est) <= 1.05 * bound};
}

MomentMatchedPair moment_matched_pair(int k, double V) {
    if (k < 1) throw std::invalid_argument("moment_matched_pair: k must be >= 1");
    if (!(V > 0.0)) throw std::invalid_argument("moment_matched_pair: V must be positive");

    const GaussLegendreRule rule = gauss_legendre(k);
    std::vector<double> p_atoms(rule.nodes);
    std::vector<double> p_weights(rule.weights);
    double wsum = 0.0;
    for (double w : p_weights) wsum += w;
    for (std::size_t i = 0; i < p_atoms.size(); ++i) {
        p_atoms[i] *= V;
        p_weights[i] /= wsum;
    }

    // 4096 atoms = 1365 blocks of three spacings: composite Simpson 3/8.
    // Coefficients 1,3,3,2,3,3,2,...,3,3,1 sum to 10920; dividing by that
    // normalizes exactly. Fourth-order accuracy keeps every moment of the
    // uniform law up to order ~15 within about 1e-10, where the midpoint
    // rule would miss at order h^2 and blow the 1e-8 matching budget.
    const int M = 4096;
    std::vector<double> q_atoms(M), q_weights(M);
    const double spacing = 2.0 * V / (M - 1);
    for (int i = 0; i < M / 2; ++i) {
        const double a = -V + i * spacing;
        q_atoms[i] = a;
        q_atoms[M - 1 - i] = -a;  // exactly symmetric atoms
    }
    for (int i = 0; i < M; ++i) {
        double c;
        if (i == 0 || i == M - 1)
            c = 1.0;
        else if (i % 3 == 0)
            c = 2.0;
        else
            c = 3.0;
        q_weights[i] = c / 10920.0;
    }
    double qsum = 0.0;
    for (double w : q_weights) qsum += w;
    for (double& w : q_weights) w /= qsum;

    return MomentMatchedPair{GridMeasure(std::move(p_atoms), std::move(p_weights)),
                             GridMeasure(std::move(q_atoms), std::move(q_weights))};
}

namespace {

double mixture_density(const GridMeasure& m, double x) {
    double s = 0.0;
    std::span<const double> atoms = m.atoms();
    std::span<const double> weights = m.weights();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double d = x - atoms[i];
        s += weights[i] * std::exp(-0.5 * d * d);
    }
    return s * 0.3989422804014327;  // 1/sqrt(2 pi)
}

}  // namespace

Chi2TvResult chi2_tv_bound(const GridMeasure& P, const GridMeasure& Q, int n, double V, int k) {
    if (k < 1) throw std::invalid_argument("chi2_tv_bound: k must be >= 1");
    if (n < 1) throw std::invalid_argument("chi2_tv_bound: n must be >= 1");
    if (!(V > 0.0)) throw std::invalid_argument("chi2_tv_bound: V must be positive");
    const double stol = 1e-9 * (1.0 + V);
    for (const GridMeasure* m : {&P, &Q})
        for (double a : m->atoms())
            if (std::fabs(a) > V + stol)
                throw std::invalid_argument("chi2_tv_bound: support leaves [-V, V]");
    for (int l = 1; l < k; ++l)
        if (std::fabs(raw_moment(P, l) - raw_moment(Q, l)) > 1e-8)
            throw std::invalid_argument("chi2_tv_bound: moments below order k do not match");

    // Beyond V+10 both mixtures sit under the normal tail at distance 10;
    // since Q keeps atoms at the support edges, the truncated part of
    // (p-q)^2/q is below 1e-17 and of |p-q| below 1e-22.
    const double lo = -V - 10.0, hi = V + 10.0;
    const double chi2 = integrate(
        [&](double x) {
            const double p = mixture_density(P, x);
            const double q = mixture_density(Q, x);
            const double d = p - q;
            return d * d / q;
        },
        lo, hi, 1e-10);
    const double tv = 0.5 * integrate(
                                [&](double x) {
                                    return std::fabs(mixture_density(P, x) -
                                                     mixture_density(Q, x));
                                },
                                lo, hi, 1e-10);

    double rhs = std::exp(2.5 * V * V);
    for (int i = 1; i <= k; ++i) rhs *= 2.0 * V * V / i;
    const double tensorized = std::expm1(n * std::log1p(rhs));
    return Chi2TvResult{chi2, tv * tv, rhs, tensorized};
}

}  // namespace uir
