#include "uir/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "uir/measures.hpp"
#include "uir/moments.hpp"
#include "uir/noise.hpp"
#include "uir/quadrature.hpp"
#include "uir/rng.hpp"

namespace uir {

bool DiagnosticReport::all_pass() const {
    for (const DiagnosticCheck& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string DiagnosticReport::to_table() const {
    std::string out;
    char buf[160];
    for (const DiagnosticCheck& c : checks) {
        out += c.name + ".status " + (c.pass ? "pass" : "fail") + "\n";
        for (const auto& [key, value] : c.observed) {
            std::snprintf(buf, sizeof buf, "%s.%s %.6g\n", c.name.c_str(), key.c_str(), value);
            out += buf;
        }
    }
    out += std::string("overall.status ") + (all_pass() ? "pass" : "fail") + "\n";
    return out;
}

namespace {

// Random measure supported on at most 5 atoms of [-1, 1]; small supports
// keep the (2l)^l moment factors out of the cancellation zone.
GridMeasure random_measure(Rng& rng) {
    const int count = 2 + static_cast<int>(rng.below(4));
    std::vector<double> atoms;
    while (static_cast<int>(atoms.size()) < count) {
        const double a = rng.uniform(-1.0, 1.0);
        bool clear = true;
        for (double b : atoms)
            if (std::fabs(a - b) < 1e-6) clear = false;
        if (clear) atoms.push_back(a);
    }
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> weights(atoms.size());
    double sum = 0.0;
    for (double& w : weights) {
        w = 0.05 + rng.uniform();
        sum += w;
    }
    for (double& w : weights) w /= sum;
    return GridMeasure(std::move(atoms), std::move(weights));
}

double absolute_moment(NoiseFamily family, double param, int p) {
    switch (family) {
        case NoiseFamily::gaussian:
            // E|X|^p = sd^p 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
            return std::pow(param, p) * std::pow(2.0, 0.5 * p) *
                   std::tgamma(0.5 * (p + 1)) / std::sqrt(M_PI);
        case NoiseFamily::laplace:
            return std::tgamma(p + 1.0) * std::pow(param, p);
        case NoiseFamily::uniform:
            return std::pow(param, p) / (p + 1.0);
        case NoiseFamily::point_mass:
            return 0.0;
    }
    return 0.0;
}

DiagnosticCheck check_subexponential_moments() {
    DiagnosticCheck c{"subexponential_moments", true, {}};
    const NoiseModel models[] = {NoiseModel::gaussian(1.0), NoiseModel::laplace(0.7),
                                 NoiseModel::uniform(0.9)};
    double worst = 0.0;
    for (const NoiseModel& m : models) {
        for (int p = 1; p <= 8; ++p) {
            const double amoment = absolute_moment(m.family(), m.param(), p);
            const double ratio = std::pow(amoment, 1.0 / p) / (p * m.sigma());
            worst = std::max(worst, ratio);
        }
    }
    c.pass = worst <= 1.0;
    c.observed.emplace_back("max_ratio", worst);
    return c;
}

DiagnosticCheck check_w2_to_moments() {
    DiagnosticCheck c{"w2_to_moments", true, {}};
    Rng rng(20260822);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const GridMeasure a = random_measure(rng);
        const GridMeasure b = random_measure(rng);
        for (int l = 1; l <= 6; ++l) {
            const double lhs = std::pow(delta_l(a, b, l), l);
            const double rhs = w2_to_moments_rhs(a, b, l, 2.0);
            if (lhs > rhs * (1.0 + 1e-8)) c.pass = false;
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
    }
    c.observed.emplace_back("max_lhs_over_rhs", worst);
    return c;
}

DiagnosticCheck check_moments_deconvolution() {
    DiagnosticCheck c{"moments_deconvolution", true, {}};
    const NoiseModel noise = NoiseModel::gaussian(1.0);
    Rng rng(318008);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const GridMeasure a = random_measure(rng);
        const GridMeasure b = random_measure(rng);
        for (int l = 1; l <= 5; ++l) {
            const double lhs = std::pow(delta_l(a, b, l), l);
            const double rhs = deconv_moment_rhs(a, b, noise, l);
            if (lhs > rhs * (1.0 + 1e-8)) c.pass = false;
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
        }
    }
    c.observed.emplace_back("max_lhs_over_rhs", worst);
    return c;
}

DiagnosticCheck check_sinc_normalization() {
    DiagnosticCheck c{"sinc_normalization", true, {}};
    double worst_gap = 0.0, worst_cm = 0.0;
    for (int m = 1; m <= 6; ++m) {
        const double cm = sinc_normalizer(m);
        worst_cm = std::max(worst_cm, cm);
        // Independent of the normalizer's own window: integrate the density
        // itself over a shorter range and add the averaged-tail estimate.
        const double scale = 4.0 * 2.718281828459045 * m;
        const double U = 500.0;
        const double body =
            integrate([m](double t) { return sinc_density(m, t); }, 0.0, scale * U, 1e-11);
        double mean = 1.0;
        for (int i = 1; i <= m; ++i) mean *= (m + i) / (4.0 * i);
        double tail = mean * std::pow(U, 1.0 - 2.0 * m) / (2.0 * m - 1.0);
        if (m == 1)
            tail = 1.0 / (2.0 * U) + std::sin(2.0 * U) / (4.0 * U * U) -
                   std::cos(2.0 * U) / (4.0 * U * U * U);
        const double total = 2.0 * (body + cm * scale * tail);
        worst_gap = std::max(worst_gap, std::fabs(total - 1.0));
    }
    c.pass = worst_gap <= 1e-8 && worst_cm <= 1.0;
    c.observed.emplace_back("max_integral_gap", worst_gap);
    c.observed.emplace_back("max_cm", worst_cm);
    return c;
}

const double kTGrid[] = {0.0, 0.7, -0.7, 3.0, -3.0, 11.0, -11.0, 29.0, -29.0, 50.0, -50.0};

DiagnosticCheck check_kernel_derivative_bound() {
    DiagnosticCheck c{"kernel_derivative_bound", true, {}};
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m)
        for (int n = 0; n <= 5; ++n)
            for (double t : kTGrid) {
                const DerivativeCheck d = sinc_derivative_check(m, n, t);
                if (!d.ok) c.pass = false;
                if (d.bound > 0.0) worst = std::max(worst, std::fabs(d.estimate) / d.bound);
            }
    c.observed.emplace_back("max_estimate_over_bound", worst);
    return c;
}

DiagnosticCheck check_sinc_base_bound() {
    DiagnosticCheck c{"sinc_base_bound", true, {}};
    double worst = 0.0;
    for (int n = 0; n <= 4; ++n)
        for (double t : kTGrid) {
            const DerivativeCheck d = sinc_base_derivative_check(n, t);
            if (!d.ok) c.pass = false;
            worst = std::max(worst, std::fabs(d.estimate) / d.bound);
        }
    c.observed.emplace_back("max_estimate_over_bound", worst);
    return c;
}

GridMeasure perturb_top_atom(const GridMeasure& m, double offset) {
    if (offset == 0.0) return m;
    std::vector<double> atoms(m.atoms().begin(), m.atoms().end());
    atoms.back() += offset;
    return GridMeasure(std::move(atoms),
                       std::vector<double>(m.weights().begin(), m.weights().end()));
}

DiagnosticCheck check_quadrature_pair_moments(double perturbation) {
    DiagnosticCheck c{"quadrature_pair_moments", true, {}};
    double worst = 0.0;
    for (int k = 1; k <= 8; ++k) {
        MomentMatchedPair pair = moment_matched_pair(k, 1.0);
        const GridMeasure P = perturb_top_atom(pair.P, perturbation);
        for (int l = 1; l <= 2 * k - 1; ++l)
            worst = std::max(worst, std::fabs(raw_moment(P, l) - raw_moment(pair.Q, l)));
    }
    c.pass = worst <= 1e-8;
    c.observed.emplace_back("max_moment_gap", worst);
    return c;
}

DiagnosticCheck check_prior_separation() {
    DiagnosticCheck c{"prior_separation", true, {}};
    double lo = 1e300, hi = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const MomentMatchedPair pair = moment_matched_pair(k, 1.0);
        const double r = wasserstein_p(pair.P, pair.Q, 1.0) * k;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    c.pass = lo >= 0.05 && hi <= 4.0;
    c.observed.emplace_back("min_w1_times_k", lo);
    c.observed.emplace_back("max_w1_times_k", hi);
    return c;
}

DiagnosticCheck check_chi_square() {
    DiagnosticCheck c{"chi_square_smoothing", true, {}};
    const struct {
        int k;
        double V;
    } cases[] = {{2, 0.5}, {3, 1.0}, {4, 1.0}};
    double worst = 0.0;
    for (const auto& cs : cases) {
        const MomentMatchedPair pair = moment_matched_pair(cs.k, cs.V);
        const Chi2TvResult r = chi2_tv_bound(pair.P, pair.Q, 50, cs.V, cs.k);
        if (r.chi_square > r.rhs || r.tv_squared > r.rhs) c.pass = false;
        if (r.rhs > 0.0) worst = std::max(worst, r.chi_square / r.rhs);
    }
    c.observed.emplace_back("max_chi2_over_rhs", worst);
    return c;
}

DiagnosticCheck check_surrogate_ratio() {
    DiagnosticCheck c{"wasserstein_surrogate_ratio", true, {}};
    Rng rng(771245);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        const GridMeasure a = random_measure(rng);
        const GridMeasure b = random_measure(rng);
        for (double p : {1.0, 2.0, 3.0}) {
            const double surrogate = wasserstein_moment_surrogate(a, b, p, 8);
            if (surrogate < 1e-12) continue;
            worst = std::max(worst, wasserstein_p(a, b, p) / surrogate);
        }
    }
    c.pass = worst <= 10.0;
    c.observed.emplace_back("max_wp_over_surrogate", worst);
    return c;
}

}  // namespace

DiagnosticReport diagnose(const DiagnosticOptions& opts) {
    DiagnosticReport report;
    report.checks.push_back(check_subexponential_moments());
    report.checks.push_back(check_w2_to_moments());
    report.checks.push_back(check_moments_deconvolution());
    report.checks.push_back(check_sinc_normalization());
    report.checks.push_back(check_kernel_derivative_bound());
    report.checks.push_back(check_sinc_base_bound());
    report.checks.push_back(check_quadrature_pair_moments(opts.moment_perturbation));
    report.checks.push_back(check_prior_separation());
    report.checks.push_back(check_chi_square());
    report.checks.push_back(check_surrogate_ratio());
    return report;
}

}  // namespace uir
