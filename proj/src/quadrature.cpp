#include "uir/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace uir {

namespace {

// (G7, K15) pair, positive half of the abscissae. Gauss points sit at the
// odd Kronrod indices.
const double kron_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

const double kron_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

const double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double k15;
    double err;
};

PanelResult panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kron_x[i]);
        fv[14 - i] = f(c + h * kron_x[i]);
    }
    fv[7] = f(c);
    double k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 7; ++i) {
        k15 += kron_w[i] * (fv[i] + fv[14 - i]);
    }
    k15 += kron_w[7] * fv[7];
    for (int i = 0; i < 3; ++i) {
        g7 += gauss_w[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    }
    g7 += gauss_w[3] * fv[7];
    k15 *= h;
    g7 *= h;
    return {k15, std::fabs(k15 - g7)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth, int max_depth) {
    PanelResult r = panel(f, a, b);
    if (r.err <= tol || b - a < 1e-14 * (std::fabs(a) + std::fabs(b) + 1.0)) {
        return r.k15;
    }
    if (depth >= max_depth) {
        throw std::runtime_error("integrate: adaptive bisection depth exhausted");
    }
    double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

// P_k(x) and its derivative via the three-term recurrence.
void legendre(int k, double x, double* pk, double* dpk) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    double v = (k == 0) ? 1.0 : p1;
    double vm1 = (k == 1) ? 1.0 : p0;
    *pk = v;
    *dpk = (x * x == 1.0) ? 0.0 : k * (vm1 - x * v) / (1.0 - x * x);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
    if (a == b) return 0.0;
    return adapt(f, a, b, abs_tol, 0, max_depth);
}

GaussLegendreRule gauss_legendre(int k) {
    if (k < 1 || k > 64) throw std::invalid_argument("gauss_legendre: k outside [1,64]");
    GaussLegendreRule rule;
    rule.nodes.resize(k);
    rule.weights.resize(k);
    // Solve for roots in the upper half and mirror them, so the stored rule
    // is exactly symmetric in floating point.
    const int half = (k + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (k + 0.5));
        double pk = 0.0, dpk = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre(k, x, &pk, &dpk);
            double dx = pk / dpk;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        legendre(k, x, &pk, &dpk);
        double w = 2.0 / ((1.0 - x * x) * dpk * dpk);
        rule.nodes[k - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[k - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (k % 2 == 1) rule.nodes[half - 1] = 0.0;
    return rule;
}

}  // namespace uir
