#include "uir/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "uir/special.hpp"

namespace uir {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// E e^{|X|/t} for X ~ N(0, sd^2) has the closed form 2 e^{sd^2/(2t^2)} Phi(sd/t).
double gaussian_exp_abs_moment(double sd, double t) {
    double r = sd / t;
    return 2.0 * std::exp(0.5 * r * r) * normal_cdf(r);
}

double gaussian_psi1_norm(double sd) {
    // E e^{|X|/t} is decreasing in t; bisect on E e^{|X|/t} = 2.
    double lo = 0.5 * sd, hi = 4.0 * sd;
    while (gaussian_exp_abs_moment(sd, lo) < 2.0) lo *= 0.5;
    while (gaussian_exp_abs_moment(sd, hi) > 2.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (gaussian_exp_abs_moment(sd, mid) > 2.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double double_factorial(int k) {  // k!! with (-1)!! = 1
    double r = 1.0;
    for (int v = k; v > 1; v -= 2) r *= v;
    return r;
}

double factorial(int k) {
    double r = 1.0;
    for (int v = 2; v <= k; ++v) r *= v;
    return r;
}

}  // namespace

NoiseModel NoiseModel::gaussian(double sd) {
    require(sd > 0.0, "NoiseModel::gaussian: sd must be positive");
    return NoiseModel(NoiseFamily::gaussian, sd, gaussian_psi1_norm(sd));
}

NoiseModel NoiseModel::laplace(double scale) {
    require(scale > 0.0, "NoiseModel::laplace: scale must be positive");
    return NoiseModel(NoiseFamily::laplace, scale, 2.0 * scale);
}

NoiseModel NoiseModel::uniform(double half_width) {
    require(half_width > 0.0, "NoiseModel::uniform: half-width must be positive");
    return NoiseModel(NoiseFamily::uniform, half_width, 2.0 * half_width);
}

NoiseModel NoiseModel::point_mass() {
    return NoiseModel(NoiseFamily::point_mass, 0.0, 0.0);
}

NoiseModel make_noise(NoiseFamily family, double param) {
    switch (family) {
        case NoiseFamily::gaussian: return NoiseModel::gaussian(param);
        case NoiseFamily::laplace: return NoiseModel::laplace(param);
        case NoiseFamily::uniform: return NoiseModel::uniform(param);
        case NoiseFamily::point_mass: return NoiseModel::point_mass();
    }
    throw std::invalid_argument("make_noise: unknown family");
}

double NoiseModel::cdf(double t) const {
    switch (family_) {
        case NoiseFamily::gaussian:
            return normal_cdf(t / param_);
        case NoiseFamily::laplace:
            return t < 0.0 ? 0.5 * std::exp(t / param_) : 1.0 - 0.5 * std::exp(-t / param_);
        case NoiseFamily::uniform: {
            if (t <= -param_) return 0.0;
            if (t >= param_) return 1.0;
            return (t + param_) / (2.0 * param_);
        }
        case NoiseFamily::point_mass:
            return t > 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

double NoiseModel::density(double t) const {
    switch (family_) {
        case NoiseFamily::gaussian:
            return normal_pdf(t / param_) / param_;
        case NoiseFamily::laplace:
            return 0.5 * std::exp(-std::fabs(t) / param_) / param_;
        case NoiseFamily::uniform:
            return (t >= -param_ && t <= param_) ? 0.5 / param_ : 0.0;
        case NoiseFamily::point_mass:
            return 0.0;
    }
    return 0.0;
}

double NoiseModel::quantile(double u) const {
    require(u >= 0.0 && u <= 1.0, "NoiseModel::quantile: u outside [0,1]");
    switch (family_) {
        case NoiseFamily::gaussian:
            if (u == 0.0) return -kInf;
            if (u == 1.0) return kInf;
            return param_ * normal_quantile(u);
        case NoiseFamily::laplace:
            if (u == 0.0) return -kInf;
            if (u == 1.0) return kInf;
            return u < 0.5 ? param_ * std::log(2.0 * u) : -param_ * std::log(2.0 * (1.0 - u));
        case NoiseFamily::uniform:
            return param_ * (2.0 * u - 1.0);
        case NoiseFamily::point_mass:
            return 0.0;
    }
    return 0.0;
}

double NoiseModel::sample(Rng& rng) const {
    if (family_ == NoiseFamily::point_mass) return 0.0;
    return quantile(rng.uniform_open());
}

double NoiseModel::raw_moment(int k) const {
    require(k >= 0, "NoiseModel::raw_moment: negative order");
    if (k == 0) return 1.0;
    if (k % 2 == 1) return 0.0;  // all four families are symmetric
    switch (family_) {
        case NoiseFamily::gaussian:
            return std::pow(param_, k) * double_factorial(k - 1);
        case NoiseFamily::laplace:
            return factorial(k) * std::pow(param_, k);
        case NoiseFamily::uniform:
            return std::pow(param_, k) / (k + 1.0);
        case NoiseFamily::point_mass:
            return 0.0;
    }
    return 0.0;
}

double NoiseModel::partial_moment(int k, double x) const {
    switch (family_) {
        case NoiseFamily::gaussian: {
            const double s = param_;
            if (x == -kInf) return 0.0;
            if (x == kInf) return raw_moment(k);
            const double z = x / s;
            switch (k) {
                case 0: return normal_cdf(z);
                case 1: return -s * normal_pdf(z);
                case 2: return s * s * (normal_cdf(z) - z * normal_pdf(z));
            }
            break;
        }
        case NoiseFamily::laplace: {
            const double b = param_;
            // G_k(y) = int_0^y t^k e^{-t/b}/(2b) dt for y >= 0
            auto G = [&](int kk, double y) -> double {
                if (y == kInf) {
                    switch (kk) {
                        case 0: return 0.5;
                        case 1: return 0.5 * b;
                        case 2: return b * b;
                    }
                }
                double e = std::exp(-y / b);
                switch (kk) {
                    case 0: return 0.5 * (1.0 - e);
                    case 1: return 0.5 * (b - (y + b) * e);
                    case 2: return 0.5 * (2.0 * b * b - (y * y + 2.0 * b * y + 2.0 * b * b) * e);
                }
                return 0.0;
            };
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            if (x <= 0.0) {
                return sign * (G(k, kInf) - G(k, -x));
            }
            return sign * G(k, kInf) + G(k, x);
        }
        case NoiseFamily::uniform: {
            const double a = param_;
            double t = std::clamp(x, -a, a);
            double lo = -a;
            return (std::pow(t, k + 1) - std::pow(lo, k + 1)) / (2.0 * a * (k + 1.0));
        }
        case NoiseFamily::point_mass:
            return (x >= 0.0) ? (k == 0 ? 1.0 : 0.0) : 0.0;
    }
    throw std::invalid_argument("NoiseModel::partial_moment: order must be <= 2");
}

double NoiseModel::w2_squared_to_empirical(const EmpiricalMeasure& e) const {
    const auto y = e.atoms();
    const std::size_t n = y.size();
    if (family_ == NoiseFamily::point_mass) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return s / static_cast<double>(n);
    }
    double total = 0.0;
    double q_prev = -kInf;
    for (std::size_t i = 1; i <= n; ++i) {
        double u = static_cast<double>(i) / static_cast<double>(n);
        double q = (i == n) ? kInf : quantile(u);
        double m0 = partial_moment(0, q) - partial_moment(0, q_prev);
        double m1 = partial_moment(1, q) - partial_moment(1, q_prev);
        double m2 = partial_moment(2, q) - partial_moment(2, q_prev);
        double yi = y[i - 1];
        total += m2 - 2.0 * yi * m1 + yi * yi * m0;
        q_prev = q;
    }
    return std::max(total, 0.0);
}

std::vector<double> cell_probabilities(const NoiseModel& noise, double a, const Grid& grid) {
    require(grid.N >= 1 && grid.spacing > 0.0, "cell_probabilities: bad grid");
    std::vector<double> w(grid.size(), 0.0);
    w[0] = noise.cdf(grid.atom(1) - a);
    double f_prev = w[0];
    for (int k = 1; k <= grid.N - 1; ++k) {
        double f_next = noise.cdf(grid.atom(k + 1) - a);
        w[k] = std::max(0.0, f_next - f_prev);
        f_prev = f_next;
    }
    w[grid.N] = std::max(0.0, 1.0 - f_prev);
    return w;
}

int Grid::floor_cell(double x) const {
    if (x < alpha0) return 0;
    int k = static_cast<int>(std::floor((x - alpha0) / spacing));
    return std::clamp(k, 0, N);
}

GridMeasure convolve_pushforward(const GridMeasure& mu, const NoiseModel& noise,
                                 const Grid& grid) {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double a = mu.atoms()[j];
        double rel = (a - grid.alpha0) / grid.spacing;
        long k = std::lround(rel);
        require(k >= 0 && k <= grid.N &&
                    std::fabs(a - grid.atom(static_cast<int>(k))) <=
                        1e-9 * (1.0 + std::fabs(a) + grid.spacing),
                "convolve_pushforward: atom off grid");
        double wj = mu.weights()[j];
        if (wj == 0.0) continue;
        std::vector<double> cells = cell_probabilities(noise, a, grid);
        for (int t = 0; t < grid.size(); ++t) out[t] += wj * cells[t];
    }
    std::vector<double> atoms(grid.size());
    for (int k = 0; k < grid.size(); ++k) atoms[k] = grid.atom(k);
    return GridMeasure(std::move(atoms), std::move(out));
}

}  // namespace uir
