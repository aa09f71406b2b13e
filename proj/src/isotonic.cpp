#include "uir/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uir {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double t : v) m = std::max(m, std::fabs(t));
    return m;
}

}  // namespace

DesignPoints::DesignPoints(std::vector<double> x) : x_(std::move(x)) {
    require(!x_.empty(), "DesignPoints: empty");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        require(std::isfinite(x_[i]) && x_[i] >= 0.0 && x_[i] <= 1.0,
                "DesignPoints: location outside [0,1]");
        if (i > 0) require(x_[i] > x_[i - 1], "DesignPoints: not strictly increasing");
    }
}

DesignPoints DesignPoints::equispaced(std::size_t n) {
    require(n > 0, "DesignPoints: n must be positive");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i + 1) / static_cast<double>(n);
    }
    return DesignPoints(std::move(x));
}

IsotonicFn::IsotonicFn(DesignPoints design, std::vector<double> values, double bound)
    : design_(std::move(design)), values_(std::move(values)), bound_(bound) {
    require(design_.size() == values_.size(), "IsotonicFn: design/value size mismatch");
    require(bound_ > 0.0 && std::isfinite(bound_), "IsotonicFn: bound must be positive");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        require(std::fabs(values_[i]) <= bound_ * (1.0 + 1e-12) + 1e-300,
                "IsotonicFn: value exceeds bound");
        if (i > 0) require(values_[i] >= values_[i - 1], "IsotonicFn: values decrease");
    }
}

EmpiricalMeasure pushforward(const IsotonicFn& f) {
    return EmpiricalMeasure(std::vector<double>(f.values().begin(), f.values().end()));
}

double empirical_lp(const IsotonicFn& f, const IsotonicFn& g, double p) {
    require(p >= 1.0, "empirical_lp: p must be >= 1");
    require(f.size() == g.size(), "empirical_lp: designs differ");
    auto fx = f.design().x();
    auto gx = g.design().x();
    for (std::size_t i = 0; i < fx.size(); ++i) {
        require(fx[i] == gx[i], "empirical_lp: designs differ");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        total += std::pow(std::fabs(f.values()[i] - g.values()[i]), p);
    }
    total /= static_cast<double>(f.size());
    return std::pow(total, 1.0 / p);
}

IsotonicFn pava(const DesignPoints& x, std::span<const double> y,
                std::optional<double> bound) {
    require(x.size() == y.size(), "pava: design/response size mismatch");
    const std::size_t n = y.size();
    // Stack of blocks (mean, count); merge while the tail violates order.
    std::vector<double> mean;
    std::vector<std::size_t> count;
    mean.reserve(n);
    count.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = y[i];
        std::size_t c = 1;
        while (!mean.empty() && mean.back() >= m) {
            m = (mean.back() * static_cast<double>(count.back()) +
                 m * static_cast<double>(c)) /
                static_cast<double>(count.back() + c);
            c += count.back();
            mean.pop_back();
            count.pop_back();
        }
        mean.push_back(m);
        count.push_back(c);
    }
    std::vector<double> fit;
    fit.reserve(n);
    for (std::size_t b = 0; b < mean.size(); ++b) {
        fit.insert(fit.end(), count[b], mean[b]);
    }
    double V;
    if (bound) {
        V = *bound;
        require(V > 0.0, "pava: bound must be positive");
        for (double& v : fit) v = std::clamp(v, -V, V);
    } else {
        V = max_abs(fit);
        if (V == 0.0) V = 1.0;
    }
    return IsotonicFn(x, std::move(fit), V);
}

IsotonicFn naive_sorted(const DesignPoints& x, std::vector<double> y) {
    require(x.size() == y.size(), "naive_sorted: design/response size mismatch");
    std::sort(y.begin(), y.end());
    double V = max_abs(y);
    if (V == 0.0) V = 1.0;
    return IsotonicFn(x, std::move(y), V);
}

IsotonicFn round_to_isotonic(const GridMeasure& mu, const DesignPoints& design, double V) {
    require(V > 0.0, "round_to_isotonic: bound must be positive");
    // same slack the grid feasibility test uses, so atoms sitting a rounding
    // error past the bound are clamped instead of rejected
    const double slack = 1e-9 * (1.0 + V);
    for (std::size_t k = 0; k < mu.size(); ++k) {
        if (mu.weights()[k] > 0.0) {
            require(std::fabs(mu.atoms()[k]) <= V + slack,
                    "round_to_isotonic: mu charges an atom outside [-V,V]");
        }
    }
    const std::size_t n = design.size();
    std::vector<double> values(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double q = quantile(mu, static_cast<double>(i) / static_cast<double>(n));
        values[i - 1] = std::clamp(q, -V, V);
    }
    return IsotonicFn(design, std::move(values), V);
}

}  // namespace uir
