#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uir/measures.hpp"

namespace uir {

// Strictly increasing design locations in [0, 1].
class DesignPoints {
public:
    explicit DesignPoints(std::vector<double> x);

    // i/n for i = 1..n
    static DesignPoints equispaced(std::size_t n);

    std::span<const double> x() const { return x_; }
    std::size_t size() const { return x_.size(); }

private:
    std::vector<double> x_;
};

// Nondecreasing function sampled at design points, with |value| <= bound.
class IsotonicFn {
public:
    IsotonicFn(DesignPoints design, std::vector<double> values, double bound);

    const DesignPoints& design() const { return design_; }
    std::span<const double> values() const { return values_; }
    double bound() const { return bound_; }
    std::size_t size() const { return values_.size(); }

private:
    DesignPoints design_;
    std::vector<double> values_;
    double bound_;
};

// Empirical measure of the function's values (the measure the function
// pushes the uniform design law onto).
EmpiricalMeasure pushforward(const IsotonicFn& f);

// ((1/n) sum |f_i - g_i|^p)^(1/p); f and g must share the same design.
double empirical_lp(const IsotonicFn& f, const IsotonicFn& g, double p);

// Least-squares isotonic regression of y on x via pool-adjacent-violators
// (unit weights). If a bound is supplied the fit is clipped to [-V, V],
// which is the constrained optimum; otherwise the stored bound is the
// smallest one containing the fit.
IsotonicFn pava(const DesignPoints& x, std::span<const double> y,
                std::optional<double> bound = std::nullopt);

// Ignores any pairing and assigns the sorted y values to the design order.
IsotonicFn naive_sorted(const DesignPoints& x, std::vector<double> y);

// g(x_i) = Q_mu(i/n): the monotone function whose pushforward best matches
// mu on this design. Support of mu must lie in [-V, V].
IsotonicFn round_to_isotonic(const GridMeasure& mu, const DesignPoints& design, double V);

}  // namespace uir
