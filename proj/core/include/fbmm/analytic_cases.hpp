#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fbmm/discrete_model.hpp"

namespace fbmm {

/// Continuous piecewise-linear function through sorted breakpoints (x, y).
class PiecewiseLinear {
public:
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

    /// Throws RangeError outside [first x, last x].
    double operator()(double x) const;

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
};

/// K(t, s) = g(t) h(s) with g vanishing on [0, 1/3], g(1/2) = 1, g(5/6) = -1,
/// g(1) = 0 and h a tent of height 1 on [0, 1/2]. Then int_0^t h^2 = 1/6 for
/// t >= 1/2 and min F = 1/6, attained by a whole family of a.
class ProductKernel {
public:
    ProductKernel();

    const PiecewiseLinear& g() const { return g_; }
    const PiecewiseLinear& h() const { return h_; }

    /// Throws RangeError unless t, s in [0, 1].
    double operator()(double t, double s) const;

private:
    PiecewiseLinear g_;
    PiecewiseLinear h_;
};

double product_kernel_eval(double t, double s);

using KernelFunction = std::function<double(double t, double s)>;

/// k_ij = K((i + 1)/N, (j + 1/2)/N) / sqrt(N) for j <= i (0-based). The midpoint
/// rule is folded into the scaling, so sum_{s <= t} (k_ts - a_s)^2 approximates
/// int_0^t (K(t, s) - a(s))^2 ds when a_s = a((s + 1/2)/N) / sqrt(N).
KernelMatrix discretize_kernel(const KernelFunction& kernel, Index n);

/// Converts a discrete solution of a discretized kernel back to the values
/// a(s) at the midpoints (s + 1/2)/N.
Vector to_function_samples(const Vector& a_discrete);

/// Membership in the minimizer set of the product kernel, for a sampled at the
/// midpoints (j + 1/2)/N:
///   int_0^{5/6} a^2 <= tol  and  int_{5/6}^t a^2 <= 1/6 - 6 (1 - t)^2 + tol
/// on every grid time t >= 5/6, with tol = 10/N and midpoint-rule integrals.
bool minimizer_set_check(std::span<const double> a_samples);

inline bool minimizer_set_check(const Vector& a_samples) {
    return minimizer_set_check(std::span<const double>(a_samples.data(), static_cast<std::size_t>(a_samples.size())));
}

}  // namespace fbmm
