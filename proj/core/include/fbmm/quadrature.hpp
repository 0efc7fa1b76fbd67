#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "fbmm/errors.hpp"

namespace fbmm::quadrature {

/// Positive half of the 20-point Gauss-Legendre rule on [-1, 1].
std::span<const double> gauss_nodes();
std::span<const double> gauss_weights();

inline constexpr int kDefaultMaxDepth = 48;
// Panels whose refinement changes the value by less than this relative amount
// are accepted even if abs_tol is finer; below it the comparison is roundoff.
inline constexpr double kRoundoffFloor = 1e-14;

/// Fixed-order Gauss-Legendre panel on [a, b].
template <class F>
double gauss_panel(F& f, double a, double b) {
    const auto nodes = gauss_nodes();
    const auto weights = gauss_weights();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double dx = half * nodes[i];
        sum += weights[i] * (f(center - dx) + f(center + dx));
    }
    return sum * half;
}

namespace detail {

template <class F>
double refine(F& f, double a, double b, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_panel(f, a, mid);
    const double right = gauss_panel(f, mid, b);
    const double refined = left + right;
    if (std::abs(refined - whole) <= std::max(tol, kRoundoffFloor * std::abs(refined))) {
        return refined;
    }
    if (depth <= 0 || !(mid > a && mid < b)) {
        throw QuadratureError("adaptive quadrature did not reach tolerance " +
                              std::to_string(tol) + " on [" + std::to_string(a) +
                              ", " + std::to_string(b) + "]");
    }
    return refine(f, a, mid, left, 0.5 * tol, depth - 1) +
           refine(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive bisection over 20-point Gauss panels. A panel is accepted when
/// its two halves agree with it to within the panel's share of abs_tol (or
/// to roundoff level). Throws QuadratureError when max_depth is exhausted.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol,
                 int max_depth = kDefaultMaxDepth) {
    if (a == b) {
        return 0.0;
    }
    if (b < a) {
        return -integrate(f, b, a, abs_tol, max_depth);
    }
    const double whole = gauss_panel(f, a, b);
    return detail::refine(f, a, b, whole, abs_tol, max_depth);
}

/// Integrates f over [a, b] after the substitution x = a + (b - a) v^grading,
/// which flattens an integrable power singularity at the left endpoint.
template <class F>
double integrate_graded(F&& f, double a, double b, double grading, double abs_tol,
                        int max_depth = kDefaultMaxDepth) {
    const double width = b - a;
    auto transformed = [&](double v) {
        if (v <= 0.0) {
            return 0.0;
        }
        const double vp = std::pow(v, grading - 1.0);
        return f(a + width * vp * v) * width * grading * vp;
    };
    return integrate(transformed, 0.0, 1.0, abs_tol, max_depth);
}

/// Mirror image of integrate_graded: flattens a power-type endpoint at b.
template <class F>
double integrate_graded_right(F&& f, double a, double b, double grading, double abs_tol,
                              int max_depth = kDefaultMaxDepth) {
    auto mirrored = [&](double y) { return f(b - y); };
    return integrate_graded(mirrored, 0.0, b - a, grading, abs_tol, max_depth);
}

/// Splits [a, b] at the midpoint and grades each half towards its outer
/// endpoint.
template <class F>
double integrate_graded_both(F&& f, double a, double b, double left_grading, double right_grading,
                             double abs_tol, int max_depth = kDefaultMaxDepth) {
    const double mid = 0.5 * (a + b);
    return integrate_graded(f, a, mid, left_grading, 0.5 * abs_tol, max_depth) +
           integrate_graded_right(f, mid, b, right_grading, 0.5 * abs_tol, max_depth);
}

}  // namespace fbmm::quadrature
