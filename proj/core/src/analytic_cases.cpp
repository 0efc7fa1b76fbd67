#include "fbmm/analytic_cases.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbmm/errors.hpp"

namespace fbmm {

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
    if (knots_.size() < 2) {
        throw DomainError("piecewise-linear function needs at least two knots");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].first > knots_[i - 1].first)) {
            throw DomainError("piecewise-linear knots must be strictly increasing");
        }
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (!(x >= knots_.front().first && x <= knots_.back().first)) {
        throw RangeError("argument " + std::to_string(x) + " outside the knot range");
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const auto& knot) { return v < knot.first; });
    if (it == knots_.end()) {
        return knots_.back().second;
    }
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

ProductKernel::ProductKernel()
    : g_({{0.0, 0.0}, {1.0 / 3.0, 0.0}, {0.5, 1.0}, {5.0 / 6.0, -1.0}, {1.0, 0.0}}),
      h_({{0.0, 0.0}, {0.25, 1.0}, {0.5, 0.0}, {1.0, 0.0}}) {}

double ProductKernel::operator()(double t, double s) const { return g_(t) * h_(s); }

double product_kernel_eval(double t, double s) {
    static const ProductKernel kernel;
    return kernel(t, s);
}

KernelMatrix discretize_kernel(const KernelFunction& kernel, Index n) {
    if (n < 1) {
        throw SizeError("discretization needs N >= 1");
    }
    const double dn = static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(dn);
    Matrix k = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) / dn;
        for (Index j = 0; j <= i; ++j) {
            k(i, j) = kernel(t, (static_cast<double>(j) + 0.5) / dn) * scale;
        }
    }
    return KernelMatrix(std::move(k));
}

Vector to_function_samples(const Vector& a_discrete) {
    return a_discrete * std::sqrt(static_cast<double>(a_discrete.size()));
}

bool minimizer_set_check(std::span<const double> a_samples) {
    const auto n = static_cast<Index>(a_samples.size());
    if (n == 0) {
        return false;
    }
    const double dn = static_cast<double>(n);
    const double tol = 10.0 / dn;
    constexpr double kSplit = 5.0 / 6.0;

    double head = 0.0;
    double tail = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double mid = (static_cast<double>(j) + 0.5) / dn;
        const double a = a_samples[static_cast<std::size_t>(j)];
        if (!std::isfinite(a)) {
            return false;
        }
        const double mass = a * a / dn;
        if (mid <= kSplit) {
            head += mass;
        } else {
            tail += mass;
        }
        // Grid time (j + 1)/N closes the cell just added.
        const double t = static_cast<double>(j + 1) / dn;
        if (t >= kSplit && tail > 1.0 / 6.0 - 6.0 * (1.0 - t) * (1.0 - t) + tol) {
            return false;
        }
    }
    return head <= tol;
}

}  // namespace fbmm
