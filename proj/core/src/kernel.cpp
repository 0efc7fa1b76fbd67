#include "fbmm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbmm/errors.hpp"
#include "fbmm/quadrature.hpp"

namespace fbmm {

namespace {

void require_hurst(double hurst) {
    if (!(hurst > 0.5 && hurst < 1.0)) {
        throw DomainError("Hurst index must lie in the open interval (0.5, 1), got " +
                          std::to_string(hurst));
    }
}

// Grading exponent that turns the s^{-2 alpha} endpoint behaviour of K^2 into
// a linear one: with s = t v^m the integrand carries v^{m (1 - 2 alpha) - 1}.
double grading_for(double alpha) { return 2.0 / (1.0 - 2.0 * alpha); }

// K(t, s) vanishes like (t - s)^alpha as s -> t; cubing the distance to that
// endpoint leaves at least a C^2 integrand.
constexpr double kDiagonalGrading = 3.0;

}  // namespace

KernelParams::KernelParams(double hurst, double quad_tol)
    : hurst_(hurst), alpha_(hurst - 0.5), c_alpha_(fbmm::c_alpha(hurst)), quad_tol_(quad_tol) {
    if (!(quad_tol > 0.0)) {
        throw DomainError("quadrature tolerance must be positive");
    }
}

double c_alpha(double hurst) {
    require_hurst(hurst);
    const double a = hurst - 0.5;
    const double ratio =
        (2.0 * a + 1.0) * std::tgamma(1.0 - a) / (std::tgamma(a + 1.0) * std::tgamma(1.0 - 2.0 * a));
    return a * std::sqrt(ratio);
}

double eval_K(const KernelParams& p, double t, double s) {
    if (s < 0.0 || t > 1.0 || s > t || std::isnan(s) || std::isnan(t)) {
        throw DomainError("eval_K requires 0 <= s <= t <= 1, got t=" + std::to_string(t) +
                          ", s=" + std::to_string(s));
    }
    if (s == t) {
        return 0.0;
    }
    if (s == 0.0) {
        throw DomainError("eval_K is undefined at s = 0 for t > 0");
    }
    const double a = p.alpha();
    const double inv_a = 1.0 / a;
    const double upper = std::pow(t - s, a);
    const double scale = p.c_alpha() * std::pow(s, -a) * inv_a;
    auto integrand = [s, a, inv_a](double w) { return std::pow(s + std::pow(w, inv_a), a); };
    return scale * quadrature::integrate(integrand, 0.0, upper, p.quad_tol() / scale);
}

double covariance_fbm(double hurst, double t, double u) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw DomainError("Hurst index must lie in (0, 1)");
    }
    if (!(t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0)) {
        throw DomainError("covariance_fbm requires t, u in [0, 1]");
    }
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(t, two_h) + std::pow(u, two_h) - std::pow(std::abs(t - u), two_h));
}

double kernel_cross_moment(const KernelParams& p, double t, double u, double abs_tol) {
    const double upper = std::min(t, u);
    if (upper <= 0.0) {
        return 0.0;
    }
    auto integrand = [&](double s) { return eval_K(p, t, s) * eval_K(p, u, s); };
    return quadrature::integrate_graded_both(integrand, 0.0, upper, grading_for(p.alpha()), kDiagonalGrading,
                                             abs_tol);
}

double increment_identity_residual(const KernelParams& p, double t, double abs_tol) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("increment_identity_residual requires t in [0, 1]");
    }
    const double m = grading_for(p.alpha());
    double lhs = 0.0;
    if (t > 0.0) {
        auto diff_sq = [&](double s) {
            const double d = eval_K(p, 1.0, s) - eval_K(p, t, s);
            return d * d;
        };
        lhs += quadrature::integrate_graded_both(diff_sq, 0.0, t, m, kDiagonalGrading, 0.5 * abs_tol);
    }
    if (t < 1.0) {
        auto tail_sq = [&](double s) {
            const double k = eval_K(p, 1.0, s);
            return k * k;
        };
        lhs += t > 0.0 ? quadrature::integrate_graded_right(tail_sq, t, 1.0, kDiagonalGrading, 0.5 * abs_tol)
                       : quadrature::integrate_graded_both(tail_sq, 0.0, 1.0, m, kDiagonalGrading, 0.5 * abs_tol);
    }
    return lhs - std::pow(1.0 - t, 2.0 * p.hurst());
}

}  // namespace fbmm
