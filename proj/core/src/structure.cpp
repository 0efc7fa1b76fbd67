#include "fbmm/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbmm/errors.hpp"

namespace fbmm {

namespace {

constexpr double kBisectionTol = 1e-8;

// Accepts a_s that overshoot an endpoint by roundoff only.
bool within(double value, double lo, double hi) {
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return value >= lo - slack && value <= hi + slack;
}

std::pair<double, Index> lower_bound_and_index(const KernelMatrix& k) {
    const Index n = k.size();
    const Matrix& km = k.matrix();
    double best = 0.0;
    Index arg = n - 1;
    for (Index t = 0; t < n; ++t) {
        double sum = 0.0;
        for (Index s = 0; s <= t; ++s) {
            const double d = km(n - 1, s) - km(t, s);
            sum += d * d;
        }
        if (sum > best) {
            best = sum;
            arg = t;
        }
    }
    return {0.25 * best, arg};
}

}  // namespace

double discrete_lower_bound(const KernelMatrix& k) { return lower_bound_and_index(k).first; }

Index discrete_lower_bound_index(const KernelMatrix& k) { return lower_bound_and_index(k).second; }

double implied_time(const KernelParams& p, double s, double a_s) {
    if (!(s > 0.0 && s <= 1.0)) {
        throw DomainError("implied_time requires s in (0, 1]");
    }
    const double top = eval_K(p, 1.0, s);
    if (!within(a_s, 0.0, top)) {
        throw RangeError("a_s = " + std::to_string(a_s) + " outside [0, K(1, s)] = [0, " +
                         std::to_string(top) + "]");
    }
    if (a_s >= top) {
        return 1.0;
    }
    if (a_s <= 0.0) {
        return s;
    }
    // Bisect in u = (phi - s)^alpha: K(s + u^{1/alpha}, s) is close to linear
    // in u, whereas in phi it has an infinite slope at phi = s.
    const double inv_alpha = 1.0 / p.alpha();
    auto time_of = [&](double u) { return std::min(1.0, s + std::pow(u, inv_alpha)); };
    double lo = 0.0;
    double hi = std::pow(1.0 - s, p.alpha());
    while (time_of(hi) - time_of(lo) > kBisectionTol || hi - lo > kBisectionTol * kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        (eval_K(p, time_of(mid), s) < a_s ? lo : hi) = mid;
    }
    return time_of(0.5 * (lo + hi));
}

double implied_time(const KernelMatrix& k, Index s, double a_s) {
    const Index n = k.size();
    if (s < 0 || s >= n) {
        throw DomainError("implied_time index out of range");
    }
    const Matrix& km = k.matrix();
    const double bottom = km(s, s);
    const double top = km(n - 1, s);
    if (!within(a_s, bottom, top)) {
        throw RangeError("a_s = " + std::to_string(a_s) + " outside [k_ss, k_Ns] = [" +
                         std::to_string(bottom) + ", " + std::to_string(top) + "]");
    }
    const double dn = static_cast<double>(n);
    const double first = static_cast<double>(s + 1) / dn;
    if (a_s >= top) {
        return 1.0;
    }
    if (a_s <= bottom) {
        return first;
    }
    auto row_value = [&](double time) {
        const double pos = time * dn - 1.0;
        const Index left = std::clamp(static_cast<Index>(std::floor(pos)), s, n - 1);
        if (left >= n - 1) {
            return top;
        }
        const double frac = pos - static_cast<double>(left);
        return km(left, s) + frac * (km(left + 1, s) - km(left, s));
    };
    double lo = first;
    double hi = 1.0;
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        (row_value(mid) < a_s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

StructureReport analyze(const KernelMatrix& k, const SolveResult& r, double support_threshold) {
    if (!r.converged()) {
        throw UnconvergedInputError("structure analysis needs a converged solve (gap " +
                                    std::to_string(r.gap) + ")");
    }
    const Index n = k.size();
    if (r.a.size() != n || r.lambda.size() != n) {
        throw SizeError("solve result does not match the kernel size");
    }
    const Matrix& km = k.matrix();
    const Vector& lambda = r.lambda.values();
    const Index last = n - 1;

    StructureReport report;
    report.support_threshold = support_threshold;
    for (Index t = 0; t < n; ++t) {
        if (lambda(t) > support_threshold) {
            report.xi_support.push_back(t);
        }
    }
    for (double level : {1e-3, 1e-4, 1e-5, 1e-6}) {
        report.support_size_by_threshold.push_back((lambda.array() > level).count());
    }
    report.atom_at_end = lambda(last);
    for (Index t : report.xi_support) {
        if (t < last) {
            report.t_star = t;
        }
    }

    const Index tail_begin = report.t_star ? *report.t_star + 1 : 0;
    for (Index s = tail_begin; s < n; ++s) {
        report.tail_residual = std::max(report.tail_residual, std::abs(r.a(s) - km(last, s)));
    }

    const Vector h = h_profile(k, r.a);
    const double f = h.maxCoeff();
    report.endpoint_gap = f - h(last);
    std::tie(report.lower_bound, report.lower_bound_index) = lower_bound_and_index(k);

    report.implied_time.resize(n);
    for (Index s = 0; s < n; ++s) {
        try {
            report.implied_time(s) = implied_time(k, s, r.a(s));
        } catch (const RangeError& e) {
            throw InvariantViolation("implied time undefined at index " + std::to_string(s) +
                                     ": " + e.what());
        }
    }

    bool first = true;
    double lo = 0.0;
    double hi = 0.0;
    for (Index t : report.xi_support) {
        if (t == last) {
            continue;
        }
        lo = first ? r.a(t) : std::min(lo, r.a(t));
        hi = first ? r.a(t) : std::max(hi, r.a(t));
        first = false;
    }
    report.plateau_spread = hi - lo;
    for (Index s = 0; s + 1 < n; ++s) {
        if (r.a(s + 1) > r.a(s)) {
            ++report.monotonicity_violations;
        }
    }

    const double tol = 10.0 * r.gap_tol;
    if (report.lower_bound > f + 1e-12) {
        throw InvariantViolation("lower bound " + std::to_string(report.lower_bound) +
                                 " exceeds F(a) = " + std::to_string(f));
    }
    if (report.endpoint_gap > tol) {
        throw InvariantViolation("terminal constraint is not active: F(a) - h_N(a) = " +
                                 std::to_string(report.endpoint_gap));
    }
    const double dn = static_cast<double>(n);
    for (Index s = 0; s < n; ++s) {
        const double phi = report.implied_time(s);
        if (phi < static_cast<double>(s + 1) / dn - 1e-12 || phi > 1.0) {
            throw InvariantViolation("implied time out of [s/N, 1] at index " + std::to_string(s));
        }
    }
    return report;
}

}  // namespace fbmm
