// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fbmm/analytic_cases.hpp"
#include "fbmm/discrete_model.hpp"
#include "fbmm/kernel.hpp"
#include "fbmm/minimax_solver.hpp"
#include "fbmm/monte_carlo.hpp"
#include "fbmm/structure.hpp"

using namespace fbmm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + why;
        }
    }
};

std::string describe(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

Verdict table_reproduction() {
    Verdict v;
    const double hs[] = {0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
    const double tabulated[] = {.0013, .0051, .0112, .0200, .0320, .0482, .0705, .1023, .1511};
    double worst_dev = 0.0;
    double worst_time = 0.0;
    for (int i = 0; i < 9; ++i) {
        const auto start = Clock::now();
        const auto r = solve(DiscreteModel::build(hs[i], 200));
        const double elapsed = seconds_since(start);
        worst_time = std::max(worst_time, elapsed);
        const double dev = std::abs(r.primal - tabulated[i]);
        worst_dev = std::max(worst_dev, dev);
        v.require(dev <= 1e-3, describe("H=%.2f: F=%.5f vs %.4f", hs[i], r.primal, tabulated[i]));
        v.require(r.gap <= 1e-6 * std::max(1.0, r.primal), describe("H=%.2f: gap %.2e", hs[i], r.gap));
        v.require(elapsed <= 60.0, describe("H=%.2f: %.1f s", hs[i], elapsed));
    }
    if (v.pass) v.detail = describe("max |F - table| = %.2e, slowest solve %.2f s", worst_dev, worst_time);
    return v;
}

Verdict curve_monotone() {
    Verdict v;
    const auto start = Clock::now();
    double prev = -1.0;
    double min_step = 1.0;
    for (int i = 51; i <= 99; ++i) {
        const double h = i / 100.0;
        const double f = solve(DiscreteModel::build(h, 200)).primal;
        v.require(f > prev, describe("not increasing at H=%.2f", h));
        if (prev >= 0.0) min_step = std::min(min_step, f - prev);
        prev = f;
    }
    const double elapsed = seconds_since(start);
    v.require(elapsed <= 1800.0, describe("sweep took %.0f s", elapsed));
    if (v.pass) v.detail = describe("49 points, smallest increment %.2e, %.1f s", min_step, elapsed);
    return v;
}

Verdict analytic_optimum() {
    Verdict v;
    const auto start = Clock::now();
    const auto k = discretize_kernel(product_kernel_eval, 600);
    const auto r = solve(k);
    const double err = std::abs(r.primal - 1.0 / 6.0);
    const bool member = minimizer_set_check(to_function_samples(r.a));
    const double elapsed = seconds_since(start);
    v.require(err <= 0.01, describe("|F* - 1/6| = %.3e", err));
    v.require(member, "minimizer outside the analytic minimizer set");
    v.require(elapsed <= 300.0, describe("%.0f s", elapsed));
    if (v.pass) v.detail = describe("F* = %.6f, |F* - 1/6| = %.2e, %.2f s", r.primal, err, elapsed);
    return v;
}

Verdict increment_identity() {
    Verdict v;
    const auto start = Clock::now();
    double worst = 0.0;
    for (double h : {0.6, 0.75, 0.9}) {
        const KernelParams p(h);
        for (int i = 1; i <= 9; ++i) {
            const double res = std::abs(increment_identity_residual(p, i / 10.0));
            worst = std::max(worst, res);
            v.require(res <= 1e-6, describe("H=%.2f t=%.1f residual %.2e", h, i / 10.0, res));
        }
    }
    const double elapsed = seconds_since(start);
    v.require(elapsed <= 60.0, describe("%.0f s", elapsed));
    if (v.pass) v.detail = describe("max residual %.2e, %.2f s", worst, elapsed);
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> hurst(0.51, 0.99);
    std::uniform_int_distribution<int> size(1, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double h = hurst(rng);
        const int n = size(rng);
        const auto m = DiscreteModel::build(h, n);
        const double diff = std::abs(solve(m).primal - brute_force_min(m, 1.0, 201));
        worst = std::max(worst, diff);
        v.require(diff <= 1e-4, describe("H=%.3f N=%d: |diff| = %.2e", h, n, diff));
    }
    if (v.pass) v.detail = describe("10 instances, max |solver - grid| = %.2e", worst);
    return v;
}

Verdict structure_theorems() {
    Verdict v;
    const auto m = DiscreteModel::build(0.75, 500);
    const auto r = solve(m);
    const auto rep = analyze(m, r);
    const double tol = 10.0 * r.gap_tol;
    v.require(rep.atom_at_end > rep.support_threshold, describe("lambda_N = %.2e", rep.atom_at_end));
    v.require(rep.tail_residual <= tol, describe("tail residual %.2e", rep.tail_residual));
    v.require(rep.endpoint_gap <= tol, describe("endpoint gap %.2e", rep.endpoint_gap));
    v.require(r.primal - rep.lower_bound > r.gap_tol, describe("F* - bound = %.2e", r.primal - rep.lower_bound));
    if (v.pass) {
        v.detail = describe("lambda_N = %.4f, t* = %ld, tail %.1e, endpoint gap %.1e, F* - bound = %.3e", rep.atom_at_end,
                       static_cast<long>(rep.t_star.value_or(-1)) + 1, rep.tail_residual, rep.endpoint_gap,
                       r.primal - rep.lower_bound);
    }
    return v;
}

Verdict monte_carlo() {
    Verdict v;
    const auto m = DiscreteModel::build(0.75, 200);
    const auto r = solve(m);
    const Vector h = h_profile(m, r.a);
    const auto mc = simulate_mc(m, r.a, 100000, 12345);
    double worst = 0.0;
    for (Index t = 0; t < 200; ++t) {
        const double z = std::abs(mc.second_moment(t) - h(t)) / mc.standard_error(t);
        worst = std::max(worst, z);
        v.require(z <= 3.0, describe("k=%ld: |z| = %.2f", static_cast<long>(t + 1), z));
    }
    Index arg = 0;
    const double emp_max = mc.second_moment.maxCoeff(&arg);
    const double z_max = std::abs(emp_max - r.primal) / mc.standard_error(arg);
    v.require(z_max <= 3.0, describe("empirical max off by %.2f SE", z_max));
    if (v.pass) v.detail = describe("1e5 paths, worst |z| = %.2f, max-vs-F |z| = %.2f", worst, z_max);
    return v;
}

Vector normal_vector(std::mt19937_64& rng, Index n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Vector out(n);
    for (Index i = 0; i < n; ++i) out(i) = g(rng);
    return out;
}

Verdict property_suites() {
    Verdict v;
    constexpr int kTrials = 200;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 80);
    int lipschitz = 0, convex = 0, bounds = 0, similar = 0, normal = 0;
    for (int trial = 0; trial < kTrials; ++trial) {
        const double h = 0.51 + 0.48 * unit(rng);
        const auto m = DiscreteModel::build(h, size(rng));
        const Index n = m.size();
        const Vector a = normal_vector(rng, n, 0.05 + 2.0 * unit(rng));
        const Vector b = normal_vector(rng, n, 0.05 + 2.0 * unit(rng));
        const double fa = std::sqrt(functional_F(m, a));
        const double fb = std::sqrt(functional_F(m, b));
        lipschitz += std::abs(fa - fb) <= (a - b).norm() + 1e-12;
        const double theta = unit(rng);
        convex += std::sqrt(functional_F(m, theta * a + (1 - theta) * b)) <= theta * fa + (1 - theta) * fb + 1e-12;
        const double f0 = std::sqrt(functional_F(m, Vector::Zero(n)));
        const double last = m.kernel().row(n - 1).norm();
        bounds += fa >= a.norm() - last - 1e-12 && fa <= a.norm() + f0 + 1e-12;

        const KernelParams p(h);
        const double t = 0.05 + 0.95 * unit(rng);
        const double s = t * (0.01 + 0.98 * unit(rng));
        const double c = 0.05 + 0.95 * unit(rng);
        const double rhs = std::pow(c, h - 0.5) * eval_K(p, t, s);
        similar += std::abs(eval_K(p, c * t, c * s) - rhs) <= 1e-8 * std::max(1.0, rhs);
        normal += std::abs(kernel_cross_moment(p, t, t) - std::pow(t, 2 * h)) <= 1e-7;
    }
    v.require(lipschitz == kTrials, describe("Lipschitz %d/200", lipschitz));
    v.require(convex == kTrials, describe("convexity %d/200", convex));
    v.require(bounds == kTrials, describe("norm bounds %d/200", bounds));
    v.require(similar == kTrials, describe("self-similarity %d/200", similar));
    v.require(normal == kTrials, describe("normalization %d/200", normal));
    if (v.pass) v.detail = "Lipschitz, convexity, norm bounds, self-similarity, normalization: 200/200 each";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"table reproduction", table_reproduction},
        {"min F increasing in H", curve_monotone},
        {"product kernel optimum", analytic_optimum},
        {"increment identity", increment_identity},
        {"small-N oracle equivalence", oracle_equivalence},
        {"structure at H=0.75, N=500", structure_theorems},
        {"Monte Carlo consistency", monte_carlo},
        {"property suites", property_suites},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failures += !v.pass;
        std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
