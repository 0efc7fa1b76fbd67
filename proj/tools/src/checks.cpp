#include "checks.hpp"

#include <cmath>
#include <exception>
#include <random>

#include <fmt/format.h>

#include "fbmm/analytic_cases.hpp"
#include "fbmm/discrete_model.hpp"
#include "fbmm/kernel.hpp"
#include "fbmm/minimax_solver.hpp"
#include "fbmm/monte_carlo.hpp"
#include "fbmm/structure.hpp"

namespace fbmm::cli {

namespace {

template <class Body>
CheckOutcome guarded(std::string name, Body&& body) {
    CheckOutcome out{std::move(name), false, {}};
    try {
        body(out);
    } catch (const std::exception& e) {
        out.passed = false;
        out.detail = fmt::format("error: {}", e.what());
    }
    return out;
}

}  // namespace

CheckOutcome check_increment_identity() {
    return guarded("increment identity", [](CheckOutcome& out) {
        double worst = 0.0;
        for (double hurst : {0.6, 0.75, 0.9}) {
            const KernelParams p(hurst);
            for (int i = 1; i <= 9; ++i) {
                worst = std::max(worst, std::abs(increment_identity_residual(p, 0.1 * i)));
            }
        }
        out.passed = worst <= 1e-6;
        out.detail = fmt::format("max residual {:.3e} (limit 1e-6)", worst);
    });
}

CheckOutcome check_product_kernel() {
    return guarded("product kernel optimum", [](CheckOutcome& out) {
        const KernelMatrix k = discretize_kernel(product_kernel_eval, 600);
        const SolveResult r = solve(k);
        const double err = std::abs(r.primal - 1.0 / 6.0);
        const bool member = minimizer_set_check(to_function_samples(r.a));
        out.passed = err <= 0.01 && member;
        out.detail = fmt::format("F* = {:.6f}, |F* - 1/6| = {:.2e}, minimizer set {}", r.primal, err,
                                 member ? "ok" : "violated");
    });
}

CheckOutcome check_monte_carlo(const CheckSettings& s) {
    return guarded("monte carlo", [&](CheckOutcome& out) {
        const DiscreteModel m = DiscreteModel::build(s.hurst, s.n);
        SolverOptions opts;
        opts.gap_tol = s.gap_tol;
        const SolveResult r = solve(m, opts);
        const Vector h = h_profile(m, r.a);
        const MonteCarloEstimate mc = simulate_mc(m, r.a, s.paths, s.seed, s.threads);
        double worst = 0.0;
        for (Index t = 0; t < h.size(); ++t) {
            worst = std::max(worst, std::abs(mc.second_moment(t) - h(t)) / mc.standard_error(t));
        }
        Index arg = 0;
        mc.second_moment.maxCoeff(&arg);
        const double max_z = std::abs(mc.second_moment(arg) - r.primal) / mc.standard_error(arg);
        out.passed = worst <= 3.0 && max_z <= 3.0;
        out.detail = fmt::format("{} paths, worst |z| = {:.2f}, max-vs-F |z| = {:.2f}", mc.paths, worst, max_z);
    });
}

CheckOutcome check_small_n_oracle(const CheckSettings& s) {
    return guarded("small-N oracle", [&](CheckOutcome& out) {
        std::mt19937_64 rng(s.seed);
        std::uniform_real_distribution<double> hurst(0.51, 0.99);
        std::uniform_int_distribution<int> size(1, 3);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const DiscreteModel m = DiscreteModel::build(hurst(rng), size(rng));
            const double brute = brute_force_min(m, 1.0, 201);
            worst = std::max(worst, std::abs(solve(m).primal - brute));
        }
        out.passed = worst <= 1e-4;
        out.detail = fmt::format("10 instances, max |solver - grid| = {:.2e}", worst);
    });
}

CheckOutcome check_structure(const CheckSettings& s) {
    return guarded("structure", [&](CheckOutcome& out) {
        const DiscreteModel m = DiscreteModel::build(s.hurst, s.n);
        SolverOptions opts;
        opts.gap_tol = s.gap_tol;
        const SolveResult r = solve(m, opts);
        const StructureReport rep = analyze(m, r);
        const double tol = 10.0 * s.gap_tol;
        const bool atom = rep.atom_at_end > rep.support_threshold;
        const bool tail = rep.tail_residual <= tol;
        const bool strict = r.primal - rep.lower_bound > s.gap_tol;
        out.passed = atom && tail && rep.endpoint_gap <= tol && strict;
        out.detail = fmt::format("lambda_N = {:.4f}, tail {:.1e}, endpoint gap {:.1e}, F* - bound = {:.3e}",
                                 rep.atom_at_end, rep.tail_residual, rep.endpoint_gap,
                                 r.primal - rep.lower_bound);
    });
}

std::vector<CheckOutcome> run_checks(const CheckSettings& s) {
    return {check_increment_identity(), check_product_kernel(), check_monte_carlo(s), check_small_n_oracle(s),
            check_structure(s)};
}

}  // namespace fbmm::cli
