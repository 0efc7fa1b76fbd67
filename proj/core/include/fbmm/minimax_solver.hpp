#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbmm/discrete_model.hpp"

namespace fbmm {

/// Probability vector over time indices: the discrete law of the random time
/// xi in the mixture representation a_s = E[k_{xi,s} | xi >= s].
class SimplexWeights {
public:
    /// Throws DomainError on negative or non-finite entries or if the entries do
    /// not sum to 1 within 1e-12, SizeError if empty.
    explicit SimplexWeights(Vector lambda);

    static SimplexWeights uniform(Index n);
    static SimplexWeights point_mass(Index n, Index t);

    const Vector& values() const noexcept { return lambda_; }
    Index size() const noexcept { return lambda_.size(); }
    double operator[](Index t) const { return lambda_(t); }

private:
    Vector lambda_;
};

/// Best-so-far certificate after a given iteration.
struct SolveCheckpoint {
    long iteration = 0;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
};

/// Primal-dual certificate pair: a = primal_from_weights(k, lambda),
/// primal = F(a), dual = phi(lambda), and dual <= min F <= primal.
struct SolveResult {
    Vector a;
    SimplexWeights lambda;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    long iterations = 0;
    double gap_tol = 0.0;
    bool polished = false;
    std::vector<SolveCheckpoint> history;

    bool converged() const noexcept { return gap <= gap_tol * std::max(1.0, primal); }
};

struct SolverOptions {
    /// Stop once F(a) - phi(lambda) <= gap_tol * max(1, F(a)).
    double gap_tol = 1e-6;
    long max_iter = 200000;
    /// eta_k = step_scale / (sqrt(k) * max_t h_t(a(lambda_0))).
    double step_scale = 1.0;
    /// Sequential QP refinement of the dual near the current support, first
    /// tried after polish_after mirror steps and then each time the iteration
    /// count doubles.
    bool polish = true;
    long polish_after = 500;
};

/// Thrown when gap_tol is not met within max_iter; carries the best pair found.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(SolveResult best)
        : std::runtime_error("minimax solver did not reach the requested duality gap (gap " +
                             std::to_string(best.gap) + " after " +
                             std::to_string(best.iterations) + " iterations)"),
          best_(std::move(best)) {}

    const SolveResult& best() const noexcept { return best_; }

private:
    SolveResult best_;
};

/// Exact minimizer of sum_t lambda_t h_t(a):
///   a_s = sum_{t >= s} lambda_t k_ts / sum_{t >= s} lambda_t.
/// Throws DegenerateWeightsError if some suffix mass is zero, SizeError on
/// length mismatch.
Vector primal_from_weights(const KernelMatrix& k, const SimplexWeights& lambda);

/// phi(lambda) = sum_t lambda_t h_t(a(lambda)) = min_a sum_t lambda_t h_t(a).
/// Concave in lambda and a lower bound on min F; its gradient is h(a(lambda)).
double dual_value(const KernelMatrix& k, const SimplexWeights& lambda);

/// Minimizes F(a) = max_t h_t(a) by entropic mirror ascent on phi over the
/// simplex (lambda_t proportional to lambda_t exp(eta_k h_t)), starting from
/// uniform weights, with optional SQP polishing of the dual near the
/// identified support. Every returned a is primal_from_weights(k, lambda), so
/// the reported gap is a certificate.
///
/// Throws NonConvergenceError if the tolerance is not met within max_iter.
SolveResult solve(const KernelMatrix& k, const SolverOptions& options = {});

/// Exhaustive grid oracle for tiny instances. a_N = k_NN is fixed (it only
/// enters h_N); each remaining coordinate is minimized by nested grid search
/// with grid_steps points, starting on [k_Ns - w, k_Ns + w] and narrowing to
/// the neighbours of the best point (or sliding when it sits on the edge)
/// down to width 1e-10.
/// Throws SizeError if N > 3, DomainError for w <= 0 or fewer than 3 steps.
double brute_force_min(const KernelMatrix& k, double grid_halfwidth, int grid_steps);

inline Vector primal_from_weights(const DiscreteModel& m, const SimplexWeights& lambda) {
    return primal_from_weights(m.kernel(), lambda);
}
inline double dual_value(const DiscreteModel& m, const SimplexWeights& lambda) {
    return dual_value(m.kernel(), lambda);
}
inline SolveResult solve(const DiscreteModel& m, const SolverOptions& options = {}) {
    return solve(m.kernel(), options);
}
inline double brute_force_min(const DiscreteModel& m, double grid_halfwidth, int grid_steps) {
    return brute_force_min(m.kernel(), grid_halfwidth, grid_steps);
}

}  // namespace fbmm
