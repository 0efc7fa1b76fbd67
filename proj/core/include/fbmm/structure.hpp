#pragma once

#include <optional>
#include <vector>

#include "fbmm/discrete_model.hpp"
#include "fbmm/kernel.hpp"
#include "fbmm/minimax_solver.hpp"

namespace fbmm {

/// Structural description of a converged discrete minimizer. Indices are
/// 0-based; index N - 1 is the terminal time 1.
struct StructureReport {
    double support_threshold = 0.0;
    /// Time indices carrying weight above support_threshold (support of xi).
    std::vector<Index> xi_support;
    /// lambda at the terminal index (the atom at time 1).
    double atom_at_end = 0.0;
    /// Largest support index below the terminal one, if any.
    std::optional<Index> t_star;
    /// max_{s > t_star} |a_s - k_{N-1,s}|: a follows the last kernel row past t_star.
    double tail_residual = 0.0;
    /// F(a) - h_{N-1}(a); zero when the terminal constraint is active.
    double endpoint_gap = 0.0;
    /// (1/4) max_t sum_{s <= t} (k_{N-1,s} - k_ts)^2 and its maximizing t.
    double lower_bound = 0.0;
    Index lower_bound_index = 0;
    /// phi(s): the time at which the kernel column s reaches a_s.
    Vector implied_time;
    /// max - min of a over xi_support without the terminal index.
    double plateau_spread = 0.0;
    /// Number of s with a_{s+1} > a_s (reported, not asserted).
    long monotonicity_violations = 0;
    /// Support sizes at thresholds 1e-3, 1e-4, 1e-5, 1e-6.
    std::vector<Index> support_size_by_threshold;
};

/// Fills a StructureReport from a converged solve and checks that
///   lower_bound <= F(a), endpoint_gap <= 10 gap_tol, (s+1)/N <= phi(s) <= 1.
///
/// Throws UnconvergedInputError if r has not met its tolerance and
/// InvariantViolation if one of the checks fails.
StructureReport analyze(const KernelMatrix& k, const SolveResult& r,
                        double support_threshold = 1e-4);

inline StructureReport analyze(const DiscreteModel& m, const SolveResult& r,
                               double support_threshold = 1e-4) {
    return analyze(m.kernel(), r, support_threshold);
}

/// Root phi in [s, 1] of K(phi, s) = a_s. K increases in its first argument,
/// so the root is unique. Bisection runs on u = (phi - s)^alpha until the
/// bracket is below 1e-8 in phi and 1e-16 in u.
/// Throws RangeError unless 0 <= a_s <= K(1, s).
double implied_time(const KernelParams& p, double s, double a_s);

/// Discrete analogue: t -> k_ts is interpolated linearly between the grid
/// times (t + 1)/N, t = s..N-1, and inverted by bisection. The result lies in
/// [(s + 1)/N, 1]. Throws RangeError unless k_ss <= a_s <= k_{N-1,s}.
double implied_time(const KernelMatrix& k, Index s, double a_s);

/// (1/4) max_t sum_{s <= t} (k_{N-1,s} - k_ts)^2: the value certified by the
/// two-atom weights (delta_t + delta_{N-1}) / 2 at the maximizing t. It is a
/// lower bound for min F that the fBm kernel never attains.
double discrete_lower_bound(const KernelMatrix& k);
Index discrete_lower_bound_index(const KernelMatrix& k);

inline double discrete_lower_bound(const DiscreteModel& m) { return discrete_lower_bound(m.kernel()); }

}  // namespace fbmm
