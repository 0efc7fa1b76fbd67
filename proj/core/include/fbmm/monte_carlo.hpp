#pragma once

#include <cstdint>

#include "fbmm/discrete_model.hpp"

namespace fbmm {

/// Empirical E(b_k - m_k)^2 with its standard error, k = 1..N, where
/// b = K zeta and m_k = sum_{j <= k} a_j zeta_j.
struct MonteCarloEstimate {
    Vector second_moment;
    Vector standard_error;
    long paths = 0;
};

/// Draws `paths` standard normal vectors and estimates the mean-square gap
/// between the discrete fBm and the Gaussian martingale driven by a. Paths are
/// split into fixed-size shards whose generators are seeded from (seed, shard),
/// so the output is bit-identical for a given seed regardless of `threads`
/// (0 = hardware concurrency).
///
/// Throws DomainError if paths < 1, SizeError on length mismatch.
MonteCarloEstimate simulate_mc(const KernelMatrix& k, const Vector& a, long paths,
                               std::uint64_t seed, unsigned threads = 0);

inline MonteCarloEstimate simulate_mc(const DiscreteModel& m, const Vector& a, long paths,
                                      std::uint64_t seed, unsigned threads = 0) {
    return simulate_mc(m.kernel(), a, paths, seed, threads);
}

}  // namespace fbmm
