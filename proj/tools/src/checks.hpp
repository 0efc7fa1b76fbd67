#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbmm::cli {

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CheckSettings {
    double hurst = 0.75;
    long n = 200;
    double gap_tol = 1e-6;
    std::uint64_t seed = 42;
    long paths = 100000;
    unsigned threads = 0;
};

/// |int_0^t (K(1,s) - K(t,s))^2 ds - (1-t)^{2H}| <= 1e-6 on t = 0.1..0.9, H in {0.6, 0.75, 0.9}.
CheckOutcome check_increment_identity();

/// Discretized product kernel at N = 600: |F* - 1/6| <= 0.01 and the minimizer
/// lies in the analytic minimizer set.
CheckOutcome check_product_kernel();

/// Sample second moments of b_k - m_k within 3 standard errors of h_k(a), and
/// the sample maximum within 3 standard errors of F(a).
CheckOutcome check_monte_carlo(const CheckSettings& s);

/// Ten random instances with N <= 3 against exhaustive grid search, to 1e-4.
CheckOutcome check_small_n_oracle(const CheckSettings& s);

/// Converged solve at (H, N) with the structural invariants (atom at the end,
/// tail equality, active terminal constraint, strict lower bound).
CheckOutcome check_structure(const CheckSettings& s);

std::vector<CheckOutcome> run_checks(const CheckSettings& s);

}  // namespace fbmm::cli
