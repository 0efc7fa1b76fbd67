#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fbmm/discrete_model.hpp"
#include "fbmm/errors.hpp"
#include "fbmm/minimax_solver.hpp"

using namespace fbmm;

namespace {

constexpr int kTrials = 200;

SimplexWeights random_weights(std::mt19937_64& rng, Index n) {
    std::exponential_distribution<double> e(1.0);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w(i) = e(rng);
    w /= w.sum();
    w(n - 1) += 1.0 - w.sum();
    return SimplexWeights(w);
}

}  // namespace

TEST(SimplexWeights, Validation) {
    EXPECT_THROW(SimplexWeights(Vector::Constant(3, 0.3)), DomainError);
    Vector neg(2);
    neg << 1.5, -0.5;
    EXPECT_THROW(SimplexWeights{neg}, DomainError);
    EXPECT_NO_THROW(SimplexWeights::uniform(7));
    const auto delta = SimplexWeights::point_mass(4, 2);
    EXPECT_DOUBLE_EQ(delta[2], 1.0);
    EXPECT_DOUBLE_EQ(delta[0], 0.0);
}

TEST(PrimalFromWeights, ConditionalMeanOfKernelRows) {
    const auto m = DiscreteModel::build(0.7, 3);
    Vector w(3);
    w << 0.2, 0.3, 0.5;
    const Vector a = primal_from_weights(m, SimplexWeights(w));
    const Matrix& k = m.kernel().matrix();
    EXPECT_NEAR(a(0), 0.2 * k(0, 0) + 0.3 * k(1, 0) + 0.5 * k(2, 0), 1e-15);
    EXPECT_NEAR(a(1), (0.3 * k(1, 1) + 0.5 * k(2, 1)) / 0.8, 1e-15);
    EXPECT_NEAR(a(2), k(2, 2), 1e-15);
}

TEST(PrimalFromWeights, DegenerateSuffixAndSize) {
    const auto m = DiscreteModel::build(0.7, 3);
    EXPECT_THROW(primal_from_weights(m, SimplexWeights::point_mass(3, 0)), DegenerateWeightsError);
    EXPECT_THROW(primal_from_weights(m, SimplexWeights::uniform(4)), SizeError);
}

TEST(DualValue, WeakDualityAndGradient) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> hurst(0.51, 0.99);
    std::uniform_int_distribution<int> size(1, 40);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int trial = 0; trial < kTrials; ++trial) {
        const auto m = DiscreteModel::build(hurst(rng), size(rng));
        const Index n = m.size();
        const auto w = random_weights(rng, n);
        const double phi = dual_value(m, w);
        // phi(lambda) = min_a sum lambda_t h_t(a) <= F(a) for any a.
        Vector a(n);
        for (Index i = 0; i < n; ++i) a(i) = g(rng);
        EXPECT_LE(phi, functional_F(m, a) + 1e-14);
        const Vector star = primal_from_weights(m, w);
        EXPECT_LE(phi, functional_F(m, star) + 1e-14);
        EXPECT_NEAR(phi, w.values().dot(h_profile(m, star)), 1e-14);
        // a(lambda) minimizes the weighted sum, so perturbing it cannot help.
        EXPECT_GE(w.values().dot(h_profile(m, star + 1e-3 * a)), phi - 1e-14);
    }
}

TEST(Solve, SmallInstancesMatchConicSolverValues) {
    // Minima from an independent second-order cone formulation.
    struct Case {
        double h;
        Index n;
        double value;
    };
    for (const auto& c : {Case{0.75, 2, 0.015165042945036839}, Case{0.75, 3, 0.02250069304294689},
                          Case{0.6, 3, 0.0033839412511153465}, Case{0.9, 2, 0.039431288011406926}}) {
        SolverOptions opts;
        opts.gap_tol = 1e-11;
        const auto r = solve(DiscreteModel::build(c.h, c.n), opts);
        EXPECT_NEAR(r.primal, c.value, 1e-8) << c.h << ' ' << c.n;
        EXPECT_NEAR(brute_force_min(DiscreteModel::build(c.h, c.n), 1.0, 21), c.value, 1e-8);
        EXPECT_TRUE(r.converged());
    }
}

TEST(Solve, TwoPointClosedForm) {
    // N = 2: the optimum balances h_1 and h_2 with a_2 = k_22, giving
    // ((k_21 - k_11) / 2)^2.
    const auto m = DiscreteModel::build(0.75, 2);
    const Matrix& k = m.kernel().matrix();
    const double expected = std::pow((k(1, 0) - k(0, 0)) / 2.0, 2);
    EXPECT_NEAR(solve(m).primal, expected, 1e-10);
}

TEST(Solve, SingleStepIsExact) {
    const auto r = solve(DiscreteModel::build(0.8, 1));
    EXPECT_NEAR(r.primal, 0.0, 1e-14);
    EXPECT_NEAR(r.a(0), 1.0, 1e-14);
}

TEST(Solve, TableAtTwoHundredSteps) {
    struct Row {
        double h;
        double tabulated;  // four decimals
        double reference;  // independent conic solver
    };
    const Row rows[] = {{0.55, 0.0013, 0.0013170}, {0.60, 0.0051, 0.0050953}, {0.65, 0.0112, 0.0112801},
                        {0.70, 0.0200, 0.0200954}, {0.75, 0.0320, 0.0320993}, {0.80, 0.0482, 0.0483282},
                        {0.85, 0.0705, 0.0706285}, {0.90, 0.1023, 0.1024696}, {0.95, 0.1511, 0.1514897}};
    for (const auto& row : rows) {
        const auto r = solve(DiscreteModel::build(row.h, 200));
        EXPECT_NEAR(r.primal, row.tabulated, 1e-3) << row.h;
        EXPECT_NEAR(r.primal, row.reference, 1e-6) << row.h;
        EXPECT_LE(r.gap, 1e-6 * std::max(1.0, r.primal));
        EXPECT_NEAR(r.dual, dual_value(DiscreteModel::build(row.h, 200), r.lambda), 1e-14);
        EXPECT_TRUE(r.a.isApprox(primal_from_weights(DiscreteModel::build(row.h, 200), r.lambda)));
    }
}

TEST(Solve, HistoryIsMonotoneInGap) {
    const auto r = solve(DiscreteModel::build(0.7, 80));
    ASSERT_FALSE(r.history.empty());
    for (std::size_t i = 1; i < r.history.size(); ++i) {
        EXPECT_LE(r.history[i].gap, r.history[i - 1].gap);
        EXPECT_GE(r.history[i].iteration, r.history[i - 1].iteration);
    }
    EXPECT_DOUBLE_EQ(r.history.back().gap, r.gap);
}

TEST(Solve, NonConvergenceCarriesBestIterate) {
    SolverOptions opts;
    opts.polish = false;
    opts.max_iter = 20;
    opts.gap_tol = 1e-12;
    const auto m = DiscreteModel::build(0.75, 100);
    try {
        solve(m, opts);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_GT(e.best().gap, 0.0);
        EXPECT_FALSE(e.best().converged());
        EXPECT_NEAR(e.best().primal, functional_F(m, e.best().a), 1e-15);
    }
}

TEST(Solve, RejectsBadOptions) {
    const auto m = DiscreteModel::build(0.75, 10);
    SolverOptions opts;
    opts.gap_tol = 0.0;
    EXPECT_THROW(solve(m, opts), DomainError);
}

TEST(BruteForce, AgreesWithSolverOnRandomTinyInstances) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> hurst(0.51, 0.99);
    std::uniform_int_distribution<int> size(1, 3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = DiscreteModel::build(hurst(rng), size(rng));
        EXPECT_NEAR(solve(m).primal, brute_force_min(m, 1.0, 201), 1e-4);
    }
}

TEST(BruteForce, Limits) {
    EXPECT_THROW(brute_force_min(DiscreteModel::build(0.7, 4), 1.0, 11), SizeError);
    EXPECT_THROW(brute_force_min(DiscreteModel::build(0.7, 2), 0.0, 11), DomainError);
    EXPECT_THROW(brute_force_min(DiscreteModel::build(0.7, 2), 1.0, 2), DomainError);
}

TEST(PrimalFromWeights, PointMassUniformAndTwoAtoms) {
    const auto m = DiscreteModel::build(0.75, 5);
    const Matrix& k = m.kernel().matrix();
    const Vector last = primal_from_weights(m, SimplexWeights::point_mass(5, 4));
    EXPECT_LT((last - k.row(4).transpose()).cwiseAbs().maxCoeff(), 1e-15);

    const auto m2 = DiscreteModel::build(0.75, 2);
    const Matrix& k2 = m2.kernel().matrix();
    const Vector uni = primal_from_weights(m2, SimplexWeights::uniform(2));
    EXPECT_NEAR(uni(0), 0.5 * (k2(0, 0) + k2(1, 0)), 1e-15);
    EXPECT_NEAR(uni(1), k2(1, 1), 1e-15);

    // Atoms at t = 2 and t = 5 (1-based) with masses p and 1 - p.
    const double p = 0.3;
    Vector w = Vector::Zero(5);
    w(1) = p;
    w(4) = 1.0 - p;
    const Vector two = primal_from_weights(m, SimplexWeights(w));
    for (Index s = 0; s < 2; ++s) {
        EXPECT_NEAR(two(s), p * k(1, s) + (1.0 - p) * k(4, s), 1e-15);
    }
    for (Index s = 2; s < 5; ++s) {
        EXPECT_NEAR(two(s), k(4, s), 1e-15);
    }
}

TEST(DualValue, PointMassAtEndIsZero) {
    for (Index n : {1, 4, 30}) {
        EXPECT_NEAR(dual_value(DiscreteModel::build(0.8, n), SimplexWeights::point_mass(n, n - 1)), 0.0, 1e-15);
    }
}

TEST(DualValue, UniformTwoStepMatchesGridSearch) {
    const auto m = DiscreteModel::build(0.7, 2);
    const Matrix& k = m.kernel().matrix();
    const auto w = SimplexWeights::uniform(2);
    auto weighted = [&](double a0, double a1) {
        Vector a(2);
        a << a0, a1;
        return w.values().dot(h_profile(m, a));
    };
    double best = std::numeric_limits<double>::infinity();
    double c0 = k(1, 0);
    double c1 = k(1, 1);
    for (double width = 1.0; width > 1e-9; width *= 0.1) {
        double arg0 = c0;
        double arg1 = c1;
        for (int i = -50; i <= 50; ++i) {
            for (int j = -50; j <= 50; ++j) {
                const double a0 = c0 + width * i / 50.0;
                const double a1 = c1 + width * j / 50.0;
                const double v = weighted(a0, a1);
                if (v < best) {
                    best = v;
                    arg0 = a0;
                    arg1 = a1;
                }
            }
        }
        c0 = arg0;
        c1 = arg1;
    }
    EXPECT_NEAR(dual_value(m, w), best, 1e-12);
}

TEST(Solve, CertificateInvariants) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> hurst(0.51, 0.99);
    std::uniform_int_distribution<int> size(1, 40);
    for (int trial = 0; trial < kTrials; ++trial) {
        const auto m = DiscreteModel::build(hurst(rng), size(rng));
        const auto r = solve(m);
        ASSERT_TRUE(r.converged());
        EXPECT_GE(r.gap, -1e-12);
        EXPECT_LE(r.dual, r.primal + 1e-12);
        for (const auto& c : r.history) {
            EXPECT_GE(c.primal, c.dual - 1e-12);
        }
        // Complementary slackness: weighted times are (nearly) maximal.
        const Vector h = h_profile(m, r.a);
        const double n = static_cast<double>(m.size());
        for (Index t = 0; t < m.size(); ++t) {
            if (r.lambda[t] > 10.0 * r.gap_tol / n) {
                EXPECT_GE(h(t), r.primal - 10.0 * r.gap_tol) << "H=" << m.hurst() << " N=" << n << " t=" << t;
            }
        }
    }
}

TEST(Solve, MinimumIndependentOfStepSchedule) {
    for (double h : {0.6, 0.75, 0.9}) {
        const auto m = DiscreteModel::build(h, 60);
        SolverOptions slow;
        slow.step_scale = 0.5;
        SolverOptions fast;
        fast.step_scale = 2.0;
        const auto a = solve(m, slow);
        const auto b = solve(m, fast);
        EXPECT_NEAR(a.primal, b.primal, 2.0 * slow.gap_tol) << h;
    }
}
