#include "fbmm/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fbmm/errors.hpp"

namespace fbmm {

namespace {

constexpr long kShardPaths = 2048;

struct ShardSums {
    Vector sum2;
    Vector sum4;
};

ShardSums run_shard(const Matrix& residual_kernel, long shard, long count, std::uint64_t seed) {
    const Index n = residual_kernel.rows();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal;

    Matrix noise(n, count);
    for (Index j = 0; j < count; ++j) {
        for (Index i = 0; i < n; ++i) {
            noise(i, j) = normal(gen);
        }
    }
    const Matrix gap = residual_kernel.triangularView<Eigen::Lower>() * noise;
    const Matrix sq = gap.array().square().matrix();
    return {sq.rowwise().sum(), sq.array().square().matrix().rowwise().sum()};
}

}  // namespace

MonteCarloEstimate simulate_mc(const KernelMatrix& k, const Vector& a, long paths,
                               std::uint64_t seed, unsigned threads) {
    if (paths < 1) {
        throw DomainError("Monte Carlo needs at least one path");
    }
    const Index n = k.size();
    if (a.size() != n) {
        throw SizeError("candidate vector has length " + std::to_string(a.size()) +
                        ", expected " + std::to_string(n));
    }

    // Row t of the residual kernel maps zeta to b_t - m_t.
    Matrix residual = k.matrix();
    for (Index s = 0; s < n; ++s) {
        residual.col(s).tail(n - s).array() -= a(s);
    }

    const long shards = (paths + kShardPaths - 1) / kShardPaths;
    std::vector<ShardSums> results(static_cast<std::size_t>(shards));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long i = next++; i < shards; i = next++) {
            const long count = std::min(kShardPaths, paths - i * kShardPaths);
            results[static_cast<std::size_t>(i)] = run_shard(residual, i, count, seed);
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<long>(workers, shards));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    Vector sum2 = Vector::Zero(n);
    Vector sum4 = Vector::Zero(n);
    for (const auto& r : results) {
        sum2 += r.sum2;
        sum4 += r.sum4;
    }

    const double count = static_cast<double>(paths);
    MonteCarloEstimate out;
    out.paths = paths;
    out.second_moment = sum2 / count;
    out.standard_error = Vector::Zero(n);
    if (paths > 1) {
        const Vector variance =
            ((sum4.array() - sum2.array().square() / count) / (count - 1.0)).max(0.0);
        out.standard_error = (variance.array() / count).sqrt();
    }
    return out;
}

}  // namespace fbmm
