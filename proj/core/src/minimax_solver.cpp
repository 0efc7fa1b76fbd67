#include "fbmm/minimax_solver.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "fbmm/errors.hpp"

namespace fbmm {

namespace {

// Mass spread uniformly under polished weights so every suffix sum stays
// positive; small enough not to move the certificate.
constexpr double kFloorMass = 1e-14;
// Log-weights are clipped this far below their maximum during mirror ascent.
constexpr double kLogWeightRange = 600.0;
constexpr int kMaxPolishSteps = 60;

void require_size(const KernelMatrix& k, Index n, const char* what) {
    if (n != k.size()) {
        throw SizeError(std::string(what) + " has length " + std::to_string(n) + ", expected " +
                        std::to_string(k.size()));
    }
}

// a(lambda), h(a(lambda)), and the certificate values for one weight vector.
struct Evaluation {
    Vector a;
    Vector h;
    double primal = 0.0;
    double dual = 0.0;
    double gap() const { return primal - dual; }
};

Evaluation evaluate(const KernelMatrix& k, const SimplexWeights& lambda) {
    Evaluation e;
    e.a = primal_from_weights(k, lambda);
    e.h = h_profile(k, e.a);
    e.primal = e.h.maxCoeff();
    e.dual = lambda.values().dot(e.h);
    return e;
}

Vector normalized(Vector v) {
    v /= v.sum();
    return v;
}

Vector softmax(const Vector& log_weights) {
    const double top = log_weights.maxCoeff();
    Vector w = (log_weights.array() - top).exp().matrix();
    return normalized(std::move(w));
}

// Renormalized weights with exact zeros replaced by a uniform floor.
SimplexWeights with_floor(const Vector& support_weights) {
    const Index n = support_weights.size();
    Vector w = support_weights;
    w.array() += kFloorMass / static_cast<double>(n);
    return SimplexWeights(normalized(std::move(w)));
}

class Tracker {
public:
    explicit Tracker(double gap_tol) : gap_tol_(gap_tol) {}

    // Records (lambda, e) if it certifies a smaller gap than anything so far.
    void offer(const SimplexWeights& lambda, const Evaluation& e, long iteration, bool polished) {
        if (best_ && e.gap() >= best_->gap) {
            return;
        }
        if (!best_) {
            best_.emplace(SolveResult{e.a, lambda, e.primal, e.dual, e.gap(), iteration, gap_tol_,
                                      polished, {}});
        } else {
            std::vector<SolveCheckpoint> history = std::move(best_->history);
            best_.emplace(SolveResult{e.a, lambda, e.primal, e.dual, e.gap(), iteration, gap_tol_,
                                      polished, std::move(history)});
        }
        best_->history.push_back({iteration, e.primal, e.dual, e.gap()});
    }

    bool done() const { return best_ && best_->converged(); }
    SolveResult& best() { return *best_; }

    // Replaces the best pair by a sparser one that still meets the tolerance.
    void replace(const SimplexWeights& lambda, const Evaluation& e) {
        SolveResult& b = *best_;
        b.a = e.a;
        b.lambda = lambda;
        b.primal = e.primal;
        b.dual = e.dual;
        b.gap = e.gap();
        b.history.push_back({b.iterations, e.primal, e.dual, e.gap()});
    }

private:
    double gap_tol_;
    std::optional<SolveResult> best_;
};

// Maximizes the quadratic model h^T d - d^T (Q + ridge I) d / 2 of phi over
// steps d = x - center with x in the simplex, by a primal active-set method.
// The step is solved for directly (not x) so its accuracy scales with its
// size. `x` must be feasible on entry; its positive entries form the initial
// free set.
void simplex_qp(const Matrix& q, const Vector& h, double ridge, const Vector& center, Vector& x,
                int max_changes) {
    const Index n = q.rows();
    std::vector<char> free_set(static_cast<std::size_t>(n));
    for (Index t = 0; t < n; ++t) {
        free_set[static_cast<std::size_t>(t)] = x(t) > 0.0;
    }

    for (int change = 0; change < max_changes; ++change) {
        std::vector<Index> idx;
        Vector fixed_step = Vector::Zero(n);
        double released = 0.0;
        for (Index t = 0; t < n; ++t) {
            if (free_set[static_cast<std::size_t>(t)]) {
                idx.push_back(t);
            } else {
                fixed_step(t) = -center(t);
                released += center(t);
            }
        }
        const Index m = static_cast<Index>(idx.size());
        const Vector coupling = q * fixed_step;
        // Bordered system [Q_FF + ridge, 1; 1^T, 0] [d_F; nu] = [h_F - Q_FZ d_Z; released].
        // Eliminating nu by Schur complement cancels catastrophically when Q_FF
        // is nearly singular, so the bordered matrix is factorized directly.
        Matrix bordered = Matrix::Zero(m + 1, m + 1);
        Vector rhs(m + 1);
        for (Index j = 0; j < m; ++j) {
            const Index tj = idx[static_cast<std::size_t>(j)];
            rhs(j) = h(tj) - coupling(tj);
            for (Index i = 0; i < m; ++i) {
                bordered(i, j) = q(idx[static_cast<std::size_t>(i)], tj);
            }
            bordered(j, j) += ridge;
            bordered(j, m) = 1.0;
            bordered(m, j) = 1.0;
        }
        rhs(m) = released;
        const Vector solution = bordered.colPivHouseholderQr().solve(rhs);
        const Vector step = solution.head(m);
        const double nu = solution(m);

        Vector y(m);
        for (Index j = 0; j < m; ++j) {
            y(j) = center(idx[static_cast<std::size_t>(j)]) + step(j);
        }

        if ((y.array() >= 0.0).all()) {
            Vector d = fixed_step;
            x.setZero();
            for (Index j = 0; j < m; ++j) {
                const Index t = idx[static_cast<std::size_t>(j)];
                x(t) = y(j);
                d(t) = step(j);
            }
            const Vector grad = q * d + ridge * d - h;
            Index entering = -1;
            double most_negative = -1e-15 * std::max(1.0, h.cwiseAbs().maxCoeff());
            for (Index t = 0; t < n; ++t) {
                const double multiplier = grad(t) + nu;
                if (!free_set[static_cast<std::size_t>(t)] && multiplier < most_negative) {
                    most_negative = multiplier;
                    entering = t;
                }
            }
            if (entering < 0) {
                return;
            }
            free_set[static_cast<std::size_t>(entering)] = 1;
            continue;
        }

        // Move toward y until the first free weight reaches zero; drop it.
        double length = 1.0;
        Index blocking = -1;
        for (Index j = 0; j < m; ++j) {
            const Index t = idx[static_cast<std::size_t>(j)];
            if (y(j) < 0.0) {
                const double ratio = x(t) / (x(t) - y(j));
                if (ratio < length) {
                    length = ratio;
                    blocking = t;
                }
            }
        }
        for (Index j = 0; j < m; ++j) {
            const Index t = idx[static_cast<std::size_t>(j)];
            x(t) += length * (y(j) - x(t));
            if (x(t) <= 0.0) {
                x(t) = 0.0;
                free_set[static_cast<std::size_t>(t)] = 0;
            }
        }
        if (blocking >= 0) {
            x(blocking) = 0.0;
            free_set[static_cast<std::size_t>(blocking)] = 0;
        }
    }
}

// Sequential quadratic maximization of phi over the simplex. The model uses
// the exact derivatives grad phi = h(a(lambda)) and
//   d h_t / d lambda_u = -2 sum_{s <= min(t,u)} (k_ts - a_s)(k_us - a_s) / w_s,
// each QP step is followed by a backtracking search on phi itself.
void polish(const KernelMatrix& k, const Vector& start, long iteration, double target,
            Tracker& tracker) {
    const Index n = k.size();
    const Matrix& km = k.matrix();

    // Seed the working set with constraints that are (nearly) tight at the
    // current iterate: h_t at or above the current dual value.
    const Evaluation seed_eval = evaluate(k, SimplexWeights(start));
    Vector weights = Vector::Zero(n);
    for (Index t = 0; t < n; ++t) {
        if (seed_eval.h(t) >= seed_eval.dual) {
            weights(t) = start(t);
        }
    }
    weights = normalized(std::move(weights));

    for (int step = 0; step < kMaxPolishSteps; ++step) {
        const SimplexWeights lambda = with_floor(weights);
        const Evaluation e = evaluate(k, lambda);
        tracker.offer(lambda, e, iteration, true);
        if (e.gap() <= target) {
            return;
        }

        Vector suffix(n);
        double acc = 0.0;
        for (Index s = n - 1; s >= 0; --s) {
            acc += lambda[s];
            suffix(s) = acc;
        }
        Matrix scaled = Matrix::Zero(n, n);
        for (Index s = 0; s < n; ++s) {
            const double inv = 1.0 / std::sqrt(suffix(s));
            for (Index t = s; t < n; ++t) {
                scaled(t, s) = (km(t, s) - e.a(s)) * inv;
            }
        }
        Matrix hessian = Matrix::Zero(n, n);
        hessian.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 2.0);
        hessian = hessian.selfadjointView<Eigen::Lower>();

        double support_diag = 0.0;
        for (Index t = 0; t < n; ++t) {
            if (weights(t) > 0.0) {
                support_diag = std::max(support_diag, hessian(t, t));
            }
        }
        const double ridge = 1e-12 * std::max(support_diag, 1e-300);
        Vector proposal = weights;
        simplex_qp(hessian, e.h, ridge, weights, proposal, 4 * static_cast<int>(n) + 16);

        const Vector direction = proposal - weights;
        const double slope = e.h.dot(direction);
        if (!(slope > 0.0)) {
            return;
        }
        double length = 1.0;
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries, length *= 0.5) {
            Vector trial = weights + length * direction;
            trial = trial.array().max(0.0).matrix();
            if (trial.sum() <= 0.0) {
                continue;
            }
            trial = normalized(std::move(trial));
            // Near the optimum phi is flat to roundoff; a smaller certified gap
            // also counts as progress.
            const Evaluation te = evaluate(k, with_floor(trial));
            if (te.dual >= e.dual + 1e-4 * length * slope || te.gap() < e.gap()) {
                weights = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            return;
        }
    }
}

}  // namespace

SimplexWeights::SimplexWeights(Vector lambda) : lambda_(std::move(lambda)) {
    if (lambda_.size() == 0) {
        throw SizeError("simplex weights must be non-empty");
    }
    if (!lambda_.allFinite() || (lambda_.array() < 0.0).any()) {
        throw DomainError("simplex weights must be finite and nonnegative");
    }
    if (std::abs(lambda_.sum() - 1.0) > 1e-12) {
        throw DomainError("simplex weights must sum to 1");
    }
}

SimplexWeights SimplexWeights::uniform(Index n) {
    return SimplexWeights(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

SimplexWeights SimplexWeights::point_mass(Index n, Index t) {
    if (t < 0 || t >= n) {
        throw DomainError("point mass index out of range");
    }
    Vector v = Vector::Zero(n);
    v(t) = 1.0;
    return SimplexWeights(std::move(v));
}

Vector primal_from_weights(const KernelMatrix& k, const SimplexWeights& lambda) {
    const Index n = k.size();
    require_size(k, lambda.size(), "weight vector");
    const Matrix& km = k.matrix();
    const Vector& w = lambda.values();
    Vector a(n);
    double suffix = 0.0;
    for (Index s = n - 1; s >= 0; --s) {
        suffix += w(s);
        if (!(suffix > 0.0)) {
            throw DegenerateWeightsError("suffix weight vanishes at index " + std::to_string(s));
        }
        a(s) = km.col(s).tail(n - s).dot(w.tail(n - s)) / suffix;
    }
    return a;
}

double dual_value(const KernelMatrix& k, const SimplexWeights& lambda) {
    const Vector a = primal_from_weights(k, lambda);
    return lambda.values().dot(h_profile(k, a));
}

// Mirror ascent leaves residual mass on times where h_t is well below F.
// Drops it (as long as the last time keeps its mass), re-polishes if needed,
// and keeps the sparser pair when it still certifies the tolerance.
void prune_inactive(const KernelMatrix& k, Tracker& tracker) {
    for (int round = 0; round < 3; ++round) {
        const SolveResult& best = tracker.best();
        const Vector h = h_profile(k, best.a);
        const double cut = best.primal - best.gap_tol * std::max(1.0, best.primal);
        Vector w = best.lambda.values();
        bool changed = false;
        for (Index t = 0; t + 1 < w.size(); ++t) {
            if (w(t) > 0.0 && h(t) < cut) {
                w(t) = 0.0;
                changed = true;
            }
        }
        if (!changed || !(w(w.size() - 1) > 0.0)) {
            return;
        }
        const SimplexWeights pruned(normalized(std::move(w)));
        Tracker local(best.gap_tol);
        local.offer(pruned, evaluate(k, pruned), best.iterations, best.polished);
        if (!local.done()) {
            polish(k, pruned.values(), best.iterations,
                   1e-3 * best.gap_tol * std::max(1.0, best.primal), local);
        }
        if (!local.done()) {
            return;
        }
        const SolveResult& found = local.best();
        tracker.replace(found.lambda, evaluate(k, found.lambda));
    }
}

SolveResult solve(const KernelMatrix& k, const SolverOptions& options) {
    if (!(options.gap_tol > 0.0)) {
        throw DomainError("gap tolerance must be positive");
    }
    const Index n = k.size();
    Tracker tracker(options.gap_tol);

    Vector log_weights = Vector::Zero(n);
    SimplexWeights lambda = SimplexWeights::uniform(n);
    Evaluation e = evaluate(k, lambda);
    tracker.offer(lambda, e, 0, false);
    if (tracker.done()) {
        prune_inactive(k, tracker);
        return std::move(tracker.best());
    }
    const double eta0 = options.step_scale / e.primal;
    long next_polish = options.polish_after;

    for (long iter = 1; iter <= options.max_iter; ++iter) {
        const double eta = eta0 / std::sqrt(static_cast<double>(iter));
        log_weights += eta * e.h;
        const double top = log_weights.maxCoeff();
        log_weights = log_weights.array().max(top - kLogWeightRange).matrix();
        lambda = SimplexWeights(softmax(log_weights));
        e = evaluate(k, lambda);
        tracker.offer(lambda, e, iter, false);

        if (!tracker.done() && options.polish && iter == next_polish) {
            const double scale = std::max(1.0, tracker.best().primal);
            polish(k, lambda.values(), iter, 1e-3 * options.gap_tol * scale, tracker);
            next_polish *= 2;
        }
        if (tracker.done()) {
            tracker.best().iterations = iter;
            prune_inactive(k, tracker);
            return std::move(tracker.best());
        }
    }
    tracker.best().iterations = options.max_iter;
    throw NonConvergenceError(std::move(tracker.best()));
}

double brute_force_min(const KernelMatrix& k, double grid_halfwidth, int grid_steps) {
    const Index n = k.size();
    if (n > 3) {
        throw SizeError("brute-force search is limited to N <= 3");
    }
    if (!(grid_halfwidth > 0.0) || grid_steps < 3) {
        throw DomainError("brute-force grid needs a positive half-width and at least 3 steps");
    }
    constexpr double kWidthTol = 1e-10;
    const Vector last_row = k.row(n - 1);

    // a_N enters only h_N, so a_N = k_NN is optimal for every prefix. The
    // remaining coordinates are minimized one at a time; each partial minimum
    // is convex in its coordinate, so the grid neighbours of the best grid
    // point bracket the minimizer.
    Vector a = last_row;
    std::function<double(Index)> minimize_from = [&](Index level) -> double {
        if (level >= n - 1) {
            return functional_F(k, a);
        }
        double lo = last_row(level) - grid_halfwidth;
        double hi = last_row(level) + grid_halfwidth;
        double best = std::numeric_limits<double>::infinity();
        double best_x = last_row(level);
        while (hi - lo > kWidthTol) {
            const double spacing = (hi - lo) / (grid_steps - 1);
            int arg = 0;
            double stage_best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < grid_steps; ++i) {
                a(level) = lo + spacing * i;
                const double value = minimize_from(level + 1);
                if (value < stage_best) {
                    stage_best = value;
                    arg = i;
                }
            }
            if (stage_best < best) {
                best = stage_best;
                best_x = lo + spacing * arg;
            } else {
                // No progress: the previous best is interior to this box.
                arg = 1;
            }
            if (arg == 0 || arg == grid_steps - 1) {
                // Minimizer may lie outside the box: slide it.
                const double half = 0.5 * (hi - lo);
                lo = best_x - half;
                hi = best_x + half;
                continue;
            }
            lo = best_x - spacing;
            hi = best_x + spacing;
        }
        a(level) = best_x;
        return best;
    };
    return minimize_from(0);
}

}  // namespace fbmm
