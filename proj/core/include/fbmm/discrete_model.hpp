#pragma once

#include <Eigen/Dense>

namespace fbmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Square lower-triangular kernel matrix k_ts: row t is the time index, column
/// s the noise index. Indices are 0-based here; time index t corresponds to the
/// grid point (t + 1) / N.
class KernelMatrix {
public:
    /// Throws SizeError if k is empty or not square, DomainError if an entry
    /// above the diagonal is nonzero or any entry is not finite.
    explicit KernelMatrix(Matrix k);

    Index size() const noexcept { return k_.rows(); }
    const Matrix& matrix() const noexcept { return k_; }
    double operator()(Index t, Index s) const { return k_(t, s); }
    Vector row(Index t) const { return k_.row(t).transpose(); }

private:
    Matrix k_;
};

/// Autocovariance of unit-step fractional Gaussian noise at integer lag m:
/// ((m + 1)^{2H} + |m - 1|^{2H} - 2 m^{2H}) / 2.
double fgn_autocovariance(double hurst, Index lag);

/// Discretized fBm on the uniform grid k/N, k = 0..N.
///
/// The increments d_i = B_{i/N} - B_{(i-1)/N} have covariance C = L L^T; with
/// d = L zeta for i.i.d. standard normal zeta, b = K zeta where
/// k_ij = sum_{r <= i} l_rj. Immutable after build().
class DiscreteModel {
public:
    /// Cholesky pivots at or below this value are rejected rather than
    /// regularized.
    static constexpr double kMinPivot = 1e-13;
    static constexpr Index kMaxSize = 5000;

    /// Throws DomainError for hurst outside (0.5, 1) or n outside [1, 5000],
    /// FactorizationError if the increment covariance is numerically not PD.
    static DiscreteModel build(double hurst, Index n);

    double hurst() const noexcept { return hurst_; }
    Index size() const noexcept { return kernel_.size(); }
    const Matrix& increment_covariance() const noexcept { return covariance_; }
    const Matrix& cholesky_factor() const noexcept { return cholesky_; }
    const KernelMatrix& kernel() const noexcept { return kernel_; }

private:
    DiscreteModel(double hurst, Matrix covariance, Matrix cholesky, KernelMatrix kernel);

    double hurst_;
    Matrix covariance_;
    Matrix cholesky_;
    KernelMatrix kernel_;
};

/// h_t(a) = sum_{s <= t} (k_ts - a_s)^2 for every t, in O(N^2).
/// Throws SizeError if a.size() != N.
Vector h_profile(const KernelMatrix& k, const Vector& a);

/// F(a) = max_t h_t(a).
double functional_F(const KernelMatrix& k, const Vector& a);

inline Vector h_profile(const DiscreteModel& m, const Vector& a) { return h_profile(m.kernel(), a); }
inline double functional_F(const DiscreteModel& m, const Vector& a) { return functional_F(m.kernel(), a); }

}  // namespace fbmm
