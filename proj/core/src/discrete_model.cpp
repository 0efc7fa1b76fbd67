#include "fbmm/discrete_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "fbmm/errors.hpp"

namespace fbmm {

KernelMatrix::KernelMatrix(Matrix k) : k_(std::move(k)) {
    if (k_.rows() == 0 || k_.rows() != k_.cols()) {
        throw SizeError("kernel matrix must be square and non-empty");
    }
    if (!k_.allFinite()) {
        throw DomainError("kernel matrix has non-finite entries");
    }
    for (Index s = 1; s < k_.cols(); ++s) {
        if (!k_.col(s).head(s).isZero(0.0)) {
            throw DomainError("kernel matrix must be lower triangular");
        }
    }
}

double fgn_autocovariance(double hurst, Index lag) {
    const double m = static_cast<double>(lag < 0 ? -lag : lag);
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(m + 1.0, two_h) + std::pow(std::abs(m - 1.0), two_h) -
                  2.0 * std::pow(m, two_h));
}

DiscreteModel::DiscreteModel(double hurst, Matrix covariance, Matrix cholesky, KernelMatrix kernel)
    : hurst_(hurst),
      covariance_(std::move(covariance)),
      cholesky_(std::move(cholesky)),
      kernel_(std::move(kernel)) {}

DiscreteModel DiscreteModel::build(double hurst, Index n) {
    if (!(hurst > 0.5 && hurst < 1.0)) {
        throw DomainError("Hurst index must lie in the open interval (0.5, 1), got " +
                          std::to_string(hurst));
    }
    if (n < 1 || n > kMaxSize) {
        throw DomainError("number of steps must lie in [1, 5000], got " + std::to_string(n));
    }

    const double scale = std::pow(static_cast<double>(n), -2.0 * hurst);
    Vector rho(n);
    for (Index m = 0; m < n; ++m) {
        rho(m) = scale * fgn_autocovariance(hurst, m);
    }
    Matrix covariance(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            covariance(i, j) = rho(i > j ? i - j : j - i);
        }
    }

    Eigen::LLT<Matrix> llt(covariance);
    Matrix cholesky = llt.matrixL();
    for (Index j = 0; j < n; ++j) {
        const double diag = cholesky(j, j);
        const double pivot = diag * diag;
        if (llt.info() != Eigen::Success || !(pivot > kMinPivot)) {
            throw FactorizationError("increment covariance is not numerically positive definite "
                                     "(pivot " + std::to_string(pivot) + " at index " +
                                         std::to_string(j) + ")",
                                     j, pivot);
        }
    }

    Matrix kernel = cholesky;
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i) {
            kernel(i, j) += kernel(i - 1, j);
        }
    }
    return DiscreteModel(hurst, std::move(covariance), std::move(cholesky),
                         KernelMatrix(std::move(kernel)));
}

Vector h_profile(const KernelMatrix& k, const Vector& a) {
    const Index n = k.size();
    if (a.size() != n) {
        throw SizeError("candidate vector has length " + std::to_string(a.size()) +
                        ", expected " + std::to_string(n));
    }
    const Matrix& km = k.matrix();
    Vector h = Vector::Zero(n);
    for (Index s = 0; s < n; ++s) {
        const double as = a(s);
        for (Index t = s; t < n; ++t) {
            const double d = km(t, s) - as;
            h(t) += d * d;
        }
    }
    return h;
}

double functional_F(const KernelMatrix& k, const Vector& a) { return h_profile(k, a).maxCoeff(); }

}  // namespace fbmm
