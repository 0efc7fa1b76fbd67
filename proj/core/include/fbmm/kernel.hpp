#pragma once

// Volterra kernel of fractional Brownian motion for H in (1/2, 1):
//
//   B^H_t = int_0^t K(t, s) dW_s,
//   K(t, s) = C_alpha s^{-alpha} int_s^t u^alpha (u - s)^{alpha - 1} du,  0 < s < t,
//
// with alpha = H - 1/2. B^H and W generate the same filtration, so every
// square-integrable martingale of B^H is int a_s dW_s for an adapted a, and
// the mean-square distance to B^H splits into a deterministic part plus
// Var(a). Minimizing the distance therefore only needs deterministic a
// (Gaussian martingales), which is the problem the rest of the library solves.

namespace fbmm {

/// Hurst index and quadrature settings for the fBm kernel. Immutable.
class KernelParams {
public:
    /// Throws DomainError unless 0.5 < hurst < 1 and quad_tol > 0.
    explicit KernelParams(double hurst, double quad_tol = 1e-10);

    double hurst() const noexcept { return hurst_; }
    double alpha() const noexcept { return alpha_; }
    double c_alpha() const noexcept { return c_alpha_; }
    double quad_tol() const noexcept { return quad_tol_; }

private:
    double hurst_;
    double alpha_;
    double c_alpha_;
    double quad_tol_;
};

/// Normalizing constant
///   C_alpha = alpha * sqrt((2 alpha + 1) Gamma(1 - alpha) / (Gamma(alpha + 1) Gamma(1 - 2 alpha))).
/// Throws DomainError for hurst outside (0.5, 1).
double c_alpha(double hurst);

/// K(t, s) for 0 < s <= t <= 1, to absolute accuracy quad_tol. K(t, t) = 0.
/// The singularity of (u - s)^{alpha - 1} is removed by w = (u - s)^alpha,
/// which leaves the smooth integrand (1/alpha)(s + w^{1/alpha})^alpha on
/// [0, (t - s)^alpha].
///
/// Throws DomainError if s > t, s < 0, t > 1, or s == 0 < t (the kernel
/// diverges like s^{-alpha} there).
double eval_K(const KernelParams& p, double t, double s);

/// Covariance of fBm: (t^{2H} + u^{2H} - |t - u|^{2H}) / 2, t, u in [0, 1].
double covariance_fbm(double hurst, double t, double u);

/// int_0^{min(t,u)} K(t, s) K(u, s) ds by nested quadrature. Equals
/// covariance_fbm(H, t, u) up to quadrature error.
double kernel_cross_moment(const KernelParams& p, double t, double u, double abs_tol = 1e-9);

/// Residual of the increment identity
///   int_0^t (K(1,s) - K(t,s))^2 ds + int_t^1 K(1,s)^2 ds - (1 - t)^{2H},
/// i.e. E(B_1 - B_t)^2 computed through the kernel minus its closed form.
double increment_identity_residual(const KernelParams& p, double t, double abs_tol = 1e-9);

}  // namespace fbmm
