#pragma once

#include <stdexcept>
#include <string>

namespace fbmm {

/// Argument outside the domain where an operation is defined (Hurst index,
/// time range, kernel arguments).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Value outside an admissible range (implied-time inversion, product kernel).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Vector or matrix dimensions disagree.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Cholesky factorization hit a pivot at or below the acceptance threshold.
class FactorizationError : public std::runtime_error {
public:
    FactorizationError(const std::string& what, long index, double pivot)
        : std::runtime_error(what), index_(index), pivot_(pivot) {}

    long index() const noexcept { return index_; }
    double pivot() const noexcept { return pivot_; }

private:
    long index_;
    double pivot_;
};

/// Adaptive quadrature exhausted its refinement depth before meeting tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simplex weights leave some suffix mass at zero, so the weighted primal is
/// undefined there.
class DegenerateWeightsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural analysis was handed a result that does not meet its tolerance.
class UnconvergedInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structural invariant that must hold for a converged minimizer failed.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace fbmm
