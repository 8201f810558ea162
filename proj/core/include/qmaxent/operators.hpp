#pragma once

#include <Eigen/Dense>

#include "qmaxent/layout.hpp"

namespace qmaxent {

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors; // columns, same order as eigenvalues
};

/// Dense Hermitian operator tied to a SystemLayout.
///
/// Hermiticity is validated on construction (up to a scale-relative
/// tolerance), so downstream spectral routines can assume it.
class HermitianOperator {
  public:
    HermitianOperator(SystemLayout layout, Eigen::MatrixXcd matrix);

    const SystemLayout& layout() const { return layout_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

    Spectrum spectrum() const;

    /// Operator norm (largest absolute eigenvalue).
    double operator_norm() const;

    double trace_real() const { return mat_.trace().real(); }

  protected:
    struct Unchecked {}; // constructor tag: caller guarantees the invariants
    HermitianOperator(SystemLayout layout, Eigen::MatrixXcd matrix, Unchecked);

    SystemLayout layout_;
    Eigen::MatrixXcd mat_;
};

/// Hermitian, unit-trace, positive semidefinite (within tolerance) state.
class DensityMatrix : public HermitianOperator {
  public:
    /// Validates trace and the smallest eigenvalue on top of Hermiticity.
    static DensityMatrix from_matrix(SystemLayout layout, Eigen::MatrixXcd matrix);

    /// Builds V diag(p) V^dagger from trusted data: `weights` must be
    /// nonnegative and sum to 1, `vectors` unitary columns. No validation.
    static DensityMatrix from_eigenbasis(SystemLayout layout,
                                         const Eigen::MatrixXcd& vectors,
                                         const Eigen::VectorXd& weights);

    static DensityMatrix pure(SystemLayout layout, const Eigen::VectorXcd& amplitudes);
    static DensityMatrix maximally_mixed(SystemLayout layout);

  private:
    DensityMatrix(SystemLayout layout, Eigen::MatrixXcd matrix, Unchecked tag)
        : HermitianOperator(std::move(layout), std::move(matrix), tag) {}
};

/// op tensor identity on the remaining sites of `target`, factors ordered by
/// the target layout. The operator's sites must all appear in `target`.
HermitianOperator tensor_embed(const HermitianOperator& op, const SystemLayout& target);

/// Reduced state on `keep` (any order; result uses layout order). Keeping
/// every site returns the state unchanged; keeping none yields the trivial
/// 1x1 state.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// exp(A) via eigendecomposition; the result is Hermitian by construction.
HermitianOperator herm_expm(const HermitianOperator& a);

/// Von Neumann entropy in nats. Eigenvalues below 1e-14 contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Trace-norm distance ||a - b||_1 (sum of absolute eigenvalues of a - b).
/// Requires identical layouts.
double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Relative entropy S(rho || sigma) in nats. Returns +infinity when rho has
/// weight above 1e-10 outside the numerical support of sigma (eigenvalues
/// below 1e-12). Requires identical layouts.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

} // namespace qmaxent
