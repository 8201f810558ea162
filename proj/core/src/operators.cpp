#include "qmaxent/operators.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qmaxent {

namespace {

constexpr double kEntropyFloor = 1e-14;   // eigenvalues below this count as 0
constexpr double kSupportFloor = 1e-12;   // sigma support threshold
constexpr double kSupportWeightTol = 1e-10;

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace

// ===================== HermitianOperator / DensityMatrix =====================

HermitianOperator::HermitianOperator(SystemLayout layout, Eigen::MatrixXcd matrix)
    : layout_(std::move(layout)), mat_(std::move(matrix)) {
    const auto expected = static_cast<Eigen::Index>(layout_.dim());
    if (mat_.rows() != expected || mat_.cols() != expected)
        throw LayoutError("matrix is " + std::to_string(mat_.rows()) + "x" +
                          std::to_string(mat_.cols()) + " but layout dimension is " +
                          std::to_string(expected));
    const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
    if (hermiticity_defect(mat_) > 1e-12 * scale)
        throw InvariantError("matrix is not Hermitian within tolerance");
    // Symmetrize away representation noise so spectra are exactly real.
    mat_ = 0.5 * (mat_ + mat_.adjoint()).eval();
}

HermitianOperator::HermitianOperator(SystemLayout layout, Eigen::MatrixXcd matrix, Unchecked)
    : layout_(std::move(layout)), mat_(std::move(matrix)) {}

Spectrum HermitianOperator::spectrum() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat_);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge");
    return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

double HermitianOperator::operator_norm() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge");
    const auto& ev = solver.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

DensityMatrix DensityMatrix::from_matrix(SystemLayout layout, Eigen::MatrixXcd matrix) {
    HermitianOperator checked(std::move(layout), std::move(matrix));
    const double trace = checked.matrix().trace().real();
    if (std::abs(trace - 1.0) > 1e-10)
        throw InvariantError("state trace is " + std::to_string(trace) + ", expected 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(checked.matrix(),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge");
    if (solver.eigenvalues()(0) < -1e-10)
        throw InvariantError("state has eigenvalue " +
                             std::to_string(solver.eigenvalues()(0)) +
                             " below the positivity tolerance");
    return DensityMatrix(checked.layout(), checked.matrix(), Unchecked{});
}

DensityMatrix DensityMatrix::from_eigenbasis(SystemLayout layout,
                                             const Eigen::MatrixXcd& vectors,
                                             const Eigen::VectorXd& weights) {
    Eigen::MatrixXcd m = vectors * weights.asDiagonal() * vectors.adjoint();
    return DensityMatrix(std::move(layout), std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::pure(SystemLayout layout, const Eigen::VectorXcd& amplitudes) {
    if (amplitudes.size() != static_cast<Eigen::Index>(layout.dim()))
        throw LayoutError("state vector length does not match layout dimension");
    const double norm = amplitudes.norm();
    if (norm < 1e-14) throw DomainError("cannot normalize a zero state vector");
    Eigen::VectorXcd psi = amplitudes / norm;
    return DensityMatrix(std::move(layout), psi * psi.adjoint(), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(SystemLayout layout) {
    const auto dim = static_cast<Eigen::Index>(layout.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim);
    return DensityMatrix(std::move(layout), std::move(m), Unchecked{});
}

// ============================= free operations ==============================

HermitianOperator tensor_embed(const HermitianOperator& op, const SystemLayout& target) {
    const SystemLayout& small = op.layout();
    if (small.local_dim() != target.local_dim())
        throw LayoutError("local dimension mismatch in tensor_embed");

    const int n = target.num_sites();
    const int d = target.local_dim();
    // Stride of each target position (first site = most significant factor).
    std::vector<std::size_t> stride(static_cast<std::size_t>(n));
    {
        std::size_t s = 1;
        for (int p = n - 1; p >= 0; --p) {
            stride[static_cast<std::size_t>(p)] = s;
            s *= static_cast<std::size_t>(d);
        }
    }
    std::vector<int> op_positions;
    std::vector<bool> covered(static_cast<std::size_t>(n), false);
    for (int site : small.sites()) {
        int p = target.site_position(site); // throws if not present
        if (covered[static_cast<std::size_t>(p)])
            throw LayoutError("operator repeats a site in tensor_embed");
        covered[static_cast<std::size_t>(p)] = true;
        op_positions.push_back(p);
    }
    std::vector<int> rest_positions;
    for (int p = 0; p < n; ++p)
        if (!covered[static_cast<std::size_t>(p)]) rest_positions.push_back(p);

    const std::size_t dim_op = small.dim();
    std::size_t dim_rest = 1;
    for (std::size_t i = 0; i < rest_positions.size(); ++i)
        dim_rest *= static_cast<std::size_t>(d);

    // Base offsets of every configuration of the identity factors.
    std::vector<std::size_t> rest_offset(dim_rest, 0);
    for (std::size_t r = 0; r < dim_rest; ++r) {
        std::size_t x = r, off = 0;
        for (auto it = rest_positions.rbegin(); it != rest_positions.rend(); ++it) {
            off += (x % static_cast<std::size_t>(d)) * stride[static_cast<std::size_t>(*it)];
            x /= static_cast<std::size_t>(d);
        }
        rest_offset[r] = off;
    }
    // Offsets of every operator index, with digits read in the operator's
    // own factor order but placed at the target positions.
    std::vector<std::size_t> op_offset(dim_op, 0);
    for (std::size_t a = 0; a < dim_op; ++a) {
        std::size_t x = a, off = 0;
        for (auto it = op_positions.rbegin(); it != op_positions.rend(); ++it) {
            off += (x % static_cast<std::size_t>(d)) * stride[static_cast<std::size_t>(*it)];
            x /= static_cast<std::size_t>(d);
        }
        op_offset[a] = off;
    }

    const auto dim_full = static_cast<Eigen::Index>(target.dim());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_full, dim_full);
    const Eigen::MatrixXcd& m = op.matrix();
    for (std::size_t a = 0; a < dim_op; ++a)
        for (std::size_t b = 0; b < dim_op; ++b) {
            const std::complex<double> v = m(static_cast<Eigen::Index>(a),
                                             static_cast<Eigen::Index>(b));
            if (v == std::complex<double>(0.0, 0.0)) continue;
            for (std::size_t r = 0; r < dim_rest; ++r)
                out(static_cast<Eigen::Index>(op_offset[a] + rest_offset[r]),
                    static_cast<Eigen::Index>(op_offset[b] + rest_offset[r])) = v;
        }
    return HermitianOperator(target, std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const SystemLayout& layout = rho.layout();
    SystemLayout reduced = layout.restricted_to(keep);

    const int n = layout.num_sites();
    const int d = layout.local_dim();
    std::vector<std::size_t> stride(static_cast<std::size_t>(n));
    {
        std::size_t s = 1;
        for (int p = n - 1; p >= 0; --p) {
            stride[static_cast<std::size_t>(p)] = s;
            s *= static_cast<std::size_t>(d);
        }
    }
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    std::vector<int> keep_positions;
    for (int site : reduced.sites()) {
        int p = layout.site_position(site);
        kept[static_cast<std::size_t>(p)] = true;
        keep_positions.push_back(p);
    }
    std::vector<int> traced_positions;
    for (int p = 0; p < n; ++p)
        if (!kept[static_cast<std::size_t>(p)]) traced_positions.push_back(p);

    const std::size_t dim_keep = reduced.dim();
    std::size_t dim_traced = layout.dim() / dim_keep;

    std::vector<std::size_t> keep_offset(dim_keep, 0);
    for (std::size_t a = 0; a < dim_keep; ++a) {
        std::size_t x = a, off = 0;
        for (auto it = keep_positions.rbegin(); it != keep_positions.rend(); ++it) {
            off += (x % static_cast<std::size_t>(d)) * stride[static_cast<std::size_t>(*it)];
            x /= static_cast<std::size_t>(d);
        }
        keep_offset[a] = off;
    }
    std::vector<std::size_t> traced_offset(dim_traced, 0);
    for (std::size_t t = 0; t < dim_traced; ++t) {
        std::size_t x = t, off = 0;
        for (auto it = traced_positions.rbegin(); it != traced_positions.rend(); ++it) {
            off += (x % static_cast<std::size_t>(d)) * stride[static_cast<std::size_t>(*it)];
            x /= static_cast<std::size_t>(d);
        }
        traced_offset[t] = off;
    }

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_keep),
                                                  static_cast<Eigen::Index>(dim_keep));
    const Eigen::MatrixXcd& m = rho.matrix();
    for (std::size_t a = 0; a < dim_keep; ++a)
        for (std::size_t b = 0; b < dim_keep; ++b) {
            std::complex<double> sum = 0.0;
            for (std::size_t t = 0; t < dim_traced; ++t)
                sum += m(static_cast<Eigen::Index>(keep_offset[a] + traced_offset[t]),
                         static_cast<Eigen::Index>(keep_offset[b] + traced_offset[t]));
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum;
        }
    return DensityMatrix::from_matrix(std::move(reduced), std::move(out));
}

HermitianOperator herm_expm(const HermitianOperator& a) {
    Spectrum s = a.spectrum();
    Eigen::VectorXd exp_ev = s.eigenvalues.array().exp();
    Eigen::MatrixXcd m = s.eigenvectors * exp_ev.asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator(a.layout(), std::move(m));
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.matrix(),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge");
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double p = solver.eigenvalues()(i);
        if (p > kEntropyFloor) entropy -= p * std::log(p);
    }
    return entropy;
}

double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.layout() != b.layout())
        throw LayoutError("trace_norm_distance requires identical layouts");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix() - b.matrix(),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge");
    return solver.eigenvalues().cwiseAbs().sum();
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.layout() != sigma.layout())
        throw LayoutError("relative_entropy requires identical layouts");
    Spectrum ss = sigma.spectrum();
    // Diagonal of rho in sigma's eigenbasis: weight of rho on each direction.
    Eigen::MatrixXcd rotated = ss.eigenvectors.adjoint() * rho.matrix() * ss.eigenvectors;
    double off_support_weight = 0.0;
    double trace_rho_log_sigma = 0.0;
    for (Eigen::Index k = 0; k < ss.eigenvalues.size(); ++k) {
        const double w = rotated(k, k).real();
        const double s = ss.eigenvalues(k);
        if (s < kSupportFloor)
            off_support_weight += std::max(w, 0.0);
        else
            trace_rho_log_sigma += w * std::log(s);
    }
    if (off_support_weight > kSupportWeightTol)
        return std::numeric_limits<double>::infinity();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rs(rho.matrix(), Eigen::EigenvaluesOnly);
    if (rs.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed to converge");
    double trace_rho_log_rho = 0.0;
    for (Eigen::Index i = 0; i < rs.eigenvalues().size(); ++i) {
        const double p = rs.eigenvalues()(i);
        if (p > kEntropyFloor) trace_rho_log_rho += p * std::log(p);
    }
    return trace_rho_log_rho - trace_rho_log_sigma;
}

} // namespace qmaxent
