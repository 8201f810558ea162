#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmaxent/solver.hpp"

namespace qmaxent {

/// Free fermions hopping on a ring of L sites with amplitude w:
/// H = -w sum_x (c^dag_x c_{x+1} + h.c.), dispersion E_k = -2w cos k.
///
/// Momenta are taken on the half-integer grid k_n = 2*pi*(n + 1/2)/L. This
/// is the quantization the ring's even-fermion-parity sector actually has,
/// and it keeps the Fermi sea unique at half filling for every even L (the
/// integer grid has zero-energy modes whenever L is a multiple of 4).
struct FermionRing {
    int length = 2;
    double hopping = 1.0;

    std::vector<double> momenta() const;
    double dispersion(double k) const;
};

/// Real symmetric matrix of two-point functions G_{x,y} = <c^dag_x c_y>.
/// Eigenvalues are mode occupations and must lie in [0, 1] (within 1e-10).
class CorrelationMatrix {
  public:
    explicit CorrelationMatrix(Eigen::MatrixXd g);

    /// Symmetric Toeplitz matrix from a separation profile:
    /// G_{x,y} = profile[|x - y|]. On the half-integer momentum grid the
    /// Fourier kernel flips sign when a separation wraps around the ring
    /// (e^{ik(d-L)} = -e^{ikd}), so translation-invariant states here are
    /// Toeplitz in the direct separation rather than circulant in d mod L.
    static CorrelationMatrix toeplitz(const std::vector<double>& profile);

    const Eigen::MatrixXd& matrix() const { return g_; }
    int size() const { return static_cast<int>(g_.rows()); }

    /// Average of G_{x, x+delta} over the pairs at direct separation delta;
    /// equals the separation profile exactly for Toeplitz matrices.
    double separation_average(int delta) const;

  private:
    Eigen::MatrixXd g_;
};

/// Translation-invariant quadratic couplings lambda_0..lambda_R defining the
/// fitted dispersion E~_k = 2 sum_delta lambda_delta cos(delta k).
struct GaussianCouplings {
    Eigen::VectorXd lambdas;

    int window() const { return static_cast<int>(lambdas.size()) - 1; }
    double dispersion(double k) const;
};

struct FermionFitReport {
    GaussianCouplings couplings;
    double residual;   // max_delta |G~_delta - G_target_delta|
    double s_rec;      // Gaussian entropy of the fitted state, nats
    int iterations;
    bool converged;    // residual <= tolerance
    bool hit_lambda_cap;
};

/// Ground-state (Fermi sea) correlations: modes with E_k < 0 filled, E_k = 0
/// filled with weight 1/2 (particle-hole symmetric convention).
CorrelationMatrix ground_correlations(const FermionRing& ring);

/// Thermal-form correlations G~ of the coupling ansatz on L sites:
/// G~_{x,y} = (1/L) sum_k e^{ik(x-y)} / (e^{E~_k} + 1).
CorrelationMatrix reconstructed_correlations(const GaussianCouplings& couplings, int L);

/// Fits couplings to a window of separation targets {(delta, G_delta)},
/// delta = 0..R, by minimizing the Gaussian dual (per-site normalization)
///   F(lambda) = (1/(2L)) sum_k log(1 + e^{-E~_k}) + sum_delta lambda_delta G_delta,
/// whose gradient is exactly G_target - G~(lambda). Runs until an interior
/// optimum (gradient or step collapse), the coupling cap, or the iteration
/// budget; pure-sea targets drive the couplings to the cap. `converged`
/// means the final residual is within opts.tolerance_eps — an infeasible
/// window yields converged = false, never a fabricated fit.
FermionFitReport fit_couplings(const std::vector<std::pair<int, double>>& window, int L,
                               const SolverOptions& opts = {});

/// Entropy of the Gaussian state with correlation matrix G, in nats:
/// -sum_k [nu_k log nu_k + (1-nu_k) log(1-nu_k)] over the occupations nu_k.
double gaussian_entropy(const CorrelationMatrix& g);

} // namespace qmaxent
