#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmaxent/pauli.hpp"

namespace qmaxent {

/// Knobs of the iterative solvers. All exposed through the CLI.
struct SolverOptions {
    double tolerance_eps = 1e-8; // stop when max constraint residual is below this
    int max_iterations = 5000;
    double lambda_cap = 200.0;   // stop when ||lambda||_inf reaches this
    int history_size = 10;       // quasi-Newton memory
    unsigned long long seed = 0; // reserved; the solve path is deterministic
};

/// One point of the dual problem: multipliers plus everything derived from
/// them. sigma always has the Boltzmann form exp(-sum lambda_i O_i)/Z.
struct DualPoint {
    Eigen::VectorXd lambdas;      // aligned with ConstraintSet.basis
    DensityMatrix sigma;
    double log_z;                 // log tr exp(-sum lambda_i O_i)
    Eigen::VectorXd expectations; // <O_i> under sigma
    double objective;             // D(lambda) = log_z + lambda . c
};

struct SolveReport {
    DualPoint dual_point;
    int iterations;
    double final_marginal_error;      // max region trace distance, from targets alone
    double final_constraint_residual; // max_i |c_i - <O_i>|
    double s_rec;                     // von Neumann entropy of sigma, nats
    bool converged;
    double effective_beta;            // ||lambda||_inf, diagnostic for the pure regime
    bool hit_lambda_cap;
};

/// Convex dual objective D(lambda) = log tr exp(-sum lambda_i O_i) +
/// sum_i lambda_i c_i, with gradient_i = c_i - <O_i>_sigma(lambda).
/// Overflow-safe via a spectral shift before exponentiating.
std::pair<double, Eigen::VectorXd> dual_objective(const Eigen::VectorXd& lambdas,
                                                  const ConstraintSet& constraints);

/// Full dual data (including sigma) at a multiplier vector.
DualPoint dual_point_at(const Eigen::VectorXd& lambdas, const ConstraintSet& constraints);

/// Minimizes the dual from lambda = 0. Stops at the residual tolerance, at
/// the multiplier cap (near-pure targets push lambda toward infinity), or at
/// the iteration budget; `converged` reflects the final residual only.
SolveReport solve(const ConstraintSet& constraints, const SolverOptions& opts = {});

struct SweepEntry {
    int R;
    std::optional<SolveReport> report; // empty when this entry failed
    std::string error;                 // failure reason, empty on success
};

/// One solve per window size using intervals(layout, R). Failures are
/// recorded per entry; the sweep continues.
std::vector<SweepEntry> reconstruction_entropy_sweep(const DensityMatrix& rho,
                                                     const std::vector<int>& r_values,
                                                     const SolverOptions& opts = {});

} // namespace qmaxent
