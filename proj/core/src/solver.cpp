#include "qmaxent/solver.hpp"

#include <algorithm>
#include <cmath>

#include "qmaxent/detail/lbfgs.hpp"

namespace qmaxent {

namespace {

// Shared evaluation core: one eigendecomposition of A = -sum lambda_i O_i
// per call yields log Z, the Boltzmann weights, sigma, and all expectations.
struct DualEvaluation {
    double log_z = 0.0;
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::VectorXd expectations;
    Eigen::VectorXd levels;     // eigenvalues of A, ascending
    Eigen::VectorXd weights;    // Boltzmann eigenweights, normalized
    Eigen::MatrixXcd vectors;   // eigenvectors of A
    Eigen::MatrixXcd sigma;
};

DualEvaluation evaluate_dual(const Eigen::VectorXd& lambdas, const ConstraintSet& cs) {
    if (lambdas.size() != cs.size())
        throw DomainError("multiplier vector length does not match the basis");
    const auto dim = static_cast<Eigen::Index>(cs.layout.dim());

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < cs.size(); ++i)
        cs.basis[static_cast<std::size_t>(i)].add_scaled(a, -lambdas(i));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed in the dual evaluation");

    DualEvaluation out;
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double shift = ev.maxCoeff();
    Eigen::VectorXd w = (ev.array() - shift).exp();
    const double norm = w.sum();
    out.log_z = shift + std::log(norm);
    out.levels = ev;
    out.weights = w / norm;
    out.vectors = es.eigenvectors();
    out.sigma = out.vectors * out.weights.asDiagonal() * out.vectors.adjoint();

    out.expectations.resize(cs.size());
    for (int i = 0; i < cs.size(); ++i)
        out.expectations(i) =
            cs.basis[static_cast<std::size_t>(i)].trace_with(out.sigma).real();

    out.value = out.log_z + lambdas.dot(cs.targets);
    out.gradient = cs.targets - out.expectations;
    return out;
}

DualPoint make_dual_point(const Eigen::VectorXd& lambdas, const ConstraintSet& cs,
                          DualEvaluation&& ev) {
    return DualPoint{
        lambdas,
        DensityMatrix::from_eigenbasis(cs.layout, ev.vectors, ev.weights),
        ev.log_z,
        std::move(ev.expectations),
        ev.value,
    };
}

// ========================= exact-Hessian endgame ============================
//
// Quasi-Newton progress dies near sharp optima: the dual value is a
// difference of log Z and lambda.c, both of which grow with |lambda|, so
// once the remaining decrease per step sinks under the evaluation roundoff
// (~|log Z| * 1e-16) a value-based line search cannot see descent any more.
// The gradient c - <O> stays O(1)-scaled and precise, so the endgame
// switches to damped Newton steps judged purely by gradient-norm decrease.

// Work/memory gate: the Hessian build materializes one dim x dim block per
// constraint, m * dim^2 complex entries in total.
constexpr std::size_t kHessianElementCap = std::size_t{1} << 25;

bool hessian_affordable(const ConstraintSet& cs) {
    const auto dim = cs.layout.dim();
    return static_cast<std::size_t>(cs.size()) * dim * dim <= kHessianElementCap;
}

// Hessian of the dual: the Kubo-Mori covariance of the basis operators,
//   H_ij = sum_{p,q} Otil_i[p,q] conj(Otil_j[p,q]) K_pq - <O_i><O_j>,
// where Otil = V^dag O V in the eigenbasis of A and K is the divided
// difference of exp on the spectrum, normalized by Z:
//   K_pq = (pi_p - pi_q) / (a_p - a_q),  K_pp = pi_p.
// K >= 0, so stacking rows B_i = Otil_i .* sqrt(K) makes H = Re(B B^dag)
// minus the mean term, manifestly symmetric positive semidefinite.
Eigen::MatrixXd dual_hessian(const DualEvaluation& ev, const ConstraintSet& cs) {
    const Eigen::Index dim = ev.vectors.rows();
    const int m = cs.size();

    Eigen::MatrixXd kernel(dim, dim);
    const double level_scale = std::max(1.0, ev.levels.cwiseAbs().maxCoeff());
    for (Eigen::Index p = 0; p < dim; ++p) {
        for (Eigen::Index q = 0; q <= p; ++q) {
            const double da = ev.levels(p) - ev.levels(q);
            double k;
            if (std::abs(da) <= 1e-13 * level_scale) {
                k = 0.5 * (ev.weights(p) + ev.weights(q));
            } else {
                k = (ev.weights(p) - ev.weights(q)) / da;
            }
            k = std::max(k, 0.0); // roundoff guard; exp is increasing
            kernel(p, q) = k;
            kernel(q, p) = k;
        }
    }
    const Eigen::MatrixXd root = kernel.cwiseSqrt();

    Eigen::MatrixXcd rows(m, dim * dim);
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < m; ++i) {
        op.setZero();
        cs.basis[static_cast<std::size_t>(i)].add_scaled(op, 1.0);
        const Eigen::MatrixXcd tilted = ev.vectors.adjoint() * (op * ev.vectors);
        const Eigen::MatrixXcd weighted = tilted.cwiseProduct(root);
        rows.row(i) = Eigen::Map<const Eigen::VectorXcd>(weighted.data(), dim * dim);
    }

    Eigen::MatrixXd h = (rows * rows.adjoint()).real();
    h.noalias() -= ev.expectations * ev.expectations.transpose();
    return h;
}

struct NewtonOutcome {
    Eigen::VectorXd x;
    int iterations = 0;
};

NewtonOutcome newton_refine(Eigen::VectorXd x, const ConstraintSet& cs,
                            const SolverOptions& opts, int budget) {
    NewtonOutcome out;
    DualEvaluation ev = evaluate_dual(x, cs);
    double grad_inf = ev.gradient.lpNorm<Eigen::Infinity>();
    double mu = 1e-8; // Levenberg damping, relative to the Hessian scale

    while (out.iterations < budget && grad_inf > opts.tolerance_eps
           && x.lpNorm<Eigen::Infinity>() < opts.lambda_cap) {
        const Eigen::MatrixXd hessian = dual_hessian(ev, cs);
        const double scale = std::max(hessian.diagonal().maxCoeff(), 1e-300);

        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            Eigen::MatrixXd damped = hessian;
            damped.diagonal().array() += mu * scale;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            if (ldlt.info() != Eigen::Success) {
                mu *= 10.0;
                continue;
            }
            const Eigen::VectorXd step = ldlt.solve(-ev.gradient);
            if (!step.allFinite()) {
                mu *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = x + step;
            DualEvaluation trial_ev = evaluate_dual(trial, cs);
            const double trial_grad = trial_ev.gradient.lpNorm<Eigen::Infinity>();
            if (std::isfinite(trial_grad) && trial_grad < grad_inf) {
                x = trial;
                ev = std::move(trial_ev);
                grad_inf = trial_grad;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        ++out.iterations;
        if (!accepted) {
            break; // damping exhausted; report the best point honestly
        }
    }
    out.x = std::move(x);
    return out;
}

} // namespace

std::pair<double, Eigen::VectorXd> dual_objective(const Eigen::VectorXd& lambdas,
                                                  const ConstraintSet& constraints) {
    DualEvaluation ev = evaluate_dual(lambdas, constraints);
    return {ev.value, std::move(ev.gradient)};
}

DualPoint dual_point_at(const Eigen::VectorXd& lambdas, const ConstraintSet& constraints) {
    return make_dual_point(lambdas, constraints, evaluate_dual(lambdas, constraints));
}

SolveReport solve(const ConstraintSet& constraints, const SolverOptions& opts) {
    if (!(opts.tolerance_eps > 0.0)) throw DomainError("tolerance must be positive");
    if (opts.max_iterations < 0) throw DomainError("iteration budget must be nonnegative");
    if (!(opts.lambda_cap > 0.0)) throw DomainError("multiplier cap must be positive");
    if (opts.history_size < 1) throw DomainError("history size must be at least 1");

    const bool newton_available = hessian_affordable(constraints);

    detail::LbfgsOptions lopts;
    lopts.history = opts.history_size;
    // With the Newton endgame standing by, quasi-Newton is only a warm-up:
    // bail out as soon as steps collapse, and cap its share of the budget
    // outright -- on ill-conditioned duals it creeps for thousands of
    // iterations without ever tripping the stall test.
    constexpr int kWarmupBudget = 200;
    lopts.max_iterations =
        newton_available ? std::min(opts.max_iterations, kWarmupBudget) : opts.max_iterations;
    lopts.grad_tol = opts.tolerance_eps;
    lopts.x_cap = opts.lambda_cap;
    lopts.stall_tol = newton_available ? 1e-13 : 0.0;

    auto objective = [&constraints](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        DualEvaluation ev = evaluate_dual(x, constraints);
        grad = ev.gradient;
        return ev.value;
    };
    detail::LbfgsResult run = detail::lbfgs_minimize(
        objective, Eigen::VectorXd::Zero(constraints.size()).eval(), lopts);

    int iterations = run.iterations;
    Eigen::VectorXd lambdas = std::move(run.x);
    if (newton_available && iterations < opts.max_iterations
        && run.gradient.lpNorm<Eigen::Infinity>() > opts.tolerance_eps
        && lambdas.lpNorm<Eigen::Infinity>() < opts.lambda_cap) {
        NewtonOutcome refined = newton_refine(std::move(lambdas), constraints, opts,
                                              opts.max_iterations - iterations);
        lambdas = std::move(refined.x);
        iterations += refined.iterations;
    }

    DualEvaluation final_ev = evaluate_dual(lambdas, constraints);
    const double residual =
        final_ev.gradient.size() ? final_ev.gradient.lpNorm<Eigen::Infinity>() : 0.0;
    const double lambda_inf = lambdas.size() ? lambdas.lpNorm<Eigen::Infinity>() : 0.0;

    SolveReport report{
        make_dual_point(lambdas, constraints, std::move(final_ev)),
        iterations,
        0.0, // final_marginal_error, filled below
        residual,
        0.0, // s_rec, filled below
        residual <= opts.tolerance_eps,
        lambda_inf,
        lambda_inf >= opts.lambda_cap,
    };
    report.s_rec = von_neumann_entropy(report.dual_point.sigma);
    report.final_marginal_error =
        marginal_error(report.dual_point.sigma, region_targets(constraints));
    return report;
}

std::vector<SweepEntry> reconstruction_entropy_sweep(const DensityMatrix& rho,
                                                     const std::vector<int>& r_values,
                                                     const SolverOptions& opts) {
    std::vector<SweepEntry> entries;
    entries.reserve(r_values.size());
    for (int r : r_values) {
        SweepEntry entry{r, std::nullopt, ""};
        try {
            ConstraintSet cs = extract_constraints(rho, intervals(rho.layout(), r));
            entry.report = solve(cs, opts);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace qmaxent
