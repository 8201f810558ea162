#include "qmaxent/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmaxent/detail/lbfgs.hpp"

namespace qmaxent {

namespace {

constexpr double kZeroModeTol = 1e-12;

double softplus(double x) { // log(1 + e^x), overflow-safe
    return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

double fermi(double e) { // 1/(e^e + 1), overflow-safe
    if (e >= 0.0) {
        const double t = std::exp(-e);
        return t / (1.0 + t);
    }
    return 1.0 / (1.0 + std::exp(e));
}

} // namespace

// ============================ ring & correlations ===========================

std::vector<double> FermionRing::momenta() const {
    if (length < 2) throw DomainError("ring needs at least 2 sites");
    std::vector<double> ks(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n)
        ks[static_cast<std::size_t>(n)] =
            2.0 * std::numbers::pi * (n + 0.5) / static_cast<double>(length);
    return ks;
}

double FermionRing::dispersion(double k) const { return -2.0 * hopping * std::cos(k); }

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd g) : g_(std::move(g)) {
    if (g_.rows() != g_.cols() || g_.rows() < 1)
        throw DomainError("correlation matrix must be square and non-empty");
    const double scale = std::max(1.0, g_.cwiseAbs().maxCoeff());
    if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvariantError("correlation matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed on a correlation matrix");
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (lo < -1e-10 || hi > 1.0 + 1e-10)
        throw InvariantError("correlation eigenvalues leave [0, 1]: [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

CorrelationMatrix CorrelationMatrix::toeplitz(const std::vector<double>& profile) {
    const int L = static_cast<int>(profile.size());
    if (L < 1) throw DomainError("empty separation profile");
    Eigen::MatrixXd g(L, L);
    for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y)
            g(x, y) = profile[static_cast<std::size_t>(std::abs(x - y))];
    return CorrelationMatrix(std::move(g));
}

double CorrelationMatrix::separation_average(int delta) const {
    const int L = size();
    if (delta < 0 || delta >= L)
        throw DomainError("separation must lie in [0, L-1]");
    double sum = 0.0;
    for (int x = 0; x + delta < L; ++x) sum += g_(x, x + delta);
    return sum / static_cast<double>(L - delta);
}

double GaussianCouplings::dispersion(double k) const {
    double e = 0.0;
    for (Eigen::Index d = 0; d < lambdas.size(); ++d)
        e += 2.0 * lambdas(d) * std::cos(static_cast<double>(d) * k);
    return e;
}

CorrelationMatrix ground_correlations(const FermionRing& ring) {
    if (!(ring.hopping > 0.0)) throw DomainError("hopping amplitude must be positive");
    const std::vector<double> ks = ring.momenta();
    const int L = ring.length;
    std::vector<double> profile(static_cast<std::size_t>(L), 0.0);
    for (int d = 0; d < L; ++d) {
        double sum = 0.0;
        for (double k : ks) {
            const double e = ring.dispersion(k);
            const double occ = e < -kZeroModeTol ? 1.0
                               : e > kZeroModeTol ? 0.0
                                                  : 0.5;
            sum += occ * std::cos(k * d); // sine parts cancel pairwise
        }
        profile[static_cast<std::size_t>(d)] = sum / static_cast<double>(L);
    }
    return CorrelationMatrix::toeplitz(profile);
}

CorrelationMatrix reconstructed_correlations(const GaussianCouplings& couplings, int L) {
    if (L < 2) throw DomainError("ring needs at least 2 sites");
    if (couplings.lambdas.size() < 1) throw DomainError("couplings must include lambda_0");
    if (!couplings.lambdas.allFinite()) throw DomainError("couplings must be finite");
    FermionRing grid{L, 1.0};
    const std::vector<double> ks = grid.momenta();
    std::vector<double> profile(static_cast<std::size_t>(L), 0.0);
    for (int d = 0; d < L; ++d) {
        double sum = 0.0;
        for (double k : ks) sum += fermi(couplings.dispersion(k)) * std::cos(k * d);
        profile[static_cast<std::size_t>(d)] = sum / static_cast<double>(L);
    }
    return CorrelationMatrix::toeplitz(profile);
}

// ================================ fitting ===================================

FermionFitReport fit_couplings(const std::vector<std::pair<int, double>>& window, int L,
                               const SolverOptions& opts) {
    if (L < 2) throw DomainError("ring needs at least 2 sites");
    if (!(opts.tolerance_eps > 0.0)) throw DomainError("tolerance must be positive");
    if (!(opts.lambda_cap > 0.0)) throw DomainError("coupling cap must be positive");

    std::vector<std::pair<int, double>> sorted = window;
    std::sort(sorted.begin(), sorted.end());
    const int R = static_cast<int>(sorted.size()) - 1;
    if (R < 0) throw DomainError("empty target window");
    if (R >= L) throw DomainError("window exceeds the ring size");
    for (int d = 0; d <= R; ++d) {
        if (sorted[static_cast<std::size_t>(d)].first != d)
            throw DomainError("window must contain each separation 0..R exactly once");
        if (std::abs(sorted[static_cast<std::size_t>(d)].second) > 1.0 + 1e-12)
            throw DomainError("correlation targets must lie in [-1, 1]");
    }

    FermionRing grid{L, 1.0};
    const std::vector<double> ks = grid.momenta();
    Eigen::VectorXd targets(R + 1);
    for (int d = 0; d <= R; ++d) targets(d) = sorted[static_cast<std::size_t>(d)].second;

    // Per-site dual: value = (1/2L) sum_k log(1+e^{-E~_k}) + lambda . targets,
    // gradient_d = targets_d - G~_d, so the gradient IS the residual vector.
    auto objective = [&](const Eigen::VectorXd& lambda, Eigen::VectorXd& grad) {
        double value = 0.0;
        grad = targets;
        for (double k : ks) {
            double e = 0.0;
            for (int d = 0; d <= R; ++d) e += 2.0 * lambda(d) * std::cos(d * k);
            value += softplus(-e);
            const double nu = fermi(e);
            for (int d = 0; d <= R; ++d) grad(d) -= nu * std::cos(d * k) / L;
        }
        value /= 2.0 * L;
        value += lambda.dot(targets);
        return value;
    };

    // Quasi-Newton runs until the value plateaus into roundoff; the exact-
    // Hessian endgame below then works from gradient information alone, so
    // interior optima stop at the noise floor while boundary targets ride
    // the couplings all the way to the cap.
    const double grad_floor = 1e-15 * std::max(16, L); // summation noise scale
    detail::LbfgsOptions lopts;
    lopts.history = opts.history_size;
    lopts.max_iterations = opts.max_iterations;
    lopts.grad_tol = grad_floor;
    lopts.x_cap = opts.lambda_cap;
    lopts.stall_tol = 1e-13;

    detail::LbfgsResult run = detail::lbfgs_minimize(
        objective, Eigen::VectorXd::Zero(R + 1).eval(), lopts);

    // Damped Newton steps judged purely by gradient decrease: the gradient is
    // the residual vector and stays O(1)-scaled long after dual-value
    // differences sink under evaluation roundoff. In momentum space the
    // Hessian is explicit and positive semidefinite,
    //   H_{dd'} = (2/L) sum_k cos(dk) cos(d'k) nu_k (1 - nu_k).
    Eigen::VectorXd x = std::move(run.x);
    Eigen::VectorXd grad = std::move(run.gradient);
    int iterations = run.iterations;
    double grad_inf = grad.lpNorm<Eigen::Infinity>();
    double mu = 1e-8; // Levenberg damping, relative to the Hessian scale
    Eigen::VectorXd cosines(R + 1);
    while (iterations < opts.max_iterations && grad_inf > grad_floor
           && x.lpNorm<Eigen::Infinity>() < opts.lambda_cap) {
        Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(R + 1, R + 1);
        for (double k : ks) {
            double e = 0.0;
            for (int d = 0; d <= R; ++d) {
                cosines(d) = std::cos(d * k);
                e += 2.0 * x(d) * cosines(d);
            }
            const double nu = fermi(e);
            const double w = 2.0 * nu * (1.0 - nu) / L;
            if (w > 0.0) hessian.noalias() += w * cosines * cosines.transpose();
        }
        // Solve on the active coordinates only. Gradient entries at the noise
        // floor carry no descent information, and keeping them in the system
        // lets the off-diagonal curvature steer couplings that the data no
        // longer constrains (the error then compounds every step).
        std::vector<int> active;
        for (int d = 0; d <= R; ++d)
            if (std::abs(grad(d)) > grad_floor) active.push_back(d);
        const int na = static_cast<int>(active.size());
        Eigen::MatrixXd h_active(na, na);
        Eigen::VectorXd rhs(na);
        for (int a = 0; a < na; ++a) {
            rhs(a) = -grad(active[static_cast<std::size_t>(a)]);
            for (int b = 0; b < na; ++b)
                h_active(a, b) = hessian(active[static_cast<std::size_t>(a)],
                                         active[static_cast<std::size_t>(b)]);
        }
        const double scale = std::max(h_active.diagonal().maxCoeff(), 1e-300);

        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            Eigen::MatrixXd damped = h_active;
            damped.diagonal().array() += mu * scale;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            if (ldlt.info() != Eigen::Success) {
                mu *= 10.0;
                continue;
            }
            const Eigen::VectorXd sub_step = ldlt.solve(rhs);
            Eigen::VectorXd trial = x;
            for (int a = 0; a < na; ++a) trial(active[static_cast<std::size_t>(a)]) += sub_step(a);
            if (!trial.allFinite()) {
                mu *= 10.0;
                continue;
            }
            const double trial_inf = trial.lpNorm<Eigen::Infinity>();
            if (trial_inf > opts.lambda_cap) trial *= opts.lambda_cap / trial_inf;
            Eigen::VectorXd trial_grad(R + 1);
            objective(trial, trial_grad);
            const double trial_grad_inf = trial_grad.lpNorm<Eigen::Infinity>();
            if (std::isfinite(trial_grad_inf) && trial_grad_inf < grad_inf) {
                x = std::move(trial);
                grad = std::move(trial_grad);
                grad_inf = trial_grad_inf;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        ++iterations;
        if (!accepted) break; // damping exhausted; stop at the best point
    }

    auto window_residual = [&](const CorrelationMatrix& rec) {
        double r = 0.0;
        for (int d = 0; d <= R; ++d)
            r = std::max(r, std::abs(rec.separation_average(d) - targets(d)));
        return r;
    };
    x = x.cwiseMax(-opts.lambda_cap).cwiseMin(opts.lambda_cap);
    CorrelationMatrix reconstructed = reconstructed_correlations(GaussianCouplings{x}, L);
    double residual = window_residual(reconstructed);

    // Once the walk freezes every occupation, finite shifts along some
    // couplings stop affecting the window at all -- the filling coupling of
    // a half-filled sea, for instance -- and the optimizer's endpoint
    // inherits whatever offset roundoff fed those directions on the way.
    // Report the minimal representative: zero every coupling the window
    // cannot distinguish from zero.
    for (int d = 0; d <= R; ++d) {
        if (x(d) == 0.0) continue;
        Eigen::VectorXd pruned = x;
        pruned(d) = 0.0;
        CorrelationMatrix pruned_rec = reconstructed_correlations(GaussianCouplings{pruned}, L);
        const double pruned_residual = window_residual(pruned_rec);
        if (pruned_residual <= residual + 1e-12) {
            x = std::move(pruned);
            reconstructed = std::move(pruned_rec);
            residual = pruned_residual;
        }
    }

    // Boundary targets put the optimum at infinity along a recession ray, and
    // the endgame stops where the gradient sinks into evaluation noise. If
    // stretching the endpoint out to the cap fits the window no worse, the
    // capped endpoint is the honest summary of that ray; anything short of a
    // flat direction makes the stretched residual blow up and is kept as-is.
    const double x_inf = x.lpNorm<Eigen::Infinity>();
    bool at_cap = x_inf >= opts.lambda_cap;
    if (x_inf > 0.0 && !at_cap) {
        Eigen::VectorXd stretched = (x * (opts.lambda_cap / x_inf))
                                        .cwiseMax(-opts.lambda_cap)
                                        .cwiseMin(opts.lambda_cap);
        CorrelationMatrix stretched_rec =
            reconstructed_correlations(GaussianCouplings{stretched}, L);
        const double stretched_residual = window_residual(stretched_rec);
        if (stretched_residual <= residual + 1e-12) {
            x = std::move(stretched);
            reconstructed = std::move(stretched_rec);
            residual = stretched_residual;
            at_cap = true;
        }
    }

    return FermionFitReport{
        GaussianCouplings{std::move(x)},
        residual,
        gaussian_entropy(reconstructed),
        iterations,
        residual <= opts.tolerance_eps,
        at_cap,
    };
}

double gaussian_entropy(const CorrelationMatrix& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed on a correlation matrix");
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double raw = es.eigenvalues()(i);
        if (raw < -1e-8 || raw > 1.0 + 1e-8)
            throw DomainError("invalid correlation matrix: occupation " + std::to_string(raw));
        const double nu = std::clamp(raw, 0.0, 1.0);
        if (nu > 1e-14) entropy -= nu * std::log(nu);
        if (1.0 - nu > 1e-14) entropy -= (1.0 - nu) * std::log(1.0 - nu);
    }
    return entropy;
}

} // namespace qmaxent
