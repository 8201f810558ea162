#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qmaxent/errors.hpp"

// Limited-memory quasi-Newton descent with Armijo backtracking, shared by the
// dense dual solver and the Gaussian coupling fitter. Internal header.

namespace qmaxent::detail {

enum class LbfgsStop {
    GradientTol,   // ||grad||_inf <= grad_tol
    Cap,           // ||x||_inf reached x_cap
    MaxIterations, // iteration budget exhausted
    Stall,         // accepted steps shrank below stall_tol
    LineSearchFail // no sufficient-decrease step found
};

struct LbfgsOptions {
    int history = 10;
    int max_iterations = 5000;
    double grad_tol = 1e-8;
    double x_cap = std::numeric_limits<double>::infinity();
    double stall_tol = 0.0; // 0 disables the stall criterion
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    LbfgsStop stop = LbfgsStop::GradientTol;
};

/// Minimizes a smooth convex objective. `objective(x, grad)` must fill the
/// gradient and return the value. Deterministic given inputs.
template <class F>
LbfgsResult lbfgs_minimize(F&& objective, Eigen::VectorXd x0, const LbfgsOptions& opts) {
    constexpr double kArmijoC1 = 1e-4;
    constexpr double kAlphaFloor = 1e-16;
    constexpr double kCurvatureDamping = 1e-10;

    const Eigen::Index n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);
    res.gradient.resize(n);
    res.value = objective(res.x, res.gradient);
    if (!std::isfinite(res.value))
        throw NumericalError("objective is not finite at the starting point");

    std::deque<Eigen::VectorXd> mem_s, mem_y;
    std::deque<double> mem_rho;
    Eigen::VectorXd grad_new(n), direction(n);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        const double grad_inf = res.gradient.size() ? res.gradient.lpNorm<Eigen::Infinity>() : 0.0;
        if (grad_inf <= opts.grad_tol) {
            res.stop = LbfgsStop::GradientTol;
            return res;
        }
        if (res.x.size() && res.x.lpNorm<Eigen::Infinity>() >= opts.x_cap) {
            res.stop = LbfgsStop::Cap;
            return res;
        }

        // Two-loop recursion for the quasi-Newton direction.
        direction = -res.gradient;
        const std::size_t m = mem_s.size();
        std::vector<double> alpha(m);
        for (std::size_t i = m; i-- > 0;) {
            alpha[i] = mem_rho[i] * mem_s[i].dot(direction);
            direction -= alpha[i] * mem_y[i];
        }
        if (m > 0) {
            const double yy = mem_y.back().squaredNorm();
            const double sy = mem_s.back().dot(mem_y.back());
            direction *= (sy + kCurvatureDamping) / (yy + kCurvatureDamping);
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double beta = mem_rho[i] * mem_y[i].dot(direction);
            direction += (alpha[i] - beta) * mem_s[i];
        }
        double slope = res.gradient.dot(direction);
        if (!(slope < 0.0)) { // not a descent direction; fall back to steepest
            direction = -res.gradient;
            slope = -res.gradient.squaredNorm();
        }

        // Armijo backtracking from a unit step.
        double alpha_step = 1.0;
        double value_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        while (alpha_step >= kAlphaFloor) {
            value_new = objective(res.x + alpha_step * direction, grad_new);
            if (!std::isfinite(value_new))
                throw NumericalError(
                    "objective became non-finite during line search at |x|_inf = " +
                    std::to_string((res.x + alpha_step * direction).lpNorm<Eigen::Infinity>()));
            if (value_new <= res.value + kArmijoC1 * alpha_step * slope) {
                accepted = true;
                break;
            }
            alpha_step *= 0.5;
        }
        if (!accepted) {
            res.stop = LbfgsStop::LineSearchFail;
            return res;
        }

        Eigen::VectorXd step = alpha_step * direction;
        Eigen::VectorXd grad_diff = grad_new - res.gradient;
        const double curvature = step.dot(grad_diff);
        if (curvature > 0.0) {
            mem_s.push_back(step);
            mem_y.push_back(grad_diff);
            mem_rho.push_back(1.0 / (curvature + kCurvatureDamping));
            if (static_cast<int>(mem_s.size()) > opts.history) {
                mem_s.pop_front();
                mem_y.pop_front();
                mem_rho.pop_front();
            }
        }

        res.x += step;
        res.value = value_new;
        res.gradient = grad_new;
        res.iterations = iter + 1;

        if (opts.stall_tol > 0.0 &&
            step.lpNorm<Eigen::Infinity>() <
                opts.stall_tol * std::max(1.0, res.x.lpNorm<Eigen::Infinity>())) {
            res.stop = LbfgsStop::Stall;
            return res;
        }
    }
    res.stop = LbfgsStop::MaxIterations;
    return res;
}

} // namespace qmaxent::detail
