#pragma once

#include "config.hpp"

namespace qmaxent::cli {

struct CommandResult {
    int exit_code = 0;       // 0 converged, 2 not converged, 1 error (thrown)
    ordered_json document;
};

/// Build model -> extract local data -> solve -> certify, in one run.
CommandResult cmd_reconstruct(const RunConfig& config);

/// One reconstruction per window size, array ordered by R, with a
/// monotonicity verdict for S_rec(R). `jobs` sizes the worker pool.
CommandResult cmd_sweep(const RunConfig& config, int jobs = 1);

/// Evaluate the certificate for a stored state against a marginal file.
CommandResult cmd_certify(const RunConfig& config);

/// Windowed free-fermion fit (closed-form Gaussian pipeline).
CommandResult cmd_fermion(const RunConfig& config);

} // namespace qmaxent::cli
