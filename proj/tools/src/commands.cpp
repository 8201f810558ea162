#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "qmaxent/certify.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/fermion.hpp"
#include "qmaxent/json_io.hpp"
#include "qmaxent/models.hpp"
#include "qmaxent/solver.hpp"

namespace qmaxent::cli {
namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DomainError("cannot open file for reading: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DomainError("cannot open file for writing: " + path);
    }
    out << content;
    if (!out) {
        throw DomainError("failed while writing: " + path);
    }
}

ordered_json json_from_file(const std::string& path) {
    try {
        return ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& err) {
        throw DomainError("invalid JSON in " + path + ": " + err.what());
    }
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

ordered_json solver_to_json(const SolveReport& report) {
    ordered_json out;
    out["iterations"] = report.iterations;
    out["converged"] = report.converged;
    out["final_constraint_residual"] = report.final_constraint_residual;
    out["final_marginal_error"] = report.final_marginal_error;
    out["objective"] = report.dual_point.objective;
    out["log_z"] = report.dual_point.log_z;
    out["effective_beta"] = report.effective_beta;
    out["hit_lambda_cap"] = report.hit_lambda_cap;
    out["num_constraints"] = static_cast<int>(report.dual_point.lambdas.size());
    return out;
}

ordered_json certificate_to_json(const CertificateReport& report) {
    ordered_json out;
    out["s_rec_eps"] = report.s_rec_eps;
    out["s_rho"] = report.s_rho;
    out["lhs"] = report.lhs;
    out["rhs"] = report.rhs;
    out["satisfied"] = report.satisfied;
    out["slack"] = report.slack;
    out["rho_known"] = report.rho_known;
    out["distance_bound"] = report.distance_bound;
    out["maximality_violated"] = report.maximality_violated;
    return out;
}

ordered_json ground_bounds_to_json(const GroundBoundReport& report) {
    ordered_json out;
    out["kind"] = "ground";
    out["energy_excess"] = report.energy_excess;
    out["eps_bound"] = report.eps_bound;
    out["gap"] = report.gap;
    out["excited_weight_bound"] = report.excited_weight_bound;
    out["overlap_lower_bound"] = report.overlap_lower_bound;
    return out;
}

ordered_json topo_bounds_to_json(const TopoBoundReport& report) {
    ordered_json out;
    out["kind"] = "topological";
    out["n_ground"] = report.n_ground;
    out["gap"] = report.gap;
    out["p_high"] = report.p_high;
    out["p_high_bound"] = report.p_high_bound;
    out["fannes_term"] = report.fannes_term;
    out["final_bound"] = report.final_bound;
    return out;
}

ordered_json solver_options_to_json(const SolverOptions& opts) {
    ordered_json out;
    out["tolerance_eps"] = opts.tolerance_eps;
    out["max_iterations"] = opts.max_iterations;
    out["lambda_cap"] = opts.lambda_cap;
    out["history_size"] = opts.history_size;
    out["seed"] = opts.seed;
    return out;
}

LocalHamiltonian build_hamiltonian(const ModelSpec& model) {
    switch (model.kind) {
    case ModelSpec::Kind::Tfim:
        return build_tfim_chain(model.L, model.J, model.h, model.geometry);
    case ModelSpec::Kind::Toric2x2:
        return build_toric_code_2x2();
    default:
        throw DomainError("model kind does not define a spin Hamiltonian");
    }
}

DensityMatrix build_state(const LocalHamiltonian& hamiltonian, const StateSpec& state) {
    switch (state.kind) {
    case StateSpec::Kind::Ground: {
        const GroundSpace gs = ground_space(hamiltonian);
        if (gs.degeneracy() == 1) {
            return DensityMatrix::pure(hamiltonian.layout(), gs.basis.col(0));
        }
        const Eigen::Index n = gs.basis.cols();
        const Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        return DensityMatrix::from_eigenbasis(hamiltonian.layout(), gs.basis, weights);
    }
    case StateSpec::Kind::Thermal:
        return thermal_state(hamiltonian, state.temperature);
    case StateSpec::Kind::Eigenstate: {
        const Spectrum spec = hamiltonian.assembled().spectrum();
        if (static_cast<Eigen::Index>(state.eigenstate_index) >= spec.eigenvalues.size()) {
            throw DomainError("eigenstate index out of range for Hilbert-space dimension "
                              + std::to_string(spec.eigenvalues.size()));
        }
        return DensityMatrix::pure(hamiltonian.layout(), spec.eigenvectors.col(state.eigenstate_index));
    }
    }
    throw DomainError("unknown state kind");
}

RegionSet build_regions(const RegionSpec& spec, const SystemLayout& layout, int window_override) {
    const int window = window_override > 0 ? window_override : spec.window;
    switch (spec.kind) {
    case RegionSpec::Kind::Intervals:
        return intervals(layout, window);
    case RegionSpec::Kind::Stabilizers:
        return toric_stabilizer_regions(layout);
    case RegionSpec::Kind::Explicit: {
        if (spec.regions.empty()) {
            throw DomainError("explicit region list is empty");
        }
        std::vector<std::vector<int>> checked;
        int max_diameter = 0;
        checked.reserve(spec.regions.size());
        for (const auto& region : spec.regions) {
            checked.push_back(layout.checked_subset(region));
            max_diameter = std::max(max_diameter, layout.diameter(checked.back()));
        }
        return RegionSet{std::move(checked), max_diameter};
    }
    }
    throw DomainError("unknown region kind");
}

bool covered_by_some_region(const std::vector<int>& support, const RegionSet& regions) {
    return std::any_of(regions.regions.begin(), regions.regions.end(),
                       [&](const std::vector<int>& region) {
                           return std::includes(region.begin(), region.end(), support.begin(),
                                                support.end());
                       });
}

/// The energy-excess argument bounds tr((sigma - rho) h_x) piece by piece
/// through region marginals, so every energy piece must sit inside some
/// constraint region: the term supports directly for the chains, and the
/// individual star/plaquette supports for the torus (each grouped cell term
/// splits into two stabilizers whose norms add up to the cell norm).
bool bounds_premise_holds(const ModelSpec& model, const LocalHamiltonian& hamiltonian,
                          const RegionSet& regions) {
    if (model.kind == ModelSpec::Kind::Toric2x2) {
        const RegionSet stabilizers = toric_stabilizer_regions(hamiltonian.layout());
        return std::all_of(
            stabilizers.regions.begin(), stabilizers.regions.end(),
            [&](const std::vector<int>& support) { return covered_by_some_region(support, regions); });
    }
    return std::all_of(hamiltonian.terms().begin(), hamiltonian.terms().end(),
                       [&](const LocalTerm& term) {
                           return covered_by_some_region(term.support, regions);
                       });
}

/// Everything a spin reconstruction produces, before JSON assembly.
struct ReconstructOutcome {
    ordered_json document;
    int exit_code = 0;
    std::optional<ConstraintSet> constraints;
    std::optional<DensityMatrix> sigma;
};

ReconstructOutcome run_spin_reconstruction(const RunConfig& config, int window_override) {
    ReconstructOutcome outcome;
    ordered_json& doc = outcome.document;

    std::optional<LocalHamiltonian> hamiltonian;
    std::optional<DensityMatrix> rho;

    ConstraintSet constraints = [&]() -> ConstraintSet {
        if (config.model.kind == ModelSpec::Kind::MarginalFile) {
            if (window_override > 0) {
                throw DomainError("window sweeps need a model that regenerates marginals; "
                                  "a marginal file fixes the window");
            }
            return constraints_from_json(json_from_file(config.model.path));
        }
        hamiltonian.emplace(build_hamiltonian(config.model));
        rho.emplace(build_state(*hamiltonian, config.state));
        const RegionSet regions =
            build_regions(config.regions, hamiltonian->layout(), window_override);
        return extract_constraints(*rho, regions);
    }();

    const SystemLayout& layout = constraints.layout;
    SolveReport report = solve(constraints, config.solver);
    const DensityMatrix& sigma = report.dual_point.sigma;

    doc["layout"] = layout_to_json(layout);
    doc["window"] = constraints.regions.window;
    doc["num_regions"] = static_cast<int>(constraints.regions.regions.size());
    doc["num_constraints"] = static_cast<int>(constraints.size());
    doc["s_rec"] = report.s_rec;

    if (rho) {
        const double s_rho = von_neumann_entropy(*rho);
        const double distance = trace_norm_distance(sigma, *rho);
        doc["s_rho"] = s_rho;
        doc["trace_distance"] = distance;
        doc["certificate"] = certificate_to_json(certify(sigma, s_rho, &*rho));
    } else {
        doc["s_rho"] = nullptr;
        doc["trace_distance"] = nullptr;
        doc["certificate"] = nullptr;
    }

    doc["model_info"] = nullptr;
    doc["bounds"] = nullptr;
    if (hamiltonian) {
        const GroundSpace gs = ground_space(*hamiltonian);
        ordered_json info;
        info["dim"] = static_cast<int>(layout.dim());
        info["ground_energy"] = gs.energy;
        info["gap"] = gs.gap;
        info["ground_degeneracy"] = gs.degeneracy();
        doc["model_info"] = info;

        // Energy/weight bounds apply to ground-state targets whose energy
        // pieces the constraint regions cover; otherwise a small marginal
        // error simply does not control the energy and no bound is emitted.
        if (config.state.kind == StateSpec::Kind::Ground
            && bounds_premise_holds(config.model, *hamiltonian, constraints.regions)) {
            // The measured marginal error is the honest epsilon for the
            // bounds; floor it so a numerically exact reconstruction still
            // produces a well-defined bound.
            const double eps = std::max(report.final_marginal_error, 1e-15);
            if (gs.degeneracy() >= 2) {
                doc["bounds"] = topo_bounds_to_json(
                    topo_bounds(sigma, *hamiltonian, eps, layout.local_dim()));
            } else {
                doc["bounds"] = ground_bounds_to_json(ground_bounds(sigma, *hamiltonian, eps));
            }
        }
    }

    doc["solver"] = solver_to_json(report);
    doc["lambdas"] = vector_to_json(report.dual_point.lambdas);

    outcome.exit_code = report.converged ? 0 : 2;
    outcome.constraints = std::move(constraints);
    outcome.sigma = sigma;
    return outcome;
}

ordered_json fermion_report_to_json(const FermionRing& grid, const FermionFitReport& report,
                                    const Eigen::VectorXd& targets) {
    ordered_json doc;
    doc["length"] = grid.length;
    doc["hopping"] = grid.hopping;
    doc["window"] = report.couplings.window();
    doc["lambdas"] = vector_to_json(report.couplings.lambdas);
    doc["g_window"] = vector_to_json(targets);
    doc["residual"] = report.residual;
    doc["s_rec"] = report.s_rec;
    doc["iterations"] = report.iterations;
    doc["converged"] = report.converged;
    doc["hit_lambda_cap"] = report.hit_lambda_cap;
    return doc;
}

struct FermionOutcome {
    ordered_json document;
    int exit_code = 0;
};

FermionOutcome run_fermion_fit(const RunConfig& config, int window_override) {
    if (config.state.kind != StateSpec::Kind::Ground) {
        throw DomainError("the fermion pipeline reconstructs ground-state correlations only");
    }
    if (config.regions.kind != RegionSpec::Kind::Intervals) {
        throw DomainError("fermion windows are set through interval regions");
    }
    const FermionRing grid{config.model.L, config.model.w};
    const int window = window_override >= 0 ? window_override : config.regions.window;
    const CorrelationMatrix full = ground_correlations(grid);

    std::vector<std::pair<int, double>> window_targets;
    Eigen::VectorXd targets(window + 1);
    for (int delta = 0; delta <= window; ++delta) {
        targets[delta] = full.separation_average(delta);
        window_targets.emplace_back(delta, targets[delta]);
    }
    const FermionFitReport report = fit_couplings(window_targets, grid.length, config.solver);

    FermionOutcome outcome;
    outcome.document = fermion_report_to_json(grid, report, targets);
    outcome.exit_code = report.converged ? 0 : 2;
    return outcome;
}

std::vector<int> sorted_sweep_windows(const RunConfig& config) {
    if (config.sweep_r.empty()) {
        throw DomainError("sweep command needs a non-empty sweep.R_values list");
    }
    std::vector<int> windows = config.sweep_r;
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    return windows;
}

} // namespace

CommandResult cmd_reconstruct(const RunConfig& config) {
    if (!config.has_model) {
        throw DomainError("reconstruct command needs a model block in the config");
    }
    if (config.model.kind == ModelSpec::Kind::Fermion) {
        throw DomainError("fermion models are handled by the fermion command");
    }
    ReconstructOutcome outcome = run_spin_reconstruction(config, /*window_override=*/-1);

    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "reconstruct";
    doc["config"] = config.echo;
    doc["solver_options"] = solver_options_to_json(config.solver);
    for (auto& item : outcome.document.items()) {
        doc[item.key()] = std::move(item.value());
    }

    if (!config.output.save_marginals.empty()) {
        write_file(config.output.save_marginals,
                   dump_deterministic(constraints_to_json(*outcome.constraints)) + "\n");
    }
    if (!config.output.save_sigma.empty()) {
        write_file(config.output.save_sigma,
                   dump_deterministic(state_to_json(*outcome.sigma)) + "\n");
    }
    return CommandResult{outcome.exit_code, std::move(doc)};
}

CommandResult cmd_sweep(const RunConfig& config, int jobs) {
    if (!config.has_model) {
        throw DomainError("sweep command needs a model block in the config");
    }
    const std::vector<int> windows = sorted_sweep_windows(config);
    const bool fermionic = config.model.kind == ModelSpec::Kind::Fermion;

    std::vector<ordered_json> entries(windows.size());
    std::vector<int> codes(windows.size(), 0);

    auto run_entry = [&](std::size_t slot) {
        const int window = windows[slot];
        ordered_json entry;
        entry["R"] = window;
        try {
            if (fermionic) {
                FermionOutcome out = run_fermion_fit(config, window);
                for (auto& item : out.document.items()) {
                    entry[item.key()] = std::move(item.value());
                }
                codes[slot] = out.exit_code;
            } else {
                ReconstructOutcome out = run_spin_reconstruction(config, window);
                for (auto& item : out.document.items()) {
                    entry[item.key()] = std::move(item.value());
                }
                codes[slot] = out.exit_code;
            }
        } catch (const std::exception& err) {
            entry["error"] = err.what();
            codes[slot] = 2;
        }
        entries[slot] = std::move(entry);
    };

    const int worker_count = std::max(1, std::min<int>(jobs, static_cast<int>(windows.size())));
    if (worker_count == 1) {
        for (std::size_t slot = 0; slot < windows.size(); ++slot) {
            run_entry(slot);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t slot = next.fetch_add(1); slot < windows.size();
                 slot = next.fetch_add(1)) {
                run_entry(slot);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(worker_count));
        for (int t = 0; t < worker_count; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    // Entropy can only go down as windows widen: more constraints shrink
    // the feasible set. Tolerate solver-level noise when judging it.
    bool monotone = true;
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& entry : entries) {
        if (!entry.contains("s_rec") || !entry["s_rec"].is_number()) {
            continue;
        }
        const double s = entry["s_rec"].get<double>();
        if (s > previous + 1e-6) {
            monotone = false;
        }
        previous = s;
    }

    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "sweep";
    doc["config"] = config.echo;
    doc["solver_options"] = solver_options_to_json(config.solver);
    doc["entries"] = ordered_json::array();
    for (auto& entry : entries) {
        doc["entries"].push_back(std::move(entry));
    }
    doc["monotone_s_rec"] = monotone;

    const bool all_ok = std::all_of(codes.begin(), codes.end(), [](int c) { return c == 0; });
    return CommandResult{all_ok ? 0 : 2, std::move(doc)};
}

CommandResult cmd_certify(const RunConfig& config) {
    const CertifySpec& spec = config.certify;
    if (spec.sigma_file.empty() || spec.marginal_file.empty()) {
        throw DomainError("certify command needs certify.sigma_file and certify.marginal_file");
    }
    if (!spec.s_rho.has_value() && spec.rho_file.empty()) {
        throw DomainError("certify command needs certify.s_rho or certify.rho_file");
    }

    const DensityMatrix sigma = state_from_json(json_from_file(spec.sigma_file));
    const ConstraintSet constraints = constraints_from_json(json_from_file(spec.marginal_file));
    if (!(sigma.layout() == constraints.layout)) {
        throw LayoutError("stored state and marginal file describe different systems");
    }

    const double marg_err = marginal_error(sigma, region_targets(constraints));
    double residual = 0.0;
    for (std::size_t i = 0; i < constraints.basis.size(); ++i) {
        const std::complex<double> value = constraints.basis[i].trace_with(sigma.matrix());
        residual = std::max(residual, std::abs(value.real() - constraints.targets[i]));
    }

    std::optional<DensityMatrix> rho;
    if (!spec.rho_file.empty()) {
        rho.emplace(state_from_json(json_from_file(spec.rho_file)));
        if (!(rho->layout() == sigma.layout())) {
            throw LayoutError("reference state and stored state describe different systems");
        }
    }
    const CertificateReport cert = certify(sigma, spec.s_rho, rho ? &*rho : nullptr);

    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "certify";
    doc["config"] = config.echo;
    doc["layout"] = layout_to_json(sigma.layout());
    doc["s_rec"] = von_neumann_entropy(sigma);
    doc["marginal_error"] = marg_err;
    doc["constraint_residual"] = residual;
    doc["certificate"] = certificate_to_json(cert);

    const int code = (cert.satisfied && !cert.maximality_violated) ? 0 : 2;
    return CommandResult{code, std::move(doc)};
}

CommandResult cmd_fermion(const RunConfig& config) {
    if (!config.has_model || config.model.kind != ModelSpec::Kind::Fermion) {
        throw DomainError("fermion command needs model.type == \"fermion\"");
    }
    FermionOutcome outcome = run_fermion_fit(config, /*window_override=*/-1);

    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "fermion";
    doc["config"] = config.echo;
    doc["solver_options"] = solver_options_to_json(config.solver);
    for (auto& item : outcome.document.items()) {
        doc[item.key()] = std::move(item.value());
    }
    return CommandResult{outcome.exit_code, std::move(doc)};
}

} // namespace qmaxent::cli
