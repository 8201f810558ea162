#include "qmaxent/certify.hpp"

#include <cmath>
#include <string>

namespace qmaxent {

namespace {

constexpr double kSlackTol = 1e-9;

double lattice_cells(const SystemLayout& layout) { // L^D
    double cells = 1.0;
    for (int i = 0; i < layout.spatial_dim(); ++i) cells *= layout.linear_size();
    return cells;
}

double real_trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a * b).trace().real();
}

} // namespace

CertificateReport certify(const DensityMatrix& sigma, std::optional<double> s_rho,
                          const DensityMatrix* rho) {
    if (!s_rho.has_value() && rho == nullptr)
        throw DomainError("certificate needs S(rho), either directly or via rho");

    CertificateReport rep;
    rep.rho_known = rho != nullptr;
    rep.s_rec_eps = von_neumann_entropy(sigma);
    rep.s_rho = s_rho.has_value() ? *s_rho : von_neumann_entropy(*rho);
    rep.rhs = rep.s_rec_eps - rep.s_rho;
    if (rho != nullptr) {
        const double dist = trace_norm_distance(*rho, sigma);
        rep.lhs = dist * dist / 8.0;
    } else {
        rep.lhs = 0.0;
    }
    rep.slack = rep.rhs - rep.lhs;
    rep.satisfied = rep.slack >= -kSlackTol;
    rep.distance_bound = std::sqrt(8.0 * std::max(rep.rhs, 0.0));
    rep.maximality_violated = rep.rho_known && rep.rhs < -1e-8;
    return rep;
}

GroundBoundReport ground_bounds(const DensityMatrix& sigma, const LocalHamiltonian& hamiltonian,
                                double eps) {
    if (!(eps > 0.0)) throw DomainError("marginal error eps must be positive");
    if (sigma.layout() != hamiltonian.layout())
        throw LayoutError("state and Hamiltonian live on different layouts");

    GroundSpace gs = ground_space(hamiltonian);
    if (!(gs.gap > 0.0))
        throw DomainError("Hamiltonian has no excitation gap above the ground band");

    GroundBoundReport rep;
    rep.gap = gs.gap;
    rep.energy_excess =
        real_trace_product(sigma.matrix(), hamiltonian.assembled().matrix()) - gs.energy;
    if (rep.energy_excess < -kSlackTol)
        throw InvariantError("state energy below the ground energy: " +
                             std::to_string(rep.energy_excess));
    rep.eps_bound = eps * lattice_cells(sigma.layout()) * hamiltonian.max_term_norm();
    rep.excited_weight = 1.0 - real_trace_product(sigma.matrix(), gs.projector());
    rep.excited_weight_bound = rep.energy_excess / gs.gap;
    rep.overlap_lower_bound = 1.0 - rep.excited_weight_bound;

    if (rep.energy_excess > rep.eps_bound + kSlackTol)
        throw InvariantError("energy excess " + std::to_string(rep.energy_excess) +
                             " exceeds the marginal-error bound " +
                             std::to_string(rep.eps_bound));
    if (rep.excited_weight > rep.excited_weight_bound + kSlackTol)
        throw InvariantError("excited weight exceeds energy_excess/gap");
    return rep;
}

TopoBoundReport topo_bounds(const DensityMatrix& sigma, const LocalHamiltonian& hamiltonian,
                            double eps, int local_dim) {
    if (!(eps > 0.0)) throw DomainError("marginal error eps must be positive");
    if (local_dim < 2) throw DomainError("local dimension must be at least 2");
    if (sigma.layout() != hamiltonian.layout())
        throw LayoutError("state and Hamiltonian live on different layouts");

    GroundSpace gs = ground_space(hamiltonian);
    if (gs.degeneracy() < 2)
        throw DomainError("ground space is nondegenerate; use ground_bounds");
    if (!(gs.gap > 0.0))
        throw DomainError("Hamiltonian has no excitation gap above the ground band");

    TopoBoundReport rep;
    rep.n_ground = gs.degeneracy();
    rep.gap = gs.gap;
    const Eigen::MatrixXcd projector = gs.projector();
    const double p_low = real_trace_product(sigma.matrix(), projector);
    rep.p_high = 1.0 - p_low;
    if (rep.p_high < 0.0) {
        if (rep.p_high < -1e-10) throw InvariantError("negative high-energy weight");
        rep.p_high = 0.0;
    }
    rep.energy_excess =
        real_trace_product(sigma.matrix(), hamiltonian.assembled().matrix()) - gs.energy;
    rep.p_high_bound = rep.energy_excess / gs.gap;
    const double cells = lattice_cells(sigma.layout());
    rep.eps_weight_bound = eps * cells / gs.gap;
    rep.fannes_term =
        rep.p_high <= 0.0
            ? 0.0
            : 2.0 * rep.p_high * cells * std::log(static_cast<double>(local_dim) / (2.0 * rep.p_high));
    rep.final_bound = rep.fannes_term;

    if (p_low > 1e-12) {
        Eigen::MatrixXcd low = projector * sigma.matrix() * projector / p_low;
        rep.s_sigma_low =
            von_neumann_entropy(DensityMatrix::from_matrix(sigma.layout(), std::move(low)));
    } else {
        rep.s_sigma_low = 0.0;
    }

    if (rep.p_high > rep.p_high_bound + kSlackTol)
        throw InvariantError("high-energy weight exceeds energy_excess/gap");
    if (rep.s_sigma_low > std::log(static_cast<double>(rep.n_ground)) + 1e-6)
        throw InvariantError("in-band entropy exceeds log N");
    return rep;
}

ThermalProjectorReport thermal_projector_distance(const LocalHamiltonian& hamiltonian,
                                                  double temperature) {
    if (!(temperature > 0.0)) throw DomainError("temperature must be positive");

    GroundSpace gs = ground_space(hamiltonian);
    Spectrum spec = hamiltonian.assembled().spectrum();
    const int n = gs.degeneracy();

    ThermalProjectorReport rep;
    rep.n_ground = n;
    rep.band_spread = spec.eigenvalues(n - 1) - spec.eigenvalues(0);

    // Shifted partition function: ground terms contribute e^0 = 1 each.
    double z = 0.0;
    for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j)
        z += std::exp(-(spec.eigenvalues(j) - gs.energy) / temperature);
    rep.partition_function = z;

    Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
    DensityMatrix ground_mixture =
        DensityMatrix::from_eigenbasis(hamiltonian.layout(), gs.basis, uniform);
    rep.exact = trace_norm_distance(ground_mixture, thermal_state(hamiltonian, temperature));

    // Ground terms are short by (1/N - 1/Z) each; excited terms add (Z-N)/Z.
    rep.formula = n * (1.0 / n - 1.0 / z) + (z - n) / z;
    rep.f_excited = -temperature * std::log(z) + temperature * std::log(static_cast<double>(n));

    if (rep.band_spread <= 1e-10 && std::abs(rep.exact - rep.formula) > 1e-8)
        throw InvariantError("closed-form distance disagrees with the exact value");
    return rep;
}

} // namespace qmaxent
