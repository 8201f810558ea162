#pragma once

#include <optional>

#include "qmaxent/models.hpp"

namespace qmaxent {

/// Entropy-gap certificate (1/8)||rho - sigma||_1^2 <= S_rec - S(rho).
struct CertificateReport {
    double s_rec_eps;        // entropy of the reconstructed state
    double s_rho;            // entropy of the target (supplied or computed)
    double lhs;              // (1/8)||rho - sigma||_1^2; 0 when rho is unknown
    double rhs;              // s_rec_eps - s_rho
    bool satisfied;          // slack >= -1e-9
    double slack;            // rhs - lhs
    bool rho_known;
    double distance_bound;   // sqrt(8 * max(rhs, 0)): certified ||rho-sigma||_1 bound
    bool maximality_violated; // rho known and s_rec < s_rho - 1e-8: solver failure
};

/// Evaluates the certificate. At least one of `s_rho` / `rho` must be given;
/// with rho known both sides are computed, otherwise only the certified
/// distance bound sqrt(8*(S_rec - S(rho))) is meaningful.
CertificateReport certify(const DensityMatrix& sigma, std::optional<double> s_rho,
                          const DensityMatrix* rho = nullptr);

/// Energy-based robustness bounds for reconstructions of gapped ground
/// states: marginal error eps caps the energy excess, which caps the weight
/// outside the ground space.
struct GroundBoundReport {
    double energy_excess;        // tr(sigma (H - E0))
    double eps_bound;            // eps * L^D * max_x ||H_x||
    double gap;                  // first excitation energy
    double excited_weight;       // measured tr(sigma (1 - P_ground))
    double excited_weight_bound; // energy_excess / gap
    double overlap_lower_bound;  // 1 - excited_weight_bound
};

/// Computes the bound chain and enforces it: throws InvariantError if the
/// energy excess exceeds the eps bound or the measured excited weight
/// exceeds energy_excess/gap (beyond 1e-9 slack) — either means the
/// premises don't hold for this sigma/H pair.
GroundBoundReport ground_bounds(const DensityMatrix& sigma, const LocalHamiltonian& hamiltonian,
                                double eps);

/// Appendix-style bounds for degenerate (topological) ground spaces, where
/// the reconstruction target is the uniform ground mixture P/N.
struct TopoBoundReport {
    double p_high;          // measured weight outside the ground band
    double p_high_bound;    // energy_excess / gap
    double eps_weight_bound; // eps * L^D / gap
    double fannes_term;     // 2 p_high L^D log(d / (2 p_high)), 0 at p_high = 0
    int n_ground;           // ground-space dimension N
    double final_bound;     // bound on (1/8)||P/N - sigma||_1^2
    double s_sigma_low;     // entropy of sigma projected into the ground band
    double energy_excess;
    double gap;
};

/// Requires a degenerate ground band (N >= 2). Enforces p_high <=
/// energy_excess/gap and S(sigma_low) <= log N within slack.
TopoBoundReport topo_bounds(const DensityMatrix& sigma, const LocalHamiltonian& hamiltonian,
                            double eps, int local_dim);

/// Trace distance between the uniform ground mixture and the Gibbs state,
/// exactly and via the closed-form expression in shifted units (E0 -> 0,
/// ground terms contribute 1 each to Z).
struct ThermalProjectorReport {
    double exact;        // ||P/N - rho(T)||_1
    double formula;      // N(1/N - 1/Z) + (Z - N)/Z
    double f_excited;    // -T log Z + T log N  (excited free energy, <= 0)
    double band_spread;  // energy spread inside the near-degenerate band
    int n_ground;
    double partition_function; // Z with E0 shifted to 0
};

ThermalProjectorReport thermal_projector_distance(const LocalHamiltonian& hamiltonian,
                                                  double temperature);

} // namespace qmaxent
