#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qmaxent/operators.hpp"

namespace qmaxent {

/// One geometrically local summand of a Hamiltonian: a Hermitian block
/// acting on `support` (sites in layout order, block factors in that order).
struct LocalTerm {
    std::vector<int> support;
    Eigen::MatrixXcd block;
};

/// Sum of local terms with a declared interaction range.
///
/// Terms are grouped by lattice position, so the number of terms equals the
/// number of unit cells (L for a ring, L^2 for the torus) and per-term norm
/// bounds translate directly into extensive energy bounds.
class LocalHamiltonian {
  public:
    LocalHamiltonian(SystemLayout layout, std::vector<LocalTerm> terms, int range);

    const SystemLayout& layout() const { return layout_; }
    const std::vector<LocalTerm>& terms() const { return terms_; }
    int range() const { return range_; }

    /// Dense sum of all embedded terms (computed once, then cached).
    const HermitianOperator& assembled() const;

    /// Largest operator norm among the local terms.
    double max_term_norm() const;

  private:
    SystemLayout layout_;
    std::vector<LocalTerm> terms_;
    int range_ = 0;
    mutable std::shared_ptr<const HermitianOperator> assembled_;
};

/// Collection of site subsets whose marginals are the reconstruction data.
/// Every site of the layout must be covered by at least one region.
struct RegionSet {
    std::vector<std::vector<int>> regions;
    /// Window size for sliding-window region sets; 0 for explicit sets.
    int window = 0;
};

/// Ground-state data of an assembled Hamiltonian.
struct GroundSpace {
    double energy = 0.0;          // lowest eigenvalue
    Eigen::MatrixXcd basis;       // orthonormal ground states as columns
    double gap = 0.0;             // first excitation energy above the band
    int degeneracy() const { return static_cast<int>(basis.cols()); }
    /// Orthogonal projector onto the ground band.
    Eigen::MatrixXcd projector() const { return basis * basis.adjoint(); }
};

/// Transverse-field Ising chain H = -J sum Z_x Z_{x+1} - h sum X_x, grouped
/// as one term per site x (the bond leaving x plus the field at x). For
/// rings of length 2 the single bond is kept once, not twice.
LocalHamiltonian build_tfim_chain(int L, double J, double h,
                                  Geometry geometry = Geometry::Ring);

/// Toric code on a 2x2 torus (8 edge qubits): H = -sum_v A_v - sum_p B_p
/// with X-type vertex stars and Z-type plaquettes, grouped as one term per
/// unit cell (the cell's star plus its plaquette).
LocalHamiltonian build_toric_code_2x2();

/// Vertex-star and plaquette supports of the 2x2 toric code, one region per
/// stabilizer (8 regions of 4 edges each).
RegionSet toric_stabilizer_regions(const SystemLayout& layout);

/// All windows of `R` consecutive sites (cyclic for rings; L-R+1 windows for
/// open chains). Requires 1 <= R <= L.
RegionSet intervals(const SystemLayout& layout, int R);

/// Exact ground band via full diagonalization: eigenvalues within
/// `degeneracy_tol` of the minimum form the band.
GroundSpace ground_space(const LocalHamiltonian& hamiltonian,
                         double degeneracy_tol = 1e-8);

/// Gibbs state exp(-H/T)/Z at temperature T > 0 (k_B = 1), computed from
/// the spectrum with the ground energy shifted out for stability.
DensityMatrix thermal_state(const LocalHamiltonian& hamiltonian, double temperature);

} // namespace qmaxent
