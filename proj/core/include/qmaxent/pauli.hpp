#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmaxent/models.hpp"
#include "qmaxent/operators.hpp"

namespace qmaxent {

/// Product of single-qubit Pauli operators on a subset of sites (identity
/// elsewhere), e.g. X_0 Z_3. Hermitian, unitary, traceless when non-empty.
///
/// The dense matrix never needs to be formed for traces: the string acts on
/// computational basis states as a bit-flip permutation with a +-1/+-i phase,
/// so expectations cost O(dim) instead of O(dim^2).
class PauliString {
  public:
    /// `letters` maps sites to 'X', 'Y' or 'Z'; must be non-empty, with
    /// distinct sites drawn from the layout. Stored sorted by site position.
    PauliString(SystemLayout layout, std::vector<std::pair<int, char>> letters);

    const SystemLayout& layout() const { return layout_; }
    const std::vector<std::pair<int, char>>& letters() const { return letters_; }
    std::vector<int> support() const;
    int weight() const { return static_cast<int>(letters_.size()); }

    /// tr(m * P) evaluated sparsely; m must match the layout dimension.
    std::complex<double> trace_with(const Eigen::MatrixXcd& m) const;

    /// acc += coeff * P (dense accumulation, one entry per column).
    void add_scaled(Eigen::MatrixXcd& acc, double coeff) const;

    /// Dense matrix of the string embedded in `target` (all letter sites
    /// must belong to it; identity on the rest).
    Eigen::MatrixXcd dense_on(const SystemLayout& target) const;
    Eigen::MatrixXcd dense() const { return dense_on(layout_); }

    /// Basis identity: equal letter assignments denote the same element.
    bool same_letters(const PauliString& other) const { return letters_ == other.letters_; }

    /// Canonical basis order: by support (position lists, lexicographic),
    /// then by letters (X < Y < Z).
    static bool canonical_less(const PauliString& a, const PauliString& b);

  private:
    struct Action {
        std::uint64_t flip = 0;               // bits toggled by X/Y letters
        std::uint64_t sign = 0;               // bits contributing (-1)^bit (Y/Z)
        std::complex<double> y_phase = 1.0;   // i^(#Y letters)
    };
    Action action_on(const SystemLayout& target) const;

    SystemLayout layout_;
    std::vector<std::pair<int, char>> letters_; // sorted by layout position
    Action own_action_;
};

/// Deduplicated operator basis with target expectations: the "local data"
/// from which a global state is reconstructed.
struct ConstraintSet {
    SystemLayout layout;
    RegionSet regions;
    std::vector<PauliString> basis;      // canonical order, duplicate-free
    Eigen::VectorXd targets;             // c_i = tr(rho O_i)
    /// For each basis element, the indices of regions containing its support.
    std::vector<std::vector<int>> region_provenance;

    int size() const { return static_cast<int>(basis.size()); }
};

/// All non-identity Pauli strings supported inside some region, each listed
/// once, in canonical order. Qubits only.
std::vector<PauliString> region_basis(const SystemLayout& layout, const RegionSet& regions);

/// Local data of `rho` on `regions`: region basis plus exact expectations.
ConstraintSet extract_constraints(const DensityMatrix& rho, const RegionSet& regions);

/// Same with a caller-supplied basis (must be supported inside the regions).
ConstraintSet extract_constraints(const DensityMatrix& rho,
                                  std::vector<PauliString> basis,
                                  const RegionSet& regions);

/// Regions containing each string's support; errors if some string is not
/// covered by any region.
std::vector<std::vector<int>> region_provenance_for(const SystemLayout& layout,
                                                    const std::vector<PauliString>& basis,
                                                    const RegionSet& regions);

/// Reduced target states per region, rebuilt from the constraint targets by
/// Pauli inversion: rho_A = 2^{-|A|} (I + sum_i c_i O_i|_A). Needs no copy
/// of the original global state.
std::vector<std::pair<std::vector<int>, DensityMatrix>>
region_targets(const ConstraintSet& constraints);

/// Max over regions of the trace-norm distance between the candidate's
/// reduced state and the target reduced state.
double marginal_error(const DensityMatrix& candidate,
                      const std::vector<std::pair<std::vector<int>, DensityMatrix>>& targets);

} // namespace qmaxent
