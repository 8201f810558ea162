#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qmaxent/errors.hpp"

namespace qmaxent {

enum class Geometry { OpenChain, Ring, Torus2D };

/// Default cap on the total Hilbert-space dimension. Factories refuse to
/// build anything larger unless the caller raises the cap explicitly.
inline constexpr std::size_t kDefaultDimCap = 4096;

/// Ordered site list plus the geometric data needed to measure regions.
///
/// Sites are identified by integer labels; their order fixes the tensor
/// factor order of every operator built on the layout (first site is the
/// most significant factor). For 2D torus layouts each site additionally
/// carries integer coordinates on the doubled grid, so that edge midpoints
/// of a lattice have exact integer positions.
class SystemLayout {
  public:
    static SystemLayout ring(int length, int local_dim = 2,
                             std::size_t dim_cap = kDefaultDimCap);
    static SystemLayout open_chain(int length, int local_dim = 2,
                                   std::size_t dim_cap = kDefaultDimCap);
    /// The 8 edge qubits of a 2x2 square-lattice torus, ordered
    /// horizontal-before-vertical within each unit cell, cells in row-major
    /// order. Doubled-grid coordinates: horizontal edge of cell (i,j) sits
    /// at (2i, 2j+1), vertical edge at (2i+1, 2j).
    static SystemLayout torus_2x2_edges(std::size_t dim_cap = kDefaultDimCap);

    const std::vector<int>& sites() const { return sites_; }
    int num_sites() const { return static_cast<int>(sites_.size()); }
    int local_dim() const { return local_dim_; }
    Geometry geometry() const { return geometry_; }
    int linear_size() const { return linear_size_; }
    /// Spatial dimension D of the underlying lattice (1 for chains/rings).
    int spatial_dim() const { return geometry_ == Geometry::Torus2D ? 2 : 1; }

    /// Total Hilbert-space dimension local_dim^num_sites.
    std::size_t dim() const { return dim_; }

    bool has_site(int site) const;
    /// Position of `site` in the ordered site list; throws LayoutError.
    int site_position(int site) const;

    /// Geometric extent of a site subset.
    ///
    /// Chains/rings: length of the smallest (cyclic, for rings) window of
    /// consecutive sites covering the subset, so a block of R neighbours has
    /// diameter R. Torus: largest pairwise periodic Chebyshev distance on
    /// the doubled grid. Empty subsets have diameter 0.
    int diameter(const std::vector<int>& subset) const;

    /// Layout restricted to `keep` (kept in this layout's site order).
    SystemLayout restricted_to(const std::vector<int>& keep) const;

    /// Same sites in the same order, same local dimension and geometry.
    bool operator==(const SystemLayout& other) const;
    bool operator!=(const SystemLayout& other) const { return !(*this == other); }

    /// Sorted copy of `subset` with duplicates/unknown sites rejected.
    std::vector<int> checked_subset(const std::vector<int>& subset) const;

  private:
    SystemLayout(std::vector<int> sites, int local_dim, Geometry geometry,
                 int linear_size, std::vector<std::array<int, 2>> coords,
                 std::size_t dim_cap);

    std::vector<int> sites_;
    int local_dim_ = 2;
    Geometry geometry_ = Geometry::OpenChain;
    int linear_size_ = 0;
    std::vector<std::array<int, 2>> coords_; // doubled-grid, Torus2D only
    std::size_t dim_ = 1;
};

} // namespace qmaxent
