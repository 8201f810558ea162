#include "qmaxent/layout.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace qmaxent {

namespace {

std::size_t checked_power(int base, std::size_t exponent, std::size_t cap) {
    std::size_t result = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (result > cap / static_cast<std::size_t>(base))
            throw SizeError("Hilbert-space dimension exceeds cap of " + std::to_string(cap));
        result *= static_cast<std::size_t>(base);
    }
    if (result > cap)
        throw SizeError("Hilbert-space dimension exceeds cap of " + std::to_string(cap));
    return result;
}

int cyclic_abs(int delta, int period) {
    int m = ((delta % period) + period) % period;
    return std::min(m, period - m);
}

} // namespace

SystemLayout::SystemLayout(std::vector<int> sites, int local_dim, Geometry geometry,
                           int linear_size, std::vector<std::array<int, 2>> coords,
                           std::size_t dim_cap)
    : sites_(std::move(sites)),
      local_dim_(local_dim),
      geometry_(geometry),
      linear_size_(linear_size),
      coords_(std::move(coords)) {
    if (local_dim_ < 2) throw DomainError("local dimension must be at least 2");
    std::vector<int> sorted = sites_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw LayoutError("duplicate site labels in layout");
    dim_ = checked_power(local_dim_, sites_.size(), dim_cap);
}

SystemLayout SystemLayout::ring(int length, int local_dim, std::size_t dim_cap) {
    if (length < 1) throw DomainError("ring length must be positive");
    std::vector<int> sites(length);
    for (int i = 0; i < length; ++i) sites[i] = i;
    return SystemLayout(std::move(sites), local_dim, Geometry::Ring, length, {}, dim_cap);
}

SystemLayout SystemLayout::open_chain(int length, int local_dim, std::size_t dim_cap) {
    if (length < 1) throw DomainError("chain length must be positive");
    std::vector<int> sites(length);
    for (int i = 0; i < length; ++i) sites[i] = i;
    return SystemLayout(std::move(sites), local_dim, Geometry::OpenChain, length, {}, dim_cap);
}

SystemLayout SystemLayout::torus_2x2_edges(std::size_t dim_cap) {
    // Site labels 0..7: cell (i,j) in row-major order contributes its
    // horizontal edge then its vertical edge.
    std::vector<int> sites;
    std::vector<std::array<int, 2>> coords;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            sites.push_back(2 * (2 * i + j));
            coords.push_back({2 * i, 2 * j + 1});
            sites.push_back(2 * (2 * i + j) + 1);
            coords.push_back({2 * i + 1, 2 * j});
        }
    }
    // Re-emit in ascending label order so position == label.
    std::vector<int> order(sites.size());
    for (std::size_t p = 0; p < sites.size(); ++p) order[sites[p]] = static_cast<int>(p);
    std::vector<int> s2(sites.size());
    std::vector<std::array<int, 2>> c2(sites.size());
    for (std::size_t label = 0; label < sites.size(); ++label) {
        s2[label] = static_cast<int>(label);
        c2[label] = coords[order[label]];
    }
    return SystemLayout(std::move(s2), 2, Geometry::Torus2D, 2, std::move(c2), dim_cap);
}

bool SystemLayout::has_site(int site) const {
    return std::find(sites_.begin(), sites_.end(), site) != sites_.end();
}

int SystemLayout::site_position(int site) const {
    auto it = std::find(sites_.begin(), sites_.end(), site);
    if (it == sites_.end())
        throw LayoutError("site " + std::to_string(site) + " not in layout");
    return static_cast<int>(it - sites_.begin());
}

std::vector<int> SystemLayout::checked_subset(const std::vector<int>& subset) const {
    std::vector<int> positions;
    positions.reserve(subset.size());
    for (int site : subset) positions.push_back(site_position(site));
    std::sort(positions.begin(), positions.end());
    if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
        throw LayoutError("duplicate sites in subset");
    std::vector<int> result;
    result.reserve(positions.size());
    for (int p : positions) result.push_back(sites_[static_cast<std::size_t>(p)]);
    return result;
}

int SystemLayout::diameter(const std::vector<int>& subset) const {
    if (subset.empty()) return 0;
    std::vector<int> sorted = checked_subset(subset);
    if (geometry_ == Geometry::Torus2D) {
        int best = 0;
        const int period = 2 * linear_size_;
        for (std::size_t a = 0; a < sorted.size(); ++a) {
            for (std::size_t b = a + 1; b < sorted.size(); ++b) {
                const auto& ca = coords_[static_cast<std::size_t>(site_position(sorted[a]))];
                const auto& cb = coords_[static_cast<std::size_t>(site_position(sorted[b]))];
                int dist = std::max(cyclic_abs(ca[0] - cb[0], period),
                                    cyclic_abs(ca[1] - cb[1], period));
                best = std::max(best, dist);
            }
        }
        return best;
    }
    std::vector<int> positions;
    positions.reserve(sorted.size());
    for (int site : sorted) positions.push_back(site_position(site));
    if (geometry_ == Geometry::OpenChain)
        return positions.back() - positions.front() + 1;
    // Ring: smallest cyclic window containing all positions. The largest gap
    // between consecutive occupied positions (cyclically) is the part we can
    // leave out.
    const int L = num_sites();
    int max_gap = positions.front() + L - positions.back();
    for (std::size_t i = 1; i < positions.size(); ++i)
        max_gap = std::max(max_gap, positions[i] - positions[i - 1]);
    return L - max_gap + 1;
}

SystemLayout SystemLayout::restricted_to(const std::vector<int>& keep) const {
    std::vector<int> sorted = checked_subset(keep);
    std::vector<std::array<int, 2>> coords;
    if (geometry_ == Geometry::Torus2D) {
        coords.reserve(sorted.size());
        for (int site : sorted)
            coords.push_back(coords_[static_cast<std::size_t>(site_position(site))]);
    }
    return SystemLayout(std::move(sorted), local_dim_, geometry_, linear_size_,
                        std::move(coords), std::numeric_limits<std::size_t>::max());
}

bool SystemLayout::operator==(const SystemLayout& other) const {
    return sites_ == other.sites_ && local_dim_ == other.local_dim_ &&
           geometry_ == other.geometry_ && linear_size_ == other.linear_size_;
}

} // namespace qmaxent
