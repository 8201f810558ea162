#include "qmaxent/pauli.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>

namespace qmaxent {

namespace {

double parity_sign(std::uint64_t bits) {
    return (std::popcount(bits) & 1) ? -1.0 : 1.0;
}

// Sort key in canonical order: positions first, then letter characters.
std::pair<std::vector<int>, std::string> canonical_key(const PauliString& p) {
    std::vector<int> positions;
    std::string letters;
    for (const auto& [site, letter] : p.letters()) {
        positions.push_back(p.layout().site_position(site));
        letters.push_back(letter);
    }
    return {std::move(positions), std::move(letters)};
}

} // namespace

// ============================== PauliString =================================

PauliString::PauliString(SystemLayout layout, std::vector<std::pair<int, char>> letters)
    : layout_(std::move(layout)), letters_(std::move(letters)) {
    if (letters_.empty())
        throw DomainError("Pauli string must have at least one letter");
    if (layout_.local_dim() != 2)
        throw UnsupportedDimensionError("Pauli strings require qubit sites");
    for (const auto& [site, letter] : letters_) {
        layout_.site_position(site); // throws on unknown site
        if (letter != 'X' && letter != 'Y' && letter != 'Z')
            throw DomainError(std::string("invalid Pauli letter '") + letter + "'");
    }
    std::sort(letters_.begin(), letters_.end(),
              [this](const auto& a, const auto& b) {
                  return layout_.site_position(a.first) < layout_.site_position(b.first);
              });
    for (std::size_t i = 1; i < letters_.size(); ++i)
        if (letters_[i].first == letters_[i - 1].first)
            throw DomainError("duplicate site in Pauli string");
    own_action_ = action_on(layout_);
}

std::vector<int> PauliString::support() const {
    std::vector<int> sites;
    sites.reserve(letters_.size());
    for (const auto& [site, letter] : letters_) sites.push_back(site);
    return sites;
}

PauliString::Action PauliString::action_on(const SystemLayout& target) const {
    const int n = target.num_sites();
    if (n > 63) throw SizeError("Pauli actions support at most 63 sites");
    Action a;
    int y_count = 0;
    for (const auto& [site, letter] : letters_) {
        const int pos = target.site_position(site);
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - pos);
        switch (letter) {
            case 'X': a.flip |= bit; break;
            case 'Y': a.flip |= bit; a.sign |= bit; ++y_count; break;
            case 'Z': a.sign |= bit; break;
        }
    }
    static const std::complex<double> kPowersOfI[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    a.y_phase = kPowersOfI[y_count % 4];
    return a;
}

std::complex<double> PauliString::trace_with(const Eigen::MatrixXcd& m) const {
    const auto dim = static_cast<std::uint64_t>(m.rows());
    if (m.rows() != m.cols() || dim != layout_.dim())
        throw LayoutError("matrix dimension does not match the string's layout");
    // P|j> = phase(j) |j ^ flip>, so tr(m P) = sum_j phase(j) m(j, j ^ flip).
    std::complex<double> sum = 0.0;
    for (std::uint64_t j = 0; j < dim; ++j)
        sum += parity_sign(j & own_action_.sign) *
               m(static_cast<Eigen::Index>(j),
                 static_cast<Eigen::Index>(j ^ own_action_.flip));
    return own_action_.y_phase * sum;
}

void PauliString::add_scaled(Eigen::MatrixXcd& acc, double coeff) const {
    const auto dim = static_cast<std::uint64_t>(acc.rows());
    if (acc.rows() != acc.cols() || dim != layout_.dim())
        throw LayoutError("matrix dimension does not match the string's layout");
    for (std::uint64_t j = 0; j < dim; ++j)
        acc(static_cast<Eigen::Index>(j ^ own_action_.flip), static_cast<Eigen::Index>(j)) +=
            coeff * own_action_.y_phase * parity_sign(j & own_action_.sign);
}

Eigen::MatrixXcd PauliString::dense_on(const SystemLayout& target) const {
    Action a = action_on(target); // validates site membership
    const auto dim = static_cast<std::uint64_t>(target.dim());
    Eigen::MatrixXcd out =
        Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t j = 0; j < dim; ++j)
        out(static_cast<Eigen::Index>(j ^ a.flip), static_cast<Eigen::Index>(j)) =
            a.y_phase * parity_sign(j & a.sign);
    return out;
}

bool PauliString::canonical_less(const PauliString& a, const PauliString& b) {
    return canonical_key(a) < canonical_key(b);
}

// ============================ basis construction ============================

std::vector<PauliString> region_basis(const SystemLayout& layout, const RegionSet& regions) {
    if (layout.local_dim() != 2)
        throw UnsupportedDimensionError("region bases are implemented for qubits only");
    if (regions.regions.empty()) throw DomainError("region set is empty");

    std::vector<bool> covered(static_cast<std::size_t>(layout.num_sites()), false);
    std::map<std::vector<std::pair<int, char>>, bool> seen;
    static const char kLetters[3] = {'X', 'Y', 'Z'};

    for (const auto& raw_region : regions.regions) {
        std::vector<int> region = layout.checked_subset(raw_region);
        if (region.empty()) throw DomainError("empty region");
        for (int site : region) covered[static_cast<std::size_t>(layout.site_position(site))] = true;
        const std::size_t m = region.size();
        std::size_t count = 1;
        for (std::size_t i = 0; i < m; ++i) count *= 4;
        for (std::size_t code = 1; code < count; ++code) {
            std::vector<std::pair<int, char>> letters;
            std::size_t x = code;
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t digit = x % 4;
                x /= 4;
                if (digit != 0) letters.emplace_back(region[i], kLetters[digit - 1]);
            }
            std::sort(letters.begin(), letters.end());
            seen.emplace(std::move(letters), true);
        }
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end())
        throw LayoutError("regions do not cover every site of the layout");

    std::vector<PauliString> basis;
    basis.reserve(seen.size());
    for (const auto& [letters, unused] : seen) basis.emplace_back(layout, letters);
    std::sort(basis.begin(), basis.end(), PauliString::canonical_less);
    return basis;
}

std::vector<std::vector<int>> region_provenance_for(const SystemLayout& layout,
                                                    const std::vector<PauliString>& basis,
                                                    const RegionSet& regions) {
    std::vector<std::vector<int>> sorted_regions;
    sorted_regions.reserve(regions.regions.size());
    for (const auto& r : regions.regions) sorted_regions.push_back(layout.checked_subset(r));

    std::vector<std::vector<int>> provenance(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        std::vector<int> support = basis[i].support();
        for (std::size_t r = 0; r < sorted_regions.size(); ++r) {
            if (std::includes(sorted_regions[r].begin(), sorted_regions[r].end(),
                              support.begin(), support.end()))
                provenance[i].push_back(static_cast<int>(r));
        }
        if (provenance[i].empty())
            throw DomainError("basis element is not supported inside any region");
    }
    return provenance;
}

ConstraintSet extract_constraints(const DensityMatrix& rho, const RegionSet& regions) {
    return extract_constraints(rho, region_basis(rho.layout(), regions), regions);
}

ConstraintSet extract_constraints(const DensityMatrix& rho,
                                  std::vector<PauliString> basis,
                                  const RegionSet& regions) {
    const SystemLayout& layout = rho.layout();
    for (std::size_t i = 1; i < basis.size(); ++i)
        if (basis[i].same_letters(basis[i - 1]))
            throw DomainError("duplicate basis elements");
    ConstraintSet cs{layout, regions, std::move(basis), Eigen::VectorXd(), {}};
    cs.region_provenance = region_provenance_for(layout, cs.basis, regions);
    cs.targets.resize(cs.size());
    for (int i = 0; i < cs.size(); ++i) {
        cs.targets(i) = cs.basis[static_cast<std::size_t>(i)].trace_with(rho.matrix()).real();
        if (std::abs(cs.targets(i)) > 1.0 + 1e-9)
            throw InvariantError("Pauli expectation outside [-1, 1]");
    }
    return cs;
}

std::vector<std::pair<std::vector<int>, DensityMatrix>>
region_targets(const ConstraintSet& constraints) {
    const SystemLayout& layout = constraints.layout;
    // Invert the expectations region by region: each reduced state is
    // uniquely determined by the expectations of the strings inside it.
    std::vector<std::pair<std::vector<int>, DensityMatrix>> out;
    out.reserve(constraints.regions.regions.size());
    for (std::size_t r = 0; r < constraints.regions.regions.size(); ++r) {
        std::vector<int> region = layout.checked_subset(constraints.regions.regions[r]);
        SystemLayout local = layout.restricted_to(region);
        const auto dim = static_cast<Eigen::Index>(local.dim());
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
        for (std::size_t i = 0; i < constraints.basis.size(); ++i) {
            const auto& prov = constraints.region_provenance[i];
            if (std::find(prov.begin(), prov.end(), static_cast<int>(r)) == prov.end())
                continue;
            m += constraints.targets(static_cast<Eigen::Index>(i)) *
                 constraints.basis[i].dense_on(local);
        }
        m /= static_cast<double>(dim);
        out.emplace_back(std::move(region), DensityMatrix::from_matrix(std::move(local), std::move(m)));
    }
    return out;
}

double marginal_error(const DensityMatrix& candidate,
                      const std::vector<std::pair<std::vector<int>, DensityMatrix>>& targets) {
    double worst = 0.0;
    for (const auto& [region, target] : targets) {
        DensityMatrix reduced = partial_trace(candidate, region);
        worst = std::max(worst, trace_norm_distance(reduced, target));
    }
    return worst;
}

} // namespace qmaxent
