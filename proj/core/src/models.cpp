#include "qmaxent/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qmaxent {

namespace {

using Eigen::MatrixXcd;
const std::complex<double> kI(0.0, 1.0);

MatrixXcd pauli_x() {
    MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

MatrixXcd pauli_z() {
    MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

MatrixXcd kron_all(const std::vector<MatrixXcd>& factors) {
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
}

} // namespace

// ============================ LocalHamiltonian ==============================

LocalHamiltonian::LocalHamiltonian(SystemLayout layout, std::vector<LocalTerm> terms,
                                   int range)
    : layout_(std::move(layout)), terms_(std::move(terms)), range_(range) {
    if (range_ < 1) throw DomainError("interaction range must be at least 1");
    for (const auto& term : terms_) {
        std::vector<int> sorted = layout_.checked_subset(term.support);
        if (sorted != term.support)
            throw LayoutError("term support must be listed in layout order");
        SystemLayout local = layout_.restricted_to(term.support);
        HermitianOperator check(local, term.block); // validates shape + Hermiticity
        if (layout_.diameter(term.support) > range_)
            throw LayoutError("term support exceeds the declared interaction range");
    }
}

const HermitianOperator& LocalHamiltonian::assembled() const {
    if (!assembled_) {
        const auto dim = static_cast<Eigen::Index>(layout_.dim());
        MatrixXcd sum = MatrixXcd::Zero(dim, dim);
        for (const auto& term : terms_) {
            HermitianOperator local(layout_.restricted_to(term.support), term.block);
            sum += tensor_embed(local, layout_).matrix();
        }
        assembled_ = std::make_shared<const HermitianOperator>(layout_, std::move(sum));
    }
    return *assembled_;
}

double LocalHamiltonian::max_term_norm() const {
    double best = 0.0;
    for (const auto& term : terms_) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(term.block, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw NumericalError("eigendecomposition failed to converge");
        const auto& ev = solver.eigenvalues();
        best = std::max(best, std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))));
    }
    return best;
}

// ================================ builders ==================================

LocalHamiltonian build_tfim_chain(int L, double J, double h, Geometry geometry) {
    if (geometry != Geometry::Ring && geometry != Geometry::OpenChain)
        throw DomainError("transverse-field Ising chains are 1D (ring or open chain)");
    SystemLayout layout = geometry == Geometry::Ring ? SystemLayout::ring(L)
                                                     : SystemLayout::open_chain(L);
    const MatrixXcd X = pauli_x();
    const MatrixXcd Z = pauli_z();
    const MatrixXcd I2 = MatrixXcd::Identity(2, 2);

    std::vector<LocalTerm> terms;
    terms.reserve(static_cast<std::size_t>(L));
    for (int x = 0; x < L; ++x) {
        const bool has_bond = geometry == Geometry::Ring
                                  ? (L > 1 && !(L == 2 && x == 1)) // one bond only on a 2-ring
                                  : (x + 1 < L);
        if (!has_bond) {
            terms.push_back({{x}, -h * X});
            continue;
        }
        const int y = (x + 1) % L;
        // Support in layout order; the field acts on x wherever it lands.
        std::vector<int> support = x < y ? std::vector<int>{x, y} : std::vector<int>{y, x};
        MatrixXcd field = x < y ? kron(X, I2) : kron(I2, X);
        terms.push_back({std::move(support), -J * kron(Z, Z) - h * field});
    }
    return LocalHamiltonian(std::move(layout), std::move(terms), 2);
}

namespace {

// Edge labels on the 2x2 torus: cell (i,j) owns horizontal edge 2*(2i+j)
// and vertical edge 2*(2i+j)+1 (indices mod 2).
int h_edge(int i, int j) { return 2 * (2 * (((i % 2) + 2) % 2) + (((j % 2) + 2) % 2)); }
int v_edge(int i, int j) { return h_edge(i, j) + 1; }

std::vector<int> star_support(int i, int j) {
    std::vector<int> s = {h_edge(i, j), h_edge(i, j - 1), v_edge(i, j), v_edge(i - 1, j)};
    std::sort(s.begin(), s.end());
    return s;
}

std::vector<int> plaquette_support(int i, int j) {
    std::vector<int> s = {h_edge(i, j), h_edge(i + 1, j), v_edge(i, j), v_edge(i, j + 1)};
    std::sort(s.begin(), s.end());
    return s;
}

// -(P tensor ... tensor P) on `stabilizer` sites, embedded into `support`.
MatrixXcd stabilizer_block(const SystemLayout& full, const std::vector<int>& support,
                           const std::vector<int>& stabilizer, const MatrixXcd& pauli) {
    SystemLayout local = full.restricted_to(support);
    std::vector<MatrixXcd> factors(stabilizer.size(), pauli);
    HermitianOperator op(full.restricted_to(stabilizer), kron_all(factors));
    return tensor_embed(op, local).matrix();
}

} // namespace

LocalHamiltonian build_toric_code_2x2() {
    SystemLayout layout = SystemLayout::torus_2x2_edges();
    const MatrixXcd X = pauli_x();
    const MatrixXcd Z = pauli_z();

    std::vector<LocalTerm> terms;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            // Group the vertex star and the plaquette of cell (i,j) into one
            // term living on the union of their supports (6 edges).
            std::vector<int> star = star_support(i, j);
            std::vector<int> plaq = plaquette_support(i, j);
            std::vector<int> support = star;
            support.insert(support.end(), plaq.begin(), plaq.end());
            std::sort(support.begin(), support.end());
            support.erase(std::unique(support.begin(), support.end()), support.end());

            MatrixXcd block = -stabilizer_block(layout, support, star, X) -
                              stabilizer_block(layout, support, plaq, Z);
            terms.push_back({std::move(support), std::move(block)});
        }
    }
    return LocalHamiltonian(std::move(layout), std::move(terms), 2);
}

RegionSet toric_stabilizer_regions(const SystemLayout& layout) {
    if (layout.geometry() != Geometry::Torus2D || layout.num_sites() != 8)
        throw LayoutError("stabilizer regions are defined for the 2x2 torus layout");
    RegionSet set;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) set.regions.push_back(star_support(i, j));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) set.regions.push_back(plaquette_support(i, j));
    set.window = 0;
    return set;
}

RegionSet intervals(const SystemLayout& layout, int R) {
    if (layout.geometry() == Geometry::Torus2D)
        throw LayoutError("interval regions are defined for chain layouts");
    const int L = layout.num_sites();
    if (R < 1 || R > L) throw DomainError("window size must satisfy 1 <= R <= L");
    RegionSet set;
    set.window = R;
    const auto& sites = layout.sites();
    const int windows = layout.geometry() == Geometry::Ring ? L : L - R + 1;
    for (int x = 0; x < windows; ++x) {
        std::vector<int> region;
        region.reserve(static_cast<std::size_t>(R));
        for (int k = 0; k < R; ++k)
            region.push_back(sites[static_cast<std::size_t>((x + k) % L)]);
        std::sort(region.begin(), region.end());
        if (std::find(set.regions.begin(), set.regions.end(), region) == set.regions.end())
            set.regions.push_back(std::move(region));
    }
    return set;
}

// ============================ spectral helpers ==============================

GroundSpace ground_space(const LocalHamiltonian& hamiltonian, double degeneracy_tol) {
    Spectrum s = hamiltonian.assembled().spectrum();
    const Eigen::Index dim = s.eigenvalues.size();
    const double e0 = s.eigenvalues(0);
    Eigen::Index band = 1;
    while (band < dim && s.eigenvalues(band) <= e0 + degeneracy_tol) ++band;
    GroundSpace gs;
    gs.energy = e0;
    gs.basis = s.eigenvectors.leftCols(band);
    gs.gap = band < dim ? s.eigenvalues(band) - e0 : 0.0;
    return gs;
}

DensityMatrix thermal_state(const LocalHamiltonian& hamiltonian, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
    Spectrum s = hamiltonian.assembled().spectrum();
    Eigen::VectorXd w =
        ((s.eigenvalues.array() - s.eigenvalues(0)) / -temperature).exp();
    w /= w.sum();
    return DensityMatrix::from_eigenbasis(hamiltonian.layout(), s.eigenvectors, w);
}

} // namespace qmaxent
