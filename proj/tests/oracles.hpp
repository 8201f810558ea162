#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written the slow, obvious way (index sums,
// Taylor series, SVD) and shares no code with the implementations under test.

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cd = std::complex<double>;

// ------------------------------ basics -------------------------------------

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline MatrixXcd pauli(char letter) {
    MatrixXcd m(2, 2);
    switch (letter) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("unknown Pauli letter");
    }
    return m;
}

/// Dense operator on `n` qubits from a letter string ('I' for identity),
/// site 0 leftmost (most significant bit).
inline MatrixXcd pauli_word(const std::string& letters) {
    MatrixXcd out = pauli(letters.at(0));
    for (std::size_t i = 1; i < letters.size(); ++i) out = kron(out, pauli(letters[i]));
    return out;
}

// ------------------------- partial trace (index sum) -----------------------

/// Keep the qubits in `keep` (ascending site offsets, 0 = most significant),
/// trace out the rest. Plain quadruple-indexed sum.
inline MatrixXcd partial_trace_keep(const MatrixXcd& m, const std::vector<int>& keep, int n) {
    const Index dim = m.rows();
    if (dim != (Index{1} << n)) throw std::invalid_argument("dimension mismatch");
    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);

    const int nk = static_cast<int>(keep.size());
    const int nt = static_cast<int>(traced.size());
    const Index dk = Index{1} << nk;
    const Index dt = Index{1} << nt;

    auto assemble = [&](Index kept_bits, Index traced_bits) {
        Index full = 0;
        for (int i = 0; i < nk; ++i)
            if (kept_bits & (Index{1} << (nk - 1 - i))) full |= Index{1} << (n - 1 - keep[static_cast<std::size_t>(i)]);
        for (int i = 0; i < nt; ++i)
            if (traced_bits & (Index{1} << (nt - 1 - i))) full |= Index{1} << (n - 1 - traced[static_cast<std::size_t>(i)]);
        return full;
    };

    MatrixXcd out = MatrixXcd::Zero(dk, dk);
    for (Index a = 0; a < dk; ++a)
        for (Index b = 0; b < dk; ++b)
            for (Index t = 0; t < dt; ++t) out(a, b) += m(assemble(a, t), assemble(b, t));
    return out;
}

// ----------------------- matrix exponential (Taylor) -----------------------

inline MatrixXcd expm_taylor(const MatrixXcd& a) {
    const double norm = a.cwiseAbs().maxCoeff() * static_cast<double>(a.rows());
    int squarings = 0;
    MatrixXcd scaled = a;
    while (scaled.cwiseAbs().maxCoeff() * static_cast<double>(a.rows()) > 0.5) {
        scaled /= 2.0;
        ++squarings;
        if (squarings > 200) throw std::runtime_error("expm oracle: norm too large");
    }
    (void)norm;
    MatrixXcd sum = MatrixXcd::Identity(a.rows(), a.cols());
    MatrixXcd term = sum;
    for (int k = 1; k <= 30; ++k) {
        term = (term * scaled) / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

// ----------------------------- norms & entropies ----------------------------

inline double trace_norm_svd(const MatrixXcd& m) {
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    return svd.singularValues().sum();
}

inline double entropy_of(const MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
    double s = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-15) s -= p * std::log(p);
    }
    return s;
}

inline double relative_entropy_spectral(const MatrixXcd& rho, const MatrixXcd& sigma) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> er(rho), es(sigma);
    double value = 0.0;
    for (Index i = 0; i < er.eigenvalues().size(); ++i) {
        const double p = er.eigenvalues()(i);
        if (p <= 1e-15) continue;
        value += p * std::log(p);
        for (Index j = 0; j < es.eigenvalues().size(); ++j) {
            const double q = std::max(es.eigenvalues()(j), 1e-300);
            const double overlap =
                std::norm(es.eigenvectors().col(j).dot(er.eigenvectors().col(i)));
            value -= p * overlap * std::log(q);
        }
    }
    return value;
}

// ------------------------------ random states ------------------------------

inline MatrixXcd random_density(Index dim, std::mt19937_64& rng, Index rank = 0) {
    if (rank <= 0) rank = dim;
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd g(dim, rank);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < rank; ++j) g(i, j) = cd(gauss(rng), gauss(rng));
    MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline MatrixXcd random_hermitian(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = cd(gauss(rng), gauss(rng));
    return (g + g.adjoint()) / 2.0;
}

inline VectorXcd random_pure(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXcd v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = cd(gauss(rng), gauss(rng));
    return v / v.norm();
}

// ------------------------------ dense models --------------------------------

/// Transverse-field Ising chain, built one dense word at a time.
inline MatrixXcd tfim_dense(int L, double J, double h, bool periodic) {
    const Index dim = Index{1} << L;
    MatrixXcd ham = MatrixXcd::Zero(dim, dim);
    for (int x = 0; x < L; ++x) {
        std::string field(static_cast<std::size_t>(L), 'I');
        field[static_cast<std::size_t>(x)] = 'X';
        ham -= h * pauli_word(field);
    }
    const int bonds = periodic ? (L > 2 ? L : L - 1) : L - 1;
    for (int x = 0; x < bonds; ++x) {
        std::string bond(static_cast<std::size_t>(L), 'I');
        bond[static_cast<std::size_t>(x)] = 'Z';
        bond[static_cast<std::size_t>((x + 1) % L)] = 'Z';
        ham -= J * pauli_word(bond);
    }
    return ham;
}

/// 2x2 toric code on 8 edge qubits: minus the four vertex X-stars and the
/// four plaquette Z-loops, with the edge labels h(i,j) = 2(2i+j) and
/// v(i,j) = 2(2i+j)+1.
inline MatrixXcd toric_dense() {
    auto h_edge = [](int i, int j) { return 2 * (2 * (i % 2) + (j % 2)); };
    auto v_edge = [](int i, int j) { return 2 * (2 * (i % 2) + (j % 2)) + 1; };
    const Index dim = Index{1} << 8;
    MatrixXcd ham = MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            std::string star(8, 'I');
            star[static_cast<std::size_t>(h_edge(i, j))] = 'X';
            star[static_cast<std::size_t>(h_edge(i, j - 1 + 2))] = 'X';
            star[static_cast<std::size_t>(v_edge(i, j))] = 'X';
            star[static_cast<std::size_t>(v_edge(i - 1 + 2, j))] = 'X';
            ham -= pauli_word(star);
            std::string plaq(8, 'I');
            plaq[static_cast<std::size_t>(h_edge(i, j))] = 'Z';
            plaq[static_cast<std::size_t>(h_edge(i + 1, j))] = 'Z';
            plaq[static_cast<std::size_t>(v_edge(i, j))] = 'Z';
            plaq[static_cast<std::size_t>(v_edge(i, j + 1))] = 'Z';
            ham -= pauli_word(plaq);
        }
    }
    return ham;
}

// --------------------------- Fock-space fermions ----------------------------

/// Annihilation operator c_x on L sites in the occupation basis, site 0 as
/// the most significant bit, with the Jordan-Wigner sign (-1)^{n_0+..+n_{x-1}}.
inline MatrixXcd annihilator(int x, int L) {
    const Index dim = Index{1} << L;
    MatrixXcd c = MatrixXcd::Zero(dim, dim);
    const Index bit = Index{1} << (L - 1 - x);
    for (Index j = 0; j < dim; ++j) {
        if (!(j & bit)) continue;
        int swaps = 0;
        for (int y = 0; y < x; ++y)
            if (j & (Index{1} << (L - 1 - y))) ++swaps;
        c(j ^ bit, j) = (swaps % 2 == 0) ? 1.0 : -1.0;
    }
    return c;
}

/// Second-quantized quadratic Hamiltonian sum_{xy} h_{xy} c^dag_x c_y.
inline MatrixXcd fock_quadratic(const MatrixXd& single_particle) {
    const int L = static_cast<int>(single_particle.rows());
    std::vector<MatrixXcd> cs;
    cs.reserve(static_cast<std::size_t>(L));
    for (int x = 0; x < L; ++x) cs.push_back(annihilator(x, L));
    const Index dim = Index{1} << L;
    MatrixXcd ham = MatrixXcd::Zero(dim, dim);
    for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y)
            if (single_particle(x, y) != 0.0)
                ham += single_particle(x, y) * (cs[static_cast<std::size_t>(x)].adjoint() *
                                                cs[static_cast<std::size_t>(y)]);
    return ham;
}

/// Nearest-neighbour hopping matrix with the boundary bond sign flipped
/// (the quadratic form of the ring's even-fermion-parity sector).
inline MatrixXd antiperiodic_hopping(int L, double w) {
    MatrixXd h = MatrixXd::Zero(L, L);
    for (int x = 0; x + 1 < L; ++x) {
        h(x, x + 1) = -w;
        h(x + 1, x) = -w;
    }
    h(L - 1, 0) += w;
    h(0, L - 1) += w;
    return h;
}

} // namespace oracle
