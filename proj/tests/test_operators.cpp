#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "qmaxent/operators.hpp"

using namespace qmaxent;
using oracle::cd;

namespace {

DensityMatrix random_state(const SystemLayout& layout, std::mt19937_64& rng,
                           Eigen::Index rank = 0) {
    return DensityMatrix::from_matrix(
        layout, oracle::random_density(static_cast<Eigen::Index>(layout.dim()), rng, rank));
}

} // namespace

TEST_CASE("construction validates hermiticity and state axioms") {
    const SystemLayout one = SystemLayout::ring(2);
    Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(4, 4);
    skew(0, 1) = 1.0; // not Hermitian
    CHECK_THROWS_AS(HermitianOperator(one, skew), InvariantError);
    CHECK_THROWS_AS(HermitianOperator(one, Eigen::MatrixXcd::Identity(3, 3)), LayoutError);

    Eigen::MatrixXcd not_normalized = Eigen::MatrixXcd::Identity(4, 4);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(one, not_normalized), InvariantError);

    Eigen::MatrixXcd indefinite = Eigen::MatrixXcd::Zero(4, 4);
    indefinite(0, 0) = 1.5;
    indefinite(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(one, indefinite), InvariantError);

    CHECK_THROWS_AS(DensityMatrix::pure(one, Eigen::VectorXcd::Zero(4)), DomainError);
    CHECK(DensityMatrix::maximally_mixed(one).trace_real() == doctest::Approx(1.0));
}

TEST_CASE("spectrum and operator norm match direct diagonalization") {
    std::mt19937_64 rng(11);
    const SystemLayout layout = SystemLayout::ring(3);
    const Eigen::MatrixXcd m = oracle::random_hermitian(8, rng);
    const HermitianOperator op(layout, m);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Spectrum sp = op.spectrum();
    CHECK((sp.eigenvalues - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(op.operator_norm() ==
          doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
}

TEST_CASE("tensor_embed places factors by layout order") {
    const SystemLayout pair = SystemLayout::ring(2);
    const SystemLayout four = SystemLayout::ring(4);

    // X on site 1, Z on site 3 of a 4-site ring, built two ways.
    const Eigen::MatrixXcd xz = oracle::kron(oracle::pauli('X'), oracle::pauli('Z'));
    const HermitianOperator local(four.restricted_to({1, 3}), xz);
    const HermitianOperator embedded = tensor_embed(local, four);
    CHECK((embedded.matrix() - oracle::pauli_word("IXIZ")).cwiseAbs().maxCoeff() < 1e-14);

    // Embedding into a layout that misses a site must fail.
    CHECK_THROWS_AS(tensor_embed(local, pair), LayoutError);
}

TEST_CASE("partial trace agrees with the index-sum oracle") {
    std::mt19937_64 rng(12);
    const SystemLayout four = SystemLayout::ring(4);
    const DensityMatrix rho = random_state(four, rng);

    for (const std::vector<int>& keep :
         {std::vector<int>{0}, {3}, {0, 1}, {1, 3}, {0, 2, 3}, {0, 1, 2, 3}}) {
        const DensityMatrix reduced = partial_trace(rho, keep);
        const Eigen::MatrixXcd expected = oracle::partial_trace_keep(rho.matrix(), keep, 4);
        CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    }

    // Product states reduce to their factors.
    std::mt19937_64 rng2(13);
    const Eigen::MatrixXcd a = oracle::random_density(4, rng2);
    const Eigen::MatrixXcd b = oracle::random_density(4, rng2);
    const DensityMatrix prod = DensityMatrix::from_matrix(four, oracle::kron(a, b));
    CHECK((partial_trace(prod, {0, 1}).matrix() - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((partial_trace(prod, {2, 3}).matrix() - b).cwiseAbs().maxCoeff() < 1e-12);

    // Keep order must not matter (result in layout order).
    CHECK((partial_trace(rho, {3, 1}).matrix() - partial_trace(rho, {1, 3}).matrix())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("herm_expm matches Taylor scaling-and-squaring") {
    std::mt19937_64 rng(14);
    const SystemLayout three = SystemLayout::ring(3);
    const Eigen::MatrixXcd m = 2.0 * oracle::random_hermitian(8, rng);
    const HermitianOperator a(three, m);
    const Eigen::MatrixXcd direct = oracle::expm_taylor(m);
    CHECK((herm_expm(a).matrix() - direct).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("entropy: pure, mixed, and random spectra") {
    std::mt19937_64 rng(15);
    const SystemLayout three = SystemLayout::ring(3);
    const DensityMatrix pure = DensityMatrix::pure(three, oracle::random_pure(8, rng));
    CHECK(von_neumann_entropy(pure) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(three)) ==
          doctest::Approx(std::log(8.0)).epsilon(1e-12));

    const DensityMatrix rho = random_state(three, rng);
    CHECK(von_neumann_entropy(rho) == doctest::Approx(oracle::entropy_of(rho.matrix())));
}

TEST_CASE("trace-norm distance equals the singular value sum") {
    std::mt19937_64 rng(16);
    const SystemLayout three = SystemLayout::ring(3);
    const DensityMatrix a = random_state(three, rng);
    const DensityMatrix b = random_state(three, rng);
    CHECK(trace_norm_distance(a, b) ==
          doctest::Approx(oracle::trace_norm_svd(a.matrix() - b.matrix())).epsilon(1e-10));
    CHECK(trace_norm_distance(a, a) == doctest::Approx(0.0));
    // Orthogonal pure states sit at the maximal distance 2.
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(8), e1 = Eigen::VectorXcd::Zero(8);
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(trace_norm_distance(DensityMatrix::pure(three, e0), DensityMatrix::pure(three, e1)) ==
          doctest::Approx(2.0));
    CHECK_THROWS_AS(trace_norm_distance(a, random_state(SystemLayout::open_chain(3), rng)),
                    LayoutError);
}

TEST_CASE("relative entropy: spectral oracle, zero case, and divergence") {
    std::mt19937_64 rng(17);
    const SystemLayout two = SystemLayout::ring(2);
    const DensityMatrix rho = random_state(two, rng);
    const DensityMatrix sigma = random_state(two, rng);

    CHECK(relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(relative_entropy(rho, sigma) ==
          doctest::Approx(oracle::relative_entropy_spectral(rho.matrix(), sigma.matrix()))
              .epsilon(1e-8));
    CHECK(relative_entropy(rho, sigma) >= -1e-12); // Klein inequality

    // rho with weight outside sigma's support diverges.
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(4), e1 = Eigen::VectorXcd::Zero(4);
    e0(0) = 1.0;
    e1(1) = 1.0;
    const DensityMatrix p0 = DensityMatrix::pure(two, e0);
    const DensityMatrix p1 = DensityMatrix::pure(two, e1);
    CHECK(relative_entropy(p0, p1) == std::numeric_limits<double>::infinity());
}
