#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qmaxent/fermion.hpp"

using namespace qmaxent;

namespace {

// Single-particle matrix of the translation-invariant coupling ansatz on an
// L-site ring in the antiperiodic sector (c_{x+L} = -c_x), so that the Fock
// Hamiltonian built from it has single-mode energies 2 sum_d lambda_d cos(dk)
// on the half-integer momentum grid.
Eigen::MatrixXd coupling_matrix(const GaussianCouplings& couplings, int L) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(L, L);
    for (int x = 0; x < L; ++x) m(x, x) = 2.0 * couplings.lambdas(0);
    for (int delta = 1; delta <= couplings.window(); ++delta) {
        for (int x = 0; x < L; ++x) {
            const int y = (x + delta) % L;
            const double sign = (x + delta >= L) ? -1.0 : 1.0;
            m(x, y) += sign * couplings.lambdas(delta);
            m(y, x) += sign * couplings.lambdas(delta);
        }
    }
    return m;
}

} // namespace

TEST_CASE("momenta sit on the half-integer grid") {
    const FermionRing ring{6, 1.0};
    const std::vector<double> ks = ring.momenta();
    REQUIRE(ks.size() == 6);
    for (double k : ks) {
        const double index = k * 6.0 / (2.0 * std::numbers::pi) - 0.5;
        CHECK(std::abs(index - std::round(index)) < 1e-12);
    }
    CHECK(ring.dispersion(0.0) == doctest::Approx(-2.0));
}

TEST_CASE("the Fermi sea is half filled with projector correlations") {
    const FermionRing ring{8, 1.0};
    const CorrelationMatrix g = ground_correlations(ring);
    CHECK(g.size() == 8);
    CHECK(g.separation_average(0) == doctest::Approx(0.5).epsilon(1e-13));

    // Occupations of a zero-temperature sea are exactly 0 or 1.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.matrix());
    int filled = 0;
    for (int i = 0; i < 8; ++i) {
        const double nu = es.eigenvalues()(i);
        CHECK(std::min(std::abs(nu), std::abs(nu - 1.0)) < 1e-12);
        if (nu > 0.5) ++filled;
    }
    CHECK(filled == 4);
    CHECK(gaussian_entropy(g) < 1e-10);

    CHECK_THROWS_AS(g.separation_average(8), DomainError);
    CHECK_THROWS_AS(g.separation_average(-1), DomainError);
}

TEST_CASE("correlation matrices validate symmetry and occupations") {
    Eigen::MatrixXd asym(2, 2);
    asym << 0.5, 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(CorrelationMatrix{asym}, InvariantError);

    Eigen::MatrixXd hot(2, 2);
    hot << 0.9, 0.4, 0.4, 0.9; // eigenvalue 1.3 is not an occupation
    CHECK_THROWS_AS(CorrelationMatrix{hot}, InvariantError);
}

TEST_CASE("ground correlations match exact diagonalization of the Fock Hamiltonian") {
    const int L = 4;
    const CorrelationMatrix g = ground_correlations(FermionRing{L, 1.0});

    const Eigen::MatrixXcd h = oracle::fock_quadratic(oracle::antiperiodic_hopping(L, 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXcd ground = es.eigenvectors().col(0);
    CHECK(es.eigenvalues()(1) - es.eigenvalues()(0) > 1e-9); // unique sea

    for (int x = 0; x < L; ++x) {
        for (int y = 0; y < L; ++y) {
            const Eigen::MatrixXcd op =
                oracle::annihilator(x, L).adjoint() * oracle::annihilator(y, L);
            const double direct = (ground.adjoint() * op * ground)(0).real();
            CHECK(g.matrix()(x, y) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
    // The nearest-neighbour value at L = 4 is sqrt(2)/4 in closed form.
    CHECK(g.separation_average(1) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-13));
}

TEST_CASE("nearest-neighbour correlation approaches 1/pi") {
    const int L = 200;
    const CorrelationMatrix g = ground_correlations(FermionRing{L, 1.0});

    // Finite-size value is the discrete Riemann sum over the filled modes.
    double sum = 0.0;
    for (double k : FermionRing{L, 1.0}.momenta())
        if (std::cos(k) > 0.0) sum += std::cos(k) / L;
    CHECK(g.separation_average(1) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(std::abs(g.separation_average(1) - 1.0 / std::numbers::pi) < 1e-3);
}

TEST_CASE("density-only fit returns the flat state with zero coupling") {
    const FermionFitReport report = fit_couplings({{0, 0.5}}, 16);
    CHECK(report.converged);
    CHECK(std::abs(report.couplings.lambdas(0)) <= 1e-10);
    CHECK(report.residual <= 1e-10);
    CHECK(report.s_rec == doctest::Approx(16.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("sea targets drive the couplings to the cap with tiny residual") {
    const int L = 32;
    const CorrelationMatrix g = ground_correlations(FermionRing{L, 1.0});
    const FermionFitReport report =
        fit_couplings({{0, g.separation_average(0)}, {1, g.separation_average(1)}}, L);
    CHECK(report.hit_lambda_cap);
    CHECK(report.residual <= 1e-6);
    CHECK(report.s_rec <= 1e-4);
    // Half filling keeps the chemical-potential coupling at zero by symmetry.
    CHECK(std::abs(report.couplings.lambdas(0)) < 1e-6);
}

TEST_CASE("infeasible windows are reported, not fitted") {
    // At half filling no occupation assignment reaches G_1 = 0.45 (the sea
    // itself maxes out near 1/pi), so the fit must admit failure.
    const FermionFitReport report = fit_couplings({{0, 0.5}, {1, 0.45}}, 8);
    CHECK_FALSE(report.converged);
    CHECK(report.residual > 1e-2);
}

TEST_CASE("thermal ansatz states agree with Fock-space exponentials") {
    const int L = 4;
    GaussianCouplings couplings;
    couplings.lambdas = Eigen::VectorXd(2);
    couplings.lambdas << 0.3, -0.8;

    const CorrelationMatrix g = reconstructed_correlations(couplings, L);

    const Eigen::MatrixXcd h = oracle::fock_quadratic(coupling_matrix(couplings, L));
    const Eigen::MatrixXcd boltz = oracle::expm_taylor(-h);
    const Eigen::MatrixXcd rho = boltz / boltz.trace();

    for (int x = 0; x < L; ++x) {
        for (int y = 0; y < L; ++y) {
            const Eigen::MatrixXcd op =
                oracle::annihilator(x, L).adjoint() * oracle::annihilator(y, L);
            const double direct = (rho * op).trace().real();
            CHECK(std::abs(g.matrix()(x, y) - direct) < 1e-10);
        }
    }
    CHECK(std::abs(gaussian_entropy(g) - oracle::entropy_of(rho)) < 1e-6);
}
