#include <benchmark/benchmark.h>

#include <random>
#include <utility>
#include <vector>

#include "qmaxent/fermion.hpp"
#include "qmaxent/models.hpp"
#include "qmaxent/pauli.hpp"
#include "qmaxent/solver.hpp"

using namespace qmaxent;

namespace {

ConstraintSet thermal_constraints(int length, int window) {
    const LocalHamiltonian ham = build_tfim_chain(length, 1.0, 1.2, Geometry::Ring);
    return extract_constraints(thermal_state(ham, 1.0), intervals(ham.layout(), window));
}

Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            g(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    return 0.5 * (g + g.adjoint()).eval();
}

} // namespace

// Hot path of every solve iteration: assemble -sum_i lambda_i O_i in the
// eigenbasis, exponentiate, and read the expectations back out.
static void BM_DualObjective(benchmark::State& state) {
    const int length = static_cast<int>(state.range(0));
    const ConstraintSet cs = thermal_constraints(length, 2);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 0.3);
    Eigen::VectorXd lambdas(cs.size());
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) lambdas(i) = gauss(rng);
    for (auto _ : state) {
        auto value_and_grad = dual_objective(lambdas, cs);
        benchmark::DoNotOptimize(value_and_grad);
    }
}
BENCHMARK(BM_DualObjective)->DenseRange(3, 8)->Unit(benchmark::kMicrosecond);

// End-to-end reconstruction of a thermal chain from two-site windows.
static void BM_SolveThermalChain(benchmark::State& state) {
    const int length = static_cast<int>(state.range(0));
    const ConstraintSet cs = thermal_constraints(length, 2);
    SolverOptions opts;
    opts.tolerance_eps = 1e-8;
    for (auto _ : state) {
        SolveReport report = solve(cs, opts);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_SolveThermalChain)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

static void BM_ExtractConstraints(benchmark::State& state) {
    const int length = static_cast<int>(state.range(0));
    const LocalHamiltonian ham = build_tfim_chain(length, 1.0, 1.2, Geometry::Ring);
    const DensityMatrix rho = thermal_state(ham, 1.0);
    const auto regions = intervals(ham.layout(), 2);
    for (auto _ : state) {
        ConstraintSet cs = extract_constraints(rho, regions);
        benchmark::DoNotOptimize(cs);
    }
}
BENCHMARK(BM_ExtractConstraints)->DenseRange(3, 8)->Unit(benchmark::kMicrosecond);

static void BM_PartialTrace(benchmark::State& state) {
    const int length = static_cast<int>(state.range(0));
    const LocalHamiltonian ham = build_tfim_chain(length, 1.0, 1.2, Geometry::Ring);
    const DensityMatrix rho = thermal_state(ham, 1.0);
    std::vector<int> keep;
    for (int s = 0; s < length / 2; ++s) keep.push_back(s);
    for (auto _ : state) {
        DensityMatrix reduced = partial_trace(rho, keep);
        benchmark::DoNotOptimize(reduced);
    }
}
BENCHMARK(BM_PartialTrace)->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);

static void BM_HermExpm(benchmark::State& state) {
    const Eigen::Index dim = state.range(0);
    std::mt19937_64 rng(11);
    const SystemLayout layout = SystemLayout::open_chain(static_cast<int>(state.range(1)));
    const HermitianOperator a(layout, random_hermitian(dim, rng));
    for (auto _ : state) {
        HermitianOperator e = herm_expm(a);
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(BM_HermExpm)
    ->Args({16, 4})
    ->Args({64, 6})
    ->Args({256, 8})
    ->Args({1024, 10})
    ->Unit(benchmark::kMicrosecond);

// Momentum-space coupling fit against free-sea targets; the endpoint rides
// to the coupling cap, so this exercises the full quasi-Newton + Newton walk.
static void BM_FermionSeaFit(benchmark::State& state) {
    const int length = static_cast<int>(state.range(0));
    const CorrelationMatrix sea = ground_correlations(FermionRing{length, 1.0});
    const std::vector<std::pair<int, double>> window{
        {0, sea.separation_average(0)},
        {1, sea.separation_average(1)},
    };
    for (auto _ : state) {
        FermionFitReport fit = fit_couplings(window, length, {});
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(BM_FermionSeaFit)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
