#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "cmix/concentration.hpp"
#include "cmix/learners.hpp"
#include "cmix/processes.hpp"
#include "cmix/rng.hpp"

using namespace cmix;

namespace {

Eigen::MatrixXd random_column(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = rng.uniform01();
    return x;
}

void BM_generate_doubling(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        Trajectory t = generate_trajectory(SystemKind::doubling_map(), n, seed++);
        benchmark::DoNotOptimize(t.data.data());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_generate_doubling)->Arg(1 << 14)->Arg(1 << 18);

void BM_generate_logistic(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        Trajectory t = generate_trajectory(SystemKind::logistic_a4(), n, seed++);
        benchmark::DoNotOptimize(t.data.data());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_generate_logistic)->Arg(1 << 14)->Arg(1 << 18);

void BM_empirical_correlation(benchmark::State& state) {
    Trajectory t = generate_trajectory(SystemKind::doubling_map(), 1 << 18, 7);
    StateFunction id = [](std::span<const double> s) { return s[0]; };
    for (auto _ : state) {
        double c = empirical_correlation(t, id, id, 4);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_empirical_correlation);

void BM_kernel_matrix(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Eigen::MatrixXd x = random_column(n, 3);
    GaussianKernel k{0.2, 1};
    for (auto _ : state) {
        Eigen::MatrixXd K = kernel_matrix(k, x);
        benchmark::DoNotOptimize(K.data());
    }
}
BENCHMARK(BM_kernel_matrix)->Arg(256)->Arg(1024);

void BM_fit_lssvm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Eigen::MatrixXd x = random_column(n, 4);
    Rng rng(5);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        y[static_cast<Eigen::Index>(i)] = rng.uniform(-1.0, 1.0);
    GaussianKernel k{0.2, 1};
    for (auto _ : state) {
        KernelModel model = fit_lssvm(x, y, 1e-3, k, 1.0);
        benchmark::DoNotOptimize(model.coefficients.data());
    }
}
BENCHMARK(BM_fit_lssvm)->Arg(256)->Arg(1024);

void BM_fit_quantile(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Eigen::MatrixXd x = random_column(n, 6);
    Rng rng(7);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        y[static_cast<Eigen::Index>(i)] = x(static_cast<Eigen::Index>(i), 0) + rng.uniform(-0.2, 0.2);
    GaussianKernel k{0.2, 1};
    for (auto _ : state) {
        KernelModel model = fit_quantile_svm(x, y, 0.7, 1e-3, k, 1.0);
        benchmark::DoNotOptimize(model.coefficients.data());
    }
}
BENCHMARK(BM_fit_quantile)->Arg(128)->Arg(512);

void BM_tail_bound(benchmark::State& state) {
    FunctionBounds fb{1.0, 0.5, 1.0 / 12.0};
    for (auto _ : state) {
        double v = bernstein_tail_bound(10000, 0.05, fb, 1.0);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_tail_bound);

}  // namespace

BENCHMARK_MAIN();
