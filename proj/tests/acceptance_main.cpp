// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria mix exact formula checks, oracle comparisons and
// Monte Carlo property checks; every tolerance is fixed here in code.
//
// Usage: cmix_acceptance [criterion numbers...]   (default: run all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cmix/concentration.hpp"
#include "cmix/experiments.hpp"
#include "cmix/forecasting.hpp"
#include "cmix/learners.hpp"
#include "cmix/losses.hpp"
#include "cmix/processes.hpp"
#include "cmix/rng.hpp"

using namespace cmix;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

#define EXPECT(cond, message)                                   \
    do {                                                        \
        if (!(cond)) {                                          \
            out.pass = false;                                   \
            out.detail += std::string(" [failed: ") + message + "]"; \
        }                                                       \
    } while (0)

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --------------------------------------------------------------------------
// 1. The tail bound is never violated on chaotic data at Monte Carlo scale.

Outcome criterion_bound_never_violated() {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    const StateFunction h = [](std::span<const double> s) { return s[0] - 0.5; };
    const std::vector<double> eps_grid{0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.2, 0.3};
    const std::size_t replicas = 10000;

    struct Case {
        SystemKind system;
        MixingRate rate;
        FunctionBounds fb;
    };
    const Case cases[] = {
        {SystemKind::doubling_map(), {1.0, std::log(2.0), 1.0}, {1.0, 0.51, 0.09}},
        {SystemKind::logistic_a4(), {1.0, 0.5, 1.0}, {1.0, 0.51, 0.14}},
    };

    for (const auto& c : cases) {
        for (std::size_t n : {std::size_t(2000), std::size_t(10000)}) {
            auto report = mc_validate_tail(c.system, h, c.fb, c.rate, n, eps_grid, replicas,
                                           20260810);
            EXPECT(n >= report.n0, c.system.name() + ": n below threshold");
            for (const auto& row : report.rows)
                EXPECT(!row.violated, c.system.name() + " n=" + std::to_string(n) + " eps=" +
                                          fmt(row.eps) + " tail=" + fmt(row.empirical_tail) +
                                          " > bound=" + fmt(row.bound));
        }
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT(seconds < 300.0, "runtime " + fmt(seconds) + "s exceeds the 5 min target");
    out.detail = " (2 systems x 2 sizes x 8 eps, 10^4 replicas)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 2. Lagged identity correlations of the doubling map match 2^-n / 12.

Outcome criterion_correlation_law() {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    const StateFunction id = [](std::span<const double> s) { return s[0]; };
    Trajectory path = generate_trajectory(SystemKind::doubling_map(), 1000000, 424242);

    for (int lag = 1; lag <= 8; ++lag) {
        // Quadrature oracle: Simpson per linear piece of x * (2^lag x mod 1),
        // exact for the quadratic integrand.
        const double pieces = std::pow(2.0, lag);
        double moment = 0.0;
        for (double j = 0; j < pieces; ++j) {
            double a = j / pieces, b = (j + 1) / pieces;
            auto f = [&](double x) { return x * (pieces * x - j); };
            moment += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
        const double exact = moment - 0.25;

        double emp = empirical_correlation(path, id, id, std::size_t(lag));

        // Batch-means standard error of the lagged products.
        const std::size_t pairs = path.size() - std::size_t(lag);
        const std::size_t batches = 1000, len = pairs / batches;
        std::vector<double> means(batches, 0.0);
        for (std::size_t b = 0; b < batches; ++b) {
            for (std::size_t i = b * len; i < (b + 1) * len; ++i)
                means[b] += path.scalar(i) * path.scalar(i + std::size_t(lag));
            means[b] /= double(len);
        }
        double grand = 0.0;
        for (double m : means) grand += m;
        grand /= double(batches);
        double var = 0.0;
        for (double m : means) var += (m - grand) * (m - grand);
        double se = std::sqrt(var / double(batches - 1) / double(batches));

        EXPECT(std::abs(emp - exact) <= 4.0 * se,
               "lag " + std::to_string(lag) + ": |" + fmt(emp) + " - " + fmt(exact) +
                   "| > 4se=" + fmt(4.0 * se));
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT(seconds < 60.0, "runtime " + fmt(seconds) + "s exceeds the 1 min target");
    out.detail = " (lags 1..8 on a 10^6 path vs quadrature oracle)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 3. Noiseless geometric-rate inputs are recovered exactly.

Outcome criterion_rate_fit_recovery() {
    Outcome out;
    const double combos[6][3] = {{1.0, 1.0, 1.0},   {0.5, 2.0, 0.5},  {2.0, 0.3, 1.5},
                                 {1.7, 1.2, 0.25},  {0.9, 0.8, 2.0},  {3.0, 0.05, 0.75}};
    for (const auto& combo : combos) {
        const double c = combo[0], b = combo[1], gamma = combo[2];
        std::vector<std::pair<double, double>> pts;
        for (int n = 1; n <= 12; ++n)
            pts.emplace_back(n, c * std::exp(-b * std::pow(double(n), gamma)));
        auto fit = fit_geometric_rate(pts);
        std::string tag = "(c=" + fmt(c) + ",b=" + fmt(b) + ",gamma=" + fmt(gamma) + ")";
        EXPECT(fit.rate.gamma == gamma, tag + " gamma off-grid");
        EXPECT(std::abs(fit.rate.c - c) <= 1e-6 * c, tag + " c=" + fmt(fit.rate.c));
        EXPECT(std::abs(fit.rate.b - b) <= 1e-6 * b, tag + " b=" + fmt(fit.rate.b));
    }
    out.detail = " (6 noiseless (c,b,gamma) combinations, 1e-6 relative)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 4. Threshold scan agreement and exhaustive blocking invariants.

Outcome criterion_n0_and_blocking() {
    Outcome out;
    Rng rng(9090);
    for (int trial = 0; trial < 50; ++trial) {
        double c = rng.uniform(0.0, 5.0);
        double A = rng.uniform(0.1, 10.0);
        double B = rng.uniform(0.1, 10.0);
        double gamma = rng.uniform(0.5, 2.0);
        double b = rng.uniform(0.5, 5.0);

        // Independent scan stepping m one by one.
        const double threshold = 808.0 * c * (3.0 * A + B) / B;
        std::uint64_t m = 3;
        while (!(double(m) * double(m) >= threshold &&
                 double(m) / std::pow(std::log(double(m)), 2.0 / gamma) >= 4.0))
            ++m;
        std::uint64_t expected =
            std::max<std::uint64_t>(m, std::uint64_t(std::ceil(std::exp(3.0 / b))));

        std::uint64_t got = bernstein_n0(MixingRate{c, b, gamma}, FunctionBounds{A, B, 0.0});
        EXPECT(got == expected, "n0 mismatch " + std::to_string(got) + " vs " +
                                    std::to_string(expected));
    }

    for (std::size_t n = 1; n <= 500; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            BlockingScheme s = blocking(n, k);
            std::vector<bool> seen(n + 1, false);
            std::size_t total = 0;
            bool ok = s.blocks.size() == k;
            for (std::size_t i = 0; ok && i < k; ++i) {
                std::size_t expect_len = s.block_length + (i < s.remainder ? 1 : 0);
                if (s.blocks[i].size() != expect_len) ok = false;
                total += s.blocks[i].size();
                for (std::size_t idx : s.blocks[i]) {
                    if (idx < 1 || idx > n || seen[idx]) {
                        ok = false;
                        break;
                    }
                    seen[idx] = true;
                }
            }
            if (ok && total != n) ok = false;
            EXPECT(ok, "blocking invariant broken at n=" + std::to_string(n) +
                           " k=" + std::to_string(k));
            if (!ok) return out;
        }
    }
    out.detail = " (50 random constants; all partitions n <= 500)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 5. LS-SVM analytic checks.

Outcome criterion_lssvm_checks() {
    Outcome out;
    GaussianKernel kernel{0.3, 1};

    for (double lambda : {1.0, 0.25, 1e-3}) {
        Eigen::MatrixXd x(1, 1);
        x << 0.7;
        Eigen::VectorXd y(1);
        y << 1.0;
        auto model = fit_lssvm(x, y, lambda, kernel, 1.0);
        EXPECT(std::abs(model.coefficients[0] - 1.0 / (1.0 + lambda)) <= 1e-12,
               "single-point coefficient at lambda=" + fmt(lambda));
    }

    Rng rng(5050);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 200;
        Eigen::MatrixXd x(n, 1);
        Eigen::VectorXd y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x(Eigen::Index(i), 0) = rng.uniform01();
            y[Eigen::Index(i)] = std::sin(2.0 * std::numbers::pi * x(Eigen::Index(i), 0)) +
                                 rng.uniform(-0.2, 0.2);
        }
        for (double lambda : {1.0, 1e-2, 1e-4}) {
            auto model = fit_lssvm(x, y, lambda, kernel, 2.0);
            Eigen::MatrixXd K = kernel_matrix(kernel, x);
            double resid = ((K + double(n) * lambda * Eigen::MatrixXd::Identity(n, n)) *
                                model.coefficients -
                            y)
                               .cwiseAbs()
                               .maxCoeff();
            EXPECT(resid < 1e-8 * y.cwiseAbs().maxCoeff(),
                   "normal-equation residual " + fmt(resid) + " at lambda=" + fmt(lambda));
        }

        Eigen::VectorXd smooth(n);
        for (std::size_t i = 0; i < n; ++i)
            smooth[Eigen::Index(i)] = std::sin(2.0 * std::numbers::pi * x(Eigen::Index(i), 0));
        auto interp = fit_lssvm(x, smooth, 1e-10, kernel, 2.0);
        double mse = (interp.predict_batch(x) - smooth).squaredNorm() / double(n);
        EXPECT(mse < 1e-6, "interpolation MSE " + fmt(mse));
    }
    out.detail = " (exact 1-point solve; residual < 1e-8; interpolation MSE < 1e-6)" +
                 out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 6. Quantile SVM matches the sorted-order quantile oracle.

Outcome criterion_quantile_recovery() {
    Outcome out;
    Rng rng(6060);
    for (std::size_t n : {std::size_t(7), std::size_t(9), std::size_t(13)}) {
        Eigen::MatrixXd x = Eigen::MatrixXd::Constant(Eigen::Index(n), 1, 0.4);
        std::vector<double> ys(n);
        for (auto& v : ys) v = rng.uniform(-1.0, 1.0);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(Eigen::Index(n));
        for (std::size_t i = 0; i < n; ++i) y[Eigen::Index(i)] = ys[i];

        Eigen::RowVectorXd probe(1);
        probe << 0.4;
        for (double tau : {0.1, 0.5, 0.9}) {
            std::vector<double> sorted = ys;
            std::sort(sorted.begin(), sorted.end());
            double oracle = sorted[std::size_t(std::ceil(tau * double(n))) - 1];

            auto model = fit_quantile_svm(x, y, tau, 1e-8, GaussianKernel{0.5, 1}, 2.0);
            double got = model.predict(probe);
            EXPECT(std::abs(got - oracle) < 1e-3,
                   "n=" + std::to_string(n) + " tau=" + fmt(tau) + ": " + fmt(got) + " vs " +
                       fmt(oracle));
        }
    }
    out.detail = " (taus {0.1, 0.5, 0.9} on 3 repeated-x datasets, 1e-3)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 7. Learning-rate trend of the TV-SVM on chaotic vs i.i.d. inputs.

Outcome criterion_learning_rate_trend() {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    RatesSpec spec;
    spec.system = SystemKind::doubling_map();
    spec.target = "sin2pi";
    spec.noise_half_width = 0.2;
    spec.sample_sizes = {250, 500, 1000, 2000, 4000};
    for (std::uint64_t s = 1; s <= 10; ++s) spec.seeds.push_back(s);
    spec.grid_cap = 6;
    spec.test_points = 100000;

    RatesResult chain = run_rates_experiment(spec);
    spec.iid_inputs = true;
    RatesResult iid = run_rates_experiment(spec);

    double slope_chain = chain.slope.value();
    double slope_iid = iid.slope.value();
    EXPECT(slope_chain <= -0.35, "chain slope " + fmt(slope_chain) + " > -0.35");
    EXPECT(std::abs(slope_chain - slope_iid) <= 0.2,
           "slope gap " + fmt(std::abs(slope_chain - slope_iid)) + " > 0.2");
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT(seconds < 1200.0, "runtime " + fmt(seconds) + "s exceeds the 20 min target");
    out.detail = " (chain slope " + fmt(slope_chain) + ", iid slope " + fmt(slope_iid) + ")" +
                 out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 8. Monte Carlo check of the k-spaced product moment inequality.

Outcome criterion_product_moment() {
    Outcome out;
    Rng rng(8080);
    MixingRate rate{1.0, std::log(2.0), 1.0};
    int checked = 0;
    while (checked < 10) {
        double a = rng.uniform(0.1, 0.5);
        double b = rng.uniform(0.1, 1.0);
        auto k = std::size_t(8 + rng.uniform01() * 8.0);
        auto l = std::size_t(1 + rng.uniform01() * 4.0);
        StateFunction f = [a, b](std::span<const double> s) { return a + b * s[0]; };
        FunctionBounds fb{b, a + b, (a + b) * (a + b)};

        auto report = block_product_moment_check(SystemKind::doubling_map(), f, fb, rate, k, l,
                                                 100000, 7000 + checked);
        if (!report.assumption_satisfied) continue;  // criterion covers satisfied configs
        ++checked;
        EXPECT(report.holds, "config " + std::to_string(checked) + ": lhs=" +
                                 fmt(report.lhs_mc) + " rhs=" + fmt(report.rhs) +
                                 " se=" + fmt(report.lhs_se));
    }
    out.detail = " (10 random (f, k, l) configurations, 10^5 replicas each)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 9. Clipping and exponential-inequality sweeps.

Outcome criterion_sweeps() {
    Outcome out;
    Rng rng(9091);

    std::vector<std::pair<double, double>> samples;
    samples.reserve(10000);
    for (int i = 0; i < 10000; ++i)
        samples.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-6.0, 6.0));
    EXPECT(clipping_reduces_loss(LossSpec::least_squares(1.0), samples),
           "least-squares clipping sweep");
    EXPECT(clipping_reduces_loss(LossSpec::pinball(0.35, 1.0), samples),
           "pinball clipping sweep");

    int failures = 0;
    const SeminormKind kinds[] = {SeminormKind::BoundedVariation, SeminormKind::Lipschitz,
                                  SeminormKind::Hoelder};
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t pts = 2 + std::size_t(rng.uniform01() * 20.0);
        std::vector<double> xs(pts), ys(pts);
        xs[0] = rng.uniform01() * 0.01;
        for (std::size_t i = 1; i < pts; ++i) xs[i] = xs[i - 1] + 0.01 + rng.uniform01();
        for (auto& v : ys) v = rng.uniform(-3.0, 3.0);
        SampledFunction f = SampledFunction::on_grid(xs, ys, 0.5);
        if (!check_exp_property(f, kinds[trial % 3]).holds) ++failures;
    }
    EXPECT(failures == 0, std::to_string(failures) + " exp-property failures");
    out.detail = " (10^4 clipping cases per loss, 10^4 exp-property cases)" + out.detail;
    return out;
}

// --------------------------------------------------------------------------
// 10. Forecasting: exact separability and a real win over the baseline.

Outcome criterion_forecasting() {
    Outcome out;
    const auto loss_spec = LossSpec::least_squares(1.0);

    {
        auto system = SystemKind::cat_map_2d();
        NoiseModel noise{0.05, 2};
        auto ds = build_pairs(system, noise, 400, 1001);
        HyperGrid grid;
        grid.lambdas = {1e-4, 1e-2};
        grid.sigmas = {0.1, 0.3};
        auto forecaster = train_forecaster(ds, loss_spec, grid);
        auto risk = forecast_risk_mc(forecaster, system, noise, loss_spec, 20000, 2002);
        double c0 = coordinate_forecast_risk_mc(forecaster.models[0], 0, system, noise,
                                                loss_spec, 20000, 2002);
        double c1 = coordinate_forecast_risk_mc(forecaster.models[1], 1, system, noise,
                                                loss_spec, 20000, 2002);
        EXPECT(risk.total == c0 + c1, "vector risk " + fmt(risk.total) +
                                          " != coordinate sum " + fmt(c0 + c1));
    }

    {
        auto system = SystemKind::doubling_map();
        NoiseModel noise{1e-3, 1};
        auto ds = build_pairs(system, noise, 2000, 3003);
        HyperGrid grid = make_hypergrid(ds.pairs(), 1, 6);
        auto forecaster = train_forecaster(ds, loss_spec, grid);

        auto trained = forecast_risk_mc(forecaster, system, noise, loss_spec, 100000, 4004);
        auto zero = forecast_risk_mc(zero_forecaster(1, 1.0), system, noise, loss_spec,
                                     100000, 4004);
        EXPECT(std::abs(zero.total - 1.0 / 3.0) <= 4.0 * zero.std_error + 1e-6,
               "zero-forecaster risk " + fmt(zero.total) + " is not ~1/3");
        EXPECT(zero.total >= 5.0 * trained.total,
               "improvement factor " + fmt(zero.total / trained.total) + " < 5");
        out.detail = " (zero risk " + fmt(zero.total) + ", trained risk " +
                     fmt(trained.total) + ")" + out.detail;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "tail bound never violated", criterion_bound_never_violated},
        {2, "exact correlation law", criterion_correlation_law},
        {3, "rate-fit recovery", criterion_rate_fit_recovery},
        {4, "n0 and blocking exactness", criterion_n0_and_blocking},
        {5, "ls-svm analytic checks", criterion_lssvm_checks},
        {6, "quantile recovery", criterion_quantile_recovery},
        {7, "learning-rate trend", criterion_learning_rate_trend},
        {8, "product moment inequality", criterion_product_moment},
        {9, "clipping and exp-property sweeps", criterion_sweeps},
        {10, "forecasting separability and baseline win", criterion_forecasting},
    };

    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end())
            continue;
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string(" [exception: ") + e.what() + "]";
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %2d: %s%s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, outcome.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
