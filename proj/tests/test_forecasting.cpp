#include <doctest.h>

#include <cmath>
#include <vector>

#include "cmix/errors.hpp"
#include "cmix/forecasting.hpp"

using namespace cmix;

namespace {

// Simpson quadrature of int_0^1 (2x mod 1)^2 dx = 1/3 (exact per piece).
double doubling_square_moment() {
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
        double a = j / 2.0, b = (j + 1) / 2.0;
        auto f = [&](double x) { return std::pow(2.0 * x - j, 2.0); };
        total += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    return total;
}

HyperGrid small_grid() {
    HyperGrid g;
    g.lambdas = {1e-5, 1e-3, 1e-1};
    g.sigmas = {0.05, 0.15, 0.4};
    return g;
}

}  // namespace

TEST_SUITE_BEGIN("forecasting");

TEST_CASE("build_pairs basics") {
    auto ds = build_pairs(SystemKind::doubling_map(), NoiseModel{0.01, 1}, 2, 17);
    CHECK(ds.pairs() == 1);

    auto ds2 = build_pairs(SystemKind::doubling_map(), NoiseModel{0.01, 1}, 50, 17);
    CHECK(ds2.pairs() == 49);
    for (std::size_t i = 0; i + 1 < ds2.pairs(); ++i)
        CHECK(ds2.inputs(Eigen::Index(i + 1), 0) == ds2.outputs(Eigen::Index(i), 0));

    // Vanishing noise reproduces the clean orbit.
    auto tiny = build_pairs(SystemKind::doubling_map(), NoiseModel{1e-12, 1}, 50, 17);
    Trajectory clean = generate_trajectory(SystemKind::doubling_map(), 50, 17);
    for (std::size_t i = 0; i < tiny.pairs(); ++i) {
        CHECK(std::abs(tiny.inputs(Eigen::Index(i), 0) - clean.scalar(i)) <= 1e-12);
        CHECK(std::abs(tiny.outputs(Eigen::Index(i), 0) - clean.scalar(i + 1)) <= 1e-12);
    }

    auto again = build_pairs(SystemKind::doubling_map(), NoiseModel{0.01, 1}, 50, 17);
    CHECK(again.inputs == ds2.inputs);
    CHECK(again.outputs == ds2.outputs);

    CHECK_THROWS_AS(build_pairs(SystemKind::doubling_map(), NoiseModel{0.01, 1}, 1, 17),
                    DomainError);
    CHECK_THROWS_AS(build_pairs(SystemKind::doubling_map(), NoiseModel{0.01, 2}, 10, 17),
                    DomainError);
}

TEST_CASE("coordinate projection") {
    auto ds = build_pairs(SystemKind::cat_map_2d(), NoiseModel{0.01, 2}, 30, 3);
    auto c0 = project_coordinate(ds, 0);
    auto c1 = project_coordinate(ds, 1);
    CHECK(c0.inputs.rows() == Eigen::Index(ds.pairs()));
    CHECK(c0.outputs == ds.outputs.col(0));
    CHECK(c1.outputs == ds.outputs.col(1));
    CHECK_THROWS_AS(project_coordinate(ds, 2), DomainError);
    CHECK_THROWS_AS(project_coordinate(ds, -1), DomainError);

    auto ds1 = build_pairs(SystemKind::doubling_map(), NoiseModel{0.01, 1}, 30, 3);
    auto only = project_coordinate(ds1, 0);
    CHECK(only.outputs == ds1.outputs.col(0));
}

TEST_CASE("one-dimensional training reduces to a single tv-svm") {
    auto ds = build_pairs(SystemKind::doubling_map(), NoiseModel{0.02, 1}, 200, 5);
    auto forecaster = train_forecaster(ds, LossSpec::least_squares(1.0), small_grid());
    REQUIRE(forecaster.models.size() == 1);

    auto direct = tv_svm(ds.inputs, ds.outputs.col(0), LossSpec::least_squares(1.0),
                         small_grid());
    CHECK(forecaster.fits[0].lambda == direct.lambda);
    CHECK(forecaster.fits[0].sigma == direct.sigma);
    CHECK(forecaster.models[0].coefficients == direct.model.coefficients);
}

TEST_CASE("cat map trains one model per coordinate") {
    auto ds = build_pairs(SystemKind::cat_map_2d(), NoiseModel{0.02, 2}, 160, 6);
    auto forecaster = train_forecaster(ds, LossSpec::least_squares(1.0), small_grid());
    REQUIRE(forecaster.models.size() == 2);
    CHECK(forecaster.fits[0].coordinate == 0);
    CHECK(forecaster.fits[1].coordinate == 1);
    for (const auto& model : forecaster.models) CHECK(model.support_points.cols() == 2);
}

TEST_CASE("zero forecaster risk matches the quadrature value 1/3") {
    CHECK(doubling_square_moment() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto zero = zero_forecaster(1, 1.0);
    auto risk = forecast_risk_mc(zero, SystemKind::doubling_map(), NoiseModel{1e-8, 1},
                                 LossSpec::least_squares(1.0), 200000, 77);
    CHECK(std::abs(risk.total - 1.0 / 3.0) <= 4.0 * risk.std_error);
}

TEST_CASE("vector risk equals the sum of coordinate risks exactly") {
    auto system = SystemKind::cat_map_2d();
    NoiseModel noise{0.05, 2};
    auto loss_spec = LossSpec::least_squares(1.0);

    auto zero = zero_forecaster(2, 1.0);
    auto risk = forecast_risk_mc(zero, system, noise, loss_spec, 5000, 123);
    REQUIRE(risk.per_coordinate.size() == 2);
    CHECK(risk.total == risk.per_coordinate[0] + risk.per_coordinate[1]);

    double c0 = coordinate_forecast_risk_mc(zero.models[0], 0, system, noise, loss_spec,
                                            5000, 123);
    double c1 = coordinate_forecast_risk_mc(zero.models[1], 1, system, noise, loss_spec,
                                            5000, 123);
    CHECK(risk.per_coordinate[0] == c0);
    CHECK(risk.per_coordinate[1] == c1);
    CHECK(risk.total == c0 + c1);

    // Same identity for a trained forecaster.
    auto ds = build_pairs(system, noise, 160, 9);
    auto trained = train_forecaster(ds, loss_spec, small_grid());
    auto trained_risk = forecast_risk_mc(trained, system, noise, loss_spec, 3000, 321);
    double t0 = coordinate_forecast_risk_mc(trained.models[0], 0, system, noise, loss_spec,
                                            3000, 321);
    double t1 = coordinate_forecast_risk_mc(trained.models[1], 1, system, noise, loss_spec,
                                            3000, 321);
    CHECK(trained_risk.total == t0 + t1);
}

TEST_CASE("trained forecaster beats the zero baseline") {
    auto system = SystemKind::doubling_map();
    NoiseModel noise{0.05, 1};
    auto loss_spec = LossSpec::least_squares(1.0);
    auto ds = build_pairs(system, noise, 600, 31);
    auto trained = train_forecaster(ds, loss_spec, small_grid());
    auto trained_risk = forecast_risk_mc(trained, system, noise, loss_spec, 40000, 99);
    auto zero_risk = forecast_risk_mc(zero_forecaster(1, 1.0), system, noise, loss_spec,
                                      40000, 99);
    CHECK(trained_risk.total < zero_risk.total);
}

TEST_CASE("risk decreases with the sample size") {
    auto system = SystemKind::doubling_map();
    NoiseModel noise{0.05, 1};
    auto loss_spec = LossSpec::least_squares(1.0);
    std::vector<double> risks, ses;
    for (std::size_t n : {200, 800, 3200}) {
        auto ds = build_pairs(system, noise, n, 41);
        auto forecaster = train_forecaster(ds, loss_spec, small_grid());
        auto risk = forecast_risk_mc(forecaster, system, noise, loss_spec, 50000, 7);
        risks.push_back(risk.total);
        ses.push_back(risk.std_error);
    }
    for (std::size_t i = 1; i < risks.size(); ++i)
        CHECK(risks[i] <= risks[i - 1] + 2.0 * std::sqrt(ses[i] * ses[i] + ses[i - 1] * ses[i - 1]));
}

TEST_CASE("iid-resampled inputs learn comparably to the chain") {
    auto system = SystemKind::doubling_map();
    NoiseModel noise{0.05, 1};
    auto loss_spec = LossSpec::least_squares(1.0);
    const std::size_t n = 800;
    const int seeds = 5;

    std::vector<double> chain_risks, iid_risks;
    for (int s = 0; s < seeds; ++s) {
        auto ds = build_pairs(system, noise, n, 100 + s);
        auto chain = train_forecaster(ds, loss_spec, small_grid());
        chain_risks.push_back(
            forecast_risk_mc(chain, system, noise, loss_spec, 50000, 500 + s).total);

        // Same regression problem with independent stationary inputs.
        Rng rng(200 + s);
        Eigen::MatrixXd x(n - 1, 1);
        Eigen::VectorXd y(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double xi = rng.uniform01();
            double noisy_in = xi + rng.uniform(-noise.half_width, noise.half_width);
            double noisy_out = iterate(system, std::vector<double>{xi})[0] +
                               rng.uniform(-noise.half_width, noise.half_width);
            x(Eigen::Index(i), 0) = noisy_in;
            y[Eigen::Index(i)] = noisy_out;
        }
        auto tv = tv_svm(x, y, loss_spec, small_grid());
        VectorForecaster iid;
        iid.models.push_back(tv.model);
        iid_risks.push_back(
            forecast_risk_mc(iid, system, noise, loss_spec, 50000, 700 + s).total);
    }

    auto mean_sd = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        var /= double(v.size() - 1);
        return std::pair<double, double>{m, std::sqrt(var)};
    };
    auto [mc, sc] = mean_sd(chain_risks);
    auto [mi, si] = mean_sd(iid_risks);
    double se = std::sqrt(sc * sc / seeds + si * si / seeds);
    CHECK(std::abs(mc - mi) <= 3.0 * se + 1e-12);
}

TEST_SUITE_END();
