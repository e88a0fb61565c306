#include "cmix/forecasting.hpp"

#include <cmath>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr std::uint64_t kObservationNoise = 0x6f6273ULL;

// Per-replica draws for the risk integral, in a fixed order so that vector
// and single-coordinate evaluations consume identical randomness.
struct RiskDraw {
    std::vector<double> state;      // stationary x
    std::vector<double> next;       // T(x)
    std::vector<double> noise_in;   // eps0
    std::vector<double> noise_out;  // eps1
};

RiskDraw make_risk_draw(const SystemKind& system, const NoiseModel& noise,
                        std::uint64_t seed) {
    Rng rng(seed);
    RiskDraw draw;
    draw.state = sample_stationary(system, rng);
    draw.next = iterate(system, draw.state);
    const int d = system.dimension();
    draw.noise_in.resize(d);
    draw.noise_out.resize(d);
    for (int c = 0; c < d; ++c)
        draw.noise_in[static_cast<std::size_t>(c)] =
            rng.uniform(-noise.half_width, noise.half_width);
    for (int c = 0; c < d; ++c)
        draw.noise_out[static_cast<std::size_t>(c)] =
            rng.uniform(-noise.half_width, noise.half_width);
    return draw;
}

}  // namespace

ForecastDataset build_pairs(const SystemKind& system, const NoiseModel& noise,
                            std::size_t n, std::uint64_t seed) {
    noise.validate();
    if (n < 2) throw DomainError("build_pairs: need n >= 2 observations");
    if (noise.dim != system.dimension())
        throw DomainError("build_pairs: noise dimension does not match the system");

    Trajectory path = generate_trajectory(system, n, seed);
    std::vector<double> observed = add_noise(path, noise, derive_seed(seed, kObservationNoise));

    const int d = system.dimension();
    ForecastDataset ds;
    ds.system = system;
    ds.noise = noise;
    ds.seed = seed;
    ds.inputs.resize(static_cast<Eigen::Index>(n - 1), d);
    ds.outputs.resize(static_cast<Eigen::Index>(n - 1), d);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (int c = 0; c < d; ++c) {
            ds.inputs(static_cast<Eigen::Index>(i), c) =
                observed[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
            ds.outputs(static_cast<Eigen::Index>(i), c) =
                observed[(i + 1) * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
        }
    }
    return ds;
}

CoordinateDataset project_coordinate(const ForecastDataset& ds, int coordinate) {
    if (coordinate < 0 || coordinate >= ds.dim())
        throw DomainError("project_coordinate: coordinate out of range");
    return CoordinateDataset{ds.inputs, ds.outputs.col(coordinate)};
}

Eigen::RowVectorXd VectorForecaster::predict(const Eigen::RowVectorXd& x, bool clipped) const {
    Eigen::RowVectorXd out(dim());
    for (int j = 0; j < dim(); ++j) {
        const auto& model = models[static_cast<std::size_t>(j)];
        out[j] = clipped ? model.predict_clipped(x) : model.predict(x);
    }
    return out;
}

VectorForecaster zero_forecaster(int dim, double clip_level) {
    if (dim < 1) throw DomainError("zero_forecaster: dimension must be >= 1");
    VectorForecaster f;
    f.models.resize(static_cast<std::size_t>(dim));
    for (auto& model : f.models) {
        model.support_points.resize(0, dim);
        model.coefficients.resize(0);
        model.kernel = GaussianKernel{1.0, dim};
        model.clip_level = clip_level;
    }
    return f;
}

VectorForecaster train_forecaster(const ForecastDataset& ds, const LossSpec& loss_spec,
                                  const HyperGrid& grid, const WorkerPool* pool) {
    if (ds.pairs() == 0) throw DomainError("train_forecaster: empty dataset");
    VectorForecaster forecaster;
    const int d = ds.dim();
    forecaster.models.resize(static_cast<std::size_t>(d));
    forecaster.fits.resize(static_cast<std::size_t>(d));

    for_each_index(pool, static_cast<std::size_t>(d), [&](std::size_t j) {
        CoordinateDataset cd = project_coordinate(ds, static_cast<int>(j));
        TvSvmResult tv = tv_svm(cd.inputs, cd.outputs, loss_spec, grid);

        CoordinateFit fit;
        fit.coordinate = static_cast<int>(j);
        fit.lambda = tv.lambda;
        fit.sigma = tv.sigma;
        fit.validation_risk = tv.validation_risk;
        const auto mi = static_cast<Eigen::Index>(tv.split);
        Eigen::VectorXd train_pred = tv.model.predict_batch(cd.inputs.topRows(mi), true);
        fit.train_risk = empirical_risk(
            loss_spec, {cd.outputs.data(), static_cast<std::size_t>(mi)},
            {train_pred.data(), static_cast<std::size_t>(train_pred.size())});

        forecaster.models[j] = std::move(tv.model);
        forecaster.fits[j] = fit;
    });
    return forecaster;
}

ForecastRisk forecast_risk_mc(const VectorForecaster& forecaster, const SystemKind& system,
                              const NoiseModel& noise, const LossSpec& loss_spec,
                              std::size_t mc_n, std::uint64_t seed, const WorkerPool* pool) {
    noise.validate();
    loss_spec.validate();
    if (mc_n < 1) throw DomainError("forecast_risk_mc: need mc_n >= 1");
    const int d = system.dimension();
    if (forecaster.dim() != d)
        throw DomainError("forecast_risk_mc: forecaster dimension does not match the system");

    // Per-replica, per-coordinate losses; reduced sequentially afterwards.
    std::vector<double> losses(mc_n * static_cast<std::size_t>(d));
    for_each_index(pool, mc_n, [&](std::size_t r) {
        RiskDraw draw = make_risk_draw(system, noise, seed + r);
        Eigen::RowVectorXd input(d);
        for (int c = 0; c < d; ++c)
            input[c] = draw.state[static_cast<std::size_t>(c)] +
                       draw.noise_in[static_cast<std::size_t>(c)];
        for (int j = 0; j < d; ++j) {
            double target = draw.next[static_cast<std::size_t>(j)] +
                            draw.noise_out[static_cast<std::size_t>(j)];
            double pred = forecaster.models[static_cast<std::size_t>(j)].predict_clipped(input);
            losses[r * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
                loss(loss_spec, target, pred);
        }
    });

    ForecastRisk risk;
    risk.per_coordinate.assign(static_cast<std::size_t>(d), 0.0);
    risk.per_coordinate_se.assign(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t r = 0; r < mc_n; ++r)
            sum += losses[r * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        double mean = sum / static_cast<double>(mc_n);
        double var = 0.0;
        for (std::size_t r = 0; r < mc_n; ++r) {
            double v = losses[r * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
            var += (v - mean) * (v - mean);
        }
        var /= std::max<double>(1.0, static_cast<double>(mc_n - 1));
        risk.per_coordinate[static_cast<std::size_t>(j)] = mean;
        risk.per_coordinate_se[static_cast<std::size_t>(j)] =
            std::sqrt(var / static_cast<double>(mc_n));
    }
    risk.total = 0.0;
    for (double v : risk.per_coordinate) risk.total += v;

    double mean_total = risk.total;
    double var = 0.0;
    for (std::size_t r = 0; r < mc_n; ++r) {
        double t = 0.0;
        for (int j = 0; j < d; ++j)
            t += losses[r * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        var += (t - mean_total) * (t - mean_total);
    }
    var /= std::max<double>(1.0, static_cast<double>(mc_n - 1));
    risk.std_error = std::sqrt(var / static_cast<double>(mc_n));
    return risk;
}

double coordinate_forecast_risk_mc(const KernelModel& model, int coordinate,
                                   const SystemKind& system, const NoiseModel& noise,
                                   const LossSpec& loss_spec, std::size_t mc_n,
                                   std::uint64_t seed, const WorkerPool* pool) {
    noise.validate();
    loss_spec.validate();
    if (mc_n < 1) throw DomainError("coordinate_forecast_risk_mc: need mc_n >= 1");
    const int d = system.dimension();
    if (coordinate < 0 || coordinate >= d)
        throw DomainError("coordinate_forecast_risk_mc: coordinate out of range");

    std::vector<double> losses(mc_n);
    for_each_index(pool, mc_n, [&](std::size_t r) {
        RiskDraw draw = make_risk_draw(system, noise, seed + r);
        Eigen::RowVectorXd input(d);
        for (int c = 0; c < d; ++c)
            input[c] = draw.state[static_cast<std::size_t>(c)] +
                       draw.noise_in[static_cast<std::size_t>(c)];
        double target = draw.next[static_cast<std::size_t>(coordinate)] +
                        draw.noise_out[static_cast<std::size_t>(coordinate)];
        losses[r] = loss(loss_spec, target, model.predict_clipped(input));
    });

    double sum = 0.0;
    for (double v : losses) sum += v;
    return sum / static_cast<double>(mc_n);
}

}  // namespace cmix
