#include "cmix/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr std::uint64_t kLabelNoise = 0x6c626cULL;
constexpr std::uint64_t kTestStream = 0x747374ULL;

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::function<double(double)> named_target(const std::string& name) {
    if (name == "sin2pi")
        return [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
    if (name == "cos2pi")
        return [](double x) { return std::cos(2.0 * std::numbers::pi * x); };
    if (name == "hat")
        return [](double x) { return 1.0 - 2.0 * std::abs(x - 0.5); };
    throw DomainError("named_target: unknown target '" + name + "'");
}

void RatesSpec::validate() const {
    if (!iid_inputs && system.dimension() != 1)
        throw DomainError("rates experiment: inputs must be 1-dimensional");
    if (sample_sizes.empty()) throw DomainError("rates experiment: no sample sizes");
    for (std::size_t n : sample_sizes)
        if (n < 4) throw DomainError("rates experiment: sample sizes must be >= 4");
    if (seeds.empty()) throw DomainError("rates experiment: no seeds");
    if (!(noise_half_width > 0.0))
        throw DomainError("rates experiment: noise half width must be positive");
    if (!(clip_level > 0.0)) throw DomainError("rates experiment: clip level must be positive");
    if (test_points < 1) throw DomainError("rates experiment: need test points");
    if (selection == SelectionMode::Schedule && !(schedule_smoothness >= 1.0))
        throw DomainError("rates experiment: schedule smoothness must be >= 1");
    (void)named_target(target);
}

RatesResult run_rates_experiment(const RatesSpec& spec, const WorkerPool* pool) {
    spec.validate();
    const auto target = named_target(spec.target);
    const LossSpec loss_spec = LossSpec::least_squares(spec.clip_level);

    struct Job {
        std::size_t n;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t n : spec.sample_sizes)
        for (std::uint64_t seed : spec.seeds) jobs.push_back({n, seed});

    std::vector<RatesRow> rows(jobs.size());
    for_each_index(pool, jobs.size(), [&](std::size_t idx) {
        const auto [n, seed] = jobs[idx];

        // Inputs: chaotic orbit or i.i.d. uniform surrogate.
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 1);
        if (spec.iid_inputs) {
            Rng rng(seed);
            for (std::size_t i = 0; i < n; ++i)
                x(static_cast<Eigen::Index>(i), 0) = rng.uniform01();
        } else {
            Trajectory path = generate_trajectory(spec.system, n, seed);
            for (std::size_t i = 0; i < n; ++i)
                x(static_cast<Eigen::Index>(i), 0) = path.scalar(i);
        }

        Rng label_rng(derive_seed(seed, kLabelNoise));
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            y[static_cast<Eigen::Index>(i)] =
                target(x(static_cast<Eigen::Index>(i), 0)) +
                label_rng.uniform(-spec.noise_half_width, spec.noise_half_width);

        KernelModel model;
        double lambda = 0.0;
        double sigma = 0.0;
        if (spec.selection == SelectionMode::TrainValidation) {
            HyperGrid grid = make_hypergrid(n, 1, spec.grid_cap);
            TvSvmResult tv = tv_svm(x, y, loss_spec, grid);
            model = std::move(tv.model);
            lambda = tv.lambda;
            sigma = tv.sigma;
        } else {
            Schedule s = theoretical_schedule(n, spec.schedule_smoothness, 1);
            lambda = s.lambda;
            sigma = s.sigma;
            model = fit_lssvm(x, y, lambda, GaussianKernel{sigma, 1}, spec.clip_level);
        }

        // Excess risk against the target on a fresh stationary sample. For
        // the least-squares loss this is E (clip(f_hat) - f*)^2.
        Rng test_rng(derive_seed(seed, kTestStream));
        Eigen::MatrixXd test_x(static_cast<Eigen::Index>(spec.test_points), 1);
        if (spec.iid_inputs) {
            for (std::size_t i = 0; i < spec.test_points; ++i)
                test_x(static_cast<Eigen::Index>(i), 0) = test_rng.uniform01();
        } else {
            for (std::size_t i = 0; i < spec.test_points; ++i)
                test_x(static_cast<Eigen::Index>(i), 0) =
                    sample_stationary(spec.system, test_rng)[0];
        }
        Eigen::VectorXd pred = model.predict_batch(test_x, true);
        double excess = 0.0;
        for (std::size_t i = 0; i < spec.test_points; ++i) {
            double diff = pred[static_cast<Eigen::Index>(i)] -
                          target(test_x(static_cast<Eigen::Index>(i), 0));
            excess += diff * diff;
        }
        excess /= static_cast<double>(spec.test_points);

        rows[idx] = RatesRow{n, seed, lambda, sigma, excess};
    });

    RatesResult result;
    result.rows = std::move(rows);
    for (std::size_t n : spec.sample_sizes) {
        std::vector<double> risks;
        for (const auto& row : result.rows)
            if (row.n == n) risks.push_back(row.excess_risk);
        result.median_risk.emplace_back(n, median_of(std::move(risks)));
    }
    if (result.median_risk.size() >= 2) result.slope = loglog_slope(result.median_risk);
    return result;
}

double loglog_slope(const std::vector<std::pair<std::size_t, double>>& points) {
    if (points.size() < 2) throw DomainError("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, v] : points) {
        if (!(v > 0.0)) throw DomainError("loglog_slope: values must be positive");
        double lx = std::log(static_cast<double>(n));
        double ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(points.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace cmix
