#ifndef CMIX_EXPERIMENTS_HPP
#define CMIX_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmix/learners.hpp"
#include "cmix/processes.hpp"
#include "cmix/worker_pool.hpp"

namespace cmix {

// Scalar regression targets available to the rate experiments by name:
// "sin2pi", "cos2pi", "hat".
std::function<double(double)> named_target(const std::string& name);

enum class SelectionMode { TrainValidation, Schedule };

// Learning-rate experiment: draw inputs (chaotic orbit or i.i.d. uniform
// surrogate), label them with a smooth target plus bounded noise, train a
// least-squares SVM per sample size and measure the excess risk
// E (clip(f_hat(x)) - f*(x))^2 on a fresh stationary test set.
struct RatesSpec {
    bool iid_inputs = false;                       // uniform surrogate instead of the orbit
    SystemKind system = SystemKind::doubling_map();  // 1-d systems only
    std::string target = "sin2pi";
    double noise_half_width = 0.2;
    std::vector<std::size_t> sample_sizes;
    std::vector<std::uint64_t> seeds;
    double clip_level = 1.0;
    std::size_t grid_cap = 8;          // per-axis cap of the hyperparameter net
    std::size_t test_points = 100000;
    SelectionMode selection = SelectionMode::TrainValidation;
    double schedule_smoothness = 1.0;  // t for SelectionMode::Schedule

    void validate() const;
};

struct RatesRow {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double sigma = 0.0;
    double excess_risk = 0.0;
};

struct RatesResult {
    std::vector<RatesRow> rows;  // ordered by (n, seed)
    std::vector<std::pair<std::size_t, double>> median_risk;  // per sample size
    std::optional<double> slope;  // log-log slope of the medians; absent for < 2 sizes
};

RatesResult run_rates_experiment(const RatesSpec& spec, const WorkerPool* pool = nullptr);

// Least-squares slope of log(y) against log(n).
double loglog_slope(const std::vector<std::pair<std::size_t, double>>& points);

}  // namespace cmix

#endif
