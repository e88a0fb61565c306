#ifndef CMIX_FORECASTING_HPP
#define CMIX_FORECASTING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cmix/learners.hpp"
#include "cmix/processes.hpp"

namespace cmix {

// Consecutive noisy observation pairs (X_{i-1}, X_i) with X_i = T^i(S0) + eps_i.
// The input of pair i+1 is the output of pair i by construction.
struct ForecastDataset {
    Eigen::MatrixXd inputs;   // (n-1) x d
    Eigen::MatrixXd outputs;  // (n-1) x d
    SystemKind system;
    NoiseModel noise;
    std::uint64_t seed = 0;

    std::size_t pairs() const { return static_cast<std::size_t>(inputs.rows()); }
    int dim() const { return static_cast<int>(inputs.cols()); }
};

// Generates n observations of the noisy orbit and forms the n-1 pairs.
ForecastDataset build_pairs(const SystemKind& system, const NoiseModel& noise,
                            std::size_t n, std::uint64_t seed);

// Scalar training set for coordinate j (0-based): inputs stay d-dimensional,
// outputs are projected onto coordinate j.
struct CoordinateDataset {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd outputs;
};

CoordinateDataset project_coordinate(const ForecastDataset& ds, int coordinate);

struct CoordinateFit {
    int coordinate = 0;  // 0-based
    double lambda = 0.0;
    double sigma = 0.0;
    double train_risk = 0.0;       // empirical risk of the clipped fit on its split
    double validation_risk = 0.0;  // selection risk on the held-out split
};

// One kernel model per coordinate; prediction is componentwise.
struct VectorForecaster {
    std::vector<KernelModel> models;
    std::vector<CoordinateFit> fits;

    int dim() const { return static_cast<int>(models.size()); }
    Eigen::RowVectorXd predict(const Eigen::RowVectorXd& x, bool clipped = true) const;
};

// Forecaster that predicts 0 in every coordinate (baseline).
VectorForecaster zero_forecaster(int dim, double clip_level);

// Trains one TV-SVM per output coordinate on the projected training sets.
VectorForecaster train_forecaster(const ForecastDataset& ds, const LossSpec& loss_spec,
                                  const HyperGrid& grid, const WorkerPool* pool = nullptr);

struct ForecastRisk {
    double total = 0.0;                  // sum of the per-coordinate risks
    std::vector<double> per_coordinate;  // Monte Carlo mean of psi(residual_j)
    std::vector<double> per_coordinate_se;
    double std_error = 0.0;              // of the total per-replica loss
};

// Monte Carlo forecast risk: averages the separable loss
// sum_j psi((T(x) + eps1 - f(x + eps0))_j) over fresh stationary states and
// fresh noise. total is computed as the sum of the per-coordinate averages,
// so it matches coordinate_forecast_risk_mc run with the same seed exactly.
ForecastRisk forecast_risk_mc(const VectorForecaster& forecaster, const SystemKind& system,
                              const NoiseModel& noise, const LossSpec& loss_spec,
                              std::size_t mc_n, std::uint64_t seed,
                              const WorkerPool* pool = nullptr);

// Risk of a single coordinate model, using draw-for-draw the same randomness
// as forecast_risk_mc (all d noise components are consumed either way).
double coordinate_forecast_risk_mc(const KernelModel& model, int coordinate,
                                   const SystemKind& system, const NoiseModel& noise,
                                   const LossSpec& loss_spec, std::size_t mc_n,
                                   std::uint64_t seed, const WorkerPool* pool = nullptr);

}  // namespace cmix

#endif
