#ifndef CMIX_LEARNERS_HPP
#define CMIX_LEARNERS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cmix/losses.hpp"
#include "cmix/worker_pool.hpp"

namespace cmix {

// Gaussian RBF kernel k(x, x') = exp(-||x - x'||_2^2 / sigma^2).
struct GaussianKernel {
    double width = 1.0;  // sigma > 0
    int dim = 1;

    double operator()(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) const;
    void validate() const;
};

// K[i][j] = k(x_i, x_j); symmetric with unit diagonal.
Eigen::MatrixXd kernel_matrix(const GaussianKernel& kernel, const Eigen::MatrixXd& points);

// Rectangular kernel block between two point sets (rows of a and b).
Eigen::MatrixXd cross_kernel(const GaussianKernel& kernel, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b);

// Fitted kernel expansion f(x) = sum_i alpha_i k(x_i, x).
struct KernelModel {
    Eigen::MatrixXd support_points;  // m x d
    Eigen::VectorXd coefficients;    // m
    GaussianKernel kernel;
    double clip_level = 1.0;  // M
    double lambda = 1.0;
    LossKind loss_kind = LossKind::LeastSquares;
    double tau = 0.5;        // pinball level when loss_kind == Pinball
    bool converged = true;   // false when an iterative fit hit its budget

    double predict(const Eigen::RowVectorXd& x) const;
    double predict_clipped(const Eigen::RowVectorXd& x) const;

    // Chunked batch prediction; optionally clipped.
    Eigen::VectorXd predict_batch(const Eigen::MatrixXd& points, bool clipped = false) const;

    // RKHS norm squared of the expansion, alpha' K alpha.
    double rkhs_norm_squared() const;
};

// JSON (de)serialization of a fitted model.
std::string to_json_string(const KernelModel& model);
KernelModel model_from_json_string(const std::string& text);
void save_model(const KernelModel& model, const std::string& path);
KernelModel load_model(const std::string& path);

// Exact LS-SVM: coefficients solve (K + n lambda I) alpha = y, the unique
// minimizer of lambda ||f||_H^2 + (1/n) sum (y_i - f(x_i))^2.
KernelModel fit_lssvm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                      const GaussianKernel& kernel, double clip_level);

// Quantile SVM: approximate minimizer of lambda ||f||_H^2 + (1/n) sum
// pinball_tau(y_i - f(x_i)) by majorize-minimize with a Huber-guarded
// quadratic majorizer (guard kappa halves from 0.1 down to tol). Iterates
// that fail to decrease the objective are rejected, so the objective trace is
// non-increasing. Returns the best iterate with converged = false when the
// outer budget runs out first.
KernelModel fit_quantile_svm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double tau, double lambda, const GaussianKernel& kernel,
                             double clip_level, double tol = 1e-8, int max_outer = 200,
                             std::vector<double>* objective_trace = nullptr);

// Hyperparameter net over (0, 1]^2. Uniform grids of spacing 1/n (lambda) and
// n^{-1/(2+d)} (sigma); when a grid would exceed `cap` points it is geometric
// instead and the net property becomes approximate (exact_* flags record it).
struct HyperGrid {
    std::vector<double> lambdas;  // ascending, in (0, 1]
    std::vector<double> sigmas;   // ascending, in (0, 1]
    double lambda_spacing_target = 0.0;
    double sigma_spacing_target = 0.0;
    double lambda_spacing_achieved = 0.0;  // covering radius of the net
    double sigma_spacing_achieved = 0.0;
    bool lambda_exact = true;
    bool sigma_exact = true;
};

HyperGrid make_hypergrid(std::size_t n, int d, std::size_t cap = 32);

struct GridSearchRow {
    double lambda = 0.0;
    double sigma = 0.0;
    double validation_risk = 0.0;
};

struct TvSvmResult {
    KernelModel model;  // trained on the first split at the chosen pair
    double lambda = 0.0;
    double sigma = 0.0;
    double validation_risk = 0.0;
    std::size_t split = 0;  // training size m = floor(n/2) + 1
    std::vector<GridSearchRow> table;
};

// Training/validation selection: trains on the first m = floor(n/2) + 1
// samples for every grid pair, evaluates the clipped empirical risk on the
// remaining samples and returns the minimizer (ties: smallest lambda, then
// smallest sigma). Needs n >= 4.
TvSvmResult tv_svm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const LossSpec& loss_spec, const HyperGrid& grid,
                   const WorkerPool* pool = nullptr);

// Entropy-number bound for the Gaussian RKHS unit ball:
// ln N(B_H, ||.||_inf, eps) <= a sigma^{-d} eps^{-2p}.
double gaussian_entropy_bound(double a, double sigma, int d, double p, double eps);

// Covering exponent phi(eps) = a sigma^{-d} lambda^{-p} eps^{-2p} for the
// hypothesis ball of radius lambda^{-1/2}.
double covering_phi(double a, double sigma, int d, double lambda, double p, double eps);

// Width/regularization schedule lambda_n = 1/n, sigma_n = n^{-1/(2t+d)} for a
// target of smoothness t, with the associated risk decay exponent
// -2t / (2t + d).
struct Schedule {
    double lambda = 0.0;
    double sigma = 0.0;
    double rate_exponent = 0.0;
};

Schedule theoretical_schedule(std::uint64_t n, double t, int d);

}  // namespace cmix

#endif
