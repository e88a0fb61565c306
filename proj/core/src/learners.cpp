#include "cmix/learners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                        Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        double d = a(i, c) - b(j, c);
        s += d * d;
    }
    return s;
}

Eigen::LLT<Eigen::MatrixXd> factorize_or_throw(Eigen::MatrixXd system, const char* who) {
    double dmin = system.diagonal().minCoeff();
    double dmax = system.diagonal().maxCoeff();
    Eigen::LLT<Eigen::MatrixXd> llt(std::move(system));
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << who << ": Cholesky factorization failed; diagonal range [" << dmin << ", "
            << dmax << "], rough condition estimate " << (dmin > 0 ? dmax / dmin : 0.0);
        throw NumericalError(msg.str());
    }
    return llt;
}

// (K + n lambda I) alpha = y.
Eigen::VectorXd solve_lssvm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                            double lambda) {
    Eigen::MatrixXd system = gram;
    system.diagonal().array() += static_cast<double>(y.size()) * lambda;
    return factorize_or_throw(std::move(system), "fit_lssvm").solve(y);
}

double pinball_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& alpha, const Eigen::VectorXd& fitted,
                         double tau, double lambda) {
    double risk = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) risk += pinball_loss(tau, y[i] - fitted[i]);
    risk /= static_cast<double>(y.size());
    return lambda * alpha.dot(gram * alpha) + risk;
}

Eigen::VectorXd solve_quantile_mm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
                                  double tau, double lambda, double tol, int max_outer,
                                  bool* converged, std::vector<double>* trace) {
    const Eigen::Index n = y.size();
    const double skew = tau - 0.5;

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
    double objective = pinball_objective(gram, y, alpha, fitted, tau, lambda);
    if (trace) trace->push_back(objective);

    double kappa = 0.1;
    bool done = false;
    for (int outer = 0; outer < max_outer; ++outer) {
        // Quadratic majorizer of the pinball loss at the current residuals
        // r_i, guarded at kappa: pinball(r) <= r^2/(4u_i) + (tau-1/2) r + u_i/4
        // with u_i = max(|r_i|, kappa). Its minimizer solves
        // (K + 4 n lambda diag(u)) alpha = y + 2 (tau - 1/2) u.
        Eigen::VectorXd guard(n);
        for (Eigen::Index i = 0; i < n; ++i)
            guard[i] = std::max(std::abs(y[i] - fitted[i]), kappa);

        Eigen::MatrixXd system = gram;
        system.diagonal() += 4.0 * static_cast<double>(n) * lambda * guard;
        Eigen::VectorXd rhs = y + 2.0 * skew * guard;
        Eigen::VectorXd candidate =
            factorize_or_throw(std::move(system), "fit_quantile_svm").solve(rhs);
        Eigen::VectorXd candidate_fit = gram * candidate;
        double candidate_obj =
            pinball_objective(gram, y, candidate, candidate_fit, tau, lambda);

        double improvement = objective - candidate_obj;
        if (candidate_obj <= objective) {
            alpha = std::move(candidate);
            fitted = std::move(candidate_fit);
            objective = candidate_obj;
        }
        if (trace) trace->push_back(objective);

        if (improvement < tol && kappa < tol) {
            done = true;
            break;
        }
        if (kappa >= tol) kappa *= 0.5;
    }
    if (converged) *converged = done;
    return alpha;
}

double net_radius(const std::vector<double>& grid) {
    // Covering radius of a sorted grid with max = 1 over the interval (0, 1].
    double radius = grid.front();
    for (std::size_t i = 1; i < grid.size(); ++i)
        radius = std::max(radius, (grid[i] - grid[i - 1]) / 2.0);
    return radius;
}

std::vector<double> uniform_or_geometric_grid(std::size_t points, std::size_t cap,
                                              double* achieved, bool* exact,
                                              double target) {
    std::vector<double> grid;
    if (points <= cap) {
        grid.reserve(points);
        for (std::size_t j = 1; j <= points; ++j)
            grid.push_back(static_cast<double>(j) / static_cast<double>(points));
    } else {
        // Geometric subsample from 1/points to 1; coverage becomes approximate.
        grid.reserve(cap);
        const double lo = 1.0 / static_cast<double>(points);
        for (std::size_t j = 0; j < cap; ++j) {
            double t = static_cast<double>(j) / static_cast<double>(cap - 1);
            grid.push_back(std::exp(std::log(lo) * (1.0 - t)));
        }
        grid.front() = lo;
        grid.back() = 1.0;
    }
    *achieved = net_radius(grid);
    *exact = *achieved <= target * (1.0 + 1e-12);
    return grid;
}

}  // namespace

double GaussianKernel::operator()(const Eigen::RowVectorXd& x,
                                  const Eigen::RowVectorXd& y) const {
    double s = (x - y).squaredNorm();
    return std::exp(-s / (width * width));
}

void GaussianKernel::validate() const {
    if (!(width > 0.0)) throw DomainError("gaussian kernel: width must be positive");
    if (dim < 1) throw DomainError("gaussian kernel: dimension must be >= 1");
}

Eigen::MatrixXd kernel_matrix(const GaussianKernel& kernel, const Eigen::MatrixXd& points) {
    kernel.validate();
    if (points.rows() == 0) throw DomainError("kernel_matrix: empty point set");
    const double inv = 1.0 / (kernel.width * kernel.width);
    const Eigen::Index m = points.rows();
    Eigen::MatrixXd gram(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        gram(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            double v = std::exp(-squared_distance(points, i, points, j) * inv);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

Eigen::MatrixXd cross_kernel(const GaussianKernel& kernel, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
    kernel.validate();
    const double inv = 1.0 / (kernel.width * kernel.width);
    Eigen::MatrixXd block(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
            block(i, j) = std::exp(-squared_distance(a, i, b, j) * inv);
    return block;
}

double KernelModel::predict(const Eigen::RowVectorXd& x) const {
    if (x.size() != support_points.cols() && support_points.rows() > 0)
        throw DomainError("predict: input dimension mismatch");
    const double inv = 1.0 / (kernel.width * kernel.width);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < support_points.rows(); ++i) {
        double s = (support_points.row(i) - x).squaredNorm();
        sum += coefficients[i] * std::exp(-s * inv);
    }
    return sum;
}

double KernelModel::predict_clipped(const Eigen::RowVectorXd& x) const {
    return clip(predict(x), clip_level);
}

Eigen::VectorXd KernelModel::predict_batch(const Eigen::MatrixXd& points, bool clipped) const {
    if (support_points.rows() > 0 && points.cols() != support_points.cols())
        throw DomainError("predict_batch: input dimension mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(points.rows());
    if (support_points.rows() > 0) {
        constexpr Eigen::Index kChunk = 2048;
        for (Eigen::Index start = 0; start < points.rows(); start += kChunk) {
            Eigen::Index len = std::min(kChunk, points.rows() - start);
            out.segment(start, len) =
                cross_kernel(kernel, points.middleRows(start, len), support_points) *
                coefficients;
        }
    }
    if (clipped)
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = clip(out[i], clip_level);
    return out;
}

double KernelModel::rkhs_norm_squared() const {
    if (support_points.rows() == 0) return 0.0;
    return coefficients.dot(kernel_matrix(kernel, support_points) * coefficients);
}

std::string to_json_string(const KernelModel& model) {
    nlohmann::json j;
    j["schema"] = 1;
    j["kernel"] = {{"width", model.kernel.width}, {"dim", model.kernel.dim}};
    j["clip_level"] = model.clip_level;
    j["lambda"] = model.lambda;
    j["loss"] = model.loss_kind == LossKind::LeastSquares ? "least_squares" : "pinball";
    j["tau"] = model.tau;
    j["converged"] = model.converged;
    auto points = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.support_points.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < model.support_points.cols(); ++c)
            row.push_back(model.support_points(i, c));
        points.push_back(std::move(row));
    }
    j["support_points"] = std::move(points);
    auto coef = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.coefficients.size(); ++i)
        coef.push_back(model.coefficients[i]);
    j["coefficients"] = std::move(coef);
    return j.dump();
}

KernelModel model_from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("model_from_json_string: ") + e.what());
    }
    KernelModel model;
    try {
        model.kernel.width = j.at("kernel").at("width").get<double>();
        model.kernel.dim = j.at("kernel").at("dim").get<int>();
        model.clip_level = j.at("clip_level").get<double>();
        model.lambda = j.at("lambda").get<double>();
        model.loss_kind = j.at("loss").get<std::string>() == "pinball" ? LossKind::Pinball
                                                                       : LossKind::LeastSquares;
        model.tau = j.value("tau", 0.5);
        model.converged = j.value("converged", true);
        const auto& points = j.at("support_points");
        const auto& coef = j.at("coefficients");
        if (points.size() != coef.size())
            throw DomainError("model_from_json_string: points/coefficients length mismatch");
        model.support_points.resize(static_cast<Eigen::Index>(points.size()), model.kernel.dim);
        model.coefficients.resize(static_cast<Eigen::Index>(coef.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].size() != static_cast<std::size_t>(model.kernel.dim))
                throw DomainError("model_from_json_string: point dimension mismatch");
            for (int c = 0; c < model.kernel.dim; ++c)
                model.support_points(static_cast<Eigen::Index>(i), c) =
                    points[i][static_cast<std::size_t>(c)].get<double>();
            model.coefficients[static_cast<Eigen::Index>(i)] = coef[i].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("model_from_json_string: ") + e.what());
    }
    model.kernel.validate();
    return model;
}

void save_model(const KernelModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NumericalError("save_model: cannot open " + path);
    out << to_json_string(model) << '\n';
}

KernelModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("load_model: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json_string(buf.str());
}

KernelModel fit_lssvm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                      const GaussianKernel& kernel, double clip_level) {
    kernel.validate();
    if (x.rows() == 0) throw DomainError("fit_lssvm: empty data");
    if (x.rows() != y.size()) throw DomainError("fit_lssvm: rows of x and y differ");
    if (x.cols() != kernel.dim) throw DomainError("fit_lssvm: kernel dimension mismatch");
    if (!(lambda > 0.0)) throw DomainError("fit_lssvm: lambda must be positive");
    if (!(clip_level > 0.0)) throw DomainError("fit_lssvm: clip level must be positive");

    KernelModel model;
    model.support_points = x;
    model.kernel = kernel;
    model.clip_level = clip_level;
    model.lambda = lambda;
    model.loss_kind = LossKind::LeastSquares;
    model.coefficients = solve_lssvm(kernel_matrix(kernel, x), y, lambda);
    return model;
}

KernelModel fit_quantile_svm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double tau, double lambda, const GaussianKernel& kernel,
                             double clip_level, double tol, int max_outer,
                             std::vector<double>* objective_trace) {
    kernel.validate();
    if (x.rows() == 0) throw DomainError("fit_quantile_svm: empty data");
    if (x.rows() != y.size()) throw DomainError("fit_quantile_svm: rows of x and y differ");
    if (x.cols() != kernel.dim) throw DomainError("fit_quantile_svm: kernel dimension mismatch");
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("fit_quantile_svm: tau must lie in (0, 1)");
    if (!(lambda > 0.0)) throw DomainError("fit_quantile_svm: lambda must be positive");
    if (!(clip_level > 0.0)) throw DomainError("fit_quantile_svm: clip level must be positive");
    if (!(tol > 0.0)) throw DomainError("fit_quantile_svm: tol must be positive");
    if (max_outer < 1) throw DomainError("fit_quantile_svm: max_outer must be >= 1");

    KernelModel model;
    model.support_points = x;
    model.kernel = kernel;
    model.clip_level = clip_level;
    model.lambda = lambda;
    model.loss_kind = LossKind::Pinball;
    model.tau = tau;
    model.coefficients = solve_quantile_mm(kernel_matrix(kernel, x), y, tau, lambda, tol,
                                           max_outer, &model.converged, objective_trace);
    return model;
}

HyperGrid make_hypergrid(std::size_t n, int d, std::size_t cap) {
    if (n < 4) throw DomainError("make_hypergrid: need n >= 4");
    if (d < 1) throw DomainError("make_hypergrid: dimension must be >= 1");
    if (cap < 2) throw DomainError("make_hypergrid: cap must be >= 2");

    HyperGrid grid;
    grid.lambda_spacing_target = 1.0 / static_cast<double>(n);
    grid.lambdas = uniform_or_geometric_grid(n, cap, &grid.lambda_spacing_achieved,
                                             &grid.lambda_exact, grid.lambda_spacing_target);

    grid.sigma_spacing_target =
        std::pow(static_cast<double>(n), -1.0 / (2.0 + static_cast<double>(d)));
    auto sigma_points =
        static_cast<std::size_t>(std::ceil(1.0 / grid.sigma_spacing_target - 1e-12));
    sigma_points = std::max<std::size_t>(sigma_points, 1);
    grid.sigmas = uniform_or_geometric_grid(sigma_points, cap, &grid.sigma_spacing_achieved,
                                            &grid.sigma_exact, grid.sigma_spacing_target);
    return grid;
}

TvSvmResult tv_svm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const LossSpec& loss_spec, const HyperGrid& grid,
                   const WorkerPool* pool) {
    loss_spec.validate();
    if (x.rows() != y.size()) throw DomainError("tv_svm: rows of x and y differ");
    const std::size_t n = static_cast<std::size_t>(x.rows());
    if (n < 4) throw DomainError("tv_svm: need n >= 4");
    if (grid.lambdas.empty() || grid.sigmas.empty())
        throw DomainError("tv_svm: empty hyperparameter grid");

    const std::size_t m = n / 2 + 1;
    const auto mi = static_cast<Eigen::Index>(m);
    const Eigen::MatrixXd train_x = x.topRows(mi);
    const Eigen::VectorXd train_y = y.head(mi);
    const Eigen::MatrixXd valid_x = x.bottomRows(x.rows() - mi);
    const Eigen::VectorXd valid_y = y.tail(y.size() - mi);

    const std::size_t n_sigma = grid.sigmas.size();
    const std::size_t n_lambda = grid.lambdas.size();
    std::vector<GridSearchRow> table(n_sigma * n_lambda);

    for_each_index(pool, n_sigma, [&](std::size_t si) {
        GaussianKernel kernel{grid.sigmas[si], static_cast<int>(x.cols())};
        const Eigen::MatrixXd gram = kernel_matrix(kernel, train_x);
        const Eigen::MatrixXd cross = cross_kernel(kernel, valid_x, train_x);
        for (std::size_t li = 0; li < n_lambda; ++li) {
            const double lambda = grid.lambdas[li];
            Eigen::VectorXd alpha =
                loss_spec.kind == LossKind::LeastSquares
                    ? solve_lssvm(gram, train_y, lambda)
                    : solve_quantile_mm(gram, train_y, loss_spec.tau, lambda, 1e-8, 200,
                                        nullptr, nullptr);
            Eigen::VectorXd pred = cross * alpha;
            for (Eigen::Index i = 0; i < pred.size(); ++i)
                pred[i] = clip(pred[i], loss_spec.clip_level);
            double risk = empirical_risk(loss_spec, {valid_y.data(), static_cast<std::size_t>(valid_y.size())},
                                         {pred.data(), static_cast<std::size_t>(pred.size())});
            table[si * n_lambda + li] = GridSearchRow{lambda, kernel.width, risk};
        }
    });

    const GridSearchRow* best = &table.front();
    for (const auto& row : table) {
        if (row.validation_risk < best->validation_risk ||
            (row.validation_risk == best->validation_risk &&
             (row.lambda < best->lambda ||
              (row.lambda == best->lambda && row.sigma < best->sigma))))
            best = &row;
    }

    TvSvmResult result;
    result.lambda = best->lambda;
    result.sigma = best->sigma;
    result.validation_risk = best->validation_risk;
    result.split = m;
    result.table = std::move(table);

    GaussianKernel chosen{result.sigma, static_cast<int>(x.cols())};
    result.model =
        loss_spec.kind == LossKind::LeastSquares
            ? fit_lssvm(train_x, train_y, result.lambda, chosen, loss_spec.clip_level)
            : fit_quantile_svm(train_x, train_y, loss_spec.tau, result.lambda, chosen,
                               loss_spec.clip_level);
    return result;
}

double gaussian_entropy_bound(double a, double sigma, int d, double p, double eps) {
    if (!(a > 0.0)) throw DomainError("gaussian_entropy_bound: a must be positive");
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw DomainError("gaussian_entropy_bound: sigma must lie in (0, 1]");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("gaussian_entropy_bound: p must lie in (0, 1)");
    if (!(eps > 0.0)) throw DomainError("gaussian_entropy_bound: eps must be positive");
    if (d < 1) throw DomainError("gaussian_entropy_bound: dimension must be >= 1");
    return a * std::pow(sigma, -static_cast<double>(d)) * std::pow(eps, -2.0 * p);
}

double covering_phi(double a, double sigma, int d, double lambda, double p, double eps) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw DomainError("covering_phi: lambda must lie in (0, 1]");
    return gaussian_entropy_bound(a, sigma, d, p, eps) * std::pow(lambda, -p);
}

Schedule theoretical_schedule(std::uint64_t n, double t, int d) {
    if (n < 1) throw DomainError("theoretical_schedule: need n >= 1");
    if (!(t >= 1.0)) throw DomainError("theoretical_schedule: smoothness t must be >= 1");
    if (d < 1) throw DomainError("theoretical_schedule: dimension must be >= 1");
    Schedule s;
    const double nn = static_cast<double>(n);
    s.lambda = 1.0 / nn;
    s.sigma = std::pow(nn, -1.0 / (2.0 * t + static_cast<double>(d)));
    s.rate_exponent = -2.0 * t / (2.0 * t + static_cast<double>(d));
    return s;
}

}  // namespace cmix
