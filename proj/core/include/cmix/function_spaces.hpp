#ifndef CMIX_FUNCTION_SPACES_HPP
#define CMIX_FUNCTION_SPACES_HPP

#include <functional>
#include <span>
#include <vector>

namespace cmix {

// Semi-norms on spaces of bounded functions. All of them satisfy the
// exponential inequality ||e^f|| <= ||e^f||_inf * ||f||, which is the
// property the concentration bounds rely on.
//
//   Zero               trivial semi-norm, ||f|| = 0
//   BoundedVariation   total variation over an ordered 1-d grid
//   Hoelder            sup |f(z)-f(z')| / |z-z'|^alpha, alpha in (0,1]
//   Lipschitz          Hoelder with alpha = 1; also stands in for the
//                      C^1 semi-norm sup|f'| when evaluated on a fine grid
enum class SeminormKind { Zero, BoundedVariation, Hoelder, Lipschitz };

const char* seminorm_kind_name(SeminormKind kind);

// A real function known through its values on a finite grid. Semi-norms are
// computed over the grid only, so they are lower bounds of the analytic
// quantities.
struct SampledFunction {
    std::vector<std::vector<double>> points;  // grid points, all of dimension d
    std::vector<double> values;               // same length as points
    double holder_exponent = 1.0;             // alpha used by SeminormKind::Hoelder

    // 1-d convenience constructor.
    static SampledFunction on_grid(std::span<const double> grid,
                                   std::span<const double> vals,
                                   double alpha = 1.0);

    std::size_t size() const { return points.size(); }
    int dimension() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

struct CNorm {
    double sup_norm = 0.0;
    double semi_norm = 0.0;
    double total = 0.0;  // sup_norm + semi_norm
};

// max_i |f(z_i)|; empty grid is a DomainError.
double sup_norm(const SampledFunction& f);

// Discrete total variation sum |f(z_i) - f(z_{i-1})| over the given 1-d
// partition. Requires strictly increasing points.
double bv_seminorm(const SampledFunction& f);

// max over grid pairs of |f(z)-f(z')| / |z-z'|_2^alpha with f's exponent.
// Requires at least two pairwise distinct points.
double holder_seminorm(const SampledFunction& f);

double seminorm(const SampledFunction& f, SeminormKind kind);

CNorm c_norm(const SampledFunction& f, SeminormKind kind);

struct ExpPropertyReport {
    double lhs = 0.0;   // ||e^f||
    double rhs = 0.0;   // ||e^f||_inf * ||f||
    bool holds = false; // lhs <= rhs up to relative slack 1e-12
};

ExpPropertyReport check_exp_property(const SampledFunction& f, SeminormKind kind);

// Piecewise-linear extension of a 1-d sampled function, constant outside the
// grid range.
class LinearInterpolant {
public:
    explicit LinearInterpolant(const SampledFunction& f);
    double operator()(double z) const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

// A scalar function of a (possibly multivariate) state.
using StateFunction = std::function<double(std::span<const double>)>;

// Interpolant applied to one coordinate of the state.
StateFunction to_state_function(const SampledFunction& f, int coordinate = 0);

}  // namespace cmix

#endif
