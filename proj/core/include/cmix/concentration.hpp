#ifndef CMIX_CONCENTRATION_HPP
#define CMIX_CONCENTRATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmix/function_spaces.hpp"
#include "cmix/processes.hpp"
#include "cmix/worker_pool.hpp"

namespace cmix {

// Bounds on a test function h: ||h|| <= A (semi-norm), ||h||_inf <= B,
// E h^2 <= sigma2.
struct FunctionBounds {
    double seminorm_bound = 1.0;  // A > 0
    double sup_bound = 1.0;       // B > 0
    double variance_bound = 1.0;  // sigma2 in [0, B^2]
    void validate() const;
};

// Smallest sample size from which the Bernstein-type tail bound applies:
// max{ min{ m >= 3 : m^2 >= 808 c (3A + B)/B  and  m/(log m)^{2/gamma} >= 4 },
//      ceil(e^{3/b}) }.
// All logs are natural. The scan over m uses the fact that the second
// condition is false at m = 3 and crosses to true exactly once, so the
// feasible set is a half-line; tests check agreement with a naive scan.
std::uint64_t bernstein_n0(const MixingRate& rate, const FunctionBounds& fb);

// Tail probability bound for (1/n) sum h(Z_i) >= eps under a geometric
// C-mixing rate with exponent gamma:
//   min(1, 2 exp(-n eps^2 / (8 (log n)^{2/gamma} (sigma2 + eps B / 3)))).
double bernstein_tail_bound(std::uint64_t n, double eps, const FunctionBounds& fb,
                            double gamma);

// Same expression without the cap at 1 (2 at eps = 0).
double bernstein_tail_bound_raw(std::uint64_t n, double eps, const FunctionBounds& fb,
                                double gamma);

// Deviation level with confidence 2 e^{-tau}:
//   sqrt(8 (log n)^{2/gamma} sigma2 tau / n) + 8 (log n)^{2/gamma} B tau / (3 n).
double bernstein_deviation(std::uint64_t n, double tau, const FunctionBounds& fb,
                           double gamma);

// Interleaved partition of {1..n} into k blocks I_i = {i, i+k, ...}; the
// first r = n - k*floor(n/k) blocks hold l+1 indices, the rest l.
struct BlockingScheme {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t block_length = 0;  // l = floor(n/k)
    std::size_t remainder = 0;     // r = n - k*l
    std::vector<std::vector<std::size_t>> blocks;  // 1-based indices
};

BlockingScheme blocking(std::size_t n, std::size_t k);

// Block count used in the proof of the tail bound: floor((log n)^{2/gamma}) + 1.
std::size_t tail_bound_block_count(std::size_t n, double gamma);

struct TailValidationRow {
    double eps = 0.0;
    double empirical_tail = 0.0;
    double std_error = 0.0;
    double bound = 1.0;
    bool violated = false;
};

struct TailValidationReport {
    std::vector<TailValidationRow> rows;
    double centering_shift = 0.0;  // pilot-estimated mean subtracted from h
    std::uint64_t n0 = 0;
    bool any_violated() const;
};

// Monte Carlo check of the tail bound: empirical_tail is the fraction of
// replicas whose path average of the (pilot-centered) h reaches eps, and a row
// is flagged violated only when it exceeds bound + 3 binomial standard errors.
// h is centered by its mean over a 10^6-point pilot path, so E h = 0 holds up
// to Monte Carlo accuracy; fb must bound the centered function. Refuses to run
// below bernstein_n0 where the bound is not asserted.
TailValidationReport mc_validate_tail(const SystemKind& system, const StateFunction& h,
                                      const FunctionBounds& fb, const MixingRate& rate,
                                      std::size_t n, std::span<const double> eps_grid,
                                      std::size_t replicas, std::uint64_t seed,
                                      const WorkerPool* pool = nullptr);

// Constants the comparator bounds leave symbolic; every one defaults to 1 so
// tables are runnable out of the box. Clearing an optional marks the
// corresponding row "not evaluated".
struct ComparatorParams {
    double gamma = 1.0;                            // rate exponent for the alpha-mixing bound
    std::optional<double> hoeffding_c = 1.0;       // C in exp(-eps^2 n / C)
    std::optional<double> alpha_c = 1.0;           // c in the (1 + 4 e^{-2} c) prefactor
    std::optional<double> mpr_c = 1.0;             // C in the (log n)^2 variant
    std::optional<double> mpr_v2 = 1.0;            // v^2 in the (log n)^2 variant
    std::optional<double> markov_sigma2 = 1.0;     // limiting variance, log n variant
    std::optional<double> weak_c1 = 1.0;           // C1 in the weak-dependence bound
    std::optional<double> weak_c2 = 1.0;           // C2 in the weak-dependence bound
};

struct ComparatorRow {
    std::string name;
    double raw = 1.0;    // bound before capping at 1
    double value = 1.0;  // min(1, raw)
    bool evaluated = false;
};

// Closed-form tail bounds from the literature, evaluated at (n, eps):
//   hoeffding         exp(-eps^2 n / C)
//   alpha_geometric   (1 + 4 e^{-2} c) exp(-3 eps^2 n^{g/(g+1)} / (6 sigma2 + 2 eps B))
//   alpha_polylog     exp(-C eps^2 n / (v^2 + eps B (log n)^2 + B^2 / n))
//   markov_logn       exp(-n eps^2 / (sigma~^2 + eps B log n))
//   weak_dependence   exp(-eps^2 n / (C1 + C2 eps^{5/3} n^{2/3}))
std::vector<ComparatorRow> comparator_bounds(std::uint64_t n, double eps,
                                             const FunctionBounds& fb,
                                             const ComparatorParams& params);

struct ProductMomentReport {
    double lhs_mc = 0.0;   // MC estimate of E prod_{j=0..l} f(Z_{jk})
    double lhs_se = 0.0;
    double l1_norm = 0.0;  // pilot estimate of E f
    double rhs = 0.0;      // 2 * l1_norm^{l+1}
    bool holds = false;
    bool assumption_satisfied = false;  // 2 l ||f||_C d_k <= ||f||_{L1}
};

// Monte Carlo check of the k-spaced product moment inequality
// E prod_{j=0..l} f(Z_{jk}) <= 2 (E f)^{l+1} for nonnegative f, valid when
// 2 l ||f||_C d_k <= ||f||_{L1}. fb supplies ||f|| and ||f||_inf for the
// C-norm; the L1 norm is estimated from a pilot path.
ProductMomentReport block_product_moment_check(const SystemKind& system,
                                               const StateFunction& f,
                                               const FunctionBounds& fb,
                                               const MixingRate& rate, std::size_t k,
                                               std::size_t l, std::size_t replicas,
                                               std::uint64_t seed,
                                               const WorkerPool* pool = nullptr);

// Inputs of the oracle-inequality constant calculator. In addition to the
// variance-bound and entropy quantities this needs the rate constants (c, b)
// for the sample-size threshold and the approximation floor r_star for the
// radius fixed point.
struct OracleInputs {
    double variance_v = 1.0;       // V >= 1
    double theta = 1.0;            // variance-bound exponent in [0, 1]
    double p = 0.5;                // entropy exponent in (0, 1]
    double phi_at_half_eps = 0.0;  // phi(eps/2) >= 0
    double tau = 1.0;              // confidence level, >= 1
    double rate_c = 1.0;           // c >= 0
    double rate_b = 1.0;           // b > 0
    double a0 = 0.0;               // semi-norm bound for L o f0
    double a1 = 0.0;               // semi-norm bound A_1
    double a_star = 0.0;           // semi-norm bound for L o f*
    double b0 = 1.0;               // sup bound for L o f0, >= 1
    std::uint64_t n = 1000;
    double gamma = 1.0;
    double r_star = 0.0;           // regularized approximation error floor
    void validate() const;
};

struct OracleConstants {
    double c_v = 0.0;          // 512 (12 V + 1) / 3
    double k_constant = 0.0;   // 1212 c (4 A0 + A* + A1 + 1)
    std::uint64_t n0_star = 0;
    double r_min = 1.0;
    bool saturated = false;    // no radius in (0, 1] satisfied the bound
};

// Evaluates the constants of the oracle inequality and solves the radius
// condition r >= max{ (c_V (log n)^{2/gamma} (tau + phi(eps/2) 2^p r^p)/n)^{1/(2-theta)},
// 20 (log n)^{2/gamma} B0 tau / n, r_star } by monotone fixed-point iteration
// from r = 1 (tolerance 1e-12).
OracleConstants oracle_constants(const OracleInputs& in);

}  // namespace cmix

#endif
