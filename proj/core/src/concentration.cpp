#include "cmix/concentration.hpp"

#include <algorithm>
#include <cmath>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr std::uint64_t kPilotStream = 0x70696c6fULL;

double log_power(double n, double gamma) {
    return std::pow(std::log(n), 2.0 / gamma);
}

// Smallest m >= 3 with m/(log m)^{2/gamma} >= 4. The ratio is below 4 at
// m = 3 and, once past its minimum at m = e^{2/gamma}, increases without
// bound, so there is a single upward crossing.
std::uint64_t min_m_log_condition(double gamma) {
    auto ok = [&](std::uint64_t m) {
        return static_cast<double>(m) / log_power(static_cast<double>(m), gamma) >= 4.0;
    };
    std::uint64_t lo = 3;
    std::uint64_t hi = 4;
    while (!ok(hi)) {
        lo = hi;
        if (hi > (std::uint64_t(1) << 62))
            throw NumericalError("bernstein_n0: threshold exceeds representable range");
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Smallest m >= 3 with m^2 >= threshold.
std::uint64_t min_m_square_condition(double threshold) {
    if (threshold <= 9.0) return 3;
    double root = std::sqrt(threshold);
    if (root > 9.2e18) throw NumericalError("bernstein_n0: threshold exceeds representable range");
    auto m = static_cast<std::uint64_t>(root);
    while (static_cast<double>(m) * static_cast<double>(m) < threshold) ++m;
    while (m > 3 &&
           static_cast<double>(m - 1) * static_cast<double>(m - 1) >= threshold)
        --m;
    return std::max<std::uint64_t>(m, 3);
}

std::uint64_t n0_from_threshold(double square_threshold, double gamma, double b) {
    std::uint64_t m = std::max(min_m_square_condition(square_threshold),
                               min_m_log_condition(gamma));
    double burn = std::exp(3.0 / b);
    if (burn > 9.2e18)
        throw NumericalError("bernstein_n0: e^{3/b} exceeds representable range");
    return std::max<std::uint64_t>(m, static_cast<std::uint64_t>(std::ceil(burn)));
}

double capped(double raw) { return std::min(1.0, raw); }

}  // namespace

void FunctionBounds::validate() const {
    if (!(seminorm_bound > 0.0)) throw DomainError("function bounds: A must be > 0");
    if (!(sup_bound > 0.0)) throw DomainError("function bounds: B must be > 0");
    if (!(variance_bound >= 0.0)) throw DomainError("function bounds: sigma2 must be >= 0");
    if (variance_bound > sup_bound * sup_bound * (1.0 + 1e-12))
        throw DomainError("function bounds: sigma2 must not exceed B^2");
}

std::uint64_t bernstein_n0(const MixingRate& rate, const FunctionBounds& fb) {
    rate.validate();
    fb.validate();
    const double threshold =
        808.0 * rate.c * (3.0 * fb.seminorm_bound + fb.sup_bound) / fb.sup_bound;
    return n0_from_threshold(threshold, rate.gamma, rate.b);
}

double bernstein_tail_bound_raw(std::uint64_t n, double eps, const FunctionBounds& fb,
                                double gamma) {
    fb.validate();
    if (n < 3) throw DomainError("bernstein_tail_bound: need n >= 3");
    if (!(eps >= 0.0)) throw DomainError("bernstein_tail_bound: eps must be >= 0");
    if (!(gamma > 0.0)) throw DomainError("bernstein_tail_bound: gamma must be > 0");
    if (eps == 0.0) return 2.0;
    const double denom = 8.0 * log_power(static_cast<double>(n), gamma) *
                         (fb.variance_bound + eps * fb.sup_bound / 3.0);
    return 2.0 * std::exp(-static_cast<double>(n) * eps * eps / denom);
}

double bernstein_tail_bound(std::uint64_t n, double eps, const FunctionBounds& fb,
                            double gamma) {
    return capped(bernstein_tail_bound_raw(n, eps, fb, gamma));
}

double bernstein_deviation(std::uint64_t n, double tau, const FunctionBounds& fb,
                           double gamma) {
    fb.validate();
    if (n < 3) throw DomainError("bernstein_deviation: need n >= 3");
    if (!(tau > 0.0)) throw DomainError("bernstein_deviation: tau must be > 0");
    if (!(gamma > 0.0)) throw DomainError("bernstein_deviation: gamma must be > 0");
    const double lp = log_power(static_cast<double>(n), gamma);
    const double nn = static_cast<double>(n);
    return std::sqrt(8.0 * lp * fb.variance_bound * tau / nn) +
           8.0 * lp * fb.sup_bound * tau / (3.0 * nn);
}

BlockingScheme blocking(std::size_t n, std::size_t k) {
    if (k < 1 || k > n) throw DomainError("blocking: need 1 <= k <= n");
    BlockingScheme s;
    s.n = n;
    s.k = k;
    s.block_length = n / k;
    s.remainder = n - k * s.block_length;
    s.blocks.resize(k);
    for (std::size_t i = 1; i <= k; ++i) {
        std::size_t len = s.block_length + (i <= s.remainder ? 1 : 0);
        auto& block = s.blocks[i - 1];
        block.reserve(len);
        for (std::size_t j = 0; j < len; ++j) block.push_back(i + j * k);
    }
    return s;
}

std::size_t tail_bound_block_count(std::size_t n, double gamma) {
    if (n < 3) throw DomainError("tail_bound_block_count: need n >= 3");
    if (!(gamma > 0.0)) throw DomainError("tail_bound_block_count: gamma must be > 0");
    return static_cast<std::size_t>(std::floor(log_power(static_cast<double>(n), gamma))) + 1;
}

bool TailValidationReport::any_violated() const {
    return std::any_of(rows.begin(), rows.end(),
                       [](const TailValidationRow& r) { return r.violated; });
}

TailValidationReport mc_validate_tail(const SystemKind& system, const StateFunction& h,
                                      const FunctionBounds& fb, const MixingRate& rate,
                                      std::size_t n, std::span<const double> eps_grid,
                                      std::size_t replicas, std::uint64_t seed,
                                      const WorkerPool* pool) {
    fb.validate();
    rate.validate();
    if (replicas < 1) throw DomainError("mc_validate_tail: need at least one replica");
    if (eps_grid.empty()) throw DomainError("mc_validate_tail: empty eps grid");

    TailValidationReport report;
    report.n0 = bernstein_n0(rate, fb);
    if (n < report.n0)
        throw DomainError("mc_validate_tail: n = " + std::to_string(n) +
                          " is below the bound's threshold n0 = " +
                          std::to_string(report.n0) + "; the inequality is not asserted there");

    // Center h by its mean over a long pilot path so that E h = 0 holds up to
    // Monte Carlo accuracy.
    constexpr std::size_t kPilotPoints = 1000000;
    {
        Trajectory pilot = generate_trajectory(system, kPilotPoints, derive_seed(seed, kPilotStream));
        double sum = 0.0;
        for (std::size_t i = 0; i < pilot.size(); ++i) sum += h(pilot.state(i));
        report.centering_shift = sum / static_cast<double>(pilot.size());
    }
    const double shift = report.centering_shift;

    std::vector<double> replica_mean(replicas);
    for_each_index(pool, replicas, [&](std::size_t r) {
        Trajectory path = generate_trajectory(system, n, seed + r);
        double sum = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) sum += h(path.state(i)) - shift;
        replica_mean[r] = sum / static_cast<double>(n);
    });

    report.rows.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        TailValidationRow row;
        row.eps = eps;
        std::size_t hits = 0;
        for (double m : replica_mean)
            if (m >= eps) ++hits;
        row.empirical_tail = static_cast<double>(hits) / static_cast<double>(replicas);
        row.std_error = std::sqrt(row.empirical_tail * (1.0 - row.empirical_tail) /
                                  static_cast<double>(replicas));
        row.bound = bernstein_tail_bound(n, eps, fb, rate.gamma);
        row.violated = row.empirical_tail > row.bound + 3.0 * row.std_error;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<ComparatorRow> comparator_bounds(std::uint64_t n, double eps,
                                             const FunctionBounds& fb,
                                             const ComparatorParams& params) {
    fb.validate();
    if (n < 1) throw DomainError("comparator_bounds: need n >= 1");
    if (!(eps >= 0.0)) throw DomainError("comparator_bounds: eps must be >= 0");
    if (!(params.gamma > 0.0)) throw DomainError("comparator_bounds: gamma must be > 0");

    const double nn = static_cast<double>(n);
    const double B = fb.sup_bound;
    const double sigma2 = fb.variance_bound;
    std::vector<ComparatorRow> rows;

    auto add = [&rows](const std::string& name, std::optional<double> raw) {
        ComparatorRow row;
        row.name = name;
        if (raw.has_value()) {
            row.raw = *raw;
            row.value = capped(*raw);
            row.evaluated = true;
        }
        rows.push_back(row);
    };

    if (params.hoeffding_c) {
        add("hoeffding", std::exp(-eps * eps * nn / *params.hoeffding_c));
    } else {
        add("hoeffding", std::nullopt);
    }

    if (params.alpha_c) {
        const double g = params.gamma;
        const double n_eff = std::pow(nn, g / (g + 1.0));
        const double prefactor = 1.0 + 4.0 * std::exp(-2.0) * *params.alpha_c;
        add("alpha_geometric",
            prefactor * std::exp(-3.0 * eps * eps * n_eff / (6.0 * sigma2 + 2.0 * eps * B)));
    } else {
        add("alpha_geometric", std::nullopt);
    }

    if (params.mpr_c && params.mpr_v2) {
        const double logn = std::log(nn);
        const double denom = *params.mpr_v2 + eps * B * logn * logn + B * B / nn;
        add("alpha_polylog", std::exp(-*params.mpr_c * eps * eps * nn / denom));
    } else {
        add("alpha_polylog", std::nullopt);
    }

    if (params.markov_sigma2) {
        const double denom = *params.markov_sigma2 + eps * B * std::log(nn);
        add("markov_logn", std::exp(-nn * eps * eps / denom));
    } else {
        add("markov_logn", std::nullopt);
    }

    if (params.weak_c1 && params.weak_c2) {
        const double denom =
            *params.weak_c1 + *params.weak_c2 * std::pow(eps, 5.0 / 3.0) * std::pow(nn, 2.0 / 3.0);
        add("weak_dependence", std::exp(-eps * eps * nn / denom));
    } else {
        add("weak_dependence", std::nullopt);
    }

    return rows;
}

ProductMomentReport block_product_moment_check(const SystemKind& system,
                                               const StateFunction& f,
                                               const FunctionBounds& fb,
                                               const MixingRate& rate, std::size_t k,
                                               std::size_t l, std::size_t replicas,
                                               std::uint64_t seed,
                                               const WorkerPool* pool) {
    fb.validate();
    rate.validate();
    if (k < 1) throw DomainError("block_product_moment_check: need k >= 1");
    if (replicas < 1) throw DomainError("block_product_moment_check: need replicas >= 1");

    auto eval_nonneg = [&f](std::span<const double> state) {
        double v = f(state);
        if (v < 0.0)
            throw DomainError("block_product_moment_check: f must be nonnegative");
        return v;
    };

    ProductMomentReport report;
    {
        constexpr std::size_t kPilotPoints = 1000000;
        Trajectory pilot =
            generate_trajectory(system, kPilotPoints, derive_seed(seed, kPilotStream));
        double sum = 0.0;
        for (std::size_t i = 0; i < pilot.size(); ++i) sum += eval_nonneg(pilot.state(i));
        report.l1_norm = sum / static_cast<double>(pilot.size());
    }

    const std::size_t path_len = l * k + 1;
    std::vector<double> products(replicas);
    for_each_index(pool, replicas, [&](std::size_t r) {
        Trajectory path = generate_trajectory(system, path_len, seed + r);
        double prod = 1.0;
        for (std::size_t j = 0; j <= l; ++j) prod *= eval_nonneg(path.state(j * k));
        products[r] = prod;
    });

    double mean = 0.0;
    for (double p : products) mean += p;
    mean /= static_cast<double>(replicas);
    double var = 0.0;
    for (double p : products) var += (p - mean) * (p - mean);
    var /= std::max<double>(1.0, static_cast<double>(replicas - 1));

    report.lhs_mc = mean;
    report.lhs_se = std::sqrt(var / static_cast<double>(replicas));
    report.rhs = 2.0 * std::pow(report.l1_norm, static_cast<double>(l) + 1.0);
    report.holds = report.lhs_mc <= report.rhs + 3.0 * report.lhs_se;

    const double c_norm_bound = fb.seminorm_bound + fb.sup_bound;
    report.assumption_satisfied =
        2.0 * static_cast<double>(l) * c_norm_bound * rate.d(k) <= report.l1_norm;
    return report;
}

void OracleInputs::validate() const {
    if (!(variance_v >= 1.0)) throw DomainError("oracle constants: V must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw DomainError("oracle constants: theta must lie in [0, 1]");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("oracle constants: p must lie in (0, 1]");
    if (!(phi_at_half_eps >= 0.0))
        throw DomainError("oracle constants: phi(eps/2) must be >= 0");
    if (!(tau >= 1.0)) throw DomainError("oracle constants: tau must be >= 1");
    if (!(rate_c >= 0.0)) throw DomainError("oracle constants: c must be >= 0");
    if (!(rate_b > 0.0)) throw DomainError("oracle constants: b must be > 0");
    if (!(b0 >= 1.0)) throw DomainError("oracle constants: B0 must be >= 1");
    if (a0 < 0.0 || a1 < 0.0 || a_star < 0.0)
        throw DomainError("oracle constants: semi-norm bounds must be >= 0");
    if (n < 3) throw DomainError("oracle constants: need n >= 3");
    if (!(gamma > 0.0)) throw DomainError("oracle constants: gamma must be > 0");
    if (!(r_star >= 0.0 && r_star <= 1.0))
        throw DomainError("oracle constants: r_star must lie in [0, 1]");
}

OracleConstants oracle_constants(const OracleInputs& in) {
    in.validate();
    OracleConstants out;
    out.c_v = 512.0 * (12.0 * in.variance_v + 1.0) / 3.0;
    out.k_constant = 1212.0 * in.rate_c * (4.0 * in.a0 + in.a_star + in.a1 + 1.0);
    out.n0_star = n0_from_threshold(out.k_constant, in.gamma, in.rate_b);

    const double lp = log_power(static_cast<double>(in.n), in.gamma);
    const double nn = static_cast<double>(in.n);
    auto radius_map = [&](double r) {
        double first = std::pow(
            out.c_v * lp * (in.tau + in.phi_at_half_eps * std::pow(2.0, in.p) * std::pow(r, in.p)) / nn,
            1.0 / (2.0 - in.theta));
        double second = 20.0 * lp * in.b0 * in.tau / nn;
        return std::max({first, second, in.r_star});
    };

    double r = 1.0;
    if (radius_map(1.0) > 1.0) {
        out.r_min = 1.0;
        out.saturated = true;
        return out;
    }
    for (int iter = 0; iter < 200000; ++iter) {
        double next = radius_map(r);
        if (std::abs(next - r) < 1e-12) {
            r = next;
            break;
        }
        r = next;
    }
    out.r_min = r;
    out.saturated = false;
    return out;
}

}  // namespace cmix
