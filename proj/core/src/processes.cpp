#include "cmix/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;  // substream tag

double mod1(double t) {
    double r = t - std::floor(t);
    return r < 1.0 ? r : 0.0;
}

// Serves single bits from 64-bit RNG words, most significant first.
class BitStream {
public:
    explicit BitStream(Rng& rng) : rng_(rng) {}
    std::uint64_t next_bit() {
        if (available_ == 0) {
            buffer_ = rng_.bits();
            available_ = 64;
        }
        std::uint64_t b = buffer_ >> 63;
        buffer_ <<= 1;
        --available_;
        return b;
    }
    // 64 fresh bits, MSB-first window initialization.
    std::uint64_t next_word() { return rng_.bits(); }

private:
    Rng& rng_;
    std::uint64_t buffer_ = 0;
    int available_ = 0;
};

void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + ": state outside [0, 1]");
}

std::size_t piece_index(const PiecewisePieces& pieces, double x) {
    const auto& bp = pieces.breakpoints;
    return static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), x) - bp.begin());
}

double piecewise_apply(const PiecewisePieces& pieces, double x) {
    std::size_t i = piece_index(pieces, x);
    double left = i == 0 ? 0.0 : pieces.breakpoints[i - 1];
    return mod1(pieces.slopes[i] * (x - left));
}

}  // namespace

SystemKind SystemKind::piecewise_expanding(std::vector<double> slopes,
                                           std::vector<double> breakpoints) {
    SystemKind s;
    s.id = SystemId::PiecewiseExpanding;
    s.pieces.slopes = std::move(slopes);
    s.pieces.breakpoints = std::move(breakpoints);
    s.validate();
    return s;
}

std::string SystemKind::name() const {
    switch (id) {
        case SystemId::DoublingMap: return "doubling";
        case SystemId::LogisticA4: return "logistic4";
        case SystemId::TentMap: return "tent";
        case SystemId::CatMap2D: return "cat2d";
        case SystemId::PiecewiseExpanding: return "piecewise";
    }
    return "unknown";
}

void SystemKind::validate() const {
    if (id != SystemId::PiecewiseExpanding) return;
    if (pieces.slopes.size() != pieces.breakpoints.size() + 1)
        throw DomainError("piecewise map: need one slope per piece");
    for (double s : pieces.slopes)
        if (!(std::abs(s) > 1.0))
            throw DomainError("piecewise map: slopes must have magnitude > 1");
    double prev = 0.0;
    for (double b : pieces.breakpoints) {
        if (!(b > prev && b < 1.0))
            throw DomainError("piecewise map: breakpoints must be strictly increasing in (0, 1)");
        prev = b;
    }
}

void NoiseModel::validate() const {
    if (!(half_width > 0.0)) throw DomainError("noise model: half width must be positive");
    if (dim < 1) throw DomainError("noise model: dimension must be >= 1");
}

double MixingRate::d(std::uint64_t n) const {
    return c * std::exp(-b * std::pow(static_cast<double>(n), gamma));
}

void MixingRate::validate() const {
    if (!(c >= 0.0)) throw DomainError("mixing rate: c must be >= 0");
    if (!(b > 0.0)) throw DomainError("mixing rate: b must be > 0");
    if (!(gamma > 0.0)) throw DomainError("mixing rate: gamma must be > 0");
}

Trajectory Trajectory::from_states(std::vector<double> states, int dim) {
    if (dim < 1) throw DomainError("Trajectory::from_states: dimension must be >= 1");
    if (states.size() % static_cast<std::size_t>(dim) != 0)
        throw DomainError("Trajectory::from_states: state count not divisible by dimension");
    Trajectory t;
    t.data = std::move(states);
    t.dim = dim;
    return t;
}

std::vector<double> iterate(const SystemKind& system, std::span<const double> state) {
    system.validate();
    if (state.size() != static_cast<std::size_t>(system.dimension()))
        throw DomainError("iterate: state dimension mismatch");
    switch (system.id) {
        case SystemId::DoublingMap:
            check_unit_interval(state[0], "doubling map");
            return {mod1(2.0 * state[0])};
        case SystemId::LogisticA4:
            check_unit_interval(state[0], "logistic map");
            return {4.0 * state[0] * (1.0 - state[0])};
        case SystemId::TentMap:
            check_unit_interval(state[0], "tent map");
            return {1.0 - std::abs(1.0 - 2.0 * state[0])};
        case SystemId::CatMap2D: {
            for (double v : state)
                if (!(v >= 0.0 && v < 1.0))
                    throw DomainError("cat map: state outside [0, 1)^2");
            return {mod1(state[0] + state[1]), mod1(state[0] + 2.0 * state[1])};
        }
        case SystemId::PiecewiseExpanding:
            check_unit_interval(state[0], "piecewise map");
            return {piecewise_apply(system.pieces, state[0])};
    }
    throw DomainError("iterate: unknown system");
}

std::vector<double> sample_stationary(const SystemKind& system, Rng& rng, int burn_in) {
    system.validate();
    switch (system.id) {
        case SystemId::DoublingMap:
        case SystemId::TentMap:
            return {rng.uniform01()};
        case SystemId::LogisticA4: {
            double u = rng.uniform01();
            double s = std::sin(std::numbers::pi * u / 2.0);
            return {s * s};
        }
        case SystemId::CatMap2D:
            return {rng.uniform01(), rng.uniform01()};
        case SystemId::PiecewiseExpanding: {
            double x = rng.uniform01();
            for (int i = 0; i < burn_in; ++i) x = piecewise_apply(system.pieces, x);
            return {x};
        }
    }
    throw DomainError("sample_stationary: unknown system");
}

Trajectory generate_trajectory(const SystemKind& system, std::size_t n,
                               std::uint64_t seed, int burn_in) {
    system.validate();
    if (n < 1) throw DomainError("generate_trajectory: need n >= 1");

    Trajectory t;
    t.system = system;
    t.seed = seed;
    t.burn_in = 0;
    t.dim = system.dimension();
    t.data.resize(n * static_cast<std::size_t>(t.dim));

    Rng rng(seed);

    switch (system.id) {
        case SystemId::DoublingMap: {
            BitStream bits(rng);
            std::uint64_t window = bits.next_word();  // bits B_{i+1}..B_{i+64}
            for (std::size_t i = 0; i < n; ++i) {
                t.data[i] = static_cast<double>(window) * 0x1.0p-64;
                window = (window << 1) | bits.next_bit();
            }
            break;
        }
        case SystemId::TentMap: {
            // For the tent map the binary digits of X_{i} are B_i xor B_{i+j}
            // (B_0 := 0): a shift when the leading digit is 0, a shift plus
            // complement when it is 1.
            BitStream bits(rng);
            std::uint64_t window = bits.next_word();
            std::uint64_t fold = 0;  // B_i
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t digits = fold ? ~window : window;
                t.data[i] = static_cast<double>(digits) * 0x1.0p-64;
                fold = window >> 63;
                window = (window << 1) | bits.next_bit();
            }
            break;
        }
        case SystemId::LogisticA4: {
            // Conjugacy X = sin^2(pi * theta) with theta a doubling-map path.
            BitStream bits(rng);
            std::uint64_t window = bits.next_word();
            for (std::size_t i = 0; i < n; ++i) {
                double theta = static_cast<double>(window) * 0x1.0p-64;
                double s = std::sin(std::numbers::pi * theta);
                t.data[i] = s * s;
                window = (window << 1) | bits.next_bit();
            }
            break;
        }
        case SystemId::CatMap2D: {
            double x = rng.uniform01();
            double y = rng.uniform01();
            for (std::size_t i = 0; i < n; ++i) {
                t.data[2 * i] = x;
                t.data[2 * i + 1] = y;
                double nx = mod1(x + y);
                double ny = mod1(x + 2.0 * y);
                x = nx;
                y = ny;
            }
            break;
        }
        case SystemId::PiecewiseExpanding: {
            // Invariant density unknown in closed form; approximate
            // stationarity by burn-in from a uniform start.
            t.burn_in = burn_in;
            double x = rng.uniform01();
            for (int i = 0; i < burn_in; ++i) x = piecewise_apply(system.pieces, x);
            for (std::size_t i = 0; i < n; ++i) {
                t.data[i] = x;
                x = piecewise_apply(system.pieces, x);
            }
            break;
        }
    }
    return t;
}

std::vector<double> add_noise(const Trajectory& trajectory, const NoiseModel& noise,
                              std::uint64_t seed) {
    noise.validate();
    if (noise.dim != trajectory.dim)
        throw DomainError("add_noise: noise dimension does not match trajectory");
    Rng rng(derive_seed(seed, kNoiseStream));
    std::vector<double> out(trajectory.data.size());
    const double e = noise.half_width;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = trajectory.data[i] + rng.uniform(-e, e);
    return out;
}

double empirical_correlation(const Trajectory& trajectory, const StateFunction& h,
                             const StateFunction& g, std::size_t lag) {
    const std::size_t n = trajectory.size();
    if (lag >= n) throw DomainError("empirical_correlation: lag must be below path length");

    double mean_h = 0.0;
    double mean_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_h += h(trajectory.state(i));
        mean_g += g(trajectory.state(i));
    }
    mean_h /= static_cast<double>(n);
    mean_g /= static_cast<double>(n);

    double cross = 0.0;
    const std::size_t pairs = n - lag;
    for (std::size_t i = 0; i < pairs; ++i)
        cross += h(trajectory.state(i)) * g(trajectory.state(i + lag));
    cross /= static_cast<double>(pairs);

    return cross - mean_h * mean_g;
}

GeometricRateFit fit_geometric_rate(
    std::span<const std::pair<double, double>> lag_abs_correlation) {
    std::vector<double> lag;
    std::vector<double> logc;
    for (const auto& [n, cor] : lag_abs_correlation) {
        if (cor > 0.0) {
            lag.push_back(n);
            logc.push_back(std::log(cor));
        }
    }
    if (lag.size() < 3)
        throw NumericalError("fit_geometric_rate: need at least 3 positive correlations");

    const double gamma_grid[] = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    GeometricRateFit best;
    bool have = false;
    for (double gamma : gamma_grid) {
        // Least squares of log|cor| on (1, -n^gamma).
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(lag.size());
        for (std::size_t i = 0; i < lag.size(); ++i) {
            double x = -std::pow(lag[i], gamma);
            sx += x;
            sy += logc[i];
            sxx += x * x;
            sxy += x * logc[i];
        }
        double det = m * sxx - sx * sx;
        if (det == 0.0) continue;
        double b = (m * sxy - sx * sy) / det;
        double a = (sy - b * sx) / m;
        double rss = 0.0;
        for (std::size_t i = 0; i < lag.size(); ++i) {
            double r = logc[i] - (a - b * std::pow(lag[i], gamma));
            rss += r * r;
        }
        if (!have || rss < best.rss) {
            best.rate = MixingRate{std::exp(a), b, gamma};
            best.rss = rss;
            best.used_points = lag.size();
            have = true;
        }
    }
    if (!have || !(best.rate.b > 0.0))
        throw NumericalError("fit_geometric_rate: no geometric decay found");
    return best;
}

}  // namespace cmix
