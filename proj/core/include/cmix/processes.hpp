#ifndef CMIX_PROCESSES_HPP
#define CMIX_PROCESSES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmix/function_spaces.hpp"
#include "cmix/rng.hpp"

namespace cmix {

enum class SystemId { DoublingMap, LogisticA4, TentMap, CatMap2D, PiecewiseExpanding };

// Piecewise-linear expanding interval map: on the i-th piece delimited by the
// interior breakpoints, T(x) = slope_i * (x - left_i) mod 1. Every slope must
// have magnitude > 1.
struct PiecewisePieces {
    std::vector<double> slopes;       // one per piece (breakpoints.size() + 1)
    std::vector<double> breakpoints;  // strictly increasing, inside (0, 1)
};

struct SystemKind {
    SystemId id = SystemId::DoublingMap;
    PiecewisePieces pieces;  // only meaningful for PiecewiseExpanding

    static SystemKind doubling_map() { return {SystemId::DoublingMap, {}}; }
    static SystemKind logistic_a4() { return {SystemId::LogisticA4, {}}; }
    static SystemKind tent_map() { return {SystemId::TentMap, {}}; }
    static SystemKind cat_map_2d() { return {SystemId::CatMap2D, {}}; }
    static SystemKind piecewise_expanding(std::vector<double> slopes,
                                          std::vector<double> breakpoints);

    int dimension() const { return id == SystemId::CatMap2D ? 2 : 1; }
    std::string name() const;
    void validate() const;
};

// i.i.d. uniform noise on [-E, E]^d.
struct NoiseModel {
    double half_width = 0.0;  // E > 0
    int dim = 1;
    void validate() const;
};

// Geometric decay envelope d_n = c * exp(-b * n^gamma).
struct MixingRate {
    double c = 1.0;
    double b = 1.0;
    double gamma = 1.0;
    double d(std::uint64_t n) const;
    void validate() const;
};

inline constexpr int kDefaultBurnIn = 1000;

struct Trajectory {
    std::vector<double> data;  // row-major, size() * dim entries
    int dim = 1;
    SystemKind system;
    std::uint64_t seed = 0;
    int burn_in = 0;

    std::size_t size() const { return dim > 0 ? data.size() / static_cast<std::size_t>(dim) : 0; }
    std::span<const double> state(std::size_t i) const {
        return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    double scalar(std::size_t i) const { return data[i * static_cast<std::size_t>(dim)]; }

    // Wraps externally produced states (e.g. an i.i.d. surrogate path).
    static Trajectory from_states(std::vector<double> states, int dim);
};

// One application of the map T. The state must lie in the system's domain.
std::vector<double> iterate(const SystemKind& system, std::span<const double> state);

// One draw from the invariant measure. Uniform for the doubling, tent and cat
// maps, arcsine for the logistic map; piecewise expanding maps fall back to a
// burn-in orbit started from a uniform point.
std::vector<double> sample_stationary(const SystemKind& system, Rng& rng,
                                      int burn_in = kDefaultBurnIn);

// Length-n stationary path. The doubling and tent maps are driven by a fresh
// i.i.d. bit stream (X_i = sum_{j=1..64} B_{i+j} 2^-j, with the tent map's
// sign-fold applied through bit complements), and the logistic map is read
// off a doubling path through X = sin^2(pi * theta). Naive floating-point
// iteration of these maps shifts entropy out of the mantissa and collapses
// to 0 within ~53 steps; the bit-stream construction keeps the path exact in
// distribution.
Trajectory generate_trajectory(const SystemKind& system, std::size_t n,
                               std::uint64_t seed, int burn_in = kDefaultBurnIn);

// Adds i.i.d. uniform noise, independent of the trajectory's seed stream.
// Returns flat row-major states like Trajectory::data.
std::vector<double> add_noise(const Trajectory& trajectory, const NoiseModel& noise,
                              std::uint64_t seed);

// Plug-in estimate of cor_{T,lag}(h, g): the lagged empirical cross moment
// minus the product of full-path empirical means.
double empirical_correlation(const Trajectory& trajectory, const StateFunction& h,
                             const StateFunction& g, std::size_t lag);

struct GeometricRateFit {
    MixingRate rate;
    double rss = 0.0;          // residual sum of squares in log space
    std::size_t used_points = 0;
};

// Fits |cor| ~ c * exp(-b n^gamma) by least squares of log|cor| against
// (1, -n^gamma) over the gamma grid {0.25, 0.5, ..., 2.0}. Points with
// non-positive |cor| are dropped; fewer than 3 survivors is an error.
GeometricRateFit fit_geometric_rate(
    std::span<const std::pair<double, double>> lag_abs_correlation);

}  // namespace cmix

#endif
