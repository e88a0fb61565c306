#include "cmix/function_spaces.hpp"

#include <algorithm>
#include <cmath>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

double pair_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double holder_with_alpha(const SampledFunction& f, double alpha) {
    if (f.size() < 2) throw DomainError("holder_seminorm: need at least 2 distinct points");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw DomainError("holder_seminorm: exponent must lie in (0, 1]");
    double best = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            double dist = pair_distance(f.points[i], f.points[j]);
            if (dist == 0.0)
                throw DomainError("holder_seminorm: duplicate domain points");
            double ratio = std::abs(f.values[i] - f.values[j]) / std::pow(dist, alpha);
            best = std::max(best, ratio);
        }
    }
    return best;
}

}  // namespace

const char* seminorm_kind_name(SeminormKind kind) {
    switch (kind) {
        case SeminormKind::Zero: return "zero";
        case SeminormKind::BoundedVariation: return "bounded_variation";
        case SeminormKind::Hoelder: return "hoelder";
        case SeminormKind::Lipschitz: return "lipschitz";
    }
    return "unknown";
}

SampledFunction SampledFunction::on_grid(std::span<const double> grid,
                                         std::span<const double> vals,
                                         double alpha) {
    if (grid.size() != vals.size())
        throw DomainError("SampledFunction: grid and value lengths differ");
    SampledFunction f;
    f.points.reserve(grid.size());
    for (double z : grid) f.points.push_back({z});
    f.values.assign(vals.begin(), vals.end());
    f.holder_exponent = alpha;
    return f;
}

double sup_norm(const SampledFunction& f) {
    if (f.size() == 0) throw DomainError("sup_norm: empty function");
    double best = 0.0;
    for (double v : f.values) best = std::max(best, std::abs(v));
    return best;
}

double bv_seminorm(const SampledFunction& f) {
    if (f.size() == 0) throw DomainError("bv_seminorm: empty function");
    if (f.dimension() != 1) throw DomainError("bv_seminorm: requires 1-d domain");
    double total = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (!(f.points[i - 1][0] < f.points[i][0]))
            throw DomainError("bv_seminorm: points must be strictly increasing");
        total += std::abs(f.values[i] - f.values[i - 1]);
    }
    return total;
}

double holder_seminorm(const SampledFunction& f) {
    return holder_with_alpha(f, f.holder_exponent);
}

double seminorm(const SampledFunction& f, SeminormKind kind) {
    switch (kind) {
        case SeminormKind::Zero:
            if (f.size() == 0) throw DomainError("seminorm: empty function");
            return 0.0;
        case SeminormKind::BoundedVariation: return bv_seminorm(f);
        case SeminormKind::Hoelder: return holder_with_alpha(f, f.holder_exponent);
        case SeminormKind::Lipschitz: return holder_with_alpha(f, 1.0);
    }
    throw DomainError("seminorm: unknown kind");
}

CNorm c_norm(const SampledFunction& f, SeminormKind kind) {
    CNorm n;
    n.sup_norm = sup_norm(f);
    n.semi_norm = seminorm(f, kind);
    n.total = n.sup_norm + n.semi_norm;
    return n;
}

ExpPropertyReport check_exp_property(const SampledFunction& f, SeminormKind kind) {
    SampledFunction ef = f;
    for (double& v : ef.values) v = std::exp(v);

    ExpPropertyReport report;
    report.lhs = seminorm(ef, kind);
    report.rhs = sup_norm(ef) * seminorm(f, kind);
    report.holds = report.lhs <= report.rhs * (1.0 + 1e-12);
    return report;
}

LinearInterpolant::LinearInterpolant(const SampledFunction& f) {
    if (f.size() == 0) throw DomainError("LinearInterpolant: empty function");
    if (f.dimension() != 1) throw DomainError("LinearInterpolant: requires 1-d domain");
    xs_.reserve(f.size());
    for (const auto& p : f.points) xs_.push_back(p[0]);
    ys_ = f.values;
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i - 1] < xs_[i]))
            throw DomainError("LinearInterpolant: points must be strictly increasing");
}

double LinearInterpolant::operator()(double z) const {
    if (z <= xs_.front()) return ys_.front();
    if (z >= xs_.back()) return ys_.back();
    auto it = std::upper_bound(xs_.begin(), xs_.end(), z);
    std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    std::size_t lo = hi - 1;
    double t = (z - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + t * (ys_[hi] - ys_[lo]);
}

StateFunction to_state_function(const SampledFunction& f, int coordinate) {
    if (coordinate < 0) throw DomainError("to_state_function: negative coordinate");
    LinearInterpolant interp(f);
    return [interp, coordinate](std::span<const double> state) {
        if (coordinate >= static_cast<int>(state.size()))
            throw DomainError("to_state_function: coordinate out of range");
        return interp(state[static_cast<std::size_t>(coordinate)]);
    };
}

}  // namespace cmix
