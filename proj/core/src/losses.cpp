#include "cmix/losses.hpp"

#include <cmath>

#include "cmix/errors.hpp"

namespace cmix {

LossSpec LossSpec::least_squares(double clip_level, double scale) {
    LossSpec s{LossKind::LeastSquares, 0.5, clip_level, scale};
    s.validate();
    return s;
}

LossSpec LossSpec::pinball(double tau, double clip_level, double scale) {
    LossSpec s{LossKind::Pinball, tau, clip_level, scale};
    s.validate();
    return s;
}

LossSpec LossSpec::normalized() const {
    LossSpec s = *this;
    const double m = 2.0 * clip_level;
    s.scale = kind == LossKind::LeastSquares ? 1.0 / (m * m) : 1.0 / m;
    return s;
}

void LossSpec::validate() const {
    if (kind == LossKind::Pinball && !(tau > 0.0 && tau < 1.0))
        throw DomainError("loss: pinball tau must lie in (0, 1)");
    if (!(clip_level > 0.0)) throw DomainError("loss: clip level must be positive");
    if (!(scale > 0.0)) throw DomainError("loss: scale must be positive");
}

double clip(double t, double clip_level) {
    if (t > clip_level) return clip_level;
    if (t < -clip_level) return -clip_level;
    return t;
}

double pinball_loss(double tau, double r) {
    return r >= 0.0 ? tau * r : -(1.0 - tau) * r;
}

double loss(const LossSpec& spec, double y, double t) {
    const double r = y - t;
    if (spec.kind == LossKind::LeastSquares) return spec.scale * r * r;
    return spec.scale * pinball_loss(spec.tau, r);
}

bool clipping_reduces_loss(const LossSpec& spec,
                           std::span<const std::pair<double, double>> yt_samples) {
    for (const auto& [y, t] : yt_samples) {
        if (std::abs(y) > spec.clip_level)
            throw DomainError("clipping_reduces_loss: |y| must not exceed the clip level");
        if (loss(spec, y, clip(t, spec.clip_level)) > loss(spec, y, t)) return false;
    }
    return true;
}

double empirical_risk(const LossSpec& spec, std::span<const double> y,
                      std::span<const double> predictions) {
    if (y.empty()) throw DomainError("empirical_risk: empty data");
    if (y.size() != predictions.size())
        throw DomainError("empirical_risk: targets and predictions differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sum += loss(spec, y[i], predictions[i]);
    return sum / static_cast<double>(y.size());
}

double lipschitz_constant(const LossSpec& spec, double f_sup, double f_lip) {
    if (f_sup < 0.0 || f_lip < 0.0)
        throw DomainError("lipschitz_constant: bounds must be nonnegative");
    const double root2 = std::sqrt(2.0);
    switch (spec.kind) {
        case LossKind::LeastSquares:
            return spec.scale * 2.0 * root2 * (spec.clip_level + f_sup) * (1.0 + f_lip);
        case LossKind::Pinball:
            return spec.scale * root2 * (1.0 + f_lip);
    }
    throw DomainError("lipschitz_constant: unknown loss kind");
}

}  // namespace cmix
